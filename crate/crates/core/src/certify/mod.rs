//! Certification suite.
//!
//! Everything that can be decided exactly (orthogonality, cliques, measurement
//! outcomes) is; only the OPLM nullspace runs in floating point.

pub mod classify;
pub mod clique;
pub mod lemma1;
pub mod oplm;

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::measurement::{base_label, is_orthogonality_preserving, JointMeasurement, LocalMeasurement};
use crate::par;
use crate::state::StateSet;

pub use classify::{classify_hidden_nonlocality, Classification, OutcomeEvidence, Verdict};
pub use clique::{joint_nonorth_clique, max_clique, nonorth_clique};
pub use lemma1::check_lemma1_instance;
pub use oplm::{is_trivial_oplm, oplm_space, HermitianBasis};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrthogonalityReport {
    pub orthogonal: bool,
    pub violations: Vec<(String, String)>,
}

/// Exact pairwise orthogonality.
pub fn check_orthogonality(set: &StateSet) -> OrthogonalityReport {
    let st = set.states();
    let violations = par::filter_pairs(st.len(), |i, j| {
        (!st[i].inner(&st[j]).is_zero()).then(|| (st[i].label.clone(), st[j].label.clone()))
    });
    OrthogonalityReport { orthogonal: violations.is_empty(), violations }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartyClique {
    pub party: String,
    /// Largest family pairwise non-orthogonal on the other parties.
    pub clique_size: usize,
    pub witness: Vec<String>,
    /// `d / p` for the party's dimension `d` and smallest prime factor `p`.
    pub threshold: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "party")]
pub enum IrredundancyVerdict {
    Irredundant,
    Redundant(String),
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IrredundancyCertificate {
    pub parties: Vec<PartyClique>,
    pub verdict: IrredundancyVerdict,
}

/// Clique counting against the largest proper factor dimension of each party.
pub fn certify_irredundancy(set: &StateSet) -> IrredundancyCertificate {
    let space = set.space();
    let st = set.states();
    let mut parties = Vec::new();
    let mut redundant = None;
    for (p, party) in space.parties().iter().enumerate() {
        let (size, witness) = joint_nonorth_clique(set, p);
        let threshold = party.dim / party.smallest_prime();
        parties.push(PartyClique { party: party.label.clone(), clique_size: size, witness, threshold });
        if redundant.is_none() && st.len() >= 2 && size <= 1 {
            // other factors already pairwise orthogonal: X can be discarded
            redundant = Some(party.label.clone());
        }
    }
    let verdict = match redundant {
        Some(x) => IrredundancyVerdict::Redundant(x),
        None if parties.iter().all(|c| c.clique_size > c.threshold) => IrredundancyVerdict::Irredundant,
        None => IrredundancyVerdict::Unknown,
    };
    IrredundancyCertificate { parties, verdict }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CertVerdict {
    Certified,
    Unknown,
}

#[derive(Debug, Clone, Serialize)]
pub struct PartyOplm {
    pub party: String,
    pub support_dim: usize,
    pub dimension: usize,
    pub n_constraints: usize,
    pub gap: oplm::RankGap,
}

impl From<&HermitianBasis> for PartyOplm {
    fn from(b: &HermitianBasis) -> Self {
        Self {
            party: b.party.clone(),
            support_dim: b.support.len(),
            dimension: b.dimension,
            n_constraints: b.n_constraints,
            gap: b.gap,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct IndistinguishabilityCertificate {
    pub verdict: CertVerdict,
    pub witness: Vec<String>,
    pub parties: Vec<PartyOplm>,
    /// Parties on which every witness factor is the same up to scale.
    pub common_parties: Vec<String>,
    pub reason: Option<String>,
}

/// Resolve labels against the set, tolerating `~` marks on either side.
pub fn resolve_labels(set: &StateSet, labels: &[String]) -> Result<Vec<String>> {
    labels
        .iter()
        .map(|l| {
            if set.get(l).is_some() {
                return Ok(l.clone());
            }
            set.states()
                .iter()
                .find(|s| base_label(&s.label) == base_label(l))
                .map(|s| s.label.clone())
                .ok_or_else(|| Error::UnknownLabel(l.clone()))
        })
        .collect()
}

fn common_parties(set: &StateSet) -> Vec<usize> {
    let st = set.states();
    (0..set.space().n_parties())
        .filter(|&p| st.iter().all(|s| s.factors[p].is_parallel(&st[0].factors[p])))
        .collect()
}

/// Certified iff the witness (default: whole set), restricted to its supports,
/// has at least three states and trivial OPLM on every party that varies.
pub fn certify_indistinguishability(set: &StateSet, witness: Option<&[String]>) -> Result<IndistinguishabilityCertificate> {
    let labels = match witness {
        Some(w) => resolve_labels(set, w)?,
        None => set.labels().iter().map(|s| s.to_string()).collect(),
    };
    let sub = set.subset(&labels)?;
    let orth = check_orthogonality(&sub);
    if let Some((a, b)) = orth.violations.first() {
        return Err(Error::NonOrthogonal(a.clone(), b.clone()));
    }
    let unknown = |reason: String, parties, common| IndistinguishabilityCertificate {
        verdict: CertVerdict::Unknown,
        witness: labels.clone(),
        parties,
        common_parties: common,
        reason: Some(reason),
    };
    if sub.len() < 3 {
        return Ok(unknown(format!("witness has {} states; at least 3 are needed", sub.len()), Vec::new(), Vec::new()));
    }
    let sub = sub.restrict_to_supports()?;
    let common = common_parties(&sub);
    let common_labels: Vec<String> = common.iter().map(|&p| sub.space().label(p).to_string()).collect();
    let varying: Vec<usize> = (0..sub.space().n_parties()).filter(|p| !common.contains(p)).collect();
    let bases = par::map_slice(&varying, |&p| oplm_space(&sub, sub.space().label(p), true));
    let mut parties = Vec::new();
    for b in bases {
        parties.push(PartyOplm::from(&b?));
    }
    if let Some(bad) = parties.iter().find(|b| b.dimension > 1) {
        let reason = format!("party {} admits a {}-dimensional OPLM space", bad.party, bad.dimension);
        return Ok(unknown(reason, parties, common_labels));
    }
    Ok(IndistinguishabilityCertificate {
        verdict: CertVerdict::Certified,
        witness: labels,
        parties,
        common_parties: common_labels,
        reason: None,
    })
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind")]
pub enum Irreducibility {
    Irreducible,
    /// A projective OPLM with an outcome that eliminates a state.
    Reducible { measurement: String, outcome: String, eliminated: Vec<String> },
    Unknown,
}

#[derive(Debug, Clone, Serialize)]
pub struct IrreducibilityCertificate {
    pub verdict: Irreducibility,
    pub parties: Vec<PartyOplm>,
}

/// Cheap candidate measurements: computational basis and `{i} | rest` splits.
fn elimination_candidates(set: &StateSet) -> Vec<LocalMeasurement> {
    let mut out = Vec::new();
    for (p, party) in set.space().parties().iter().enumerate() {
        let d = party.dim;
        if d < 2 {
            continue;
        }
        out.push(LocalMeasurement::computational(&party.label, d));
        for i in set.support(p) {
            let rest: BTreeSet<usize> = (0..d).filter(|&k| k != i).collect();
            out.push(LocalMeasurement::blocks(&party.label, &[[i].into(), rest]));
        }
    }
    out
}

fn find_elimination(set: &StateSet) -> Result<Option<Irreducibility>> {
    for m in elimination_candidates(set) {
        let jm = JointMeasurement::single(m.clone());
        if !is_orthogonality_preserving(set, &jm)?.preserving {
            continue;
        }
        for o in crate::measurement::measurement_outcomes(set, &m)? {
            if !o.dropped.is_empty() && o.cardinality() > 0 {
                return Ok(Some(Irreducibility::Reducible {
                    measurement: m.to_string(),
                    outcome: o.outcome_id,
                    eliminated: o.dropped,
                }));
            }
        }
    }
    Ok(None)
}

/// Irreducible when every party has trivial OPLM; Reducible only with an explicit
/// eliminating measurement; otherwise Unknown.
pub fn certify_irreducibility(set: &StateSet) -> Result<IrreducibilityCertificate> {
    if set.len() < 2 {
        return Err(Error::SingletonSet);
    }
    let bases = par::map_range(set.space().n_parties(), |p| oplm_space(set, set.space().label(p), true));
    let mut parties = Vec::new();
    for b in bases {
        parties.push(PartyOplm::from(&b?));
    }
    let verdict = if parties.iter().all(|b| b.dimension == 1) {
        Irreducibility::Irreducible
    } else {
        find_elimination(set)?.unwrap_or(Irreducibility::Unknown)
    };
    Ok(IrreducibilityCertificate { verdict, parties })
}
