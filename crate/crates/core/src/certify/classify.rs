//! End-to-end hidden-nonlocality classification.

use std::fmt;

use serde::Serialize;

use super::{
    certify_indistinguishability, certify_irreducibility, certify_irredundancy, check_orthogonality, CertVerdict,
    IndistinguishabilityCertificate, Irreducibility, IrreducibilityCertificate, IrredundancyCertificate,
    IrredundancyVerdict, OrthogonalityReport,
};
use crate::measurement::{is_orthogonality_preserving, joint_outcomes, JointMeasurement, OpCheck};
use crate::par;
use crate::protocols::{verify_protocol, ProtocolTree, ProtocolVerdict};
use crate::state::StateSet;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "reasons")]
pub enum Verdict {
    TypeI,
    StrongTypeI,
    TypeII,
    NotEstablished(Vec<String>),
}

impl Verdict {
    pub fn is_established(&self) -> bool {
        !matches!(self, Verdict::NotEstablished(_))
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::TypeI => write!(f, "genuine hidden nonlocality of type I"),
            Verdict::StrongTypeI => write!(f, "genuine hidden strong nonlocality of type I"),
            Verdict::TypeII => write!(f, "genuine hidden nonlocality of type II"),
            Verdict::NotEstablished(r) => write!(f, "not established ({})", r.join("; ")),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OutcomeEvidence {
    pub outcome_id: String,
    pub cardinality: usize,
    pub dropped: Vec<String>,
    pub indistinguishability: Option<IndistinguishabilityCertificate>,
    pub irreducibility: Option<IrreducibilityCertificate>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Classification {
    pub verdict: Verdict,
    pub protocol_id: String,
    pub measurement: String,
    pub set_size: usize,
    pub orthogonality: OrthogonalityReport,
    pub protocol: Option<ProtocolVerdict>,
    pub irredundancy: IrredundancyCertificate,
    pub orthogonality_preserving: Option<OpCheck>,
    pub outcomes: Vec<OutcomeEvidence>,
}

/// Run every stage, collecting the reasons any of them fails.
/// `witnesses[k]` is the witness for the `k`-th joint outcome (`None`: whole outcome set).
pub fn classify_hidden_nonlocality(
    set: &StateSet,
    m: &JointMeasurement,
    protocol: &ProtocolTree,
    protocol_id: &str,
    witnesses: &[Option<Vec<String>>],
) -> Classification {
    let mut reasons = Vec::new();

    let orthogonality = check_orthogonality(set);
    if !orthogonality.orthogonal {
        reasons.push(format!("set is not orthogonal ({} violating pairs)", orthogonality.violations.len()));
    }

    let protocol_verdict = match verify_protocol(set, protocol) {
        Ok(v) => {
            if !v.accepted {
                reasons.push(format!("protocol `{protocol_id}` fails at {} leaves", v.failures.len()));
            }
            Some(v)
        }
        Err(e) => {
            reasons.push(format!("protocol `{protocol_id}` cannot run: {e}"));
            None
        }
    };

    let irredundancy = certify_irredundancy(set);
    match &irredundancy.verdict {
        IrredundancyVerdict::Irredundant => {}
        IrredundancyVerdict::Redundant(x) => reasons.push(format!("party {x} is redundant")),
        IrredundancyVerdict::Unknown => reasons.push("irredundancy not certified by clique counting".into()),
    }

    let op = match is_orthogonality_preserving(set, m) {
        Ok(c) => {
            if !c.preserving {
                reasons.push(format!("measurement {m} is not orthogonality preserving"));
            }
            Some(c)
        }
        Err(e) => {
            reasons.push(format!("measurement {m} cannot run: {e}"));
            None
        }
    };

    let outcome_sets = if orthogonality.orthogonal && op.as_ref().is_some_and(|c| c.preserving) {
        joint_outcomes(set, m).unwrap_or_default()
    } else {
        Vec::new()
    };
    let all_full = !outcome_sets.is_empty() && outcome_sets.iter().all(|o| o.cardinality() == set.len());

    let outcomes: Vec<OutcomeEvidence> = par::map_range(outcome_sets.len(), |k| {
        let o = &outcome_sets[k];
        let witness = witnesses.get(k).cloned().flatten();
        let mut ev = OutcomeEvidence {
            outcome_id: o.outcome_id.clone(),
            cardinality: o.cardinality(),
            dropped: o.dropped.clone(),
            indistinguishability: None,
            irreducibility: None,
            error: None,
        };
        match certify_indistinguishability(&o.states, witness.as_deref()) {
            Ok(c) => ev.indistinguishability = Some(c),
            Err(e) => ev.error = Some(e.to_string()),
        }
        if all_full && o.cardinality() >= 2 {
            match certify_irreducibility(&o.states) {
                Ok(c) => ev.irreducibility = Some(c),
                Err(e) => ev.error = Some(e.to_string()),
            }
        }
        ev
    });

    for ev in &outcomes {
        let certified = ev.indistinguishability.as_ref().is_some_and(|c| c.verdict == CertVerdict::Certified);
        if !certified {
            let why = ev
                .error
                .clone()
                .or_else(|| ev.indistinguishability.as_ref().and_then(|c| c.reason.clone()))
                .unwrap_or_default();
            reasons.push(format!("outcome {} not certified indistinguishable: {why}", ev.outcome_id));
        }
    }
    if op.as_ref().is_some_and(|c| c.preserving) && outcome_sets.is_empty() {
        reasons.push("no outcome sets".into());
    }

    let verdict = if !reasons.is_empty() {
        Verdict::NotEstablished(reasons)
    } else if all_full {
        let strong = outcomes
            .iter()
            .all(|ev| matches!(ev.irreducibility.as_ref().map(|c| &c.verdict), Some(Irreducibility::Irreducible)));
        if strong { Verdict::StrongTypeI } else { Verdict::TypeI }
    } else {
        Verdict::TypeII
    };

    Classification {
        verdict,
        protocol_id: protocol_id.to_string(),
        measurement: m.to_string(),
        set_size: set.len(),
        orthogonality,
        protocol: protocol_verdict,
        irredundancy,
        orthogonality_preserving: op,
        outcomes,
    }
}
