//! One-party block measurements and their outcome sets.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::par;
use crate::state::{ProductState, SpaceSpec, StateSet};

/// Outcome operator. Only diagonal projectors are executable.
#[derive(Debug, Clone, PartialEq)]
pub enum OutcomeElement {
    /// Projector onto the computational-basis indices in the set.
    Diagonal(BTreeSet<usize>),
    /// General Kraus operator (row-major); carried by the data model only.
    Kraus(Vec<Vec<Complex64>>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub id: String,
    pub element: OutcomeElement,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalMeasurement {
    pub party: String,
    pub outcomes: Vec<Outcome>,
}

impl LocalMeasurement {
    /// Diagonal block measurement with outcome ids `1, 2, …`.
    pub fn blocks(party: &str, blocks: &[BTreeSet<usize>]) -> Self {
        Self {
            party: party.to_string(),
            outcomes: blocks
                .iter()
                .enumerate()
                .map(|(i, b)| Outcome { id: (i + 1).to_string(), element: OutcomeElement::Diagonal(b.clone()) })
                .collect(),
        }
    }

    /// Rank-one projectors onto every basis vector.
    pub fn computational(party: &str, dim: usize) -> Self {
        let blocks: Vec<BTreeSet<usize>> = (0..dim).map(|i| [i].into()).collect();
        Self::blocks(party, &blocks)
    }

    /// Parse the block part of a literal, e.g. `0-4;5-10` or `0,2;1,3-4`.
    pub fn parse_blocks(party: &str, text: &str) -> Result<Self> {
        let mut blocks = Vec::new();
        for chunk in text.split(';') {
            let mut set = BTreeSet::new();
            for item in chunk.split(',') {
                let item = item.trim();
                let bad = || Error::MalformedMeasurement(format!("bad index item `{item}`"));
                if let Some((lo, hi)) = item.split_once('-') {
                    let lo: usize = lo.trim().parse().map_err(|_| bad())?;
                    let hi: usize = hi.trim().parse().map_err(|_| bad())?;
                    if lo > hi {
                        return Err(bad());
                    }
                    set.extend(lo..=hi);
                } else {
                    set.insert(item.parse().map_err(|_| bad())?);
                }
            }
            blocks.push(set);
        }
        Ok(Self::blocks(party, &blocks))
    }

    /// Diagonal subsets, in outcome order; rejects general outcomes.
    pub fn diagonal_blocks(&self) -> Result<Vec<&BTreeSet<usize>>> {
        self.outcomes
            .iter()
            .map(|o| match &o.element {
                OutcomeElement::Diagonal(s) => Ok(s),
                OutcomeElement::Kraus(_) => Err(Error::UnsupportedMeasurement(format!(
                    "outcome `{}` on party `{}` is not a diagonal projector",
                    o.id, self.party
                ))),
            })
            .collect()
    }

    /// Checks party existence, disjointness and completeness; returns the party index.
    pub fn validate(&self, space: &SpaceSpec) -> Result<usize> {
        let p = space.party_index(&self.party)?;
        let dim = space.dim(p);
        let blocks = self.diagonal_blocks()?;
        let mut ids = BTreeSet::new();
        let mut covered = BTreeSet::new();
        for (o, b) in self.outcomes.iter().zip(&blocks) {
            if !ids.insert(o.id.as_str()) {
                return Err(Error::MalformedMeasurement(format!("duplicate outcome id `{}`", o.id)));
            }
            if b.is_empty() {
                return Err(Error::MalformedMeasurement(format!("outcome `{}` is empty", o.id)));
            }
            for &i in b.iter() {
                if i >= dim {
                    return Err(Error::IndexOutOfRange { index: i, dim });
                }
                if !covered.insert(i) {
                    return Err(Error::MalformedMeasurement(format!("index {i} appears in two outcomes")));
                }
            }
        }
        if covered.len() != dim {
            let missing: Vec<String> = (0..dim).filter(|i| !covered.contains(i)).map(|i| i.to_string()).collect();
            return Err(Error::MalformedMeasurement(format!("indices {} not covered", missing.join(","))));
        }
        Ok(p)
    }

    /// The block part of the literal (`0-4;5-10`).
    pub fn blocks_literal(&self) -> String {
        let fmt_block = |b: &BTreeSet<usize>| {
            let v: Vec<usize> = b.iter().copied().collect();
            let mut parts = Vec::new();
            let mut i = 0;
            while i < v.len() {
                let mut j = i;
                while j + 1 < v.len() && v[j + 1] == v[j] + 1 {
                    j += 1;
                }
                parts.push(if j > i { format!("{}-{}", v[i], v[j]) } else { v[i].to_string() });
                i = j + 1;
            }
            parts.join(",")
        };
        self.outcomes
            .iter()
            .map(|o| match &o.element {
                OutcomeElement::Diagonal(b) => fmt_block(b),
                OutcomeElement::Kraus(_) => "?".to_string(),
            })
            .collect::<Vec<_>>()
            .join(";")
    }
}

impl fmt::Display for LocalMeasurement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.party, self.blocks_literal())
    }
}

impl FromStr for LocalMeasurement {
    type Err = Error;

    /// `B:0-4;5-10`.
    fn from_str(s: &str) -> Result<Self> {
        let (party, blocks) = s
            .split_once(':')
            .ok_or_else(|| Error::MalformedMeasurement(format!("expected `party:blocks`, got `{s}`")))?;
        Self::parse_blocks(party.trim(), blocks)
    }
}

/// Simultaneous local measurements on distinct parties; literal parts joined by `/`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointMeasurement {
    pub parts: Vec<LocalMeasurement>,
}

impl JointMeasurement {
    pub fn new(parts: Vec<LocalMeasurement>) -> Self {
        Self { parts }
    }

    pub fn single(m: LocalMeasurement) -> Self {
        Self { parts: vec![m] }
    }

    pub fn validate(&self, space: &SpaceSpec) -> Result<Vec<usize>> {
        if self.parts.is_empty() {
            return Err(Error::MalformedMeasurement("no local measurements".into()));
        }
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for m in &self.parts {
            let p = m.validate(space)?;
            if !seen.insert(p) {
                return Err(Error::MalformedMeasurement(format!("party `{}` measured twice", m.party)));
            }
            out.push(p);
        }
        Ok(out)
    }

    /// Joint outcome ids (`1`, or `1.2.1` for several parts) in lexicographic order.
    pub fn outcome_ids(&self) -> Vec<String> {
        let mut ids = vec![String::new()];
        for m in &self.parts {
            ids = ids
                .iter()
                .flat_map(|prefix| {
                    m.outcomes.iter().map(move |o| {
                        if prefix.is_empty() { o.id.clone() } else { format!("{prefix}.{}", o.id) }
                    })
                })
                .collect();
        }
        ids
    }
}

impl fmt::Display for JointMeasurement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.parts.iter().map(|m| m.to_string()).collect();
        write!(f, "{}", parts.join("/"))
    }
}

impl FromStr for JointMeasurement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(Self { parts: s.split('/').map(str::parse).collect::<Result<Vec<_>>>()? })
    }
}

/// Post-measurement set for one outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeSet {
    pub outcome_id: String,
    pub states: StateSet,
    /// Original label of each retained state, aligned with `states`.
    pub parents: Vec<String>,
    /// Original labels of states annihilated by the outcome.
    pub dropped: Vec<String>,
}

impl OutcomeSet {
    pub fn cardinality(&self) -> usize {
        self.states.len()
    }
}

/// Label with tilde marks removed.
pub fn base_label(label: &str) -> &str {
    label.trim_start_matches('~')
}

fn project_state(s: &ProductState, party: usize, subset: &BTreeSet<usize>) -> Option<ProductState> {
    let f = s.factors[party].project(subset);
    if f.is_zero() {
        return None;
    }
    if f == s.factors[party] {
        return Some(s.clone());
    }
    let mut factors = s.factors.clone();
    factors[party] = f;
    let label = if s.label.starts_with('~') { s.label.clone() } else { format!("~{}", s.label) };
    Some(ProductState::new(label, factors))
}

/// Project `party` onto `subset`, dropping annihilated states. Changed states get
/// a `~` prefix; unchanged ones keep their label.
pub fn apply_projector(set: &StateSet, party: &str, subset: &BTreeSet<usize>) -> Result<StateSet> {
    Ok(apply_tracked(set, party, subset)?.0)
}

/// As [`apply_projector`], also returning the kept and dropped positions.
fn apply_tracked(set: &StateSet, party: &str, subset: &BTreeSet<usize>) -> Result<(StateSet, Vec<usize>, Vec<usize>)> {
    let p = set.space().party_index(party)?;
    let dim = set.space().dim(p);
    if let Some(&bad) = subset.iter().find(|&&i| i >= dim) {
        return Err(Error::IndexOutOfRange { index: bad, dim });
    }
    let mut kept = Vec::new();
    let mut kept_idx = Vec::new();
    let mut dropped = Vec::new();
    for (i, s) in set.states().iter().enumerate() {
        match project_state(s, p, subset) {
            Some(t) => {
                kept.push(t);
                kept_idx.push(i);
            }
            None => dropped.push(i),
        }
    }
    Ok((set.with_states(kept)?, kept_idx, dropped))
}

/// One outcome set per outcome of `m`.
pub fn measurement_outcomes(set: &StateSet, m: &LocalMeasurement) -> Result<Vec<OutcomeSet>> {
    joint_outcomes(set, &JointMeasurement::single(m.clone()))
}

/// One outcome set per joint outcome, in [`JointMeasurement::outcome_ids`] order.
pub fn joint_outcomes(set: &StateSet, m: &JointMeasurement) -> Result<Vec<OutcomeSet>> {
    m.validate(set.space())?;
    // (id, set, surviving original positions)
    let mut frontier = vec![(String::new(), set.clone(), (0..set.len()).collect::<Vec<usize>>())];
    for part in &m.parts {
        let blocks = part.diagonal_blocks()?;
        let mut next = Vec::with_capacity(frontier.len() * blocks.len());
        for (prefix, cur, positions) in &frontier {
            let results = par::map_slice(&blocks, |b| apply_tracked(cur, &part.party, b));
            for (o, r) in part.outcomes.iter().zip(results) {
                let (s, kept, _) = r?;
                let id = if prefix.is_empty() { o.id.clone() } else { format!("{prefix}.{}", o.id) };
                next.push((id, s, kept.iter().map(|&k| positions[k]).collect()));
            }
        }
        frontier = next;
    }
    Ok(frontier
        .into_iter()
        .map(|(outcome_id, states, positions)| {
            let keep: BTreeSet<usize> = positions.iter().copied().collect();
            OutcomeSet {
                outcome_id,
                parents: positions.iter().map(|&i| set.states()[i].label.clone()).collect(),
                dropped: (0..set.len()).filter(|i| !keep.contains(i)).map(|i| set.states()[i].label.clone()).collect(),
                states,
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub outcome_id: String,
    pub first: String,
    pub second: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OpCheck {
    pub preserving: bool,
    pub violations: Vec<Violation>,
}

/// Exact check that every outcome set is pairwise orthogonal.
pub fn is_orthogonality_preserving(set: &StateSet, m: &JointMeasurement) -> Result<OpCheck> {
    let outcomes = joint_outcomes(set, m)?;
    let mut violations = Vec::new();
    for o in &outcomes {
        let st = o.states.states();
        let bad = par::filter_pairs(st.len(), |i, j| {
            (!st[i].inner(&st[j]).is_zero()).then(|| Violation {
                outcome_id: o.outcome_id.clone(),
                first: o.parents[i].clone(),
                second: o.parents[j].clone(),
            })
        });
        violations.extend(bad);
    }
    Ok(OpCheck { preserving: violations.is_empty(), violations })
}
