//! LOCC discrimination trees and their exact verifier.
//!
//! A tree alternates one-party block measurements; the verifier tracks which
//! states remain possible in every branch. At a leaf the remaining candidates
//! must be separable by a final local projective measurement: some party's
//! factors fall into mutually orthogonal parallel classes, and every class is
//! itself separable (a class of one state trivially is).

use std::collections::BTreeSet;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::families::{multiparty_labels, Family};
use crate::measurement::{apply_projector, LocalMeasurement};
use crate::par;
use crate::state::{ProductState, StateSet};

#[derive(Debug, Clone, PartialEq)]
pub enum ProtocolTree {
    Leaf,
    Node { measurement: LocalMeasurement, children: Vec<ProtocolTree> },
}

impl ProtocolTree {
    pub fn node(measurement: LocalMeasurement, children: Vec<ProtocolTree>) -> Self {
        ProtocolTree::Node { measurement, children }
    }

    /// `party` measures `blocks` (literal form), every child a leaf.
    fn split(party: &str, blocks: &str, children: Vec<ProtocolTree>) -> Self {
        let m = LocalMeasurement::parse_blocks(party, blocks).expect("builtin literal");
        Self::node(m, children)
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            ProtocolTree::Leaf => 1,
            ProtocolTree::Node { children, .. } => children.iter().map(Self::leaf_count).sum(),
        }
    }

    /// `{"party":"A","measure":"0-3;4-6","children":{"1":…,"2":"leaf"}}`.
    pub fn to_json(&self) -> Value {
        match self {
            ProtocolTree::Leaf => Value::String("leaf".into()),
            ProtocolTree::Node { measurement, children } => {
                let mut kids = Map::new();
                for (o, c) in measurement.outcomes.iter().zip(children) {
                    kids.insert(o.id.clone(), c.to_json());
                }
                let mut m = Map::new();
                m.insert("party".into(), Value::String(measurement.party.clone()));
                m.insert("measure".into(), Value::String(measurement.blocks_literal()));
                m.insert("children".into(), Value::Object(kids));
                Value::Object(m)
            }
        }
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |msg: &str| Error::MalformedProtocol(msg.to_string());
        match v {
            Value::String(s) if s == "leaf" => Ok(ProtocolTree::Leaf),
            Value::Object(m) => {
                let party = m.get("party").and_then(Value::as_str).ok_or_else(|| bad("node without `party`"))?;
                let measure = m.get("measure").and_then(Value::as_str).ok_or_else(|| bad("node without `measure`"))?;
                let measurement = LocalMeasurement::parse_blocks(party, measure)?;
                let kids = m.get("children").and_then(Value::as_object).ok_or_else(|| bad("node without `children`"))?;
                if kids.len() != measurement.outcomes.len() {
                    return Err(bad(&format!(
                        "node `{party}:{measure}` has {} outcomes but {} children",
                        measurement.outcomes.len(),
                        kids.len()
                    )));
                }
                let children = measurement
                    .outcomes
                    .iter()
                    .map(|o| {
                        kids.get(&o.id)
                            .ok_or_else(|| bad(&format!("missing child for outcome `{}`", o.id)))
                            .and_then(Self::from_json)
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Self::node(measurement, children))
            }
            _ => Err(bad("expected \"leaf\" or a node object")),
        }
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Self::from_json(&serde_json::from_str(s)?)
    }
}

/// A leaf that could not finish, with the branch that led to it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LeafFailure {
    /// Outcomes along the branch, e.g. `A∈{0-3}`.
    pub path: Vec<String>,
    /// Original labels of the candidates left at the leaf.
    pub candidates: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProtocolVerdict {
    pub accepted: bool,
    pub leaves: usize,
    pub failures: Vec<LeafFailure>,
}

/// True iff a final round of local projective measurements separates `states`.
pub fn leaf_separable(states: &[&ProductState]) -> bool {
    if states.len() <= 1 {
        return true;
    }
    let n_parties = states[0].factors.len();
    (0..n_parties).any(|p| {
        let mut classes: Vec<Vec<&ProductState>> = Vec::new();
        for &s in states {
            match classes.iter_mut().find(|c| c[0].factors[p].is_parallel(&s.factors[p])) {
                Some(c) => c.push(s),
                None => classes.push(vec![s]),
            }
        }
        if classes.len() < 2 {
            return false;
        }
        let orthogonal = (0..classes.len()).all(|i| {
            (i + 1..classes.len()).all(|j| classes[i][0].local_inner(classes[j][0], p).is_zero())
        });
        orthogonal && classes.iter().all(|c| leaf_separable(c))
    })
}

fn walk(
    cur: &StateSet,
    parents: &[String],
    tree: &ProtocolTree,
    path: &[String],
) -> Result<(usize, Vec<LeafFailure>)> {
    match tree {
        ProtocolTree::Leaf => {
            let refs: Vec<&ProductState> = cur.states().iter().collect();
            if leaf_separable(&refs) {
                Ok((1, Vec::new()))
            } else {
                Ok((1, vec![LeafFailure { path: path.to_vec(), candidates: parents.to_vec() }]))
            }
        }
        ProtocolTree::Node { measurement, children } => {
            measurement.validate(cur.space())?;
            if children.len() != measurement.outcomes.len() {
                return Err(Error::MalformedProtocol(format!(
                    "node `{measurement}` has {} children",
                    children.len()
                )));
            }
            let blocks = measurement.diagonal_blocks()?;
            let base = path.to_vec();
            let results = par::map_range(blocks.len(), |k| -> Result<(usize, Vec<LeafFailure>, Vec<String>)> {
                let next = apply_projector(cur, &measurement.party, blocks[k])?;
                let next_parents: Vec<String> = next
                    .states()
                    .iter()
                    .map(|s| {
                        let i = cur.position(s.label.as_str()).or_else(|| cur.position(s.label.trim_start_matches('~')));
                        parents[i.expect("projected label tracks its source")].clone()
                    })
                    .collect();
                let mut p = base.clone();
                p.push(format!("{}∈{{{}}}", measurement.party, fmt_block(blocks[k])));
                let (n, f) = walk(&next, &next_parents, &children[k], &p)?;
                Ok((n, f, next_parents))
            });
            let mut leaves = 0;
            let mut failures = Vec::new();
            let mut covered = BTreeSet::new();
            for r in results {
                let (n, f, seen) = r?;
                leaves += n;
                failures.extend(f);
                covered.extend(seen);
            }
            if covered.len() != parents.len() {
                return Err(Error::SolverInvariant(format!("a candidate vanished at node `{measurement}`")));
            }
            Ok((leaves, failures))
        }
    }
}

fn fmt_block(b: &BTreeSet<usize>) -> String {
    let m = LocalMeasurement::blocks("", std::slice::from_ref(b));
    m.blocks_literal()
}

/// Simulate `tree` on `set` with exact candidate tracking.
pub fn verify_protocol(set: &StateSet, tree: &ProtocolTree) -> Result<ProtocolVerdict> {
    // internal labels keep tilde tracking unambiguous
    let relabeled: Vec<ProductState> = set
        .states()
        .iter()
        .enumerate()
        .map(|(i, s)| ProductState::new(format!("s{i}"), s.factors.clone()))
        .collect();
    let work = set.with_states(relabeled)?;
    let parents: Vec<String> = set.states().iter().map(|s| s.label.clone()).collect();
    let (leaves, failures) = walk(&work, &parents, tree, &[])?;
    Ok(ProtocolVerdict { accepted: failures.is_empty(), leaves, failures })
}

/// `party` measures in the computational basis; every child is `child`.
fn basis_node(party: &str, dim: usize, child: &ProtocolTree) -> ProtocolTree {
    ProtocolTree::node(LocalMeasurement::computational(party, dim), vec![child.clone(); dim])
}

fn type2_78_protocol() -> ProtocolTree {
    use ProtocolTree::Leaf;
    let t = ProtocolTree::split;
    t(
        "A",
        "0-3;4-6",
        vec![
            t(
                "B",
                "4-5;0-3,6-7",
                vec![
                    t("A", "0-2;3-6", vec![Leaf, Leaf]),
                    t("A", "0;1-6", vec![Leaf, t("B", "0;1-7", vec![Leaf, Leaf])]),
                ],
            ),
            t(
                "B",
                "4-5;0-3,6-7",
                vec![
                    t("A", "0-4;5-6", vec![Leaf, Leaf]),
                    t("A", "0-5;6", vec![t("B", "7;0-6", vec![Leaf, Leaf]), Leaf]),
                ],
            ),
        ],
    )
}

/// Shipped discrimination tree for a family's set.
pub fn builtin_protocol(family: &Family) -> Result<ProtocolTree> {
    match family {
        // locally indistinguishable by construction: no tree exists
        Family::Yu(_) => Err(Error::UnsupportedFamily(family.to_string())),
        Family::TypeI(d) => Ok(basis_node("A", *d, &ProtocolTree::Leaf)),
        Family::StrongTypeI11 => Ok(basis_node("A", 11, &ProtocolTree::Leaf)),
        Family::TypeII78 => Ok(type2_78_protocol()),
        Family::MultipartyTypeI(ds) => {
            let labels = multiparty_labels(ds.len());
            let mut tree = ProtocolTree::Leaf;
            for (i, &d) in ds.iter().enumerate().rev() {
                tree = basis_node(&labels[2 * i], d, &tree);
            }
            Ok(tree)
        }
    }
}
