//! Deterministic constructors for the product-state families.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::cyclo::CycloRational;
use crate::error::{Error, Result};
use crate::measurement::{JointMeasurement, LocalMeasurement};
use crate::protocols::{self, ProtocolTree};
use crate::state::{LocalVector, ProductState, SpaceSpec, StateSet};

/// Family identifier; string form `yu:d`, `type1:d`, `strong11`, `type2-78`,
/// `multi:d1,d2,…`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Family {
    Yu(usize),
    TypeI(usize),
    StrongTypeI11,
    TypeII78,
    MultipartyTypeI(Vec<usize>),
}

impl Family {
    pub fn construct(&self) -> Result<StateSet> {
        match self {
            Family::Yu(d) => yu_set(*d),
            Family::TypeI(d) => type1_set(*d),
            Family::StrongTypeI11 => strong_type1_set(),
            Family::TypeII78 => type2_set_78(),
            Family::MultipartyTypeI(ds) => multiparty_type1(ds),
        }
    }

    /// The block measurement that activates the family's hidden nonlocality.
    pub fn activating_measurement(&self) -> Option<JointMeasurement> {
        let split = |party: &str, d: usize| {
            let k = (d - 1) / 2;
            LocalMeasurement::blocks(party, &[(0..k).collect(), (k..d).collect()])
        };
        match self {
            Family::Yu(_) => None,
            Family::TypeI(d) => Some(JointMeasurement::single(split("B", *d))),
            Family::StrongTypeI11 => Some(JointMeasurement::single(split("B", 11))),
            Family::TypeII78 => Some(JointMeasurement::single(LocalMeasurement::blocks(
                "B",
                &[(0..5).collect(), (5..8).collect()],
            ))),
            Family::MultipartyTypeI(ds) => {
                let labels = multiparty_labels(ds.len());
                Some(JointMeasurement::new(
                    ds.iter().enumerate().map(|(i, &d)| split(&labels[2 * i + 1], d)).collect(),
                ))
            }
        }
    }

    /// Witness subsets, one per outcome of [`Family::activating_measurement`]
    /// in outcome order; `None` means "the whole outcome set".
    pub fn outcome_witnesses(&self) -> Option<Vec<Option<Vec<String>>>> {
        let type1 = |d: usize, prefix: &str| {
            let k = (d - 1) / 2;
            let lo = (1..=2 * k - 1).map(|i| format!("{prefix}psi{i}")).collect::<Vec<_>>();
            let hi = (1..=2 * k + 1).map(|i| format!("{prefix}phi{i}")).collect::<Vec<_>>();
            (lo, hi)
        };
        match self {
            Family::Yu(_) => None,
            Family::TypeI(d) => {
                let (lo, hi) = type1(*d, "");
                Some(vec![Some(lo), Some(hi)])
            }
            Family::StrongTypeI11 => Some(vec![None, None]),
            Family::TypeII78 => Some(vec![
                Some((1..=14).map(|i| format!("psi{i}")).collect()),
                Some((1..=8).map(|i| format!("phi{i}")).collect()),
            ]),
            Family::MultipartyTypeI(ds) => {
                // witness from the first block; its outcome is the first digit
                let labels = multiparty_labels(ds.len());
                let prefix = format!("{}{}.", labels[0], labels[1]);
                let (lo, hi) = type1(ds[0], &prefix);
                let n_rest: usize = 1 << (ds.len() - 1);
                let mut out = Vec::with_capacity(2 * n_rest);
                for w in [lo, hi] {
                    for _ in 0..n_rest {
                        out.push(Some(w.clone()));
                    }
                }
                Some(out)
            }
        }
    }

    pub fn builtin_protocol(&self) -> Result<ProtocolTree> {
        protocols::builtin_protocol(self)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Yu(d) => write!(f, "yu:{d}"),
            Family::TypeI(d) => write!(f, "type1:{d}"),
            Family::StrongTypeI11 => write!(f, "strong11"),
            Family::TypeII78 => write!(f, "type2-78"),
            Family::MultipartyTypeI(ds) => {
                let s: Vec<String> = ds.iter().map(usize::to_string).collect();
                write!(f, "multi:{}", s.join(","))
            }
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::UnknownFamily(s.to_string());
        let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
        match s.trim() {
            "strong11" => Ok(Family::StrongTypeI11),
            "type2-78" => Ok(Family::TypeII78),
            other => {
                let (kind, params) = other.split_once(':').ok_or_else(bad)?;
                match kind {
                    "yu" => Ok(Family::Yu(num(params)?)),
                    "type1" => Ok(Family::TypeI(num(params)?)),
                    "multi" => Ok(Family::MultipartyTypeI(
                        params.split(',').map(num).collect::<Result<Vec<_>>>()?,
                    )),
                    _ => Err(bad()),
                }
            }
        }
    }
}

fn basis(d: usize, i: usize) -> LocalVector {
    LocalVector::basis(d, i)
}

fn diff(d: usize, i: usize, j: usize) -> LocalVector {
    LocalVector::from_terms(d, &[(i, 1), (j, -1)])
}

/// `|m⟩ + … + |n⟩`.
fn range_sum(d: usize, m: usize, n: usize) -> LocalVector {
    let terms: Vec<(usize, i64)> = (m..=n).map(|i| (i, 1)).collect();
    LocalVector::from_terms(d, &terms)
}

fn pair(label: String, a: LocalVector, b: LocalVector) -> ProductState {
    ProductState::new(label, vec![a, b])
}

/// The `2d − 1` states `|n⟩|0−n⟩`, `|0−n⟩|n₊⟩`, `|+⟩|+⟩` on `ℂ^d ⊗ ℂ^d`.
/// Labels: `h{n}`, `v{n₊}`, `S`.
pub fn yu_set(d: usize) -> Result<StateSet> {
    if d < 3 {
        return Err(Error::FamilyParams(format!("yu set needs d ≥ 3, got {d}")));
    }
    let mut states = Vec::with_capacity(2 * d - 1);
    for n in 1..d {
        states.push(pair(format!("h{n}"), basis(d, n), diff(d, 0, n)));
    }
    for n in 1..d {
        let np = if n == d - 1 { 1 } else { n + 1 };
        states.push(pair(format!("v{np}"), diff(d, 0, n), basis(d, np)));
    }
    states.push(pair("S".into(), range_sum(d, 0, d - 1), range_sum(d, 0, d - 1)));
    StateSet::new(SpaceSpec::bipartite(d, d)?, states)
}

fn check_type1_dim(d: usize) -> Result<usize> {
    if d < 11 || d.is_multiple_of(2) {
        return Err(Error::FamilyParams(format!("type-I family needs odd d ≥ 11, got {d}")));
    }
    Ok((d - 1) / 2)
}

/// The `2d − 2` states of the cardinality-preserving family on `ℂ^d ⊗ ℂ^d`,
/// `d = 2k + 1 ≥ 11` odd. Labels `psi1..psi{2k−1}`, `phi1..phi{2k+1}`.
pub fn type1_set(d: usize) -> Result<StateSet> {
    let k = check_type1_dim(d)?;
    let mut states = Vec::with_capacity(2 * d - 2);
    // rows 1..k−1: |n⟩(|0⟩ − |n⟩ + |d−1−n⟩ − |d−1⟩)
    for n in 1..k {
        let b = LocalVector::from_terms(d, &[(0, 1), (n, -1), (d - 1 - n, 1), (d - 1, -1)]);
        states.push(pair(format!("psi{n}"), basis(d, n), b));
    }
    // rectangles (|0⟩ − |σ(n)⟩)(|n⟩ − |d−1−n⟩)
    for n in 1..k {
        let sigma = if n == 1 { k - 1 } else { n - 1 };
        states.push(pair(format!("psi{}", k - 1 + n), diff(d, 0, sigma), diff(d, n, d - 1 - n)));
    }
    states.push(pair(format!("psi{}", 2 * k - 1), range_sum(d, 0, k - 1), range_sum(d, 0, d - 1)));
    // rows k+1..d−1: |k+n⟩(|k⟩ − |k+n⟩ + |L⁰⟩ − |L¹⟩)
    for n in 1..=k {
        let (l0, l1) = match n {
            1 => (k - 3, k - 2),
            2 => (k - 2, k - 1),
            _ => (k - n, k - 1),
        };
        let b = LocalVector::from_terms(d, &[(k, 1), (k + n, -1), (l0, 1), (l1, -1)]);
        states.push(pair(format!("phi{n}"), basis(d, k + n), b));
    }
    // rectangles (|k⟩ − |k+τ(n)⟩)(|k+n⟩ − |R_n⟩)
    for n in 1..=k {
        let tau = if n == 1 { k } else { n - 1 };
        let r = match n {
            1 => k - 2,
            2 => k - 1,
            _ => k - n,
        };
        states.push(pair(format!("phi{}", k + n), diff(d, k, k + tau), diff(d, k + n, r)));
    }
    states.push(pair(format!("phi{}", 2 * k + 1), range_sum(d, k, d - 1), range_sum(d, 0, d - 1)));
    StateSet::new(SpaceSpec::bipartite(d, d)?, states)
}

/// The 20-state family on `ℂ¹¹ ⊗ ℂ¹¹` whose outcome sets are locally irreducible.
pub fn strong_type1_set() -> Result<StateSet> {
    let space = SpaceSpec::bipartite(11, 11)?;
    let rows: &[(&str, &[&str])] = &[
        ("psi1", &["|1>", "|3>-|4>+|5>-|6>"]),
        ("psi2", &["|2>", "|2>-|4>+|5>-|7>"]),
        ("psi3", &["|3>", "|1>-|4>+|5>-|8>"]),
        ("psi4", &["|4>", "|0>-|4>+|5>-|9>"]),
        ("psi5", &["|0>-|4>", "|3>-|6>"]),
        ("psi6", &["|0>-|1>", "|2>-|7>"]),
        ("psi7", &["|0>-|2>", "|1>-|8>"]),
        ("psi8", &["|0>-|3>", "|0>-|9>"]),
    ];
    let mut set = StateSet::parse(space, rows)?;
    let phis = type1_set(11)?;
    for s in phis.states().iter().filter(|s| s.label.starts_with("phi") && s.label != "phi11") {
        set.push(s.clone())?;
    }
    set.push(pair("S".into(), range_sum(11, 0, 10), range_sum(11, 0, 10)))?;
    set.push(pair("M".into(), diff(11, 1, 6), diff(11, 0, 9)))?;
    Ok(set)
}

/// The 22-state cardinality-decreasing family on `ℂ⁷ ⊗ ℂ⁸`.
pub fn type2_set_78() -> Result<StateSet> {
    let space = SpaceSpec::bipartite(7, 8)?;
    let rows: &[(&str, &[&str])] = &[
        ("psi1", &["|0>", "|0>+|1>"]),
        ("psi2", &["|0>", "|0>-|1>"]),
        ("psi3", &["|0>", "|2>+|3>"]),
        ("psi4", &["|0>", "|2>-|3>"]),
        ("psi5", &["|0>+|1>+|2>", "|4>"]),
        ("psi6", &["|0>+w|1>+w^2|2>", "|4>"]),
        ("psi7", &["|0>+w^2|1>+w|2>", "|4>"]),
        ("psi8", &["|3>", "|3>+|4>+|5>+|6>"]),
        ("psi9", &["|3>", "|3>-|4>+|5>-|6>"]),
        ("psi10", &["|3>", "|1>+|2>"]),
        ("psi11", &["|3>", "|1>-|2>"]),
        ("psi12", &["|1>+|2>+|3>", "|0>"]),
        ("psi13", &["|1>+w|2>+w^2|3>", "|0>"]),
        ("psi14", &["|1>+w^2|2>+w|3>", "|0>"]),
        ("phi1", &["|4>", "|5>+|6>+|3>+|4>"]),
        ("phi2", &["|4>", "|5>-|6>+|3>-|4>"]),
        ("phi3", &["|4>+|5>", "|7>"]),
        ("phi4", &["|4>-|5>", "|7>"]),
        ("phi5", &["|6>", "|6>+|7>"]),
        ("phi6", &["|6>", "|6>-|7>"]),
        ("phi7", &["|5>+|6>", "|5>"]),
        ("phi8", &["|5>-|6>", "|5>"]),
    ];
    StateSet::parse(space, rows)
}

/// Outcome of the three filler-state checks for one candidate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct FillerChecks {
    /// Orthogonal to the family and the union is locally distinguishable.
    pub orthogonal_and_distinguishable: bool,
    /// Both halves of the B split leave the candidate nonzero.
    pub survives_split: bool,
    /// Each measured piece is orthogonal to the measured family.
    pub split_orthogonal: bool,
}

impl FillerChecks {
    pub fn all(&self) -> bool {
        self.orthogonal_and_distinguishable && self.survives_split && self.split_orthogonal
    }
}

/// The rectangle states printed alongside the multiparty composition
/// (`d = 11, 13`); see [`filler_checks`] for why [`filler_state`] does not
/// return them.
pub fn printed_filler(d: usize) -> Option<ProductState> {
    match d {
        11 => Some(pair("Phi".into(), diff(11, 3, 9), diff(11, 2, 8))),
        13 => Some(pair("Psi".into(), diff(13, 4, 10), diff(13, 3, 9))),
        _ => None,
    }
}

/// Evaluate the filler properties of `candidate` against `type1_set(d)`.
pub fn filler_checks(d: usize, candidate: &ProductState) -> Result<FillerChecks> {
    let k = check_type1_dim(d)?;
    let family = type1_set(d)?;
    let orth = family.states().iter().all(|s| s.inner(candidate).is_zero());
    let distinguishable = orth && {
        let mut union = family.clone();
        let mut c = candidate.clone();
        c.label = "__filler".into();
        union.push(c)?;
        protocols::verify_protocol(&union, &Family::TypeI(d).builtin_protocol()?)?.accepted
    };
    let halves: [BTreeSet<usize>; 2] = [(0..k).collect(), (k..d).collect()];
    let mut survives = true;
    let mut split_orth = true;
    for h in &halves {
        let piece = candidate.factors[1].project(h);
        if piece.is_zero() {
            survives = false;
            continue;
        }
        let cand = ProductState::new("", vec![candidate.factors[0].clone(), piece]);
        for s in family.states() {
            let sb = s.factors[1].project(h);
            if sb.is_zero() {
                continue;
            }
            let sp = ProductState::new("", vec![s.factors[0].clone(), sb]);
            if !sp.inner(&cand).is_zero() {
                split_orth = false;
            }
        }
    }
    Ok(FillerChecks { orthogonal_and_distinguishable: distinguishable, survives_split: survives, split_orthogonal: split_orth })
}

/// First rectangle `(|r₁⟩−|r₂⟩)(|c₁⟩−|c₂⟩)`, `r₁ < r₂`, `c₁ < k ≤ c₂`, in
/// lexicographic `(r₁, r₂, c₁, c₂)` order that passes all [`filler_checks`].
pub fn filler_state(d: usize) -> Result<ProductState> {
    let k = check_type1_dim(d)?;
    for r1 in 0..d {
        for r2 in (r1 + 1)..d {
            for c1 in 0..k {
                for c2 in k..d {
                    let cand = pair("Phi".into(), diff(d, r1, r2), diff(d, c1, c2));
                    if filler_checks(d, &cand)?.all() {
                        return Ok(cand);
                    }
                }
            }
        }
    }
    Err(Error::NoFiller(d))
}

/// Party labels `A, B, C, …` for `n_blocks` two-party blocks.
pub fn multiparty_labels(n_blocks: usize) -> Vec<String> {
    let n = 2 * n_blocks;
    if n <= 26 {
        (0..n).map(|i| ((b'A' + i as u8) as char).to_string()).collect()
    } else {
        (0..n).map(|i| format!("{}{}", if i % 2 == 0 { "A" } else { "B" }, i / 2 + 1)).collect()
    }
}

/// Union over blocks `i` of `fill₁ ⊗ … ⊗ s ⊗ … ⊗ fill_N`, `s ∈ type1_set(dᵢ)`,
/// on `⊗ᵢ (ℂ^{dᵢ} ⊗ ℂ^{dᵢ})`. A single block returns `type1_set(d₁)` unchanged.
pub fn multiparty_type1(dims: &[usize]) -> Result<StateSet> {
    if dims.is_empty() {
        return Err(Error::FamilyParams("multiparty family needs at least one block".into()));
    }
    for &d in dims {
        check_type1_dim(d)?;
    }
    if dims.len() == 1 {
        return type1_set(dims[0]);
    }
    let labels = multiparty_labels(dims.len());
    let space = SpaceSpec::new(
        labels.iter().enumerate().map(|(i, l)| (l.clone(), dims[i / 2])).collect::<Vec<_>>(),
    )?;
    let fillers = dims.iter().map(|&d| filler_state(d)).collect::<Result<Vec<_>>>()?;
    let blocks = dims.iter().map(|&d| type1_set(d)).collect::<Result<Vec<_>>>()?;
    let mut states = Vec::new();
    for (i, block) in blocks.iter().enumerate() {
        let prefix = format!("{}{}", labels[2 * i], labels[2 * i + 1]);
        for s in block.states() {
            let mut factors = Vec::with_capacity(2 * dims.len());
            for (j, f) in fillers.iter().enumerate() {
                let src = if j == i { &s.factors } else { &f.factors };
                factors.extend(src.iter().cloned());
            }
            states.push(ProductState::new(format!("{prefix}.{}", s.label), factors));
        }
    }
    StateSet::new(space, states)
}

/// ω-power helper for callers building custom sets.
pub fn omega_power(k: usize) -> CycloRational {
    match k % 3 {
        0 => CycloRational::one(),
        1 => CycloRational::omega(),
        _ => CycloRational::omega_sq(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certify::check_orthogonality;

    #[test]
    fn yu_cardinality_and_errors() {
        assert_eq!(yu_set(3).unwrap().len(), 5);
        assert!(yu_set(2).is_err());
        let y5 = yu_set(5).unwrap();
        assert_eq!(y5.len(), 9);
        let h2: BTreeSet<Vec<usize>> = [vec![2, 0], vec![2, 2]].into_iter().collect();
        assert_eq!(y5.get("h2").unwrap().coordinates(), h2);
        // |0−4⟩|5⟩ in d = 6 carries the v5 label
        let y6 = yu_set(6).unwrap();
        let v5: BTreeSet<Vec<usize>> = [vec![0, 5], vec![4, 5]].into_iter().collect();
        assert_eq!(y6.get("v5").unwrap().coordinates(), v5);
    }

    #[test]
    fn type1_cardinalities_and_errors() {
        assert_eq!(type1_set(11).unwrap().len(), 20);
        assert_eq!(type1_set(13).unwrap().len(), 24);
        assert_eq!(type1_set(15).unwrap().len(), 28);
        assert!(type1_set(9).is_err());
        assert!(type1_set(12).is_err());
    }

    #[test]
    fn type1_coordinate_structure() {
        for d in [11, 13, 15, 17] {
            let s = type1_set(d).unwrap();
            let k = (d - 1) / 2;
            let full = [format!("psi{}", 2 * k - 1), format!("phi{}", 2 * k + 1)];
            let mut seen = BTreeSet::new();
            for st in s.states() {
                if full.contains(&st.label) {
                    continue;
                }
                let c = st.coordinates();
                assert_eq!(c.len(), 4, "{}", st.label);
                for x in c {
                    assert!(seen.insert(x), "overlapping coordinates at d={d}");
                }
            }
        }
    }

    #[test]
    fn strong_set_shape() {
        let s = strong_type1_set().unwrap();
        assert_eq!(s.len(), 20);
        let m: BTreeSet<Vec<usize>> = [vec![1, 0], vec![1, 9], vec![6, 0], vec![6, 9]].into_iter().collect();
        assert_eq!(s.get("M").unwrap().coordinates(), m);
        let t = type1_set(11).unwrap();
        for i in 1..=10 {
            let l = format!("phi{i}");
            assert_eq!(s.get(&l), t.get(&l));
        }
    }

    #[test]
    fn type2_shape() {
        let s = type2_set_78().unwrap();
        assert_eq!(s.len(), 22);
        let (i5, i6) = (s.position("psi5").unwrap(), s.position("psi6").unwrap());
        assert!(s.inner_product(i5, i6).is_zero());
        assert!(s.local_inner(i5, i6, "A").unwrap().is_zero());
    }

    #[test]
    fn every_constructor_is_orthogonal() {
        let sets = [
            yu_set(4).unwrap(),
            type1_set(11).unwrap(),
            type1_set(17).unwrap(),
            strong_type1_set().unwrap(),
            type2_set_78().unwrap(),
        ];
        for s in &sets {
            assert!(check_orthogonality(s).orthogonal);
        }
    }

    #[test]
    fn constructors_are_deterministic() {
        assert_eq!(type1_set(13).unwrap(), type1_set(13).unwrap());
        assert_eq!(multiparty_type1(&[11, 13]).unwrap(), multiparty_type1(&[11, 13]).unwrap());
    }

    #[test]
    fn printed_fillers_fail_split_orthogonality() {
        // π₁ of |3−9⟩|2−8⟩ is |3−9⟩|2⟩, which overlaps the measured full-sum
        // state |+₄⟩|+₄⟩; the same happens at d = 13.
        for d in [11, 13] {
            let c = filler_checks(d, &printed_filler(d).unwrap()).unwrap();
            assert!(c.orthogonal_and_distinguishable);
            assert!(c.survives_split);
            assert!(!c.split_orthogonal);
        }
    }

    #[test]
    fn searched_fillers_pass_all_checks() {
        for d in [11, 13, 15] {
            let f = filler_state(d).unwrap();
            assert!(filler_checks(d, &f).unwrap().all());
        }
    }

    #[test]
    fn multiparty_cardinalities() {
        assert_eq!(multiparty_type1(&[11]).unwrap(), type1_set(11).unwrap());
        assert_eq!(multiparty_type1(&[11, 13]).unwrap().len(), 44);
        let m = multiparty_type1(&[11, 11, 13]).unwrap();
        assert_eq!(m.len(), 64);
        assert_eq!(m.space().dims(), vec![11, 11, 11, 11, 13, 13]);
        assert!(multiparty_type1(&[11, 10]).is_err());
        assert!(multiparty_type1(&[]).is_err());
    }

    #[test]
    fn family_ids_round_trip() {
        for s in ["yu:5", "type1:11", "strong11", "type2-78", "multi:11,11,13"] {
            let f: Family = s.parse().unwrap();
            assert_eq!(f.to_string(), s);
        }
        assert!("type1".parse::<Family>().is_err());
        assert!("nope:3".parse::<Family>().is_err());
        assert!(Family::TypeI(10).construct().is_err());
    }
}
