//! Product states, state sets and the exact local/global inner products.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cyclo::CycloRational;
use crate::error::{Error, Result};
use crate::ket;

/// Smallest-first prime factorization of `n` (`n ≥ 2`).
pub fn prime_factors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        while n.is_multiple_of(p) {
            out.push(p);
            n /= p;
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Party {
    pub label: String,
    pub dim: usize,
    pub prime_factors: Vec<usize>,
}

impl Party {
    pub fn new(label: impl Into<String>, dim: usize) -> Result<Self> {
        let label = label.into();
        if dim < 2 {
            return Err(Error::InvalidSpace(format!("party `{label}` has dimension {dim} < 2")));
        }
        Ok(Self { label, dim, prime_factors: prime_factors(dim) })
    }

    /// Smallest prime factor; 1 for a one-dimensional (restricted) party.
    pub fn smallest_prime(&self) -> usize {
        self.prime_factors.first().copied().unwrap_or(1)
    }
}

/// Ordered list of parties with their local dimensions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceSpec {
    parties: Vec<Party>,
}

impl SpaceSpec {
    pub fn new<S: Into<String>>(parties: impl IntoIterator<Item = (S, usize)>) -> Result<Self> {
        let parties = parties
            .into_iter()
            .map(|(l, d)| Party::new(l, d))
            .collect::<Result<Vec<_>>>()?;
        Self::from_parties(parties)
    }

    /// Validates labels and factorizations of externally supplied parties.
    pub fn from_parties(parties: Vec<Party>) -> Result<Self> {
        if parties.is_empty() {
            return Err(Error::InvalidSpace("no parties".into()));
        }
        let mut seen = HashSet::new();
        for p in &parties {
            if !seen.insert(p.label.as_str()) {
                return Err(Error::InvalidSpace(format!("duplicate party label `{}`", p.label)));
            }
            if p.dim < 2 {
                return Err(Error::InvalidSpace(format!("party `{}` has dimension < 2", p.label)));
            }
            if p.prime_factors != prime_factors(p.dim) {
                return Err(Error::InvalidSpace(format!(
                    "prime factors {:?} do not factor {}",
                    p.prime_factors, p.dim
                )));
            }
        }
        Ok(Self { parties })
    }

    /// Two parties `A`, `B`.
    pub fn bipartite(da: usize, db: usize) -> Result<Self> {
        Self::new([("A", da), ("B", db)])
    }

    pub fn parties(&self) -> &[Party] {
        &self.parties
    }

    pub fn n_parties(&self) -> usize {
        self.parties.len()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.parties.iter().map(|p| p.dim).collect()
    }

    pub fn dim(&self, party: usize) -> usize {
        self.parties[party].dim
    }

    pub fn party_index(&self, label: &str) -> Result<usize> {
        self.parties
            .iter()
            .position(|p| p.label == label)
            .ok_or_else(|| Error::UnknownParty(label.to_string()))
    }

    pub fn label(&self, party: usize) -> &str {
        &self.parties[party].label
    }

    pub fn total_dim(&self) -> usize {
        self.parties.iter().map(|p| p.dim).product()
    }

    pub(crate) fn with_dim(&self, party: usize, dim: usize) -> Result<Self> {
        let mut parties = self.parties.clone();
        parties[party] = Party::new(parties[party].label.clone(), dim)?;
        Ok(Self { parties })
    }
}

/// Coefficient vector of one local factor in the computational basis.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LocalVector(Vec<CycloRational>);

impl LocalVector {
    pub fn new(entries: Vec<CycloRational>) -> Self {
        Self(entries)
    }

    pub fn zeros(dim: usize) -> Self {
        Self(vec![CycloRational::zero(); dim])
    }

    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = Self::zeros(dim);
        v.0[i] = CycloRational::one();
        v
    }

    /// `Σ_{i∈indices} coeff_i |i⟩` from `(index, integer coefficient)` pairs.
    pub fn from_terms(dim: usize, terms: &[(usize, i64)]) -> Self {
        let mut v = Self::zeros(dim);
        for &(i, c) in terms {
            v.0[i] += CycloRational::integer(c);
        }
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[CycloRational] {
        &self.0
    }

    pub fn entries_mut(&mut self) -> &mut [CycloRational] {
        &mut self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(CycloRational::is_zero)
    }

    /// `⟨self|other⟩`, conjugate-linear in `self`.
    pub fn inner(&self, other: &Self) -> CycloRational {
        self.0.iter().zip(&other.0).map(|(x, y)| x.conj() * *y).sum()
    }

    pub fn nonzero_indices(&self) -> BTreeSet<usize> {
        self.0.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, _)| i).collect()
    }

    /// Entries outside `keep` set to zero.
    pub fn project(&self, keep: &BTreeSet<usize>) -> Self {
        Self(
            self.0
                .iter()
                .enumerate()
                .map(|(i, c)| if keep.contains(&i) { *c } else { CycloRational::zero() })
                .collect(),
        )
    }

    /// `true` when `other = λ·self` for some nonzero λ (both nonzero).
    pub fn is_parallel(&self, other: &Self) -> bool {
        let Some(pivot) = self.0.iter().position(|c| !c.is_zero()) else {
            return false;
        };
        if other.0[pivot].is_zero() {
            return false;
        }
        let lambda = other.0[pivot] * self.0[pivot].inv().expect("nonzero pivot");
        self.0.iter().zip(&other.0).all(|(x, y)| *x * lambda == *y)
    }

    pub fn to_complex(&self) -> Vec<num_complex::Complex64> {
        self.0.iter().map(CycloRational::to_complex).collect()
    }
}

impl fmt::Debug for LocalVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", ket::print_ket(self))
    }
}

impl fmt::Display for LocalVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", ket::print_ket(self))
    }
}

/// Fully product pure state, one factor per party in space order. Unnormalized.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductState {
    pub label: String,
    pub factors: Vec<LocalVector>,
}

impl ProductState {
    pub fn new(label: impl Into<String>, factors: Vec<LocalVector>) -> Self {
        Self { label: label.into(), factors }
    }

    /// Build from one ket expression per party.
    pub fn parse(label: impl Into<String>, space: &SpaceSpec, kets: &[&str]) -> Result<Self> {
        if kets.len() != space.n_parties() {
            return Err(Error::DimMismatch(format!(
                "{} ket expressions for {} parties",
                kets.len(),
                space.n_parties()
            )));
        }
        let factors = kets
            .iter()
            .enumerate()
            .map(|(p, k)| ket::parse_ket(k, space.dim(p)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(label, factors))
    }

    pub fn factor(&self, party: usize) -> &LocalVector {
        &self.factors[party]
    }

    /// `⟨self|other⟩_party`.
    pub fn local_inner(&self, other: &Self, party: usize) -> CycloRational {
        self.factors[party].inner(&other.factors[party])
    }

    /// Full inner product as the product of the local ones.
    pub fn inner(&self, other: &Self) -> CycloRational {
        let mut acc = CycloRational::one();
        for (a, b) in self.factors.iter().zip(&other.factors) {
            let l = a.inner(b);
            if l.is_zero() {
                return l;
            }
            acc *= l;
        }
        acc
    }

    /// Product of local inner products over every party except `skip`.
    pub fn inner_excluding(&self, other: &Self, skip: usize) -> CycloRational {
        let mut acc = CycloRational::one();
        for (p, (a, b)) in self.factors.iter().zip(&other.factors).enumerate() {
            if p == skip {
                continue;
            }
            let l = a.inner(b);
            if l.is_zero() {
                return l;
            }
            acc *= l;
        }
        acc
    }

    /// Index tuples on which every factor is nonzero.
    pub fn coordinates(&self) -> BTreeSet<Vec<usize>> {
        let supports: Vec<Vec<usize>> =
            self.factors.iter().map(|f| f.nonzero_indices().into_iter().collect()).collect();
        let mut out = BTreeSet::new();
        let mut tuple = Vec::with_capacity(supports.len());
        fn rec(s: &[Vec<usize>], tuple: &mut Vec<usize>, out: &mut BTreeSet<Vec<usize>>) {
            match s.split_first() {
                None => {
                    out.insert(tuple.clone());
                }
                Some((head, rest)) => {
                    for &i in head {
                        tuple.push(i);
                        rec(rest, tuple, out);
                        tuple.pop();
                    }
                }
            }
        }
        rec(&supports, &mut tuple, &mut out);
        out
    }

    /// Number of coordinates without enumerating them.
    pub fn coordinate_count(&self) -> usize {
        self.factors.iter().map(|f| f.nonzero_indices().len()).product()
    }

    /// Dense tensor-product amplitudes (row-major, first party most significant).
    pub fn to_dense(&self) -> Vec<num_complex::Complex64> {
        let mut out = vec![num_complex::Complex64::new(1.0, 0.0)];
        for f in &self.factors {
            let v = f.to_complex();
            out = out.iter().flat_map(|a| v.iter().map(move |b| a * b)).collect();
        }
        out
    }
}

/// A labelled family of product states on a common space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateSet {
    space: SpaceSpec,
    states: Vec<ProductState>,
}

impl StateSet {
    pub fn new(space: SpaceSpec, states: Vec<ProductState>) -> Result<Self> {
        let mut seen = HashSet::new();
        for s in &states {
            if !seen.insert(s.label.as_str()) {
                return Err(Error::DuplicateLabel(s.label.clone()));
            }
            if s.factors.len() != space.n_parties() {
                return Err(Error::SpaceMismatch);
            }
            for (p, f) in s.factors.iter().enumerate() {
                if f.dim() != space.dim(p) {
                    return Err(Error::SpaceMismatch);
                }
                if f.is_zero() {
                    return Err(Error::ZeroFactor(s.label.clone()));
                }
            }
        }
        Ok(Self { space, states })
    }

    /// Build from `(label, [ket per party])` rows.
    pub fn parse(space: SpaceSpec, rows: &[(&str, &[&str])]) -> Result<Self> {
        let states = rows
            .iter()
            .map(|(l, k)| ProductState::parse(*l, &space, k))
            .collect::<Result<Vec<_>>>()?;
        Self::new(space, states)
    }

    pub fn space(&self) -> &SpaceSpec {
        &self.space
    }

    pub fn states(&self) -> &[ProductState] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn get(&self, label: &str) -> Option<&ProductState> {
        self.states.iter().find(|s| s.label == label)
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.states.iter().position(|s| s.label == label)
    }

    pub fn labels(&self) -> Vec<&str> {
        self.states.iter().map(|s| s.label.as_str()).collect()
    }

    /// `⟨s|t⟩_party` for two members, party by label.
    pub fn local_inner(&self, s: usize, t: usize, party: &str) -> Result<CycloRational> {
        let p = self.space.party_index(party)?;
        Ok(self.states[s].local_inner(&self.states[t], p))
    }

    pub fn inner_product(&self, s: usize, t: usize) -> CycloRational {
        self.states[s].inner(&self.states[t])
    }

    /// Union over members of the indices with nonzero weight on `party`.
    pub fn support(&self, party: usize) -> BTreeSet<usize> {
        self.states.iter().flat_map(|s| s.factors[party].nonzero_indices()).collect()
    }

    pub fn support_of(&self, party: &str) -> Result<BTreeSet<usize>> {
        Ok(self.support(self.space.party_index(party)?))
    }

    /// Re-index `party` onto `subset` (increasing order); fails if a member has
    /// weight outside the subset.
    pub fn restrict(&self, party: usize, subset: &BTreeSet<usize>) -> Result<Self> {
        let dim = self.space.dim(party);
        if let Some(&bad) = subset.iter().find(|&&i| i >= dim) {
            return Err(Error::IndexOutOfRange { index: bad, dim });
        }
        let index: Vec<usize> = subset.iter().copied().collect();
        let mut states = Vec::with_capacity(self.states.len());
        for s in &self.states {
            let f = &s.factors[party];
            if f.nonzero_indices().iter().any(|i| !subset.contains(i)) {
                return Err(Error::WeightOutsideSubset {
                    label: s.label.clone(),
                    party: self.space.label(party).to_string(),
                });
            }
            let mut factors = s.factors.clone();
            factors[party] = LocalVector::new(index.iter().map(|&i| f.entries()[i]).collect());
            states.push(ProductState::new(s.label.clone(), factors));
        }
        let space = if subset.len() >= 2 {
            self.space.with_dim(party, subset.len())?
        } else {
            // one-dimensional parties are allowed after restriction
            let mut parties = self.space.parties().to_vec();
            parties[party] = Party {
                label: parties[party].label.clone(),
                dim: subset.len(),
                prime_factors: Vec::new(),
            };
            SpaceSpec { parties }
        };
        Self::new(space, states)
    }

    /// Restrict every party to its own support.
    pub fn restrict_to_supports(&self) -> Result<Self> {
        let mut out = self.clone();
        for p in 0..self.space.n_parties() {
            let sup = out.support(p);
            out = out.restrict(p, &sup)?;
        }
        Ok(out)
    }

    /// Members whose labels are in `labels`, in set order.
    pub fn subset(&self, labels: &[String]) -> Result<Self> {
        for l in labels {
            if self.get(l).is_none() {
                return Err(Error::UnknownLabel(l.clone()));
            }
        }
        let keep: HashSet<&str> = labels.iter().map(String::as_str).collect();
        let states = self.states.iter().filter(|s| keep.contains(s.label.as_str())).cloned().collect();
        Self::new(self.space.clone(), states)
    }

    pub fn with_states(&self, states: Vec<ProductState>) -> Result<Self> {
        Self::new(self.space.clone(), states)
    }

    /// Append a state (label must be fresh).
    pub fn push(&mut self, state: ProductState) -> Result<()> {
        let mut states = std::mem::take(&mut self.states);
        states.push(state);
        *self = Self::new(self.space.clone(), states)?;
        Ok(())
    }
}
