//! Solution spaces of orthogonality-preserving measurement elements.
//!
//! A first-round measurement element `E` on party `X` keeps the set orthogonal
//! iff `⟨a_i|E|a_j⟩ = 0` for every pair whose overlap on the other parties is
//! nonzero. Hermitian `E` is parametrized isometrically (trace form ↦ ℝ^{d²}):
//! `d` diagonal reals and, for `p < q`, `E_pq = (x + iy)/√2`. The real and
//! imaginary parts of each constraint give two real rows; the solution space is
//! the numerical nullspace of the stacked system.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::density::CMatrix;
use crate::error::{Error, Result};
use crate::par;
use crate::state::StateSet;

/// Singular values below this fraction of the largest count as zero.
pub const REL_THRESHOLD: f64 = 1e-9;
const IDENTITY_TOL: f64 = 1e-8;

/// Singular-value spread around the rank cut, relative to the largest value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RankGap {
    pub smallest_retained: Option<f64>,
    pub largest_discarded: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct HermitianBasis {
    pub party: String,
    pub ambient_dim: usize,
    pub restricted_to_support: bool,
    /// Indices of the ambient basis the solution lives on.
    pub support: Vec<usize>,
    pub dimension: usize,
    pub n_constraints: usize,
    pub gap: RankGap,
    #[serde(skip)]
    pub basis: Vec<CMatrix>,
}

impl HermitianBasis {
    pub fn is_trivial(&self) -> bool {
        self.dimension == 1
    }
}

fn off_index(d: usize, p: usize, q: usize) -> usize {
    // position of (p, q), p < q, in row-major upper-triangle order
    p * (2 * d - p - 1) / 2 + (q - p - 1)
}

fn params_to_matrix(d: usize, x: &[f64]) -> CMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut m = CMatrix::zeros(d, d);
    for p in 0..d {
        m[(p, p)] = Complex64::new(x[p], 0.0);
        for q in p + 1..d {
            let k = d + 2 * off_index(d, p, q);
            let z = Complex64::new(x[k] * s, x[k + 1] * s);
            m[(p, q)] = z;
            m[(q, p)] = z.conj();
        }
    }
    m
}

/// Real coefficient rows of `⟨a|E|b⟩` (real part, imaginary part).
fn constraint_rows(a: &[Complex64], b: &[Complex64]) -> (Vec<f64>, Vec<f64>) {
    let d = a.len();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut re = vec![0.0; d * d];
    let mut im = vec![0.0; d * d];
    for p in 0..d {
        let c = a[p].conj() * b[p];
        re[p] = c.re;
        im[p] = c.im;
        for q in p + 1..d {
            let k = d + 2 * off_index(d, p, q);
            let u = a[p].conj() * b[q];
            let v = a[q].conj() * b[p];
            let cx = (u + v) * s;
            let cy = Complex64::i() * (u - v) * s;
            re[k] = cx.re;
            im[k] = cx.im;
            re[k + 1] = cy.re;
            im[k + 1] = cy.im;
        }
    }
    (re, im)
}

/// Orthonormal basis of Hermitian `E` with `⟨v_i|E|v_j⟩ = 0` for the listed pairs.
pub fn hermitian_nullspace(vectors: &[Vec<Complex64>], pairs: &[(usize, usize)], dim: usize) -> (Vec<CMatrix>, RankGap) {
    let n = dim * dim;
    let rows = par::map_slice(pairs, |&(i, j)| constraint_rows(&vectors[i], &vectors[j]));
    let m = (2 * rows.len()).max(n);
    let mut a = DMatrix::<f64>::zeros(m, n);
    for (r, (re, im)) in rows.iter().enumerate() {
        for c in 0..n {
            a[(2 * r, c)] = re[c];
            a[(2 * r + 1, c)] = im[c];
        }
    }
    let svd = a.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let sigma = &svd.singular_values;
    let smax = sigma.iter().cloned().fold(0.0, f64::max);
    let cut = REL_THRESHOLD * smax;
    let mut basis = Vec::new();
    let mut gap = RankGap { smallest_retained: None, largest_discarded: None };
    for k in 0..sigma.len() {
        let rel = if smax > 0.0 { sigma[k] / smax } else { 0.0 };
        if smax == 0.0 || sigma[k] <= cut {
            gap.largest_discarded = Some(gap.largest_discarded.map_or(rel, |g: f64| g.max(rel)));
            let x: Vec<f64> = v_t.row(k).iter().copied().collect();
            basis.push(params_to_matrix(dim, &x));
        } else {
            gap.smallest_retained = Some(gap.smallest_retained.map_or(rel, |g: f64| g.min(rel)));
        }
    }
    (basis, gap)
}

/// Distance of `𝕀/√d` from the span of an orthonormal Hermitian basis.
pub fn identity_residual(basis: &[CMatrix], dim: usize) -> f64 {
    let id = CMatrix::identity(dim, dim).map(|z| z / (dim as f64).sqrt());
    let mut r = id.clone();
    for b in basis {
        let c = b.iter().zip(id.iter()).map(|(x, y)| x.conj() * y).sum::<Complex64>();
        r -= b.map(|z| z * c);
    }
    r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Pairs whose overlap on every party except `party` is nonzero (exact).
pub fn constrained_pairs(set: &StateSet, party: usize) -> Vec<(usize, usize)> {
    let st = set.states();
    par::filter_pairs(st.len(), |i, j| (!st[i].inner_excluding(&st[j], party).is_zero()).then_some((i, j)))
}

/// Solve the OPLM system from float vectors and a pair list; asserts the identity is in the span.
pub fn solve_from_vectors(
    party: &str,
    vectors: &[Vec<Complex64>],
    pairs: &[(usize, usize)],
    dim: usize,
) -> Result<(Vec<CMatrix>, RankGap)> {
    let (basis, gap) = hermitian_nullspace(vectors, pairs, dim);
    let res = identity_residual(&basis, dim);
    if basis.is_empty() || res > IDENTITY_TOL {
        return Err(Error::SolverInvariant(format!(
            "identity not in the OPLM span on party `{party}` (residual {res:.2e})"
        )));
    }
    Ok((basis, gap))
}

/// OPLM solution space on `party`. Requires a pairwise-orthogonal set.
pub fn oplm_space(set: &StateSet, party: &str, restrict_to_support: bool) -> Result<HermitianBasis> {
    let p = set.space().party_index(party)?;
    let st = set.states();
    if let Some((i, j)) = par::filter_pairs(st.len(), |i, j| (!st[i].inner(&st[j]).is_zero()).then_some((i, j))).first() {
        return Err(Error::NonOrthogonal(st[*i].label.clone(), st[*j].label.clone()));
    }
    let ambient = set.space().dim(p);
    let support: Vec<usize> =
        if restrict_to_support { set.support(p).into_iter().collect() } else { (0..ambient).collect() };
    let vectors: Vec<Vec<Complex64>> = st
        .iter()
        .map(|s| {
            let full = s.factors[p].to_complex();
            support.iter().map(|&k| full[k]).collect()
        })
        .collect();
    let pairs = constrained_pairs(set, p);
    let dim = support.len();
    let (basis, gap) = solve_from_vectors(party, &vectors, &pairs, dim)?;
    Ok(HermitianBasis {
        party: party.to_string(),
        ambient_dim: ambient,
        restricted_to_support: restrict_to_support,
        support,
        dimension: basis.len(),
        n_constraints: pairs.len(),
        gap,
        basis,
    })
}

/// Every orthogonality-preserving element on `party` is ∝ 𝕀 (on the support).
pub fn is_trivial_oplm(set: &StateSet, party: &str) -> Result<bool> {
    Ok(oplm_space(set, party, true)?.is_trivial())
}

/// Apply `u` to every state's factor on `party` (float path).
pub fn rotate_vectors(vectors: &[Vec<Complex64>], u: &CMatrix) -> Vec<Vec<Complex64>> {
    vectors
        .iter()
        .map(|v| (u * DVector::from_column_slice(v)).iter().copied().collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{strong_type1_set, yu_set};
    use crate::measurement::apply_projector;
    use crate::state::{SpaceSpec, StateSet};

    fn product_basis() -> StateSet {
        StateSet::parse(
            SpaceSpec::bipartite(2, 2).unwrap(),
            &[("00", &["|0>", "|0>"]), ("01", &["|0>", "|1>"]), ("10", &["|1>", "|0>"]), ("11", &["|1>", "|1>"])],
        )
        .unwrap()
    }

    #[test]
    fn product_basis_dimension_two() {
        let b = oplm_space(&product_basis(), "A", true).unwrap();
        assert_eq!(b.dimension, 2);
        assert!(!is_trivial_oplm(&product_basis(), "A").unwrap());
    }

    #[test]
    fn single_state_unconstrained() {
        let s = StateSet::parse(SpaceSpec::bipartite(3, 2).unwrap(), &[("x", &["|0>+|1>", "|0>"])]).unwrap();
        assert_eq!(oplm_space(&s, "A", false).unwrap().dimension, 9);
    }

    #[test]
    fn basis_is_orthonormal_hermitian() {
        let b = oplm_space(&product_basis(), "A", false).unwrap();
        for (i, x) in b.basis.iter().enumerate() {
            assert!((x - x.adjoint()).norm() < 1e-12);
            for (j, y) in b.basis.iter().enumerate() {
                let ip: Complex64 = x.iter().zip(y.iter()).map(|(a, c)| a.conj() * c).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((ip.re - want).abs() < 1e-10 && ip.im.abs() < 1e-10);
            }
        }
    }

    #[test]
    fn non_orthogonal_input_rejected() {
        let s = StateSet::parse(SpaceSpec::bipartite(2, 2).unwrap(), &[("a", &["|0>", "|0>"]), ("b", &["|0>", "|0>+|1>"])])
            .unwrap();
        assert!(matches!(oplm_space(&s, "A", true), Err(Error::NonOrthogonal(..))));
    }

    #[test]
    fn example3_outcomes_trivial() {
        let set = strong_type1_set().unwrap();
        let o2 = apply_projector(&set, "B", &(5..11).collect()).unwrap();
        let sup = o2.support(1);
        let o2 = o2.restrict(1, &sup).unwrap();
        assert_eq!(o2.space().dims(), vec![11, 6]);
        let a = oplm_space(&o2, "A", true).unwrap();
        assert_eq!(a.dimension, 1);
        let e = &a.basis[0];
        let scale = e[(0, 0)];
        assert!((e - CMatrix::identity(11, 11).map(|z| z * scale)).norm() < 1e-8);
        let o1 = apply_projector(&set, "B", &(0..5).collect()).unwrap();
        assert!(is_trivial_oplm(&o1, "A").unwrap());
        assert!(is_trivial_oplm(&o1, "B").unwrap());
    }

    #[test]
    fn yu_trivial_both_parties() {
        let y = yu_set(5).unwrap();
        assert!(is_trivial_oplm(&y, "A").unwrap());
        assert!(is_trivial_oplm(&y, "B").unwrap());
    }

    #[test]
    fn monotone_under_adding_states() {
        let y = yu_set(4).unwrap();
        let mut prev = usize::MAX;
        for n in 1..=y.len() {
            let labels: Vec<String> = y.labels()[..n].iter().map(|s| s.to_string()).collect();
            let dim = oplm_space(&y.subset(&labels).unwrap(), "A", false).unwrap().dimension;
            assert!(dim <= prev);
            prev = dim;
        }
    }
}
