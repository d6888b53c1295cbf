//! Floating-point density operators, partial traces and Kraus channels.
//!
//! Only the channel property checks use this module; the exact state model
//! never goes through floats.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

const HERMITIAN_TOL: f64 = 1e-10;
pub const KRAUS_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct DensityOperator {
    dims: Vec<usize>,
    matrix: CMatrix,
}

impl DensityOperator {
    pub fn new(dims: Vec<usize>, matrix: CMatrix) -> Result<Self> {
        let n: usize = dims.iter().product();
        if dims.is_empty() || matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::DimMismatch(format!(
                "matrix {}x{} for subsystem dims {:?}",
                matrix.nrows(),
                matrix.ncols(),
                dims
            )));
        }
        let herm_err = (&matrix - matrix.adjoint()).norm();
        if herm_err > HERMITIAN_TOL * (1.0 + matrix.norm()) {
            return Err(Error::Precondition(format!("matrix not Hermitian (deviation {herm_err:.3e})")));
        }
        Ok(Self { dims, matrix })
    }

    /// `|ψ⟩⟨ψ|` for a (not necessarily normalized) vector.
    pub fn pure(dims: Vec<usize>, psi: &[Complex64]) -> Result<Self> {
        let v = nalgebra::DVector::from_column_slice(psi);
        Self::new(dims, &v * v.adjoint())
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn total_dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn kron(&self, other: &Self) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self { dims, matrix: self.matrix.kronecker(&other.matrix) }
    }

    /// Smallest eigenvalue of the Hermitian matrix.
    pub fn min_eigenvalue(&self) -> f64 {
        self.matrix
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// Trace out the subsystems listed in `discard`.
    pub fn partial_trace(&self, discard: &[usize]) -> Result<Self> {
        let n = self.dims.len();
        if discard.is_empty() {
            return Err(Error::InvalidSubsystems("nothing to discard".into()));
        }
        let mut drop = vec![false; n];
        for &d in discard {
            if d >= n {
                return Err(Error::InvalidSubsystems(format!("subsystem {d} of {n}")));
            }
            if drop[d] {
                return Err(Error::InvalidSubsystems(format!("subsystem {d} listed twice")));
            }
            drop[d] = true;
        }
        if drop.iter().all(|&d| d) {
            return Err(Error::InvalidSubsystems("cannot discard every subsystem".into()));
        }
        let keep_dims: Vec<usize> = (0..n).filter(|&i| !drop[i]).map(|i| self.dims[i]).collect();
        let drop_dims: Vec<usize> = (0..n).filter(|&i| drop[i]).map(|i| self.dims[i]).collect();
        let dk: usize = keep_dims.iter().product();
        let dd: usize = drop_dims.iter().product();

        // full index from (kept multi-index, dropped multi-index)
        let full_index = |k: usize, t: usize| -> usize {
            let (mut k, mut t) = (k, t);
            let mut digits = vec![0usize; n];
            for i in (0..n).rev() {
                if drop[i] {
                    digits[i] = t % self.dims[i];
                    t /= self.dims[i];
                } else {
                    digits[i] = k % self.dims[i];
                    k /= self.dims[i];
                }
            }
            digits.iter().zip(&self.dims).fold(0, |acc, (d, m)| acc * m + d)
        };
        let mut out = CMatrix::zeros(dk, dk);
        for r in 0..dk {
            for c in 0..dk {
                let mut acc = Complex64::new(0.0, 0.0);
                for t in 0..dd {
                    acc += self.matrix[(full_index(r, t), full_index(c, t))];
                }
                out[(r, c)] = acc;
            }
        }
        Ok(Self { dims: keep_dims, matrix: out })
    }
}

/// Hilbert–Schmidt inner product `Tr[ρ†σ]`.
pub fn hs_inner(rho: &DensityOperator, sigma: &DensityOperator) -> Result<Complex64> {
    if rho.total_dim() != sigma.total_dim() {
        return Err(Error::DimMismatch(format!("{} vs {}", rho.total_dim(), sigma.total_dim())));
    }
    Ok((rho.matrix.adjoint() * &sigma.matrix).trace())
}

/// Deviation `‖Σ A_k†A_k − 𝕀‖_F`.
pub fn kraus_completeness_error(kraus: &[CMatrix]) -> Result<f64> {
    let Some(first) = kraus.first() else {
        return Err(Error::IncompleteKraus(f64::INFINITY));
    };
    let (dout, din) = first.shape();
    if kraus.iter().any(|k| k.shape() != (dout, din)) {
        return Err(Error::DimMismatch("Kraus operators of different shapes".into()));
    }
    let sum = kraus.iter().fold(CMatrix::zeros(din, din), |acc, k| acc + k.adjoint() * k);
    Ok((sum - CMatrix::identity(din, din)).norm())
}

/// `N(ρ) = Σ A_k ρ A_k†`; output subsystem structure is `out_dims`.
pub fn apply_kraus_channel(rho: &DensityOperator, kraus: &[CMatrix], out_dims: Vec<usize>) -> Result<DensityOperator> {
    let err = kraus_completeness_error(kraus)?;
    if err > KRAUS_TOL {
        return Err(Error::IncompleteKraus(err));
    }
    if kraus[0].ncols() != rho.total_dim() {
        return Err(Error::DimMismatch(format!(
            "channel input {} vs state {}",
            kraus[0].ncols(),
            rho.total_dim()
        )));
    }
    let out = kraus.iter().fold(CMatrix::zeros(kraus[0].nrows(), kraus[0].nrows()), |acc, k| {
        acc + k * &rho.matrix * k.adjoint()
    });
    DensityOperator::new(out_dims, out)
}

/// Kraus operators `𝕀_keep ⊗ ⟨i|_dropped` realizing the partial trace over
/// the *last* subsystem of a bipartite `da ⊗ db` system.
pub fn partial_trace_kraus(da: usize, db: usize) -> Vec<CMatrix> {
    (0..db)
        .map(|i| {
            let mut k = CMatrix::zeros(da, da * db);
            for a in 0..da {
                k[(a, a * db + i)] = Complex64::new(1.0, 0.0);
            }
            k
        })
        .collect()
}

fn gaussian_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
    })
}

/// Random density operator of rank `rank` (Ginibre ensemble), unit trace.
pub fn random_density<R: Rng>(rng: &mut R, dim: usize, rank: usize) -> DensityOperator {
    let g = gaussian_matrix(rng, dim, rank.max(1));
    let m = &g * g.adjoint();
    let tr = m.trace();
    DensityOperator { dims: vec![dim], matrix: m / tr }
}

/// Random complete set of `count` Kraus operators `d_in → d_out`
/// (blocks of a random isometry).
pub fn random_kraus<R: Rng>(rng: &mut R, d_in: usize, d_out: usize, count: usize) -> Vec<CMatrix> {
    assert!(count * d_out >= d_in, "isometry needs count·d_out ≥ d_in");
    let g = gaussian_matrix(rng, count * d_out, d_in);
    let q = g.qr().q();
    (0..count).map(|k| q.rows(k * d_out, d_out).into_owned()).collect()
}

/// Haar-ish random unitary via QR of a Ginibre matrix with phase fix.
pub fn random_unitary<R: Rng>(rng: &mut R, dim: usize) -> CMatrix {
    let g = gaussian_matrix(rng, dim, dim);
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    let mut u = q;
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..dim {
            u[(i, j)] *= phase;
        }
    }
    u
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn basis_proj(dim: usize, i: usize) -> DensityOperator {
        let mut v = vec![c(0.0); dim];
        v[i] = c(1.0);
        DensityOperator::pure(vec![dim], &v).unwrap()
    }

    #[test]
    fn product_partial_trace() {
        let rho = basis_proj(2, 0).kron(&basis_proj(2, 1));
        let red = rho.partial_trace(&[1]).unwrap();
        assert!((red.matrix() - basis_proj(2, 0).matrix()).norm() < 1e-12);
    }

    #[test]
    fn maximally_entangled_reduces_to_identity() {
        let s = 0.5f64.sqrt();
        let rho = DensityOperator::pure(vec![2, 2], &[c(s), c(0.0), c(0.0), c(s)]).unwrap();
        let red = rho.partial_trace(&[1]).unwrap();
        assert!((red.matrix() - CMatrix::identity(2, 2) * c(0.5)).norm() < 1e-12);
        let red_a = rho.partial_trace(&[0]).unwrap();
        assert!((red_a.matrix() - CMatrix::identity(2, 2) * c(0.5)).norm() < 1e-12);
    }

    #[test]
    fn factorized_trace_scales() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_density(&mut rng, 3, 2);
        let mut b = random_density(&mut rng, 4, 4);
        b.matrix *= c(2.5);
        let red = a.kron(&b).partial_trace(&[1]).unwrap();
        assert!((red.matrix() - a.matrix() * b.trace()).norm() < 1e-10);
    }

    #[test]
    fn middle_subsystem_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a = random_density(&mut rng, 2, 2);
        let b = random_density(&mut rng, 3, 3);
        let cc = random_density(&mut rng, 2, 1);
        let red = a.kron(&b).kron(&cc).partial_trace(&[1]).unwrap();
        assert!((red.matrix() - a.kron(&cc).matrix()).norm() < 1e-10);
        assert_eq!(red.dims(), &[2, 2]);
    }

    #[test]
    fn partial_trace_errors() {
        let rho = basis_proj(2, 0).kron(&basis_proj(2, 0));
        assert!(rho.partial_trace(&[]).is_err());
        assert!(rho.partial_trace(&[2]).is_err());
        assert!(rho.partial_trace(&[0, 1]).is_err());
        assert!(rho.partial_trace(&[1, 1]).is_err());
    }

    #[test]
    fn hs_examples() {
        assert_eq!(hs_inner(&basis_proj(2, 0), &basis_proj(2, 1)).unwrap(), c(0.0));
        let half = DensityOperator::new(vec![2], CMatrix::identity(2, 2) * c(0.5)).unwrap();
        assert!((hs_inner(&half, &half).unwrap() - c(0.5)).norm() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let r = random_density(&mut rng, 4, 2);
            assert!(hs_inner(&r, &r).unwrap().re > 0.0);
        }
        assert!(hs_inner(&basis_proj(2, 0), &basis_proj(3, 0)).is_err());
    }

    #[test]
    fn identity_and_partial_trace_channels() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let rho = random_density(&mut rng, 6, 3);
        let id = vec![CMatrix::identity(6, 6)];
        let out = apply_kraus_channel(&rho, &id, vec![6]).unwrap();
        assert!((out.matrix() - rho.matrix()).norm() < 1e-12);

        let rho = DensityOperator { dims: vec![2, 3], matrix: rho.matrix().clone() };
        let via_kraus = apply_kraus_channel(&rho, &partial_trace_kraus(2, 3), vec![2]).unwrap();
        let direct = rho.partial_trace(&[1]).unwrap();
        assert!((via_kraus.matrix() - direct.matrix()).norm() < 1e-12);
    }

    #[test]
    fn random_channel_preserves_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let rho = random_density(&mut rng, 4, 2);
            let k = random_kraus(&mut rng, 4, 3, 3);
            assert!(kraus_completeness_error(&k).unwrap() < 1e-10);
            let out = apply_kraus_channel(&rho, &k, vec![3]).unwrap();
            assert!((out.trace() - rho.trace()).norm() < 1e-8);
            assert!(out.min_eigenvalue() > -1e-9);
        }
    }

    #[test]
    fn incomplete_kraus_rejected() {
        let rho = basis_proj(2, 0);
        let half = vec![CMatrix::identity(2, 2) * c(0.5)];
        assert!(matches!(apply_kraus_channel(&rho, &half, vec![2]), Err(Error::IncompleteKraus(_))));
    }

    #[test]
    fn partial_trace_keeps_positivity() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let r = random_density(&mut rng, 12, 3);
            let r = DensityOperator { dims: vec![3, 4], matrix: r.matrix().clone() };
            let red = r.partial_trace(&[0]).unwrap();
            assert!((red.trace() - r.trace()).norm() < 1e-10);
            assert!(red.min_eigenvalue() > -1e-9);
            assert!((red.matrix() - red.matrix().adjoint()).norm() < 1e-10);
        }
    }

    #[test]
    fn unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let u = random_unitary(&mut rng, 5);
        assert!((u.adjoint() * &u - CMatrix::identity(5, 5)).norm() < 1e-12);
    }
}
