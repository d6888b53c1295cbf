//! Non-orthogonality under channels, checked on float instances.

use crate::density::{apply_kraus_channel, hs_inner, CMatrix, DensityOperator};
use crate::error::{Error, Result};

/// Overlaps below this magnitude count as orthogonal.
pub const OVERLAP_TOL: f64 = 1e-12;

/// True iff `N(ρ)` and `N(σ)` stay non-orthogonal; requires `Tr[ρ†σ] ≠ 0`.
pub fn check_lemma1_instance(
    rho: &DensityOperator,
    sigma: &DensityOperator,
    kraus: &[CMatrix],
    out_dims: Vec<usize>,
) -> Result<bool> {
    let before = hs_inner(rho, sigma)?;
    if before.norm() <= OVERLAP_TOL {
        return Err(Error::Precondition(format!("inputs are orthogonal (|Tr ρσ| = {:.2e})", before.norm())));
    }
    let a = apply_kraus_channel(rho, kraus, out_dims.clone())?;
    let b = apply_kraus_channel(sigma, kraus, out_dims)?;
    Ok(hs_inner(&a, &b)?.norm() > OVERLAP_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::{partial_trace_kraus, random_density, random_kraus};
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn identity_channel() {
        let rho = DensityOperator::pure(vec![2], &[c(1.0), c(0.0)]).unwrap();
        assert!(check_lemma1_instance(&rho, &rho, &[CMatrix::identity(2, 2)], vec![2]).unwrap());
    }

    #[test]
    fn orthogonal_inputs_rejected() {
        let a = DensityOperator::pure(vec![2], &[c(1.0), c(0.0)]).unwrap();
        let b = DensityOperator::pure(vec![2], &[c(0.0), c(1.0)]).unwrap();
        assert!(matches!(check_lemma1_instance(&a, &b, &[CMatrix::identity(2, 2)], vec![2]), Err(Error::Precondition(_))));
    }

    #[test]
    fn partial_trace_keeps_product_overlap() {
        // |0⟩|0+1⟩ and |0+1⟩|0⟩ on ℂ²⊗ℂ²
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let p = DensityOperator::pure(vec![2, 2], &[c(s), c(s), c(0.0), c(0.0)]).unwrap();
        let q = DensityOperator::pure(vec![2, 2], &[c(s), c(0.0), c(s), c(0.0)]).unwrap();
        assert!(check_lemma1_instance(&p, &q, &partial_trace_kraus(2, 2), vec![2]).unwrap());
    }

    #[test]
    fn random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut checked = 0;
        while checked < 200 {
            let d = rng.random_range(2..=6);
            let (r1, r2) = (rng.random_range(1..=d), rng.random_range(1..=d));
            let rho = random_density(&mut rng, d, r1);
            let sigma = random_density(&mut rng, d, r2);
            if hs_inner(&rho, &sigma).unwrap().norm() < 0.1 {
                continue;
            }
            let d_out = rng.random_range(1..=6);
            let count = d.div_ceil(d_out) + rng.random_range(0..3);
            let k = random_kraus(&mut rng, d, d_out, count);
            assert!(check_lemma1_instance(&rho, &sigma, &k, vec![d_out]).unwrap());
            checked += 1;
        }
    }
}
