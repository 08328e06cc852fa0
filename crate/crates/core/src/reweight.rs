//! Quadratic-cost reweighting: multiplying a Gaussian belief with a
//! reference normal distribution.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::linalg::{jittered_cholesky, symmetrize};
use crate::lodegp::GaussianBelief;

/// Reference distribution of a quadratic cost: the product density is
/// maximal at `z_ref` and the diagonal `s` plays the role of the inverse
/// cost weight (small entries pull hard).
#[derive(Clone, Debug)]
pub struct CostSpec {
    pub z_ref: DVector<f64>,
    pub s_diag: DVector<f64>,
}

impl CostSpec {
    pub fn new(z_ref: DVector<f64>, s_diag: DVector<f64>) -> Result<Self> {
        if z_ref.len() != s_diag.len() {
            return Err(Error::DimensionMismatch(format!(
                "reference length {} vs weight length {}",
                z_ref.len(),
                s_diag.len()
            )));
        }
        if s_diag.iter().any(|&s| !(s > 0.0) || !s.is_finite()) {
            return Err(Error::InvalidProblem(
                "cost weights must be positive and finite".into(),
            ));
        }
        Ok(CostSpec { z_ref, s_diag })
    }

    pub fn dim(&self) -> usize {
        self.z_ref.len()
    }
}

/// Product of the belief `N(μ*, Σ*)` with `N(z_ref, S)`:
/// `Σ_opt = (Σ*⁻¹ + S⁻¹)⁻¹` and `μ_opt = Σ_opt (Σ*⁻¹ μ* + S⁻¹ z_ref)`.
///
/// Computed from a single factorization of `C = Σ* + S` via
/// `Σ_opt = Σ* − Σ* C⁻¹ Σ*` and `μ_opt = S C⁻¹ μ* + Σ* C⁻¹ z_ref`,
/// avoiding the explicit inverses of the formula.
pub fn gaussian_product(belief: &GaussianBelief, cost: &CostSpec) -> Result<GaussianBelief> {
    let n = belief.mean.len();
    if cost.dim() != n {
        return Err(Error::DimensionMismatch(format!(
            "belief dim {n} vs cost dim {}",
            cost.dim()
        )));
    }
    let mut c = belief.cov.clone();
    for i in 0..n {
        c[(i, i)] += cost.s_diag[i];
    }
    let (chol, _) = jittered_cholesky(&c)?;

    let c_inv_mean = chol.solve(&belief.mean);
    let c_inv_ref = chol.solve(&cost.z_ref);
    let mean = DVector::from_fn(n, |i, _| cost.s_diag[i] * c_inv_mean[i])
        + &belief.cov * c_inv_ref;

    let w = chol.solve(&belief.cov);
    let mut cov = &belief.cov - &belief.cov * w;
    symmetrize(&mut cov);

    Ok(GaussianBelief {
        grid: belief.grid.clone(),
        mean,
        cov,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use approx::assert_relative_eq;
    use nalgebra::dvector;
    use rand::Rng;
    use rand::SeedableRng;

    fn belief(mean: DVector<f64>, cov: DMatrix<f64>) -> GaussianBelief {
        GaussianBelief {
            grid: vec![0.0; mean.len()],
            mean,
            cov,
        }
    }

    fn random_spd(n: usize, rng: &mut impl Rng) -> DMatrix<f64> {
        let a = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        &a * a.transpose() + DMatrix::identity(n, n) * 0.5
    }

    #[test]
    fn huge_weight_is_identity() {
        let cov = DMatrix::from_row_slice(2, 2, &[1.0, 0.3, 0.3, 0.8]);
        let b = belief(dvector![0.7, -0.4], cov);
        let cost = CostSpec::new(dvector![5.0, 5.0], DVector::from_element(2, 1e12)).unwrap();
        let out = gaussian_product(&b, &cost).unwrap();
        let scale = b.mean.abs().max();
        assert!((out.mean - &b.mean).abs().max() <= 1e-6 * scale);
        assert_relative_eq!(out.cov, b.cov, max_relative = 1e-5);
    }

    #[test]
    fn symmetric_unit_case() {
        let b = belief(dvector![1.0, -2.0], DMatrix::identity(2, 2));
        let cost = CostSpec::new(dvector![3.0, 0.0], DVector::from_element(2, 1.0)).unwrap();
        let out = gaussian_product(&b, &cost).unwrap();
        assert_relative_eq!(out.mean, dvector![2.0, -1.0], max_relative = 1e-12);
        assert_relative_eq!(
            out.cov,
            DMatrix::identity(2, 2) * 0.5,
            max_relative = 1e-12
        );
    }

    #[test]
    fn matches_literal_formula() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        for _ in 0..20 {
            let n = 4;
            let cov = random_spd(n, &mut rng);
            let mean = DVector::from_fn(n, |_, _| rng.random_range(-2.0..2.0));
            let s = DVector::from_fn(n, |_, _| rng.random_range(0.05..3.0));
            let zr = DVector::from_fn(n, |_, _| rng.random_range(-2.0..2.0));
            let b = belief(mean.clone(), cov.clone());
            let cost = CostSpec::new(zr.clone(), s.clone()).unwrap();
            let out = gaussian_product(&b, &cost).unwrap();

            let cov_inv = cov.try_inverse().unwrap();
            let s_inv = DMatrix::from_diagonal(&s.map(|x| 1.0 / x));
            let cov_opt = (cov_inv.clone() + &s_inv).try_inverse().unwrap();
            let mean_opt = &cov_opt * (cov_inv * mean + s_inv * zr);

            assert_relative_eq!(out.mean, mean_opt, max_relative = 1e-8, epsilon = 1e-10);
            assert_relative_eq!(out.cov, cov_opt, max_relative = 1e-8, epsilon = 1e-10);
        }
    }

    #[test]
    fn log_density_product_identity() {
        // log N(x; μ_opt, Σ_opt) − log N(x; μ*, Σ*) − log N(x; z_ref, S)
        // must be constant in x.
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let n = 4;
        let cov = random_spd(n, &mut rng);
        let mean = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
        let s = DVector::from_fn(n, |_, _| rng.random_range(0.1..2.0));
        let zr = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
        let b = belief(mean.clone(), cov.clone());
        let cost = CostSpec::new(zr.clone(), s.clone()).unwrap();
        let out = gaussian_product(&b, &cost).unwrap();

        let quad = |m: &DMatrix<f64>, mu: &DVector<f64>, x: &DVector<f64>| -> f64 {
            let d = x - mu;
            -0.5 * (m.clone().try_inverse().unwrap() * &d).dot(&d)
        };
        let s_mat = DMatrix::from_diagonal(&s);
        let mut offsets = Vec::new();
        for _ in 0..50 {
            let x = DVector::from_fn(n, |_, _| rng.random_range(-3.0..3.0));
            let lhs = quad(&out.cov, &out.mean, &x);
            let rhs = quad(&cov, &mean, &x) + quad(&s_mat, &zr, &x);
            offsets.push(lhs - rhs);
        }
        let base = offsets[0];
        for o in &offsets {
            assert_relative_eq!(*o, base, max_relative = 1e-8, epsilon = 1e-8);
        }
    }

    #[test]
    fn posterior_shrinks_in_psd_order() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let n = 5;
        let cov = random_spd(n, &mut rng);
        let s = DVector::from_fn(n, |_, _| rng.random_range(0.1..2.0));
        let b = belief(DVector::zeros(n), cov.clone());
        let cost = CostSpec::new(DVector::zeros(n), s.clone()).unwrap();
        let out = gaussian_product(&b, &cost).unwrap();

        let gap = &cov - &out.cov;
        assert!(gap.symmetric_eigenvalues().iter().all(|&e| e >= -1e-8));
        let gap_s = DMatrix::from_diagonal(&s) - &out.cov;
        assert!(gap_s.symmetric_eigenvalues().iter().all(|&e| e >= -1e-8));
    }

    #[test]
    fn diagonal_mean_between_inputs() {
        let b = belief(
            dvector![1.0, -1.0, 0.5],
            DMatrix::from_diagonal(&dvector![0.5, 2.0, 1.0]),
        );
        let cost = CostSpec::new(dvector![0.0, 1.0, 0.5], dvector![1.0, 0.3, 2.0]).unwrap();
        let out = gaussian_product(&b, &cost).unwrap();
        for i in 0..3 {
            let lo = b.mean[i].min(cost.z_ref[i]) - 1e-12;
            let hi = b.mean[i].max(cost.z_ref[i]) + 1e-12;
            assert!(out.mean[i] >= lo && out.mean[i] <= hi);
        }
    }

    #[test]
    fn rejects_nonpositive_weights() {
        assert!(CostSpec::new(dvector![0.0], dvector![0.0]).is_err());
        assert!(CostSpec::new(dvector![0.0], dvector![-1.0]).is_err());
    }
}
