//! GP conditioning with heteroscedastic noise, marginal likelihood, and
//! hyperparameter training.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::kernels::{KernelSpec, LodeKernel};
use crate::linalg::{jittered_cholesky, symmetrize};
use crate::thmc::BoxBounds;

/// Noise-variance floor applied to every datapoint.
pub const NOISE_FLOOR: f64 = 1e-8;

/// Pseudo-noise emulating an absent datapoint on unbounded channels.
const UNBOUNDED_NOISE: f64 = 1e12;

/// Observations of all output channels at a set of times, with a
/// per-time, per-channel noise variance.
#[derive(Clone, Debug)]
pub struct Dataset {
    times: Vec<f64>,
    values: Vec<DVector<f64>>,
    noise: Vec<DVector<f64>>,
}

impl Dataset {
    pub fn new(times: Vec<f64>, values: Vec<DVector<f64>>, noise: Vec<DVector<f64>>) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::InvalidDataset("at least one datapoint required".into()));
        }
        if times.len() != values.len() || times.len() != noise.len() {
            return Err(Error::InvalidDataset(format!(
                "lengths disagree: {} times, {} values, {} noise rows",
                times.len(),
                values.len(),
                noise.len()
            )));
        }
        let n_z = values[0].len();
        for (v, s) in values.iter().zip(&noise) {
            if v.len() != n_z || s.len() != n_z {
                return Err(Error::InvalidDataset("ragged channel counts".into()));
            }
            if s.iter().any(|&x| x < 0.0 || !x.is_finite()) {
                return Err(Error::InvalidDataset("noise variances must be finite and nonnegative".into()));
            }
        }
        Ok(Dataset { times, values, noise })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn n_channels(&self) -> usize {
        self.values[0].len()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn value(&self, i: usize) -> &DVector<f64> {
        &self.values[i]
    }

    pub fn noise(&self, i: usize) -> &DVector<f64> {
        &self.noise[i]
    }

    /// Channel-major stacking matching the Gram layout.
    fn stacked_values(&self) -> DVector<f64> {
        let (nt, nz) = (self.len(), self.n_channels());
        DVector::from_fn(nz * nt, |i, _| self.values[i % nt][i / nt])
    }

    fn stacked_noise(&self) -> DVector<f64> {
        let (nt, nz) = (self.len(), self.n_channels());
        DVector::from_fn(nz * nt, |i, _| self.noise[i % nt][i / nt].max(NOISE_FLOOR))
    }
}

/// A finite-dimensional Gaussian over all channels at the grid times,
/// stacked channel-major.
#[derive(Clone, Debug)]
pub struct GaussianBelief {
    pub grid: Vec<f64>,
    pub mean: DVector<f64>,
    pub cov: DMatrix<f64>,
}

impl GaussianBelief {
    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn n_channels(&self) -> usize {
        if self.grid.is_empty() {
            0
        } else {
            self.mean.len() / self.grid.len()
        }
    }

    /// Mean of one channel at one grid index.
    pub fn mean_at(&self, channel: usize, time_idx: usize) -> f64 {
        self.mean[channel * self.grid.len() + time_idx]
    }
}

/// Builds the conditioning dataset for one horizon: the current
/// measurement `z0` at the first grid time with jitter noise, then one
/// constraint-center point per later grid time whose noise variance is
/// half the constraint range.
///
/// `bounds` must be evaluated on the same grid (channel-major). Channels
/// without a finite range get a huge pseudo-noise instead, which leaves
/// the posterior unconstrained there.
pub fn build_dataset(z0: &DVector<f64>, bounds: &BoxBounds, grid: &[f64]) -> Result<Dataset> {
    if grid.is_empty() {
        return Err(Error::InvalidDataset("empty grid".into()));
    }
    let n_z = z0.len();
    if bounds.dim() != n_z * grid.len() {
        return Err(Error::DimensionMismatch(format!(
            "bounds dim {} does not match {} channels on {} grid points",
            bounds.dim(),
            n_z,
            grid.len()
        )));
    }
    let nt = grid.len();
    let mut times = Vec::with_capacity(nt);
    let mut values = Vec::with_capacity(nt);
    let mut noise = Vec::with_capacity(nt);

    times.push(grid[0]);
    values.push(z0.clone());
    noise.push(DVector::from_element(n_z, NOISE_FLOOR));

    for ti in 1..nt {
        let mut value = DVector::zeros(n_z);
        let mut var = DVector::zeros(n_z);
        for ch in 0..n_z {
            let l = bounds.lower()[ch * nt + ti];
            let u = bounds.upper()[ch * nt + ti];
            if l.is_finite() && u.is_finite() {
                value[ch] = 0.5 * (u + l);
                var[ch] = (0.5 * (u - l)).max(NOISE_FLOOR);
            } else {
                // one- or two-sided unbounded: keep the point uninformative
                value[ch] = if l.is_finite() {
                    l
                } else if u.is_finite() {
                    u
                } else {
                    0.0
                };
                var[ch] = UNBOUNDED_NOISE;
            }
        }
        times.push(grid[ti]);
        values.push(value);
        noise.push(var);
    }
    Dataset::new(times, values, noise)
}

/// GP posterior on `grid` with zero prior mean: the predictive mean is
/// `K*ᵀ (K + Σ_n)⁻¹ z` and the covariance `K** − K*ᵀ (K + Σ_n)⁻¹ K*`,
/// with a diagonal heteroscedastic noise matrix.
pub fn posterior(kernel: &LodeKernel, data: &Dataset, grid: &[f64]) -> Result<GaussianBelief> {
    check_channels(kernel, data)?;
    if grid.is_empty() {
        return Ok(GaussianBelief {
            grid: Vec::new(),
            mean: DVector::zeros(0),
            cov: DMatrix::zeros(0, 0),
        });
    }
    let mut k = kernel.gram(data.times(), data.times());
    k += DMatrix::from_diagonal(&data.stacked_noise());
    let (chol, _) = jittered_cholesky(&k)?;

    let k_star = kernel.gram(data.times(), grid);
    let alpha = chol.solve(&data.stacked_values());
    let mean = k_star.transpose() * alpha;

    let mut cov = kernel.gram(grid, grid);
    let w = chol.solve(&k_star);
    cov -= k_star.transpose() * w;
    symmetrize(&mut cov);

    Ok(GaussianBelief {
        grid: grid.to_vec(),
        mean,
        cov,
    })
}

/// Log evidence `log N(z | 0, K + Σ_n)`.
pub fn log_marginal_likelihood(kernel: &LodeKernel, data: &Dataset) -> Result<f64> {
    check_channels(kernel, data)?;
    let mut k = kernel.gram(data.times(), data.times());
    k += DMatrix::from_diagonal(&data.stacked_noise());
    let (chol, _) = jittered_cholesky(&k)?;
    let z = data.stacked_values();
    let alpha = chol.solve(&z);
    let log_det: f64 = chol.l_dirty().diagonal().iter().map(|d| d.ln()).sum();
    let n = z.len() as f64;
    Ok(-0.5 * z.dot(&alpha) - log_det - 0.5 * n * (std::f64::consts::TAU).ln())
}

fn check_channels(kernel: &LodeKernel, data: &Dataset) -> Result<()> {
    if kernel.n_channels() != data.n_channels() {
        return Err(Error::DimensionMismatch(format!(
            "kernel has {} channels, dataset {}",
            kernel.n_channels(),
            data.n_channels()
        )));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug)]
pub struct TrainOptions {
    pub max_iters: usize,
    /// Stop when the best log evidence improves by less than this.
    pub tol: f64,
    /// Abort after this many consecutive non-finite objective values.
    pub max_failures: usize,
    /// Log-space box: parameters are confined to `[-bound, bound]`.
    pub log_bound: f64,
}

impl Default for TrainOptions {
    fn default() -> Self {
        TrainOptions {
            max_iters: 500,
            tol: 1e-6,
            max_failures: 20,
            log_bound: 10.0,
        }
    }
}

/// Maximizes the log evidence over `(signal_variance, lengthscale)` of
/// every latent kernel with a Nelder–Mead search in log space. Returns the
/// updated kernel specs; the result never has lower evidence than the
/// starting point.
pub fn train_hyperparameters(
    kernel: &LodeKernel,
    data: &Dataset,
    opts: &TrainOptions,
) -> Result<Vec<KernelSpec>> {
    let base = kernel.base().to_vec();
    for spec in &base {
        spec.validate()?;
    }
    let x0: Vec<f64> = base
        .iter()
        .flat_map(|s| [s.signal_variance.ln(), s.lengthscale.ln()])
        .collect();

    let rebuild = |theta: &[f64]| -> Result<LodeKernel> {
        let specs: Vec<KernelSpec> = base
            .iter()
            .zip(theta.chunks(2))
            .map(|(s, t)| s.with_hyperparameters(t[0].exp(), t[1].exp()))
            .collect();
        kernel.with_base(specs)
    };

    let mut failures = 0usize;
    let mut objective = |theta: &[f64]| -> Result<f64> {
        if theta.iter().any(|t| t.abs() > opts.log_bound) {
            return Ok(f64::NEG_INFINITY);
        }
        let lml = rebuild(theta).and_then(|k| log_marginal_likelihood(&k, data));
        match lml {
            Ok(v) if v.is_finite() => {
                failures = 0;
                Ok(v)
            }
            Ok(_) | Err(Error::FactorizationFailed { .. }) => {
                failures += 1;
                if failures > opts.max_failures {
                    return Err(Error::TrainingDiverged(failures));
                }
                Ok(f64::NEG_INFINITY)
            }
            Err(e) => Err(e),
        }
    };

    let best = nelder_mead(&x0, &mut objective, opts)?;
    let specs: Vec<KernelSpec> = base
        .iter()
        .zip(best.chunks(2))
        .map(|(s, t)| s.with_hyperparameters(t[0].exp(), t[1].exp()))
        .collect();
    Ok(specs)
}

/// Plain Nelder–Mead maximization, deterministic for a given start.
fn nelder_mead(
    x0: &[f64],
    f: &mut dyn FnMut(&[f64]) -> Result<f64>,
    opts: &TrainOptions,
) -> Result<Vec<f64>> {
    let dim = x0.len();
    let mut simplex: Vec<Vec<f64>> = vec![x0.to_vec()];
    for i in 0..dim {
        let mut v = x0.to_vec();
        v[i] += 0.5;
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| f(v)).collect::<Result<_>>()?;

    let order = |simplex: &mut Vec<Vec<f64>>, values: &mut Vec<f64>| {
        let mut idx: Vec<usize> = (0..simplex.len()).collect();
        idx.sort_by(|&a, &b| values[b].partial_cmp(&values[a]).unwrap_or(std::cmp::Ordering::Equal));
        *simplex = idx.iter().map(|&i| simplex[i].clone()).collect();
        *values = idx.iter().map(|&i| values[i]).collect();
    };
    order(&mut simplex, &mut values);

    // the incumbent never degrades, so convergence is a plateau of the
    // best value; single iterations without improvement are routine
    let mut best = values[0];
    let mut stalled = 0usize;
    for _ in 0..opts.max_iters {
        let centroid: Vec<f64> = (0..dim)
            .map(|k| simplex[..dim].iter().map(|v| v[k]).sum::<f64>() / dim as f64)
            .collect();
        let worst = simplex[dim].clone();
        let blend = |a: f64| -> Vec<f64> {
            (0..dim)
                .map(|k| centroid[k] + a * (centroid[k] - worst[k]))
                .collect()
        };

        let reflected = blend(1.0);
        let fr = f(&reflected)?;
        if fr > values[0] {
            let expanded = blend(2.0);
            let fe = f(&expanded)?;
            if fe > fr {
                simplex[dim] = expanded;
                values[dim] = fe;
            } else {
                simplex[dim] = reflected;
                values[dim] = fr;
            }
        } else if fr > values[dim - 1] {
            simplex[dim] = reflected;
            values[dim] = fr;
        } else {
            let contracted = blend(-0.5);
            let fc = f(&contracted)?;
            if fc > values[dim] {
                simplex[dim] = contracted;
                values[dim] = fc;
            } else {
                // shrink toward the best vertex
                for i in 1..=dim {
                    for k in 0..dim {
                        simplex[i][k] = 0.5 * (simplex[i][k] + simplex[0][k]);
                    }
                    values[i] = f(&simplex[i])?;
                }
            }
        }
        order(&mut simplex, &mut values);
        if values[0] - best < opts.tol {
            stalled += 1;
            if stalled >= 10 {
                break;
            }
        } else {
            stalled = 0;
            best = values[0];
        }
    }
    Ok(simplex.swap_remove(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{kernel_eval, KernelSpec};
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use nalgebra::dvector;
    use rand::SeedableRng;
    use rand_distr::Distribution;

    fn scalar_se() -> LodeKernel {
        LodeKernel::scalar(KernelSpec::se(1.0, 1.0)).unwrap()
    }

    #[test]
    fn posterior_interpolates_noiseless_point() {
        let kernel = scalar_se();
        let data = Dataset::new(
            vec![0.3],
            vec![dvector![0.7]],
            vec![dvector![0.0]],
        )
        .unwrap();
        let belief = posterior(&kernel, &data, &[0.3]).unwrap();
        assert_abs_diff_eq!(belief.mean[0], 0.7, epsilon = 1e-6);
        assert!(belief.cov[(0, 0)] <= 1e-6);
    }

    #[test]
    fn posterior_empty_grid() {
        let kernel = scalar_se();
        let data = Dataset::new(vec![0.0], vec![dvector![1.0]], vec![dvector![0.1]]).unwrap();
        let belief = posterior(&kernel, &data, &[]).unwrap();
        assert_eq!(belief.dim(), 0);
    }

    #[test]
    fn posterior_single_point_closed_form() {
        // one datapoint (0, 1) with noise 0.1, predicted at 0.5:
        // mean = k(0.5,0)/(k(0,0)+0.1) = exp(-0.125)/1.1
        let kernel = scalar_se();
        let data = Dataset::new(vec![0.0], vec![dvector![1.0]], vec![dvector![0.1]]).unwrap();
        let belief = posterior(&kernel, &data, &[0.5]).unwrap();
        let expected = (-0.125f64).exp() / (1.1 + NOISE_FLOOR);
        assert_relative_eq!(belief.mean[0], expected, max_relative = 1e-6);
        assert_relative_eq!(belief.mean[0], 0.8022, max_relative = 1e-3);
    }

    #[test]
    fn posterior_variance_never_exceeds_prior() {
        let kernel = scalar_se();
        let data = Dataset::new(
            vec![0.0, 0.5, 1.3],
            vec![dvector![1.0], dvector![-0.4], dvector![0.2]],
            vec![dvector![0.1], dvector![0.5], dvector![0.01]],
        )
        .unwrap();
        let grid: Vec<f64> = (0..21).map(|i| i as f64 * 0.1).collect();
        let belief = posterior(&kernel, &data, &grid).unwrap();
        for (i, &t) in grid.iter().enumerate() {
            let prior = kernel_eval(&KernelSpec::se(1.0, 1.0), t, t);
            assert!(belief.cov[(i, i)] <= prior + 1e-10);
        }
    }

    #[test]
    fn posterior_matches_explicit_inverse() {
        let kernel = scalar_se();
        let times = vec![0.0, 0.4, 0.9, 1.7];
        let data = Dataset::new(
            times.clone(),
            vec![dvector![1.0], dvector![0.3], dvector![-0.2], dvector![0.5]],
            vec![dvector![0.05], dvector![0.2], dvector![0.1], dvector![0.3]],
        )
        .unwrap();
        let grid = vec![0.2, 0.6, 1.1];
        let belief = posterior(&kernel, &data, &grid).unwrap();

        // dense reference with an explicit inverse
        let mut k = kernel.gram(&times, &times);
        k += DMatrix::from_diagonal(&data.stacked_noise());
        let kinv = k.try_inverse().unwrap();
        let ks = kernel.gram(&times, &grid);
        let z = data.stacked_values();
        let mean_ref = ks.transpose() * &kinv * z;
        let cov_ref = kernel.gram(&grid, &grid) - ks.transpose() * &kinv * &ks;

        assert_relative_eq!(belief.mean, mean_ref, max_relative = 1e-8);
        assert_relative_eq!(belief.cov, cov_ref, max_relative = 1e-6, epsilon = 1e-10);
    }

    #[test]
    fn lml_single_point() {
        let kernel = scalar_se();
        let data = Dataset::new(vec![0.0], vec![dvector![0.0]], vec![dvector![0.0]]).unwrap();
        let lml = log_marginal_likelihood(&kernel, &data).unwrap();
        assert_relative_eq!(lml, -0.5 * std::f64::consts::TAU.ln(), max_relative = 1e-6);
    }

    #[test]
    fn lml_matches_dense_bivariate_density() {
        let kernel = scalar_se();
        let data = Dataset::new(
            vec![0.2, 0.2],
            vec![dvector![0.5], dvector![0.5]],
            vec![dvector![1.0], dvector![1.0]],
        )
        .unwrap();
        let lml = log_marginal_likelihood(&kernel, &data).unwrap();
        let k = kernel.gram(&[0.2, 0.2], &[0.2, 0.2]) + DMatrix::identity(2, 2);
        let z = dvector![0.5, 0.5];
        let det = k.determinant();
        let expected = -0.5 * (k.try_inverse().unwrap() * &z).dot(&z)
            - 0.5 * det.ln()
            - std::f64::consts::TAU.ln();
        assert_relative_eq!(lml, expected, max_relative = 1e-8);
    }

    #[test]
    fn lml_decreases_with_larger_values() {
        let kernel = scalar_se();
        let make = |z: f64| {
            Dataset::new(vec![0.0, 1.0], vec![dvector![z], dvector![z]], vec![dvector![0.1], dvector![0.1]])
                .unwrap()
        };
        let a = log_marginal_likelihood(&kernel, &make(0.1)).unwrap();
        let b = log_marginal_likelihood(&kernel, &make(2.0)).unwrap();
        assert!(a > b);
    }

    #[test]
    fn build_dataset_centers_and_noise() {
        let grid: Vec<f64> = (0..5).map(|i| 0.5 * i as f64).collect();
        let n = grid.len();
        let lower = DVector::from_element(2 * n, -1.0);
        let upper = DVector::from_element(2 * n, 1.0);
        let bounds = BoxBounds::new(lower, upper).unwrap();
        let z0 = dvector![0.4, -0.2];
        let data = build_dataset(&z0, &bounds, &grid).unwrap();
        assert_eq!(data.len(), 5);
        assert_eq!(data.value(0), &z0);
        assert_eq!(data.noise(0), &DVector::from_element(2, NOISE_FLOOR));
        for i in 1..5 {
            assert_eq!(data.value(i), &dvector![0.0, 0.0]);
            assert_eq!(data.noise(i), &dvector![1.0, 1.0]);
        }
    }

    #[test]
    fn build_dataset_degenerate_range() {
        let grid = vec![0.0, 1.0];
        let lower = DVector::from_vec(vec![0.0, 0.7, 0.0, 0.7]);
        let upper = DVector::from_vec(vec![0.0, 0.7, 0.0, 0.7]);
        let bounds = BoxBounds::new(lower, upper).unwrap();
        let data = build_dataset(&dvector![0.1, 0.7], &bounds, &grid).unwrap();
        assert_eq!(data.value(1), &dvector![0.7, 0.7]);
        assert_eq!(data.noise(1), &DVector::from_element(2, NOISE_FLOOR));
    }

    #[test]
    fn build_dataset_single_point_grid() {
        let grid = vec![0.0];
        let bounds = BoxBounds::unbounded(2);
        let data = build_dataset(&dvector![1.0, 2.0], &bounds, &grid).unwrap();
        assert_eq!(data.len(), 1);
        assert_eq!(data.value(0), &dvector![1.0, 2.0]);
    }

    #[test]
    fn posterior_mean_satisfies_ode_on_refined_grid() {
        // spring-mass parametrization; the mean must satisfy the state
        // equation up to finite-difference accuracy. The Matérn mean has
        // second-derivative kinks at the data times (its error is O(step)),
        // so its refined grid is finer than the squared exponential's.
        let a = nalgebra::dmatrix![0.0, 1.0; 1.0, -1.0];
        let b = nalgebra::dmatrix![0.0; 2.5];
        let h_op = crate::polymat::system_to_operator_matrix(&a, &b).unwrap();
        let snf = crate::polymat::smith_normal_form(&h_op).unwrap();
        let p = crate::polymat::parametrization(&snf).unwrap();

        let coarse: Vec<f64> = (0..11).map(|i| i as f64 * 0.02).collect();
        let n_z = 3;
        let mut values = vec![dvector![0.8, 0.0, 0.0]];
        let mut noise = vec![DVector::from_element(n_z, NOISE_FLOOR)];
        for _ in 1..coarse.len() {
            values.push(DVector::zeros(n_z));
            noise.push(DVector::from_element(n_z, 1.0));
        }
        let data = Dataset::new(coarse, values, noise).unwrap();

        for (spec, step) in [
            (KernelSpec::se(1.0, 1.0), 5e-3),
            (KernelSpec::matern(2, 1.0, 1.0), 2.5e-4),
        ] {
            let kernel = LodeKernel::new(p.clone(), vec![spec]).unwrap();
            let fine: Vec<f64> = (0..401).map(|i| i as f64 * step).collect();
            let nf = fine.len();
            let belief = posterior(&kernel, &data, &fine).unwrap();
            let val = |ch: usize, i: usize| belief.mean[ch * nf + i];
            let d4 = |ch: usize, i: usize| {
                (-val(ch, i + 2) + 8.0 * val(ch, i + 1) - 8.0 * val(ch, i - 1)
                    + val(ch, i - 2))
                    / (12.0 * step)
            };
            let mut worst: f64 = 0.0;
            for i in 2..nf - 2 {
                let r1 = d4(0, i) - val(1, i);
                let r2 = d4(1, i) - (val(0, i) - val(1, i) + 2.5 * val(2, i));
                worst = worst.max((r1 * r1 + r2 * r2).sqrt());
            }
            assert!(worst <= 1e-2, "{spec:?}: worst residual {worst:.3e}");
        }
    }

    #[test]
    fn training_zero_budget_is_identity() {
        let kernel = scalar_se();
        let data = Dataset::new(vec![0.0], vec![dvector![1.0]], vec![dvector![0.1]]).unwrap();
        let opts = TrainOptions {
            max_iters: 0,
            ..TrainOptions::default()
        };
        let out = train_hyperparameters(&kernel, &data, &opts).unwrap();
        assert_eq!(out[0].signal_variance, 1.0);
        assert_eq!(out[0].lengthscale, 1.0);
    }

    #[test]
    fn training_improves_evidence_and_recovers_lengthscale() {
        // sample data from a known SE GP with lengthscale 0.5
        let truth = KernelSpec::se(1.0, 0.5);
        let gen = LodeKernel::scalar(truth).unwrap();
        let times: Vec<f64> = (0..40).map(|i| i as f64 * 0.1).collect();
        let mut g = gen.gram(&times, &times);
        for i in 0..g.nrows() {
            g[(i, i)] += 1e-6;
        }
        let chol = nalgebra::Cholesky::new(g).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let normal = rand_distr::StandardNormal;
        let iid = DVector::from_fn(times.len(), |_, _| normal.sample(&mut rng));
        let z = chol.l() * iid;

        let data = Dataset::new(
            times.clone(),
            z.iter().map(|&v| dvector![v]).collect(),
            vec![dvector![1e-4]; times.len()],
        )
        .unwrap();

        let init = LodeKernel::scalar(KernelSpec::se(1.0, 1.5)).unwrap();
        let lml0 = log_marginal_likelihood(&init, &data).unwrap();
        let trained = train_hyperparameters(&init, &data, &TrainOptions::default()).unwrap();
        let fitted = init.with_base(trained.clone()).unwrap();
        let lml1 = log_marginal_likelihood(&fitted, &data).unwrap();
        assert!(lml1 >= lml0);
        let ell = trained[0].lengthscale;
        assert!(
            ell > 0.25 && ell < 1.0,
            "recovered lengthscale {ell} not within factor 2 of 0.5"
        );
    }
}
