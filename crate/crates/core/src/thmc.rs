//! Exact Hamiltonian Monte Carlo for box-truncated multivariate normals.
//!
//! After whitening, the Hamiltonian flow of a standard normal is a rotation
//! `y(τ) = y₀ cos τ + v sin τ`, so trajectories integrate in closed form and
//! box faces become linear walls hit at solvable times. Every proposal is
//! accepted; samples satisfy the box by construction.

use std::f64::consts::{FRAC_PI_2, TAU};

use nalgebra::DVector;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::jittered_cholesky;
use crate::lodegp::GaussianBelief;

/// Elementwise box `lower ≤ z ≤ upper` over a stacked channel-major vector.
/// Infinite entries mark unconstrained components.
#[derive(Clone, Debug)]
pub struct BoxBounds {
    lower: DVector<f64>,
    upper: DVector<f64>,
}

impl BoxBounds {
    pub fn new(lower: DVector<f64>, upper: DVector<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch(format!(
                "bounds lengths {} vs {}",
                lower.len(),
                upper.len()
            )));
        }
        for i in 0..lower.len() {
            if lower[i].is_nan() || upper[i].is_nan() || lower[i] > upper[i] {
                return Err(Error::InvalidBounds {
                    index: i,
                    lower: lower[i],
                    upper: upper[i],
                });
            }
        }
        Ok(BoxBounds { lower, upper })
    }

    pub fn unbounded(dim: usize) -> Self {
        BoxBounds {
            lower: DVector::from_element(dim, f64::NEG_INFINITY),
            upper: DVector::from_element(dim, f64::INFINITY),
        }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &DVector<f64> {
        &self.lower
    }

    pub fn upper(&self) -> &DVector<f64> {
        &self.upper
    }

    /// Keeps the tail `start..` of every channel block, preserving the
    /// channel-major layout. `n_times` is the grid length of this box.
    pub fn restrict(&self, n_times: usize, start: usize) -> BoxBounds {
        let n_z = self.dim() / n_times;
        debug_assert_eq!(n_z * n_times, self.dim());
        let keep = n_times - start;
        let pick = |v: &DVector<f64>| {
            DVector::from_fn(n_z * keep, |i, _| {
                let (ch, ti) = (i / keep, i % keep);
                v[ch * n_times + start + ti]
            })
        };
        BoxBounds {
            lower: pick(&self.lower),
            upper: pick(&self.upper),
        }
    }

    /// Total violation `Σ max(z−upper, 0) + max(lower−z, 0)`.
    pub fn violation(&self, z: &DVector<f64>) -> f64 {
        let mut acc = 0.0;
        for i in 0..z.len() {
            acc += (z[i] - self.upper[i]).max(0.0) + (self.lower[i] - z[i]).max(0.0);
        }
        acc
    }

    pub fn contains(&self, z: &DVector<f64>, tol: f64) -> bool {
        (0..z.len()).all(|i| z[i] >= self.lower[i] - tol && z[i] <= self.upper[i] + tol)
    }
}

/// Componentwise projection of a mean onto the box, nudged strictly inside
/// so a Markov chain can start with interior support.
pub fn clamp_to_box(mean: &DVector<f64>, bounds: &BoxBounds) -> DVector<f64> {
    DVector::from_fn(mean.len(), |i, _| {
        let (l, u) = (bounds.lower[i], bounds.upper[i]);
        let eps = if l.is_finite() && u.is_finite() {
            1e-9 * (u - l)
        } else {
            1e-9
        };
        let (li, ui) = (l + eps, u - eps);
        if li > ui {
            // degenerate range, collapse to the midpoint
            return 0.5 * (l + u);
        }
        mean[i].clamp(li, ui)
    })
}

#[derive(Clone, Copy, Debug)]
pub struct HmcOptions {
    /// Total Hamiltonian trajectory time per step.
    pub trajectory_time: f64,
    /// Per-step collision cap, as a multiple of the dimension.
    pub collision_cap_factor: usize,
    /// Minimal positive hit time; earlier roots are treated as the
    /// departing wall and skipped.
    pub wall_time_guard: f64,
}

impl Default for HmcOptions {
    fn default() -> Self {
        HmcOptions {
            trajectory_time: FRAC_PI_2,
            collision_cap_factor: 10,
            wall_time_guard: 1e-10,
        }
    }
}

/// A Markov chain of exactly feasible draws plus per-sample diagnostics.
#[derive(Clone, Debug)]
pub struct SampleBatch {
    pub samples: Vec<DVector<f64>>,
    pub seed: u64,
    pub collision_counts: Vec<u32>,
    /// Relative Hamiltonian drift per sample trajectory.
    pub energy_drift: Vec<f64>,
    pub trajectory_time: f64,
}

/// Samples the belief truncated to the box, starting the chain at `init`
/// (strictly feasible). No burn-in is discarded.
pub fn sample_truncated(
    belief: &GaussianBelief,
    bounds: &BoxBounds,
    init: &DVector<f64>,
    n_samples: usize,
    seed: u64,
) -> Result<SampleBatch> {
    sample_truncated_with(belief, bounds, init, n_samples, &HmcOptions::default(), seed)
}

struct Wall {
    /// Row index of the whitening factor this wall projects onto.
    row: usize,
    /// +1 for an upper face, −1 for a lower face.
    sign: f64,
    /// Feasible side is `sign · (L y)_row ≤ g`.
    g: f64,
}

pub fn sample_truncated_with(
    belief: &GaussianBelief,
    bounds: &BoxBounds,
    init: &DVector<f64>,
    n_samples: usize,
    opts: &HmcOptions,
    seed: u64,
) -> Result<SampleBatch> {
    let n = belief.mean.len();
    if bounds.dim() != n || init.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "belief dim {n}, bounds dim {}, init dim {}",
            bounds.dim(),
            init.len()
        )));
    }
    for i in 0..n {
        if !(init[i] > bounds.lower[i] && init[i] < bounds.upper[i]) {
            return Err(Error::InfeasibleInit {
                index: i,
                value: init[i],
            });
        }
    }

    let (chol, _) = jittered_cholesky(&belief.cov)?;
    let l = chol.l();
    let mut walls = Vec::new();
    for k in 0..n {
        if bounds.upper[k].is_finite() {
            walls.push(Wall {
                row: k,
                sign: 1.0,
                g: bounds.upper[k] - belief.mean[k],
            });
        }
        if bounds.lower[k].is_finite() {
            walls.push(Wall {
                row: k,
                sign: -1.0,
                g: belief.mean[k] - bounds.lower[k],
            });
        }
    }
    let row_norm2: Vec<f64> = (0..n).map(|k| l.row(k).norm_squared()).collect();

    let mut y = l
        .solve_lower_triangular(&(init - &belief.mean))
        .ok_or(Error::FactorizationFailed { max_jitter: 0.0 })?;
    let mut v = DVector::zeros(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cap = opts.collision_cap_factor * n;

    let mut samples = Vec::with_capacity(n_samples);
    let mut collision_counts = Vec::with_capacity(n_samples);
    let mut energy_drift = Vec::with_capacity(n_samples);

    for _ in 0..n_samples {
        for vi in v.iter_mut() {
            *vi = rng.sample(StandardNormal);
        }
        let energy0 = y.norm_squared() + v.norm_squared();
        let mut t_rem = opts.trajectory_time;
        let mut collisions = 0usize;
        loop {
            // projections of position and velocity onto all wall normals
            let ly = &l * &y;
            let lv = &l * &v;
            let mut hit: Option<(f64, usize)> = None;
            for (widx, wall) in walls.iter().enumerate() {
                let a = wall.sign * lv[wall.row];
                let b = wall.sign * ly[wall.row];
                let amp = (a * a + b * b).sqrt();
                if amp < wall.g.abs() || amp == 0.0 {
                    continue; // wall unreachable on this orbit
                }
                let phi = a.atan2(b);
                let delta = (wall.g / amp).clamp(-1.0, 1.0).acos();
                for tau_base in [phi - delta, phi + delta] {
                    let mut tau = tau_base.rem_euclid(TAU);
                    if tau <= opts.wall_time_guard {
                        tau += TAU;
                    }
                    // a genuine hit crosses the wall moving outward
                    let outward = a * tau.cos() - b * tau.sin();
                    if outward <= 0.0 {
                        continue;
                    }
                    if hit.is_none_or(|(best, _)| tau < best) {
                        hit = Some((tau, widx));
                    }
                }
            }
            match hit {
                Some((tau, widx)) if tau < t_rem => {
                    advance(&mut y, &mut v, tau);
                    let wall = &walls[widx];
                    let coef = 2.0 * l.row(wall.row).transpose().dot(&v) / row_norm2[wall.row];
                    v -= coef * l.row(wall.row).transpose();
                    collisions += 1;
                    if collisions > cap {
                        return Err(Error::CollisionCapExceeded { collisions, cap });
                    }
                    t_rem -= tau;
                }
                _ => {
                    advance(&mut y, &mut v, t_rem);
                    break;
                }
            }
        }
        let energy1 = y.norm_squared() + v.norm_squared();
        energy_drift.push((energy1 - energy0).abs() / energy0.max(f64::MIN_POSITIVE));

        let z = &belief.mean + &l * &y;
        debug_assert!(
            bounds.contains(&z, 1e-9),
            "sampler emitted an infeasible state (violation {:.3e})",
            bounds.violation(&z)
        );
        samples.push(z);
        collision_counts.push(collisions as u32);
    }

    Ok(SampleBatch {
        samples,
        seed,
        collision_counts,
        energy_drift,
        trajectory_time: opts.trajectory_time,
    })
}

#[inline]
fn advance(y: &mut DVector<f64>, v: &mut DVector<f64>, tau: f64) {
    let (s, c) = tau.sin_cos();
    let y_new = &*y * c + &*v * s;
    let v_new = &*v * c - &*y * s;
    *y = y_new;
    *v = v_new;
}

/// Elementwise mean of the batch. A mean of points in a box stays in the box.
pub fn posterior_summary(batch: &SampleBatch) -> DVector<f64> {
    assert!(!batch.samples.is_empty(), "summary of an empty batch");
    let mut acc = DVector::zeros(batch.samples[0].len());
    for s in &batch.samples {
        acc += s;
    }
    acc / batch.samples.len() as f64
}
