//! Base covariance functions and the operator-applied matrix kernel.
//!
//! Both kernel families here are stationary `exp × polynomial` forms, so
//! every mixed derivative is again `exp × polynomial`. Derivative
//! coefficient tables are generated once per kernel; evaluation is a
//! Horner pass plus one exponential.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::polymat::PolyMatrix;

/// Highest mixed-derivative order supported for the squared-exponential
/// kernel (per argument).
pub const MAX_SE_DERIVATIVE_ORDER: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelKind {
    SquaredExponential,
    /// Half-integer Matérn with smoothness `order + 1/2`; the process is
    /// `order` times mean-square differentiable.
    Matern { order: usize },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelSpec {
    pub kind: KernelKind,
    pub signal_variance: f64,
    pub lengthscale: f64,
}

impl KernelSpec {
    pub fn se(signal_variance: f64, lengthscale: f64) -> Self {
        KernelSpec {
            kind: KernelKind::SquaredExponential,
            signal_variance,
            lengthscale,
        }
    }

    pub fn matern(order: usize, signal_variance: f64, lengthscale: f64) -> Self {
        KernelSpec {
            kind: KernelKind::Matern { order },
            signal_variance,
            lengthscale,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.signal_variance > 0.0 && self.signal_variance.is_finite()) {
            return Err(Error::InvalidKernel(format!(
                "signal variance must be positive, got {}",
                self.signal_variance
            )));
        }
        if !(self.lengthscale > 0.0 && self.lengthscale.is_finite()) {
            return Err(Error::InvalidKernel(format!(
                "lengthscale must be positive, got {}",
                self.lengthscale
            )));
        }
        Ok(())
    }

    /// Highest per-argument derivative order this kernel supports.
    pub fn max_derivative_order(&self) -> usize {
        match self.kind {
            KernelKind::SquaredExponential => MAX_SE_DERIVATIVE_ORDER,
            KernelKind::Matern { order } => order,
        }
    }

    /// Same kernel with new hyperparameters.
    pub fn with_hyperparameters(&self, signal_variance: f64, lengthscale: f64) -> Self {
        KernelSpec {
            kind: self.kind,
            signal_variance,
            lengthscale,
        }
    }

    fn check_orders(&self, i: usize, j: usize) -> Result<()> {
        let max = self.max_derivative_order();
        if i > max || j > max {
            return Err(Error::SmoothnessExceeded { i, j, max });
        }
        Ok(())
    }
}

/// Evaluates `k(t, t2)`.
pub fn kernel_eval(spec: &KernelSpec, t: f64, t2: f64) -> f64 {
    let d = t - t2;
    match spec.kind {
        KernelKind::SquaredExponential => {
            let x = d / spec.lengthscale;
            spec.signal_variance * (-0.5 * x * x).exp()
        }
        KernelKind::Matern { order } => {
            let lambda = matern_decay(order, spec.lengthscale);
            let base = matern_base_poly(order, lambda);
            let ad = d.abs();
            spec.signal_variance * (-lambda * ad).exp() * poly_eval(&base, ad)
        }
    }
}

/// Evaluates `∂_t^i ∂_{t2}^j k(t, t2)`.
///
/// Both families reduce to signed derivatives of the stationary profile:
/// `∂_t^i ∂_{t2}^j k = (-1)^j k^(i+j)(t - t2)`. The Matérn profile is only
/// piecewise smooth, so the sign of the lag selects the branch; odd total
/// orders vanish at zero lag.
pub fn kernel_mixed_derivative(
    spec: &KernelSpec,
    i: usize,
    j: usize,
    t: f64,
    t2: f64,
) -> Result<f64> {
    spec.check_orders(i, j)?;
    let d = t - t2;
    let n = i + j;
    match spec.kind {
        KernelKind::SquaredExponential => {
            let he = hermite_coeffs(n);
            let x = d / spec.lengthscale;
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            Ok(sign
                * spec.signal_variance
                * spec.lengthscale.powi(-(n as i32))
                * poly_eval(&he, x)
                * (-0.5 * x * x).exp())
        }
        KernelKind::Matern { order } => {
            let lambda = matern_decay(order, spec.lengthscale);
            let q = matern_derivative_poly(order, lambda, n);
            let ad = d.abs();
            let parity = if d >= 0.0 { j } else { i };
            let sign = if parity % 2 == 0 { 1.0 } else { -1.0 };
            Ok(sign * spec.signal_variance * (-lambda * ad).exp() * poly_eval(&q, ad))
        }
    }
}

/// Matrix kernel obtained by pushing latent kernels through the operator
/// columns of a parametrization: block `(a, b)` at `(t, t2)` is
/// `Σ_c P[a][c](∂_t) P[b][c](∂_t2) k_c(t, t2)`.
#[derive(Clone, Debug)]
pub struct LodeKernel {
    parametrization: PolyMatrix,
    base: Vec<KernelSpec>,
    n_channels: usize,
    latents: Vec<LatentTable>,
}

/// Precompiled evaluation table for one latent kernel: a polynomial per
/// channel pair plus the shared exponential profile.
#[derive(Clone, Debug)]
enum LatentTable {
    Se {
        sigma2: f64,
        inv_len: f64,
        /// per (a, b) pair: coefficients in x = d / lengthscale
        combined: Vec<Vec<f64>>,
    },
    Matern {
        sigma2: f64,
        lambda: f64,
        /// per (a, b) pair: coefficients in |d|, branch for d >= 0
        pos: Vec<Vec<f64>>,
        /// branch for d < 0
        neg: Vec<Vec<f64>>,
    },
}

impl LodeKernel {
    /// Builds the matrix kernel; `base` supplies one latent kernel per
    /// column of the parametrization.
    pub fn new(parametrization: PolyMatrix, base: Vec<KernelSpec>) -> Result<Self> {
        if base.len() != parametrization.cols() {
            return Err(Error::DimensionMismatch(format!(
                "{} latent kernels for a parametrization with {} columns",
                base.len(),
                parametrization.cols()
            )));
        }
        let n_channels = parametrization.rows();
        let mut latents = Vec::with_capacity(base.len());
        for (c, spec) in base.iter().enumerate() {
            spec.validate()?;
            let coeffs: Vec<Vec<f64>> = (0..n_channels)
                .map(|a| parametrization.get(a, c).to_f64_coeffs())
                .collect();
            let max_deg = coeffs.iter().map(|p| p.len().saturating_sub(1)).max().unwrap_or(0);
            let max = spec.max_derivative_order();
            if max_deg > max {
                return Err(Error::SmoothnessExceeded {
                    i: max_deg,
                    j: max_deg,
                    max,
                });
            }
            latents.push(build_latent_table(spec, &coeffs, n_channels));
        }
        Ok(LodeKernel {
            parametrization,
            base,
            n_channels,
            latents,
        })
    }

    /// Scalar wrapper: the kernel of a single unconstrained channel.
    pub fn scalar(spec: KernelSpec) -> Result<Self> {
        LodeKernel::new(PolyMatrix::identity(1), vec![spec])
    }

    pub fn n_channels(&self) -> usize {
        self.n_channels
    }

    pub fn base(&self) -> &[KernelSpec] {
        &self.base
    }

    pub fn parametrization(&self) -> &PolyMatrix {
        &self.parametrization
    }

    /// Rebuilds the kernel with new latent hyperparameters.
    pub fn with_base(&self, base: Vec<KernelSpec>) -> Result<Self> {
        LodeKernel::new(self.parametrization.clone(), base)
    }

    /// Evaluates block entry `(a, b)` at `(t, t2)`.
    pub fn block_eval(&self, a: usize, b: usize, t: f64, t2: f64) -> f64 {
        let d = t - t2;
        let pair = a * self.n_channels + b;
        self.latents
            .iter()
            .map(|lat| lat.eval_pair(pair, d))
            .sum()
    }

    /// Dense covariance between two time grids, channel-major: all times of
    /// channel 0 first, then channel 1, and so on.
    pub fn gram(&self, times_a: &[f64], times_b: &[f64]) -> DMatrix<f64> {
        let (na, nb) = (times_a.len(), times_b.len());
        let nz = self.n_channels;
        let mut k = DMatrix::zeros(nz * na, nz * nb);
        for (ia, &ta) in times_a.iter().enumerate() {
            for (ib, &tb) in times_b.iter().enumerate() {
                let d = ta - tb;
                for a in 0..nz {
                    for b in 0..nz {
                        let pair = a * nz + b;
                        let val: f64 = self
                            .latents
                            .iter()
                            .map(|lat| lat.eval_pair(pair, d))
                            .sum();
                        k[(a * na + ia, b * nb + ib)] = val;
                    }
                }
            }
        }
        k
    }
}

impl LatentTable {
    #[inline]
    fn eval_pair(&self, pair: usize, d: f64) -> f64 {
        match self {
            LatentTable::Se {
                sigma2,
                inv_len,
                combined,
            } => {
                let x = d * inv_len;
                sigma2 * (-0.5 * x * x).exp() * poly_eval(&combined[pair], x)
            }
            LatentTable::Matern {
                sigma2,
                lambda,
                pos,
                neg,
            } => {
                let ad = d.abs();
                let table = if d >= 0.0 { pos } else { neg };
                sigma2 * (-lambda * ad).exp() * poly_eval(&table[pair], ad)
            }
        }
    }
}

fn build_latent_table(spec: &KernelSpec, coeffs: &[Vec<f64>], nz: usize) -> LatentTable {
    let max_deg = coeffs.iter().map(|p| p.len().saturating_sub(1)).max().unwrap_or(0);
    match spec.kind {
        KernelKind::SquaredExponential => {
            let ell = spec.lengthscale;
            let he: Vec<Vec<f64>> = (0..=2 * max_deg).map(hermite_coeffs).collect();
            let mut combined = vec![Vec::new(); nz * nz];
            for a in 0..nz {
                for b in 0..nz {
                    let mut acc = vec![0.0; 2 * max_deg + 1];
                    for (alpha, &pa) in coeffs[a].iter().enumerate() {
                        for (beta, &pb) in coeffs[b].iter().enumerate() {
                            let n = alpha + beta;
                            let sign = if alpha % 2 == 0 { 1.0 } else { -1.0 };
                            let w = sign * pa * pb * ell.powi(-(n as i32));
                            poly_axpy(&mut acc, w, &he[n]);
                        }
                    }
                    combined[a * nz + b] = acc;
                }
            }
            LatentTable::Se {
                sigma2: spec.signal_variance,
                inv_len: 1.0 / ell,
                combined,
            }
        }
        KernelKind::Matern { order } => {
            let lambda = matern_decay(order, spec.lengthscale);
            let q: Vec<Vec<f64>> = (0..=2 * max_deg)
                .map(|n| matern_derivative_poly(order, lambda, n))
                .collect();
            let mut pos = vec![Vec::new(); nz * nz];
            let mut neg = vec![Vec::new(); nz * nz];
            for a in 0..nz {
                for b in 0..nz {
                    let mut acc_pos = vec![0.0; order + 1];
                    let mut acc_neg = vec![0.0; order + 1];
                    for (alpha, &pa) in coeffs[a].iter().enumerate() {
                        for (beta, &pb) in coeffs[b].iter().enumerate() {
                            let n = alpha + beta;
                            let sp = if beta % 2 == 0 { 1.0 } else { -1.0 };
                            let sn = if alpha % 2 == 0 { 1.0 } else { -1.0 };
                            poly_axpy(&mut acc_pos, sp * pa * pb, &q[n]);
                            poly_axpy(&mut acc_neg, sn * pa * pb, &q[n]);
                        }
                    }
                    pos[a * nz + b] = acc_pos;
                    neg[a * nz + b] = acc_neg;
                }
            }
            LatentTable::Matern {
                sigma2: spec.signal_variance,
                lambda,
                pos,
                neg,
            }
        }
    }
}

/// Exponential decay rate `sqrt(2r + 1) / lengthscale`.
fn matern_decay(order: usize, lengthscale: f64) -> f64 {
    ((2 * order + 1) as f64).sqrt() / lengthscale
}

/// Coefficients (in |d|) of the Matérn profile polynomial, normalized so
/// the kernel equals the signal variance at zero lag. Built by the stable
/// term ratio instead of factorials.
fn matern_base_poly(order: usize, lambda: f64) -> Vec<f64> {
    let r = order as f64;
    let mut coeffs = vec![0.0; order + 1];
    coeffs[0] = 1.0;
    for m in 0..order {
        let mf = m as f64;
        coeffs[m + 1] = coeffs[m] * 2.0 * lambda * (r - mf) / ((2.0 * r - mf) * (mf + 1.0));
    }
    coeffs
}

/// Polynomial factor of the n-th lag derivative of the Matérn profile on
/// the positive branch: `k^(n)(d) = σ² e^{-λd} q_n(d)` for `d > 0`.
fn matern_derivative_poly(order: usize, lambda: f64, n: usize) -> Vec<f64> {
    let mut q = matern_base_poly(order, lambda);
    for _ in 0..n {
        let dq = poly_derivative(&q);
        for (k, c) in q.iter_mut().enumerate() {
            *c = dq.get(k).copied().unwrap_or(0.0) - lambda * *c;
        }
    }
    q
}

/// Probabilists' Hermite polynomial coefficients, lowest degree first.
fn hermite_coeffs(n: usize) -> Vec<f64> {
    let mut prev = vec![1.0];
    if n == 0 {
        return prev;
    }
    let mut cur = vec![0.0, 1.0];
    for k in 1..n {
        // He_{k+1} = x·He_k − k·He_{k−1}
        let mut next = vec![0.0; k + 2];
        for (i, &c) in cur.iter().enumerate() {
            next[i + 1] += c;
        }
        for (i, &c) in prev.iter().enumerate() {
            next[i] -= k as f64 * c;
        }
        prev = cur;
        cur = next;
    }
    cur
}

#[inline]
fn poly_eval(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

fn poly_derivative(coeffs: &[f64]) -> Vec<f64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &c)| k as f64 * c)
        .collect()
}

fn poly_axpy(acc: &mut Vec<f64>, w: f64, p: &[f64]) {
    if acc.len() < p.len() {
        acc.resize(p.len(), 0.0);
    }
    for (a, &c) in acc.iter_mut().zip(p.iter()) {
        *a += w * c;
    }
}
