//! Problem definition, plant simulation, the control loop, and the two
//! closed-loop metrics.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::kernels::{KernelSpec, LodeKernel};
use crate::lodegp::{build_dataset, posterior, train_hyperparameters, Dataset, TrainOptions};
use crate::polymat::{parametrization, smith_normal_form, system_to_operator_matrix, PolyMatrix};
use crate::reweight::{gaussian_product, CostSpec};
use crate::thmc::{
    clamp_to_box, posterior_summary, sample_truncated_with, BoxBounds, HmcOptions,
};

/// The pair (A, B) of a linear time-invariant control system.
#[derive(Clone, Debug)]
pub struct ControlSystem {
    a: DMatrix<f64>,
    b: DMatrix<f64>,
}

impl ControlSystem {
    /// Validates shapes and controllability of `(A, B)`.
    pub fn new(a: DMatrix<f64>, b: DMatrix<f64>) -> Result<Self> {
        if a.nrows() != a.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "state matrix must be square, got {}x{}",
                a.nrows(),
                a.ncols()
            )));
        }
        if b.nrows() != a.nrows() || b.ncols() == 0 || a.nrows() == 0 {
            return Err(Error::DimensionMismatch(format!(
                "input matrix {}x{} does not match {} states",
                b.nrows(),
                b.ncols(),
                a.nrows()
            )));
        }
        let sys = ControlSystem { a, b };
        let n = sys.n_states();
        // controllability matrix [B, AB, ..., A^{n-1}B]
        let mut blocks = Vec::with_capacity(n);
        let mut cur = sys.b.clone();
        for _ in 0..n {
            blocks.push(cur.clone());
            cur = &sys.a * cur;
        }
        let mut ctrl = DMatrix::zeros(n, n * sys.n_inputs());
        for (k, blk) in blocks.iter().enumerate() {
            ctrl.view_mut((0, k * sys.n_inputs()), (n, sys.n_inputs()))
                .copy_from(blk);
        }
        let scale = ctrl.amax().max(1.0);
        if ctrl.rank(1e-10 * scale) < n {
            return Err(Error::InvalidProblem(
                "system (A, B) is not controllable".into(),
            ));
        }
        Ok(sys)
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b(&self) -> &DMatrix<f64> {
        &self.b
    }

    pub fn n_states(&self) -> usize {
        self.a.nrows()
    }

    pub fn n_inputs(&self) -> usize {
        self.b.ncols()
    }

    /// Stacked channel count (states then inputs).
    pub fn n_channels(&self) -> usize {
        self.n_states() + self.n_inputs()
    }

    pub fn operator_matrix(&self) -> Result<PolyMatrix> {
        system_to_operator_matrix(&self.a, &self.b)
    }

    /// Parametrization of the solution space via the Smith normal form.
    pub fn parametrization(&self) -> Result<PolyMatrix> {
        let h = self.operator_matrix()?;
        let snf = smith_normal_form(&h)?;
        parametrization(&snf)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModelKind {
    /// Squared-exponential latent kernel, no reweighting.
    Gpse,
    /// Matérn latent kernel, no reweighting.
    Gpm,
    /// Matérn latent kernel with quadratic-cost reweighting.
    Gpmo,
}

/// Model kind plus whether the constrained sampling step runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModelVariant {
    pub kind: ModelKind,
    pub sampled: bool,
}

impl ModelVariant {
    pub fn new(kind: ModelKind, sampled: bool) -> Self {
        ModelVariant { kind, sampled }
    }

    pub fn label(&self) -> String {
        let base = match self.kind {
            ModelKind::Gpse => "gpse",
            ModelKind::Gpm => "gpm",
            ModelKind::Gpmo => "gpmo",
        };
        if self.sampled {
            format!("{base}s")
        } else {
            base.to_string()
        }
    }
}

impl fmt::Display for ModelVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

impl FromStr for ModelVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, sampled) = match s.to_ascii_lowercase().as_str() {
            "gpse" => (ModelKind::Gpse, false),
            "gpses" => (ModelKind::Gpse, true),
            "gpm" => (ModelKind::Gpm, false),
            "gpms" => (ModelKind::Gpm, true),
            "gpmo" => (ModelKind::Gpmo, false),
            "gpmos" => (ModelKind::Gpmo, true),
            other => {
                return Err(Error::InvalidProblem(format!(
                    "unknown model variant '{other}'"
                )))
            }
        };
        Ok(ModelVariant { kind, sampled })
    }
}

/// Per-channel bounds, either constant or piecewise linear in time.
#[derive(Clone, Debug, PartialEq)]
pub enum ChannelBounds {
    Constant { lower: f64, upper: f64 },
    /// `(time, lower, upper)` breakpoints with linear interpolation
    /// between them; clamped outside the breakpoint range.
    Piecewise { breakpoints: Vec<(f64, f64, f64)> },
}

impl ChannelBounds {
    pub fn unbounded() -> Self {
        ChannelBounds::Constant {
            lower: f64::NEG_INFINITY,
            upper: f64::INFINITY,
        }
    }

    pub fn eval(&self, t: f64) -> (f64, f64) {
        match self {
            ChannelBounds::Constant { lower, upper } => (*lower, *upper),
            ChannelBounds::Piecewise { breakpoints } => {
                let first = breakpoints.first().expect("validated nonempty");
                let last = breakpoints.last().unwrap();
                if t <= first.0 {
                    return (first.1, first.2);
                }
                if t >= last.0 {
                    return (last.1, last.2);
                }
                let hi = breakpoints.partition_point(|bp| bp.0 <= t);
                let (t0, l0, u0) = breakpoints[hi - 1];
                let (t1, l1, u1) = breakpoints[hi];
                let w = (t - t0) / (t1 - t0);
                (l0 + w * (l1 - l0), u0 + w * (u1 - u0))
            }
        }
    }

    fn validate(&self) -> Result<()> {
        if let ChannelBounds::Piecewise { breakpoints } = self {
            if breakpoints.is_empty() {
                return Err(Error::InvalidProblem("empty breakpoint list".into()));
            }
            for w in breakpoints.windows(2) {
                if w[1].0 <= w[0].0 {
                    return Err(Error::InvalidProblem(
                        "breakpoint times must be strictly increasing".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Bounds for every channel (states first, then inputs).
#[derive(Clone, Debug, PartialEq)]
pub struct BoundsSpec {
    pub channels: Vec<ChannelBounds>,
}

impl BoundsSpec {
    pub fn constant(ranges: &[(f64, f64)]) -> Self {
        BoundsSpec {
            channels: ranges
                .iter()
                .map(|&(lower, upper)| ChannelBounds::Constant { lower, upper })
                .collect(),
        }
    }

    /// Evaluates onto a grid as a stacked channel-major box.
    pub fn evaluate(&self, grid: &[f64]) -> Result<BoxBounds> {
        for ch in &self.channels {
            ch.validate()?;
        }
        let (nz, nt) = (self.channels.len(), grid.len());
        let mut lower = DVector::zeros(nz * nt);
        let mut upper = DVector::zeros(nz * nt);
        for (ch, cb) in self.channels.iter().enumerate() {
            for (ti, &t) in grid.iter().enumerate() {
                let (l, u) = cb.eval(t);
                lower[ch * nt + ti] = l;
                upper[ch * nt + ti] = u;
            }
        }
        BoxBounds::new(lower, upper)
    }
}

/// Per-channel reference for the quadratic cost.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ZRef {
    Zero,
    /// Track the constraint centers (the same values the dataset uses).
    Centers,
    Constant(f64),
    /// Linear in time from `from` at the window start to `to` at the
    /// window end, clamped outside.
    Ramp { from: f64, to: f64 },
}

/// Per-channel quadratic cost: reference mode and diagonal weight,
/// broadcast over the grid.
#[derive(Clone, Debug)]
pub struct CostWeights {
    pub s_diag: Vec<f64>,
    pub z_ref: Vec<ZRef>,
}

impl CostWeights {
    /// Uniform weight with a zero reference on every channel.
    pub fn uniform(n_channels: usize, s: f64) -> Self {
        CostWeights {
            s_diag: vec![s; n_channels],
            z_ref: vec![ZRef::Zero; n_channels],
        }
    }

    /// Builds the stacked cost on a (sub-)grid. `bounds` must be the box
    /// restricted to the same grid; `window` is the full experiment time
    /// span, anchoring ramp references independent of the horizon.
    pub fn cost_spec(
        &self,
        bounds: &BoxBounds,
        grid: &[f64],
        window: (f64, f64),
    ) -> Result<CostSpec> {
        let nz = self.s_diag.len();
        let n_times = grid.len();
        if bounds.dim() != nz * n_times {
            return Err(Error::DimensionMismatch(format!(
                "bounds dim {} vs {} channels on {} points",
                bounds.dim(),
                nz,
                n_times
            )));
        }
        let mut z_ref = DVector::zeros(nz * n_times);
        let mut s = DVector::zeros(nz * n_times);
        for ch in 0..nz {
            for (ti, &t) in grid.iter().enumerate() {
                let idx = ch * n_times + ti;
                s[idx] = self.s_diag[ch];
                z_ref[idx] = match self.z_ref[ch] {
                    ZRef::Zero => 0.0,
                    ZRef::Constant(c) => c,
                    ZRef::Centers => {
                        let (l, u) = (bounds.lower()[idx], bounds.upper()[idx]);
                        if l.is_finite() && u.is_finite() {
                            0.5 * (l + u)
                        } else {
                            0.0
                        }
                    }
                    ZRef::Ramp { from, to } => {
                        let w = ((t - window.0) / (window.1 - window.0)).clamp(0.0, 1.0);
                        from + w * (to - from)
                    }
                };
            }
        }
        CostSpec::new(z_ref, s)
    }
}

/// Everything needed to run one closed-loop experiment.
#[derive(Clone, Debug)]
pub struct ControlProblem {
    pub system: ControlSystem,
    pub x0: DVector<f64>,
    pub u0: DVector<f64>,
    pub grid: Vec<f64>,
    pub bounds: BoundsSpec,
    pub cost: CostWeights,
    pub variant: ModelVariant,
    /// Latent kernel specs (one per free column of the parametrization);
    /// train before running the loop.
    pub base: Vec<KernelSpec>,
    pub n_samples: usize,
    pub seed: u64,
    pub hmc: HmcOptions,
    /// Constant metric reference per state channel.
    pub x_ref: Vec<f64>,
    pub record_plans: bool,
}

impl ControlProblem {
    /// Initial latent kernel specs for a model kind: one per parametrization
    /// column, Matérn order defaulting to the maximum operator degree.
    pub fn initial_kernel_specs(
        kind: ModelKind,
        p: &PolyMatrix,
        matern_order: Option<usize>,
        signal_variance: f64,
        lengthscale: f64,
    ) -> Result<Vec<KernelSpec>> {
        let specs = (0..p.cols())
            .map(|_| match kind {
                ModelKind::Gpse => KernelSpec::se(signal_variance, lengthscale),
                ModelKind::Gpm | ModelKind::Gpmo => {
                    let order = matern_order.unwrap_or_else(|| max_operator_degree(p));
                    KernelSpec::matern(order, signal_variance, lengthscale)
                }
            })
            .collect::<Vec<_>>();
        for s in &specs {
            s.validate()?;
        }
        Ok(specs)
    }

    pub fn lode_kernel(&self) -> Result<LodeKernel> {
        let p = self.system.parametrization()?;
        LodeKernel::new(p, self.base.clone())
    }

    /// The stacked measurement at the loop start.
    fn z0(&self) -> DVector<f64> {
        stack(&self.x0, &self.u0)
    }

    /// Conditioning dataset on the full grid (initial point plus
    /// constraint centers), as used for hyperparameter training.
    pub fn dataset(&self) -> Result<Dataset> {
        let bounds = self.bounds.evaluate(&self.grid)?;
        build_dataset(&self.z0(), &bounds, &self.grid)
    }

    /// Trains the latent hyperparameters on the full-grid dataset and
    /// freezes them into the problem.
    pub fn train(&mut self, opts: &TrainOptions) -> Result<()> {
        let kernel = self.lode_kernel()?;
        let data = self.dataset()?;
        self.base = train_hyperparameters(&kernel, &data, opts)?;
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let n_x = self.system.n_states();
        let n_u = self.system.n_inputs();
        let n_z = self.system.n_channels();
        if self.x0.len() != n_x || self.u0.len() != n_u {
            return Err(Error::InvalidProblem(format!(
                "initial state/input lengths {}/{} do not match system {}/{}",
                self.x0.len(),
                self.u0.len(),
                n_x,
                n_u
            )));
        }
        if self.grid.is_empty() {
            return Err(Error::InvalidProblem("empty grid".into()));
        }
        if self.grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidProblem(
                "grid must be strictly increasing".into(),
            ));
        }
        if self.bounds.channels.len() != n_z {
            return Err(Error::InvalidProblem(format!(
                "{} bound channels for {} system channels",
                self.bounds.channels.len(),
                n_z
            )));
        }
        if self.cost.s_diag.len() != n_z || self.cost.z_ref.len() != n_z {
            return Err(Error::InvalidProblem(
                "cost weight/reference lengths must match the channel count".into(),
            ));
        }
        if self.x_ref.len() != n_x {
            return Err(Error::InvalidProblem(
                "metric reference length must match the state count".into(),
            ));
        }
        if self.variant.sampled && self.n_samples == 0 {
            return Err(Error::InvalidProblem(
                "sampled variants need at least one sample".into(),
            ));
        }
        // initial state inside the box at t0
        for (i, cb) in self.bounds.channels.iter().take(n_x).enumerate() {
            cb.validate()?;
            let (l, u) = cb.eval(self.grid[0]);
            if self.x0[i] < l || self.x0[i] > u {
                return Err(Error::InvalidProblem(format!(
                    "initial state channel {i} = {} outside [{l}, {u}]",
                    self.x0[i]
                )));
            }
        }
        for cb in self.bounds.channels.iter().skip(n_x) {
            cb.validate()?;
        }
        Ok(())
    }
}

fn max_operator_degree(p: &PolyMatrix) -> usize {
    let mut deg = 0;
    for i in 0..p.rows() {
        for j in 0..p.cols() {
            deg = deg.max(p.get(i, j).degree().unwrap_or(0));
        }
    }
    deg
}

fn stack(x: &DVector<f64>, u: &DVector<f64>) -> DVector<f64> {
    let mut z = DVector::zeros(x.len() + u.len());
    z.rows_mut(0, x.len()).copy_from(x);
    z.rows_mut(x.len(), u.len()).copy_from(u);
    z
}

/// Closed-loop record with the two metrics attached.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DVector<f64>>,
    pub inputs: Vec<DVector<f64>>,
    /// Per-step open-loop plans (stacked channel-major over the remaining
    /// grid), kept only when requested.
    pub plans: Option<Vec<DVector<f64>>>,
    pub constraint_error: f64,
    pub control_error: f64,
}

/// Exact zero-order-hold step: `x⁺ = e^{A·dt} x + (∫₀^dt e^{As} ds) B u`,
/// with the integral obtained from the exponential of the augmented matrix
/// `[[A, B], [0, 0]] · dt`.
pub fn simulate_plant(
    sys: &ControlSystem,
    x: &DVector<f64>,
    u: &DVector<f64>,
    dt: f64,
) -> DVector<f64> {
    assert!(dt > 0.0, "step size must be positive");
    let n = sys.n_states();
    let m = sys.n_inputs();
    let mut aug = DMatrix::zeros(n + m, n + m);
    aug.view_mut((0, 0), (n, n)).copy_from(&(sys.a() * dt));
    aug.view_mut((0, n), (n, m)).copy_from(&(sys.b() * dt));
    let e = aug.exp();
    let ad = e.view((0, 0), (n, n));
    let bd = e.view((0, n), (n, m));
    ad * x + bd * u
}

/// Shrinking-horizon control loop: at each grid time, condition on the
/// measured state, optionally reweight with the quadratic cost, optionally
/// sample the truncated belief, read the input at the next grid time, and
/// advance the plant with a zero-order hold.
pub fn run_control_loop(problem: &ControlProblem) -> Result<Trajectory> {
    problem.validate()?;
    let kernel = problem.lode_kernel()?;
    let n = problem.grid.len();
    let n_x = problem.system.n_states();
    let n_u = problem.system.n_inputs();
    let full_bounds = problem.bounds.evaluate(&problem.grid)?;

    let mut states = Vec::with_capacity(n);
    let mut inputs = Vec::with_capacity(n);
    let mut plans = problem.record_plans.then(Vec::new);
    let mut x = problem.x0.clone();
    let mut u_prev = problem.u0.clone();
    states.push(x.clone());

    for i in 0..n {
        let at = |e: Error| e.at_step(i, problem.grid[i]);
        let sub_grid = &problem.grid[i..];
        let keep = n - i;
        let bounds_i = full_bounds.restrict(n, i);

        let z0 = stack(&x, &u_prev);
        let data = build_dataset(&z0, &bounds_i, sub_grid).map_err(at)?;
        let mut belief = posterior(&kernel, &data, sub_grid).map_err(at)?;
        if problem.variant.kind == ModelKind::Gpmo {
            let window = (problem.grid[0], *problem.grid.last().unwrap());
            let cost = problem.cost.cost_spec(&bounds_i, sub_grid, window).map_err(at)?;
            belief = gaussian_product(&belief, &cost).map_err(at)?;
        }
        let plan = if problem.variant.sampled {
            let init = clamp_to_box(&belief.mean, &bounds_i);
            let seed = step_seed(problem.seed, i as u64);
            let batch = sample_truncated_with(
                &belief,
                &bounds_i,
                &init,
                problem.n_samples,
                &problem.hmc,
                seed,
            )
            .map_err(at)?;
            posterior_summary(&batch)
        } else {
            belief.mean
        };

        // the plan value at the next grid time is the applied input; at the
        // final time the plan only has the current point
        let rel = if keep > 1 { 1 } else { 0 };
        let u_i = DVector::from_fn(n_u, |k, _| plan[(n_x + k) * keep + rel]);
        if let Some(ps) = plans.as_mut() {
            ps.push(plan);
        }
        inputs.push(u_i.clone());
        if i + 1 < n {
            let dt = problem.grid[i + 1] - problem.grid[i];
            x = simulate_plant(&problem.system, &x, &u_i, dt);
            states.push(x.clone());
        }
        u_prev = u_i;
    }

    let mut traj = Trajectory {
        times: problem.grid.clone(),
        states,
        inputs,
        plans,
        constraint_error: 0.0,
        control_error: 0.0,
    };
    traj.constraint_error = constraint_violation(&traj, &full_bounds);
    let reference: Vec<DVector<f64>> = (0..n)
        .map(|_| DVector::from_column_slice(&problem.x_ref))
        .collect();
    traj.control_error = control_error(&traj, &reference);
    Ok(traj)
}

/// Deterministic per-step stream derived from the master seed.
fn step_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mean constraint violation: per time step, the violations of all
/// channels (states and inputs) are summed, then averaged over the steps.
pub fn constraint_violation(traj: &Trajectory, bounds: &BoxBounds) -> f64 {
    let n = traj.times.len();
    assert_eq!(traj.states.len(), n);
    assert_eq!(traj.inputs.len(), n);
    let n_x = traj.states[0].len();
    let n_u = traj.inputs[0].len();
    let n_z = n_x + n_u;
    assert_eq!(bounds.dim(), n_z * n);
    let mut total = 0.0;
    for i in 0..n {
        for ch in 0..n_z {
            let v = if ch < n_x {
                traj.states[i][ch]
            } else {
                traj.inputs[i][ch - n_x]
            };
            let idx = ch * n + i;
            total += (v - bounds.upper()[idx]).max(0.0) + (bounds.lower()[idx] - v).max(0.0);
        }
    }
    total / n as f64
}

/// Mean control error over the state channels:
/// `(1/T) Σ_i Σ_ch (x_ch(t_i) − x_ref_ch(t_i))²`.
pub fn control_error(traj: &Trajectory, reference: &[DVector<f64>]) -> f64 {
    let n = traj.times.len();
    assert_eq!(reference.len(), n);
    let mut total = 0.0;
    for (x, r) in traj.states.iter().zip(reference) {
        total += (x - r).norm_squared();
    }
    total / n as f64
}
