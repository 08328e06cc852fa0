//! Experiment configuration: TOML schema and conversion to a control
//! problem. Unknown keys are rejected.

use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use lodegp::mpc::{
    BoundsSpec, ChannelBounds, ControlProblem, ControlSystem, CostWeights, ModelVariant, ZRef,
};
use lodegp::{HmcOptions, TrainOptions};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub record_plans: bool,
    pub system: SystemConfig,
    pub initial: InitialConfig,
    pub grid: GridConfig,
    pub model: ModelConfig,
    pub hyperparameters: HyperConfig,
    pub cost: CostConfig,
    /// Keyed per channel: `x1..x{n}` for states, `u1..u{m}` for inputs.
    pub bounds: BTreeMap<String, ChannelBoundsConfig>,
    pub hmc: HmcConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metrics: Option<MetricsConfig>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub a: Vec<Vec<f64>>,
    pub b: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialConfig {
    pub x0: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u0: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub t0: f64,
    pub t_end: f64,
    pub points: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    /// `gpse`, `gpm`, `gpmo`, or the sampled forms `gpses`, `gpms`, `gpmos`.
    pub variant: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matern_order: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HyperConfig {
    pub signal_variance: f64,
    pub lengthscale: f64,
    #[serde(default = "default_train_iters")]
    pub train_max_iters: usize,
}

fn default_train_iters() -> usize {
    500
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostConfig {
    /// Diagonal cost weight per channel.
    pub s_diag: Vec<f64>,
    /// Reference per channel: `"zero"`, `"centers"`, a number, or
    /// `{ ramp = [from, to] }` over the experiment window.
    pub z_ref: Vec<ZRefConfig>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ZRefConfig {
    Mode(String),
    Value(f64),
    Ramp { ramp: [f64; 2] },
}

/// Either `lower`/`upper` constants or a `breakpoints` list of
/// `[time, lower, upper]` rows with linear interpolation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelBoundsConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upper: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub breakpoints: Option<Vec<[f64; 3]>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HmcConfig {
    pub n_samples: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trajectory_time: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub collision_cap_factor: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricsConfig {
    /// Constant reference per state channel for the control-error metric.
    pub x_ref: Vec<f64>,
}

/// Command-line overrides applied on top of a parsed config.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub model: Option<String>,
    pub sampled: bool,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let config: ExperimentConfig = toml::from_str(text).context("invalid config")?;
        Ok(config)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read {}", path.display()))?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).context("cannot serialize config")
    }

    pub fn apply_overrides(&mut self, ov: &Overrides) -> Result<()> {
        if let Some(model) = &ov.model {
            // a bare kind selects the unsampled variant; combine with
            // --sampled for the sampling step
            let parsed: ModelVariant = model
                .parse()
                .map_err(|e| anyhow::anyhow!("--model: {e}"))?;
            self.model.variant = parsed.label();
        }
        if ov.sampled {
            let v = self.variant()?;
            self.model.variant = ModelVariant::new(v.kind, true).label();
        }
        if let Some(seed) = ov.seed {
            self.seed = seed;
        }
        if let Some(out) = &ov.out {
            self.output_dir = Some(out.clone());
        }
        Ok(())
    }

    pub fn variant(&self) -> Result<ModelVariant> {
        self.model
            .variant
            .parse()
            .map_err(|e| anyhow::anyhow!("model.variant: {e}"))
    }

    pub fn train_options(&self) -> TrainOptions {
        TrainOptions {
            max_iters: self.hyperparameters.train_max_iters,
            ..TrainOptions::default()
        }
    }

    pub fn output_dir(&self) -> PathBuf {
        self.output_dir.clone().unwrap_or_else(|| {
            PathBuf::from("out").join(format!("{}_{}", self.name, self.model.variant))
        })
    }

    /// Builds the (untrained) control problem.
    pub fn to_problem(&self) -> Result<ControlProblem> {
        let a = matrix_from_rows(&self.system.a).context("system.a")?;
        let b = matrix_from_rows(&self.system.b).context("system.b")?;
        let system = ControlSystem::new(a, b)?;
        let (n_x, n_u) = (system.n_states(), system.n_inputs());
        let n_z = system.n_channels();

        if self.grid.points < 1 || !(self.grid.t_end > self.grid.t0) {
            bail!("grid must have at least one point and t_end > t0");
        }
        let n = self.grid.points;
        let grid: Vec<f64> = (0..n)
            .map(|i| {
                if n == 1 {
                    self.grid.t0
                } else {
                    self.grid.t0
                        + (self.grid.t_end - self.grid.t0) * i as f64 / (n - 1) as f64
                }
            })
            .collect();

        let x0 = DVector::from_column_slice(&self.initial.x0);
        let u0 = match &self.initial.u0 {
            Some(u) => DVector::from_column_slice(u),
            None => DVector::zeros(n_u),
        };

        let mut channels = Vec::with_capacity(n_z);
        for ch in 0..n_z {
            let key = if ch < n_x {
                format!("x{}", ch + 1)
            } else {
                format!("u{}", ch - n_x + 1)
            };
            let entry = self
                .bounds
                .get(&key)
                .with_context(|| format!("bounds.{key} missing"))?;
            channels.push(entry.to_channel_bounds(&key)?);
        }
        for key in self.bounds.keys() {
            let valid_state = key
                .strip_prefix('x')
                .and_then(|s| s.parse::<usize>().ok())
                .is_some_and(|i| i >= 1 && i <= n_x);
            let valid_input = key
                .strip_prefix('u')
                .and_then(|s| s.parse::<usize>().ok())
                .is_some_and(|i| i >= 1 && i <= n_u);
            if !valid_state && !valid_input {
                bail!("bounds.{key} does not name a channel of this system");
            }
        }

        if self.cost.s_diag.len() != n_z || self.cost.z_ref.len() != n_z {
            bail!("cost.s_diag and cost.z_ref must have one entry per channel ({n_z})");
        }
        let z_ref = self
            .cost
            .z_ref
            .iter()
            .map(ZRefConfig::to_z_ref)
            .collect::<Result<Vec<_>>>()?;
        let cost = CostWeights {
            s_diag: self.cost.s_diag.clone(),
            z_ref,
        };

        let variant = self.variant()?;
        let p = system.parametrization()?;
        let base = ControlProblem::initial_kernel_specs(
            variant.kind,
            &p,
            self.model.matern_order,
            self.hyperparameters.signal_variance,
            self.hyperparameters.lengthscale,
        )?;

        let mut hmc = HmcOptions::default();
        if let Some(t) = self.hmc.trajectory_time {
            hmc.trajectory_time = t;
        }
        if let Some(c) = self.hmc.collision_cap_factor {
            hmc.collision_cap_factor = c;
        }

        let x_ref = match &self.metrics {
            Some(m) => {
                if m.x_ref.len() != n_x {
                    bail!("metrics.x_ref must have one entry per state channel");
                }
                m.x_ref.clone()
            }
            None => vec![0.0; n_x],
        };

        let problem = ControlProblem {
            system,
            x0,
            u0,
            grid,
            bounds: BoundsSpec { channels },
            cost,
            variant,
            base,
            n_samples: self.hmc.n_samples,
            seed: self.seed,
            hmc,
            x_ref,
            record_plans: self.record_plans,
        };
        problem.validate()?;
        Ok(problem)
    }
}

impl ChannelBoundsConfig {
    fn to_channel_bounds(&self, key: &str) -> Result<ChannelBounds> {
        match (self.lower, self.upper, &self.breakpoints) {
            (Some(lower), Some(upper), None) => Ok(ChannelBounds::Constant { lower, upper }),
            (None, None, Some(bps)) if !bps.is_empty() => Ok(ChannelBounds::Piecewise {
                breakpoints: bps.iter().map(|&[t, l, u]| (t, l, u)).collect(),
            }),
            _ => bail!(
                "bounds.{key} needs either lower+upper or a nonempty breakpoints list"
            ),
        }
    }
}

impl ZRefConfig {
    fn to_z_ref(&self) -> Result<ZRef> {
        match self {
            ZRefConfig::Mode(m) => match m.as_str() {
                "zero" => Ok(ZRef::Zero),
                "centers" => Ok(ZRef::Centers),
                other => bail!("unknown z_ref mode '{other}' (expected zero|centers)"),
            },
            ZRefConfig::Value(v) => Ok(ZRef::Constant(*v)),
            ZRefConfig::Ramp { ramp } => Ok(ZRef::Ramp {
                from: ramp[0],
                to: ramp[1],
            }),
        }
    }
}

fn matrix_from_rows(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    if rows.is_empty() || rows[0].is_empty() {
        bail!("matrix must be nonempty");
    }
    let cols = rows[0].len();
    if rows.iter().any(|r| r.len() != cols) {
        bail!("matrix rows have unequal lengths");
    }
    Ok(DMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j]))
}
