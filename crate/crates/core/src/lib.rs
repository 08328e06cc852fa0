//! Constrained model predictive control as Gaussian-process inference.
//!
//! The library builds multi-output GP priors whose realizations satisfy a
//! linear ODE by construction (via a Smith normal form parametrization of
//! the operator matrix), conditions them on initial state and soft
//! constraint-center data, reweights the posterior with a quadratic cost,
//! and pushes the probability mass inside state/input boxes with an exact
//! Hamiltonian Monte Carlo sampler. A shrinking-horizon control loop ties
//! the pieces together.

pub mod error;
pub mod kernels;
pub mod lodegp;
pub mod mpc;
pub mod polymat;
pub mod reweight;
pub mod thmc;

mod linalg;

pub use error::{Error, Result};
pub use kernels::{KernelKind, KernelSpec, LodeKernel};
pub use lodegp::{Dataset, GaussianBelief, TrainOptions};
pub use mpc::{ControlProblem, ControlSystem, ModelKind, ModelVariant, Trajectory};
pub use reweight::CostSpec;
pub use thmc::{BoxBounds, HmcOptions, SampleBatch};
