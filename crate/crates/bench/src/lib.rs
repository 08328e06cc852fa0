//! Shared fixtures for the pipeline benchmarks.

use nalgebra::{dmatrix, dvector, DVector};

use lodegp::kernels::{KernelSpec, LodeKernel};
use lodegp::lodegp::{build_dataset, Dataset};
use lodegp::mpc::ControlSystem;
use lodegp::thmc::BoxBounds;

pub fn spring_mass() -> ControlSystem {
    ControlSystem::new(dmatrix![0.0, 1.0; 1.0, -1.0], dmatrix![0.0; 2.5]).unwrap()
}

pub fn grid(points: usize) -> Vec<f64> {
    (0..points).map(|i| i as f64 * 0.02).collect()
}

pub fn matern_kernel() -> LodeKernel {
    let p = spring_mass().parametrization().unwrap();
    LodeKernel::new(p, vec![KernelSpec::matern(2, 1.0, 1.0)]).unwrap()
}

pub fn unit_box(dim: usize) -> BoxBounds {
    BoxBounds::new(
        DVector::from_element(dim, -1.0),
        DVector::from_element(dim, 1.0),
    )
    .unwrap()
}

pub fn dataset(points: usize) -> Dataset {
    let g = grid(points);
    let bounds = unit_box(3 * points);
    build_dataset(&dvector![0.8, 0.0, 0.0], &bounds, &g).unwrap()
}
