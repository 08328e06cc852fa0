use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use lodegp::lodegp::posterior;
use lodegp::mpc::simulate_plant;
use lodegp::polymat::smith_normal_form;
use lodegp::thmc::{clamp_to_box, sample_truncated};
use lodegp_bench::{dataset, grid, matern_kernel, spring_mass, unit_box};
use nalgebra::dvector;

fn bench_gram(c: &mut Criterion) {
    let kernel = matern_kernel();
    let g = grid(101);
    c.bench_function("gram_303", |b| {
        b.iter(|| black_box(kernel.gram(&g, &g)))
    });
}

fn bench_posterior(c: &mut Criterion) {
    let kernel = matern_kernel();
    let g = grid(101);
    let data = dataset(101);
    c.bench_function("posterior_303", |b| {
        b.iter(|| black_box(posterior(&kernel, &data, &g).unwrap()))
    });
}

fn bench_hmc(c: &mut Criterion) {
    let kernel = matern_kernel();
    let g = grid(101);
    let data = dataset(101);
    let belief = posterior(&kernel, &data, &g).unwrap();
    let bounds = unit_box(belief.dim());
    let init = clamp_to_box(&belief.mean, &bounds);
    c.bench_function("hmc_200_samples_dim_303", |b| {
        b.iter(|| black_box(sample_truncated(&belief, &bounds, &init, 200, 42).unwrap()))
    });
}

fn bench_snf(c: &mut Criterion) {
    let h = spring_mass().operator_matrix().unwrap();
    c.bench_function("snf_spring_mass", |b| {
        b.iter(|| black_box(smith_normal_form(&h).unwrap()))
    });
}

fn bench_plant_step(c: &mut Criterion) {
    let sys = spring_mass();
    let x = dvector![0.8, 0.0];
    let u = dvector![-0.4];
    c.bench_function("zoh_step", |b| {
        b.iter(|| black_box(simulate_plant(&sys, &x, &u, 0.02)))
    });
}

criterion_group! {
    name = pipeline;
    config = Criterion::default().sample_size(10);
    targets = bench_gram, bench_posterior, bench_hmc, bench_snf, bench_plant_step
}
criterion_main!(pipeline);
