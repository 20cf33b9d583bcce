use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use fracdiff_core::correlation::count_displacements;
use fracdiff_core::diffraction::psf_trials;
use fracdiff_core::gaussian::lattice_sum;
use fracdiff_core::strings::ratio;
use fracdiff_core::{GaussianAtom, IdealCrystal, LatticeBasis, SolverConfig, StringSpec};
use rayon::ThreadPool;

fn single_thread() -> ThreadPool {
    rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap()
}

fn example_crystal() -> IdealCrystal {
    let spec = StringSpec::validate(ratio(8, 3), vec![ratio(1, 2), ratio(1, 8)], vec![ratio(3, 8)], false).unwrap();
    spec.dimension_crystal(0.0, &SolverConfig::default()).unwrap().crystal
}

fn compare(c: &mut Criterion, name: &str, work: impl Fn() + Sync) {
    let single = single_thread();
    let mut group = c.benchmark_group(name);
    group.sample_size(10);
    group.bench_function("rayon", |b| b.iter(&work));
    group.bench_function("one_thread", |b| b.iter(|| single.install(&work)));
    group.finish();
}

fn counting(c: &mut Criterion) {
    let crystal = example_crystal();
    compare(c, "count_displacements", || {
        black_box(count_displacements(&crystal, 2000.0).unwrap());
    });
}

fn lattice_sums(c: &mut Criterion) {
    let basis = LatticeBasis::identity(3);
    let atom = GaussianAtom::isotropic(vec![0.1, 0.2, 0.3], 0.05);
    compare(c, "lattice_sum", || {
        black_box(lattice_sum(&basis, &atom, &[0.0; 3], 1e-12).unwrap());
    });
}

fn psf(c: &mut Criterion) {
    compare(c, "psf_trials", || {
        black_box(psf_trials(10, 7, 1e-13).unwrap());
    });
}

criterion_group!(benches, counting, lattice_sums, psf);
criterion_main!(benches);
