use criterion::{criterion_group, criterion_main, BatchSize, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use distopf::check::{random_cone_box, random_disk, random_x_update_qp};
use distopf::harness::Engine;
use distopf::kernels::{solve_cone_box_qp, solve_disk_qp, solve_eq_qp};
use distopf::{gen_fat_tree, gen_line, LoadProfile, SolveConfig};

fn eq_qp(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve_eq_qp");
    for children in [0usize, 2, 5, 10] {
        let mut rng = ChaCha8Rng::seed_from_u64(children as u64);
        let qps: Vec<_> = (0..64).map(|_| random_x_update_qp(&mut rng, children)).collect();
        group.bench_with_input(BenchmarkId::from_parameter(children), &qps, |b, qps| {
            let mut i = 0;
            b.iter(|| {
                i = (i + 1) % qps.len();
                solve_eq_qp(&qps[i])
            })
        });
    }
    group.finish();
}

fn cone_box(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let qs: Vec<_> = (0..256).map(|_| random_cone_box(&mut rng)).collect();
    c.bench_function("solve_cone_box_qp", |b| {
        let mut i = 0;
        b.iter(|| {
            i = (i + 1) % qs.len();
            solve_cone_box_qp(&qs[i])
        })
    });
}

fn disk(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let ds: Vec<_> = (0..256).map(|_| random_disk(&mut rng)).collect();
    c.bench_function("solve_disk_qp", |b| {
        let mut i = 0;
        b.iter(|| {
            i = (i + 1) % ds.len();
            solve_disk_qp(&ds[i])
        })
    });
}

fn round(c: &mut Criterion) {
    let mut group = c.benchmark_group("round");
    let profile = LoadProfile::default();
    for (name, net) in [
        ("line-50", gen_line(50, &profile).unwrap()),
        ("fattree-50", gen_fat_tree(50, &profile).unwrap()),
    ] {
        group.bench_function(name, |b| {
            b.iter_batched(
                || {
                    Engine::new(
                        net.clone(),
                        SolveConfig {
                            parallelism: 1,
                            ..SolveConfig::default()
                        },
                    )
                    .unwrap()
                },
                |mut e| e.round().unwrap(),
                BatchSize::SmallInput,
            )
        });
    }
    group.finish();
}

criterion_group!(benches, eq_qp, cone_box, disk, round);
criterion_main!(benches);
