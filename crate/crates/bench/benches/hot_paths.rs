use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::hint::black_box;

use cpevo_core::fwa::{run_fwa, FwaParams, OperatorSuite};
use cpevo_core::placement::{synthetic_problem, wa_wirelength, SyntheticSpec};
use cpevo_core::similarity::{jaccard, token_shingles};
use cpevo_core::tsp::{parse_tsplib, tour_length, LengthMode, Tour, TspInstance};
use cpevo_core::visual::count_crossings;

fn eil51() -> TspInstance {
    parse_tsplib(include_str!("../../core/data/eil51.tsp")).unwrap()
}

fn random_tour(n: usize, seed: u64) -> Tour {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        order.swap(i, j);
    }
    Tour::new(order)
}

fn bench_tour_length(c: &mut Criterion) {
    let inst = eil51();
    let tour = random_tour(51, 1);
    c.bench_function("tour_length/eil51/rounded", |b| {
        b.iter(|| tour_length(black_box(&inst), black_box(&tour), LengthMode::Rounded).unwrap())
    });
    c.bench_function("tour_length/eil51/floating", |b| {
        b.iter(|| tour_length(black_box(&inst), black_box(&tour), LengthMode::Floating).unwrap())
    });
}

fn bench_fwa_generation(c: &mut Criterion) {
    let inst = eil51();
    c.bench_function("run_fwa/eil51/2k_evals", |b| {
        b.iter_batched(
            || OperatorSuite::reference(&inst),
            |mut suite| {
                let params = FwaParams {
                    eval_budget: 2_000,
                    rng_seed: 3,
                    ..FwaParams::default()
                };
                run_fwa(black_box(&inst), &params, &mut suite).unwrap()
            },
            BatchSize::SmallInput,
        )
    });
}

fn bench_wa_gradient(c: &mut Criterion) {
    let prob = synthetic_problem(&SyntheticSpec {
        cells: 100,
        nets: 150,
        pins_min: 2,
        pins_max: 5,
        seed: 7,
    });
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let n = prob.num_cells();
    let coords: Vec<f64> = (0..2 * n)
        .map(|i| {
            let lim = if i < n { prob.region.0 } else { prob.region.1 };
            lim * rng.random::<f64>()
        })
        .collect();
    c.bench_function("wa_wirelength/100c150n/grad", |b| {
        b.iter(|| wa_wirelength(black_box(&prob), black_box(&coords), true).unwrap())
    });
}

fn bench_crossings(c: &mut Criterion) {
    let inst = eil51();
    let tour = random_tour(51, 5);
    c.bench_function("count_crossings/eil51", |b| {
        b.iter(|| count_crossings(black_box(&inst), black_box(&tour)).unwrap())
    });
}

fn bench_jaccard(c: &mut Criterion) {
    let a = token_shingles(cpevo_core::evolve::TSP_SEED_CODE, 3).unwrap();
    let b_set = token_shingles(
        &cpevo_core::evolve::TSP_SEED_CODE.replace("pop_size=8", "pop_size=6"),
        3,
    )
    .unwrap();
    c.bench_function("jaccard/seed_pair", |b| {
        b.iter(|| jaccard(black_box(&a), black_box(&b_set)).unwrap())
    });
}

criterion_group!(
    benches,
    bench_tour_length,
    bench_fwa_generation,
    bench_wa_gradient,
    bench_crossings,
    bench_jaccard
);
criterion_main!(benches);
