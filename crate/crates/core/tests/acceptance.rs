//! Acceptance suite: one test per criterion, every tolerance pinned in
//! code. Run with `cargo test -p cpevo-core --test acceptance -- --nocapture`
//! to see one line per criterion.

mod common;

use std::collections::HashSet;
use std::path::Path;
use std::time::Duration;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use cpevo_core::evolve::{evolve, BackendKind, HistoryEvent, RunConfig, TaskKind};
use cpevo_core::fwa::{run_fwa, FwaParams, OperatorSuite};
use cpevo_core::placement::{
    bb_base_step, density_penalty, nesterov_iterate, run_placement, synthetic_problem,
    theta_update, wa_wirelength, weighted_hpwl, BaseStepHook, Evaluator, HookError, ObjectiveFn,
    OptimizerState, PlacementError, PlacementProblem, RunOptions, StepHook, SyntheticSpec,
} ;
use cpevo_core::sandbox::{run_step_candidate, run_tsp_candidate, SandboxConfig, SandboxOutcome,
    StepJob, TspJob};
use cpevo_core::similarity::{similarity_matrix, token_shingles, welch_t_test};
use cpevo_core::tsp::{
    brute_force_optimum, parse_best_known, parse_tsplib, tour_length, tsplib_distance,
    LengthMode, Tour, TspInstance,
};
use cpevo_core::visual::count_crossings;

fn data(file: &str) -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(file);
    std::fs::read_to_string(path).unwrap()
}

fn pass(n: u32, what: &str) {
    println!("acceptance criterion {n:2}: PASS - {what}");
}

#[test]
fn criterion_01_tsplib_conformance() {
    let inst = TspInstance::new("probe", vec![(0.0, 0.0), (3.0, 4.0), (1.0, 1.0)]);
    assert_eq!(tsplib_distance(&inst, 0, 1).unwrap(), 5);
    assert_eq!(tsplib_distance(&inst, 0, 2).unwrap(), 1);
    let eil51 = parse_tsplib(&data("eil51.tsp")).unwrap();
    assert_eq!(eil51.dimension, 51);
    assert_eq!(eil51.coords.len(), 51);
    pass(1, "EUC_2D rounding and eil51 ingestion are exact");
}

#[test]
fn criterion_02_oracle_equivalence() {
    let mut hits = 0;
    for seed in 0..50u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let coords: Vec<(f64, f64)> = (0..8)
            .map(|_| (rng.random::<f64>() * 100.0, rng.random::<f64>() * 100.0))
            .collect();
        let inst = TspInstance::new(format!("rand8-{seed}"), coords);
        let (oracle_tour, oracle_len) = brute_force_optimum(&inst, LengthMode::Rounded).unwrap();
        // The oracle's reported value must match a direct evaluation.
        assert_eq!(
            tour_length(&inst, &oracle_tour, LengthMode::Rounded).unwrap(),
            oracle_len
        );
        let params = FwaParams {
            eval_budget: 5_000,
            rng_seed: seed,
            mode: LengthMode::Rounded,
            ..FwaParams::default()
        };
        let run = run_fwa(&inst, &params, &mut OperatorSuite::reference(&inst)).unwrap();
        assert!(run.best_length >= oracle_len, "search cannot beat the oracle");
        if run.best_length == oracle_len {
            hits += 1;
        }
    }
    assert!(hits >= 45, "only {hits}/50 runs reached the optimum");
    pass(2, "reference search matched the brute-force oracle on 45+/50 seeds");
}

#[test]
fn criterion_03_gap_table_on_eil51() {
    let inst = parse_tsplib(&data("eil51.tsp")).unwrap();
    let registry = parse_best_known(&data("best_known.txt")).unwrap();
    assert_eq!(registry["eil51"], 426.0);
    let rows =
        cpevo_core::report::gap_table(&[inst], &registry, 200_000, 3, 0).unwrap();
    let row = &rows[0];
    assert_eq!(row.best_known, Some(426.0));
    let mean_gap = row.mean_gap_pct.unwrap();
    let best_gap = row.best_gap_pct.unwrap();
    assert!(
        mean_gap <= 5.0,
        "mean gap {mean_gap:.2}% exceeds 5% at 200k evaluations"
    );
    assert!(best_gap <= mean_gap + 1e-12);
    let csv = cpevo_core::report::gap_table_csv(&rows);
    assert!(csv.lines().count() == 2 && csv.contains("eil51,51,200000,3,426,"));
    pass(3, "eil51 gap table emitted; reference gap within 5%");
}

/// Independent all-pairs oracle: solves each segment pair parametrically
/// and counts strict interior intersections (collinear overlaps count 1).
fn crossings_oracle(inst: &TspInstance, tour: &Tour) -> u64 {
    let n = tour.order.len();
    let seg = |k: usize| {
        (
            inst.coords[tour.order[k]],
            inst.coords[tour.order[(k + 1) % n]],
        )
    };
    let mut count = 0;
    for i in 0..n {
        for j in i + 1..n {
            if j == i + 1 || (i == 0 && j == n - 1) {
                continue;
            }
            let (p, p2) = seg(i);
            let (q, q2) = seg(j);
            let r = (p2.0 - p.0, p2.1 - p.1);
            let s = (q2.0 - q.0, q2.1 - q.1);
            let denom = r.0 * s.1 - r.1 * s.0;
            let qmp = (q.0 - p.0, q.1 - p.1);
            if denom != 0.0 {
                let t = (qmp.0 * s.1 - qmp.1 * s.0) / denom;
                let u = (qmp.0 * r.1 - qmp.1 * r.0) / denom;
                if t > 0.0 && t < 1.0 && u > 0.0 && u < 1.0 {
                    count += 1;
                }
            } else if qmp.0 * r.1 - qmp.1 * r.0 == 0.0 {
                // Collinear: project onto the dominant axis and look for a
                // positive-length overlap.
                let proj = |pt: (f64, f64)| {
                    if r.0.abs() >= r.1.abs() {
                        pt.0
                    } else {
                        pt.1
                    }
                };
                let (a0, a1) = (proj(p).min(proj(p2)), proj(p).max(proj(p2)));
                let (b0, b1) = (proj(q).min(proj(q2)), proj(q).max(proj(q2)));
                if a0.max(b0) < a1.min(b1) {
                    count += 1;
                }
            }
        }
    }
    count
}

#[test]
fn criterion_04_crossing_geometry() {
    let square = TspInstance::new(
        "square",
        vec![(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)],
    );
    assert_eq!(
        count_crossings(&square, &Tour::new(vec![0, 1, 2, 3])).unwrap(),
        0
    );
    assert_eq!(
        count_crossings(&square, &Tour::new(vec![0, 2, 1, 3])).unwrap(),
        1
    );
    let pentagon: Vec<(f64, f64)> = (0..5)
        .map(|i| {
            let a = 2.0 * std::f64::consts::PI * i as f64 / 5.0;
            (a.cos(), a.sin())
        })
        .collect();
    let pent = TspInstance::new("pent", pentagon);
    assert_eq!(
        count_crossings(&pent, &Tour::new(vec![0, 2, 4, 1, 3])).unwrap(),
        5
    );

    let mut rng = ChaCha8Rng::seed_from_u64(40);
    for case in 0..100 {
        let n = rng.random_range(4..=50usize);
        let coords: Vec<(f64, f64)> = (0..n)
            .map(|_| (rng.random::<f64>() * 1000.0, rng.random::<f64>() * 1000.0))
            .collect();
        let inst = TspInstance::new(format!("geom{case}"), coords);
        let mut order: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = rng.random_range(0..=i);
            order.swap(i, j);
        }
        let tour = Tour::new(order);
        assert_eq!(
            count_crossings(&inst, &tour).unwrap(),
            crossings_oracle(&inst, &tour),
            "disagreement on case {case} (n={n})"
        );
    }
    pass(4, "crossing counts exact on fixtures and 100 random oracle cases");
}

#[test]
fn criterion_05_hexbin_partition() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for case in 0..100 {
        let n = rng.random_range(3..=60usize);
        let coords: Vec<(f64, f64)> = (0..n)
            .map(|_| (rng.random::<f64>() * 500.0, rng.random::<f64>() * 500.0))
            .collect();
        let inst = TspInstance::new(format!("hex{case}"), coords);
        let mut order: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = rng.random_range(0..=i);
            order.swap(i, j);
        }
        let hex_size = 1.0 + rng.random::<f64>() * 80.0;
        let bins =
            cpevo_core::visual::hex_bin_counts(&inst, &Tour::new(order), hex_size).unwrap();
        let total: u64 = bins.iter().map(|b| b.count).sum();
        assert_eq!(total, n as u64, "partition lost midpoints on case {case}");
        let keys: HashSet<(i64, i64)> = bins.iter().map(|b| (b.q, b.r)).collect();
        assert_eq!(keys.len(), bins.len());
    }
    pass(5, "hexbin counts always sum to n over 100 random instances");
}

fn central_diff(
    f: &dyn Fn(&[f64]) -> f64,
    coords: &[f64],
    h: f64,
) -> Vec<f64> {
    let mut grad = vec![0.0; coords.len()];
    let mut work = coords.to_vec();
    for i in 0..coords.len() {
        work[i] = coords[i] + h;
        let hi = f(&work);
        work[i] = coords[i] - h;
        let lo = f(&work);
        work[i] = coords[i];
        grad[i] = (hi - lo) / (2.0 * h);
    }
    grad
}

fn max_rel_err(analytic: &[f64], numeric: &[f64]) -> f64 {
    let scale = numeric
        .iter()
        .map(|g| g.abs())
        .fold(0.0f64, f64::max)
        .max(1e-9);
    analytic
        .iter()
        .zip(numeric)
        .map(|(a, b)| (a - b).abs() / (b.abs().max(1e-3 * scale)))
        .fold(0.0, f64::max)
}

#[test]
fn criterion_06_wa_model() {
    // Fixed random 5-pin net on two cells.
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let pins: Vec<cpevo_core::placement::Pin> = (0..5)
        .map(|i| cpevo_core::placement::Pin {
            cell: i % 2,
            dx: rng.random::<f64>() * 4.0 - 2.0,
            dy: rng.random::<f64>() * 4.0 - 2.0,
        })
        .collect();
    let mut prob = PlacementProblem {
        cells: vec![(1.0, 1.0), (1.0, 1.0)],
        region: (100.0, 100.0),
        nets: vec![pins],
        net_weights: vec![1.0],
        gamma: 1.0,
        lambda: 0.0,
        bin_size: 10.0,
    };
    let coords = vec![20.0, 70.0, 30.0, 60.0];
    let hpwl = weighted_hpwl(&prob, &coords).unwrap();

    // |WA - HPWL| strictly decreases as gamma halves from 1.0 to 1/64.
    let mut prev_err = f64::INFINITY;
    let mut gamma = 1.0;
    while gamma >= 1.0 / 64.0 - 1e-12 {
        prob.gamma = gamma;
        let (wa, _) = wa_wirelength(&prob, &coords, false).unwrap();
        let err = (wa - hpwl).abs();
        assert!(
            err < prev_err,
            "error did not shrink at gamma={gamma}: {err} vs {prev_err}"
        );
        prev_err = err;
        gamma /= 2.0;
    }

    // Relative error under 0.5% at gamma = 1e-3 * span.
    let span = 50.0_f64; // x span of the two cells above
    prob.gamma = 1e-3 * span;
    let (wa, _) = wa_wirelength(&prob, &coords, false).unwrap();
    assert!(
        ((wa - hpwl) / hpwl).abs() < 0.005,
        "relative error {} at gamma=1e-3*span",
        ((wa - hpwl) / hpwl).abs()
    );

    // Analytic gradients vs central finite differences at 20 random
    // non-degenerate points, both for the WA wirelength and the density
    // penalty.
    let grad_prob = synthetic_problem(&SyntheticSpec {
        cells: 6,
        nets: 8,
        pins_min: 2,
        pins_max: 5,
        seed: 66,
    });
    let n = grad_prob.num_cells();
    let mut worst_wa = 0.0f64;
    let mut worst_dp = 0.0f64;
    for point in 0..20 {
        let mut rng = ChaCha8Rng::seed_from_u64(600 + point);
        let coords: Vec<f64> = (0..2 * n)
            .map(|i| {
                let lim = if i < n {
                    grad_prob.region.0
                } else {
                    grad_prob.region.1
                };
                0.1 * lim + 0.8 * lim * rng.random::<f64>()
            })
            .collect();
        let h = 1e-5 * grad_prob.region.0;

        let (_, wa_grad) = wa_wirelength(&grad_prob, &coords, true).unwrap();
        let wa_fd = central_diff(
            &|c: &[f64]| wa_wirelength(&grad_prob, c, false).unwrap().0,
            &coords,
            h,
        );
        worst_wa = worst_wa.max(max_rel_err(&wa_grad.unwrap(), &wa_fd));

        let (dp_val, dp_grad) = density_penalty(&grad_prob, &coords, true).unwrap();
        if dp_val > 0.0 {
            let dp_fd = central_diff(
                &|c: &[f64]| density_penalty(&grad_prob, c, false).unwrap().0,
                &coords,
                h,
            );
            worst_dp = worst_dp.max(max_rel_err(&dp_grad.unwrap(), &dp_fd));
        }
    }
    assert!(worst_wa < 1e-4, "WA gradient mismatch: {worst_wa}");
    assert!(worst_dp < 1e-4, "density gradient mismatch: {worst_dp}");
    assert!(worst_dp > 0.0, "density cases never exercised the penalty");
    pass(6, "WA tracks HPWL as gamma shrinks; analytic gradients match FD");
}

#[test]
fn criterion_07_bb_nesterov() {
    assert_eq!(bb_base_step(&[1.0, 0.0], &[2.0, 0.0], 1.0).unwrap(), 0.5);
    // Negative curvature: short step rejected, min(lip, prev) returned.
    assert_eq!(bb_base_step(&[1.0, 0.0], &[-1.0, 0.0], 0.3).unwrap(), 0.3);
    assert_eq!(bb_base_step(&[3.0, 0.0], &[-6.0, 0.0], 9.0).unwrap(), 0.5);

    let phi = (1.0 + 5.0_f64.sqrt()) / 2.0;
    assert!((theta_update(1.0).unwrap() - phi).abs() < 1e-12);
    let mut theta: f64 = 1.0;
    for k in 1..=100u32 {
        theta = theta_update(theta).unwrap();
        assert!(
            theta >= (k as f64 + 1.0) / 2.0,
            "theta_{k} = {theta} below (k+1)/2"
        );
    }

    struct Quadratic;
    impl ObjectiveFn for Quadratic {
        fn dim(&self) -> usize {
            3
        }
        fn value(&self, c: &[f64]) -> Result<f64, PlacementError> {
            Ok(0.5 * c.iter().map(|x| x * x).sum::<f64>())
        }
        fn value_grad(&self, c: &[f64]) -> Result<(f64, Vec<f64>), PlacementError> {
            Ok((self.value(c)?, c.to_vec()))
        }
    }
    let obj = Quadratic;
    let mut state = OptimizerState::initial(&obj, vec![4.0, -3.0, 2.5]).unwrap();
    let mut reached = false;
    for _ in 0..5 {
        state = nesterov_iterate(&obj, &state, &mut BaseStepHook, 8).unwrap();
        let norm = state.v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 1e-10 {
            reached = true;
            break;
        }
    }
    assert!(reached, "quadratic not solved within 5 iterations");
    pass(7, "BB step arithmetic, theta growth and quadratic convergence hold");
}

#[test]
fn criterion_08_placement_end_to_end() {
    let prob = synthetic_problem(&SyntheticSpec {
        cells: 100,
        nets: 150,
        pins_min: 2,
        pins_max: 5,
        seed: 7,
    });
    let opts = RunOptions {
        iters: 300,
        rng_seed: 8,
        eval_cap: 8,
    };

    /// Wraps the base hook and asserts every iterate keeps every cell
    /// inside the region.
    struct InRegionCheck<'a> {
        prob: &'a PlacementProblem,
        seen: usize,
    }
    impl StepHook for InRegionCheck<'_> {
        fn step(
            &mut self,
            _k: usize,
            v: &[f64],
            _g: &[f64],
            _e: &mut Evaluator<'_>,
            base: f64,
        ) -> Result<f64, HookError> {
            let n = self.prob.num_cells();
            for (i, (w, h)) in self.prob.cells.iter().enumerate() {
                assert!(
                    v[i] >= w / 2.0 - 1e-9 && v[i] <= self.prob.region.0 - w / 2.0 + 1e-9,
                    "cell {i} x out of region"
                );
                assert!(
                    v[n + i] >= h / 2.0 - 1e-9
                        && v[n + i] <= self.prob.region.1 - h / 2.0 + 1e-9,
                    "cell {i} y out of region"
                );
            }
            self.seen += 1;
            Ok(base)
        }
    }

    let mut hook = InRegionCheck {
        prob: &prob,
        seen: 0,
    };
    let run = run_placement(&prob, &opts, &mut hook).unwrap();
    assert_eq!(hook.seen, 300);
    assert_eq!(run.trace.len(), 300);
    let final_whpwl = run.trace.last().unwrap().whpwl;
    assert_eq!(final_whpwl, weighted_hpwl(&prob, &run.final_coords).unwrap());
    assert!(
        final_whpwl <= 0.6 * run.initial_whpwl,
        "final {} vs initial {}",
        final_whpwl,
        run.initial_whpwl
    );
    // Final coords respect the region too.
    let n = prob.num_cells();
    for (i, (w, h)) in prob.cells.iter().enumerate() {
        assert!(run.final_coords[i] >= w / 2.0 && run.final_coords[i] <= prob.region.0 - w / 2.0);
        assert!(
            run.final_coords[n + i] >= h / 2.0
                && run.final_coords[n + i] <= prob.region.1 - h / 2.0
        );
    }

    let again = run_placement(&prob, &opts, &mut BaseStepHook).unwrap();
    assert_eq!(run.final_coords, again.final_coords, "coords not bit-identical");
    assert_eq!(run.trace.len(), again.trace.len());
    for (a, b) in run.trace.iter().zip(&again.trace) {
        assert_eq!(a.whpwl, b.whpwl);
        assert_eq!(a.objective, b.objective);
        assert_eq!(a.step, b.step);
    }
    pass(8, "placement run cuts wHPWL by 40%+, stays in-region, replays bit-identically");
}

#[test]
fn criterion_09_orchestrator_loop() {
    // Null backend: constant best, bounded pool.
    let dir = tempfile::tempdir().unwrap();
    let instance_path = dir.path().join("hex6.tsp");
    std::fs::write(
        &instance_path,
        "NAME : hex6\nTYPE : TSP\nDIMENSION : 6\nEDGE_WEIGHT_TYPE : EUC_2D\nNODE_COORD_SECTION\n1 0 0\n2 40 5\n3 80 0\n4 85 40\n5 40 70\n6 0 45\nEOF\n",
    )
    .unwrap();
    let null_config = RunConfig {
        task: TaskKind::Tsp,
        instance: Some(instance_path.clone()),
        iterations: 10,
        backend: BackendKind::Null,
        rng_seed: 11,
        run_dir: dir.path().join("null_run"),
        tsp_eval_budget: 200,
        eval_runs: 1,
        tsp_timeout_secs: 30.0,
        ..RunConfig::default()
    };
    let outcome = evolve(&null_config).unwrap();
    let seed_score = outcome
        .history
        .iter()
        .find_map(|e| match e {
            HistoryEvent::Seed { score, .. } => Some(*score),
            _ => None,
        })
        .unwrap();
    for event in &outcome.history {
        if let HistoryEvent::Iteration {
            pool_best,
            pool_size,
            ..
        } = event
        {
            assert_eq!(*pool_best, seed_score);
            assert!(*pool_size <= 5);
        }
    }

    // Bundled replay fixture: 200 iterations, best non-increasing, final
    // pool byte-identical to the frozen golden file.
    let replay_config = common::fixture_config(dir.path().join("replay_run"));
    let outcome = evolve(&replay_config).unwrap();
    let mut last_best = f64::INFINITY;
    let mut iterations_seen = 0;
    for event in &outcome.history {
        if let HistoryEvent::Iteration {
            iteration,
            pool_best,
            ..
        } = event
        {
            assert!(
                *pool_best <= last_best,
                "best regressed at iteration {iteration}"
            );
            last_best = *pool_best;
            iterations_seen += 1;
        }
    }
    assert_eq!(iterations_seen, 200);
    let fresh = std::fs::read_to_string(replay_config.run_dir.join("pool.json")).unwrap();
    let golden =
        std::fs::read_to_string(common::fixtures_dir().join("golden_pool.json")).unwrap();
    assert_eq!(fresh, golden, "final pool differs from the frozen golden");

    // All-invalid replay: five attempts per operation, pool stays at seeds.
    let invalid_dir = dir.path().join("invalid_replay");
    std::fs::create_dir_all(&invalid_dir).unwrap();
    for i in 0..40 {
        std::fs::write(
            invalid_dir.join(format!("{i:04}.txt")),
            "```python\nraise SystemExit(3)\n```",
        )
        .unwrap();
    }
    let invalid_config = RunConfig {
        backend: BackendKind::Replay,
        replay_dir: Some(invalid_dir),
        iterations: 2,
        run_dir: dir.path().join("invalid_run"),
        instance: Some(instance_path),
        task: TaskKind::Tsp,
        rng_seed: 11,
        tsp_eval_budget: 200,
        eval_runs: 1,
        tsp_timeout_secs: 30.0,
        ..RunConfig::default()
    };
    let outcome = evolve(&invalid_config).unwrap();
    assert_eq!(outcome.pool.len(), 1);
    assert_eq!(outcome.pool.best().unwrap().id, "seed0");
    for event in &outcome.history {
        if let HistoryEvent::Operation {
            attempts_used,
            result,
            ..
        } = event
        {
            if result == "failed" {
                assert_eq!(*attempts_used, 5);
            }
        }
    }
    pass(9, "null, replay-golden and all-invalid orchestrator runs behave");
}

#[test]
fn criterion_10_sandbox() {
    let cfg = SandboxConfig::default();

    // Step echo candidate reproduces the default hook bit-exactly.
    let prob = synthetic_problem(&SyntheticSpec {
        cells: 30,
        nets: 45,
        pins_min: 2,
        pins_max: 5,
        seed: 3,
    });
    let echo = r#"
import json, sys
for line in sys.stdin:
    req = json.loads(line)
    sys.stdout.write(json.dumps({"step": req["base_step"]}) + "\n")
    sys.stdout.flush()
"#;
    let job = StepJob {
        prob: &prob,
        iters: 60,
        timeout_per_iter: Duration::from_secs(5),
        eval_cap: 8,
        rng_seed: 17,
    };
    let run = run_step_candidate(echo, &job, &cfg).unwrap();
    let reference = run_placement(
        &prob,
        &RunOptions {
            iters: 60,
            rng_seed: 17,
            eval_cap: 8,
        },
        &mut BaseStepHook,
    )
    .unwrap();
    let expected = weighted_hpwl(&prob, &reference.final_coords).unwrap();
    assert_eq!(
        run.verdict.outcome,
        SandboxOutcome::Scored(expected),
        "echo candidate diverged from the in-process hook"
    );
    assert_eq!(run.final_coords.unwrap(), reference.final_coords);

    // Sleeping candidate: Timeout, child gone.
    let square = TspInstance::new(
        "square",
        vec![(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)],
    );
    let sleeper = r#"
import os, sys, time
sys.stderr.write(str(os.getpid()) + "\n")
sys.stderr.flush()
time.sleep(600)
"#;
    let job = TspJob {
        inst: &square,
        eval_budget: 10,
        seed: 0,
        timeout: Duration::from_millis(500),
    };
    let started = std::time::Instant::now();
    let run = run_tsp_candidate(sleeper, &job, &cfg).unwrap();
    assert_eq!(run.verdict.outcome, SandboxOutcome::Timeout);
    assert!(started.elapsed() < Duration::from_millis(500) + Duration::from_secs(2));
    let pid: i32 = run.verdict.stderr_excerpt.trim().parse().unwrap();
    assert_ne!(unsafe { libc::kill(pid, 0) }, 0, "child {pid} still alive");

    // Malformed JSON: ProtocolError.
    let garbled = r#"
import sys
sys.stdin.readline()
print("{ not json")
sys.stdout.flush()
"#;
    let job = TspJob {
        inst: &square,
        eval_budget: 10,
        seed: 0,
        timeout: Duration::from_secs(10),
    };
    let run = run_tsp_candidate(garbled, &job, &cfg).unwrap();
    assert_eq!(run.verdict.outcome, SandboxOutcome::ProtocolError);

    // eval_cap + 1 requests: EvalCapExceeded.
    let greedy = r#"
import json, sys
line = sys.stdin.readline()
req = json.loads(line)
for _ in range(9):
    sys.stdout.write(json.dumps({"eval": req["v"]}) + "\n")
    sys.stdout.flush()
    json.loads(sys.stdin.readline())
"#;
    let job = StepJob {
        prob: &prob,
        iters: 5,
        timeout_per_iter: Duration::from_secs(5),
        eval_cap: 8,
        rng_seed: 17,
    };
    let run = run_step_candidate(greedy, &job, &cfg).unwrap();
    assert_eq!(run.verdict.outcome, SandboxOutcome::EvalCapExceeded);
    pass(10, "sandbox verdicts: bit-exact echo, timeout kill, protocol and cap guards");
}

#[test]
fn criterion_11_similarity() {
    let candidates: Vec<(String, String)> = (0..16)
        .map(|i| (format!("cand{i:02}"), common::response_text(i * 2 + 1)))
        .collect();
    let matrix = similarity_matrix(&candidates, 3).unwrap();
    assert_eq!(matrix.ids.len(), 16);
    for i in 0..16 {
        assert_eq!(matrix.values[i][i], 1.0);
        for j in 0..16 {
            assert_eq!(matrix.values[i][j], matrix.values[j][i]);
        }
    }

    // Renaming invariance on a fixture pair.
    let original = "def walk(grid, start):\n    frontier = [start]\n    seen = set()\n    while frontier:\n        node = frontier.pop()\n        if node in seen:\n            continue\n        seen.add(node)\n        frontier.extend(grid[node])\n    return seen\n";
    let renamed = "def explore(graph, root):\n    stack = [root]\n    visited = set()\n    while stack:\n        v = stack.pop()\n        if v in visited:\n            continue\n        visited.add(v)\n        stack.extend(graph[v])\n    return visited\n";
    let a = token_shingles(original, 3).unwrap();
    let b = token_shingles(renamed, 3).unwrap();
    assert_eq!(cpevo_core::similarity::jaccard(&a, &b).unwrap(), 1.0);

    let sample = vec![0.81, 0.84, 0.88, 0.79, 0.86];
    let result = welch_t_test(&sample, &sample).unwrap();
    assert_eq!(result.t, 0.0);
    assert!((result.p - 1.0).abs() < 1e-12);
    pass(11, "similarity matrix, renaming invariance and Welch test hold");
}
