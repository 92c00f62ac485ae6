//! Helpers shared by the replay-fixture and acceptance test targets.
#![allow(dead_code)]

use std::path::{Path, PathBuf};

use cpevo_core::evolve::{BackendKind, RunConfig, TaskKind, TSP_SEED_CODE};

/// Number of response files in the bundled replay fixture.
pub const RESPONSES: usize = 440;

pub fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

/// The run configuration every consumer of the bundled fixture must use;
/// the golden pool is only reproducible under these exact settings.
pub fn fixture_config(run_dir: PathBuf) -> RunConfig {
    RunConfig {
        task: TaskKind::Tsp,
        instance: Some(fixtures_dir().join("replay26.tsp")),
        iterations: 200,
        pool_capacity: 5,
        backend: BackendKind::Replay,
        replay_dir: Some(fixtures_dir().join("replay_tsp_200")),
        rng_seed: 42,
        tsp_eval_budget: 600,
        eval_runs: 1,
        tsp_timeout_secs: 30.0,
        run_dir,
        ..RunConfig::default()
    }
}

/// One deterministic response text per index: mostly parameter variants of
/// the seed algorithm, with a sprinkle of broken replies to exercise the
/// retry path.
pub fn response_text(i: usize) -> String {
    if i % 29 == 7 {
        // Prose without a fence: extracted verbatim, dies in the sandbox.
        return "Sorry, here is a sketch of the idea instead of code.".to_string();
    }
    if i % 41 == 13 {
        // Empty fenced block: rejected before the sandbox.
        return "```python\n\n```".to_string();
    }
    let pop = 5 + (i * 7) % 5; // 5..9
    let sparks = 28 + (i * 11) % 17; // 28..44
    let guided = [0.7, 0.75, 0.8, 0.85, 0.9][(i * 3) % 5];
    let neighbors = 8 + (i * 5) % 7; // 8..14
    let body = TSP_SEED_CODE
        .replace("pop_size=8", &format!("pop_size={pop}"))
        .replace("spark_budget=40", &format!("spark_budget={sparks}"))
        .replace(
            "self.rng.random() < 0.8",
            &format!("self.rng.random() < {guided}"),
        )
        .replace(
            "self._neighbor_table(12)",
            &format!("self._neighbor_table({neighbors})"),
        );
    format!("Here is the improved algorithm:\n```python\n{body}\n```\n")
}
