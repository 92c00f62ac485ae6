//! The bundled 200-iteration replay fixture: generation (ignored, run once
//! to refresh the committed files) and drift checks. The byte-for-byte
//! golden comparison lives in the acceptance suite.

mod common;

use common::{fixture_config, fixtures_dir, response_text, RESPONSES};
use cpevo_core::evolve::evolve;

/// Regenerates `tests/fixtures/replay_tsp_200/` and the golden pool. Run
/// manually after changing the seed algorithm:
/// `cargo test -p cpevo-core --test replay_fixture -- --ignored`.
#[test]
#[ignore]
fn regenerate_replay_fixture() {
    let dir = fixtures_dir().join("replay_tsp_200");
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    for i in 0..RESPONSES {
        std::fs::write(dir.join(format!("{i:04}.txt")), response_text(i)).unwrap();
    }

    // Freeze the golden pool produced by a fresh run over the fixture.
    let run_dir = tempfile::tempdir().unwrap();
    let config = fixture_config(run_dir.path().join("run"));
    evolve(&config).unwrap();
    std::fs::copy(
        config.run_dir.join("pool.json"),
        fixtures_dir().join("golden_pool.json"),
    )
    .unwrap();
}

#[test]
fn fixture_files_match_the_generator() {
    let dir = fixtures_dir().join("replay_tsp_200");
    for i in [0usize, 7, 13, 54, 199, RESPONSES - 1] {
        let on_disk = std::fs::read_to_string(dir.join(format!("{i:04}.txt"))).unwrap();
        assert_eq!(on_disk, response_text(i), "response {i} drifted");
    }
    assert!(!dir.join(format!("{:04}.txt", RESPONSES)).exists());
}
