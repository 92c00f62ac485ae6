//! Evolution harness for optimizer critical parts.
//!
//! The crate bundles everything needed to evolve the "critical part" of two
//! optimizers with an LLM in the loop and to score every candidate without
//! trusting it:
//!
//! * [`tsp`] — TSPLIB ingestion, exact tour evaluation and a brute-force
//!   oracle for small instances.
//! * [`fwa`] — the reference fireworks search over tour permutations whose
//!   operators are the seed critical part for the TSP task.
//! * [`placement`] — a desk-scale analytical placer (smoothed wirelength +
//!   density penalty, BB/Nesterov iterations) exposing the step-size hook
//!   that is the critical part for the placement task.
//! * [`visual`] — route, crossing-heatmap, density and placement diagnostics
//!   as deterministic PNGs with machine-checkable metrics.
//! * [`evolve`] — the candidate pool, prompt construction, LLM backends and
//!   the mutation/crossover evolution loop.
//! * [`sandbox`] — subprocess execution of candidate code over a line-JSON
//!   protocol, with harness-owned scoring.
//! * [`similarity`] — shingle/Jaccard code-similarity matrices and the
//!   Welch two-sample test.

pub mod evolve;
pub mod fwa;
pub mod placement;
pub mod report;
pub mod sandbox;
pub mod similarity;
pub mod tsp;
pub mod visual;

pub use evolve::{Candidate, OpKind, Pool, RunConfig, TaskKind};
pub use fwa::{Firework, FwaParams, OperatorSuite};
pub use placement::{OptimizerState, PlacementProblem, StepHook};
pub use sandbox::{SandboxOutcome, SandboxVerdict};
pub use tsp::{LengthMode, Tour, TspInstance};
pub use visual::{ArtifactKind, VisualArtifact};
