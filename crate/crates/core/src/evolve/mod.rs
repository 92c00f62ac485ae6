//! The evolution loop: manage the candidate pool, build mutation/crossover
//! requests, call the LLM backend, score every candidate in the sandbox and
//! aggregate results per iteration.
//!
//! Run directories are append-only: a `history.jsonl` event log, per-entrant
//! code and PNG files, and a `state.json` snapshot written after every
//! iteration so interrupted runs resume where they stopped.

pub mod backend;
pub mod prompt;

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Duration;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::placement::PlacementProblem;
use crate::sandbox::{
    run_step_candidate, run_tsp_candidate, SandboxConfig, SandboxError, SandboxOutcome, StepJob,
    TspJob,
};
use crate::tsp::{parse_tsplib, Tour, TspInstance};
use crate::visual::{render_artifact, ArtifactKind, RenderInput, VisualError};

pub use backend::{BackendKind, LiveBackend, ReplayBackend};
pub use prompt::{
    build_prompt, extract_code, ChatMessage, ChatRequest, MessagePart, PromptKind, PromptParent,
    PromptTemplates, RequestSettings,
};

#[derive(Debug, thiserror::Error)]
pub enum EvolveError {
    #[error("prompt template not found: {0}")]
    TemplateMissing(String),
    #[error("{} prompts take {expected} parent(s), got {got}", kind.as_str())]
    ParentCountMismatch {
        kind: PromptKind,
        expected: usize,
        got: usize,
    },
    #[error("response contains no code")]
    EmptyCode,
    #[error("extracted code is {0} bytes, over the 64 KiB limit")]
    Oversized(usize),
    #[error("backend unreachable: {0}")]
    BackendUnreachable(String),
    #[error("replay fixture exhausted at response {0}")]
    ReplayExhausted(usize),
    #[error("candidate has no real score")]
    UnscoredCandidate,
    #[error("bad run configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Sandbox(#[from] SandboxError),
    #[error(transparent)]
    Tsp(#[from] crate::tsp::TspError),
    #[error(transparent)]
    Placement(#[from] crate::placement::PlacementError),
    #[error(transparent)]
    Visual(#[from] VisualError),
}

/// Which critical part a run evolves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskKind {
    Tsp,
    Step,
}

/// How a pool candidate was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OpKind {
    Seed,
    Mutation,
    Crossover,
}

impl OpKind {
    fn id_char(&self) -> char {
        match self {
            OpKind::Seed => 's',
            OpKind::Mutation => 'm',
            OpKind::Crossover => 'c',
        }
    }
}

/// One evolved critical-part code with its verified score and lineage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub id: String,
    pub code: String,
    pub score: f64,
    pub parents: Vec<String>,
    pub op_kind: OpKind,
    pub generation: u64,
    pub artifacts: Vec<String>,
    pub attempts_used: u32,
}

/// Fixed-capacity elite archive, ascending by score; a newcomer replaces
/// the worst member only when strictly better.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Pool {
    pub capacity: usize,
    pub members: Vec<Candidate>,
}

impl Pool {
    pub fn new(capacity: usize) -> Self {
        Self {
            capacity,
            members: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn best(&self) -> Option<&Candidate> {
        self.members.first()
    }

    pub fn worst(&self) -> Option<&Candidate> {
        self.members.last()
    }

    /// Whether a candidate with this score would enter the pool.
    pub fn admits(&self, score: f64) -> bool {
        self.members.len() < self.capacity
            || self.worst().map(|w| score < w.score).unwrap_or(true)
    }
}

/// Insert under the greedy policy. Returns whether the candidate entered;
/// ties keep the incumbent.
pub fn greedy_insert(pool: &mut Pool, candidate: Candidate) -> Result<bool, EvolveError> {
    if !candidate.score.is_finite() {
        return Err(EvolveError::UnscoredCandidate);
    }
    if pool.members.len() >= pool.capacity {
        match pool.worst() {
            Some(w) if candidate.score < w.score => {
                pool.members.pop();
            }
            _ => return Ok(false),
        }
    }
    // Stable position: after every member with score <= new score.
    let at = pool
        .members
        .iter()
        .position(|m| m.score > candidate.score)
        .unwrap_or(pool.members.len());
    pool.members.insert(at, candidate);
    Ok(true)
}

/// Full configuration of one evolution run. Every field has a default so
/// config files can be partial; CLI flags override on top.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub task: TaskKind,
    /// TSPLIB instance path (TSP task).
    pub instance: Option<PathBuf>,
    /// Placement-problem JSON path (step task).
    pub problem: Option<PathBuf>,
    pub iterations: u64,
    pub pool_capacity: usize,
    pub visual_mode: bool,
    pub backend: BackendKind,
    pub endpoint: String,
    pub model: String,
    pub api_key_env: String,
    pub replay_dir: Option<PathBuf>,
    pub template_dir: Option<PathBuf>,
    /// Target-language phrase used in prompts; must agree with `runtime_cmd`.
    pub language: String,
    pub runtime_cmd: String,
    pub temperature: f64,
    pub max_tokens: u32,
    pub rng_seed: u64,
    pub run_dir: PathBuf,
    /// Evaluation budget handed to TSP candidates.
    pub tsp_eval_budget: u64,
    /// Seeded sandbox runs averaged into a TSP candidate's score.
    pub eval_runs: usize,
    pub tsp_timeout_secs: f64,
    pub step_iters: usize,
    pub step_timeout_secs: f64,
    pub eval_cap: usize,
    pub max_attempts: u32,
    pub hex_size: Option<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            task: TaskKind::Tsp,
            instance: None,
            problem: None,
            iterations: 200,
            pool_capacity: 5,
            visual_mode: false,
            backend: BackendKind::Null,
            endpoint: "https://api.openai.com/v1/chat/completions".into(),
            model: "gpt-4o".into(),
            api_key_env: "LLM_API_KEY".into(),
            replay_dir: None,
            template_dir: None,
            language: "Python".into(),
            runtime_cmd: "python3 {code_file}".into(),
            temperature: 0.8,
            max_tokens: 4096,
            rng_seed: 0,
            run_dir: PathBuf::from("run"),
            tsp_eval_budget: 20_000,
            eval_runs: 3,
            tsp_timeout_secs: 60.0,
            step_iters: 300,
            step_timeout_secs: 2.0,
            eval_cap: 8,
            max_attempts: 5,
            hex_size: None,
        }
    }
}

pub const TSP_SEED_CODE: &str = include_str!("../../seeds/tsp_seed.py");
pub const STEP_SEED_CODE: &str = include_str!("../../seeds/step_seed.py");

/// One line of `history.jsonl`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum HistoryEvent {
    Seed {
        candidate_id: String,
        score: f64,
    },
    Attempt {
        iteration: u64,
        op: PromptKind,
        attempt: u32,
        parents: Vec<String>,
        outcome: String,
        score: Option<f64>,
        detail: Option<String>,
    },
    Operation {
        iteration: u64,
        op: PromptKind,
        attempts_used: u32,
        result: String,
        candidate_id: Option<String>,
    },
    BackendError {
        iteration: u64,
        op: PromptKind,
        message: String,
    },
    Iteration {
        iteration: u64,
        pool_best: f64,
        pool_size: usize,
    },
}

struct HistoryWriter {
    file: std::io::BufWriter<std::fs::File>,
}

impl HistoryWriter {
    fn open(path: &Path) -> Result<Self, EvolveError> {
        let file = std::fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)?;
        Ok(Self {
            file: std::io::BufWriter::new(file),
        })
    }

    fn write(&mut self, event: &HistoryEvent) -> Result<(), EvolveError> {
        serde_json::to_writer(&mut self.file, event)?;
        self.file.write_all(b"\n")?;
        Ok(())
    }

    fn flush(&mut self) -> Result<(), EvolveError> {
        self.file.flush()?;
        Ok(())
    }
}

/// Resumable snapshot, rewritten after every iteration.
#[derive(Debug, Serialize, Deserialize)]
struct RunState {
    next_iteration: u64,
    pool: Pool,
    rng_word_pos: String,
    replay_cursor: usize,
}

#[derive(Debug)]
pub struct EvolveOutcome {
    pub best: Candidate,
    pub pool: Pool,
    pub history: Vec<HistoryEvent>,
}

enum Problem {
    Tsp(TspInstance),
    Step(PlacementProblem),
}

/// Seed for the `stream`-th sandbox evaluation run (splitmix64 mix).
/// Every candidate sees the same seed set, so scores stay comparable and
/// re-evaluating identical code reproduces the identical score.
fn derive_seed(base: u64, stream: u64) -> u64 {
    let mut z = base ^ stream.rotate_left(17);
    for _ in 0..2 {
        z = z.wrapping_add(0x9e3779b97f4a7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^= z >> 31;
    }
    z
}

enum EvalResult {
    Scored {
        score: f64,
        tour: Option<Tour>,
        coords: Option<Vec<f64>>,
    },
    Failed {
        outcome: SandboxOutcome,
        detail: String,
    },
}

struct Runner<'a> {
    config: &'a RunConfig,
    problem: &'a Problem,
    sandbox: SandboxConfig,
}

impl Runner<'_> {
    fn evaluate(&self, code: &str) -> Result<EvalResult, EvolveError> {
        match self.problem {
            Problem::Tsp(inst) => {
                let mut scores = Vec::new();
                let mut best: Option<(f64, Tour)> = None;
                for run_idx in 0..self.config.eval_runs.max(1) {
                    let job = TspJob {
                        inst,
                        eval_budget: self.config.tsp_eval_budget,
                        seed: derive_seed(self.config.rng_seed, run_idx as u64),
                        timeout: Duration::from_secs_f64(self.config.tsp_timeout_secs),
                    };
                    let run = run_tsp_candidate(code, &job, &self.sandbox)?;
                    match run.verdict.outcome {
                        SandboxOutcome::Scored(score) => {
                            scores.push(score);
                            let tour = run.tour.expect("scored runs carry a tour");
                            if best.as_ref().map(|(s, _)| score < *s).unwrap_or(true) {
                                best = Some((score, tour));
                            }
                        }
                        other => {
                            return Ok(EvalResult::Failed {
                                outcome: other,
                                detail: run.verdict.stderr_excerpt,
                            })
                        }
                    }
                }
                let score = scores.iter().sum::<f64>() / scores.len() as f64;
                Ok(EvalResult::Scored {
                    score,
                    tour: best.map(|(_, t)| t),
                    coords: None,
                })
            }
            Problem::Step(prob) => {
                let job = StepJob {
                    prob,
                    iters: self.config.step_iters,
                    timeout_per_iter: Duration::from_secs_f64(self.config.step_timeout_secs),
                    eval_cap: self.config.eval_cap,
                    rng_seed: derive_seed(self.config.rng_seed, 0),
                };
                let run = run_step_candidate(code, &job, &self.sandbox)?;
                match run.verdict.outcome {
                    SandboxOutcome::Scored(score) => Ok(EvalResult::Scored {
                        score,
                        tour: None,
                        coords: run.final_coords,
                    }),
                    other => Ok(EvalResult::Failed {
                        outcome: other,
                        detail: run.verdict.stderr_excerpt,
                    }),
                }
            }
        }
    }

    /// Render and save the entrant's artifacts; returns their file names.
    fn render_entrant(
        &self,
        id: &str,
        tour: Option<&Tour>,
        coords: Option<&[f64]>,
    ) -> Result<Vec<String>, EvolveError> {
        let mut names = Vec::new();
        match self.problem {
            Problem::Tsp(inst) => {
                let tour = tour.expect("tsp entrants carry a tour");
                let input = RenderInput::Tsp { inst, tour };
                for kind in [
                    ArtifactKind::Route,
                    ArtifactKind::CrossingHeatmap,
                    ArtifactKind::Density,
                ] {
                    let art = render_artifact(kind, &input, self.config.hex_size)?;
                    let name = format!("{id}_{}.png", kind.as_str());
                    std::fs::write(self.config.run_dir.join(&name), &art.png)?;
                    names.push(name);
                }
            }
            Problem::Step(prob) => {
                let coords = coords.expect("step entrants carry final coords");
                let input = RenderInput::Placement { prob, coords };
                let art = render_artifact(ArtifactKind::Placement, &input, None)?;
                let name = format!("{id}_placement.png");
                std::fs::write(self.config.run_dir.join(&name), &art.png)?;
                names.push(name);
            }
        }
        Ok(names)
    }
}

fn load_problem(config: &RunConfig) -> Result<Problem, EvolveError> {
    match config.task {
        TaskKind::Tsp => {
            let path = config.instance.as_ref().ok_or_else(|| {
                EvolveError::Config("the tsp task needs an --instance path".into())
            })?;
            let text = std::fs::read_to_string(path)?;
            Ok(Problem::Tsp(parse_tsplib(&text)?))
        }
        TaskKind::Step => {
            let path = config.problem.as_ref().ok_or_else(|| {
                EvolveError::Config("the step task needs a --problem JSON path".into())
            })?;
            let text = std::fs::read_to_string(path)?;
            Ok(Problem::Step(PlacementProblem::from_json(&text)?))
        }
    }
}

fn outcome_label(outcome: &SandboxOutcome) -> &'static str {
    match outcome {
        SandboxOutcome::Scored(_) => "scored",
        SandboxOutcome::Timeout => "timeout",
        SandboxOutcome::ProtocolError => "protocol_error",
        SandboxOutcome::CrashExit => "crash_exit",
        SandboxOutcome::InvalidResult => "invalid_result",
        SandboxOutcome::EvalCapExceeded => "eval_cap_exceeded",
    }
}

/// Load the artifact PNGs for a pool member (prompt image parts).
fn load_artifacts(run_dir: &Path, candidate: &Candidate) -> Result<Vec<Vec<u8>>, EvolveError> {
    candidate
        .artifacts
        .iter()
        .map(|name| std::fs::read(run_dir.join(name)).map_err(EvolveError::from))
        .collect()
}

/// Run the evolution loop to completion (or resume it from `state.json`).
pub fn evolve(config: &RunConfig) -> Result<EvolveOutcome, EvolveError> {
    if config.iterations < 1 {
        return Err(EvolveError::Config("iterations must be at least 1".into()));
    }
    if config.pool_capacity < 1 {
        return Err(EvolveError::Config("pool capacity must be at least 1".into()));
    }
    std::fs::create_dir_all(&config.run_dir)?;
    std::fs::create_dir_all(config.run_dir.join("candidates"))?;
    std::fs::write(
        config.run_dir.join("config.json"),
        serde_json::to_string_pretty(config)?,
    )?;

    let problem = load_problem(config)?;
    let templates = match &config.template_dir {
        Some(dir) => PromptTemplates::from_dir(dir, &config.language)?,
        None => PromptTemplates {
            language: config.language.clone(),
            ..PromptTemplates::default()
        },
    };
    let runner = Runner {
        config,
        problem: &problem,
        sandbox: SandboxConfig {
            runtime_cmd: config.runtime_cmd.clone(),
            scratch_dir: None,
        },
    };

    let mut replay = match config.backend {
        BackendKind::Replay => {
            let dir = config.replay_dir.clone().ok_or_else(|| {
                EvolveError::Config("the replay backend needs --replay-dir".into())
            })?;
            Some(ReplayBackend::new(dir))
        }
        _ => None,
    };
    let live = match config.backend {
        BackendKind::Live => Some(LiveBackend::new(
            config.endpoint.clone(),
            config.api_key_env.clone(),
            120,
        )),
        _ => None,
    };

    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let mut history = Vec::new();
    let mut log = HistoryWriter::open(&config.run_dir.join("history.jsonl"))?;

    // Resume or seed.
    let state_path = config.run_dir.join("state.json");
    let (mut pool, first_iteration) = if state_path.exists() {
        let state: RunState = serde_json::from_str(&std::fs::read_to_string(&state_path)?)?;
        rng.set_word_pos(
            state
                .rng_word_pos
                .parse::<u128>()
                .map_err(|_| EvolveError::Config("corrupt rng position in state.json".into()))?,
        );
        if let Some(r) = replay.as_mut() {
            *r = ReplayBackend::with_cursor(
                config.replay_dir.clone().unwrap(),
                state.replay_cursor,
            );
        }
        (state.pool, state.next_iteration)
    } else {
        let mut pool = Pool::new(config.pool_capacity);
        let seed_code = match config.task {
            TaskKind::Tsp => TSP_SEED_CODE,
            TaskKind::Step => STEP_SEED_CODE,
        };
        match runner.evaluate(seed_code)? {
            EvalResult::Scored { score, tour, coords } => {
                let id = "seed0".to_string();
                let artifacts =
                    runner.render_entrant(&id, tour.as_ref(), coords.as_deref())?;
                let candidate = Candidate {
                    id: id.clone(),
                    code: seed_code.to_string(),
                    score,
                    parents: Vec::new(),
                    op_kind: OpKind::Seed,
                    generation: 0,
                    artifacts,
                    attempts_used: 1,
                };
                std::fs::write(
                    config.run_dir.join("candidates").join(format!("{id}.py")),
                    &candidate.code,
                )?;
                greedy_insert(&mut pool, candidate)?;
                let event = HistoryEvent::Seed {
                    candidate_id: id,
                    score,
                };
                log.write(&event)?;
                history.push(event);
            }
            EvalResult::Failed { outcome, detail } => {
                return Err(EvolveError::Config(format!(
                    "seed candidate failed to score ({}): {detail}",
                    outcome_label(&outcome)
                )));
            }
        }
        (pool, 1)
    };

    for iteration in first_iteration..=config.iterations {
        for kind in [PromptKind::Mutation, PromptKind::Crossover] {
            // Parent selection: uniform draws from the pool.
            let parents: Vec<Candidate> = match kind {
                PromptKind::Mutation => {
                    let i = rng.random_range(0..pool.len());
                    vec![pool.members[i].clone()]
                }
                PromptKind::Crossover => {
                    if pool.len() < 2 {
                        let event = HistoryEvent::Operation {
                            iteration,
                            op: kind,
                            attempts_used: 0,
                            result: "skipped_small_pool".into(),
                            candidate_id: None,
                        };
                        log.write(&event)?;
                        history.push(event);
                        continue;
                    }
                    let i = rng.random_range(0..pool.len());
                    let j_raw = rng.random_range(0..pool.len() - 1);
                    let j = if j_raw >= i { j_raw + 1 } else { j_raw };
                    vec![pool.members[i].clone(), pool.members[j].clone()]
                }
            };
            let parent_ids: Vec<String> = parents.iter().map(|p| p.id.clone()).collect();

            let mut succeeded = false;
            for attempt in 1..=config.max_attempts {
                let response = match config.backend {
                    BackendKind::Null => Ok(parents[0].code.clone()),
                    BackendKind::Replay => replay.as_mut().unwrap().next_response(),
                    BackendKind::Live => {
                        let prompt_parents: Vec<PromptParent<'_>> = parents
                            .iter()
                            .map(|p| {
                                Ok(PromptParent {
                                    code: &p.code,
                                    score: p.score,
                                    images: if config.visual_mode {
                                        load_artifacts(&config.run_dir, p)?
                                    } else {
                                        Vec::new()
                                    },
                                })
                            })
                            .collect::<Result<_, EvolveError>>()?;
                        let request = build_prompt(
                            &templates,
                            kind,
                            &prompt_parents,
                            config.task,
                            config.visual_mode,
                            &RequestSettings {
                                model: config.model.clone(),
                                temperature: config.temperature,
                                max_tokens: config.max_tokens,
                            },
                        )?;
                        live.as_ref().unwrap().complete(&request)
                    }
                };
                let response = match response {
                    Ok(r) => r,
                    Err(
                        e @ (EvolveError::BackendUnreachable(_) | EvolveError::ReplayExhausted(_)),
                    ) => {
                        let event = HistoryEvent::BackendError {
                            iteration,
                            op: kind,
                            message: e.to_string(),
                        };
                        log.write(&event)?;
                        history.push(event);
                        break; // abandon this operation, keep the run going
                    }
                    Err(e) => return Err(e),
                };

                let code = match extract_code(&response) {
                    Ok(code) => code,
                    Err(e) => {
                        let event = HistoryEvent::Attempt {
                            iteration,
                            op: kind,
                            attempt,
                            parents: parent_ids.clone(),
                            outcome: "invalid_code".into(),
                            score: None,
                            detail: Some(e.to_string()),
                        };
                        log.write(&event)?;
                        history.push(event);
                        continue;
                    }
                };

                match runner.evaluate(&code)? {
                    EvalResult::Failed { outcome, detail } => {
                        let event = HistoryEvent::Attempt {
                            iteration,
                            op: kind,
                            attempt,
                            parents: parent_ids.clone(),
                            outcome: outcome_label(&outcome).into(),
                            score: None,
                            detail: Some(detail.chars().take(400).collect()),
                        };
                        log.write(&event)?;
                        history.push(event);
                        continue;
                    }
                    EvalResult::Scored { score, tour, coords } => {
                        let event = HistoryEvent::Attempt {
                            iteration,
                            op: kind,
                            attempt,
                            parents: parent_ids.clone(),
                            outcome: "scored".into(),
                            score: Some(score),
                            detail: None,
                        };
                        log.write(&event)?;
                        history.push(event);

                        let op_kind = match kind {
                            PromptKind::Mutation => OpKind::Mutation,
                            PromptKind::Crossover => OpKind::Crossover,
                        };
                        let id = format!("it{iteration:04}{}", op_kind.id_char());
                        let admitted = pool.admits(score);
                        let artifacts = if admitted {
                            runner.render_entrant(&id, tour.as_ref(), coords.as_deref())?
                        } else {
                            Vec::new()
                        };
                        let candidate = Candidate {
                            id: id.clone(),
                            code,
                            score,
                            parents: parent_ids.clone(),
                            op_kind,
                            generation: iteration,
                            artifacts,
                            attempts_used: attempt,
                        };
                        if admitted {
                            std::fs::write(
                                config.run_dir.join("candidates").join(format!("{id}.py")),
                                &candidate.code,
                            )?;
                        }
                        let inserted = greedy_insert(&mut pool, candidate)?;
                        let event = HistoryEvent::Operation {
                            iteration,
                            op: kind,
                            attempts_used: attempt,
                            result: if inserted { "inserted" } else { "rejected" }.into(),
                            candidate_id: Some(id),
                        };
                        log.write(&event)?;
                        history.push(event);
                        succeeded = true;
                        break;
                    }
                }
            }
            if !succeeded && !history_op_closed(&history, iteration, kind) {
                let event = HistoryEvent::Operation {
                    iteration,
                    op: kind,
                    attempts_used: config.max_attempts,
                    result: "failed".into(),
                    candidate_id: None,
                };
                log.write(&event)?;
                history.push(event);
            }
        }

        let event = HistoryEvent::Iteration {
            iteration,
            pool_best: pool.best().map(|c| c.score).unwrap_or(f64::NAN),
            pool_size: pool.len(),
        };
        log.write(&event)?;
        history.push(event);
        log.flush()?;

        let state = RunState {
            next_iteration: iteration + 1,
            pool: pool.clone(),
            rng_word_pos: rng.get_word_pos().to_string(),
            replay_cursor: replay.as_ref().map(|r| r.cursor()).unwrap_or(0),
        };
        let tmp = config.run_dir.join("state.json.tmp");
        std::fs::write(&tmp, serde_json::to_string_pretty(&state)?)?;
        std::fs::rename(&tmp, &state_path)?;
    }

    let mut pool_json = serde_json::to_string_pretty(&pool)?;
    pool_json.push('\n');
    std::fs::write(config.run_dir.join("pool.json"), pool_json)?;

    let best = pool
        .best()
        .cloned()
        .expect("pool always holds the seed at minimum");
    Ok(EvolveOutcome {
        best,
        pool,
        history,
    })
}

/// Whether this iteration's operation already wrote its closing event
/// (backend errors close an operation without an `Operation` record).
fn history_op_closed(history: &[HistoryEvent], iteration: u64, op: PromptKind) -> bool {
    history.iter().any(|e| {
        matches!(e, HistoryEvent::BackendError { iteration: i, op: o, .. }
            if *i == iteration && *o == op)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cand(id: &str, score: f64) -> Candidate {
        Candidate {
            id: id.into(),
            code: format!("code {id}"),
            score,
            parents: vec![],
            op_kind: OpKind::Mutation,
            generation: 1,
            artifacts: vec![],
            attempts_used: 1,
        }
    }

    #[test]
    fn insert_fills_then_replaces_worst() {
        let mut pool = Pool::new(5);
        for (i, s) in [1.0, 2.0, 3.0, 4.0, 5.0].iter().enumerate() {
            assert!(greedy_insert(&mut pool, cand(&format!("c{i}"), *s)).unwrap());
        }
        assert!(greedy_insert(&mut pool, cand("new", 4.5)).unwrap());
        assert_eq!(pool.len(), 5);
        assert_eq!(pool.worst().unwrap().score, 4.5);
        assert!(!pool.members.iter().any(|c| c.score == 5.0));
    }

    #[test]
    fn insert_rejects_worse_than_worst() {
        let mut pool = Pool::new(5);
        for (i, s) in [1.0, 2.0, 3.0, 4.0, 5.0].iter().enumerate() {
            greedy_insert(&mut pool, cand(&format!("c{i}"), *s)).unwrap();
        }
        assert!(!greedy_insert(&mut pool, cand("bad", 9.0)).unwrap());
        assert_eq!(pool.len(), 5);
        assert_eq!(pool.worst().unwrap().score, 5.0);
    }

    #[test]
    fn insert_appends_when_under_capacity() {
        let mut pool = Pool::new(5);
        for (i, s) in [3.0, 1.0, 2.0].iter().enumerate() {
            greedy_insert(&mut pool, cand(&format!("c{i}"), *s)).unwrap();
        }
        assert!(greedy_insert(&mut pool, cand("any", 99.0)).unwrap());
        assert_eq!(pool.len(), 4);
        let scores: Vec<f64> = pool.members.iter().map(|c| c.score).collect();
        assert_eq!(scores, vec![1.0, 2.0, 3.0, 99.0]);
    }

    #[test]
    fn ties_keep_the_incumbent() {
        let mut pool = Pool::new(2);
        greedy_insert(&mut pool, cand("a", 1.0)).unwrap();
        greedy_insert(&mut pool, cand("b", 5.0)).unwrap();
        assert!(!greedy_insert(&mut pool, cand("tie", 5.0)).unwrap());
        assert_eq!(pool.worst().unwrap().id, "b");
    }

    #[test]
    fn unscored_candidates_are_refused() {
        let mut pool = Pool::new(2);
        assert!(matches!(
            greedy_insert(&mut pool, cand("nan", f64::NAN)),
            Err(EvolveError::UnscoredCandidate)
        ));
    }

    #[test]
    fn config_round_trips_through_json() {
        let config = RunConfig::default();
        let text = serde_json::to_string_pretty(&config).unwrap();
        let again: RunConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(config.iterations, again.iterations);
        assert_eq!(config.runtime_cmd, again.runtime_cmd);
        // Partial configs fill from defaults.
        let partial: RunConfig = serde_json::from_str(r#"{"iterations": 7}"#).unwrap();
        assert_eq!(partial.iterations, 7);
        assert_eq!(partial.pool_capacity, 5);
    }

    #[test]
    fn seed_derivation_is_stable_and_spread() {
        let a = derive_seed(1, 2);
        let b = derive_seed(1, 2);
        assert_eq!(a, b);
        assert_ne!(derive_seed(1, 2), derive_seed(1, 3));
        assert_ne!(derive_seed(1, 2), derive_seed(2, 2));
    }
}
