//! Run candidate code as an isolated subprocess and score it with
//! harness-owned evaluation.
//!
//! Candidates never run in this process: code is written to a file in a
//! scratch directory and launched via a configurable command template. All
//! I/O is line-delimited JSON over the child's standard streams, and every
//! score is recomputed by the harness (tour lengths, wHPWL), so a candidate
//! cannot report its own number.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::PathBuf;
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::placement::{
    run_placement, weighted_hpwl, Evaluator, HookError, PlacementError, PlacementProblem,
    RunOptions, StepHook,
};
use crate::tsp::{tour_length, LengthMode, Tour, TspInstance};

const STDERR_CAP: usize = 64 * 1024;
const STDERR_EXCERPT: usize = 2000;

#[derive(Debug, thiserror::Error)]
pub enum SandboxError {
    #[error("runtime command template must contain {{code_file}}: `{0}`")]
    BadCommandTemplate(String),
    #[error("failed to launch candidate: {0}")]
    Launch(String),
    #[error("sandbox i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Placement(#[from] PlacementError),
    #[error(transparent)]
    Tsp(#[from] crate::tsp::TspError),
}

/// How a candidate run ended.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SandboxOutcome {
    Scored(f64),
    Timeout,
    ProtocolError,
    CrashExit,
    InvalidResult,
    EvalCapExceeded,
}

impl SandboxOutcome {
    pub fn score(&self) -> Option<f64> {
        match self {
            SandboxOutcome::Scored(s) => Some(*s),
            _ => None,
        }
    }
}

/// Outcome plus bookkeeping for one candidate execution.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SandboxVerdict {
    pub outcome: SandboxOutcome,
    /// Wall-clock seconds from launch to verdict.
    pub wall_time: f64,
    /// `{"eval": ...}` lines answered (always 0 for the TSP protocol).
    pub eval_calls: usize,
    pub stderr_excerpt: String,
}

/// Candidate launch configuration.
#[derive(Debug, Clone)]
pub struct SandboxConfig {
    /// Command template with a `{code_file}` placeholder,
    /// e.g. `python3 {code_file}`.
    pub runtime_cmd: String,
    /// Candidate working directory; a fresh temp dir when `None`.
    pub scratch_dir: Option<PathBuf>,
}

impl Default for SandboxConfig {
    fn default() -> Self {
        Self {
            runtime_cmd: "python3 {code_file}".into(),
            scratch_dir: None,
        }
    }
}

/// A TSP scoring job: the candidate receives the coordinates, a budget and
/// a seed, and must answer with one tour.
#[derive(Debug, Clone)]
pub struct TspJob<'a> {
    pub inst: &'a TspInstance,
    pub eval_budget: u64,
    pub seed: u64,
    pub timeout: Duration,
}

/// A step-hook scoring job: the harness drives the placement run and asks
/// the candidate for a step size each iteration.
#[derive(Debug, Clone)]
pub struct StepJob<'a> {
    pub prob: &'a PlacementProblem,
    pub iters: usize,
    pub timeout_per_iter: Duration,
    pub eval_cap: usize,
    pub rng_seed: u64,
}

#[derive(Debug)]
pub struct TspRun {
    pub verdict: SandboxVerdict,
    /// The validated tour, when the verdict is `Scored`.
    pub tour: Option<Tour>,
}

#[derive(Debug)]
pub struct StepRun {
    pub verdict: SandboxVerdict,
    pub final_coords: Option<Vec<f64>>,
    /// Iterations that fell back to the base step after an invalid reply.
    pub fallback_iterations: Vec<usize>,
}

enum RecvError {
    Timeout,
    Eof,
}

struct CandidateProcess {
    child: Child,
    stdin: Option<ChildStdin>,
    lines: Receiver<String>,
    stderr: Arc<Mutex<Vec<u8>>>,
    started: Instant,
    // Keeps the scratch directory alive for the child's lifetime.
    _scratch: Option<tempfile::TempDir>,
}

impl CandidateProcess {
    fn spawn(cfg: &SandboxConfig, code: &str) -> Result<Self, SandboxError> {
        if !cfg.runtime_cmd.contains("{code_file}") {
            return Err(SandboxError::BadCommandTemplate(cfg.runtime_cmd.clone()));
        }
        let (scratch_path, scratch_guard) = match &cfg.scratch_dir {
            Some(dir) => {
                std::fs::create_dir_all(dir)?;
                (dir.clone(), None)
            }
            None => {
                let tmp = tempfile::TempDir::new()?;
                (tmp.path().to_path_buf(), Some(tmp))
            }
        };
        let code_file = scratch_path.join("candidate.py");
        std::fs::write(&code_file, code)?;

        let parts: Vec<String> = cfg
            .runtime_cmd
            .split_whitespace()
            .map(|p| p.replace("{code_file}", &code_file.to_string_lossy()))
            .collect();
        let mut cmd = Command::new(&parts[0]);
        cmd.args(&parts[1..])
            .current_dir(&scratch_path)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::piped());
        #[cfg(unix)]
        {
            use std::os::unix::process::CommandExt;
            // New process group so the whole candidate tree can be killed.
            unsafe {
                cmd.pre_exec(|| {
                    libc::setpgid(0, 0);
                    Ok(())
                });
            }
        }
        let mut child = cmd
            .spawn()
            .map_err(|e| SandboxError::Launch(format!("{}: {e}", parts[0])))?;

        let stdout = child.stdout.take().expect("stdout piped");
        let (tx, rx) = mpsc::channel();
        std::thread::spawn(move || {
            let reader = BufReader::new(stdout);
            for line in reader.lines() {
                match line {
                    Ok(l) => {
                        if tx.send(l).is_err() {
                            break;
                        }
                    }
                    Err(_) => break,
                }
            }
        });

        let stderr = child.stderr.take().expect("stderr piped");
        let buf = Arc::new(Mutex::new(Vec::new()));
        let buf_clone = Arc::clone(&buf);
        std::thread::spawn(move || {
            let mut reader = BufReader::new(stderr);
            let mut chunk = [0u8; 4096];
            loop {
                match reader.read(&mut chunk) {
                    Ok(0) | Err(_) => break,
                    Ok(n) => {
                        let mut guard = buf_clone.lock().unwrap();
                        if guard.len() < STDERR_CAP {
                            let take = n.min(STDERR_CAP - guard.len());
                            guard.extend_from_slice(&chunk[..take]);
                        }
                    }
                }
            }
        });

        let stdin = child.stdin.take().expect("stdin piped");
        Ok(Self {
            child,
            stdin: Some(stdin),
            lines: rx,
            stderr: buf,
            started: Instant::now(),
            _scratch: scratch_guard,
        })
    }

    fn send(&mut self, line: &str) -> std::io::Result<()> {
        let stdin = self
            .stdin
            .as_mut()
            .ok_or_else(|| std::io::Error::other("stdin closed"))?;
        stdin.write_all(line.as_bytes())?;
        stdin.write_all(b"\n")?;
        stdin.flush()
    }

    fn recv_line(&self, deadline: Instant) -> Result<String, RecvError> {
        let now = Instant::now();
        let remaining = deadline.saturating_duration_since(now);
        match self.lines.recv_timeout(remaining) {
            Ok(line) => Ok(line),
            Err(RecvTimeoutError::Timeout) => Err(RecvError::Timeout),
            Err(RecvTimeoutError::Disconnected) => Err(RecvError::Eof),
        }
    }

    /// SIGKILL the candidate's whole process group, then reap it.
    fn kill_tree(&mut self) {
        self.stdin.take();
        #[cfg(unix)]
        {
            let pid = self.child.id() as i32;
            unsafe {
                libc::kill(-pid, libc::SIGKILL);
            }
        }
        let _ = self.child.kill();
        let _ = self.child.wait();
    }

    /// Whether the child exited with a failure status (after EOF).
    fn crashed(&mut self) -> bool {
        // Give the child a beat to be reaped after closing its streams.
        for _ in 0..20 {
            match self.child.try_wait() {
                Ok(Some(status)) => return !status.success(),
                Ok(None) => std::thread::sleep(Duration::from_millis(5)),
                Err(_) => return true,
            }
        }
        false
    }

    fn stderr_excerpt(&self) -> String {
        let buf = self.stderr.lock().unwrap();
        let text = String::from_utf8_lossy(&buf);
        if text.len() > STDERR_EXCERPT {
            let tail = &text[text.len() - STDERR_EXCERPT..];
            format!("...{tail}")
        } else {
            text.into_owned()
        }
    }

    fn wall_time(&self) -> f64 {
        self.started.elapsed().as_secs_f64()
    }
}

impl Drop for CandidateProcess {
    fn drop(&mut self) {
        self.kill_tree();
    }
}

#[derive(Deserialize)]
struct TspReply {
    tour: Vec<usize>,
}

/// Launch a TSP candidate, hand it the instance, and score the tour it
/// returns. The candidate is killed as soon as a verdict is reached.
pub fn run_tsp_candidate(
    code: &str,
    job: &TspJob<'_>,
    cfg: &SandboxConfig,
) -> Result<TspRun, SandboxError> {
    let mut proc = CandidateProcess::spawn(cfg, code)?;
    let request = serde_json::json!({
        "task": "tsp",
        "coords": job.inst.coords,
        "eval_budget": job.eval_budget,
        "seed": job.seed,
    });

    let finish = |proc: &mut CandidateProcess, outcome: SandboxOutcome, tour: Option<Tour>| {
        let verdict = SandboxVerdict {
            outcome,
            wall_time: proc.wall_time(),
            eval_calls: 0,
            stderr_excerpt: proc.stderr_excerpt(),
        };
        proc.kill_tree();
        TspRun { verdict, tour }
    };

    if proc.send(&request.to_string()).is_err() {
        let outcome = if proc.crashed() {
            SandboxOutcome::CrashExit
        } else {
            SandboxOutcome::ProtocolError
        };
        return Ok(finish(&mut proc, outcome, None));
    }

    let deadline = proc.started + job.timeout;
    let run = match proc.recv_line(deadline) {
        Ok(line) => match serde_json::from_str::<TspReply>(&line) {
            Ok(reply) => {
                let tour = Tour::new(reply.tour);
                if !tour.is_permutation_of(job.inst.dimension) {
                    finish(&mut proc, SandboxOutcome::InvalidResult, None)
                } else {
                    let score = tour_length(job.inst, &tour, LengthMode::Rounded)?;
                    finish(&mut proc, SandboxOutcome::Scored(score), Some(tour))
                }
            }
            Err(_) => finish(&mut proc, SandboxOutcome::ProtocolError, None),
        },
        Err(RecvError::Timeout) => finish(&mut proc, SandboxOutcome::Timeout, None),
        Err(RecvError::Eof) => {
            let outcome = if proc.crashed() {
                SandboxOutcome::CrashExit
            } else {
                SandboxOutcome::ProtocolError
            };
            finish(&mut proc, outcome, None)
        }
    };
    Ok(run)
}

#[derive(Deserialize)]
struct StepMsg {
    #[serde(default)]
    eval: Option<Vec<f64>>,
    #[serde(default)]
    step: Option<f64>,
}

struct ChildStepHook<'p> {
    proc: &'p mut CandidateProcess,
    timeout: Duration,
    fatal: Option<SandboxOutcome>,
    total_evals: usize,
}

impl ChildStepHook<'_> {
    fn fail(&mut self, outcome: SandboxOutcome) -> HookError {
        self.fatal = Some(outcome);
        HookError::Fatal
    }

    fn eof_outcome(&mut self) -> SandboxOutcome {
        if self.proc.crashed() {
            SandboxOutcome::CrashExit
        } else {
            SandboxOutcome::ProtocolError
        }
    }
}

impl StepHook for ChildStepHook<'_> {
    fn step(
        &mut self,
        k: usize,
        v: &[f64],
        g: &[f64],
        evaluator: &mut Evaluator<'_>,
        base_step: f64,
    ) -> Result<f64, HookError> {
        if self.fatal.is_some() {
            return Err(HookError::Fatal);
        }
        let request = serde_json::json!({
            "k": k,
            "v": v,
            "g": g,
            "base_step": base_step,
        });
        if self.proc.send(&request.to_string()).is_err() {
            let outcome = self.eof_outcome();
            return Err(self.fail(outcome));
        }
        let deadline = Instant::now() + self.timeout;
        loop {
            let line = match self.proc.recv_line(deadline) {
                Ok(l) => l,
                Err(RecvError::Timeout) => return Err(self.fail(SandboxOutcome::Timeout)),
                Err(RecvError::Eof) => {
                    let outcome = self.eof_outcome();
                    return Err(self.fail(outcome));
                }
            };
            let msg: StepMsg = match serde_json::from_str(&line) {
                Ok(m) => m,
                Err(_) => return Err(self.fail(SandboxOutcome::ProtocolError)),
            };
            match (msg.eval, msg.step) {
                (Some(coords), None) => {
                    let value = match evaluator.eval(&coords) {
                        Ok(f) => f,
                        Err(HookError::EvalCapExceeded) => {
                            return Err(self.fail(SandboxOutcome::EvalCapExceeded))
                        }
                        // A malformed evaluation request (wrong length) is a
                        // protocol violation, not a recoverable step.
                        Err(_) => return Err(self.fail(SandboxOutcome::ProtocolError)),
                    };
                    self.total_evals += 1;
                    let reply = serde_json::json!({ "value": value });
                    if self.proc.send(&reply.to_string()).is_err() {
                        let outcome = self.eof_outcome();
                        return Err(self.fail(outcome));
                    }
                }
                (None, Some(s)) => {
                    if s.is_finite() && s > 0.0 {
                        return Ok(s);
                    }
                    // Recoverable: the harness substitutes the base step for
                    // this iteration and records the event.
                    return Err(HookError::Invalid(format!("candidate step {s}")));
                }
                _ => return Err(self.fail(SandboxOutcome::ProtocolError)),
            }
        }
    }
}

/// Launch a step-hook candidate and drive a full placement run through it.
/// The verdict score is the final weighted HPWL, recomputed by the harness.
pub fn run_step_candidate(
    code: &str,
    job: &StepJob<'_>,
    cfg: &SandboxConfig,
) -> Result<StepRun, SandboxError> {
    let mut proc = CandidateProcess::spawn(cfg, code)?;
    let opts = RunOptions {
        iters: job.iters,
        rng_seed: job.rng_seed,
        eval_cap: job.eval_cap,
    };
    let mut hook = ChildStepHook {
        proc: &mut proc,
        timeout: job.timeout_per_iter,
        fatal: None,
        total_evals: 0,
    };

    let result = run_placement(job.prob, &opts, &mut hook);
    let fatal = hook.fatal;
    let eval_calls = hook.total_evals;

    let (outcome, final_coords, fallbacks) = match result {
        Ok(run) => {
            let score = weighted_hpwl(job.prob, &run.final_coords)?;
            (
                SandboxOutcome::Scored(score),
                Some(run.final_coords),
                run.fallbacks,
            )
        }
        Err(PlacementError::HookFatal) => (
            fatal.unwrap_or(SandboxOutcome::ProtocolError),
            None,
            Vec::new(),
        ),
        Err(other) => return Err(other.into()),
    };

    let verdict = SandboxVerdict {
        outcome,
        wall_time: proc.wall_time(),
        eval_calls,
        stderr_excerpt: proc.stderr_excerpt(),
    };
    proc.kill_tree();
    Ok(StepRun {
        verdict,
        final_coords,
        fallback_iterations: fallbacks,
    })
}
