//! Desk-scale analytical placement.
//!
//! The objective is `sum_e w_e * W(e) + lambda * D` where `W` is the
//! weighted-average smooth surrogate of half-perimeter wirelength and `D`
//! is a differentiable bin-overflow penalty. The optimizer is a
//! Nesterov-accelerated descent whose per-iteration step size starts from a
//! Barzilai-Borwein estimate and is then handed to a pluggable [`StepHook`]
//! — the critical part evolved for the placement task.
//!
//! Coordinate vectors store all x coordinates first, then all y
//! coordinates: `coords[i]` and `coords[n + i]` locate cell `i`'s center.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum PlacementError {
    #[error("coordinate vector has length {found}, expected {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("gamma must be positive, got {0}")]
    NonPositiveGamma(f64),
    #[error("curvature is degenerate: |y| = 0")]
    DegenerateCurvature,
    #[error("theta must be at least 1, got {0}")]
    InvalidTheta(f64),
    #[error("step hook failed: {0}")]
    HookFailure(String),
    #[error("step hook aborted the run")]
    HookFatal,
    #[error("evaluation cap of {0} objective calls exceeded")]
    EvalCapExceeded(usize),
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
}

/// One net pin: a cell index plus the pin's offset from the cell center.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pin {
    pub cell: usize,
    pub dx: f64,
    pub dy: f64,
}

/// A placement problem: cells to spread inside a region, nets pulling their
/// pins together, and the smoothing/penalty knobs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlacementProblem {
    /// Cell (width, height) pairs.
    pub cells: Vec<(f64, f64)>,
    /// Region (width, height); cells must stay fully inside.
    pub region: (f64, f64),
    pub nets: Vec<Vec<Pin>>,
    #[serde(rename = "weights")]
    pub net_weights: Vec<f64>,
    pub gamma: f64,
    #[serde(rename = "lambda")]
    pub lambda: f64,
    pub bin_size: f64,
}

impl PlacementProblem {
    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn coord_len(&self) -> usize {
        2 * self.cells.len()
    }

    pub fn validate(&self) -> Result<(), PlacementError> {
        if self.gamma <= 0.0 {
            return Err(PlacementError::NonPositiveGamma(self.gamma));
        }
        if self.bin_size <= 0.0 {
            return Err(PlacementError::InvalidProblem(format!(
                "bin_size must be positive, got {}",
                self.bin_size
            )));
        }
        if self.lambda < 0.0 {
            return Err(PlacementError::InvalidProblem(format!(
                "lambda must be nonnegative, got {}",
                self.lambda
            )));
        }
        if self.net_weights.len() != self.nets.len() {
            return Err(PlacementError::InvalidProblem(format!(
                "{} net weights for {} nets",
                self.net_weights.len(),
                self.nets.len()
            )));
        }
        for (w, h) in &self.cells {
            if *w <= 0.0 || *h <= 0.0 || *w > self.region.0 || *h > self.region.1 {
                return Err(PlacementError::InvalidProblem(format!(
                    "cell {w}x{h} does not fit region {}x{}",
                    self.region.0, self.region.1
                )));
            }
        }
        for net in &self.nets {
            for pin in net {
                if pin.cell >= self.cells.len() {
                    return Err(PlacementError::InvalidProblem(format!(
                        "pin references cell {} of {}",
                        pin.cell,
                        self.cells.len()
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("placement problems serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, PlacementError> {
        let prob: Self = serde_json::from_str(text)
            .map_err(|e| PlacementError::InvalidProblem(e.to_string()))?;
        prob.validate()?;
        Ok(prob)
    }

    fn check_coords(&self, coords: &[f64]) -> Result<(), PlacementError> {
        if coords.len() != self.coord_len() {
            return Err(PlacementError::DimensionMismatch {
                expected: self.coord_len(),
                found: coords.len(),
            });
        }
        Ok(())
    }

    /// Clamp every cell center so the whole rectangle sits inside the region.
    pub fn clamp_in_region(&self, coords: &mut [f64]) {
        let n = self.num_cells();
        for (i, (w, h)) in self.cells.iter().enumerate() {
            let (lo_x, hi_x) = (w / 2.0, self.region.0 - w / 2.0);
            let (lo_y, hi_y) = (h / 2.0, self.region.1 - h / 2.0);
            coords[i] = coords[i].clamp(lo_x, hi_x.max(lo_x));
            coords[n + i] = coords[n + i].clamp(lo_y, hi_y.max(lo_y));
        }
    }
}

/// One axis of the weighted-average wirelength: smooth max minus smooth min
/// of the pin coordinates, stabilized by shifting before exponentiation.
/// Returns the value and, via `grad`, d(value)/d(pin coordinate).
fn wa_axis(pin_pos: &[f64], gamma: f64, grad: Option<&mut Vec<f64>>) -> f64 {
    let hi = pin_pos.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = pin_pos.iter().cloned().fold(f64::INFINITY, f64::min);

    let mut sum_max = 0.0;
    let mut sum_max_x = 0.0;
    let mut sum_min = 0.0;
    let mut sum_min_x = 0.0;
    for &p in pin_pos {
        let a = ((p - hi) / gamma).exp();
        let b = (-(p - lo) / gamma).exp();
        sum_max += a;
        sum_max_x += p * a;
        sum_min += b;
        sum_min_x += p * b;
    }
    let s_max = sum_max_x / sum_max;
    let s_min = sum_min_x / sum_min;

    if let Some(grad) = grad {
        grad.clear();
        for &p in pin_pos {
            let a = ((p - hi) / gamma).exp();
            let b = (-(p - lo) / gamma).exp();
            let d_max = (a / sum_max) * (1.0 + (p - s_max) / gamma);
            let d_min = (b / sum_min) * (1.0 - (p - s_min) / gamma);
            grad.push(d_max - d_min);
        }
    }
    s_max - s_min
}

/// Weighted-average wirelength over all nets, optionally with its analytic
/// gradient with respect to cell centers.
pub fn wa_wirelength(
    prob: &PlacementProblem,
    coords: &[f64],
    want_gradient: bool,
) -> Result<(f64, Option<Vec<f64>>), PlacementError> {
    prob.check_coords(coords)?;
    if prob.gamma <= 0.0 {
        return Err(PlacementError::NonPositiveGamma(prob.gamma));
    }
    let n = prob.num_cells();
    let mut value = 0.0;
    let mut grad = if want_gradient {
        Some(vec![0.0; coords.len()])
    } else {
        None
    };
    let mut pin_axis = Vec::new();
    let mut axis_grad = Vec::new();

    for (net, &w) in prob.nets.iter().zip(&prob.net_weights) {
        if net.is_empty() {
            continue;
        }
        // x axis
        pin_axis.clear();
        pin_axis.extend(net.iter().map(|p| coords[p.cell] + p.dx));
        let axis_out = want_gradient.then_some(&mut axis_grad);
        let wx = wa_axis(&pin_axis, prob.gamma, axis_out);
        if let Some(g) = grad.as_mut() {
            for (pin, d) in net.iter().zip(&axis_grad) {
                g[pin.cell] += w * d;
            }
        }
        // y axis
        pin_axis.clear();
        pin_axis.extend(net.iter().map(|p| coords[n + p.cell] + p.dy));
        let axis_out = want_gradient.then_some(&mut axis_grad);
        let wy = wa_axis(&pin_axis, prob.gamma, axis_out);
        if let Some(g) = grad.as_mut() {
            for (pin, d) in net.iter().zip(&axis_grad) {
                g[n + pin.cell] += w * d;
            }
        }
        value += w * (wx + wy);
    }
    Ok((value, grad))
}

/// Exact net-weighted half-perimeter wirelength (the scoring metric).
pub fn weighted_hpwl(prob: &PlacementProblem, coords: &[f64]) -> Result<f64, PlacementError> {
    prob.check_coords(coords)?;
    let n = prob.num_cells();
    let mut total = 0.0;
    for (net, &w) in prob.nets.iter().zip(&prob.net_weights) {
        if net.is_empty() {
            continue;
        }
        let mut min_x = f64::INFINITY;
        let mut max_x = f64::NEG_INFINITY;
        let mut min_y = f64::INFINITY;
        let mut max_y = f64::NEG_INFINITY;
        for pin in net {
            let x = coords[pin.cell] + pin.dx;
            let y = coords[n + pin.cell] + pin.dy;
            min_x = min_x.min(x);
            max_x = max_x.max(x);
            min_y = min_y.min(y);
            max_y = max_y.max(y);
        }
        total += w * ((max_x - min_x) + (max_y - min_y));
    }
    Ok(total)
}

fn bin_grid(prob: &PlacementProblem) -> (usize, usize) {
    let nx = (prob.region.0 / prob.bin_size).ceil().max(1.0) as usize;
    let ny = (prob.region.1 / prob.bin_size).ceil().max(1.0) as usize;
    (nx, ny)
}

/// Overlap length of `[a0, a1]` with `[b0, b1]` plus its derivative with
/// respect to translating the `a` interval.
fn overlap_1d(a0: f64, a1: f64, b0: f64, b1: f64) -> (f64, f64) {
    let lo = a0.max(b0);
    let hi = a1.min(b1);
    if hi <= lo {
        return (0.0, 0.0);
    }
    let d_hi = if a1 < b1 { 1.0 } else { 0.0 };
    let d_lo = if a0 > b0 { 1.0 } else { 0.0 };
    (hi - lo, d_hi - d_lo)
}

/// Quadratic bin-overflow density penalty. The region is tiled with square
/// bins of side `bin_size`, each with capacity `bin_size^2`; the penalty is
/// the squared total overflow, differentiable in the cell centers.
pub fn density_penalty(
    prob: &PlacementProblem,
    coords: &[f64],
    want_gradient: bool,
) -> Result<(f64, Option<Vec<f64>>), PlacementError> {
    prob.check_coords(coords)?;
    let n = prob.num_cells();
    let b = prob.bin_size;
    let (nx, ny) = bin_grid(prob);
    let capacity = b * b;

    let mut occupancy = vec![0.0; nx * ny];
    let bin_range = |lo: f64, hi: f64, count: usize| -> (usize, usize) {
        let first = (lo / b).floor().max(0.0) as usize;
        let last = ((hi / b).ceil() as isize).clamp(1, count as isize) as usize;
        (first.min(count - 1), last)
    };

    for i in 0..n {
        let (w, h) = prob.cells[i];
        let (cx0, cx1) = (coords[i] - w / 2.0, coords[i] + w / 2.0);
        let (cy0, cy1) = (coords[n + i] - h / 2.0, coords[n + i] + h / 2.0);
        let (bx0, bx1) = bin_range(cx0, cx1, nx);
        let (by0, by1) = bin_range(cy0, cy1, ny);
        for bx in bx0..bx1 {
            let (ox, _) = overlap_1d(cx0, cx1, bx as f64 * b, (bx + 1) as f64 * b);
            if ox <= 0.0 {
                continue;
            }
            for by in by0..by1 {
                let (oy, _) = overlap_1d(cy0, cy1, by as f64 * b, (by + 1) as f64 * b);
                if oy > 0.0 {
                    occupancy[by * nx + bx] += ox * oy;
                }
            }
        }
    }

    let mut value = 0.0;
    for &occ in &occupancy {
        let overflow = (occ - capacity).max(0.0);
        value += overflow * overflow;
    }

    let grad = if want_gradient {
        let mut g = vec![0.0; coords.len()];
        for i in 0..n {
            let (w, h) = prob.cells[i];
            let (cx0, cx1) = (coords[i] - w / 2.0, coords[i] + w / 2.0);
            let (cy0, cy1) = (coords[n + i] - h / 2.0, coords[n + i] + h / 2.0);
            let (bx0, bx1) = bin_range(cx0, cx1, nx);
            let (by0, by1) = bin_range(cy0, cy1, ny);
            for bx in bx0..bx1 {
                let (ox, dx) = overlap_1d(cx0, cx1, bx as f64 * b, (bx + 1) as f64 * b);
                if ox <= 0.0 {
                    continue;
                }
                for by in by0..by1 {
                    let (oy, dy) = overlap_1d(cy0, cy1, by as f64 * b, (by + 1) as f64 * b);
                    if oy <= 0.0 {
                        continue;
                    }
                    let overflow = (occupancy[by * nx + bx] - capacity).max(0.0);
                    if overflow > 0.0 {
                        g[i] += 2.0 * overflow * dx * oy;
                        g[n + i] += 2.0 * overflow * ox * dy;
                    }
                }
            }
        }
        Some(g)
    } else {
        None
    };

    Ok((value, grad))
}

/// The full objective: weighted-average wirelength plus `lambda` times the
/// density penalty.
pub fn objective(
    prob: &PlacementProblem,
    coords: &[f64],
    want_gradient: bool,
) -> Result<(f64, Option<Vec<f64>>), PlacementError> {
    let (wl, wl_grad) = wa_wirelength(prob, coords, want_gradient)?;
    let (dp, dp_grad) = density_penalty(prob, coords, want_gradient)?;
    let value = wl + prob.lambda * dp;
    let grad = match (wl_grad, dp_grad) {
        (Some(mut a), Some(b)) => {
            for (x, y) in a.iter_mut().zip(&b) {
                *x += prob.lambda * y;
            }
            Some(a)
        }
        _ => None,
    };
    Ok((value, grad))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Barzilai-Borwein base step from successive iterate/gradient differences:
/// the short step `s.y / y.y` when positive, otherwise the smaller of the
/// inverse-Lipschitz estimate `|s|/|y|` and the previous accepted step.
pub fn bb_base_step(s: &[f64], y: &[f64], prev_step: f64) -> Result<f64, PlacementError> {
    if s.len() != y.len() {
        return Err(PlacementError::DimensionMismatch {
            expected: s.len(),
            found: y.len(),
        });
    }
    let y_norm2 = dot(y, y);
    if y_norm2 == 0.0 {
        return Err(PlacementError::DegenerateCurvature);
    }
    let short = dot(s, y) / y_norm2;
    let step = if short > 0.0 {
        short
    } else {
        let lip = norm(s) / y_norm2.sqrt();
        lip.min(prev_step)
    };
    if !(step.is_finite() && step > 0.0) {
        return Err(PlacementError::DegenerateCurvature);
    }
    Ok(step)
}

/// The momentum-coefficient recursion `theta' = (1 + sqrt(1 + 4 theta^2))/2`.
pub fn theta_update(theta: f64) -> Result<f64, PlacementError> {
    if theta.is_nan() || theta < 1.0 {
        return Err(PlacementError::InvalidTheta(theta));
    }
    Ok((1.0 + (1.0 + 4.0 * theta * theta).sqrt()) / 2.0)
}

/// Anything the optimizer can descend on: a value/gradient pair plus an
/// optional feasibility projection applied after every update.
pub trait ObjectiveFn {
    fn dim(&self) -> usize;
    fn value(&self, coords: &[f64]) -> Result<f64, PlacementError>;
    fn value_grad(&self, coords: &[f64]) -> Result<(f64, Vec<f64>), PlacementError>;
    fn project(&self, _coords: &mut [f64]) {}
}

impl ObjectiveFn for PlacementProblem {
    fn dim(&self) -> usize {
        self.coord_len()
    }

    fn value(&self, coords: &[f64]) -> Result<f64, PlacementError> {
        objective(self, coords, false).map(|(v, _)| v)
    }

    fn value_grad(&self, coords: &[f64]) -> Result<(f64, Vec<f64>), PlacementError> {
        let (v, g) = objective(self, coords, true)?;
        Ok((v, g.expect("gradient requested")))
    }

    fn project(&self, coords: &mut [f64]) {
        self.clamp_in_region(coords);
    }
}

/// Rate-limited objective handle passed to step hooks.
pub struct Evaluator<'a> {
    obj: &'a dyn ObjectiveFn,
    calls: usize,
    cap: usize,
}

impl<'a> Evaluator<'a> {
    pub fn new(obj: &'a dyn ObjectiveFn, cap: usize) -> Self {
        Self { obj, calls: 0, cap }
    }

    pub fn calls(&self) -> usize {
        self.calls
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    /// Evaluate the objective at `coords`, counting against the cap.
    pub fn eval(&mut self, coords: &[f64]) -> Result<f64, HookError> {
        if self.calls >= self.cap {
            return Err(HookError::EvalCapExceeded);
        }
        self.calls += 1;
        self.obj
            .value(coords)
            .map_err(|e| HookError::Invalid(e.to_string()))
    }
}

/// How a step hook can fail.
///
/// `Invalid` and `EvalCapExceeded` surface as [`PlacementError::HookFailure`]
/// and leave the fallback decision to the caller; `Fatal` aborts the run
/// (used by the sandbox when the candidate process itself breaks down).
#[derive(Debug)]
pub enum HookError {
    Invalid(String),
    EvalCapExceeded,
    Fatal,
}

/// The critical-part contract: given the extrapolated point, its gradient,
/// a rate-limited evaluator and the BB base step, produce a positive step.
pub trait StepHook {
    fn step(
        &mut self,
        k: usize,
        v: &[f64],
        g: &[f64],
        evaluator: &mut Evaluator<'_>,
        base_step: f64,
    ) -> Result<f64, HookError>;
}

/// The identity hook: always the BB base step.
pub struct BaseStepHook;

impl StepHook for BaseStepHook {
    fn step(
        &mut self,
        _k: usize,
        _v: &[f64],
        _g: &[f64],
        _evaluator: &mut Evaluator<'_>,
        base_step: f64,
    ) -> Result<f64, HookError> {
        Ok(base_step)
    }
}

/// The Nesterov/BB iterate bundle.
#[derive(Debug, Clone)]
pub struct OptimizerState {
    pub v: Vec<f64>,
    pub v_prev: Vec<f64>,
    pub u: Vec<f64>,
    pub u_prev: Vec<f64>,
    pub g: Vec<f64>,
    pub g_prev: Vec<f64>,
    pub theta: f64,
    pub prev_step: f64,
    pub k: usize,
}

impl OptimizerState {
    /// Fresh state at `coords` with gradient evaluated there.
    pub fn initial(obj: &dyn ObjectiveFn, coords: Vec<f64>) -> Result<Self, PlacementError> {
        let (_, g) = obj.value_grad(&coords)?;
        Ok(Self {
            v: coords.clone(),
            v_prev: coords.clone(),
            u: coords.clone(),
            u_prev: coords,
            g: g.clone(),
            g_prev: g,
            theta: 1.0,
            prev_step: 1.0,
            k: 0,
        })
    }
}

/// One accelerated iteration. The base step comes from BB history (or the
/// previous step while there is none), the hook may replace it, and the new
/// extrapolated point is projected back into the feasible set before its
/// gradient is taken.
pub fn nesterov_iterate(
    obj: &dyn ObjectiveFn,
    state: &OptimizerState,
    hook: &mut dyn StepHook,
    eval_cap: usize,
) -> Result<OptimizerState, PlacementError> {
    let base = if state.k == 0 {
        state.prev_step
    } else {
        let s: Vec<f64> = state
            .v
            .iter()
            .zip(&state.v_prev)
            .map(|(a, b)| a - b)
            .collect();
        let y: Vec<f64> = state
            .g
            .iter()
            .zip(&state.g_prev)
            .map(|(a, b)| a - b)
            .collect();
        if dot(&y, &y) == 0.0 {
            state.prev_step
        } else {
            bb_base_step(&s, &y, state.prev_step)?
        }
    };

    let mut evaluator = Evaluator::new(obj, eval_cap);
    let step = match hook.step(state.k, &state.v, &state.g, &mut evaluator, base) {
        Ok(s) => s,
        Err(HookError::Invalid(msg)) => return Err(PlacementError::HookFailure(msg)),
        Err(HookError::EvalCapExceeded) => {
            return Err(PlacementError::HookFailure(format!(
                "evaluation cap of {eval_cap} exceeded"
            )))
        }
        Err(HookError::Fatal) => return Err(PlacementError::HookFatal),
    };
    if !(step.is_finite() && step > 0.0) {
        return Err(PlacementError::HookFailure(format!(
            "step must be a finite positive number, got {step}"
        )));
    }

    let u_new: Vec<f64> = state
        .v
        .iter()
        .zip(&state.g)
        .map(|(v, g)| v - step * g)
        .collect();
    let theta_new = theta_update(state.theta)?;
    let coef = (state.theta - 1.0) / theta_new;
    let mut v_new: Vec<f64> = u_new
        .iter()
        .zip(&state.u)
        .map(|(un, u)| un + coef * (un - u))
        .collect();
    obj.project(&mut v_new);
    let (_, g_new) = obj.value_grad(&v_new)?;

    Ok(OptimizerState {
        v_prev: state.v.clone(),
        u_prev: state.u.clone(),
        g_prev: state.g.clone(),
        v: v_new,
        u: u_new,
        g: g_new,
        theta: theta_new,
        prev_step: step,
        k: state.k + 1,
    })
}

/// One completed iteration of a placement run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub k: usize,
    pub whpwl: f64,
    pub objective: f64,
    pub step: f64,
    pub fell_back: bool,
}

/// Everything a placement run produces.
#[derive(Debug, Clone)]
pub struct PlacementRun {
    pub final_coords: Vec<f64>,
    pub trace: Vec<TraceEntry>,
    pub initial_whpwl: f64,
    pub initial_objective: f64,
    /// Iterations (1-based `k` after the update) whose hook failed and were
    /// redone with the base step.
    pub fallbacks: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub iters: usize,
    pub rng_seed: u64,
    pub eval_cap: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            iters: 300,
            rng_seed: 0,
            eval_cap: 8,
        }
    }
}

/// Run the optimizer from a seeded uniform-random start. A hook failure at
/// some iteration falls back to the base step for that iteration and is
/// recorded; hook-fatal and structural errors propagate.
pub fn run_placement(
    prob: &PlacementProblem,
    opts: &RunOptions,
    hook: &mut dyn StepHook,
) -> Result<PlacementRun, PlacementError> {
    prob.validate()?;
    if opts.iters == 0 {
        return Err(PlacementError::InvalidProblem(
            "at least one iteration is required".into(),
        ));
    }
    let n = prob.num_cells();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.rng_seed);
    let mut coords = vec![0.0; prob.coord_len()];
    for i in 0..n {
        let (w, h) = prob.cells[i];
        let (lo_x, hi_x) = (w / 2.0, prob.region.0 - w / 2.0);
        let (lo_y, hi_y) = (h / 2.0, prob.region.1 - h / 2.0);
        coords[i] = lo_x + rng.random::<f64>() * (hi_x - lo_x).max(0.0);
        coords[n + i] = lo_y + rng.random::<f64>() * (hi_y - lo_y).max(0.0);
    }

    let initial_whpwl = weighted_hpwl(prob, &coords)?;
    let initial_objective = objective(prob, &coords, false)?.0;
    let mut state = OptimizerState::initial(prob, coords)?;
    let mut trace = Vec::with_capacity(opts.iters);
    let mut fallbacks = Vec::new();

    for _ in 0..opts.iters {
        let (next, fell_back) = match nesterov_iterate(prob, &state, hook, opts.eval_cap) {
            Ok(next) => (next, false),
            Err(PlacementError::HookFailure(_)) => {
                let next = nesterov_iterate(prob, &state, &mut BaseStepHook, opts.eval_cap)?;
                (next, true)
            }
            Err(other) => return Err(other),
        };
        state = next;
        if fell_back {
            fallbacks.push(state.k);
        }
        trace.push(TraceEntry {
            k: state.k,
            whpwl: weighted_hpwl(prob, &state.v)?,
            objective: objective(prob, &state.v, false)?.0,
            step: state.prev_step,
            fell_back,
        });
    }

    Ok(PlacementRun {
        final_coords: state.v,
        trace,
        initial_whpwl,
        initial_objective,
        fallbacks,
    })
}

/// Parameters for the synthetic-instance generator.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub cells: usize,
    pub nets: usize,
    pub pins_min: usize,
    pub pins_max: usize,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            cells: 100,
            nets: 150,
            pins_min: 2,
            pins_max: 5,
            seed: 0,
        }
    }
}

/// Generate a seeded random placement problem: soft-macro style cells at
/// roughly 25% utilization, pins offset inside their cells.
pub fn synthetic_problem(spec: &SyntheticSpec) -> PlacementProblem {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut cells = Vec::with_capacity(spec.cells);
    let mut area = 0.0;
    for _ in 0..spec.cells {
        let w = 1.0 + 2.0 * rng.random::<f64>();
        let h = 1.0 + 2.0 * rng.random::<f64>();
        area += w * h;
        cells.push((w, h));
    }
    let side = (area / 0.25).sqrt().ceil();

    let mut nets = Vec::with_capacity(spec.nets);
    let mut net_weights = Vec::with_capacity(spec.nets);
    for _ in 0..spec.nets {
        let pins = rng.random_range(spec.pins_min..=spec.pins_max.max(spec.pins_min));
        let mut net = Vec::with_capacity(pins);
        for _ in 0..pins {
            let cell = rng.random_range(0..spec.cells);
            let (w, h) = cells[cell];
            net.push(Pin {
                cell,
                dx: (rng.random::<f64>() - 0.5) * w / 2.0,
                dy: (rng.random::<f64>() - 0.5) * h / 2.0,
            });
        }
        nets.push(net);
        net_weights.push(0.5 + 1.5 * rng.random::<f64>());
    }

    PlacementProblem {
        cells,
        region: (side, side),
        nets,
        net_weights,
        gamma: side / 50.0,
        lambda: 1.0,
        bin_size: side / 10.0,
    }
}
