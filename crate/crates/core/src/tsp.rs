//! TSPLIB ingestion and exact tour evaluation.
//!
//! Only the `EUC_2D` metric is supported; anything else is rejected loudly
//! rather than silently mis-scored. Rounded edge lengths follow the TSPLIB
//! convention `nint(d) = floor(d + 0.5)`.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

/// Supported TSPLIB edge-weight metrics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EdgeWeightType {
    Euc2d,
}

/// How tour edges are accounted: integer TSPLIB rounding or exact Euclidean.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LengthMode {
    Rounded,
    Floating,
}

#[derive(Debug, thiserror::Error)]
pub enum TspError {
    #[error("unsupported EDGE_WEIGHT_TYPE `{0}`; only EUC_2D is accepted")]
    UnsupportedMetric(String),
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("NODE_COORD_SECTION has {found} entries but DIMENSION is {expected}")]
    CoordCountMismatch { expected: usize, found: usize },
    #[error("city index {index} out of range for dimension {dimension}")]
    IndexOutOfRange { index: usize, dimension: usize },
    #[error("tour is not a permutation of 0..{0}")]
    InvalidPermutation(usize),
    #[error("best-known length must be positive, got {0}")]
    NonPositiveBest(f64),
    #[error("exhaustive search is limited to 10 cities, instance has {0}")]
    TooLarge(usize),
    #[error("best-known registry line {line}: {msg}")]
    MalformedRegistry { line: usize, msg: String },
}

/// A parsed TSPLIB instance. Coordinates are 0-indexed in file order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TspInstance {
    pub name: String,
    pub dimension: usize,
    pub coords: Vec<(f64, f64)>,
    pub edge_weight_type: EdgeWeightType,
    pub best_known: Option<f64>,
}

/// A tour: a permutation of the city indices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tour {
    pub order: Vec<usize>,
}

impl Tour {
    pub fn new(order: Vec<usize>) -> Self {
        Self { order }
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// True when `order` visits each of `0..n` exactly once.
    pub fn is_permutation_of(&self, n: usize) -> bool {
        if self.order.len() != n {
            return false;
        }
        let mut seen = vec![false; n];
        for &c in &self.order {
            if c >= n || seen[c] {
                return false;
            }
            seen[c] = true;
        }
        true
    }
}

/// TSPLIB nearest-integer rounding.
fn nint(d: f64) -> u64 {
    (d + 0.5).floor() as u64
}

fn euclid(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).hypot(a.1 - b.1)
}

impl TspInstance {
    pub fn new(name: impl Into<String>, coords: Vec<(f64, f64)>) -> Self {
        Self {
            name: name.into(),
            dimension: coords.len(),
            coords,
            edge_weight_type: EdgeWeightType::Euc2d,
            best_known: None,
        }
    }

    pub fn with_best_known(mut self, best: f64) -> Self {
        self.best_known = Some(best);
        self
    }

    fn check_index(&self, i: usize) -> Result<(), TspError> {
        if i >= self.dimension {
            return Err(TspError::IndexOutOfRange {
                index: i,
                dimension: self.dimension,
            });
        }
        Ok(())
    }

    /// Serialize back to TSPLIB text. Round-trips exactly through
    /// [`parse_tsplib`] (dimension, metric and all coordinates).
    pub fn to_tsplib(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "NAME : {}", self.name);
        let _ = writeln!(out, "TYPE : TSP");
        let _ = writeln!(out, "DIMENSION : {}", self.dimension);
        let _ = writeln!(out, "EDGE_WEIGHT_TYPE : EUC_2D");
        let _ = writeln!(out, "NODE_COORD_SECTION");
        for (i, (x, y)) in self.coords.iter().enumerate() {
            let _ = writeln!(out, "{} {} {}", i + 1, x, y);
        }
        out.push_str("EOF\n");
        out
    }
}

/// Parse a TSPLIB-format document (EUC_2D only).
pub fn parse_tsplib(text: &str) -> Result<TspInstance, TspError> {
    let mut name = String::new();
    let mut dimension: Option<usize> = None;
    let mut metric: Option<String> = None;
    let mut coords: Vec<(f64, f64)> = Vec::new();
    let mut in_coords = false;

    for raw in text.lines() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if in_coords {
            if line.eq_ignore_ascii_case("EOF") {
                in_coords = false;
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(TspError::MalformedHeader(format!(
                    "bad NODE_COORD_SECTION line `{line}`"
                )));
            }
            let x: f64 = fields[1].parse().map_err(|_| {
                TspError::MalformedHeader(format!("bad x coordinate `{}`", fields[1]))
            })?;
            let y: f64 = fields[2].parse().map_err(|_| {
                TspError::MalformedHeader(format!("bad y coordinate `{}`", fields[2]))
            })?;
            coords.push((x, y));
            continue;
        }
        if line.eq_ignore_ascii_case("NODE_COORD_SECTION") {
            in_coords = true;
            continue;
        }
        if line.eq_ignore_ascii_case("EOF") {
            continue;
        }
        let Some((key, value)) = line.split_once(':') else {
            // Section keywords we do not understand are header noise.
            continue;
        };
        let key = key.trim().to_ascii_uppercase();
        let value = value.trim();
        match key.as_str() {
            "NAME" => name = value.to_string(),
            "TYPE" => {
                if !value.eq_ignore_ascii_case("TSP") {
                    return Err(TspError::MalformedHeader(format!(
                        "TYPE must be TSP, got `{value}`"
                    )));
                }
            }
            "DIMENSION" => {
                let d: usize = value.parse().map_err(|_| {
                    TspError::MalformedHeader(format!("bad DIMENSION `{value}`"))
                })?;
                dimension = Some(d);
            }
            "EDGE_WEIGHT_TYPE" => metric = Some(value.to_string()),
            _ => {}
        }
    }

    let dimension =
        dimension.ok_or_else(|| TspError::MalformedHeader("DIMENSION missing".into()))?;
    if dimension < 3 {
        return Err(TspError::MalformedHeader(format!(
            "DIMENSION must be at least 3, got {dimension}"
        )));
    }
    let metric =
        metric.ok_or_else(|| TspError::MalformedHeader("EDGE_WEIGHT_TYPE missing".into()))?;
    if !metric.eq_ignore_ascii_case("EUC_2D") {
        return Err(TspError::UnsupportedMetric(metric));
    }
    if coords.len() != dimension {
        return Err(TspError::CoordCountMismatch {
            expected: dimension,
            found: coords.len(),
        });
    }

    Ok(TspInstance {
        name,
        dimension,
        coords,
        edge_weight_type: EdgeWeightType::Euc2d,
        best_known: None,
    })
}

/// Rounded EUC_2D distance between two cities.
pub fn tsplib_distance(inst: &TspInstance, i: usize, j: usize) -> Result<u64, TspError> {
    inst.check_index(i)?;
    inst.check_index(j)?;
    Ok(nint(euclid(inst.coords[i], inst.coords[j])))
}

/// Cyclic tour length, including the closing edge.
pub fn tour_length(inst: &TspInstance, tour: &Tour, mode: LengthMode) -> Result<f64, TspError> {
    if !tour.is_permutation_of(inst.dimension) {
        return Err(TspError::InvalidPermutation(inst.dimension));
    }
    let n = tour.order.len();
    match mode {
        LengthMode::Rounded => {
            let mut total: u64 = 0;
            for k in 0..n {
                let a = inst.coords[tour.order[k]];
                let b = inst.coords[tour.order[(k + 1) % n]];
                total += nint(euclid(a, b));
            }
            Ok(total as f64)
        }
        LengthMode::Floating => {
            let mut total = 0.0;
            for k in 0..n {
                let a = inst.coords[tour.order[k]];
                let b = inst.coords[tour.order[(k + 1) % n]];
                total += euclid(a, b);
            }
            Ok(total)
        }
    }
}

/// Relative gap to the best-known length, in percent. Negative values are
/// allowed (floating-mode tours can beat the rounded best-known).
pub fn relative_gap(length: f64, best_known: f64) -> Result<f64, TspError> {
    if best_known.is_nan() || best_known <= 0.0 {
        return Err(TspError::NonPositiveBest(best_known));
    }
    Ok(100.0 * (length - best_known) / best_known)
}

/// Exhaustive optimum over all `(n-1)!/2` distinct cyclic orders.
///
/// The returned tour is the lexicographically smallest minimizing order
/// (it always starts at city 0 with `order[1] < order[n-1]`).
pub fn brute_force_optimum(
    inst: &TspInstance,
    mode: LengthMode,
) -> Result<(Tour, f64), TspError> {
    let n = inst.dimension;
    if n > 10 {
        return Err(TspError::TooLarge(n));
    }

    let mut order = vec![0usize; n];
    let mut used = vec![false; n];
    used[0] = true;
    let mut best: Option<(Vec<usize>, f64)> = None;

    fn recurse(
        inst: &TspInstance,
        mode: LengthMode,
        order: &mut Vec<usize>,
        used: &mut Vec<bool>,
        pos: usize,
        best: &mut Option<(Vec<usize>, f64)>,
    ) {
        let n = order.len();
        if pos == n {
            // One representative per cyclic order: kill the reflection.
            if order[1] > order[n - 1] {
                return;
            }
            let tour = Tour::new(order.clone());
            let len = tour_length(inst, &tour, mode).expect("enumerated tours are valid");
            let better = match best {
                None => true,
                Some((_, l)) => len < *l,
            };
            if better {
                *best = Some((order.clone(), len));
            }
            return;
        }
        for c in 1..n {
            if !used[c] {
                used[c] = true;
                order[pos] = c;
                recurse(inst, mode, order, used, pos + 1, best);
                used[c] = false;
            }
        }
    }

    recurse(inst, mode, &mut order, &mut used, 1, &mut best);
    let (order, len) = best.expect("dimension >= 3 always yields at least one tour");
    Ok((Tour::new(order), len))
}

/// Parse the best-known registry: one `name value` pair per line, `#` starts
/// a comment.
pub fn parse_best_known(text: &str) -> Result<HashMap<String, f64>, TspError> {
    let mut map = HashMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(TspError::MalformedRegistry {
                line: lineno + 1,
                msg: format!("expected `name value`, got `{line}`"),
            });
        }
        let value: f64 = fields[1].parse().map_err(|_| TspError::MalformedRegistry {
            line: lineno + 1,
            msg: format!("bad value `{}`", fields[1]),
        })?;
        if value.is_nan() || value <= 0.0 {
            return Err(TspError::NonPositiveBest(value));
        }
        map.insert(fields[0].to_string(), value);
    }
    Ok(map)
}
