//! Tour and placement diagnostics: convex hulls, edge-crossing counts,
//! hexagonal edge-midpoint density, and deterministic 800x800 PNG renders
//! of all four with machine-checkable metrics attached.

use std::collections::BTreeMap;
use std::io::Cursor;

use image::{ImageFormat, Rgb, RgbImage};
use serde::{Deserialize, Serialize};

use crate::placement::{density_penalty, PlacementProblem};
use crate::tsp::{Tour, TspInstance};

pub const CANVAS: u32 = 800;
const PAD_FRACTION: f64 = 0.05;

#[derive(Debug, thiserror::Error)]
pub enum VisualError {
    #[error("need at least {needed} cities, got {got}")]
    TooShort { needed: usize, got: usize },
    #[error("hull needs at least 3 distinct points: {0}")]
    HullInput(String),
    #[error("inputs do not match artifact kind {0:?}")]
    KindInputMismatch(ArtifactKind),
    #[error("tour is not a valid permutation for the instance")]
    InvalidTour,
    #[error("hex size must be positive, got {0}")]
    BadHexSize(f64),
    #[error("png encoding failed: {0}")]
    Encode(String),
    #[error(transparent)]
    Placement(#[from] crate::placement::PlacementError),
}

/// The four renderable diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArtifactKind {
    Route,
    CrossingHeatmap,
    Density,
    Placement,
}

impl ArtifactKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ArtifactKind::Route => "route",
            ArtifactKind::CrossingHeatmap => "crossing_heatmap",
            ArtifactKind::Density => "density",
            ArtifactKind::Placement => "placement",
        }
    }
}

/// A rendered diagnostic: PNG bytes plus the metrics extracted on the way.
#[derive(Debug, Clone)]
pub struct VisualArtifact {
    pub kind: ArtifactKind,
    pub png: Vec<u8>,
    pub width: u32,
    pub height: u32,
    pub metrics: BTreeMap<String, f64>,
}

/// What a render operates on.
pub enum RenderInput<'a> {
    Tsp {
        inst: &'a TspInstance,
        tour: &'a Tour,
    },
    Placement {
        prob: &'a PlacementProblem,
        coords: &'a [f64],
    },
}

/// A convex hull; `degenerate` marks the all-collinear case, where only the
/// two extreme points are returned.
#[derive(Debug, Clone, PartialEq)]
pub struct Hull {
    pub vertices: Vec<(f64, f64)>,
    pub degenerate: bool,
}

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Andrew monotone chain, counter-clockwise, collinear boundary points
/// excluded.
pub fn convex_hull(points: &[(f64, f64)]) -> Result<Hull, VisualError> {
    if points.len() < 3 {
        return Err(VisualError::HullInput(format!(
            "got {} points",
            points.len()
        )));
    }
    let mut pts: Vec<(f64, f64)> = points.to_vec();
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    if pts.len() == 1 {
        return Err(VisualError::HullInput("all points coincide".into()));
    }

    let mut lower: Vec<(f64, f64)> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(f64, f64)> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);

    if lower.len() < 3 {
        // Every point sits on one line: report the two extremes.
        let lo = *pts.first().unwrap();
        let hi = *pts.last().unwrap();
        return Ok(Hull {
            vertices: vec![lo, hi],
            degenerate: true,
        });
    }
    Ok(Hull {
        vertices: lower,
        degenerate: false,
    })
}

fn orient(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> f64 {
    cross(a, b, c)
}

/// True when segments `(p1, p2)` and `(q1, q2)` properly cross, or overlap
/// collinearly over a positive length (counted as one crossing).
fn segments_cross(p1: (f64, f64), p2: (f64, f64), q1: (f64, f64), q2: (f64, f64)) -> bool {
    let o1 = orient(p1, p2, q1);
    let o2 = orient(p1, p2, q2);
    let o3 = orient(q1, q2, p1);
    let o4 = orient(q1, q2, p2);
    if o1 * o2 < 0.0 && o3 * o4 < 0.0 {
        return true;
    }
    if o1 == 0.0 && o2 == 0.0 && o3 == 0.0 && o4 == 0.0 {
        // Collinear: overlapping with positive length counts once.
        let (pa, pb) = if p1 <= p2 { (p1, p2) } else { (p2, p1) };
        let (qa, qb) = if q1 <= q2 { (q1, q2) } else { (q2, q1) };
        let lo = if pa >= qa { pa } else { qa };
        let hi = if pb <= qb { pb } else { qb };
        return lo < hi;
    }
    false
}

/// The tour's n edges, as coordinate pairs.
fn tour_edges(inst: &TspInstance, tour: &Tour) -> Vec<((f64, f64), (f64, f64))> {
    let n = tour.order.len();
    (0..n)
        .map(|i| {
            (
                inst.coords[tour.order[i]],
                inst.coords[tour.order[(i + 1) % n]],
            )
        })
        .collect()
}

/// Crossings each edge participates in; adjacent edges never count.
pub fn edge_crossing_heat(inst: &TspInstance, tour: &Tour) -> Result<Vec<u64>, VisualError> {
    let n = tour.order.len();
    if n < 4 {
        return Err(VisualError::TooShort { needed: 4, got: n });
    }
    if !tour.is_permutation_of(inst.dimension) {
        return Err(VisualError::InvalidTour);
    }
    let edges = tour_edges(inst, tour);
    let mut heat = vec![0u64; n];
    for i in 0..n {
        for j in i + 1..n {
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                continue;
            }
            if segments_cross(edges[i].0, edges[i].1, edges[j].0, edges[j].1) {
                heat[i] += 1;
                heat[j] += 1;
            }
        }
    }
    Ok(heat)
}

/// Number of crossings between non-adjacent tour edges.
pub fn count_crossings(inst: &TspInstance, tour: &Tour) -> Result<u64, VisualError> {
    let heat = edge_crossing_heat(inst, tour)?;
    Ok(heat.iter().sum::<u64>() / 2)
}

/// One hexagonal bin of edge midpoints. `q`/`r` are axial coordinates on a
/// pointy-top grid anchored at the instance bounding-box minimum.
#[derive(Debug, Clone, PartialEq)]
pub struct HexBin {
    pub q: i64,
    pub r: i64,
    pub center: (f64, f64),
    pub count: u64,
}

fn axial_round(qf: f64, rf: f64) -> (i64, i64) {
    // Cube rounding: nearest hexagon center, ties resolved by the axis with
    // the smallest rounding error (then by fixing the largest deviation).
    let xf = qf;
    let zf = rf;
    let yf = -xf - zf;
    let mut x = xf.round();
    let mut z = zf.round();
    let y = yf.round();
    let dx = (x - xf).abs();
    let dy = (y - yf).abs();
    let dz = (z - zf).abs();
    if dx > dy && dx > dz {
        x = -y - z;
    } else if dy <= dz {
        z = -x - y;
    }
    (x as i64, z as i64)
}

fn hex_center(q: i64, r: i64, size: f64, origin: (f64, f64)) -> (f64, f64) {
    let x = size * 3f64.sqrt() * (q as f64 + r as f64 / 2.0);
    let y = size * 1.5 * r as f64;
    (origin.0 + x, origin.1 + y)
}

fn point_to_hex(p: (f64, f64), size: f64, origin: (f64, f64)) -> (i64, i64) {
    let px = p.0 - origin.0;
    let py = p.1 - origin.1;
    let qf = (3f64.sqrt() / 3.0 * px - py / 3.0) / size;
    let rf = (2.0 / 3.0 * py) / size;
    axial_round(qf, rf)
}

fn bbox(points: &[(f64, f64)]) -> ((f64, f64), (f64, f64)) {
    let mut min = (f64::INFINITY, f64::INFINITY);
    let mut max = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for &(x, y) in points {
        min.0 = min.0.min(x);
        min.1 = min.1.min(y);
        max.0 = max.0.max(x);
        max.1 = max.1.max(y);
    }
    (min, max)
}

/// Default hexagon size: bounding-box diagonal / 20.
pub fn default_hex_size(inst: &TspInstance) -> f64 {
    let (min, max) = bbox(&inst.coords);
    let diag = (max.0 - min.0).hypot(max.1 - min.1);
    if diag > 0.0 {
        diag / 20.0
    } else {
        1.0
    }
}

/// Bin the n edge midpoints of a tour into pointy-top hexagons. Every
/// midpoint lands in exactly one bin, so the counts sum to n. Only nonempty
/// bins are returned, sorted by axial coordinates.
pub fn hex_bin_counts(
    inst: &TspInstance,
    tour: &Tour,
    hex_size: f64,
) -> Result<Vec<HexBin>, VisualError> {
    let n = tour.order.len();
    if n < 3 {
        return Err(VisualError::TooShort { needed: 3, got: n });
    }
    if !tour.is_permutation_of(inst.dimension) {
        return Err(VisualError::InvalidTour);
    }
    if hex_size.is_nan() || hex_size <= 0.0 {
        return Err(VisualError::BadHexSize(hex_size));
    }
    let (origin, _) = bbox(&inst.coords);
    let mut bins: BTreeMap<(i64, i64), u64> = BTreeMap::new();
    for (a, b) in tour_edges(inst, tour) {
        let mid = ((a.0 + b.0) / 2.0, (a.1 + b.1) / 2.0);
        let key = point_to_hex(mid, hex_size, origin);
        *bins.entry(key).or_insert(0) += 1;
    }
    Ok(bins
        .into_iter()
        .map(|((q, r), count)| HexBin {
            q,
            r,
            center: hex_center(q, r, hex_size, origin),
            count,
        })
        .collect())
}

// ---------------------------------------------------------------------------
// Rasterization

/// Fixed palette.
mod palette {
    use image::Rgb;

    pub const BACKGROUND: Rgb<u8> = Rgb([255, 255, 255]);
    pub const EDGE: Rgb<u8> = Rgb([40, 80, 200]);
    pub const CITY: Rgb<u8> = Rgb([20, 20, 20]);
    pub const HULL: Rgb<u8> = Rgb([235, 140, 20]);
    pub const HEAT_COLD: Rgb<u8> = Rgb([205, 205, 205]);
    pub const HEAT_HOT: Rgb<u8> = Rgb([215, 30, 30]);
    pub const HEX_LOW: Rgb<u8> = Rgb([245, 242, 250]);
    pub const HEX_HIGH: Rgb<u8> = Rgb([106, 40, 170]);
    pub const HEX_OUTLINE: Rgb<u8> = Rgb([190, 190, 190]);
    pub const CELL_FILL: Rgb<u8> = Rgb([95, 140, 200]);
    pub const CELL_BORDER: Rgb<u8> = Rgb([35, 60, 110]);
    pub const REGION: Rgb<u8> = Rgb([0, 0, 0]);
    pub const OVERFLOW: Rgb<u8> = Rgb([250, 200, 200]);

    pub fn lerp(lo: Rgb<u8>, hi: Rgb<u8>, t: f64) -> Rgb<u8> {
        let t = t.clamp(0.0, 1.0);
        let mix = |a: u8, b: u8| (a as f64 + t * (b as f64 - a as f64)).round() as u8;
        Rgb([mix(lo[0], hi[0]), mix(lo[1], hi[1]), mix(lo[2], hi[2])])
    }
}

/// World-to-pixel transform: padded bounding box fit into the canvas,
/// aspect preserved, y flipped.
struct Frame {
    min: (f64, f64),
    scale: f64,
    offset: (f64, f64),
}

impl Frame {
    fn fit(min: (f64, f64), max: (f64, f64)) -> Self {
        let span_x = (max.0 - min.0).max(1e-9);
        let span_y = (max.1 - min.1).max(1e-9);
        let pad_x = span_x * PAD_FRACTION;
        let pad_y = span_y * PAD_FRACTION;
        let min = (min.0 - pad_x, min.1 - pad_y);
        let span = (span_x + 2.0 * pad_x, span_y + 2.0 * pad_y);
        let scale = ((CANVAS - 1) as f64 / span.0).min((CANVAS - 1) as f64 / span.1);
        let used = (span.0 * scale, span.1 * scale);
        let offset = (
            ((CANVAS - 1) as f64 - used.0) / 2.0,
            ((CANVAS - 1) as f64 - used.1) / 2.0,
        );
        Self { min, scale, offset }
    }

    fn px(&self, p: (f64, f64)) -> (i64, i64) {
        let x = self.offset.0 + (p.0 - self.min.0) * self.scale;
        let y = (CANVAS - 1) as f64 - (self.offset.1 + (p.1 - self.min.1) * self.scale);
        (x.round() as i64, y.round() as i64)
    }
}

fn put(img: &mut RgbImage, x: i64, y: i64, color: Rgb<u8>) {
    if x >= 0 && y >= 0 && (x as u32) < img.width() && (y as u32) < img.height() {
        img.put_pixel(x as u32, y as u32, color);
    }
}

fn draw_line(img: &mut RgbImage, a: (i64, i64), b: (i64, i64), color: Rgb<u8>) {
    // Bresenham
    let (mut x0, mut y0) = a;
    let (x1, y1) = b;
    let dx = (x1 - x0).abs();
    let dy = -(y1 - y0).abs();
    let sx = if x0 < x1 { 1 } else { -1 };
    let sy = if y0 < y1 { 1 } else { -1 };
    let mut err = dx + dy;
    loop {
        put(img, x0, y0, color);
        if x0 == x1 && y0 == y1 {
            break;
        }
        let e2 = 2 * err;
        if e2 >= dy {
            err += dy;
            x0 += sx;
        }
        if e2 <= dx {
            err += dx;
            y0 += sy;
        }
    }
}

fn draw_disc(img: &mut RgbImage, c: (i64, i64), radius: i64, color: Rgb<u8>) {
    for dy in -radius..=radius {
        for dx in -radius..=radius {
            if dx * dx + dy * dy <= radius * radius {
                put(img, c.0 + dx, c.1 + dy, color);
            }
        }
    }
}

fn fill_convex_polygon(img: &mut RgbImage, verts: &[(i64, i64)], color: Rgb<u8>) {
    let min_y = verts.iter().map(|v| v.1).min().unwrap_or(0).max(0);
    let max_y = verts
        .iter()
        .map(|v| v.1)
        .max()
        .unwrap_or(0)
        .min(CANVAS as i64 - 1);
    for y in min_y..=max_y {
        // Intersect the scanline with every polygon edge.
        let mut xs: Vec<f64> = Vec::new();
        for i in 0..verts.len() {
            let (x0, y0) = verts[i];
            let (x1, y1) = verts[(i + 1) % verts.len()];
            if y0 == y1 {
                continue;
            }
            let (lo, hi) = if y0 < y1 { (y0, y1) } else { (y1, y0) };
            if y < lo || y >= hi {
                continue;
            }
            let t = (y - y0) as f64 / (y1 - y0) as f64;
            xs.push(x0 as f64 + t * (x1 - x0) as f64);
        }
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for pair in xs.chunks(2) {
            if let [a, b] = pair {
                let from = a.round() as i64;
                let to = b.round() as i64;
                for x in from..=to {
                    put(img, x, y, color);
                }
            }
        }
    }
}

fn rect_outline(img: &mut RgbImage, lo: (i64, i64), hi: (i64, i64), color: Rgb<u8>) {
    draw_line(img, (lo.0, lo.1), (hi.0, lo.1), color);
    draw_line(img, (hi.0, lo.1), (hi.0, hi.1), color);
    draw_line(img, (hi.0, hi.1), (lo.0, hi.1), color);
    draw_line(img, (lo.0, hi.1), (lo.0, lo.1), color);
}

fn fill_rect(img: &mut RgbImage, lo: (i64, i64), hi: (i64, i64), color: Rgb<u8>) {
    for y in lo.1.min(hi.1)..=lo.1.max(hi.1) {
        for x in lo.0.min(hi.0)..=lo.0.max(hi.0) {
            put(img, x, y, color);
        }
    }
}

fn encode_png(img: &RgbImage) -> Result<Vec<u8>, VisualError> {
    let mut buf = Cursor::new(Vec::new());
    img.write_to(&mut buf, ImageFormat::Png)
        .map_err(|e| VisualError::Encode(e.to_string()))?;
    Ok(buf.into_inner())
}

fn artifact(
    kind: ArtifactKind,
    img: RgbImage,
    metrics: BTreeMap<String, f64>,
) -> Result<VisualArtifact, VisualError> {
    let png = encode_png(&img)?;
    Ok(VisualArtifact {
        kind,
        png,
        width: img.width(),
        height: img.height(),
        metrics,
    })
}

fn render_route(inst: &TspInstance, tour: &Tour) -> Result<VisualArtifact, VisualError> {
    if !tour.is_permutation_of(inst.dimension) {
        return Err(VisualError::InvalidTour);
    }
    let (min, max) = bbox(&inst.coords);
    let frame = Frame::fit(min, max);
    let mut img = RgbImage::from_pixel(CANVAS, CANVAS, palette::BACKGROUND);

    for (a, b) in tour_edges(inst, tour) {
        draw_line(&mut img, frame.px(a), frame.px(b), palette::EDGE);
    }
    let hull = convex_hull(&inst.coords)?;
    let hv = &hull.vertices;
    for i in 0..hv.len() {
        let a = frame.px(hv[i]);
        let b = frame.px(hv[(i + 1) % hv.len()]);
        draw_line(&mut img, a, b, palette::HULL);
    }
    for &c in &inst.coords {
        draw_disc(&mut img, frame.px(c), 3, palette::CITY);
    }

    let mut metrics = BTreeMap::new();
    metrics.insert("hull_size".into(), hv.len() as f64);
    artifact(ArtifactKind::Route, img, metrics)
}

fn render_crossing_heatmap(
    inst: &TspInstance,
    tour: &Tour,
) -> Result<VisualArtifact, VisualError> {
    let heat = edge_crossing_heat(inst, tour)?;
    let crossing_count = heat.iter().sum::<u64>() / 2;
    let max_heat = heat.iter().copied().max().unwrap_or(0);

    let (min, max) = bbox(&inst.coords);
    let frame = Frame::fit(min, max);
    let mut img = RgbImage::from_pixel(CANVAS, CANVAS, palette::BACKGROUND);

    let edges = tour_edges(inst, tour);
    for (edge, &h) in edges.iter().zip(&heat) {
        let t = if max_heat == 0 {
            0.0
        } else {
            h as f64 / max_heat as f64
        };
        let color = palette::lerp(palette::HEAT_COLD, palette::HEAT_HOT, t);
        draw_line(&mut img, frame.px(edge.0), frame.px(edge.1), color);
    }
    for &c in &inst.coords {
        draw_disc(&mut img, frame.px(c), 2, palette::CITY);
    }

    let mut metrics = BTreeMap::new();
    metrics.insert("crossing_count".into(), crossing_count as f64);
    metrics.insert("max_edge_heat".into(), max_heat as f64);
    artifact(ArtifactKind::CrossingHeatmap, img, metrics)
}

fn hex_corners(center: (f64, f64), size: f64) -> Vec<(f64, f64)> {
    // Pointy-top: first corner at 30 degrees.
    (0..6)
        .map(|i| {
            let angle = std::f64::consts::PI / 180.0 * (60.0 * i as f64 + 30.0);
            (
                center.0 + size * angle.cos(),
                center.1 + size * angle.sin(),
            )
        })
        .collect()
}

fn render_density(
    inst: &TspInstance,
    tour: &Tour,
    hex_size: f64,
) -> Result<VisualArtifact, VisualError> {
    let bins = hex_bin_counts(inst, tour, hex_size)?;
    let max_count = bins.iter().map(|b| b.count).max().unwrap_or(0);

    let (min, max) = bbox(&inst.coords);
    let frame = Frame::fit(min, max);
    let mut img = RgbImage::from_pixel(CANVAS, CANVAS, palette::BACKGROUND);

    for bin in &bins {
        let t = if max_count == 0 {
            0.0
        } else {
            bin.count as f64 / max_count as f64
        };
        let corners: Vec<(i64, i64)> = hex_corners(bin.center, hex_size)
            .into_iter()
            .map(|p| frame.px(p))
            .collect();
        fill_convex_polygon(
            &mut img,
            &corners,
            palette::lerp(palette::HEX_LOW, palette::HEX_HIGH, t),
        );
        for i in 0..corners.len() {
            draw_line(
                &mut img,
                corners[i],
                corners[(i + 1) % corners.len()],
                palette::HEX_OUTLINE,
            );
        }
    }
    for &c in &inst.coords {
        draw_disc(&mut img, frame.px(c), 2, palette::CITY);
    }

    let mut metrics = BTreeMap::new();
    metrics.insert("nonzero_bins".into(), bins.len() as f64);
    metrics.insert("max_count".into(), max_count as f64);
    artifact(ArtifactKind::Density, img, metrics)
}

fn render_placement(
    prob: &PlacementProblem,
    coords: &[f64],
) -> Result<VisualArtifact, VisualError> {
    let n = prob.num_cells();
    if coords.len() != 2 * n {
        return Err(VisualError::KindInputMismatch(ArtifactKind::Placement));
    }
    let frame = Frame::fit((0.0, 0.0), prob.region);
    let mut img = RgbImage::from_pixel(CANVAS, CANVAS, palette::BACKGROUND);

    // Shade overflowing bins behind the cells.
    let b = prob.bin_size;
    let capacity = b * b;
    let nx = (prob.region.0 / b).ceil().max(1.0) as usize;
    let ny = (prob.region.1 / b).ceil().max(1.0) as usize;
    let mut occupancy = vec![0.0f64; nx * ny];
    for i in 0..n {
        let (w, h) = prob.cells[i];
        let (cx0, cx1) = (coords[i] - w / 2.0, coords[i] + w / 2.0);
        let (cy0, cy1) = (coords[n + i] - h / 2.0, coords[n + i] + h / 2.0);
        for bx in 0..nx {
            let ox = (cx1.min((bx + 1) as f64 * b) - cx0.max(bx as f64 * b)).max(0.0);
            if ox <= 0.0 {
                continue;
            }
            for by in 0..ny {
                let oy = (cy1.min((by + 1) as f64 * b) - cy0.max(by as f64 * b)).max(0.0);
                occupancy[by * nx + bx] += ox * oy;
            }
        }
    }
    let mut overflow_bins = 0u64;
    for by in 0..ny {
        for bx in 0..nx {
            if occupancy[by * nx + bx] > capacity {
                overflow_bins += 1;
                let lo = frame.px((bx as f64 * b, (by + 1) as f64 * b));
                let hi = frame.px(((bx + 1) as f64 * b, by as f64 * b));
                fill_rect(&mut img, lo, hi, palette::OVERFLOW);
            }
        }
    }

    for i in 0..n {
        let (w, h) = prob.cells[i];
        let lo = frame.px((coords[i] - w / 2.0, coords[n + i] + h / 2.0));
        let hi = frame.px((coords[i] + w / 2.0, coords[n + i] - h / 2.0));
        fill_rect(&mut img, lo, hi, palette::CELL_FILL);
        rect_outline(&mut img, lo, hi, palette::CELL_BORDER);
    }
    rect_outline(
        &mut img,
        frame.px((0.0, prob.region.1)),
        frame.px((prob.region.0, 0.0)),
        palette::REGION,
    );

    let mut metrics = BTreeMap::new();
    metrics.insert("overflow_bins".into(), overflow_bins as f64);
    artifact(ArtifactKind::Placement, img, metrics)
}

/// Render one diagnostic. PNG bytes are deterministic for fixed inputs.
/// `hex_size` only applies to [`ArtifactKind::Density`]; `None` uses the
/// instance default (bounding-box diagonal / 20).
pub fn render_artifact(
    kind: ArtifactKind,
    input: &RenderInput<'_>,
    hex_size: Option<f64>,
) -> Result<VisualArtifact, VisualError> {
    match (kind, input) {
        (ArtifactKind::Route, RenderInput::Tsp { inst, tour }) => render_route(inst, tour),
        (ArtifactKind::CrossingHeatmap, RenderInput::Tsp { inst, tour }) => {
            render_crossing_heatmap(inst, tour)
        }
        (ArtifactKind::Density, RenderInput::Tsp { inst, tour }) => {
            let size = hex_size.unwrap_or_else(|| default_hex_size(inst));
            render_density(inst, tour, size)
        }
        (ArtifactKind::Placement, RenderInput::Placement { prob, coords }) => {
            render_placement(prob, coords)
        }
        _ => Err(VisualError::KindInputMismatch(kind)),
    }
}

/// Convenience: the three TSP diagnostics in fixed order.
pub fn render_tsp_triple(
    inst: &TspInstance,
    tour: &Tour,
    hex_size: Option<f64>,
) -> Result<Vec<VisualArtifact>, VisualError> {
    let input = RenderInput::Tsp { inst, tour };
    Ok(vec![
        render_artifact(ArtifactKind::Route, &input, hex_size)?,
        render_artifact(ArtifactKind::CrossingHeatmap, &input, hex_size)?,
        render_artifact(ArtifactKind::Density, &input, hex_size)?,
    ])
}

/// Density penalty value at the given coords (placement artifacts report it
/// alongside the overflow-bin count in run logs).
pub fn placement_overflow(
    prob: &PlacementProblem,
    coords: &[f64],
) -> Result<f64, VisualError> {
    Ok(density_penalty(prob, coords, false)?.0)
}
