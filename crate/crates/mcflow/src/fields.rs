//! Grid descriptors, scalar fields with sentinel semantics, trajectory
//! containers, and interpolation / zero-crossing / mask utilities shared by
//! both solvers.
//!
//! Node conventions (fixed across the whole crate):
//! - `Radial1D`: nodes at `r_i = i*h`, `i = 0..nr`, `nr = round(extent/h)+1`.
//!   The axis `r = 0` is node 0.
//! - `Axisym2D`: half-plane `(r, z)` with `r_i = i*h` (`nr = round(extent/h)+1`
//!   nodes) and `z_j = -extent + j*h` (`nz = round(2*extent/h)+1` nodes).
//!   Storage index `j*nr + i` (z outer, r inner).
//! - `Cartesian2D`: `x_i = -extent + i*h`, `y_j = -extent + j*h`, both with
//!   `round(2*extent/h)+1` nodes; storage index `j*nx + i`.
//! - `Cartesian3D`: `(x, y, z)` each as the Cartesian axes above; storage
//!   index `(k*ny + j)*nx + i` (x fastest, z = height slowest).
//!
//! `ESCAPED` (`f64::INFINITY`) marks graph nodes outside the evolving domain.
//! It is never produced by arithmetic: any stencil touching an escaped
//! neighbor marks its output escaped.

use crate::error::{Error, Result};
use crate::monitors::MonitorRecord;
use serde::{Deserialize, Serialize};

/// Sentinel for "the graph has no finite value here" (node outside the domain).
pub const ESCAPED: f64 = f64::INFINITY;

#[inline]
pub fn is_escaped(x: f64) -> bool {
    x == f64::INFINITY
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GridMode {
    Radial1D,
    Axisym2D,
    Cartesian2D,
    Cartesian3D,
}

impl GridMode {
    /// Number of spatial dimensions of the grid (diffusion-count for CFL).
    pub fn dims(self) -> usize {
        match self {
            GridMode::Radial1D => 1,
            GridMode::Axisym2D | GridMode::Cartesian2D => 2,
            GridMode::Cartesian3D => 3,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            GridMode::Radial1D => "Radial1D",
            GridMode::Axisym2D => "Axisym2D",
            GridMode::Cartesian2D => "Cartesian2D",
            GridMode::Cartesian3D => "Cartesian3D",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "Radial1D" => Ok(GridMode::Radial1D),
            "Axisym2D" => Ok(GridMode::Axisym2D),
            "Cartesian2D" => Ok(GridMode::Cartesian2D),
            "Cartesian3D" => Ok(GridMode::Cartesian3D),
            other => Err(Error::Parse(format!("unknown grid mode {other:?}"))),
        }
    }
}

/// Uniform grid descriptor. `n` is the rotational-symmetry dimension
/// parameter: evolving boundaries are n-dimensional hypersurfaces in
/// R^{n+1}, graphs live over R^{n+1}, and the level-set ambient is R^{n+2}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub mode: GridMode,
    pub h: f64,
    pub extent: f64,
    pub n: u32,
}

/// Validated grid constructor. Cartesian modes describe non-symmetric
/// scenarios and therefore require `n = 1`.
pub fn make_grid(mode: GridMode, h: f64, extent: f64, n: u32) -> Result<GridSpec> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::InvalidGrid(format!("h must be positive, got {h}")));
    }
    if !(extent >= 4.0 * h) || !extent.is_finite() {
        return Err(Error::InvalidGrid(format!(
            "extent {extent} must be at least 4h = {}",
            4.0 * h
        )));
    }
    if n < 1 {
        return Err(Error::InvalidGrid("n must be at least 1".into()));
    }
    if matches!(mode, GridMode::Cartesian2D | GridMode::Cartesian3D) && n != 1 {
        return Err(Error::InvalidGrid(format!(
            "Cartesian modes fix n = 1, got n = {n}"
        )));
    }
    Ok(GridSpec { mode, h, extent, n })
}

impl GridSpec {
    /// Nodes along a half axis `[0, extent]` (radial axes).
    pub fn half_axis_len(&self) -> usize {
        (self.extent / self.h).round() as usize + 1
    }

    /// Nodes along a full axis `[-extent, extent]`.
    pub fn full_axis_len(&self) -> usize {
        (2.0 * self.extent / self.h).round() as usize + 1
    }

    /// Per-axis node counts, padded with 1 for unused axes.
    /// Layout order matches storage: (fastest, middle, slowest).
    pub fn axis_counts(&self) -> (usize, usize, usize) {
        match self.mode {
            GridMode::Radial1D => (self.half_axis_len(), 1, 1),
            GridMode::Axisym2D => (self.half_axis_len(), self.full_axis_len(), 1),
            GridMode::Cartesian2D => (self.full_axis_len(), self.full_axis_len(), 1),
            GridMode::Cartesian3D => {
                let m = self.full_axis_len();
                (m, m, m)
            }
        }
    }

    pub fn node_count(&self) -> usize {
        let (a, b, c) = self.axis_counts();
        a * b * c
    }

    /// Coordinate of node `i` on a half axis (radial).
    #[inline]
    pub fn r_of(&self, i: usize) -> f64 {
        i as f64 * self.h
    }

    /// Coordinate of node `i` on a full axis.
    #[inline]
    pub fn c_of(&self, i: usize) -> f64 {
        -self.extent + i as f64 * self.h
    }

    /// Spatial coordinates of a storage index, padded with 0.0.
    pub fn coords_of(&self, idx: usize) -> (f64, f64, f64) {
        let (na, nb, _) = self.axis_counts();
        match self.mode {
            GridMode::Radial1D => (self.r_of(idx), 0.0, 0.0),
            GridMode::Axisym2D => (self.r_of(idx % na), self.c_of(idx / na), 0.0),
            GridMode::Cartesian2D => (self.c_of(idx % na), self.c_of(idx / na), 0.0),
            GridMode::Cartesian3D => {
                let i = idx % na;
                let j = (idx / na) % nb;
                let k = idx / (na * nb);
                (self.c_of(i), self.c_of(j), self.c_of(k))
            }
        }
    }
}

/// Discretized graph function u. `ESCAPED` values represent u = +infinity,
/// i.e. the node lies outside the evolving domain. `lower_bound` records the
/// smallest finite value at construction; solvers abort a run if any value
/// later falls more than 1 below it (maximum-principle violation).
#[derive(Debug, Clone)]
pub struct GraphField {
    pub grid: GridSpec,
    pub values: Vec<f64>,
    pub time: f64,
    pub lower_bound: f64,
}

impl GraphField {
    pub fn new(grid: GridSpec, values: Vec<f64>, time: f64) -> Result<Self> {
        if values.len() != grid.node_count() {
            return Err(Error::InvalidGrid(format!(
                "value count {} does not match grid nodes {}",
                values.len(),
                grid.node_count()
            )));
        }
        let mut lower = f64::INFINITY;
        for &v in &values {
            if v.is_nan() || v == f64::NEG_INFINITY {
                return Err(Error::InvalidGrid(
                    "graph values must be finite or the escaped sentinel".into(),
                ));
            }
            if !is_escaped(v) && v < lower {
                lower = v;
            }
        }
        Ok(GraphField {
            grid,
            values,
            time,
            lower_bound: lower,
        })
    }

    /// Successor snapshot sharing this field's construction-time lower bound.
    pub fn successor(&self, values: Vec<f64>, time: f64) -> GraphField {
        debug_assert_eq!(values.len(), self.values.len());
        GraphField {
            grid: self.grid,
            values,
            time,
            lower_bound: self.lower_bound,
        }
    }

    pub fn min_finite(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .filter(|v| !is_escaped(*v))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn has_finite(&self) -> bool {
        self.values.iter().any(|v| !is_escaped(*v))
    }
}

/// Which of the three weak flows a level-set field represents:
/// the graph flow in R^{n+2} (`WGraph`), the projected-boundary flow in
/// R^{n+1} (`VtildeBoundary`), or the boundary-cylinder flow in R^{n+2}
/// (`VCylinder`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LevelSetLabel {
    WGraph,
    VtildeBoundary,
    VCylinder,
}

impl LevelSetLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            LevelSetLabel::WGraph => "w_graph",
            LevelSetLabel::VtildeBoundary => "vtilde_boundary",
            LevelSetLabel::VCylinder => "v_cylinder",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "w_graph" => Ok(LevelSetLabel::WGraph),
            "vtilde_boundary" => Ok(LevelSetLabel::VtildeBoundary),
            "v_cylinder" => Ok(LevelSetLabel::VCylinder),
            other => Err(Error::Parse(format!("unknown level-set label {other:?}"))),
        }
    }
}

/// Truncated-signed-distance-like function: values in [-1, 1], negative
/// inside the tracked set (or above the tracked graph).
#[derive(Debug, Clone)]
pub struct LevelSetField {
    pub grid: GridSpec,
    pub values: Vec<f64>,
    pub time: f64,
    pub label: LevelSetLabel,
}

// Constructor tolerance: roundoff from distance formulas may overshoot the
// truncation band by a few ulp; anything worse is a caller bug.
const CLAMP_SLACK: f64 = 1e-9;

impl LevelSetField {
    pub fn new(
        grid: GridSpec,
        mut values: Vec<f64>,
        time: f64,
        label: LevelSetLabel,
    ) -> Result<Self> {
        if values.len() != grid.node_count() {
            return Err(Error::InvalidGrid(format!(
                "value count {} does not match grid nodes {}",
                values.len(),
                grid.node_count()
            )));
        }
        for v in values.iter_mut() {
            if v.is_nan() || v.abs() > 1.0 + CLAMP_SLACK {
                return Err(Error::InvalidGrid(format!(
                    "level-set values must lie in [-1, 1], got {v}"
                )));
            }
            *v = v.clamp(-1.0, 1.0);
        }
        Ok(LevelSetField {
            grid,
            values,
            time,
            label,
        })
    }
}

/// Anything that can sit in a `Trajectory`.
pub trait Snapshot {
    fn time(&self) -> f64;
    fn grid(&self) -> &GridSpec;
    fn values(&self) -> &[f64];
}

impl Snapshot for GraphField {
    fn time(&self) -> f64 {
        self.time
    }
    fn grid(&self) -> &GridSpec {
        &self.grid
    }
    fn values(&self) -> &[f64] {
        &self.values
    }
}

impl Snapshot for LevelSetField {
    fn time(&self) -> f64 {
        self.time
    }
    fn grid(&self) -> &GridSpec {
        &self.grid
    }
    fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Time-ordered sequence of snapshots on one grid, plus per-step monitor
/// records for graph runs.
#[derive(Debug, Clone)]
pub struct Trajectory<F> {
    pub snapshots: Vec<F>,
    pub monitors: Vec<MonitorRecord>,
}

impl<F: Snapshot> Trajectory<F> {
    pub fn new() -> Self {
        Trajectory {
            snapshots: Vec::new(),
            monitors: Vec::new(),
        }
    }

    pub fn push(&mut self, snap: F) -> Result<()> {
        if let Some(last) = self.snapshots.last() {
            if snap.time() <= last.time() {
                return Err(Error::Mismatch(format!(
                    "snapshot times must strictly increase: {} then {}",
                    last.time(),
                    snap.time()
                )));
            }
            if snap.grid() != last.grid() {
                return Err(Error::Mismatch("snapshots must share one grid".into()));
            }
        }
        self.snapshots.push(snap);
        Ok(())
    }

    pub fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.time()).collect()
    }

    /// Snapshot whose time matches `t` within a relative tolerance.
    /// Runs with different dt hit nominally equal times with float drift;
    /// 1e-9 relative covers accumulated summation error.
    pub fn find_time(&self, t: f64, rtol: f64) -> Option<&F> {
        let tol = rtol * t.abs().max(1.0);
        self.snapshots.iter().find(|s| (s.time() - t).abs() <= tol)
    }
}

impl<F: Snapshot> Default for Trajectory<F> {
    fn default() -> Self {
        Self::new()
    }
}

/// A grid line along which 1D values can be extracted. Indices refer to the
/// fixed coordinate.
#[derive(Debug, Clone, Copy)]
pub enum GridLine {
    /// The single line of a Radial1D grid.
    Radial,
    /// Along r at fixed z-row `j` (Axisym2D).
    AxisymRow { j: usize },
    /// Along z at fixed r-column `i` (Axisym2D).
    AxisymCol { i: usize },
    /// Along x at fixed y-row `j` (Cartesian2D).
    CartesianRow { j: usize },
    /// Along y at fixed x-column `i` (Cartesian2D).
    CartesianCol { i: usize },
}

/// Extract the values on a grid line together with the coordinate of its
/// first node and the spacing.
pub fn line_values(grid: &GridSpec, values: &[f64], line: GridLine) -> (Vec<f64>, f64, f64) {
    let (na, nb, _) = grid.axis_counts();
    match (grid.mode, line) {
        (GridMode::Radial1D, GridLine::Radial) => (values.to_vec(), 0.0, grid.h),
        (GridMode::Axisym2D, GridLine::AxisymRow { j }) => {
            (values[j * na..(j + 1) * na].to_vec(), 0.0, grid.h)
        }
        (GridMode::Axisym2D, GridLine::AxisymCol { i }) => {
            let col = (0..nb).map(|j| values[j * na + i]).collect();
            (col, -grid.extent, grid.h)
        }
        (GridMode::Cartesian2D, GridLine::CartesianRow { j }) => (
            values[j * na..(j + 1) * na].to_vec(),
            -grid.extent,
            grid.h,
        ),
        (GridMode::Cartesian2D, GridLine::CartesianCol { i }) => {
            let col = (0..nb).map(|j| values[j * na + i]).collect();
            (col, -grid.extent, grid.h)
        }
        (mode, line) => panic!("line {line:?} not defined on {mode:?} grids"),
    }
}

/// Linearly interpolated sign-change positions of 1D samples.
/// Exact zeros at nodes are reported once; affine data yields the exact root.
pub fn crossings_1d(vals: &[f64], origin: f64, h: f64) -> Vec<f64> {
    let mut out = Vec::new();
    for k in 0..vals.len() {
        let a = vals[k];
        if a == 0.0 {
            if k == 0 || vals[k - 1] != 0.0 {
                out.push(origin + k as f64 * h);
            }
            continue;
        }
        if k + 1 < vals.len() {
            let b = vals[k + 1];
            if b != 0.0 && (a < 0.0) != (b < 0.0) {
                out.push(origin + (k as f64 + a / (a - b)) * h);
            }
        }
    }
    out
}

/// Positions where the field changes sign along a grid line.
pub fn zero_crossings(grid: &GridSpec, values: &[f64], line: GridLine) -> Vec<f64> {
    let (vals, origin, h) = line_values(grid, values, line);
    crossings_1d(&vals, origin, h)
}

/// Mask of nodes outside the discrete domain proxy: escaped or `u >= a`.
pub fn escaped_region(field: &GraphField, a: f64) -> Vec<bool> {
    field.values.iter().map(|&v| is_escaped(v) || v >= a).collect()
}

/// Bilinear sample of a 2D field (Axisym2D in (r, z), Cartesian2D in (x, y)).
/// Returns `None` outside the grid. An escaped corner propagates.
pub fn sample_2d(grid: &GridSpec, values: &[f64], a: f64, b: f64) -> Option<f64> {
    let (na, nb, _) = grid.axis_counts();
    let (oa, ob) = match grid.mode {
        GridMode::Axisym2D => (0.0, -grid.extent),
        GridMode::Cartesian2D => (-grid.extent, -grid.extent),
        _ => return None,
    };
    let fa = (a - oa) / grid.h;
    let fb = (b - ob) / grid.h;
    if fa < 0.0 || fb < 0.0 || fa > (na - 1) as f64 || fb > (nb - 1) as f64 {
        return None;
    }
    let ia = (fa.floor() as usize).min(na - 2);
    let jb = (fb.floor() as usize).min(nb - 2);
    let ta = fa - ia as f64;
    let tb = fb - jb as f64;
    let v00 = values[jb * na + ia];
    let v10 = values[jb * na + ia + 1];
    let v01 = values[(jb + 1) * na + ia];
    let v11 = values[(jb + 1) * na + ia + 1];
    if is_escaped(v00) || is_escaped(v10) || is_escaped(v01) || is_escaped(v11) {
        return Some(ESCAPED);
    }
    Some(
        v00 * (1.0 - ta) * (1.0 - tb)
            + v10 * ta * (1.0 - tb)
            + v01 * (1.0 - ta) * tb
            + v11 * ta * tb,
    )
}

/// Count of face-connected components of `true` nodes.
pub fn connected_components(grid: &GridSpec, mask: &[bool]) -> usize {
    let (na, nb, nc) = grid.axis_counts();
    let mut seen = vec![false; mask.len()];
    let mut stack = Vec::new();
    let mut count = 0;
    for start in 0..mask.len() {
        if !mask[start] || seen[start] {
            continue;
        }
        count += 1;
        seen[start] = true;
        stack.push(start);
        while let Some(idx) = stack.pop() {
            let i = idx % na;
            let j = (idx / na) % nb;
            let k = idx / (na * nb);
            let mut push = |nidx: usize| {
                if mask[nidx] && !seen[nidx] {
                    seen[nidx] = true;
                    stack.push(nidx);
                }
            };
            if i > 0 {
                push(idx - 1);
            }
            if i + 1 < na {
                push(idx + 1);
            }
            if j > 0 {
                push(idx - na);
            }
            if j + 1 < nb {
                push(idx + na);
            }
            if k > 0 {
                push(idx - na * nb);
            }
            if k + 1 < nc {
                push(idx + na * nb);
            }
        }
    }
    count
}
