//! Closed-form reference solutions used as ground truth: round spheres and
//! round cylinders shrinking by their curvature, their collapse times, the
//! exact radial profile solved by the unregularized level-set equation, and
//! sphere barriers checked against stored graph trajectories.

use crate::error::{Error, Result};
use crate::fields::{is_escaped, GraphField, GridMode, Trajectory};

/// Which round hypersurface shrinks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoundKind {
    /// m-dimensional sphere in ℝ^{m+1}; curvature m/r
    Sphere { m: u32 },
    /// S^n × ℝ in ℝ^{n+2}; the spherical factor shrinks with curvature n/r
    Cylinder { n: u32 },
}

/// A shrinking sphere or cylinder: radius √(r0² − 2m(t−t0)).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundSolution {
    pub kind: RoundKind,
    pub r0: f64,
    pub t0: f64,
}

impl RoundSolution {
    pub fn new(kind: RoundKind, r0: f64, t0: f64) -> Result<Self> {
        let m = match kind {
            RoundKind::Sphere { m } => m,
            RoundKind::Cylinder { n } => n,
        };
        if !(r0 > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "round solution needs a positive initial radius, got {r0}"
            )));
        }
        if m == 0 {
            return Err(Error::InvalidConfig(
                "a 0-dimensional sphere does not move".into(),
            ));
        }
        Ok(RoundSolution { kind, r0, t0 })
    }

    /// Curvature factor m in ṙ = −m/r.
    pub fn factor(&self) -> f64 {
        match self.kind {
            RoundKind::Sphere { m } => m as f64,
            RoundKind::Cylinder { n } => n as f64,
        }
    }

    /// Radius at time t (≥ t0); `None` once the solution is extinct.
    pub fn radius(&self, t: f64) -> Result<Option<f64>> {
        if t < self.t0 {
            return Err(Error::InvalidConfig(format!(
                "round solution starts at t0 = {}, queried at t = {t}",
                self.t0
            )));
        }
        let r2 = self.r0 * self.r0 - 2.0 * self.factor() * (t - self.t0);
        if r2 < 0.0 {
            Ok(None)
        } else {
            Ok(Some(r2.sqrt()))
        }
    }

    /// Time at which the radius reaches zero: t0 + r0²/(2m).
    pub fn collapse_time(&self) -> f64 {
        self.t0 + self.r0 * self.r0 / (2.0 * self.factor())
    }

    /// The exact (untruncated) radial level-set profile
    /// f(s, t) = √(s² + 2m(t−t0)) − r0,
    /// whose zero level is the shrinking radius and which solves the
    /// unregularized equation f_t = Δf − f_i f_j f_ij/|Df|² in the ambient
    /// space ℝ^{m+1} (radial coordinate s).
    pub fn exact_levelset_profile(&self, s: f64, t: f64) -> f64 {
        (s * s + 2.0 * self.factor() * (t - self.t0)).sqrt() - self.r0
    }
}

/// Where a barrier sphere is placed relative to the graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BarrierSide {
    Above,
    Below,
}

/// Sphere center in graph coordinates: horizontal position plus height.
/// Radial trajectories require the center on the symmetry axis.
#[derive(Debug, Clone, Copy)]
pub struct BarrierPlacement {
    pub center_x: f64,
    pub center_y: f64,
    pub height: f64,
    pub side: BarrierSide,
}

/// Worst signed clearance between the stored graph and the shrinking
/// barrier sphere, over all snapshots up to the sphere's extinction.
/// Positive means the graph never touches the barrier. Placements that
/// already cross at the start are rejected.
pub fn barrier_violation(
    traj: &Trajectory<GraphField>,
    sphere: &RoundSolution,
    placement: &BarrierPlacement,
) -> Result<f64> {
    let first = traj
        .snapshots
        .first()
        .ok_or_else(|| Error::InvalidConfig("empty trajectory".into()))?;
    if matches!(first.grid.mode, GridMode::Radial1D)
        && (placement.center_x != 0.0 || placement.center_y != 0.0)
    {
        return Err(Error::InvalidConfig(
            "radial trajectories admit only axis-centered barriers".into(),
        ));
    }
    let clearance_at = |u: &GraphField, r: f64| -> f64 {
        let mut worst = f64::INFINITY;
        match u.grid.mode {
            GridMode::Radial1D => {
                for (i, &val) in u.values.iter().enumerate() {
                    if is_escaped(val) {
                        continue;
                    }
                    let s = u.grid.r_of(i);
                    let dz = val - placement.height;
                    worst = worst.min((s * s + dz * dz).sqrt() - r);
                }
            }
            GridMode::Cartesian2D => {
                let (nx, _, _) = u.grid.axis_counts();
                for (idx, &val) in u.values.iter().enumerate() {
                    if is_escaped(val) {
                        continue;
                    }
                    let dx = u.grid.c_of(idx % nx) - placement.center_x;
                    let dy = u.grid.c_of(idx / nx) - placement.center_y;
                    let dz = val - placement.height;
                    worst = worst.min((dx * dx + dy * dy + dz * dz).sqrt() - r);
                }
            }
            _ => {}
        }
        worst
    };

    let r_start = sphere
        .radius(first.time.max(sphere.t0))?
        .ok_or_else(|| Error::InvalidConfig("barrier already extinct at the start".into()))?;
    let start_clear = clearance_at(first, r_start);
    if start_clear < 0.0 {
        return Err(Error::InvalidConfig(format!(
            "barrier crosses the graph at the start (clearance {start_clear})"
        )));
    }

    let mut worst = start_clear;
    for snap in &traj.snapshots {
        if snap.time < sphere.t0 {
            continue;
        }
        match sphere.radius(snap.time)? {
            None => break,
            Some(r) => worst = worst.min(clearance_at(snap, r)),
        }
    }
    Ok(worst)
}
