//! Runtime certificates for capped graphical flows: a weighted gradient
//! composite that should never increase, a curvature composite with a
//! linear-in-time envelope, an interior gradient bound, and a temporal
//! Hölder-quotient scan.
//!
//! All monitors are pure functions of snapshots; they never abort a run.
//! "Flagged" results (empty region, invalid weight) are reported as NaN so
//! they survive serialization and are visible in the CSV output.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::fields::{is_escaped, GraphField, Trajectory};
use crate::geometry::{g_quantity, gradient_function};

/// Per-snapshot monitor values. NaN marks a flagged (empty or invalid)
/// evaluation, never a numerical failure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonitorRecord {
    pub time: f64,
    /// max over {u < a} of v (u-a)^2
    pub c1_value: f64,
    /// sup over {u < a} of t (u-a)^4 G + lambda (u-a)^2 v^2
    pub c2_value: f64,
    /// worst temporal Hölder quotient seen so far (attached post-hoc)
    pub holder_worst: f64,
    /// max v over {u <= a-1}
    pub grad_bound: f64,
    pub a_used: f64,
    pub k_used: f64,
    pub lambda_used: f64,
    pub m_used: f64,
}

/// Parameters shared by the monitor family. `a` shifts the window {u < a}
/// of interest; `k` and `lambda` weight the curvature composite; `m` is the
/// initial interior gradient ceiling used by the Hölder scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonitorParams {
    pub a: f64,
    pub k: f64,
    pub lambda: f64,
    pub m: f64,
}

impl MonitorParams {
    /// Defaults derived from the initial datum:
    /// a = (min finite value) + 3, so the window straddles the deepest part
    /// of the graph; k = 0.9/(3 max v^2 on {u < a}), keeping k v^2 below 1/3
    /// with margin; lambda = 2 max (u-a)^2 on {u < a}; m = max(1, max v on
    /// {u <= a}).
    pub fn defaults_for(u0: &GraphField) -> Result<Self> {
        if !u0.has_finite() {
            return Err(crate::error::Error::AllEscaped);
        }
        let a = u0.min_finite() + 3.0;
        let v = gradient_function(u0)?;
        let mut max_v2_lt = 0.0f64;
        let mut max_sq = 0.0f64;
        let mut max_v_le = 1.0f64;
        for (i, &ui) in u0.values.iter().enumerate() {
            if is_escaped(ui) || !v[i].is_finite() {
                continue;
            }
            if ui < a {
                max_v2_lt = max_v2_lt.max(v[i] * v[i]);
                max_sq = max_sq.max((ui - a) * (ui - a));
            }
            if ui <= a {
                max_v_le = max_v_le.max(v[i]);
            }
        }
        Ok(MonitorParams {
            a,
            k: 0.9 / (3.0 * max_v2_lt.max(1.0)),
            lambda: 2.0 * max_sq,
            m: max_v_le,
        })
    }
}

/// max over {u < a} of v (u-a)^2; NaN when no node lies below the level a.
pub fn c1_monitor(u: &GraphField, a: f64) -> Result<f64> {
    let v = gradient_function(u)?;
    let mut best = f64::NAN;
    for (i, &ui) in u.values.iter().enumerate() {
        if !is_escaped(ui) && ui < a && v[i].is_finite() {
            let q = v[i] * (ui - a) * (ui - a);
            if !(q <= best) {
                best = if best.is_nan() { q } else { best.max(q) };
            }
        }
    }
    Ok(best)
}

/// sup over {u < a} of t (u-a)^4 G + lambda (u-a)^2 v^2, where
/// G = v^2/(1 - k v^2) |A|^2. NaN when {u < a} is empty or when k v^2
/// exceeds 1/2 somewhere in the window (invalid weight).
pub fn c2_monitor(u: &GraphField, t: f64, a: f64, k: f64, lambda: f64) -> Result<f64> {
    let v = gradient_function(u)?;
    let (g, mask) = g_quantity(u, k)?;
    let mut best = f64::NAN;
    for (i, &ui) in u.values.iter().enumerate() {
        if is_escaped(ui) || ui >= a {
            continue;
        }
        if !mask[i] {
            return Ok(f64::NAN); // weight invalid inside the window
        }
        let d2 = (ui - a) * (ui - a);
        let q = t * d2 * d2 * g[i] + lambda * d2 * v[i] * v[i];
        best = if best.is_nan() { q } else { best.max(q) };
    }
    Ok(best)
}

/// max v over {u <= a-1}; NaN when that region is empty.
pub fn gradient_bound(u: &GraphField, a: f64) -> Result<f64> {
    let v = gradient_function(u)?;
    let mut best = f64::NAN;
    for (i, &ui) in u.values.iter().enumerate() {
        if !is_escaped(ui) && ui <= a - 1.0 && v[i].is_finite() {
            best = if best.is_nan() { v[i] } else { best.max(v[i]) };
        }
    }
    Ok(best)
}

/// Result of the temporal Hölder scan over a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolderReport {
    /// worst |u(x,t1) - u(x,t2)| / sqrt|t1 - t2| over qualifying pairs
    pub worst: f64,
    /// certified ceiling sqrt(2(n+1)) (m+1), before the 5% slack
    pub bound: f64,
    /// number of (node, snapshot-pair) combinations examined
    pub pairs: usize,
    pub pass: bool,
}

/// Engineering slack on the Hölder ceiling; the continuum bound is exact but
/// the discrete trajectory carries O(h^2 + dt) wiggle.
pub const HOLDER_SLACK: f64 = 1.05;

/// Scan all snapshot pairs closer in time than 1/(8(n+1)m^2) at every node
/// whose value is <= a-1 at one of the two times, and compare the worst
/// sqrt-time difference quotient against sqrt(2(n+1)) (m+1) with 5% slack.
/// An empty pair set passes vacuously with worst = 0.
pub fn holder_check(traj: &Trajectory<GraphField>, a: f64, m: f64) -> HolderReport {
    let m = m.max(1.0);
    let (worst, pairs) = holder_scan(&traj.snapshots, a, m, traj.snapshots.len());
    let n = traj.snapshots.first().map(|s| s.grid.n).unwrap_or(1) as f64;
    let bound = (2.0 * (n + 1.0)).sqrt() * (m + 1.0);
    HolderReport {
        worst,
        bound,
        pairs,
        pass: worst <= bound * HOLDER_SLACK,
    }
}

/// Running worst Hölder quotient per snapshot index (pairs among snapshots
/// 0..=i). Index 0 (no pairs yet) is 0.
pub fn holder_prefix(traj: &Trajectory<GraphField>, a: f64, m: f64) -> Vec<f64> {
    let m = m.max(1.0);
    (1..=traj.snapshots.len())
        .map(|upto| holder_scan(&traj.snapshots, a, m, upto).0)
        .collect()
}

fn holder_scan(snaps: &[GraphField], a: f64, m: f64, upto: usize) -> (f64, usize) {
    let n = snaps.first().map(|s| s.grid.n).unwrap_or(1) as f64;
    let window = 1.0 / (8.0 * (n + 1.0) * m * m);
    let mut worst = 0.0f64;
    let mut pairs = 0usize;
    for j in 1..upto {
        for i in 0..j {
            let dt = (snaps[j].time - snaps[i].time).abs();
            if dt >= window || dt == 0.0 {
                continue;
            }
            let sq = dt.sqrt();
            for idx in 0..snaps[i].values.len() {
                let u1 = snaps[i].values[idx];
                let u2 = snaps[j].values[idx];
                if is_escaped(u1) || is_escaped(u2) {
                    continue;
                }
                if u1 <= a - 1.0 || u2 <= a - 1.0 {
                    pairs += 1;
                    let q = (u1 - u2).abs() / sq;
                    if q > worst {
                        worst = q;
                    }
                }
            }
        }
    }
    (worst, pairs)
}

/// Assemble one record (Hölder field left NaN; the runner attaches the
/// running scan afterwards).
pub fn record_for(u: &GraphField, p: &MonitorParams) -> Result<MonitorRecord> {
    Ok(MonitorRecord {
        time: u.time,
        c1_value: c1_monitor(u, p.a)?,
        c2_value: c2_monitor(u, u.time, p.a, p.k, p.lambda)?,
        holder_worst: f64::NAN,
        grad_bound: gradient_bound(u, p.a)?,
        a_used: p.a,
        k_used: p.k,
        lambda_used: p.lambda,
        m_used: p.m,
    })
}
