//! Explicit solver for graphical mean curvature flow
//! u̇ = sqrt(1+|Du|^2) div(Du / sqrt(1+|Du|^2))
//! and the capped Dirichlet approximation: mollify the datum, take a smooth
//! minimum with the cap L, hold the value on an outer ring, march forward
//! Euler under a CFL bound, clamp to L after each step.
//!
//! Forward Euler is chosen deliberately: under the CFL bound the update is
//! monotone in the stencil values, which is what makes the ordering and
//! barrier tests meaningful.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fields::{is_escaped, GraphField, GridMode, Trajectory, ESCAPED};
use crate::geometry::{cart2_derivs, cart3_derivs, mollified_min, mollify_initial, radial_derivs};
use crate::monitors::{record_for, MonitorParams};

/// Time-step selection: automatic CFL-bound step or a caller-pinned value
/// (still validated against the CFL bound).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DtPolicy {
    Auto,
    Fixed(f64),
}

/// The capped Dirichlet approximation problem: evolve min_eps(u0_eps, cap)
/// on the grid, holding values on the ring |x| >= hold_radius.
#[derive(Debug, Clone)]
pub struct CappedProblem {
    pub u0: GraphField,
    /// cap height L; also the Dirichlet value on the ring when the datum
    /// escapes there
    pub cap: f64,
    /// mollification radius (<= 1; below the grid spacing it is a no-op)
    pub eps: f64,
    /// ring radius R: nodes with |x| >= R hold their initial value
    pub hold_radius: f64,
    pub horizon: f64,
    pub dt_policy: DtPolicy,
}

/// Result of a capped solve: the trajectory (snapshots + per-step monitor
/// records) and any non-fatal diagnostics.
#[derive(Debug, Clone)]
pub struct CappedRun {
    pub traj: Trajectory<GraphField>,
    pub warnings: Vec<String>,
    pub params: MonitorParams,
    pub dt: f64,
}

const SERIAL_CUTOFF: usize = 4096;

fn for_each_node(out: &mut [f64], f: impl Fn(usize) -> f64 + Sync) {
    if out.len() >= SERIAL_CUTOFF {
        out.par_iter_mut().enumerate().for_each(|(i, o)| *o = f(i));
    } else {
        for (i, o) in out.iter_mut().enumerate() {
            *o = f(i);
        }
    }
}

/// Right-hand side of the flow in nondivergence form:
/// Radial1D: u_rr/(1+u_r^2) + n u_r/r, axis limit (n+1) u_rr;
/// Cartesian2D: ((1+u_y^2)u_xx - 2 u_x u_y u_xy + (1+u_x^2)u_yy)/(1+|Du|^2);
/// Cartesian3D: the same operator, tr(Hess) - Du·Hess·Du/v^2 over three axes.
/// Nodes whose stencil touches an escaped value yield the sentinel.
pub fn mcf_rhs(u: &GraphField) -> Result<Vec<f64>> {
    let h = u.grid.h;
    let n = u.grid.n as f64;
    let mut out = vec![ESCAPED; u.values.len()];
    match u.grid.mode {
        GridMode::Radial1D => {
            let vals = &u.values;
            let grid = u.grid;
            for_each_node(&mut out, |i| match radial_derivs(vals, i, h) {
                None => ESCAPED,
                Some((ur, urr)) => {
                    if i == 0 {
                        (n + 1.0) * urr
                    } else {
                        urr / (1.0 + ur * ur) + n * ur / grid.r_of(i)
                    }
                }
            });
        }
        GridMode::Cartesian2D => {
            let (nx, ny, _) = u.grid.axis_counts();
            let vals = &u.values;
            for_each_node(&mut out, |idx| {
                let (i, j) = (idx % nx, idx / nx);
                match cart2_derivs(vals, nx, ny, i, j, h) {
                    None => ESCAPED,
                    Some(d) => {
                        ((1.0 + d.uy * d.uy) * d.uxx - 2.0 * d.ux * d.uy * d.uxy
                            + (1.0 + d.ux * d.ux) * d.uyy)
                            / (1.0 + d.ux * d.ux + d.uy * d.uy)
                    }
                }
            });
        }
        GridMode::Cartesian3D => {
            let (nx, ny, nz) = u.grid.axis_counts();
            let vals = &u.values;
            for_each_node(&mut out, |idx| {
                let i = idx % nx;
                let j = (idx / nx) % ny;
                let k = idx / (nx * ny);
                match cart3_derivs(vals, nx, ny, nz, i, j, k, h) {
                    None => ESCAPED,
                    Some(d) => {
                        let v2 = 1.0 + d.ux * d.ux + d.uy * d.uy + d.uz * d.uz;
                        let lap = d.uxx + d.uyy + d.uzz;
                        let dhd = d.ux * d.ux * d.uxx
                            + d.uy * d.uy * d.uyy
                            + d.uz * d.uz * d.uzz
                            + 2.0 * (d.ux * d.uy * d.uxy
                                + d.ux * d.uz * d.uxz
                                + d.uy * d.uz * d.uyz);
                        lap - dhd / v2
                    }
                }
            });
        }
        other => {
            return Err(Error::InvalidGrid(format!(
                "graph flow runs on Radial1D, Cartesian2D or Cartesian3D grids, got {other:?}"
            )))
        }
    }
    Ok(out)
}

/// Independent conservative discretization of the same operator,
/// v * div(Du/v) with half-node fluxes, used to cross-validate `mcf_rhs`.
/// Defined on interior (non-axis, non-edge) nodes; elsewhere the sentinel.
pub fn mcf_rhs_divergence(u: &GraphField) -> Result<Vec<f64>> {
    let h = u.grid.h;
    let n = u.grid.n as i32;
    let mut out = vec![ESCAPED; u.values.len()];
    match u.grid.mode {
        GridMode::Radial1D => {
            let m = u.values.len() - 1;
            for i in 1..m {
                let (u_w, u_c, u_e) = (u.values[i - 1], u.values[i], u.values[i + 1]);
                if is_escaped(u_w) || is_escaped(u_c) || is_escaped(u_e) {
                    continue;
                }
                let r = u.grid.r_of(i);
                let de = (u_e - u_c) / h;
                let dw = (u_c - u_w) / h;
                let fe = (r + 0.5 * h).powi(n) * de / (1.0 + de * de).sqrt();
                let fw = (r - 0.5 * h).powi(n) * dw / (1.0 + dw * dw).sqrt();
                let ur = (u_e - u_w) / (2.0 * h);
                let v = (1.0 + ur * ur).sqrt();
                out[i] = v * (fe - fw) / (h * r.powi(n));
            }
        }
        GridMode::Cartesian2D => {
            let (nx, ny, _) = u.grid.axis_counts();
            let vals = &u.values;
            let at = |ii: usize, jj: usize| vals[jj * nx + ii];
            for j in 1..ny - 1 {
                'node: for i in 1..nx - 1 {
                    for dj in -1i64..=1 {
                        for di in -1i64..=1 {
                            if is_escaped(at((i as i64 + di) as usize, (j as i64 + dj) as usize)) {
                                continue 'node;
                            }
                        }
                    }
                    let flux_x = |i0: usize| -> f64 {
                        let dx = (at(i0 + 1, j) - at(i0, j)) / h;
                        let dy = (at(i0, j + 1) + at(i0 + 1, j + 1)
                            - at(i0, j - 1)
                            - at(i0 + 1, j - 1))
                            / (4.0 * h);
                        dx / (1.0 + dx * dx + dy * dy).sqrt()
                    };
                    let flux_y = |j0: usize| -> f64 {
                        let dy = (at(i, j0 + 1) - at(i, j0)) / h;
                        let dx = (at(i + 1, j0) + at(i + 1, j0 + 1)
                            - at(i - 1, j0)
                            - at(i - 1, j0 + 1))
                            / (4.0 * h);
                        dy / (1.0 + dx * dx + dy * dy).sqrt()
                    };
                    let div = (flux_x(i) - flux_x(i - 1) + flux_y(j) - flux_y(j - 1)) / h;
                    let ux = (at(i + 1, j) - at(i - 1, j)) / (2.0 * h);
                    let uy = (at(i, j + 1) - at(i, j - 1)) / (2.0 * h);
                    out[j * nx + i] = (1.0 + ux * ux + uy * uy).sqrt() * div;
                }
            }
        }
        other => {
            return Err(Error::InvalidGrid(format!(
                "graph flow runs on Radial1D or Cartesian2D grids, got {other:?}"
            )))
        }
    }
    Ok(out)
}

/// CFL-stable explicit step: 0.4 h^2 / (2 (d + n - 1)), where d is the grid
/// dimensionality. The n-dependence covers the axis limit, whose effective
/// diffusion coefficient is n+1.
pub fn cfl_dt(u: &GraphField) -> Result<f64> {
    if !u.has_finite() {
        return Err(Error::AllEscaped);
    }
    let d = u.grid.mode.dims() as f64;
    let n = u.grid.n as f64;
    Ok(0.4 * u.grid.h * u.grid.h / (2.0 * (d + n - 1.0)))
}

/// Mask of nodes held at their current value (the Dirichlet ring |x| >= R).
pub fn hold_mask(u: &GraphField, hold_radius: f64) -> Vec<bool> {
    (0..u.values.len())
        .map(|i| {
            let (x, y, z) = u.grid.coords_of(i);
            (x * x + y * y + z * z).sqrt() >= hold_radius - 1e-12
        })
        .collect()
}

/// One forward-Euler step. Held nodes keep their value; nodes whose stencil
/// touches an escaped value are frozen (only relevant for uncapped data).
pub fn step(u: &GraphField, dt: f64, hold: &[bool]) -> Result<GraphField> {
    let max_dt = cfl_dt(u)?;
    if dt > max_dt * (1.0 + 1e-12) {
        return Err(Error::CflViolation { dt, max: max_dt });
    }
    let rhs = mcf_rhs(u)?;
    let mut vals = vec![0.0; u.values.len()];
    let old = &u.values;
    for_each_node(&mut vals, |i| {
        if hold[i] || is_escaped(old[i]) || is_escaped(rhs[i]) {
            old[i]
        } else {
            old[i] + dt * rhs[i]
        }
    });
    Ok(u.successor(vals, u.time + dt))
}

fn resolve_dt(policy: DtPolicy, auto: f64) -> Result<f64> {
    match policy {
        DtPolicy::Auto => Ok(auto),
        DtPolicy::Fixed(dt) => {
            if !(dt > 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "fixed dt must be positive, got {dt}"
                )));
            }
            if dt > auto * (1.0 + 1e-12) {
                return Err(Error::CflViolation { dt, max: auto });
            }
            Ok(dt)
        }
    }
}

/// Build the initial capped field: mollified datum, smooth minimum with the
/// cap. All nodes come out finite (escaped datum nodes take the cap value).
pub fn capped_initial(u0: &GraphField, cap: f64, eps: f64) -> Result<GraphField> {
    let u0e = mollify_initial(u0, eps, cap)?;
    let vals = u0e
        .values
        .iter()
        .map(|&x| mollified_min(x, cap, eps))
        .collect();
    GraphField::new(u0.grid, vals, u0.time)
}

/// Solve the capped problem, recording a snapshot every `snap_every` steps
/// and a monitor record every step.
pub fn solve_capped(p: &CappedProblem, snap_every: usize) -> Result<CappedRun> {
    if !(p.eps > 0.0 && p.eps <= 1.0) {
        return Err(Error::InvalidConfig(format!(
            "mollification radius must lie in (0, 1], got {}",
            p.eps
        )));
    }
    if !(p.horizon > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "horizon must be positive, got {}",
            p.horizon
        )));
    }
    if snap_every == 0 {
        return Err(Error::InvalidConfig("snap_every must be >= 1".into()));
    }
    let max_extent = p.u0.grid.extent;
    if !(p.hold_radius > 0.0 && p.hold_radius <= max_extent) {
        return Err(Error::InvalidConfig(format!(
            "hold radius {} must lie in (0, extent = {}]",
            p.hold_radius, max_extent
        )));
    }

    let mut warnings = Vec::new();
    let u0e = mollify_initial(&p.u0, p.eps, p.cap)?;
    let initial = {
        let vals: Vec<f64> = u0e
            .values
            .iter()
            .map(|&x| mollified_min(x, p.cap, p.eps))
            .collect();
        GraphField::new(p.u0.grid, vals, p.u0.time)?
    };
    let hold = hold_mask(&initial, p.hold_radius);

    // ring compatibility: the mollified datum should already sit at or above
    // cap+1 (or escape) on the ring, so that holding it at the cap is
    // consistent with the continuum Dirichlet problem
    let ring_ok = hold
        .iter()
        .zip(&u0e.values)
        .filter(|(&held, _)| held)
        .all(|(_, &x)| is_escaped(x) || x >= p.cap + 1.0);
    if !ring_ok {
        warnings.push(format!(
            "datum below cap+1 = {} on the hold ring; ring values are held as-is",
            p.cap + 1.0
        ));
    }
    if initial.values.iter().all(|&x| x >= p.cap - 1.0) {
        warnings.push("datum within 1 of the cap everywhere; trajectory is nearly constant".into());
    }

    let dt = resolve_dt(p.dt_policy, cfl_dt(&initial)?)?;
    let params = MonitorParams::defaults_for(&initial)?;
    let floor = initial.min_finite() - 1.0;

    let mut traj = Trajectory::new();
    traj.monitors.push(record_for(&initial, &params)?);
    traj.push(initial.clone())?;

    let mut u = initial;
    let mut k = 0usize;
    while u.time < p.horizon - 1e-12 * p.horizon.max(1.0) {
        let mut next = step(&u, dt, &hold)?;
        for x in next.values.iter_mut() {
            if *x > p.cap {
                *x = p.cap;
            }
        }
        if let Some(&bad) = next
            .values
            .iter()
            .find(|&&x| !is_escaped(x) && (x < floor || x.is_nan()))
        {
            return Err(Error::SchemeUnstable {
                value: bad,
                floor,
                time: next.time,
            });
        }
        k += 1;
        traj.monitors.push(record_for(&next, &params)?);
        if k % snap_every == 0 || next.time >= p.horizon - 1e-12 * p.horizon.max(1.0) {
            traj.push(next.clone())?;
        }
        u = next;
    }

    Ok(CappedRun {
        traj,
        warnings,
        params,
        dt,
    })
}

/// Run a family of capped problems with strictly increasing caps and a
/// shared time step, and report the Cauchy-style gaps between successive
/// solutions deep below the smallest cap.
pub struct CapSweep {
    pub caps: Vec<f64>,
    pub runs: Vec<CappedRun>,
    /// gaps[k] = max |u^{L_k} - u^{L_{k+1}}| over snapshots and nodes where
    /// both values are below min(caps) - 1
    pub gaps: Vec<f64>,
}

pub fn cap_sweep(
    u0: &GraphField,
    caps: &[f64],
    eps: f64,
    hold_radius: f64,
    horizon: f64,
    snap_every: usize,
) -> Result<CapSweep> {
    if caps.len() < 2 || caps.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidConfig(
            "cap sweep needs a strictly increasing list of caps".into(),
        ));
    }
    // shared dt so trajectories are sampled at identical times
    let trial = capped_initial(u0, caps[0], eps)?;
    let dt = cfl_dt(&trial)?;
    let runs: Vec<CappedRun> = caps
        .par_iter()
        .map(|&cap| {
            solve_capped(
                &CappedProblem {
                    u0: u0.clone(),
                    cap,
                    eps,
                    hold_radius,
                    horizon,
                    dt_policy: DtPolicy::Fixed(dt),
                },
                snap_every,
            )
        })
        .collect::<Result<_>>()?;
    let deep = caps[0] - 1.0;
    let mut gaps = Vec::new();
    for pair in runs.windows(2) {
        let (lo, hi) = (&pair[0].traj, &pair[1].traj);
        let mut worst = 0.0f64;
        for (a, b) in lo.snapshots.iter().zip(&hi.snapshots) {
            debug_assert!((a.time - b.time).abs() <= 1e-9 * a.time.max(1.0));
            for (&x, &y) in a.values.iter().zip(&b.values) {
                if x < deep && y < deep {
                    worst = worst.max((x - y).abs());
                }
            }
        }
        gaps.push(worst);
    }
    Ok(CapSweep {
        caps: caps.to_vec(),
        runs,
        gaps,
    })
}

/// Indicator of the projected domain proxy {u < a}. Requires a <= cap - 1 so
/// the level sits below the cap's influence zone.
pub fn domain_projection(u: &GraphField, a: f64, cap: f64) -> Result<Vec<bool>> {
    if a > cap - 1.0 {
        return Err(Error::InvalidConfig(format!(
            "projection level {a} must be <= cap - 1 = {}",
            cap - 1.0
        )));
    }
    Ok(u.values.iter().map(|&x| !is_escaped(x) && x < a).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{crossings_1d, make_grid, GridMode};

    fn radial_field(h: f64, extent: f64, n: u32, f: impl Fn(f64) -> f64) -> GraphField {
        let g = make_grid(GridMode::Radial1D, h, extent, n).unwrap();
        let vals = (0..g.node_count()).map(|i| f(g.r_of(i))).collect();
        GraphField::new(g, vals, 0.0).unwrap()
    }

    fn cart_field(h: f64, extent: f64, f: impl Fn(f64, f64) -> f64) -> GraphField {
        let g = make_grid(GridMode::Cartesian2D, h, extent, 1).unwrap();
        let (nx, ny, _) = g.axis_counts();
        let mut vals = vec![0.0; g.node_count()];
        for j in 0..ny {
            for i in 0..nx {
                vals[j * nx + i] = f(g.c_of(i), g.c_of(j));
            }
        }
        GraphField::new(g, vals, 0.0).unwrap()
    }

    #[test]
    fn rhs_vanishes_on_constants_and_planes() {
        let u = radial_field(0.01, 1.0, 1, |_| 4.0);
        assert!(mcf_rhs(&u).unwrap().iter().all(|&x| x == 0.0));
        // affine graphs over the plane are stationary (up to rounding in the
        // one-sided boundary stencils)
        let u = cart_field(0.05, 1.0, |x, y| 0.7 * x - 1.2 * y + 3.0);
        assert!(mcf_rhs(&u).unwrap().iter().all(|&x| x.abs() < 1e-10));
    }

    #[test]
    fn rhs_paraboloid_reference_value() {
        // u = r^2/2, n = 1, at r = 0.5: u_rr/(1+u_r^2) + u_r/r
        // = 1/1.25 + 1 = 1.8; derivatives of a quadratic are discretely exact
        let u = radial_field(0.01, 1.0, 1, |r| 0.5 * r * r);
        let rhs = mcf_rhs(&u).unwrap();
        assert!((rhs[50] - 1.8).abs() < 1e-12, "rhs = {}", rhs[50]);
        // axis limit (n+1) u_rr = 2
        assert!((rhs[0] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn nondivergence_matches_divergence_stencil() {
        // the two discretizations of v div(Du/v) agree on smooth fields
        for n in [1u32, 2] {
            let u = radial_field(0.01, 1.0, n, |r| 0.3 * (3.0 * r).sin() + 0.2 * r * r);
            let a = mcf_rhs(&u).unwrap();
            let b = mcf_rhs_divergence(&u).unwrap();
            for i in 1..u.values.len() - 1 {
                let rel = (a[i] - b[i]).abs() / (a[i].abs() + 1.0);
                assert!(rel <= 1e-3, "radial n={n} node {i}: {} vs {}", a[i], b[i]);
            }
        }
        let u = cart_field(0.01, 0.5, |x, y| 0.3 * (2.0 * x).sin() * y.cos());
        let a = mcf_rhs(&u).unwrap();
        let b = mcf_rhs_divergence(&u).unwrap();
        let (nx, ny, _) = u.grid.axis_counts();
        for j in 1..ny - 1 {
            for i in 1..nx - 1 {
                let k = j * nx + i;
                let rel = (a[k] - b[k]).abs() / (a[k].abs() + 1.0);
                assert!(rel <= 1e-3, "cartesian node ({i},{j}): {} vs {}", a[k], b[k]);
            }
        }
    }

    #[test]
    fn cfl_reference_values_and_escape_error() {
        let u = radial_field(0.01, 1.0, 1, |r| r);
        assert!((cfl_dt(&u).unwrap() - 2e-5).abs() < 1e-18);
        let u = cart_field(0.05, 1.0, |_, _| 0.0);
        assert!((cfl_dt(&u).unwrap() - 2.5e-4).abs() < 1e-18);

        let g = make_grid(GridMode::Radial1D, 0.01, 1.0, 1).unwrap();
        let all_gone = GraphField::new(g, vec![ESCAPED; g.node_count()], 0.0).unwrap();
        assert!(matches!(cfl_dt(&all_gone), Err(Error::AllEscaped)));
    }

    fn cart3_field(h: f64, extent: f64, f: impl Fn(f64, f64, f64) -> f64) -> GraphField {
        let g = make_grid(GridMode::Cartesian3D, h, extent, 1).unwrap();
        let vals = (0..g.node_count())
            .map(|idx| {
                let (x, y, z) = g.coords_of(idx);
                f(x, y, z)
            })
            .collect();
        GraphField::new(g, vals, 0.0).unwrap()
    }

    #[test]
    fn cartesian3_rhs_constants_planes_and_sphere_law() {
        let u = cart3_field(0.1, 0.5, |_, _, _| 2.5);
        assert!(mcf_rhs(&u).unwrap().iter().all(|&x| x == 0.0));
        let u = cart3_field(0.1, 0.5, |x, y, z| 0.4 * x - 0.9 * y + 0.2 * z);
        assert!(mcf_rhs(&u).unwrap().iter().all(|&x| x.abs() < 1e-10));

        // graph of the upper cap of a radius-2 sphere: the shrinking-sphere
        // solution has u^2 = R0^2 - 6t - |x|^2, so du/dt = -3/u pointwise
        let u = cart3_field(0.05, 0.6, |x, y, z| {
            (4.0 - x * x - y * y - z * z).sqrt()
        });
        let rhs = mcf_rhs(&u).unwrap();
        let g = u.grid;
        let mut checked = 0usize;
        for idx in 0..g.node_count() {
            let (x, y, z) = g.coords_of(idx);
            if x.abs() > 0.4 || y.abs() > 0.4 || z.abs() > 0.4 {
                continue; // keep clear of the one-sided boundary ring
            }
            let exact = -3.0 / u.values[idx];
            let rel = (rhs[idx] - exact).abs() / exact.abs();
            assert!(rel < 1e-3, "node ({x},{y},{z}): {} vs {}", rhs[idx], exact);
            checked += 1;
        }
        assert!(checked > 4000, "only {checked} interior nodes checked");
    }

    #[test]
    fn cartesian3_cfl_and_one_step_descent() {
        let u = cart3_field(0.05, 0.5, |_, _, _| 0.0);
        let dt = cfl_dt(&u).unwrap();
        assert!((dt - 0.4 * 0.05 * 0.05 / 6.0).abs() < 1e-18);

        // the sphere cap moves down at its center under one explicit step
        let u = cart3_field(0.05, 0.5, |x, y, z| {
            (4.0 - x * x - y * y - z * z).sqrt()
        });
        let hold = hold_mask(&u, 0.5);
        let dt = cfl_dt(&u).unwrap();
        let next = step(&u, dt, &hold).unwrap();
        let center = u.grid.node_count() / 2;
        let drop = next.values[center] - u.values[center];
        // du/dt = -3/u = -1.5 at the center, so one step moves -1.5 dt
        assert!((drop - (-1.5 * dt)).abs() < 1e-3 * dt, "drop = {drop}");
    }

    #[test]
    fn step_rejects_large_dt_and_keeps_constants() {
        let u = radial_field(0.01, 1.0, 1, |_| 5.0);
        let hold = hold_mask(&u, 1.0);
        assert!(matches!(
            step(&u, 1e-3, &hold),
            Err(Error::CflViolation { .. })
        ));
        let mut w = u.clone();
        for _ in 0..1000 {
            w = step(&w, 2e-5, &hold).unwrap();
        }
        assert!(w.values.iter().all(|&x| x == 5.0), "constant drifted");
        assert!((w.time - 0.02).abs() < 1e-12);
    }

    #[test]
    fn bowl_center_rises_and_escaped_freezes() {
        // hemisphere cap: positive curvature pushes the bottom up
        let u = radial_field(0.005, 0.8, 1, |r| -(1.0 - r * r).sqrt());
        let hold = hold_mask(&u, 0.8);
        let dt = cfl_dt(&u).unwrap();
        let next = step(&u, dt, &hold).unwrap();
        assert!(next.values[0] > u.values[0]);

        // a field with escaped nodes: finite nodes adjacent to the escape
        // region freeze, escaped nodes stay escaped
        let g = make_grid(GridMode::Radial1D, 0.01, 1.0, 1).unwrap();
        let vals: Vec<f64> = (0..g.node_count())
            .map(|i| if g.r_of(i) > 0.5 { ESCAPED } else { 1.0 - g.r_of(i) })
            .collect();
        let u = GraphField::new(g, vals, 0.0).unwrap();
        let hold = vec![false; g.node_count()];
        let next = step(&u, 2e-5, &hold).unwrap();
        let edge = 50; // r = 0.5, finite, neighbor escaped
        assert_eq!(next.values[edge], u.values[edge]);
        assert!(is_escaped(next.values[60]));
    }

    #[test]
    fn discrete_comparison_principle_on_ordered_pairs() {
        let u1 = radial_field(0.02, 1.0, 1, |r| r * r);
        let u2 = radial_field(0.02, 1.0, 1, |r| r * r + 0.3 + 0.1 * (2.0 * r).cos());
        assert!(u1.values.iter().zip(&u2.values).all(|(a, b)| a <= b));
        let hold = hold_mask(&u1, 1.0);
        let dt = cfl_dt(&u1).unwrap();
        let (mut a, mut b) = (u1, u2);
        let mut worst = f64::INFINITY;
        for _ in 0..200 {
            a = step(&a, dt, &hold).unwrap();
            b = step(&b, dt, &hold).unwrap();
            worst = worst.min(
                a.values
                    .iter()
                    .zip(&b.values)
                    .map(|(x, y)| y - x)
                    .fold(f64::INFINITY, f64::min),
            );
        }
        assert!(worst >= -1e-12, "ordering violated by {worst}");
    }

    #[test]
    fn capped_plane_is_a_fixed_point() {
        let u0 = radial_field(0.01, 2.0, 1, |_| 0.0);
        let p = CappedProblem {
            u0,
            cap: 5.0,
            eps: 0.05,
            hold_radius: 2.0,
            horizon: 1e-3,
            dt_policy: DtPolicy::Auto,
        };
        let run = solve_capped(&p, 10).unwrap();
        // the datum is below cap+1 on the ring, which is reported
        assert!(run.warnings.iter().any(|w| w.contains("ring")));
        for s in &run.traj.snapshots {
            assert!(s.values.iter().all(|&x| x == 0.0), "plane drifted");
        }
    }

    #[test]
    fn capped_bowl_min_rises_and_ring_stays_at_cap() {
        let u0 = crate::domain::blowup_datum(
            &crate::domain::DomainShape::Ball { radius: 1.0 },
            make_grid(GridMode::Radial1D, 0.01, 2.0, 1).unwrap(),
        )
        .unwrap();
        let p = CappedProblem {
            u0,
            cap: 20.0,
            eps: 0.05,
            hold_radius: 2.0,
            horizon: 5e-3,
            dt_policy: DtPolicy::Auto,
        };
        let run = solve_capped(&p, 50).unwrap();
        assert!(run.warnings.is_empty(), "{:?}", run.warnings);
        let mins: Vec<f64> = run.traj.snapshots.iter().map(|s| s.min_finite()).collect();
        for w in mins.windows(2) {
            assert!(w[1] >= w[0] - 1e-12, "minimum decreased: {mins:?}");
        }
        let last = run.traj.snapshots.last().unwrap();
        assert!(last.values.iter().all(|&x| x <= 20.0));
        // every ring node is pinned exactly at the cap
        let hold = hold_mask(last, 2.0);
        for (i, &held) in hold.iter().enumerate() {
            if held {
                assert_eq!(last.values[i], 20.0);
            }
        }
        // monitor records exist for every step plus the initial state
        assert!(run.traj.monitors.len() > 100);
    }

    #[test]
    fn cap_sweep_orders_and_plane_gaps_vanish() {
        let u0 = radial_field(0.02, 2.0, 1, |_| 0.0);
        let sweep = cap_sweep(&u0, &[5.0, 10.0, 20.0], 0.05, 2.0, 1e-3, 10).unwrap();
        // a plane far below every cap evolves identically for all caps
        for g in &sweep.gaps {
            assert_eq!(*g, 0.0);
        }
        assert!(cap_sweep(&u0, &[10.0, 5.0], 0.05, 2.0, 1e-3, 10).is_err());
        assert!(cap_sweep(&u0, &[5.0], 0.05, 2.0, 1e-3, 10).is_err());
    }

    #[test]
    fn projection_levels_match_bisection_oracle() {
        let g = make_grid(GridMode::Radial1D, 0.002, 2.0, 1).unwrap();
        let u = crate::domain::blowup_datum(&crate::domain::DomainShape::Ball { radius: 1.0 }, g)
            .unwrap();
        let mask = domain_projection(&u, 10.0, 20.0).unwrap();
        assert!(mask[0]);
        // boundary of {u < 10}: bisect 1/(1-r) + r^2 = 10 on (0, 1)
        let (mut lo, mut hi) = (0.5, 1.0 - 1e-12);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if 1.0 / (1.0 - mid) + mid * mid < 10.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let shifted: Vec<f64> = u
            .values
            .iter()
            .map(|&x| if is_escaped(x) { x } else { x - 10.0 })
            .collect();
        let roots = crossings_1d(&shifted, 0.0, g.h);
        assert_eq!(roots.len(), 1);
        assert!((roots[0] - lo).abs() < 0.002, "{} vs {lo}", roots[0]);

        assert!(domain_projection(&u, 19.5, 20.0).is_err());
    }
}
