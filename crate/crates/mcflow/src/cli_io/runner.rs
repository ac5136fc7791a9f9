//! Run orchestration: executes the capped graph solve and the applicable
//! level-set solves on a shared snapshot clock, runs the enabled
//! verification checks, and writes every requested sink into a run
//! directory. Also provides post-hoc `compare` (two run directories) and
//! `render` (SVGs at requested times).

use std::fs;
use std::path::{Path, PathBuf};

use crate::cli_io::io::{
    self, load_run, write_checks_ndjson, write_config, write_graph_trajectory,
    write_levelset_trajectory, write_monitors_csv, RunArtifacts,
};
use crate::cli_io::scenario::{build_scenario, ScenarioBundle, ScenarioConfig};
use crate::cli_io::svg::{emit_graph_svgs, emit_levelset_svgs, RenderedFile};
use crate::compare::{
    cylinder_product, graph_on_zero_level, ordering_w_v, projection_vs_levelset,
    vanishing_times, worst_while_both, CheckReport,
};
use crate::error::{Error, Result};
use crate::fields::{
    is_escaped, GraphField, GridMode, Trajectory,
};
use crate::graphflow::{capped_initial, cfl_dt, solve_capped, CappedRun, DtPolicy};
use crate::levelset::{auto_dt_levelset, solve_levelset, FatVerdict, LevelSetProblem, LevelSetRun};
use crate::monitors::{holder_check, holder_prefix, MonitorRecord};

/// Informational checks never gate the exit code; they carry this threshold
/// (kept finite so the NDJSON stays plain numbers).
pub const INFORMATIONAL: f64 = 1e300;

pub const CHECK_NAMES: &[&str] = &[
    "ordering_w_v",
    "cylinder_product",
    "graph_on_zero_level",
    "projection_vs_levelset",
    "holder",
    "c1_monotone",
    "grad_bound",
    "fattening",
    "vanishing",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheckSelection {
    All,
    None,
    Only(Vec<String>),
}

impl CheckSelection {
    pub fn enabled(&self, name: &str) -> bool {
        match self {
            CheckSelection::All => true,
            CheckSelection::None => false,
            CheckSelection::Only(list) => list.iter().any(|s| s == name),
        }
    }
}

/// Parse the `--checks` argument: `all`, `none`, or a comma-separated
/// subset of the known check names.
pub fn parse_checks(s: &str) -> Result<CheckSelection> {
    match s {
        "all" => Ok(CheckSelection::All),
        "none" => Ok(CheckSelection::None),
        list => {
            let names: Vec<String> = list
                .split(',')
                .map(|t| t.trim().to_string())
                .filter(|t| !t.is_empty())
                .collect();
            if names.is_empty() {
                return Err(Error::InvalidConfig(
                    "empty check list; use all, none, or name,name,...".into(),
                ));
            }
            for n in &names {
                if !CHECK_NAMES.contains(&n.as_str()) {
                    return Err(Error::InvalidConfig(format!(
                        "unknown check {n:?}; known checks: {}",
                        CHECK_NAMES.join(", ")
                    )));
                }
            }
            Ok(CheckSelection::Only(names))
        }
    }
}

/// Outcome of one `run` invocation.
#[derive(Debug)]
pub struct RunOutcome {
    pub out_dir: PathBuf,
    pub reports: Vec<CheckReport>,
    pub warnings: Vec<String>,
    pub all_passed: bool,
}

/// All four solves of one scenario, on the shared snapshot clock.
pub struct SolvedScenario {
    pub bundle: ScenarioBundle,
    pub graph: CappedRun,
    pub vtilde: LevelSetRun,
    pub w: Option<LevelSetRun>,
    pub v: Option<LevelSetRun>,
    pub vtilde_aux: Option<LevelSetRun>,
    /// snapshot clock period: snap_every graph steps
    pub tau: f64,
}

fn aligned_levelset(
    p: &LevelSetProblem,
    tau: f64,
    horizon: f64,
    dt_override: Option<f64>,
) -> (LevelSetProblem, usize) {
    let auto = auto_dt_levelset(&p.w0.grid, p.w0.label);
    let dt_target = dt_override.unwrap_or(auto);
    let m = ((tau / dt_target) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
    let dt = tau / m as f64;
    (
        LevelSetProblem {
            w0: p.w0.clone(),
            delta_reg: p.delta_reg,
            horizon,
            dt_policy: DtPolicy::Fixed(dt),
        },
        m,
    )
}

/// Solve every sub-problem of a scenario with all snapshots on the clock
/// k·tau, tau = snap_every·dt_graph; the horizon is rounded up to a whole
/// number of clock ticks so final snapshots align across runs. Sub-runs
/// execute in parallel.
pub fn solve_scenario(bundle: &ScenarioBundle) -> Result<SolvedScenario> {
    let cfg = &bundle.cfg;
    let initial = capped_initial(&bundle.capped.u0, cfg.cap, cfg.eps)?;
    let auto_g = cfl_dt(&initial)?;
    let dt_g = match bundle.capped.dt_policy {
        DtPolicy::Auto => auto_g,
        DtPolicy::Fixed(dt) => {
            if !(dt > 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "fixed dt must be positive, got {dt}"
                )));
            }
            if dt > auto_g * (1.0 + 1e-12) {
                return Err(Error::CflViolation { dt, max: auto_g });
            }
            dt
        }
    };
    let tau = cfg.snap_every as f64 * dt_g;
    let ticks = ((cfg.horizon / tau) - 1e-9).ceil().max(1.0);
    let horizon = ticks * tau;

    let mut capped = bundle.capped.clone();
    capped.dt_policy = DtPolicy::Fixed(dt_g);
    capped.horizon = horizon;

    let (vt_p, vt_m) = aligned_levelset(&bundle.vtilde, tau, horizon, None);
    let w_al = bundle
        .w
        .as_ref()
        .map(|p| aligned_levelset(p, tau, horizon, None));
    let v_al = bundle
        .v
        .as_ref()
        .map(|p| aligned_levelset(p, tau, horizon, None));
    // the cylinder-product comparison needs the aux radial run to use the
    // cylinder run's exact time step (its own CFL bound is looser, so the
    // borrowed step is always admissible)
    let aux_al = match (&bundle.vtilde_aux, &v_al) {
        (Some(p), Some((vp, _))) => {
            let dt_v = match vp.dt_policy {
                DtPolicy::Fixed(dt) => dt,
                DtPolicy::Auto => unreachable!("aligned problems carry fixed steps"),
            };
            Some(aligned_levelset(p, tau, horizon, Some(dt_v)))
        }
        _ => None,
    };

    let solve_opt = |al: &Option<(LevelSetProblem, usize)>| -> Result<Option<LevelSetRun>> {
        al.as_ref().map(|(p, m)| solve_levelset(p, *m)).transpose()
    };

    let ((graph, vtilde), (w, (v, aux))) = rayon::join(
        || {
            rayon::join(
                || solve_capped(&capped, cfg.snap_every),
                || solve_levelset(&vt_p, vt_m),
            )
        },
        || {
            rayon::join(
                || solve_opt(&w_al),
                || rayon::join(|| solve_opt(&v_al), || solve_opt(&aux_al)),
            )
        },
    );

    Ok(SolvedScenario {
        bundle: bundle.clone(),
        graph: graph?,
        vtilde: vtilde?,
        w: w?,
        v: v?,
        vtilde_aux: aux?,
        tau,
    })
}

/// Graph trajectory with `z_shift` subtracted, matching the vertical frame
/// the ambient embedding was built in.
pub fn shifted_graph(traj: &Trajectory<GraphField>, z_shift: f64) -> Result<Trajectory<GraphField>> {
    let mut out = Trajectory::new();
    for s in &traj.snapshots {
        let vals: Vec<f64> = s
            .values
            .iter()
            .map(|&x| if is_escaped(x) { x } else { x - z_shift })
            .collect();
        out.push(GraphField::new(s.grid, vals, s.time)?)?;
    }
    Ok(out)
}

/// Monitor rows at snapshot times, with the running worst Hölder quotient
/// substituted into `holder_worst` (the per-step records carry a
/// placeholder).
pub fn snapshot_monitor_rows(run: &CappedRun) -> Vec<MonitorRecord> {
    let prefix = holder_prefix(&run.traj, run.params.a, run.params.m);
    let mut rows = Vec::with_capacity(run.traj.snapshots.len());
    for (i, snap) in run.traj.snapshots.iter().enumerate() {
        let t = snap.time;
        if let Some(rec) = run
            .traj
            .monitors
            .iter()
            .find(|r| (r.time - t).abs() <= 1e-9 * t.abs().max(1.0))
        {
            let mut row = rec.clone();
            row.holder_worst = prefix.get(i).copied().unwrap_or(f64::NAN);
            rows.push(row);
        }
    }
    rows
}

/// Evaluate the standard check battery on a solved scenario.
pub fn run_checks(solved: &SolvedScenario, checks: &CheckSelection) -> Result<Vec<CheckReport>> {
    let scen = solved.bundle.cfg.name.as_str();
    let cfg = &solved.bundle.cfg;
    let mut reports = Vec::new();

    let suspicious = solved
        .vtilde
        .fattening
        .iter()
        .filter(|f| f.verdict == FatVerdict::Suspicious)
        .count();

    if checks.enabled("ordering_w_v") {
        if let (Some(w), Some(v)) = (&solved.w, &solved.v) {
            let worst = ordering_w_v(&w.traj, &v.traj)?;
            reports.push(CheckReport::new(
                "ordering_w_v",
                scen,
                worst,
                -1e-12,
                worst >= -1e-12,
            ));
        }
    }

    if checks.enabled("cylinder_product") {
        if let (Some(v), Some(aux)) = (&solved.v, &solved.vtilde_aux) {
            if v.traj.snapshots[0].grid.mode == GridMode::Axisym2D {
                let worst = cylinder_product(&v.traj, &aux.traj)?;
                reports.push(CheckReport::new(
                    "cylinder_product",
                    scen,
                    worst,
                    1e-10,
                    worst <= 1e-10,
                ));
            }
        }
    }

    if checks.enabled("graph_on_zero_level") {
        if let Some(w) = &solved.w {
            if solved.graph.traj.snapshots[0].grid.mode == GridMode::Radial1D {
                let shifted = shifted_graph(&solved.graph.traj, solved.bundle.z_shift)?;
                let report = graph_on_zero_level(&shifted, &w.traj)?;
                let thresh = 3.0 * w.traj.snapshots[0].grid.h;
                reports.push(CheckReport::new(
                    "graph_on_zero_level",
                    scen,
                    report.worst,
                    thresh,
                    report.worst <= thresh,
                ));
            }
        }
    }

    if checks.enabled("projection_vs_levelset") {
        let samples = projection_vs_levelset(
            &solved.graph.traj,
            &solved.vtilde.traj,
            solved.bundle.a_level,
            cfg.cap,
        )?;
        let worst = worst_while_both(&samples);
        // a suspicious fattening verdict demotes this check to informational
        let thresh = if suspicious > 0 {
            INFORMATIONAL
        } else {
            5.0 * cfg.h
        };
        reports.push(CheckReport::new(
            "projection_vs_levelset",
            scen,
            worst,
            thresh,
            worst <= thresh,
        ));
    }

    if checks.enabled("holder") {
        let rep = holder_check(
            &solved.graph.traj,
            solved.graph.params.a,
            solved.graph.params.m,
        );
        reports.push(CheckReport::new(
            "holder",
            scen,
            rep.worst,
            rep.bound * crate::monitors::HOLDER_SLACK,
            rep.pass,
        ));
    }

    let rows = snapshot_monitor_rows(&solved.graph);
    if checks.enabled("c1_monotone") {
        let c1: Vec<f64> = rows
            .iter()
            .map(|r| r.c1_value)
            .filter(|v| v.is_finite())
            .collect();
        let worst_ratio = c1
            .windows(2)
            .filter(|w| w[0] > 0.0)
            .map(|w| w[1] / w[0])
            .fold(1.0f64, f64::max);
        reports.push(CheckReport::new(
            "c1_monotone",
            scen,
            worst_ratio,
            1.01,
            worst_ratio <= 1.01,
        ));
    }

    if checks.enabled("grad_bound") {
        let c1_initial = rows
            .iter()
            .map(|r| r.c1_value)
            .find(|v| v.is_finite())
            .unwrap_or(f64::MAX);
        let worst = rows
            .iter()
            .map(|r| r.grad_bound)
            .filter(|v| v.is_finite())
            .fold(0.0f64, f64::max);
        reports.push(CheckReport::new(
            "grad_bound",
            scen,
            worst,
            c1_initial,
            worst <= c1_initial,
        ));
    }

    if checks.enabled("fattening") {
        reports.push(CheckReport::new(
            "fattening",
            scen,
            suspicious as f64,
            INFORMATIONAL,
            true,
        ));
    }

    if checks.enabled("vanishing") {
        let (tg, tl) = vanishing_times(&solved.graph.traj, &solved.vtilde.traj, cfg.cap);
        let gap = match (tg, tl) {
            (Some(a), Some(b)) => (a - b).abs() / a.abs().max(b.abs()).max(1e-12),
            (None, None) => 0.0,
            _ => INFORMATIONAL,
        };
        reports.push(CheckReport::new("vanishing", scen, gap, INFORMATIONAL, true));
    }

    Ok(reports)
}

/// Deterministic subset of snapshot times for rendering: up to nine evenly
/// spaced indices including first and last.
fn render_times(times: &[f64]) -> Vec<f64> {
    if times.is_empty() {
        return Vec::new();
    }
    let k = times.len().min(9);
    (0..k)
        .map(|i| times[i * (times.len() - 1) / k.max(1).saturating_sub(1).max(1)])
        .collect()
}

/// Execute a scenario end to end: solve, check, and write the requested
/// sinks under `out_dir` (created if needed).
pub fn run_scenario(
    cfg: &ScenarioConfig,
    out_dir: &Path,
    checks: &CheckSelection,
) -> Result<RunOutcome> {
    let bundle = build_scenario(cfg)?;
    let solved = solve_scenario(&bundle)?;
    let reports = run_checks(&solved, checks)?;

    fs::create_dir_all(out_dir)?;
    write_config(&out_dir.join(io::CONFIG_FILE), cfg)?;

    let want = |sink: &str| cfg.outputs.iter().any(|s| s == sink);
    if want("snapshots") {
        write_graph_trajectory(&out_dir.join(io::GRAPH_DIR), &solved.graph.traj)?;
        write_levelset_trajectory(&out_dir.join(io::VTILDE_DIR), &solved.vtilde.traj)?;
        if let Some(w) = &solved.w {
            write_levelset_trajectory(&out_dir.join(io::W_DIR), &w.traj)?;
        }
        if let Some(v) = &solved.v {
            write_levelset_trajectory(&out_dir.join(io::V_DIR), &v.traj)?;
        }
    }
    if want("csv") {
        write_monitors_csv(
            &out_dir.join(io::MONITORS_FILE),
            &snapshot_monitor_rows(&solved.graph),
        )?;
    }
    if want("ndjson") {
        write_checks_ndjson(&out_dir.join(io::CHECKS_FILE), &reports)?;
    }
    if want("svg") {
        let rd = out_dir.join(io::RENDER_DIR);
        let times = render_times(&solved.graph.traj.times());
        emit_graph_svgs(&rd, "graph", &solved.graph.traj, &times)?;
        emit_levelset_svgs(&rd, "vtilde", &solved.vtilde.traj, &times)?;
    }

    let all_passed = reports.iter().all(|r| r.pass);
    Ok(RunOutcome {
        out_dir: out_dir.to_path_buf(),
        reports,
        warnings: solved.graph.warnings.clone(),
        all_passed,
    })
}

fn common_times(a: &[f64], b: &[f64]) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    for (i, &ta) in a.iter().enumerate() {
        if let Some(j) = b
            .iter()
            .position(|&tb| (ta - tb).abs() <= 1e-9 * ta.abs().max(1.0))
        {
            pairs.push((i, j));
        }
    }
    pairs
}

fn sample_radial(vals: &[f64], h: f64, r: f64) -> Option<f64> {
    if r < 0.0 {
        return None;
    }
    let s = r / h;
    let i = s.floor() as usize;
    if i + 1 >= vals.len() {
        return if i < vals.len() && (s - i as f64).abs() < 1e-9 {
            Some(vals[i])
        } else {
            None
        };
    }
    let (a, b) = (vals[i], vals[i + 1]);
    if is_escaped(a) || is_escaped(b) {
        return Some(f64::INFINITY);
    }
    let t = s - i as f64;
    Some(a * (1.0 - t) + b * t)
}

fn clamp_at_cap(x: f64, cap: f64) -> f64 {
    if is_escaped(x) {
        cap
    } else {
        x.min(cap)
    }
}

/// Worst capped-value discrepancy between two graph trajectories at common
/// times; grids may differ in resolution (the finer run is sampled at the
/// coarser run's nodes) but not in mode.
pub fn graph_trajectory_gap(
    a: &Trajectory<GraphField>,
    b: &Trajectory<GraphField>,
    cap: f64,
) -> Result<f64> {
    let (ga, gb) = (&a.snapshots[0].grid, &b.snapshots[0].grid);
    if ga.mode != gb.mode {
        return Err(Error::Mismatch(format!(
            "runs use different grid modes {:?} and {:?}",
            ga.mode, gb.mode
        )));
    }
    let pairs = common_times(&a.times(), &b.times());
    if pairs.is_empty() {
        return Err(Error::Mismatch(
            "the two runs share no snapshot times".into(),
        ));
    }
    // identical grids compare node by node; otherwise evaluate on the
    // coarser grid's nodes by sampling the finer run
    let same_grid = ga.h == gb.h && ga.node_count() == gb.node_count();
    let coarse_is_a = ga.h >= gb.h;
    let mut worst = 0.0f64;
    for (i, j) in pairs {
        if same_grid {
            let (sa, sb) = (&a.snapshots[i], &b.snapshots[j]);
            for idx in 0..sa.values.len() {
                let d = (clamp_at_cap(sa.values[idx], cap) - clamp_at_cap(sb.values[idx], cap)).abs();
                worst = worst.max(d);
            }
            continue;
        }
        let (cs, fs) = if coarse_is_a {
            (&a.snapshots[i], &b.snapshots[j])
        } else {
            (&b.snapshots[j], &a.snapshots[i])
        };
        let cg = &cs.grid;
        for idx in 0..cg.node_count() {
            let cv = clamp_at_cap(cs.values[idx], cap);
            let fv = match cg.mode {
                GridMode::Radial1D => sample_radial(&fs.values, fs.grid.h, cg.r_of(idx)),
                GridMode::Cartesian2D => {
                    let (nx, _, _) = cg.axis_counts();
                    let (x, y) = (cg.c_of(idx % nx), cg.c_of(idx / nx));
                    crate::fields::sample_2d(&fs.grid, &fs.values, x, y)
                }
                _ => None,
            };
            if let Some(fv) = fv {
                worst = worst.max((cv - clamp_at_cap(fv, cap)).abs());
            }
        }
    }
    Ok(worst)
}

/// Compare two finished run directories: capped-graph gap, monitor-series
/// gap, and vanishing-time gap, all informational (the tool reports, it
/// does not judge).
pub fn compare_runs(dir_a: &Path, dir_b: &Path) -> Result<Vec<CheckReport>> {
    let a = load_run(dir_a)?;
    let b = load_run(dir_b)?;
    let scen = format!("{} vs {}", a.config.name, b.config.name);
    let cap = a.config.cap.min(b.config.cap);
    let mut reports = Vec::new();

    if let (Some(ta), Some(tb)) = (&a.graph, &b.graph) {
        let worst = graph_trajectory_gap(ta, tb, cap)?;
        reports.push(CheckReport::new(
            "compare_graph",
            &scen,
            worst,
            INFORMATIONAL,
            true,
        ));
    }

    let pairs = common_times(
        &a.monitors.iter().map(|r| r.time).collect::<Vec<_>>(),
        &b.monitors.iter().map(|r| r.time).collect::<Vec<_>>(),
    );
    if !pairs.is_empty() {
        let mut worst = 0.0f64;
        for (i, j) in &pairs {
            let (ra, rb) = (&a.monitors[*i], &b.monitors[*j]);
            if ra.c1_value.is_finite() && rb.c1_value.is_finite() {
                worst = worst.max((ra.c1_value - rb.c1_value).abs() / ra.c1_value.abs().max(1.0));
            }
        }
        reports.push(CheckReport::new(
            "compare_monitor_c1",
            &scen,
            worst,
            INFORMATIONAL,
            true,
        ));
    }

    let vanish = |run: &RunArtifacts| -> Option<f64> {
        match (&run.graph, &run.vtilde) {
            (Some(g), Some(v)) => vanishing_times(g, v, run.config.cap).0,
            _ => None,
        }
    };
    let (va, vb) = (vanish(&a), vanish(&b));
    let gap = match (va, vb) {
        (Some(x), Some(y)) => (x - y).abs(),
        (None, None) => 0.0,
        _ => INFORMATIONAL,
    };
    reports.push(CheckReport::new(
        "compare_vanishing",
        &scen,
        gap,
        INFORMATIONAL,
        true,
    ));

    Ok(reports)
}

/// Render stored trajectories of a finished run at the requested times.
/// Returns the rendered files plus a warning per inexact time match.
pub fn render_run(dir: &Path, times: &[f64]) -> Result<(Vec<RenderedFile>, Vec<String>)> {
    let run = load_run(dir)?;
    let rd = dir.join(io::RENDER_DIR);
    let mut files = Vec::new();
    if let Some(g) = &run.graph {
        files.extend(emit_graph_svgs(&rd, "graph", g, times)?);
    }
    if let Some(v) = &run.vtilde {
        files.extend(emit_levelset_svgs(&rd, "vtilde", v, times)?);
    }
    if files.is_empty() {
        return Err(Error::InvalidConfig(format!(
            "{}: no stored trajectories to render",
            dir.display()
        )));
    }
    let warnings: Vec<String> = files
        .iter()
        .filter(|f| !f.exact)
        .map(|f| {
            format!(
                "requested t={} not stored; rendered nearest snapshot t={}",
                f.requested, f.actual
            )
        })
        .collect();
    Ok((files, warnings))
}
