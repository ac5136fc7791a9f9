//! Plain-text run artifacts: snapshot files, the monitors CSV, NDJSON check
//! reports, and the run-directory layout. All float output uses 17
//! significant digits so values round-trip exactly and byte-identical reruns
//! produce byte-identical files.

use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write as IoWrite};
use std::path::{Path, PathBuf};

use crate::cli_io::scenario::ScenarioConfig;
use crate::compare::CheckReport;
use crate::error::{Error, Result};
use crate::fields::{
    make_grid, GraphField, GridMode, GridSpec, LevelSetField, LevelSetLabel,
    Trajectory, ESCAPED,
};
use crate::monitors::MonitorRecord;

pub const CONFIG_FILE: &str = "config.json";
pub const MONITORS_FILE: &str = "monitors.csv";
pub const CHECKS_FILE: &str = "checks.ndjson";
pub const GRAPH_DIR: &str = "graph";
pub const VTILDE_DIR: &str = "vtilde";
pub const W_DIR: &str = "w";
pub const V_DIR: &str = "v";
pub const RENDER_DIR: &str = "render";

pub const CSV_HEADER: &str = "time,c1,c2,holder_worst,grad_bound,a,k,lambda,M";

/// 17-significant-digit decimal; infinities and NaN get fixed spellings.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x == f64::INFINITY {
        "inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{x:.16e}")
    }
}

pub fn parse_f64(s: &str) -> Result<f64> {
    match s {
        "nan" => Ok(f64::NAN),
        "inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        other => other
            .parse::<f64>()
            .map_err(|_| Error::Parse(format!("bad float literal {other:?}"))),
    }
}

fn mode_str(mode: GridMode) -> &'static str {
    match mode {
        GridMode::Radial1D => "radial1d",
        GridMode::Axisym2D => "axisym2d",
        GridMode::Cartesian2D => "cartesian2d",
        GridMode::Cartesian3D => "cartesian3d",
    }
}

fn parse_mode(s: &str) -> Result<GridMode> {
    match s {
        "radial1d" => Ok(GridMode::Radial1D),
        "axisym2d" => Ok(GridMode::Axisym2D),
        "cartesian2d" => Ok(GridMode::Cartesian2D),
        "cartesian3d" => Ok(GridMode::Cartesian3D),
        other => Err(Error::Parse(format!("unknown grid mode {other:?}"))),
    }
}

const MAGIC: &str = "mcflow-snapshot v1";

struct Header {
    kind: String,
    grid: GridSpec,
    time: f64,
    label: Option<LevelSetLabel>,
}

fn write_snapshot(
    path: &Path,
    kind: &str,
    grid: &GridSpec,
    time: f64,
    label: Option<LevelSetLabel>,
    values: &[f64],
) -> Result<()> {
    let file = fs::File::create(path)?;
    let mut out = BufWriter::new(file);
    writeln!(out, "{MAGIC}")?;
    writeln!(out, "kind={kind}")?;
    writeln!(out, "mode={}", mode_str(grid.mode))?;
    writeln!(out, "h={}", fmt_f64(grid.h))?;
    writeln!(out, "extent={}", fmt_f64(grid.extent))?;
    writeln!(out, "n={}", grid.n)?;
    writeln!(out, "time={}", fmt_f64(time))?;
    if let Some(l) = label {
        writeln!(out, "label={}", l.as_str())?;
    }
    writeln!(out, "values={}", values.len())?;
    for &v in values {
        writeln!(out, "{}", fmt_f64(v))?;
    }
    out.flush()?;
    Ok(())
}

fn read_header_and_values(path: &Path) -> Result<(Header, Vec<f64>)> {
    let file = fs::File::open(path)?;
    let mut lines = BufReader::new(file).lines();
    let mut next = || -> Result<String> {
        lines
            .next()
            .transpose()?
            .ok_or_else(|| Error::Parse(format!("{}: truncated snapshot file", path.display())))
    };
    if next()? != MAGIC {
        return Err(Error::Parse(format!(
            "{}: missing snapshot magic line",
            path.display()
        )));
    }
    let mut kind = None;
    let mut mode = None;
    let mut h = None;
    let mut extent = None;
    let mut n = None;
    let mut time = None;
    let mut label = None;
    let count;
    loop {
        let line = next()?;
        let (key, val) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("{}: bad header line {line:?}", path.display())))?;
        match key {
            "kind" => kind = Some(val.to_string()),
            "mode" => mode = Some(parse_mode(val)?),
            "h" => h = Some(parse_f64(val)?),
            "extent" => extent = Some(parse_f64(val)?),
            "n" => {
                n = Some(val.parse::<u32>().map_err(|_| {
                    Error::Parse(format!("{}: bad n value {val:?}", path.display()))
                })?)
            }
            "time" => time = Some(parse_f64(val)?),
            "label" => label = Some(LevelSetLabel::parse(val)?),
            "values" => {
                count = val.parse::<usize>().map_err(|_| {
                    Error::Parse(format!("{}: bad value count {val:?}", path.display()))
                })?;
                break;
            }
            other => {
                return Err(Error::Parse(format!(
                    "{}: unknown header key {other:?}",
                    path.display()
                )))
            }
        }
    }
    let missing = |what: &str| Error::Parse(format!("{}: header missing {what}", path.display()));
    let grid = make_grid(
        mode.ok_or_else(|| missing("mode"))?,
        h.ok_or_else(|| missing("h"))?,
        extent.ok_or_else(|| missing("extent"))?,
        n.ok_or_else(|| missing("n"))?,
    )?;
    let header = Header {
        kind: kind.ok_or_else(|| missing("kind"))?,
        grid,
        time: time.ok_or_else(|| missing("time"))?,
        label,
    };
    let mut values = Vec::with_capacity(count);
    for _ in 0..count {
        values.push(parse_f64(&next()?)?);
    }
    Ok((header, values))
}

pub fn write_graph_snapshot(path: &Path, u: &GraphField) -> Result<()> {
    write_snapshot(path, "graph", &u.grid, u.time, None, &u.values)
}

pub fn read_graph_snapshot(path: &Path) -> Result<GraphField> {
    let (hd, mut values) = read_header_and_values(path)?;
    if hd.kind != "graph" {
        return Err(Error::Parse(format!(
            "{}: expected a graph snapshot, found kind {:?}",
            path.display(),
            hd.kind
        )));
    }
    for v in values.iter_mut() {
        if *v == f64::INFINITY {
            *v = ESCAPED;
        }
    }
    GraphField::new(hd.grid, values, hd.time)
}

pub fn write_levelset_snapshot(path: &Path, w: &LevelSetField) -> Result<()> {
    write_snapshot(path, "levelset", &w.grid, w.time, Some(w.label), &w.values)
}

pub fn read_levelset_snapshot(path: &Path) -> Result<LevelSetField> {
    let (hd, values) = read_header_and_values(path)?;
    if hd.kind != "levelset" {
        return Err(Error::Parse(format!(
            "{}: expected a levelset snapshot, found kind {:?}",
            path.display(),
            hd.kind
        )));
    }
    let label = hd
        .label
        .ok_or_else(|| Error::Parse(format!("{}: levelset header missing label", path.display())))?;
    LevelSetField::new(hd.grid, values, hd.time, label)
}

pub fn snapshot_name(i: usize) -> String {
    format!("snap_{i:04}.txt")
}

fn snapshot_paths(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|s| s.to_str())
                .map(|s| s.starts_with("snap_") && s.ends_with(".txt"))
                .unwrap_or(false)
        })
        .collect();
    paths.sort();
    Ok(paths)
}

pub fn write_graph_trajectory(dir: &Path, traj: &Trajectory<GraphField>) -> Result<()> {
    fs::create_dir_all(dir)?;
    for (i, snap) in traj.snapshots.iter().enumerate() {
        write_graph_snapshot(&dir.join(snapshot_name(i)), snap)?;
    }
    Ok(())
}

pub fn read_graph_trajectory(dir: &Path) -> Result<Trajectory<GraphField>> {
    let mut traj = Trajectory::new();
    for p in snapshot_paths(dir)? {
        traj.push(read_graph_snapshot(&p)?)?;
    }
    Ok(traj)
}

pub fn write_levelset_trajectory(dir: &Path, traj: &Trajectory<LevelSetField>) -> Result<()> {
    fs::create_dir_all(dir)?;
    for (i, snap) in traj.snapshots.iter().enumerate() {
        write_levelset_snapshot(&dir.join(snapshot_name(i)), snap)?;
    }
    Ok(())
}

pub fn read_levelset_trajectory(dir: &Path) -> Result<Trajectory<LevelSetField>> {
    let mut traj = Trajectory::new();
    for p in snapshot_paths(dir)? {
        traj.push(read_levelset_snapshot(&p)?)?;
    }
    Ok(traj)
}

pub fn write_monitors_csv(path: &Path, records: &[MonitorRecord]) -> Result<()> {
    let file = fs::File::create(path)?;
    let mut out = BufWriter::new(file);
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            fmt_f64(r.time),
            fmt_f64(r.c1_value),
            fmt_f64(r.c2_value),
            fmt_f64(r.holder_worst),
            fmt_f64(r.grad_bound),
            fmt_f64(r.a_used),
            fmt_f64(r.k_used),
            fmt_f64(r.lambda_used),
            fmt_f64(r.m_used),
        )?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_monitors_csv(path: &Path) -> Result<Vec<MonitorRecord>> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse(format!("{}: empty CSV", path.display())))?;
    if header != CSV_HEADER {
        return Err(Error::Parse(format!(
            "{}: unexpected CSV header {header:?}",
            path.display()
        )));
    }
    let mut records = Vec::new();
    for line in lines {
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 9 {
            return Err(Error::Parse(format!(
                "{}: expected 9 columns, got {}",
                path.display(),
                cols.len()
            )));
        }
        let f = |i: usize| parse_f64(cols[i]);
        records.push(MonitorRecord {
            time: f(0)?,
            c1_value: f(1)?,
            c2_value: f(2)?,
            holder_worst: f(3)?,
            grad_bound: f(4)?,
            a_used: f(5)?,
            k_used: f(6)?,
            lambda_used: f(7)?,
            m_used: f(8)?,
        });
    }
    Ok(records)
}

pub fn write_checks_ndjson(path: &Path, reports: &[CheckReport]) -> Result<()> {
    let file = fs::File::create(path)?;
    let mut out = BufWriter::new(file);
    for r in reports {
        let line = serde_json::to_string(r)
            .map_err(|e| Error::Parse(format!("check serialization failed: {e}")))?;
        writeln!(out, "{line}")?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_checks_ndjson(path: &Path) -> Result<Vec<CheckReport>> {
    let text = fs::read_to_string(path)?;
    text.lines()
        .filter(|l| !l.is_empty())
        .map(|l| {
            serde_json::from_str(l)
                .map_err(|e| Error::Parse(format!("{}: bad NDJSON line: {e}", path.display())))
        })
        .collect()
}

pub fn write_config(path: &Path, cfg: &ScenarioConfig) -> Result<()> {
    let text = serde_json::to_string_pretty(cfg)
        .map_err(|e| Error::Parse(format!("config serialization failed: {e}")))?;
    fs::write(path, text + "\n")?;
    Ok(())
}

pub fn read_config(path: &Path) -> Result<ScenarioConfig> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text)
        .map_err(|e| Error::Parse(format!("{}: invalid scenario JSON: {e}", path.display())))
}

/// Everything a finished run directory contains, for post-hoc comparison
/// and rendering.
pub struct RunArtifacts {
    pub config: ScenarioConfig,
    pub graph: Option<Trajectory<GraphField>>,
    pub vtilde: Option<Trajectory<LevelSetField>>,
    pub w: Option<Trajectory<LevelSetField>>,
    pub v: Option<Trajectory<LevelSetField>>,
    pub monitors: Vec<MonitorRecord>,
}

pub fn load_run(dir: &Path) -> Result<RunArtifacts> {
    let config = read_config(&dir.join(CONFIG_FILE))?;
    let graph = if dir.join(GRAPH_DIR).is_dir() {
        Some(read_graph_trajectory(&dir.join(GRAPH_DIR))?)
    } else {
        None
    };
    let read_ls = |sub: &str| -> Result<Option<Trajectory<LevelSetField>>> {
        if dir.join(sub).is_dir() {
            Ok(Some(read_levelset_trajectory(&dir.join(sub))?))
        } else {
            Ok(None)
        }
    };
    let monitors_path = dir.join(MONITORS_FILE);
    let monitors = if monitors_path.is_file() {
        read_monitors_csv(&monitors_path)?
    } else {
        Vec::new()
    };
    Ok(RunArtifacts {
        config,
        graph,
        vtilde: read_ls(VTILDE_DIR)?,
        w: read_ls(W_DIR)?,
        v: read_ls(V_DIR)?,
        monitors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli_io::scenario::builtin;
    use crate::fields::GridMode;

    fn tmpdir(tag: &str) -> PathBuf {
        let d = std::env::temp_dir().join(format!("mcflow_io_{tag}_{}", std::process::id()));
        let _ = fs::remove_dir_all(&d);
        fs::create_dir_all(&d).unwrap();
        d
    }

    #[test]
    fn graph_snapshot_round_trips_bitwise() {
        let d = tmpdir("graph");
        let g = make_grid(GridMode::Radial1D, 0.25, 1.0, 2).unwrap();
        let vals = vec![0.1, -2.5e-13, std::f64::consts::PI, ESCAPED, 1.0 / 3.0];
        let u = GraphField::new(g, vals.clone(), 0.125).unwrap();
        let p = d.join("s.txt");
        write_graph_snapshot(&p, &u).unwrap();
        let back = read_graph_snapshot(&p).unwrap();
        assert_eq!(back.time, 0.125);
        assert_eq!(back.grid.n, 2);
        for (a, b) in back.values.iter().zip(&vals) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        // same content written twice is byte-identical
        let p2 = d.join("s2.txt");
        write_graph_snapshot(&p2, &u).unwrap();
        assert_eq!(fs::read(&p).unwrap(), fs::read(&p2).unwrap());
    }

    #[test]
    fn levelset_snapshot_round_trips_with_label() {
        let d = tmpdir("ls");
        let g = make_grid(GridMode::Cartesian2D, 0.25, 1.0, 1).unwrap();
        let vals: Vec<f64> = (0..g.node_count()).map(|i| ((i as f64) * 0.07).sin()).collect();
        let w = LevelSetField::new(g, vals.clone(), 0.5, LevelSetLabel::VCylinder).unwrap();
        let p = d.join("w.txt");
        write_levelset_snapshot(&p, &w).unwrap();
        let back = read_levelset_snapshot(&p).unwrap();
        assert_eq!(back.label, LevelSetLabel::VCylinder);
        for (a, b) in back.values.iter().zip(&vals) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        // a graph reader refuses a levelset file
        assert!(read_graph_snapshot(&p).is_err());
    }

    #[test]
    fn trajectory_directory_round_trip() {
        let d = tmpdir("traj");
        let g = make_grid(GridMode::Radial1D, 0.25, 1.0, 1).unwrap();
        let mut traj = Trajectory::new();
        for k in 0..3 {
            let vals = vec![k as f64; g.node_count()];
            traj.push(GraphField::new(g, vals, 0.1 * k as f64).unwrap())
                .unwrap();
        }
        write_graph_trajectory(&d.join("graph"), &traj).unwrap();
        let back = read_graph_trajectory(&d.join("graph")).unwrap();
        assert_eq!(back.snapshots.len(), 3);
        assert!((back.times()[2] - 0.2).abs() < 1e-15);
    }

    #[test]
    fn monitors_csv_round_trips_and_header_is_pinned() {
        let d = tmpdir("csv");
        let rec = MonitorRecord {
            time: 0.1,
            c1_value: 2.0,
            c2_value: 3.5,
            holder_worst: f64::NAN,
            grad_bound: 1.25,
            a_used: 15.0,
            k_used: 0.3,
            lambda_used: 2.0,
            m_used: 1.0,
        };
        let p = d.join(MONITORS_FILE);
        write_monitors_csv(&p, &[rec]).unwrap();
        let text = fs::read_to_string(&p).unwrap();
        assert!(text.starts_with("time,c1,c2,holder_worst,grad_bound,a,k,lambda,M\n"));
        let back = read_monitors_csv(&p).unwrap();
        assert_eq!(back.len(), 1);
        assert!(back[0].holder_worst.is_nan());
        assert_eq!(back[0].c2_value, 3.5);
        assert_eq!(back[0].m_used, 1.0);
    }

    #[test]
    fn checks_ndjson_round_trip() {
        let d = tmpdir("ndjson");
        let reports = vec![
            CheckReport::new("ordering_w_v", "bowl", -1e-15, -1e-12, true),
            CheckReport::new("projection_vs_levelset", "bowl", 0.03, 0.05, true),
        ];
        let p = d.join(CHECKS_FILE);
        write_checks_ndjson(&p, &reports).unwrap();
        let text = fs::read_to_string(&p).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert!(text.lines().next().unwrap().contains("\"name\":\"ordering_w_v\""));
        let back = read_checks_ndjson(&p).unwrap();
        assert_eq!(back[1].threshold, 0.05);
        assert!(back[0].pass);
    }

    #[test]
    fn config_file_round_trip_and_malformed_rejection() {
        let d = tmpdir("cfg");
        let cfg = builtin("annulus").unwrap();
        let p = d.join(CONFIG_FILE);
        write_config(&p, &cfg).unwrap();
        let back = read_config(&p).unwrap();
        assert_eq!(back.inner, Some(0.3));
        fs::write(d.join("bad.json"), "{not json").unwrap();
        assert!(matches!(
            read_config(&d.join("bad.json")),
            Err(Error::Parse(_))
        ));
        fs::write(d.join("bad.txt"), "no magic here\n").unwrap();
        assert!(read_graph_snapshot(&d.join("bad.txt")).is_err());
    }
}
