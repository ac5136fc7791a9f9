//! Deterministic SVG rendering of snapshots: zero contours for level-set
//! fields, profile polylines and escape-region boundaries for graph fields.
//! Output is byte-reproducible — fixed viewBox, 6-decimal coordinates, no
//! timestamps.

use std::fs;
use std::path::{Path, PathBuf};

use crate::contour::{marching_squares, Segment};
use crate::error::Result;
use crate::fields::{
    is_escaped, GraphField, GridMode, LevelSetField, Snapshot, Trajectory,
};

const CANVAS: f64 = 640.0;
const MARGIN: f64 = 40.0;
const PLOT: f64 = CANVAS - 2.0 * MARGIN;

fn fmt6(x: f64) -> String {
    format!("{x:.6}")
}

/// Affine map from a world window to canvas pixels (y flipped).
#[derive(Clone, Copy)]
pub struct WorldWindow {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl WorldWindow {
    pub fn to_canvas(&self, x: f64, y: f64) -> (f64, f64) {
        let sx = MARGIN + (x - self.x0) / (self.x1 - self.x0) * PLOT;
        let sy = CANVAS - MARGIN - (y - self.y0) / (self.y1 - self.y0) * PLOT;
        (sx, sy)
    }

    pub fn from_canvas(&self, sx: f64, sy: f64) -> (f64, f64) {
        let x = self.x0 + (sx - MARGIN) / PLOT * (self.x1 - self.x0);
        let y = self.y0 + (CANVAS - MARGIN - sy) / PLOT * (self.y1 - self.y0);
        (x, y)
    }
}

fn svg_open(out: &mut String) {
    out.push_str(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 640 640\" \
         width=\"640\" height=\"640\">\n",
    );
}

fn svg_axes(out: &mut String, win: &WorldWindow) {
    // frame
    out.push_str(&format!(
        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" \
         stroke=\"#cccccc\" stroke-width=\"1\"/>\n",
        fmt6(MARGIN),
        fmt6(MARGIN),
        fmt6(PLOT),
        fmt6(PLOT)
    ));
    // world axes where they cross the window
    if win.x0 < 0.0 && win.x1 > 0.0 {
        let (sx, _) = win.to_canvas(0.0, win.y0);
        out.push_str(&format!(
            "<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"#888888\" \
             stroke-width=\"1\"/>\n",
            fmt6(sx),
            fmt6(MARGIN),
            fmt6(CANVAS - MARGIN)
        ));
    }
    if win.y0 < 0.0 && win.y1 > 0.0 {
        let (_, sy) = win.to_canvas(win.x0, 0.0);
        out.push_str(&format!(
            "<line x1=\"{1}\" y1=\"{0}\" x2=\"{2}\" y2=\"{0}\" stroke=\"#888888\" \
             stroke-width=\"1\"/>\n",
            fmt6(sy),
            fmt6(MARGIN),
            fmt6(CANVAS - MARGIN)
        ));
    }
}

fn svg_title(out: &mut String, text: &str) {
    out.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"14\" \
         fill=\"#333333\">{text}</text>\n",
        fmt6(MARGIN),
        fmt6(MARGIN - 12.0)
    ));
}

fn svg_segments(out: &mut String, win: &WorldWindow, segs: &[Segment], color: &str) {
    if segs.is_empty() {
        return;
    }
    let mut d = String::new();
    for (a, b) in segs {
        let (ax, ay) = win.to_canvas(a[0], a[1]);
        let (bx, by) = win.to_canvas(b[0], b[1]);
        d.push_str(&format!(
            "M {} {} L {} {} ",
            fmt6(ax),
            fmt6(ay),
            fmt6(bx),
            fmt6(by)
        ));
    }
    out.push_str(&format!(
        "<path d=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>\n",
        d.trim_end()
    ));
}

fn svg_polyline(out: &mut String, win: &WorldWindow, pts: &[(f64, f64)], color: &str) {
    if pts.len() < 2 {
        return;
    }
    let mut attr = String::new();
    for &(x, y) in pts {
        let (sx, sy) = win.to_canvas(x, y);
        attr.push_str(&format!("{},{} ", fmt6(sx), fmt6(sy)));
    }
    out.push_str(&format!(
        "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>\n",
        attr.trim_end()
    ));
}

/// World window used for a level-set field's plot, fixed by the grid alone.
pub fn levelset_window(w: &LevelSetField) -> WorldWindow {
    let e = w.grid.extent;
    match w.grid.mode {
        GridMode::Radial1D => WorldWindow {
            x0: 0.0,
            x1: e,
            y0: -1.2,
            y1: 1.2,
        },
        GridMode::Axisym2D => WorldWindow {
            x0: 0.0,
            x1: e,
            y0: -e,
            y1: e,
        },
        GridMode::Cartesian2D | GridMode::Cartesian3D => WorldWindow {
            x0: -e,
            x1: e,
            y0: -e,
            y1: e,
        },
    }
}

/// Zero-contour segments of a level-set snapshot in world coordinates.
/// 3D fields are sliced at the plane nearest the third coordinate's zero.
pub fn levelset_contours(w: &LevelSetField) -> Vec<Segment> {
    let g = &w.grid;
    let (na, nb, _) = g.axis_counts();
    match g.mode {
        GridMode::Radial1D => Vec::new(),
        GridMode::Axisym2D => marching_squares(
            &w.values,
            na,
            nb,
            &|i| g.r_of(i),
            &|j| g.c_of(j),
        ),
        GridMode::Cartesian2D => marching_squares(
            &w.values,
            na,
            nb,
            &|i| g.c_of(i),
            &|j| g.c_of(j),
        ),
        GridMode::Cartesian3D => {
            let (nx, ny, nz) = g.axis_counts();
            let kmid = (0..nz)
                .min_by(|&a, &b| {
                    g.c_of(a)
                        .abs()
                        .partial_cmp(&g.c_of(b).abs())
                        .unwrap()
                })
                .unwrap_or(0);
            let slice: Vec<f64> = (0..nx * ny)
                .map(|p| w.values[kmid * nx * ny + p])
                .collect();
            marching_squares(&slice, nx, ny, &|i| g.c_of(i), &|j| g.c_of(j))
        }
    }
}

/// Render one level-set snapshot: its zero contour (segments in 2D, the
/// value profile plus zero-crossing ticks in 1D). An empty zero set yields
/// axes only.
pub fn levelset_svg(w: &LevelSetField) -> String {
    let win = levelset_window(w);
    let mut out = String::new();
    svg_open(&mut out);
    svg_axes(&mut out, &win);
    svg_title(
        &mut out,
        &format!("{} t={}", w.label.as_str(), fmt6(w.time)),
    );
    match w.grid.mode {
        GridMode::Radial1D => {
            let pts: Vec<(f64, f64)> = w
                .values
                .iter()
                .enumerate()
                .map(|(i, &v)| (w.grid.r_of(i), v))
                .collect();
            svg_polyline(&mut out, &win, &pts, "#b75700");
            // vertical ticks at zero crossings
            let mut ticks: Vec<Segment> = Vec::new();
            for i in 1..w.values.len() {
                let (a, b) = (w.values[i - 1], w.values[i]);
                if (a <= 0.0) != (b <= 0.0) {
                    let s = w.grid.r_of(i - 1) + w.grid.h * a / (a - b);
                    ticks.push(([s, -0.15], [s, 0.15]));
                }
            }
            svg_segments(&mut out, &win, &ticks, "#0057b7");
        }
        _ => {
            let segs = levelset_contours(w);
            svg_segments(&mut out, &win, &segs, "#0057b7");
        }
    }
    out.push_str("</svg>\n");
    out
}

/// Render one graph snapshot: the radial profile as a polyline (with gaps at
/// escaped nodes), or for planar grids the boundary of the escaped region.
pub fn graph_svg(u: &GraphField) -> String {
    let g = &u.grid;
    let mut out = String::new();
    match g.mode {
        GridMode::Radial1D => {
            let finite: Vec<f64> = u
                .values
                .iter()
                .copied()
                .filter(|v| !is_escaped(*v))
                .collect();
            let (ymin, ymax) = finite.iter().fold(
                (f64::INFINITY, f64::NEG_INFINITY),
                |(lo, hi), &v| (lo.min(v), hi.max(v)),
            );
            let (ymin, ymax) = if finite.is_empty() {
                (0.0, 1.0)
            } else {
                let pad = 0.05 * (ymax - ymin).max(1e-9);
                (ymin - pad, ymax + pad)
            };
            let win = WorldWindow {
                x0: 0.0,
                x1: g.extent,
                y0: ymin,
                y1: ymax,
            };
            svg_open(&mut out);
            svg_axes(&mut out, &win);
            svg_title(&mut out, &format!("graph t={}", fmt6(u.time)));
            let mut run: Vec<(f64, f64)> = Vec::new();
            for (i, &v) in u.values.iter().enumerate() {
                if is_escaped(v) {
                    svg_polyline(&mut out, &win, &run, "#0057b7");
                    run.clear();
                } else {
                    run.push((g.r_of(i), v));
                }
            }
            svg_polyline(&mut out, &win, &run, "#0057b7");
        }
        _ => {
            let e = g.extent;
            let win = match g.mode {
                GridMode::Axisym2D => WorldWindow {
                    x0: 0.0,
                    x1: e,
                    y0: -e,
                    y1: e,
                },
                _ => WorldWindow {
                    x0: -e,
                    x1: e,
                    y0: -e,
                    y1: e,
                },
            };
            svg_open(&mut out);
            svg_axes(&mut out, &win);
            svg_title(&mut out, &format!("graph domain t={}", fmt6(u.time)));
            let (na, nb, _) = g.axis_counts();
            // indicator: −1 on the surviving domain, +1 where escaped
            let mask: Vec<f64> = u
                .values
                .iter()
                .map(|&v| if is_escaped(v) { 1.0 } else { -1.0 })
                .collect();
            let segs = match g.mode {
                GridMode::Axisym2D => {
                    marching_squares(&mask, na, nb, &|i| g.r_of(i), &|j| g.c_of(j))
                }
                _ => marching_squares(&mask, na, nb, &|i| g.c_of(i), &|j| g.c_of(j)),
            };
            svg_segments(&mut out, &win, &segs, "#0057b7");
        }
    }
    out.push_str("</svg>\n");
    out
}

/// One rendered file: where it went, what was asked for, and what the
/// nearest stored snapshot actually was.
#[derive(Debug, Clone)]
pub struct RenderedFile {
    pub path: PathBuf,
    pub requested: f64,
    pub actual: f64,
    pub exact: bool,
}

fn nearest_index(times: &[f64], t: f64) -> Option<usize> {
    times
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| {
            (*a - t)
                .abs()
                .partial_cmp(&(*b - t).abs())
                .unwrap()
        })
        .map(|(i, _)| i)
}

fn is_exact(actual: f64, requested: f64) -> bool {
    (actual - requested).abs() <= 1e-9 * requested.abs().max(1.0)
}

/// Write one SVG per requested time for a graph trajectory; a time not in
/// the trajectory falls back to the nearest snapshot (flagged `exact:
/// false` so callers can warn).
pub fn emit_graph_svgs(
    dir: &Path,
    tag: &str,
    traj: &Trajectory<GraphField>,
    times: &[f64],
) -> Result<Vec<RenderedFile>> {
    fs::create_dir_all(dir)?;
    let stored = traj.times();
    let mut files = Vec::new();
    for &t in times {
        let Some(i) = nearest_index(&stored, t) else {
            continue;
        };
        let snap = &traj.snapshots[i];
        let path = dir.join(format!("{tag}_{:04}_t{}.svg", i, fmt6(snap.time())));
        fs::write(&path, graph_svg(snap))?;
        files.push(RenderedFile {
            path,
            requested: t,
            actual: snap.time(),
            exact: is_exact(snap.time(), t),
        });
    }
    Ok(files)
}

/// Level-set counterpart of `emit_graph_svgs`.
pub fn emit_levelset_svgs(
    dir: &Path,
    tag: &str,
    traj: &Trajectory<LevelSetField>,
    times: &[f64],
) -> Result<Vec<RenderedFile>> {
    fs::create_dir_all(dir)?;
    let stored = traj.times();
    let mut files = Vec::new();
    for &t in times {
        let Some(i) = nearest_index(&stored, t) else {
            continue;
        };
        let snap = &traj.snapshots[i];
        let path = dir.join(format!("{tag}_{:04}_t{}.svg", i, fmt6(snap.time())));
        fs::write(&path, levelset_svg(snap))?;
        files.push(RenderedFile {
            path,
            requested: t,
            actual: snap.time(),
            exact: is_exact(snap.time(), t),
        });
    }
    Ok(files)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{make_grid, GraphField, LevelSetField, LevelSetLabel, ESCAPED};

    fn circle_field(radius: f64) -> LevelSetField {
        let g = make_grid(GridMode::Axisym2D, 0.02, 1.0, 1).unwrap();
        let (na, nb, _) = g.axis_counts();
        let mut vals = vec![0.0; g.node_count()];
        for j in 0..nb {
            for i in 0..na {
                let (r, z) = (g.r_of(i), g.c_of(j));
                vals[j * na + i] = ((r * r + z * z).sqrt() - radius).clamp(-1.0, 1.0);
            }
        }
        LevelSetField::new(g, vals, 0.0, LevelSetLabel::VtildeBoundary).unwrap()
    }

    #[test]
    fn svg_output_is_deterministic() {
        let w = circle_field(0.5);
        let a = levelset_svg(&w);
        let b = levelset_svg(&w);
        assert_eq!(a, b);
        assert!(a.contains("viewBox=\"0 0 640 640\""));
        assert!(a.contains("<path"));
    }

    #[test]
    fn circle_contour_radius_matches_oracle_within_linewidth() {
        let w = circle_field(0.5);
        let win = levelset_window(&w);
        let svg = levelset_svg(&w);
        // pull the path back out of the SVG text and invert the canvas map
        let d = svg
            .split("d=\"")
            .nth(1)
            .unwrap()
            .split('"')
            .next()
            .unwrap();
        let nums: Vec<f64> = d
            .split_whitespace()
            .filter(|t| *t != "M" && *t != "L")
            .map(|t| t.parse().unwrap())
            .collect();
        assert!(nums.len() >= 20);
        for pair in nums.chunks(2) {
            let (x, y) = win.from_canvas(pair[0], pair[1]);
            let r = (x * x + y * y).sqrt();
            assert!((r - 0.5).abs() < 0.02, "contour point at radius {r}");
        }
    }

    #[test]
    fn empty_zero_set_renders_axes_only() {
        let g = make_grid(GridMode::Cartesian2D, 0.1, 1.0, 1).unwrap();
        let vals = vec![1.0; g.node_count()];
        let w = LevelSetField::new(g, vals, 0.0, LevelSetLabel::VCylinder).unwrap();
        let svg = levelset_svg(&w);
        assert!(!svg.contains("<path"));
        assert!(svg.contains("<rect"));
    }

    #[test]
    fn plane_graph_renders_single_straight_polyline() {
        let g = make_grid(GridMode::Radial1D, 0.1, 1.0, 1).unwrap();
        let vals: Vec<f64> = (0..g.node_count()).map(|i| 2.0 + 0.5 * g.r_of(i)).collect();
        let u = GraphField::new(g, vals, 0.0).unwrap();
        let svg = graph_svg(&u);
        assert_eq!(svg.matches("<polyline").count(), 1);
        // escaped tail splits the profile into two polylines
        let mut vals2: Vec<f64> = (0..g.node_count()).map(|i| 2.0 + 0.5 * g.r_of(i)).collect();
        vals2[5] = ESCAPED;
        let u2 = GraphField::new(g, vals2, 0.0).unwrap();
        let svg2 = graph_svg(&u2);
        assert_eq!(svg2.matches("<polyline").count(), 2);
    }

    #[test]
    fn nearest_snapshot_fallback_is_flagged() {
        let g = make_grid(GridMode::Radial1D, 0.25, 1.0, 1).unwrap();
        let mut traj = Trajectory::new();
        for k in 0..3 {
            traj.push(GraphField::new(g, vec![1.0; g.node_count()], 0.1 * k as f64).unwrap())
                .unwrap();
        }
        let dir = std::env::temp_dir().join(format!("mcflow_svg_{}", std::process::id()));
        let _ = fs::remove_dir_all(&dir);
        let files = emit_graph_svgs(&dir, "graph", &traj, &[0.1, 0.14]).unwrap();
        assert_eq!(files.len(), 2);
        assert!(files[0].exact);
        assert!(!files[1].exact);
        assert!((files[1].actual - 0.1).abs() < 1e-12);
        assert!(files[0].path.is_file());
    }
}
