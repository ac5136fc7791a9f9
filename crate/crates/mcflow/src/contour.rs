//! Zero-contour extraction (marching squares) and distances between
//! extracted boundaries: point-to-segment, point-to-polyline, and symmetric
//! Hausdorff distance between segment soups or between 1D crossing sets.

/// Line segment in physical coordinates.
pub type Segment = ([f64; 2], [f64; 2]);

/// Distance from point p to the segment [a, b].
pub fn point_segment_dist(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2).clamp(0.0, 1.0)
    };
    let (cx, cy) = (a[0] + t * dx, a[1] + t * dy);
    ((p[0] - cx).powi(2) + (p[1] - cy).powi(2)).sqrt()
}

/// Distance from a point to a polyline given as consecutive vertices.
pub fn dist_point_polyline(p: [f64; 2], verts: &[[f64; 2]]) -> f64 {
    if verts.is_empty() {
        return f64::INFINITY;
    }
    if verts.len() == 1 {
        return ((p[0] - verts[0][0]).powi(2) + (p[1] - verts[0][1]).powi(2)).sqrt();
    }
    verts
        .windows(2)
        .map(|w| point_segment_dist(p, w[0], w[1]))
        .fold(f64::INFINITY, f64::min)
}

fn dist_point_segments(p: [f64; 2], segs: &[Segment]) -> f64 {
    segs.iter()
        .map(|&(a, b)| point_segment_dist(p, a, b))
        .fold(f64::INFINITY, f64::min)
}

/// Zero contour of a scalar field sampled on an nx × ny lattice, as a soup
/// of segments in physical coordinates. The inside convention is value ≤ 0.
/// Cells touching non-finite values are skipped. Saddle cells are decided by
/// the cell-average sign.
pub fn marching_squares(
    vals: &[f64],
    nx: usize,
    ny: usize,
    x_of: &dyn Fn(usize) -> f64,
    y_of: &dyn Fn(usize) -> f64,
) -> Vec<Segment> {
    assert_eq!(vals.len(), nx * ny);
    let mut segs = Vec::new();
    let inside = |v: f64| v <= 0.0;
    // interpolated zero on the edge between (x0, v0) and (x1, v1)
    let cut = |p0: [f64; 2], v0: f64, p1: [f64; 2], v1: f64| -> [f64; 2] {
        let t = if v0 == v1 { 0.5 } else { v0 / (v0 - v1) };
        [p0[0] + t * (p1[0] - p0[0]), p0[1] + t * (p1[1] - p0[1])]
    };
    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            let v = [
                vals[j * nx + i],
                vals[j * nx + i + 1],
                vals[(j + 1) * nx + i + 1],
                vals[(j + 1) * nx + i],
            ];
            if v.iter().any(|x| !x.is_finite()) {
                continue;
            }
            let p = [
                [x_of(i), y_of(j)],
                [x_of(i + 1), y_of(j)],
                [x_of(i + 1), y_of(j + 1)],
                [x_of(i), y_of(j + 1)],
            ];
            let code = (inside(v[0]) as usize)
                | (inside(v[1]) as usize) << 1
                | (inside(v[2]) as usize) << 2
                | (inside(v[3]) as usize) << 3;
            if code == 0 || code == 15 {
                continue;
            }
            // edge k joins corner k and corner (k+1) % 4
            let edge = |k: usize| cut(p[k], v[k], p[(k + 1) % 4], v[(k + 1) % 4]);
            let mut emit = |a: usize, b: usize| segs.push((edge(a), edge(b)));
            match code {
                1 | 14 => emit(3, 0),
                2 | 13 => emit(0, 1),
                4 | 11 => emit(1, 2),
                8 | 7 => emit(2, 3),
                3 | 12 => emit(3, 1),
                6 | 9 => emit(0, 2),
                5 | 10 => {
                    // saddle: connect according to the center average
                    let center_inside = inside(v.iter().sum::<f64>() / 4.0);
                    let flip = (code == 5) == center_inside;
                    if flip {
                        emit(3, 0);
                        emit(1, 2);
                    } else {
                        emit(0, 1);
                        emit(2, 3);
                    }
                }
                _ => unreachable!(),
            }
        }
    }
    segs
}

/// Symmetric Hausdorff distance between two segment soups. Each segment is
/// sampled at five points; distances to the other soup are exact
/// point-to-segment distances, so the sampling error is at most 1/8 of a
/// segment length. Empty inputs give infinity.
pub fn hausdorff_segments(a: &[Segment], b: &[Segment]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return f64::INFINITY;
    }
    let one_sided = |from: &[Segment], to: &[Segment]| -> f64 {
        let mut worst = 0.0f64;
        for &(p0, p1) in from {
            for k in 0..5 {
                let t = k as f64 / 4.0;
                let q = [p0[0] + t * (p1[0] - p0[0]), p0[1] + t * (p1[1] - p0[1])];
                worst = worst.max(dist_point_segments(q, to));
            }
        }
        worst
    };
    one_sided(a, b).max(one_sided(b, a))
}

/// Symmetric Hausdorff distance between two sets of points on a line
/// (radial boundary radii). Empty inputs give infinity.
pub fn hausdorff_1d(a: &[f64], b: &[f64]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return f64::INFINITY;
    }
    let one_sided = |from: &[f64], to: &[f64]| -> f64 {
        from.iter()
            .map(|&x| {
                to.iter()
                    .map(|&y| (x - y).abs())
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0f64, f64::max)
    };
    one_sided(a, b).max(one_sided(b, a))
}

/// Total length of a segment soup (diagnostic: compare against closed-form
/// perimeters).
pub fn total_length(segs: &[Segment]) -> f64 {
    segs.iter()
        .map(|&(a, b)| ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt())
        .sum()
}
