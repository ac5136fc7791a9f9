//! Pointwise differential-geometric quantities of a graph (gradient function
//! v, mean curvature H, squared second-fundamental-form norm |A|^2, the
//! weighted quantity G) and the smooth-minimum / mollification machinery used
//! to build capped initial data.
//!
//! Graph fields live on `Radial1D` (rotationally symmetric graphs over
//! R^{n+1}), `Cartesian2D` (general graphs over R^2) or `Cartesian3D`
//! (general graphs over R^3) grids.
//! Derivatives are second-order central differences, one-sided second-order
//! stencils at grid ends, and even reflection across the axis r = 0.
//! Sign convention: H > 0 for the graph of a strictly convex function.

use crate::error::{Error, Result};
use crate::fields::{is_escaped, GraphField, GridMode, ESCAPED};

// ---------------------------------------------------------------------------
// Smooth minimum profile
// ---------------------------------------------------------------------------

/// Largest deviation of the transition profile from min{x, 0}, attained at
/// x = 0: |f(0)| = 3/16.
pub const MIN_PROFILE_MAX_DEV: f64 = 3.0 / 16.0;

/// C^2 monotone approximation of min{x, 0}: f(x) = x for x <= -1, f(x) = 0
/// for x >= 1, and on (-1, 1) the unique polynomial of degree <= 5 matching
/// value, first and second derivative at both ends. The degree-5 coefficient
/// of that interpolant vanishes, leaving f(x) = (x-1)^3 (x+3) / 16.
pub fn smooth_min_profile(x: f64) -> f64 {
    if x <= -1.0 {
        x
    } else if x >= 1.0 {
        0.0
    } else {
        let d = x - 1.0;
        d * d * d * (x + 3.0) / 16.0
    }
}

/// Derivative of `smooth_min_profile`: (x-1)^2 (x+2) / 4 on the band,
/// with range [0, 1] — the profile is nondecreasing.
pub fn smooth_min_profile_deriv(x: f64) -> f64 {
    if x <= -1.0 {
        1.0
    } else if x >= 1.0 {
        0.0
    } else {
        let d = x - 1.0;
        d * d * (x + 2.0) / 4.0
    }
}

/// Smooth two-argument minimum: eps * f((a - b)/eps) + b. Escaped arguments
/// lose: the finite argument (conventionally the cap) is returned.
pub fn mollified_min(a: f64, b: f64, eps: f64) -> f64 {
    debug_assert!(eps > 0.0);
    if is_escaped(a) {
        return b;
    }
    if is_escaped(b) {
        return a;
    }
    b + eps * smooth_min_profile((a - b) / eps)
}

// ---------------------------------------------------------------------------
// Derivative stencils
// ---------------------------------------------------------------------------

/// First and second derivative along a radial line with even reflection at
/// the axis and one-sided second-order stencils at the outer end.
/// `None` if the stencil touches an escaped node.
pub(crate) fn radial_derivs(vals: &[f64], i: usize, h: f64) -> Option<(f64, f64)> {
    let m = vals.len() - 1;
    let esc = |idx: usize| is_escaped(vals[idx]);
    if esc(i) {
        return None;
    }
    if i == 0 {
        if esc(1) {
            return None;
        }
        // even reflection: u(-h) = u(h)
        Some((0.0, 2.0 * (vals[1] - vals[0]) / (h * h)))
    } else if i == m {
        if esc(m - 1) || esc(m - 2) || esc(m - 3) {
            return None;
        }
        let ur = (3.0 * vals[m] - 4.0 * vals[m - 1] + vals[m - 2]) / (2.0 * h);
        let urr =
            (2.0 * vals[m] - 5.0 * vals[m - 1] + 4.0 * vals[m - 2] - vals[m - 3]) / (h * h);
        Some((ur, urr))
    } else {
        if esc(i - 1) || esc(i + 1) {
            return None;
        }
        let ur = (vals[i + 1] - vals[i - 1]) / (2.0 * h);
        let urr = (vals[i + 1] - 2.0 * vals[i] + vals[i - 1]) / (h * h);
        Some((ur, urr))
    }
}

/// First derivative along one axis of a 2D array, one-sided at the ends.
#[inline]
fn d1_1d(get: &impl Fn(usize) -> f64, i: usize, len: usize, h: f64) -> Option<f64> {
    let v = |k: usize| {
        let x = get(k);
        if is_escaped(x) {
            None
        } else {
            Some(x)
        }
    };
    if i == 0 {
        Some((-3.0 * v(0)? + 4.0 * v(1)? - v(2)?) / (2.0 * h))
    } else if i == len - 1 {
        Some((3.0 * v(i)? - 4.0 * v(i - 1)? + v(i - 2)?) / (2.0 * h))
    } else {
        Some((v(i + 1)? - v(i - 1)?) / (2.0 * h))
    }
}

/// Second derivative along one axis, shifted-centered at the ends.
#[inline]
fn d2_1d(get: &impl Fn(usize) -> f64, i: usize, len: usize, h: f64) -> Option<f64> {
    let v = |k: usize| {
        let x = get(k);
        if is_escaped(x) {
            None
        } else {
            Some(x)
        }
    };
    let h2 = h * h;
    if i == 0 {
        Some((2.0 * v(0)? - 5.0 * v(1)? + 4.0 * v(2)? - v(3)?) / h2)
    } else if i == len - 1 {
        Some((2.0 * v(i)? - 5.0 * v(i - 1)? + 4.0 * v(i - 2)? - v(i - 3)?) / h2)
    } else {
        Some((v(i + 1)? - 2.0 * v(i)? + v(i - 1)?) / h2)
    }
}

/// Full second-order derivative pack on a Cartesian2D array.
pub(crate) struct Cart2Derivs {
    pub ux: f64,
    pub uy: f64,
    pub uxx: f64,
    pub uyy: f64,
    pub uxy: f64,
}

pub(crate) fn cart2_derivs(
    vals: &[f64],
    nx: usize,
    ny: usize,
    i: usize,
    j: usize,
    h: f64,
) -> Option<Cart2Derivs> {
    if is_escaped(vals[j * nx + i]) {
        return None;
    }
    let row = |jj: usize| move |ii: usize| vals[jj * nx + ii];
    let col = |ii: usize| move |jj: usize| vals[jj * nx + ii];
    let ux = d1_1d(&row(j), i, nx, h)?;
    let uy = d1_1d(&col(i), j, ny, h)?;
    let uxx = d2_1d(&row(j), i, nx, h)?;
    let uyy = d2_1d(&col(i), j, ny, h)?;
    // mixed derivative: x-difference of the y-derivative
    let gy_at = |ii: usize| -> Option<f64> { d1_1d(&col(ii), j, ny, h) };
    let uxy = if i == 0 {
        (-3.0 * gy_at(0)? + 4.0 * gy_at(1)? - gy_at(2)?) / (2.0 * h)
    } else if i == nx - 1 {
        (3.0 * gy_at(i)? - 4.0 * gy_at(i - 1)? + gy_at(i - 2)?) / (2.0 * h)
    } else {
        (gy_at(i + 1)? - gy_at(i - 1)?) / (2.0 * h)
    };
    Some(Cart2Derivs {
        ux,
        uy,
        uxx,
        uyy,
        uxy,
    })
}

/// Full second-order derivative pack on a Cartesian3D array
/// (storage idx = (k·ny + j)·nx + i).
pub(crate) struct Cart3Derivs {
    pub ux: f64,
    pub uy: f64,
    pub uz: f64,
    pub uxx: f64,
    pub uyy: f64,
    pub uzz: f64,
    pub uxy: f64,
    pub uxz: f64,
    pub uyz: f64,
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn cart3_derivs(
    vals: &[f64],
    nx: usize,
    ny: usize,
    nz: usize,
    i: usize,
    j: usize,
    k: usize,
    h: f64,
) -> Option<Cart3Derivs> {
    if is_escaped(vals[(k * ny + j) * nx + i]) {
        return None;
    }
    let x_line = |jj: usize, kk: usize| move |ii: usize| vals[(kk * ny + jj) * nx + ii];
    let y_line = |ii: usize, kk: usize| move |jj: usize| vals[(kk * ny + jj) * nx + ii];
    let z_line = |ii: usize, jj: usize| move |kk: usize| vals[(kk * ny + jj) * nx + ii];
    let ux = d1_1d(&x_line(j, k), i, nx, h)?;
    let uy = d1_1d(&y_line(i, k), j, ny, h)?;
    let uz = d1_1d(&z_line(i, j), k, nz, h)?;
    let uxx = d2_1d(&x_line(j, k), i, nx, h)?;
    let uyy = d2_1d(&y_line(i, k), j, ny, h)?;
    let uzz = d2_1d(&z_line(i, j), k, nz, h)?;
    // mixed derivatives: one-axis difference of the other axis' derivative,
    // one-sided at the ends like the first derivatives themselves
    let cross = |inner: &dyn Fn(usize) -> Option<f64>, pos: usize, len: usize| -> Option<f64> {
        if pos == 0 {
            Some((-3.0 * inner(0)? + 4.0 * inner(1)? - inner(2)?) / (2.0 * h))
        } else if pos == len - 1 {
            Some((3.0 * inner(pos)? - 4.0 * inner(pos - 1)? + inner(pos - 2)?) / (2.0 * h))
        } else {
            Some((inner(pos + 1)? - inner(pos - 1)?) / (2.0 * h))
        }
    };
    let uxy = cross(&|ii| d1_1d(&y_line(ii, k), j, ny, h), i, nx)?;
    let uxz = cross(&|ii| d1_1d(&z_line(ii, j), k, nz, h), i, nx)?;
    let uyz = cross(&|jj| d1_1d(&z_line(i, jj), k, nz, h), j, ny)?;
    Some(Cart3Derivs {
        ux,
        uy,
        uz,
        uxx,
        uyy,
        uzz,
        uxy,
        uxz,
        uyz,
    })
}

fn require_graph_mode(u: &GraphField) -> Result<()> {
    match u.grid.mode {
        GridMode::Radial1D | GridMode::Cartesian2D | GridMode::Cartesian3D => Ok(()),
        other => Err(Error::InvalidGrid(format!(
            "graph quantities are defined on Radial1D, Cartesian2D or Cartesian3D grids, got {other:?}"
        ))),
    }
}

// ---------------------------------------------------------------------------
// Pointwise quantities
// ---------------------------------------------------------------------------

/// Gradient function v = sqrt(1 + |Du|^2) >= 1. Escaped stencils propagate.
pub fn gradient_function(u: &GraphField) -> Result<Vec<f64>> {
    require_graph_mode(u)?;
    let h = u.grid.h;
    let mut out = vec![ESCAPED; u.values.len()];
    match u.grid.mode {
        GridMode::Radial1D => {
            for i in 0..u.values.len() {
                if let Some((ur, _)) = radial_derivs(&u.values, i, h) {
                    out[i] = (1.0 + ur * ur).sqrt();
                }
            }
        }
        GridMode::Cartesian2D => {
            let (nx, ny, _) = u.grid.axis_counts();
            for j in 0..ny {
                for i in 0..nx {
                    if let Some(d) = cart2_derivs(&u.values, nx, ny, i, j, h) {
                        out[j * nx + i] = (1.0 + d.ux * d.ux + d.uy * d.uy).sqrt();
                    }
                }
            }
        }
        GridMode::Cartesian3D => {
            let (nx, ny, nz) = u.grid.axis_counts();
            for k in 0..nz {
                for j in 0..ny {
                    for i in 0..nx {
                        if let Some(d) = cart3_derivs(&u.values, nx, ny, nz, i, j, k, h) {
                            out[(k * ny + j) * nx + i] =
                                (1.0 + d.ux * d.ux + d.uy * d.uy + d.uz * d.uz).sqrt();
                        }
                    }
                }
            }
        }
        _ => unreachable!(),
    }
    Ok(out)
}

/// Mean curvature H = div(Du / v) of the graph.
///
/// Radial: u_rr/(1+u_r^2)^{3/2} + n u_r / (r sqrt(1+u_r^2)), with the axis
/// limit (n+1) u_rr/(1+u_r^2)^{3/2}. Cartesian: conservative flux stencil at
/// interior nodes, the expanded quotient form on the boundary ring.
pub fn mean_curvature(u: &GraphField) -> Result<Vec<f64>> {
    require_graph_mode(u)?;
    let h = u.grid.h;
    let n = u.grid.n as f64;
    let mut out = vec![ESCAPED; u.values.len()];
    match u.grid.mode {
        GridMode::Radial1D => {
            for i in 0..u.values.len() {
                if let Some((ur, urr)) = radial_derivs(&u.values, i, h) {
                    let w = 1.0 + ur * ur;
                    let k1 = urr / (w * w.sqrt());
                    out[i] = if i == 0 {
                        (n + 1.0) * k1
                    } else {
                        k1 + n * ur / (u.grid.r_of(i) * w.sqrt())
                    };
                }
            }
        }
        GridMode::Cartesian2D => {
            let (nx, ny, _) = u.grid.axis_counts();
            let vals = &u.values;
            let at = |ii: usize, jj: usize| vals[jj * nx + ii];
            let esc_box = |i: usize, j: usize| -> bool {
                for dj in -1i64..=1 {
                    for di in -1i64..=1 {
                        let ii = i as i64 + di;
                        let jj = j as i64 + dj;
                        if (0..nx as i64).contains(&ii)
                            && (0..ny as i64).contains(&jj)
                            && is_escaped(at(ii as usize, jj as usize))
                        {
                            return true;
                        }
                    }
                }
                false
            };
            // flux through the face between (i,j) and (i+1,j)
            let flux_x = |i: usize, j: usize| -> f64 {
                let dx = (at(i + 1, j) - at(i, j)) / h;
                let dy = (at(i, j + 1) + at(i + 1, j + 1) - at(i, j - 1) - at(i + 1, j - 1))
                    / (4.0 * h);
                dx / (1.0 + dx * dx + dy * dy).sqrt()
            };
            let flux_y = |i: usize, j: usize| -> f64 {
                let dy = (at(i, j + 1) - at(i, j)) / h;
                let dx = (at(i + 1, j) + at(i + 1, j + 1) - at(i - 1, j) - at(i - 1, j + 1))
                    / (4.0 * h);
                dy / (1.0 + dx * dx + dy * dy).sqrt()
            };
            for j in 0..ny {
                for i in 0..nx {
                    if esc_box(i, j) {
                        if !is_escaped(at(i, j)) {
                            out[j * nx + i] = expanded_h(vals, nx, ny, i, j, h);
                        }
                        continue;
                    }
                    out[j * nx + i] = if i >= 1 && i + 1 < nx && j >= 1 && j + 1 < ny {
                        (flux_x(i, j) - flux_x(i - 1, j) + flux_y(i, j) - flux_y(i, j - 1)) / h
                    } else {
                        expanded_h(vals, nx, ny, i, j, h)
                    };
                }
            }
        }
        GridMode::Cartesian3D => {
            // expanded quotient form everywhere: (v^2 tr(Hess) - Du Hess Du)/v^3
            let (nx, ny, nz) = u.grid.axis_counts();
            for k in 0..nz {
                for j in 0..ny {
                    for i in 0..nx {
                        if let Some(d) = cart3_derivs(&u.values, nx, ny, nz, i, j, k, h) {
                            let v2 = 1.0 + d.ux * d.ux + d.uy * d.uy + d.uz * d.uz;
                            let lap = d.uxx + d.uyy + d.uzz;
                            let dhd = d.ux * d.ux * d.uxx
                                + d.uy * d.uy * d.uyy
                                + d.uz * d.uz * d.uzz
                                + 2.0 * (d.ux * d.uy * d.uxy
                                    + d.ux * d.uz * d.uxz
                                    + d.uy * d.uz * d.uyz);
                            out[(k * ny + j) * nx + i] = (lap - dhd / v2) / v2.sqrt();
                        }
                    }
                }
            }
        }
        _ => unreachable!(),
    }
    Ok(out)
}

/// Expanded quotient form of div(Du/v) for nodes where the flux stencil does
/// not fit: ((1+uy^2)uxx - 2 ux uy uxy + (1+ux^2)uyy) / v^3.
fn expanded_h(vals: &[f64], nx: usize, ny: usize, i: usize, j: usize, h: f64) -> f64 {
    match cart2_derivs(vals, nx, ny, i, j, h) {
        None => ESCAPED,
        Some(d) => {
            let v2 = 1.0 + d.ux * d.ux + d.uy * d.uy;
            ((1.0 + d.uy * d.uy) * d.uxx - 2.0 * d.ux * d.uy * d.uxy
                + (1.0 + d.ux * d.ux) * d.uyy)
                / (v2 * v2.sqrt())
        }
    }
}

/// Squared norm of the second fundamental form, |A|^2 = sum of squared
/// principal curvatures.
///
/// Radial: k1^2 + n k2^2 with k1 the profile curvature and k2 = u_r/(r v) the
/// rotational curvature (axis limit: (n+1) k1^2). Cartesian: tr((g^{-1} Hess u)^2)/v^2
/// with g^{-1} = I - Du (x) Du / v^2.
pub fn second_fundamental_norm(u: &GraphField) -> Result<Vec<f64>> {
    require_graph_mode(u)?;
    let h = u.grid.h;
    let n = u.grid.n as f64;
    let mut out = vec![ESCAPED; u.values.len()];
    match u.grid.mode {
        GridMode::Radial1D => {
            for i in 0..u.values.len() {
                if let Some((ur, urr)) = radial_derivs(&u.values, i, h) {
                    let w = 1.0 + ur * ur;
                    let k1 = urr / (w * w.sqrt());
                    out[i] = if i == 0 {
                        (n + 1.0) * k1 * k1
                    } else {
                        let k2 = ur / (u.grid.r_of(i) * w.sqrt());
                        k1 * k1 + n * k2 * k2
                    };
                }
            }
        }
        GridMode::Cartesian2D => {
            let (nx, ny, _) = u.grid.axis_counts();
            for j in 0..ny {
                for i in 0..nx {
                    if let Some(d) = cart2_derivs(&u.values, nx, ny, i, j, h) {
                        let v2 = 1.0 + d.ux * d.ux + d.uy * d.uy;
                        let g11 = 1.0 - d.ux * d.ux / v2;
                        let g12 = -d.ux * d.uy / v2;
                        let g22 = 1.0 - d.uy * d.uy / v2;
                        let b11 = g11 * d.uxx + g12 * d.uxy;
                        let b12 = g11 * d.uxy + g12 * d.uyy;
                        let b21 = g12 * d.uxx + g22 * d.uxy;
                        let b22 = g12 * d.uxy + g22 * d.uyy;
                        out[j * nx + i] = (b11 * b11 + 2.0 * b12 * b21 + b22 * b22) / v2;
                    }
                }
            }
        }
        GridMode::Cartesian3D => {
            let (nx, ny, nz) = u.grid.axis_counts();
            for k in 0..nz {
                for j in 0..ny {
                    for i in 0..nx {
                        if let Some(d) = cart3_derivs(&u.values, nx, ny, nz, i, j, k, h) {
                            let v2 = 1.0 + d.ux * d.ux + d.uy * d.uy + d.uz * d.uz;
                            let du = [d.ux, d.uy, d.uz];
                            let hess = [
                                [d.uxx, d.uxy, d.uxz],
                                [d.uxy, d.uyy, d.uyz],
                                [d.uxz, d.uyz, d.uzz],
                            ];
                            // b = (I - Du (x) Du / v^2) Hess
                            let mut b = [[0.0f64; 3]; 3];
                            for r in 0..3 {
                                for c in 0..3 {
                                    let mut acc = hess[r][c];
                                    for s in 0..3 {
                                        acc -= du[r] * du[s] / v2 * hess[s][c];
                                    }
                                    b[r][c] = acc;
                                }
                            }
                            // tr(b^2) / v^2
                            let mut tr = 0.0;
                            for r in 0..3 {
                                for c in 0..3 {
                                    tr += b[r][c] * b[c][r];
                                }
                            }
                            out[(k * ny + j) * nx + i] = tr / v2;
                        }
                    }
                }
            }
        }
        _ => unreachable!(),
    }
    Ok(out)
}

/// Scalar weighted-curvature combination G = v^2/(1 - k v^2) * |A|^2, defined
/// while k v^2 <= 1/2.
#[inline]
pub fn g_of(v2: f64, a2: f64, k: f64) -> Option<f64> {
    if k * v2 > 0.5 {
        None
    } else {
        Some(v2 / (1.0 - k * v2) * a2)
    }
}

/// Weighted curvature field with validity mask (false where k v^2 > 1/2 or
/// the stencil escapes). Invalid nodes carry NaN, escaped nodes the sentinel.
pub fn g_quantity(u: &GraphField, k: f64) -> Result<(Vec<f64>, Vec<bool>)> {
    if !(k > 0.0) {
        return Err(Error::InvalidConfig(format!("k must be positive, got {k}")));
    }
    let v = gradient_function(u)?;
    let a2 = second_fundamental_norm(u)?;
    let mut vals = vec![f64::NAN; v.len()];
    let mut mask = vec![false; v.len()];
    for i in 0..v.len() {
        if is_escaped(v[i]) || is_escaped(a2[i]) {
            vals[i] = ESCAPED;
            continue;
        }
        match g_of(v[i] * v[i], a2[i], k) {
            Some(g) => {
                vals[i] = g;
                mask[i] = true;
            }
            None => {
                vals[i] = f64::NAN;
            }
        }
    }
    Ok((vals, mask))
}

// ---------------------------------------------------------------------------
// Mollification
// ---------------------------------------------------------------------------

/// Bump kernel weight at scaled radius s = |offset|/eps (support s < 1).
#[inline]
fn bump(s2: f64) -> f64 {
    if s2 < 1.0 {
        (-1.0 / (1.0 - s2)).exp()
    } else {
        0.0
    }
}

/// Convolution of the datum with a normalized compactly supported bump of
/// radius `eps`, evaluated by quadrature on the grid nodes. Returns the input
/// unchanged when `eps < h` (the kernel would see a single node). Escaped
/// nodes stay escaped; escaped *neighbors* contribute `escaped_fill`
/// (conventionally the cap), matching the smooth-minimum convention for
/// undefined graph values. Grid ends reflect evenly, so constants are
/// preserved exactly up to roundoff.
pub fn mollify_initial(u0: &GraphField, eps: f64, escaped_fill: f64) -> Result<GraphField> {
    require_graph_mode(u0)?;
    if !(eps > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "mollification radius must be positive, got {eps}"
        )));
    }
    let h = u0.grid.h;
    if eps < h {
        return Ok(u0.clone());
    }
    let k = (eps / h).floor() as i64;
    let fill = |raw: f64| if is_escaped(raw) { escaped_fill } else { raw };
    let mut out = vec![0.0; u0.values.len()];
    match u0.grid.mode {
        GridMode::Radial1D => {
            let weights: Vec<f64> = (-k..=k)
                .map(|d| bump((d as f64 * h / eps).powi(2)))
                .collect();
            let wsum: f64 = weights.iter().sum();
            let m = u0.values.len() as i64 - 1;
            for i in 0..u0.values.len() {
                if is_escaped(u0.values[i]) {
                    out[i] = ESCAPED;
                    continue;
                }
                let mut acc = 0.0;
                for (w, d) in weights.iter().zip(-k..=k) {
                    let mut idx = i as i64 + d;
                    if idx < 0 {
                        idx = -idx; // even reflection at the axis
                    }
                    if idx > m {
                        idx = 2 * m - idx; // even reflection at the outer end
                    }
                    acc += w * fill(u0.values[idx as usize]);
                }
                out[i] = acc / wsum;
            }
        }
        GridMode::Cartesian2D => {
            let (nx, ny, _) = u0.grid.axis_counts();
            let mut offsets = Vec::new();
            let mut wsum = 0.0;
            for dj in -k..=k {
                for di in -k..=k {
                    let s2 = ((di * di + dj * dj) as f64) * h * h / (eps * eps);
                    let w = bump(s2);
                    if w > 0.0 {
                        offsets.push((di, dj, w));
                        wsum += w;
                    }
                }
            }
            let reflect = |mut idx: i64, len: i64| -> i64 {
                if idx < 0 {
                    idx = -idx;
                }
                if idx >= len {
                    idx = 2 * (len - 1) - idx;
                }
                idx
            };
            for j in 0..ny {
                for i in 0..nx {
                    if is_escaped(u0.values[j * nx + i]) {
                        out[j * nx + i] = ESCAPED;
                        continue;
                    }
                    let mut acc = 0.0;
                    for &(di, dj, w) in &offsets {
                        let ii = reflect(i as i64 + di, nx as i64) as usize;
                        let jj = reflect(j as i64 + dj, ny as i64) as usize;
                        acc += w * fill(u0.values[jj * nx + ii]);
                    }
                    out[j * nx + i] = acc / wsum;
                }
            }
        }
        GridMode::Cartesian3D => {
            let (nx, ny, nz) = u0.grid.axis_counts();
            let mut offsets = Vec::new();
            let mut wsum = 0.0;
            for dk in -k..=k {
                for dj in -k..=k {
                    for di in -k..=k {
                        let s2 = ((di * di + dj * dj + dk * dk) as f64) * h * h / (eps * eps);
                        let w = bump(s2);
                        if w > 0.0 {
                            offsets.push((di, dj, dk, w));
                            wsum += w;
                        }
                    }
                }
            }
            let reflect = |mut idx: i64, len: i64| -> i64 {
                if idx < 0 {
                    idx = -idx;
                }
                if idx >= len {
                    idx = 2 * (len - 1) - idx;
                }
                idx
            };
            for kz in 0..nz {
                for j in 0..ny {
                    for i in 0..nx {
                        let at = (kz * ny + j) * nx + i;
                        if is_escaped(u0.values[at]) {
                            out[at] = ESCAPED;
                            continue;
                        }
                        let mut acc = 0.0;
                        for &(di, dj, dk, w) in &offsets {
                            let ii = reflect(i as i64 + di, nx as i64) as usize;
                            let jj = reflect(j as i64 + dj, ny as i64) as usize;
                            let kk = reflect(kz as i64 + dk, nz as i64) as usize;
                            acc += w * fill(u0.values[(kk * ny + jj) * nx + ii]);
                        }
                        out[at] = acc / wsum;
                    }
                }
            }
        }
        _ => unreachable!(),
    }
    GraphField::new(u0.grid, out, u0.time)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{make_grid, GridMode};

    /// Solve the 6x6 Hermite system for the degree-5 transition profile by
    /// Gaussian elimination: p(-1) = -1, p'(-1) = 1, p''(-1) = 0,
    /// p(1) = p'(1) = p''(1) = 0. Returns coefficients a0..a5.
    fn solve_profile_coeffs() -> [f64; 6] {
        let mut m = [[0.0f64; 7]; 6];
        let fill_row = |row: &mut [f64; 7], x: f64, deriv: usize, rhs: f64| {
            for k in 0..6 {
                let c = match deriv {
                    0 => x.powi(k as i32),
                    1 => {
                        if k >= 1 {
                            k as f64 * x.powi(k as i32 - 1)
                        } else {
                            0.0
                        }
                    }
                    2 => {
                        if k >= 2 {
                            (k * (k - 1)) as f64 * x.powi(k as i32 - 2)
                        } else {
                            0.0
                        }
                    }
                    _ => unreachable!(),
                };
                row[k] = c;
            }
            row[6] = rhs;
        };
        fill_row(&mut m[0], -1.0, 0, -1.0);
        fill_row(&mut m[1], -1.0, 1, 1.0);
        fill_row(&mut m[2], -1.0, 2, 0.0);
        fill_row(&mut m[3], 1.0, 0, 0.0);
        fill_row(&mut m[4], 1.0, 1, 0.0);
        fill_row(&mut m[5], 1.0, 2, 0.0);
        // partial-pivot elimination
        for col in 0..6 {
            let piv = (col..6)
                .max_by(|&a, &b| m[a][col].abs().partial_cmp(&m[b][col].abs()).unwrap())
                .unwrap();
            m.swap(col, piv);
            for row in 0..6 {
                if row != col {
                    let f = m[row][col] / m[col][col];
                    for k in col..7 {
                        m[row][k] -= f * m[col][k];
                    }
                }
            }
        }
        let mut a = [0.0; 6];
        for k in 0..6 {
            a[k] = m[k][6] / m[k][k];
        }
        a
    }

    #[test]
    fn transition_profile_matches_hermite_solve() {
        let a = solve_profile_coeffs();
        let eval = |x: f64| (0..6).map(|k| a[k] * x.powi(k as i32)).sum::<f64>();
        let eval_d = |x: f64| (1..6).map(|k| k as f64 * a[k] * x.powi(k as i32 - 1)).sum::<f64>();
        // the solved interpolant IS the shipped profile on the band
        for s in 0..=1000 {
            let x = -1.0 + 2.0 * s as f64 / 1000.0;
            assert!(
                (eval(x) - smooth_min_profile(x)).abs() < 1e-12,
                "profile mismatch at {x}"
            );
            assert!((eval_d(x) - smooth_min_profile_deriv(x)).abs() < 1e-11);
        }
        // degree-5 coefficient degenerates to zero
        assert!(a[5].abs() < 1e-12, "quintic coefficient {}", a[5]);
        // frozen center value from the solve: -3/16
        assert!((eval(0.0) - (-3.0 / 16.0)).abs() < 1e-14);
        assert_eq!(smooth_min_profile(0.0), -3.0 / 16.0);
    }

    #[test]
    fn profile_is_monotone_and_identity_outside_band() {
        assert_eq!(smooth_min_profile(-2.0), -2.0);
        assert_eq!(smooth_min_profile(2.0), 0.0);
        assert_eq!(smooth_min_profile(-1.0), -1.0);
        assert_eq!(smooth_min_profile(1.0), 0.0);
        let mut prev = f64::NEG_INFINITY;
        for s in 0..=10_000 {
            let x = -1.0 + 2.0 * s as f64 / 10_000.0;
            let d = smooth_min_profile_deriv(x);
            assert!((0.0..=1.0 + 1e-15).contains(&d), "f' out of range at {x}");
            let f = smooth_min_profile(x);
            assert!(f >= prev - 1e-15, "profile decreased at {x}");
            prev = f;
            // deviation from the exact min never exceeds the frozen bound
            let dev = (f - x.min(0.0)).abs();
            assert!(dev <= MIN_PROFILE_MAX_DEV + 1e-15);
        }
    }

    #[test]
    fn mollified_min_examples_and_limit() {
        assert_eq!(mollified_min(0.0, 5.0, 1.0), 0.0);
        assert_eq!(mollified_min(5.0, 0.0, 1.0), 0.0);
        assert_eq!(mollified_min(ESCAPED, 7.0, 0.1), 7.0);
        assert_eq!(mollified_min(7.0, ESCAPED, 0.1), 7.0);
        // |min_eps - min| <= eps * max deviation of the profile
        for eps in [1.0, 0.3, 0.05] {
            for s in -40..=40 {
                let a = s as f64 * 0.1;
                let b = 0.7;
                let err = (mollified_min(a, b, eps) - a.min(b)).abs();
                assert!(err <= eps * MIN_PROFILE_MAX_DEV + 1e-14);
            }
        }
    }

    #[test]
    fn mollified_min_is_monotone_in_both_arguments() {
        let scales = [-2.0, -0.5, -0.1, 0.0, 0.1, 0.5, 2.0];
        for eps in [0.05, 0.4, 1.0] {
            for &b in &scales {
                let mut prev = f64::NEG_INFINITY;
                for s in -60..=60 {
                    let a = s as f64 * 0.05;
                    let m = mollified_min(a, b, eps);
                    assert!(m >= prev - 1e-12, "not monotone in a at a={a}, b={b}");
                    prev = m;
                }
            }
            for &a in &scales {
                let mut prev = f64::NEG_INFINITY;
                for s in -60..=60 {
                    let b = s as f64 * 0.05;
                    let m = mollified_min(a, b, eps);
                    assert!(m >= prev - 1e-12, "not monotone in b at a={a}, b={b}");
                    prev = m;
                }
            }
        }
    }

    fn radial_field(h: f64, extent: f64, n: u32, f: impl Fn(f64) -> f64) -> GraphField {
        let g = make_grid(GridMode::Radial1D, h, extent, n).unwrap();
        let vals = (0..g.node_count()).map(|i| f(g.r_of(i))).collect();
        GraphField::new(g, vals, 0.0).unwrap()
    }

    #[test]
    fn gradient_function_flat_and_analytic() {
        let u = radial_field(0.01, 1.0, 1, |_| 3.25);
        let v = gradient_function(&u).unwrap();
        assert!(v.iter().all(|&x| x == 1.0));

        // u(r) = r^2 has Du = 2r, so v(0.5) = sqrt(2)
        let u = radial_field(0.01, 1.0, 1, |r| r * r);
        let v = gradient_function(&u).unwrap();
        let i = 50;
        assert!((v[i] - 2.0f64.sqrt()).abs() < 1e-3);
        assert!(v.iter().all(|&x| x >= 1.0));
    }

    #[test]
    fn gradient_function_affine_cartesian() {
        let g = make_grid(GridMode::Cartesian2D, 0.1, 1.0, 1).unwrap();
        let (nx, ny, _) = g.axis_counts();
        let mut vals = vec![0.0; g.node_count()];
        for j in 0..ny {
            for i in 0..nx {
                vals[j * nx + i] = g.c_of(i);
            }
        }
        let u = GraphField::new(g, vals, 0.0).unwrap();
        let v = gradient_function(&u).unwrap();
        for &x in &v {
            assert!((x - 2.0f64.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn mean_curvature_constant_paraboloid_hemisphere() {
        let u = radial_field(0.01, 1.0, 1, |_| -2.0);
        assert!(mean_curvature(&u).unwrap().iter().all(|&x| x == 0.0));

        // paraboloid r^2/2: discrete second difference of a quadratic is
        // exact, so the axis value (n+1) u_rr = 2 is exact too
        let u = radial_field(0.01, 1.0, 1, |r| 0.5 * r * r);
        let h_field = mean_curvature(&u).unwrap();
        assert!((h_field[0] - 2.0).abs() < 1e-12);

        // lower unit hemisphere: H = 2 at the axis (unit sphere in R^3)
        let u = radial_field(0.005, 0.8, 1, |r| -(1.0 - r * r).sqrt());
        let h_field = mean_curvature(&u).unwrap();
        assert!((h_field[0] - 2.0).abs() < 1e-4, "H(0) = {}", h_field[0]);
        // off-axis the sphere still has H = 2
        let i = 60; // r = 0.3
        assert!((h_field[i] - 2.0).abs() < 1e-3, "H(0.3) = {}", h_field[i]);
    }

    #[test]
    fn second_fundamental_norm_hemisphere_and_consistency() {
        let u = radial_field(0.01, 1.0, 2, |_| 1.0);
        assert!(second_fundamental_norm(&u).unwrap().iter().all(|&x| x == 0.0));

        let u = radial_field(0.005, 0.8, 1, |r| -(1.0 - r * r).sqrt());
        let a2 = second_fundamental_norm(&u).unwrap();
        assert!((a2[0] - 2.0).abs() < 2e-4, "|A|^2(0) = {}", a2[0]);
        let i = 80; // r = 0.4: principal curvatures are both 1
        assert!((a2[i] - 2.0).abs() < 1e-3);

        // paraboloid axis: k1 = 1 exactly on a quadratic
        let u = radial_field(0.01, 1.0, 1, |r| 0.5 * r * r);
        let a2 = second_fundamental_norm(&u).unwrap();
        assert!((a2[0] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn cauchy_schwarz_between_h_and_a2() {
        // H^2 <= (n+1) |A|^2 pointwise, an algebraic identity on the same
        // derivative data
        for n in [1u32, 2, 3] {
            let u = radial_field(0.01, 1.0, n, |r| (3.0 * r).sin() * 0.7 + 0.3 * r * r);
            let hs = mean_curvature(&u).unwrap();
            let a2 = second_fundamental_norm(&u).unwrap();
            for i in 0..hs.len() {
                assert!(
                    hs[i] * hs[i] <= (n as f64 + 1.0) * a2[i] + 1e-10,
                    "violated at node {i} for n={n}"
                );
            }
        }
    }

    #[test]
    fn curvature_converges_at_second_order_on_hemisphere() {
        // observed order of H and |A|^2 against the analytic sphere values,
        // measured away from the one-sided outer ring
        let mut errs_h = Vec::new();
        let mut errs_a = Vec::new();
        for h in [0.02, 0.01, 0.005] {
            let u = radial_field(h, 0.8, 1, |r| -(1.0 - r * r).sqrt());
            let hh = mean_curvature(&u).unwrap();
            let aa = second_fundamental_norm(&u).unwrap();
            let upto = (0.5 / h) as usize;
            let eh = (0..=upto).map(|i| (hh[i] - 2.0).abs()).fold(0.0, f64::max);
            let ea = (0..=upto).map(|i| (aa[i] - 2.0).abs()).fold(0.0, f64::max);
            errs_h.push(eh);
            errs_a.push(ea);
        }
        for errs in [errs_h, errs_a] {
            let o1 = (errs[0] / errs[1]).log2();
            let o2 = (errs[1] / errs[2]).log2();
            assert!(o1 >= 1.9 && o2 >= 1.9, "orders {o1:.2}, {o2:.2} from {errs:?}");
        }
    }

    #[test]
    fn g_quantity_arithmetic_and_masking() {
        assert_eq!(g_of(2.0, 2.0, 0.1), Some(5.0));
        assert_eq!(g_of(2.0, 2.0, 0.3), None); // k v^2 = 0.6 > 1/2

        let u = radial_field(0.01, 1.0, 1, |_| 4.0);
        let (g, mask) = g_quantity(&u, 0.1).unwrap();
        assert!(g.iter().all(|&x| x == 0.0));
        assert!(mask.iter().all(|&m| m));
        assert!(g_quantity(&u, 0.0).is_err());

        // steep cone: v = sqrt(1+9) = sqrt(10); k v^2 = 1 > 1/2 -> masked
        let u = radial_field(0.01, 1.0, 1, |r| 3.0 * r);
        let (_, mask) = g_quantity(&u, 0.1).unwrap();
        let mid = 50;
        assert!(!mask[mid]);
    }

    #[test]
    fn mollify_preserves_constants_and_affine_interior() {
        let u = radial_field(0.01, 1.0, 1, |_| 2.5);
        let m = mollify_initial(&u, 0.05, 0.0).unwrap();
        for &x in &m.values {
            assert!((x - 2.5).abs() < 1e-12);
        }

        let u = radial_field(0.01, 1.0, 1, |r| 3.0 * r - 1.0);
        let m = mollify_initial(&u, 0.05, 0.0).unwrap();
        // symmetric kernel kills odd moments away from the reflecting ends
        for i in 10..90 {
            assert!(
                (m.values[i] - u.values[i]).abs() < 1e-9,
                "affine shifted at node {i}"
            );
        }
    }

    #[test]
    fn mollify_below_grid_scale_is_identity() {
        let u = radial_field(0.01, 1.0, 1, |r| (5.0 * r).sin());
        let m = mollify_initial(&u, 0.005, 0.0).unwrap();
        assert_eq!(m.values, u.values);
    }

    #[test]
    fn mollify_kink_matches_direct_quadrature() {
        // |x|-like kink at the axis: the smoothed center value is strictly
        // positive and equals the direct quadrature sum computed here
        let h = 0.01;
        let eps = 0.5;
        let u = radial_field(h, 2.0, 1, |r| r.abs());
        let m = mollify_initial(&u, eps, 0.0).unwrap();
        let k = (eps / h).floor() as i64;
        let mut acc = 0.0;
        let mut wsum = 0.0;
        for d in -k..=k {
            let s2 = (d as f64 * h / eps).powi(2);
            if s2 < 1.0 {
                let w = (-1.0 / (1.0 - s2)).exp();
                acc += w * (d as f64 * h).abs();
                wsum += w;
            }
        }
        let oracle = acc / wsum;
        assert!(m.values[0] > 0.0 && m.values[0] < eps);
        assert!((m.values[0] - oracle).abs() < 1e-13);
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
    fn cartesian3_quantities_on_sphere_cap_and_affine() {
        // graph of the upper cap of a radius-2 sphere over |x| <= 0.5:
        // every principal curvature is 1/2, so H = 3/2 and |A|^2 = 3/4
        let u = cart3_field(0.05, 0.5, |x, y, z| {
            (4.0 - x * x - y * y - z * z).sqrt()
        });
        let g = u.grid;
        let (nx, ny, _) = g.axis_counts();
        let center = g.node_count() / 2;
        let off = center + 3 + 2 * nx + nx * ny; // a generic interior node
        let hh = mean_curvature(&u).unwrap();
        let aa = second_fundamental_norm(&u).unwrap();
        let vv = gradient_function(&u).unwrap();
        for idx in [center, off] {
            assert!((hh[idx] - (-1.5)).abs() < 2e-3, "H = {}", hh[idx]);
            assert!((aa[idx] - 0.75).abs() < 2e-3, "|A|^2 = {}", aa[idx]);
            let (x, y, z) = g.coords_of(idx);
            let rho2 = x * x + y * y + z * z;
            // v = sqrt(1 + rho^2/(R^2 - rho^2)) for the sphere graph
            let v_exact = (1.0 + rho2 / (4.0 - rho2)).sqrt();
            assert!((vv[idx] - v_exact).abs() < 2e-3);
        }

        // affine graphs are flat: H = |A|^2 = 0, v constant
        let u = cart3_field(0.1, 0.5, |x, y, z| 0.3 * x - 0.2 * y + 0.6 * z + 1.0);
        let v_exact = (1.0f64 + 0.09 + 0.04 + 0.36).sqrt();
        assert!(mean_curvature(&u)
            .unwrap()
            .iter()
            .all(|&x| x.abs() < 1e-10));
        assert!(second_fundamental_norm(&u)
            .unwrap()
            .iter()
            .all(|&x| x.abs() < 1e-10));
        assert!(gradient_function(&u)
            .unwrap()
            .iter()
            .all(|&x| (x - v_exact).abs() < 1e-10));
    }

    #[test]
    fn mollify_cartesian3_preserves_constants_and_smooths_kinks() {
        let u = cart3_field(0.1, 0.5, |_, _, _| 1.75);
        let m = mollify_initial(&u, 0.25, 0.0).unwrap();
        for &x in &m.values {
            assert!((x - 1.75).abs() < 1e-12);
        }
        // cone |x|: center value becomes strictly positive, stays below eps
        let u = cart3_field(0.1, 0.5, |x, y, z| (x * x + y * y + z * z).sqrt());
        let m = mollify_initial(&u, 0.25, 0.0).unwrap();
        let center = u.grid.node_count() / 2;
        assert_eq!(u.values[center], 0.0);
        assert!(m.values[center] > 0.0 && m.values[center] < 0.25);
    }

    #[test]
    fn mollify_escape_semantics() {
        let g = make_grid(GridMode::Radial1D, 0.01, 1.0, 1).unwrap();
        let vals: Vec<f64> = (0..g.node_count())
            .map(|i| if g.r_of(i) > 0.5 { ESCAPED } else { 0.0 })
            .collect();
        let u = GraphField::new(g, vals, 0.0).unwrap();
        let m = mollify_initial(&u, 0.05, 10.0).unwrap();
        // escaped set unchanged
        for i in 0..m.values.len() {
            assert_eq!(is_escaped(m.values[i]), is_escaped(u.values[i]));
        }
        // finite node adjacent to the escaped zone is pulled up toward the cap
        let edge = (0.5 / 0.01) as usize;
        assert!(m.values[edge] > 0.0);
        // far from the zone nothing changes
        assert_eq!(m.values[0], 0.0);
    }
}
