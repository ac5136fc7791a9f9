//! Planar domain shapes over which graphs are defined: balls, annuli,
//! dumbbells (two lobes joined by a thin neck) and discs with circular
//! holes. Each shape provides a signed distance (negative inside) used both
//! for level-set initial data and for the canonical blow-up datum
//! 1/dist(x, boundary) + |x|^2.

use crate::error::{Error, Result};
use crate::fields::{GraphField, GridMode, GridSpec, ESCAPED};

/// A circular hole cut out of a larger disc.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hole {
    pub cx: f64,
    pub cy: f64,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DomainShape {
    /// Disc of the given radius centered at the origin.
    Ball { radius: f64 },
    /// Ring inner < |x| < outer.
    Annulus { inner: f64, outer: f64 },
    /// Two discs of `lobe_radius` centered at (±lobe_offset, 0) joined by
    /// the rectangle |x| ≤ lobe_offset, |y| ≤ neck_half_width.
    Dumbbell {
        lobe_radius: f64,
        lobe_offset: f64,
        neck_half_width: f64,
    },
    /// Disc of radius `outer` minus disjoint circular holes.
    MultiHole { outer: f64, holes: Vec<Hole> },
}

impl DomainShape {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        match self {
            DomainShape::Ball { radius } => {
                if !(*radius > 0.0) {
                    return bad(format!("ball radius must be positive, got {radius}"));
                }
            }
            DomainShape::Annulus { inner, outer } => {
                if !(*inner > 0.0 && outer > inner) {
                    return bad(format!(
                        "annulus radii must satisfy 0 < inner < outer, got ({inner}, {outer})"
                    ));
                }
            }
            DomainShape::Dumbbell {
                lobe_radius,
                lobe_offset,
                neck_half_width,
            } => {
                if !(*lobe_radius > 0.0 && *neck_half_width > 0.0) {
                    return bad("dumbbell lobe radius and neck width must be positive".into());
                }
                if lobe_offset <= lobe_radius {
                    return bad(format!(
                        "dumbbell lobes overlap: offset {lobe_offset} <= radius {lobe_radius}"
                    ));
                }
                if neck_half_width >= lobe_radius {
                    return bad(format!(
                        "neck half-width {neck_half_width} must be thinner than the lobes"
                    ));
                }
            }
            DomainShape::MultiHole { outer, holes } => {
                if !(*outer > 0.0) {
                    return bad(format!("outer radius must be positive, got {outer}"));
                }
                for h in holes {
                    if !(h.radius > 0.0) {
                        return bad("hole radii must be positive".into());
                    }
                    let c = (h.cx * h.cx + h.cy * h.cy).sqrt();
                    if c + h.radius >= *outer {
                        return bad(format!(
                            "hole at ({}, {}) reaches the outer boundary",
                            h.cx, h.cy
                        ));
                    }
                }
                for (i, a) in holes.iter().enumerate() {
                    for b in &holes[i + 1..] {
                        let d = ((a.cx - b.cx).powi(2) + (a.cy - b.cy).powi(2)).sqrt();
                        if d <= a.radius + b.radius {
                            return bad("holes must be pairwise disjoint".into());
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Signed distance, negative inside the domain. Exact for balls, annuli
    /// and hole arrangements; for the dumbbell the union-of-parts minimum is
    /// exact outside and slightly underestimates the interior distance near
    /// the weld seams (conservative for the blow-up datum).
    pub fn signed_dist(&self, x: f64, y: f64) -> f64 {
        let rho = (x * x + y * y).sqrt();
        match self {
            DomainShape::Ball { radius } => rho - radius,
            DomainShape::Annulus { inner, outer } => (inner - rho).max(rho - outer),
            DomainShape::Dumbbell {
                lobe_radius,
                lobe_offset,
                neck_half_width,
            } => {
                let d1 = ((x - lobe_offset).powi(2) + y * y).sqrt() - lobe_radius;
                let d2 = ((x + lobe_offset).powi(2) + y * y).sqrt() - lobe_radius;
                let drect = rect_signed_dist(x, y, *lobe_offset, *neck_half_width);
                d1.min(d2).min(drect)
            }
            DomainShape::MultiHole { outer, holes } => {
                let mut d = rho - outer;
                for h in holes {
                    let dh = h.radius - ((x - h.cx).powi(2) + (y - h.cy).powi(2)).sqrt();
                    d = d.max(dh);
                }
                d
            }
        }
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        self.signed_dist(x, y) < 0.0
    }

    pub fn dist_to_boundary(&self, x: f64, y: f64) -> f64 {
        self.signed_dist(x, y).abs()
    }

    /// Rotationally symmetric shapes admit a radial profile.
    pub fn is_radial(&self) -> bool {
        matches!(self, DomainShape::Ball { .. } | DomainShape::Annulus { .. })
    }

    /// Signed distance along a ray from the origin (radial shapes only).
    pub fn radial_signed_dist(&self, r: f64) -> Result<f64> {
        if !self.is_radial() {
            return Err(Error::InvalidConfig(
                "radial profile requested for a non-radial shape".into(),
            ));
        }
        Ok(self.signed_dist(r, 0.0))
    }

    /// Circumscribed radius, used to validate the Dirichlet ring placement.
    pub fn outer_radius(&self) -> f64 {
        match self {
            DomainShape::Ball { radius } => *radius,
            DomainShape::Annulus { outer, .. } => *outer,
            DomainShape::Dumbbell {
                lobe_radius,
                lobe_offset,
                ..
            } => lobe_offset + lobe_radius,
            DomainShape::MultiHole { outer, .. } => *outer,
        }
    }
}

/// Signed distance to the axis-aligned rectangle |x| ≤ hx, |y| ≤ hy.
fn rect_signed_dist(x: f64, y: f64, hx: f64, hy: f64) -> f64 {
    let qx = x.abs() - hx;
    let qy = y.abs() - hy;
    let ox = qx.max(0.0);
    let oy = qy.max(0.0);
    let outside = (ox * ox + oy * oy).sqrt();
    let inside = qx.max(qy).min(0.0);
    outside + inside
}

/// The canonical complete-graph datum over a shape: 1/dist(x, boundary) +
/// |x|^2 inside the domain, escaped outside. Blows up at the boundary, so
/// the graph is complete.
///
/// On Cartesian3D grids the planar shape is read as its solid of revolution
/// about the first axis: shapes are symmetric in their second coordinate, so
/// the revolved signed distance is exactly the planar one at (x, √(y²+z²)).
pub fn blowup_datum(shape: &DomainShape, grid: GridSpec) -> Result<GraphField> {
    shape.validate()?;
    let mut vals = vec![ESCAPED; grid.node_count()];
    match grid.mode {
        GridMode::Radial1D => {
            if !shape.is_radial() {
                return Err(Error::InvalidConfig(
                    "non-radial shape on a radial grid".into(),
                ));
            }
            for (i, v) in vals.iter_mut().enumerate() {
                let r = grid.r_of(i);
                let sd = shape.signed_dist(r, 0.0);
                if sd < 0.0 {
                    *v = -1.0 / sd + r * r;
                }
            }
        }
        GridMode::Cartesian2D => {
            let (nx, ny, _) = grid.axis_counts();
            for j in 0..ny {
                for i in 0..nx {
                    let (x, y) = (grid.c_of(i), grid.c_of(j));
                    let sd = shape.signed_dist(x, y);
                    if sd < 0.0 {
                        vals[j * nx + i] = -1.0 / sd + x * x + y * y;
                    }
                }
            }
        }
        GridMode::Cartesian3D => {
            for (idx, v) in vals.iter_mut().enumerate() {
                let (x, y, z) = grid.coords_of(idx);
                let sd = shape.signed_dist(x, (y * y + z * z).sqrt());
                if sd < 0.0 {
                    *v = -1.0 / sd + x * x + y * y + z * z;
                }
            }
        }
        other => {
            return Err(Error::InvalidGrid(format!(
                "blow-up datum is defined on Radial1D, Cartesian2D or Cartesian3D grids, got {other:?}"
            )))
        }
    }
    GraphField::new(grid, vals, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{is_escaped, make_grid};

    #[test]
    fn ball_and_annulus_signed_distances() {
        let b = DomainShape::Ball { radius: 1.0 };
        assert_eq!(b.signed_dist(0.0, 0.0), -1.0);
        assert_eq!(b.signed_dist(1.5, 0.0), 0.5);
        assert!(b.contains(0.3, 0.4));
        assert!(!b.contains(0.8, 0.8));

        let a = DomainShape::Annulus {
            inner: 0.3,
            outer: 1.0,
        };
        // midpoint of the ring: equidistant from both circles
        assert!((a.signed_dist(0.65, 0.0) - (-0.35)).abs() < 1e-15);
        assert!((a.signed_dist(0.1, 0.0) - 0.2).abs() < 1e-15);
        assert!((a.signed_dist(1.2, 0.0) - 0.2).abs() < 1e-15);
        assert!((a.radial_signed_dist(0.65).unwrap() - (-0.35)).abs() < 1e-15);
    }

    #[test]
    fn dumbbell_geometry_and_validation() {
        let d = DomainShape::Dumbbell {
            lobe_radius: 0.28,
            lobe_offset: 0.5,
            neck_half_width: 0.03,
        };
        d.validate().unwrap();
        assert!(d.contains(0.5, 0.0)); // lobe center
        assert!(d.contains(-0.5, 0.1)); // inside left lobe
        assert!(d.contains(0.0, 0.0)); // neck centerline
        assert!(!d.contains(0.0, 0.1)); // above the neck
        assert!(!d.contains(0.0, -0.1));
        assert!(!d.contains(0.9, 0.5));
        // neck edge distance
        assert!((d.signed_dist(0.0, 0.0) - (-0.03)).abs() < 1e-15);
        assert_eq!(d.outer_radius(), 0.78);

        let overlapping = DomainShape::Dumbbell {
            lobe_radius: 0.6,
            lobe_offset: 0.5,
            neck_half_width: 0.03,
        };
        assert!(overlapping.validate().is_err());
        let fat_neck = DomainShape::Dumbbell {
            lobe_radius: 0.28,
            lobe_offset: 0.5,
            neck_half_width: 0.3,
        };
        assert!(fat_neck.validate().is_err());
    }

    #[test]
    fn multihole_exact_distance_vs_sampled_boundary() {
        let m = DomainShape::MultiHole {
            outer: 0.8,
            holes: vec![
                Hole {
                    cx: 0.3,
                    cy: 0.0,
                    radius: 0.15,
                },
                Hole {
                    cx: -0.3,
                    cy: 0.2,
                    radius: 0.1,
                },
            ],
        };
        m.validate().unwrap();
        // brute-force: sample all three circles densely and take min distance
        let sampled = |x: f64, y: f64| -> f64 {
            let mut best = f64::INFINITY;
            let circles = [(0.0, 0.0, 0.8), (0.3, 0.0, 0.15), (-0.3, 0.2, 0.1)];
            for (cx, cy, r) in circles {
                for k in 0..20000 {
                    let th = 2.0 * std::f64::consts::PI * k as f64 / 20000.0;
                    let (bx, by) = (cx + r * th.cos(), cy + r * th.sin());
                    best = best.min(((x - bx).powi(2) + (y - by).powi(2)).sqrt());
                }
            }
            best
        };
        for (x, y) in [(0.0, 0.0), (0.3, 0.3), (-0.1, -0.4), (0.55, 0.0), (0.3, 0.1)] {
            assert!(
                (m.dist_to_boundary(x, y) - sampled(x, y)).abs() < 1e-6,
                "distance mismatch at ({x}, {y})"
            );
        }
        // inside/outside classification
        assert!(m.contains(0.0, 0.4));
        assert!(!m.contains(0.3, 0.05)); // inside a hole
        assert!(!m.contains(0.9, 0.0));

        let touching = DomainShape::MultiHole {
            outer: 0.8,
            holes: vec![
                Hole {
                    cx: 0.2,
                    cy: 0.0,
                    radius: 0.16,
                },
                Hole {
                    cx: -0.1,
                    cy: 0.0,
                    radius: 0.16,
                },
            ],
        };
        assert!(touching.validate().is_err());
    }

    #[test]
    fn blowup_datum_values_and_escape() {
        let g = make_grid(GridMode::Radial1D, 0.01, 2.0, 1).unwrap();
        let u = blowup_datum(&DomainShape::Ball { radius: 1.0 }, g).unwrap();
        assert_eq!(u.values[0], 1.0); // 1/1 + 0
        let i = 50; // r = 0.5
        assert!((u.values[i] - 2.25).abs() < 1e-12); // 1/0.5 + 0.25
        let outside = 150; // r = 1.5
        assert!(is_escaped(u.values[outside]));
        assert!(is_escaped(u.values[100])); // boundary node r = 1 exactly

        // datum grows without bound approaching the boundary
        assert!(u.values[99] > 90.0);
    }

    #[test]
    fn blowup_datum_cartesian_dumbbell() {
        let g = make_grid(GridMode::Cartesian2D, 0.02, 1.0, 1).unwrap();
        let d = DomainShape::Dumbbell {
            lobe_radius: 0.28,
            lobe_offset: 0.5,
            neck_half_width: 0.03,
        };
        let u = blowup_datum(&d, g).unwrap();
        let (nx, _, _) = g.axis_counts();
        let at = |x: f64, y: f64| {
            let i = ((x + 1.0) / 0.02).round() as usize;
            let j = ((y + 1.0) / 0.02).round() as usize;
            u.values[j * nx + i]
        };
        // lobe center: dist = 0.28, |x|^2 = 0.25
        assert!((at(0.5, 0.0) - (1.0 / 0.28 + 0.25)).abs() < 1e-9);
        // neck centerline: dist = 0.03
        assert!((at(0.0, 0.0) - 1.0 / 0.03).abs() < 1e-9);
        assert!(is_escaped(at(0.0, 0.2)));
    }
}
