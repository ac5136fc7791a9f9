//! Scenario configuration: a flat JSON document naming a domain shape, an
//! initial datum (the default blow-up profile or a custom expression), and
//! the solver parameters. Built-in scenarios cover the four canonical
//! pictures: graph over a ball, graph over an annulus, a neck-pinch
//! dumbbell, and a multi-hole domain.

use serde::{Deserialize, Serialize};

use crate::cli_io::expr::{self, Bindings};
use crate::domain::{blowup_datum, DomainShape, Hole};
use crate::error::{Error, Result};
use crate::fields::{is_escaped, make_grid, GraphField, GridMode, GridSpec, ESCAPED};
use crate::graphflow::{capped_initial, CappedProblem, DtPolicy};
use crate::levelset::{tsd_cylinder, tsd_graph, tsd_shape_boundary, LevelSetProblem};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HoleConfig {
    pub cx: f64,
    pub cy: f64,
    pub radius: f64,
}

fn default_datum() -> String {
    "default".into()
}

fn default_delta_reg() -> f64 {
    1.0
}

fn default_outputs() -> Vec<String> {
    vec![
        "snapshots".into(),
        "csv".into(),
        "ndjson".into(),
        "svg".into(),
    ]
}

/// Flat JSON scenario description. `domain` selects the shape; only the
/// matching geometric keys are read. `datum` is either "default" (the
/// blow-up profile 1/dist + |x|²) or an arithmetic expression over
/// r/x/y/dist.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub name: String,
    pub domain: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inner: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outer: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lobe_radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lobe_offset: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub neck_half_width: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub holes: Option<Vec<HoleConfig>>,
    #[serde(default = "default_datum")]
    pub datum: String,
    pub n: u32,
    #[serde(rename = "L")]
    pub cap: f64,
    pub eps: f64,
    #[serde(rename = "R")]
    pub hold_radius: f64,
    #[serde(rename = "T")]
    pub horizon: f64,
    pub h: f64,
    pub snap_every: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extent: Option<f64>,
    #[serde(default = "default_delta_reg")]
    pub delta_reg: f64,
    /// pinned time step; omitted → automatic CFL choice
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default = "default_outputs")]
    pub outputs: Vec<String>,
}

impl ScenarioConfig {
    pub fn shape(&self) -> Result<DomainShape> {
        let need = |v: Option<f64>, key: &str| {
            v.ok_or_else(|| {
                Error::InvalidConfig(format!(
                    "domain {:?} requires the key {key:?}",
                    self.domain
                ))
            })
        };
        let shape = match self.domain.as_str() {
            "ball" => DomainShape::Ball {
                radius: need(self.radius, "radius")?,
            },
            "annulus" => DomainShape::Annulus {
                inner: need(self.inner, "inner")?,
                outer: need(self.outer, "outer")?,
            },
            "dumbbell" => DomainShape::Dumbbell {
                lobe_radius: need(self.lobe_radius, "lobe_radius")?,
                lobe_offset: need(self.lobe_offset, "lobe_offset")?,
                neck_half_width: need(self.neck_half_width, "neck_half_width")?,
            },
            "multi_hole" => DomainShape::MultiHole {
                outer: need(self.outer, "outer")?,
                holes: self
                    .holes
                    .clone()
                    .unwrap_or_default()
                    .into_iter()
                    .map(|h| Hole {
                        cx: h.cx,
                        cy: h.cy,
                        radius: h.radius,
                    })
                    .collect(),
            },
            other => {
                return Err(Error::InvalidConfig(format!(
                    "unknown domain kind {other:?}; expected ball, annulus, dumbbell or multi_hole"
                )))
            }
        };
        shape.validate()?;
        Ok(shape)
    }

    /// Grid mode implied by the domain: radial shapes run on the half-line,
    /// planar shapes on a full 2D grid (these force n = 1).
    pub fn grid_mode(&self) -> Result<GridMode> {
        let shape = self.shape()?;
        if shape.is_radial() {
            Ok(GridMode::Radial1D)
        } else {
            if self.n != 1 {
                return Err(Error::InvalidConfig(format!(
                    "planar domains run on Cartesian grids with n = 1, got n = {}",
                    self.n
                )));
            }
            Ok(GridMode::Cartesian2D)
        }
    }

    pub fn extent(&self) -> f64 {
        self.extent.unwrap_or(self.hold_radius)
    }

    pub fn validate(&self) -> Result<()> {
        let shape = self.shape()?;
        self.grid_mode()?;
        if self.n == 0 {
            return Err(Error::InvalidConfig("n must be at least 1".into()));
        }
        if !(self.cap > 1.0) {
            return Err(Error::InvalidConfig(format!(
                "cap L = {} must exceed 1",
                self.cap
            )));
        }
        if !(self.eps > 0.0 && self.eps <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "eps = {} must lie in (0, 1]",
                self.eps
            )));
        }
        if self.hold_radius <= shape.outer_radius() + 1.0 {
            return Err(Error::InvalidConfig(format!(
                "hold radius R = {} must exceed the domain radius {} + 1",
                self.hold_radius,
                shape.outer_radius()
            )));
        }
        if self.extent() < self.hold_radius {
            return Err(Error::InvalidConfig(format!(
                "grid extent {} must reach the hold radius {}",
                self.extent(),
                self.hold_radius
            )));
        }
        if !(self.horizon > 0.0) || !(self.h > 0.0) {
            return Err(Error::InvalidConfig(
                "horizon T and spacing h must be positive".into(),
            ));
        }
        if self.snap_every == 0 {
            return Err(Error::InvalidConfig("snap_every must be >= 1".into()));
        }
        if !(self.delta_reg > 0.0 && self.delta_reg <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "delta_reg = {} must lie in (0, 1]",
                self.delta_reg
            )));
        }
        if self.datum != "default" {
            expr::parse(&self.datum)?;
        }
        Ok(())
    }
}

/// Built-in scenario table.
pub fn builtin(name: &str) -> Option<ScenarioConfig> {
    let base = |name: &str, domain: &str| ScenarioConfig {
        name: name.into(),
        domain: domain.into(),
        radius: None,
        inner: None,
        outer: None,
        lobe_radius: None,
        lobe_offset: None,
        neck_half_width: None,
        holes: None,
        datum: "default".into(),
        n: 1,
        cap: 20.0,
        eps: 0.05,
        hold_radius: 2.1,
        horizon: 0.6,
        h: 0.005,
        snap_every: 600,
        extent: None,
        delta_reg: 1.0,
        dt: None,
        outputs: default_outputs(),
    };
    match name {
        "bowl" => {
            let mut c = base("bowl", "ball");
            c.radius = Some(1.0);
            Some(c)
        }
        "annulus" => {
            let mut c = base("annulus", "annulus");
            c.inner = Some(0.3);
            c.outer = Some(1.0);
            Some(c)
        }
        "neckpinch" => {
            let mut c = base("neckpinch", "dumbbell");
            c.lobe_radius = Some(0.28);
            c.lobe_offset = Some(0.5);
            c.neck_half_width = Some(0.0275);
            c.cap = 45.0;
            c.eps = 0.01;
            c.hold_radius = 1.8;
            c.horizon = 0.02;
            c.h = 0.02;
            c.snap_every = 10;
            Some(c)
        }
        "multihole" => {
            let mut c = base("multihole", "multi_hole");
            c.outer = Some(0.8);
            c.holes = Some(vec![
                HoleConfig {
                    cx: -0.25,
                    cy: 0.0,
                    radius: 0.12,
                },
                HoleConfig {
                    cx: 0.3,
                    cy: 0.15,
                    radius: 0.1,
                },
            ]);
            c.eps = 0.01;
            c.hold_radius = 1.81;
            c.horizon = 0.02;
            c.h = 0.02;
            c.snap_every = 10;
            Some(c)
        }
        _ => None,
    }
}

pub fn builtin_names() -> &'static [&'static str] {
    &["bowl", "annulus", "neckpinch", "multihole"]
}

/// Evaluate the initial datum on the graph grid: the default blow-up profile
/// or the custom expression, escaped outside the domain.
pub fn datum_field(cfg: &ScenarioConfig, shape: &DomainShape, grid: GridSpec) -> Result<GraphField> {
    if cfg.datum == "default" {
        return blowup_datum(shape, grid);
    }
    let e = expr::parse(&cfg.datum)?;
    let vals: Vec<f64> = (0..grid.node_count())
        .map(|idx| {
            let (x, y) = match grid.mode {
                GridMode::Radial1D => (grid.r_of(idx), 0.0),
                GridMode::Cartesian2D => {
                    let (nx, _, _) = grid.axis_counts();
                    (grid.c_of(idx % nx), grid.c_of(idx / nx))
                }
                _ => (0.0, 0.0),
            };
            let sd = shape.signed_dist(x, y);
            if sd >= 0.0 {
                return ESCAPED;
            }
            e.eval(&Bindings {
                r: (x * x + y * y).sqrt(),
                x,
                y,
                dist: -sd,
            })
        })
        .collect();
    GraphField::new(grid, vals, 0.0)
}

/// Everything needed to run one scenario: the capped graph problem, the
/// boundary flow on the same spatial grid, and (one dimension up) the flows
/// of the graph's own level-set function and of the cylinder over the
/// boundary, on a coarsened ambient grid. `z_shift` is subtracted from the
/// graph before embedding so its minimum sits inside the ambient window.
#[derive(Debug, Clone)]
pub struct ScenarioBundle {
    pub cfg: ScenarioConfig,
    pub shape: DomainShape,
    pub capped: CappedProblem,
    pub vtilde: LevelSetProblem,
    pub w: Option<LevelSetProblem>,
    pub v: Option<LevelSetProblem>,
    /// boundary flow resampled on the ambient radial grid, for the
    /// cylinder-product check (radial scenarios only)
    pub vtilde_aux: Option<LevelSetProblem>,
    pub z_shift: f64,
    /// projection level for {u < a} checks: cap − 5
    pub a_level: f64,
}

/// Ambient spacing for the one-dimension-up flows, coarsened to keep the
/// higher-dimensional solves within budget.
pub fn ambient_h(mode: GridMode, h: f64) -> f64 {
    match mode {
        GridMode::Radial1D => h.max(0.02),
        GridMode::Cartesian2D => h.max(0.04),
        _ => h,
    }
}

/// Half-width of the ambient window for the one-dimension-up flows.
///
/// Chosen so the cylinder field v never reaches its +1 truncation plateau
/// inside the window: every window point stays within distance < 1 of the
/// domain-boundary cylinder for the whole run. A field pinned at the clamp
/// cannot follow its own dynamics, and the nearby erosion of the other
/// field's truncation seam would then register as a spurious ordering
/// violation; keeping v strictly below the clamp preserves an O(0.1)
/// pointwise margin between w and v that discretization wiggle cannot flip.
pub fn ambient_extent(shape: &DomainShape, ha: f64) -> f64 {
    let raw = if shape.is_radial() {
        // planar distance to the wall is |r - outer|, largest at the window
        // edge; +0.5 keeps it (and its growth while the wall shrinks) < 1
        shape.outer_radius() + 0.5
    } else {
        // square window: the corner is the far point; keep its planar
        // distance to the boundary below 1
        (shape.outer_radius() + 0.2).max(1.0)
    };
    (raw / ha).ceil() * ha
}

pub fn build_scenario(cfg: &ScenarioConfig) -> Result<ScenarioBundle> {
    cfg.validate()?;
    let shape = cfg.shape()?;
    let mode = cfg.grid_mode()?;
    let grid = make_grid(mode, cfg.h, cfg.extent(), cfg.n)?;
    let u0 = datum_field(cfg, &shape, grid)?;
    let dt_policy = match cfg.dt {
        Some(dt) => DtPolicy::Fixed(dt),
        None => DtPolicy::Auto,
    };
    let capped = CappedProblem {
        u0: u0.clone(),
        cap: cfg.cap,
        eps: cfg.eps,
        hold_radius: cfg.hold_radius,
        horizon: cfg.horizon,
        dt_policy,
    };
    let vtilde = LevelSetProblem {
        w0: tsd_shape_boundary(&shape, grid)?,
        delta_reg: cfg.delta_reg,
        horizon: cfg.horizon,
        dt_policy: DtPolicy::Auto,
    };

    let ha = ambient_h(mode, cfg.h);
    let initial = capped_initial(&u0, cfg.cap, cfg.eps)?;
    let z_shift = initial.min_finite();
    let shifted = {
        let vals: Vec<f64> = initial
            .values
            .iter()
            .map(|&x| if is_escaped(x) { x } else { x - z_shift })
            .collect();
        GraphField::new(grid, vals, 0.0)?
    };

    let ea = ambient_extent(&shape, ha);
    let (w, v, vtilde_aux) = match mode {
        GridMode::Radial1D => {
            let amb = make_grid(GridMode::Axisym2D, ha, ea, cfg.n)?;
            let w = LevelSetProblem {
                w0: tsd_graph(&shifted, amb)?,
                delta_reg: cfg.delta_reg,
                horizon: cfg.horizon,
                dt_policy: DtPolicy::Auto,
            };
            let v = LevelSetProblem {
                w0: tsd_cylinder(&shape, amb)?,
                delta_reg: cfg.delta_reg,
                horizon: cfg.horizon,
                dt_policy: DtPolicy::Auto,
            };
            let aux_grid = make_grid(GridMode::Radial1D, ha, ea, cfg.n)?;
            let aux = LevelSetProblem {
                w0: tsd_shape_boundary(&shape, aux_grid)?,
                delta_reg: cfg.delta_reg,
                horizon: cfg.horizon,
                dt_policy: DtPolicy::Auto,
            };
            (Some(w), Some(v), Some(aux))
        }
        GridMode::Cartesian2D => {
            let amb = make_grid(GridMode::Cartesian3D, ha, ea, cfg.n)?;
            let w = LevelSetProblem {
                w0: tsd_graph(&shifted, amb)?,
                delta_reg: cfg.delta_reg,
                horizon: cfg.horizon,
                dt_policy: DtPolicy::Auto,
            };
            let v = LevelSetProblem {
                w0: tsd_cylinder(&shape, amb)?,
                delta_reg: cfg.delta_reg,
                horizon: cfg.horizon,
                dt_policy: DtPolicy::Auto,
            };
            (Some(w), Some(v), None)
        }
        other => {
            return Err(Error::InvalidGrid(format!(
                "scenarios run on Radial1D or Cartesian2D graph grids, got {other:?}"
            )))
        }
    };

    Ok(ScenarioBundle {
        cfg: cfg.clone(),
        shape,
        capped,
        vtilde,
        w,
        v,
        vtilde_aux,
        z_shift,
        a_level: cfg.cap - 5.0,
    })
}
