//! Numerical laboratory for mean curvature flow of complete graphs.
//!
//! The crate solves graphical mean curvature flow with a smooth cap applied
//! to the initial datum (so the graph is complete over the whole grid even
//! when the underlying datum blows up at a boundary), solves the companion
//! level-set flow for the same geometry in the ambient space, and
//! cross-examines the two descriptions: boundaries must coincide, ordering
//! must be preserved, cylinders must stay products, capped solutions must
//! increase to their limit as the cap rises.
//!
//! Entry points:
//! - [`graphflow::solve_capped`] — the graph solver with per-step monitors,
//! - [`levelset::solve_levelset`] — the ambient solver,
//! - [`compare`] — the differential-testing checks between the two,
//! - [`cli_io`] — scenario configs, run orchestration, serialization.

pub mod cli_io;
pub mod compare;
pub mod contour;
pub mod domain;
pub mod error;
pub mod fields;
pub mod geometry;
pub mod graphflow;
pub mod levelset;
pub mod monitors;
pub mod oracles;

pub use error::{Error, Result};
