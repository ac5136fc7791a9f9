//! Scenario files, run artifacts, and the command-line front end: a tiny
//! expression language for custom initial data, JSON scenario configs,
//! plain-text snapshot and CSV serialization, deterministic SVG rendering,
//! and the driver that runs a scenario and its verification checks.

pub mod expr;
pub mod io;
pub mod runner;
pub mod scenario;
pub mod svg;
