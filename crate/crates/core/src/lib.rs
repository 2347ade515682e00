//! Simulation and threshold analysis for a two-stage mosquito population
//! whose larval carrying capacity is destroyed in periodic pulses, with the
//! pulse size set by how many households choose to clear breeding sites.
//!
//! Module map:
//!
//! * [`entomology`]: the autonomous aquatic/adult model, offspring number,
//!   equilibria and their classification.
//! * [`capacity`]: carrying-capacity recovery, impulses and the closed-form
//!   periodic capacity.
//! * [`behavior`]: bite risk, household adoption threshold, participation
//!   rate and control efficacy.
//! * [`dynamics`]: the positivity-preserving time stepper and the event
//!   driven simulator.
//! * [`analysis`]: persistence / extinction conditions under periodic control.
//! * [`config`], [`presets`], [`output`], [`svg`]: declarative scenarios,
//!   the built-in scenario presets, CSV/SVG emission.

pub mod analysis;
pub mod behavior;
pub mod capacity;
pub mod config;
pub mod dynamics;
pub mod entomology;
pub mod error;
pub mod output;
pub mod presets;
pub mod svg;

pub use error::{Error, Result};
