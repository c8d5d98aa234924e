//! Third-party risk assessment and minimum-risk path planning for small
//! UAVs over a voxelized urban airspace.
//!
//! The pipeline is: [`scenario`] (urban pattern) → [`risk`] (per-cell
//! normalized risk map) → [`planner`] / [`eda`] (paths) → [`eval`]
//! (benchmarks and statistics).

// `!(x > y)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
pub mod error;
pub mod grid;
pub mod eda;
pub mod eval;
pub mod io;
pub mod planner;
pub mod risk;
pub mod scenario;

pub use error::{Error, Result};
pub use grid::{CellIndex, GridSpec, OccupancyGrid};
pub use planner::{FlightPath, HeuristicInfo};
pub use risk::{RiskMap, RiskModel, RiskWeights, UavModel};
pub use scenario::{ScenarioGenConfig, UrbanScenario};
