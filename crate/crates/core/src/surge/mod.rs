pub mod basin;
pub mod meow;
pub mod solver;
pub mod storm;

pub use basin::{BasinError, BasinGrid};
pub use meow::{compute_mom, run_storm_meow, MeowError, MeowField, MomField};
pub use solver::{cfl_bound, step_shallow_water, ForcingField, OuterBoundary, SimConfig, SimState, SolverError};
pub use storm::{wind_pressure_field, StormError, StormParams, TrackPoint, WindModel, FT_TO_M};
