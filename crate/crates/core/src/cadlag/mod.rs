//! Paths on `[0, 1]`: exact step functions, gridded samples, target sets and
//! the Skorokhod J1 distance.

mod j1;
mod path;
mod target;

pub use j1::{bound_away_radius, j1_distance, j1_feasible};
pub use path::{GridPath, Jump, StepPath};
pub use target::{
    AbsAboveRamp, All, CorridorSet, Empty, ModerateJumps, OuBarrier, PathSet, TargetSet, TerminalAbove,
};
