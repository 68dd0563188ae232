//! Path planning among moving obstacles with adaptive dimensionality.
//!
//! The planner searches a 2D `(x, y)` grid and switches to 4D `(x, y, heading, time)` states
//! only inside circular regions where time matters. [`adplanner::plan`] runs the
//! plan / track / refine loop; [`baseline::plan_full`] is the full 4D weighted A* it is compared
//! against.

pub mod error;
pub mod geom;
pub mod lattice;
pub mod world;
pub mod search;
pub mod adgraph;
pub mod adplanner;
pub mod baseline;
pub mod envgen;
pub mod io;
pub mod render;
pub mod suite;

pub use adgraph::{AdaptiveGraph, HdRegion, MixedState, RegionEvent, RegionReason};
pub use adplanner::{plan, validate_outcome, PlanOutcome, PlanStatus, PlannerConfig, PlannerKind};
pub use baseline::{plan_full, BaselineConfig};
pub use envgen::{generate, EnvKind, GenSpec, Generated};
pub use error::{Error, Result};
pub use geom::{Point2, Pose};
pub use lattice::{Cost, CostModel, Lattice, MotionPrimitive, PrimitiveSet, StateHD, StateLD};
pub use search::{weighted_astar, SearchLimits, SearchResult, SearchSpace, SearchStats, SearchStatus};
pub use suite::{run_suite, ResultRow, SuiteSpec};
pub use world::{DynamicObstacle, GridMap, RobotFootprint, Scenario};
