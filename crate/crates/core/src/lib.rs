//! Traversable-surface extraction and clearance-aware planning on 3D
//! occupancy grids.
//!
//! The pipeline is:
//!
//! 1. [`grid`]: load or voxelize an [`OccupancyGrid`].
//! 2. [`extract`]: keep free voxels with ground support and overhead
//!    clearance, drop those whose body volume collides, then flood-fill from a
//!    seed under bounded-step connectivity to get the [`Surface`].
//! 3. [`dfield`]: boundary distance per surface state.
//! 4. [`plan`]: weighted A* over the surface.
//!
//! [`scenegen`] builds synthetic test scenes and samples queries, [`oracle`]
//! holds slow reference implementations, and [`report`] runs benchmarks.

pub mod cli;
pub mod dfield;
pub mod error;
pub mod extract;
pub mod grid;
pub mod oracle;
pub mod pipeline;
pub mod plan;
pub mod report;
pub mod scenegen;

pub use dfield::{boundary_states, distance_field, DistanceField};
pub use error::{Endpoint, Error, Result};
pub use extract::{
    candidate_set, collision_filter, extract_surface, reduction_stats, select_seed, CandidateSet,
    DerivedVoxelParams, ExtractionParams, ReductionStats, Surface,
};
pub use grid::{voxelize, Dims, GridGeometry, OccupancyGrid, PointCloud, Voxel};
pub use pipeline::{run_extraction, snap_endpoint, Extraction, SeedSpec};
pub use plan::{edge_cost, heuristic, plan, successors, PathResult, PlanParams};
