//! End-to-end extraction: candidates, collision filter, seed, BFS, distance field.

use std::time::Instant;

use serde::Serialize;

use crate::dfield::{distance_field, DistanceField};
use crate::error::{Endpoint, Error, Result};
use crate::extract::{
    candidate_set, collision_filter, extract_surface, select_seed, ExtractionParams, Surface,
};
use crate::grid::{OccupancyGrid, Voxel};

/// How the extraction seed is chosen.
#[derive(Debug, Clone, PartialEq)]
pub enum SeedSpec {
    /// Snap a world pose to the nearest collision-free candidate.
    Pose { position: [f64; 3], max_snap: f64 },
    /// Explicit voxels; the first is canonical.
    Voxels(Vec<Voxel>),
}

/// Stage wall times, seconds.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct ExtractionTimings {
    #[serde(rename = "T_candidates")]
    pub candidates: f64,
    #[serde(rename = "T_collision")]
    pub collision: f64,
    #[serde(rename = "T_seed")]
    pub seed: f64,
    #[serde(rename = "T_bfs")]
    pub bfs: f64,
    #[serde(rename = "T_dfield")]
    pub dfield: f64,
}

impl ExtractionTimings {
    /// Candidate evaluation: every stage up to and including the BFS.
    pub fn evaluation(&self) -> f64 {
        self.candidates + self.collision + self.seed + self.bfs
    }

    pub fn total(&self) -> f64 {
        self.evaluation() + self.dfield
    }
}

#[derive(Debug, Clone)]
pub struct Extraction {
    pub surface: Surface,
    pub dfield: DistanceField,
    /// Candidates passing support and clearance.
    pub raw_candidates: usize,
    /// Candidates left after the collision filter.
    pub filtered_candidates: usize,
    pub timings: ExtractionTimings,
}

pub fn run_extraction(grid: &OccupancyGrid, params: &ExtractionParams, seed: &SeedSpec) -> Result<Extraction> {
    let dv = params.to_voxels(grid.resolution())?;
    let mut timings = ExtractionTimings::default();

    let t = Instant::now();
    let raw = candidate_set(grid, &dv);
    timings.candidates = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let filtered = collision_filter(&raw, grid, &dv);
    timings.collision = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let seeds = match seed {
        SeedSpec::Pose { position, max_snap } => vec![select_seed(*position, &filtered, *max_snap)?],
        SeedSpec::Voxels(v) => v.clone(),
    };
    timings.seed = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let surface = extract_surface(&filtered, &seeds, &dv)?;
    timings.bfs = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let dfield = distance_field(&surface);
    timings.dfield = t.elapsed().as_secs_f64();

    Ok(Extraction {
        surface,
        dfield,
        raw_candidates: raw.len(),
        filtered_candidates: filtered.len(),
        timings,
    })
}

/// Snaps a query pose to its nearest surface state, naming the endpoint on
/// failure.
pub fn snap_endpoint(surface: &Surface, pose: [f64; 3], max_snap: f64, which: Endpoint) -> Result<u32> {
    surface.snap(pose, max_snap).map_err(|e| match e {
        Error::SeedSnapFailed { distance, max_snap, .. } => Error::SeedSnapFailed {
            which: Some(which),
            distance,
            max_snap,
        },
        other => other,
    })
}
