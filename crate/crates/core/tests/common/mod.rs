#![allow(dead_code)]

use std::collections::{HashMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use surfnav::extract::{candidate_set, collision_filter, extract_surface, select_seed};
use surfnav::oracle::CostWeights;
use surfnav::{
    distance_field, DerivedVoxelParams, DistanceField, Dims, ExtractionParams, OccupancyGrid, PlanParams, Surface,
    Voxel,
};

/// Parameter sets cycled through by the random scenes (all at r = 0.2).
pub const PARAM_SETS: [ExtractionParams; 4] = [
    ExtractionParams { t_conn: 0.3, h_clear: 1.6, r_inf: 0.3 },
    ExtractionParams { t_conn: 0.3, h_clear: 1.6, r_inf: 0.0 },
    ExtractionParams { t_conn: 0.45, h_clear: 1.0, r_inf: 0.2 },
    ExtractionParams { t_conn: 0.0, h_clear: 0.6, r_inf: 0.0 },
];

pub const R: f64 = 0.2;

fn fill(grid: &mut OccupancyGrid, lo: [i32; 3], hi: [i32; 3], occupied: bool) {
    let d = grid.dims();
    for z in lo[2].max(0)..hi[2].min(d.nz as i32) {
        for y in lo[1].max(0)..hi[1].min(d.ny as i32) {
            for x in lo[0].max(0)..hi[0].min(d.nx as i32) {
                grid.set(Voxel::new(x, y, z), occupied);
            }
        }
    }
}

/// Seeded cluttered scene: ground slab, boxes of mixed heights, short stair
/// runs, an elevated slab with a stair up to it, and a few pits.
pub fn random_grid(seed: u64) -> OccupancyGrid {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (nx, ny, nz) = (rng.random_range(14..=30), rng.random_range(14..=30), 22);
    let mut g = OccupancyGrid::new(Dims::new(nx, ny, nz), R, [0.0; 3]).unwrap();
    let (nx, ny) = (nx as i32, ny as i32);
    fill(&mut g, [0, 0, 0], [nx, ny, 1], true);
    for _ in 0..rng.random_range(0..=2) {
        let (x, y) = (rng.random_range(0..nx), rng.random_range(0..ny));
        fill(&mut g, [x, y, 0], [x + rng.random_range(1..4), y + rng.random_range(1..4), 1], false);
    }
    for _ in 0..rng.random_range(3..=10) {
        let (x, y) = (rng.random_range(0..nx), rng.random_range(0..ny));
        let (w, d) = (rng.random_range(1..7), rng.random_range(1..7));
        let h = rng.random_range(1..=4);
        fill(&mut g, [x, y, 1], [x + w, y + d, 1 + h], true);
    }
    if rng.random_bool(0.7) {
        // elevated slab at z = 10 with a stair climbing to it along +x
        let (x0, y0) = (rng.random_range(0..nx / 2), rng.random_range(0..ny / 2));
        let (w, d) = (rng.random_range(4..12), rng.random_range(4..12));
        fill(&mut g, [x0, y0, 10], [x0 + w, y0 + d, 11], true);
        let sx = x0 + w;
        for i in 0..10 {
            fill(&mut g, [sx + i, y0, 1], [sx + i + 1, y0 + 4, 10 - i], true);
        }
    }
    for _ in 0..rng.random_range(0..=3) {
        // short stair run
        let (x, y) = (rng.random_range(0..nx), rng.random_range(0..ny));
        for i in 0..rng.random_range(2..6) {
            fill(&mut g, [x + i, y, 1], [x + i + 1, y + 3, 2 + i], true);
        }
    }
    g
}

/// Candidates by direct evaluation of support and clearance on every voxel.
pub fn naive_candidates(grid: &OccupancyGrid, dv: &DerivedVoxelParams) -> HashSet<Voxel> {
    let d = grid.dims();
    let mut out = HashSet::new();
    for i in 0..d.volume() {
        let v = d.voxel(i);
        if v.z < 1 || grid.is_occupied(v) || !grid.is_occupied_in_bounds(v.offset(0, 0, -1)) {
            continue;
        }
        if (1..=dv.clearance_i32()).all(|j| !grid.is_occupied(v.offset(0, 0, j))) {
            out.insert(v);
        }
    }
    out
}

/// Candidates whose robot body (disk of radius `r_vox`, heights `z+k+1..=z+K`)
/// is free; out-of-grid cells count as occupied.
pub fn naive_collision_free(
    grid: &OccupancyGrid,
    cands: &HashSet<Voxel>,
    dv: &DerivedVoxelParams,
) -> HashSet<Voxel> {
    let r = dv.radius as i32;
    let (k, big_k) = (dv.step_i32(), dv.clearance_i32());
    cands
        .iter()
        .copied()
        .filter(|v| {
            for dx in -r..=r {
                for dy in -r..=r {
                    if (dx == 0 && dy == 0) || dx * dx + dy * dy > r * r {
                        continue;
                    }
                    for dz in (k + 1)..=big_k {
                        if grid.is_occupied(v.offset(dx, dy, dz)) {
                            return false;
                        }
                    }
                }
            }
            true
        })
        .collect()
}

pub struct Extracted {
    pub grid: OccupancyGrid,
    pub dv: DerivedVoxelParams,
    pub filtered: HashSet<Voxel>,
    pub surface: Surface,
    pub dfield: DistanceField,
}

/// Extracts a random scene from the collision-free candidate nearest the
/// middle of the ground floor. `None` when the scene has no candidates.
pub fn extract_random(seed: u64) -> Option<Extracted> {
    let grid = random_grid(seed);
    let dv = PARAM_SETS[(seed % PARAM_SETS.len() as u64) as usize].to_voxels(R).unwrap();
    let filtered_set = collision_filter(&candidate_set(&grid, &dv), &grid, &dv);
    let d = grid.dims();
    let pose = [d.nx as f64 * R / 2.0, d.ny as f64 * R / 2.0, 1.5 * R];
    let s = select_seed(pose, &filtered_set, f64::INFINITY).ok()?;
    let surface = extract_surface(&filtered_set, &[s], &dv).unwrap();
    let dfield = distance_field(&surface);
    Some(Extracted {
        filtered: filtered_set.iter().collect(),
        grid,
        dv,
        surface,
        dfield,
    })
}

pub fn weights(r: f64, p: &PlanParams) -> CostWeights {
    CostWeights {
        resolution: r,
        w_up: p.w_up,
        w_down: p.w_down,
        w_obs: p.w_obs,
    }
}

pub fn dfield_map(surface: &Surface, dfield: &DistanceField) -> HashMap<Voxel, u32> {
    (0..surface.len() as u32).map(|o| (surface.state(o), dfield.get(o))).collect()
}

pub fn state_set(surface: &Surface) -> HashSet<Voxel> {
    surface.states().iter().copied().collect()
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}
