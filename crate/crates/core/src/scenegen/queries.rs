use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extract::Surface;
use crate::grid::Voxel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QueryMode {
    /// `|Δz| <= k`.
    SameFloor,
    /// `|Δz| >= K`.
    CrossFloor,
    /// First half same-floor, second half cross-floor.
    Mixed,
}

impl fmt::Display for QueryMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            QueryMode::SameFloor => "same_floor",
            QueryMode::CrossFloor => "cross_floor",
            QueryMode::Mixed => "mixed",
        })
    }
}

impl FromStr for QueryMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "same_floor" | "same-floor" => Ok(QueryMode::SameFloor),
            "cross_floor" | "cross-floor" => Ok(QueryMode::CrossFloor),
            "mixed" => Ok(QueryMode::Mixed),
            _ => Err(Error::InvalidParams(format!("unknown query mode {s:?}"))),
        }
    }
}

struct ByHeight<'a> {
    surface: &'a Surface,
    /// Ordinals sorted by (z, ordinal).
    order: Vec<u32>,
}

impl<'a> ByHeight<'a> {
    fn new(surface: &'a Surface) -> Self {
        let mut order: Vec<u32> = (0..surface.len() as u32).collect();
        order.sort_by_key(|&o| (surface.state(o).z, o));
        ByHeight { surface, order }
    }

    fn z(&self, i: usize) -> i32 {
        self.surface.state(self.order[i]).z
    }

    /// Positions in `order` with z in `[lo, hi]`.
    fn range(&self, lo: i32, hi: i32) -> std::ops::Range<usize> {
        let a = self.order.partition_point(|&o| self.surface.state(o).z < lo);
        let b = self.order.partition_point(|&o| self.surface.state(o).z <= hi);
        a..b.max(a)
    }

    fn span(&self) -> i32 {
        self.z(self.order.len() - 1) - self.z(0)
    }
}

/// Draws `n` start/goal pairs uniformly from the surface.
///
/// The start is uniform over states that have at least one admissible
/// partner; the goal is uniform over that start's partners.
pub fn sample_queries(
    surface: &Surface,
    n: usize,
    mode: QueryMode,
    rng_seed: u64,
) -> Result<Vec<(Voxel, Voxel)>> {
    if n == 0 {
        return Ok(Vec::new());
    }
    if surface.is_empty() {
        return Err(Error::InvalidParams("cannot sample queries on an empty surface".into()));
    }
    let k = surface.params().step_i32();
    let big_k = surface.params().clearance_i32();
    let index = ByHeight::new(surface);
    let needs_cross = mode != QueryMode::SameFloor;
    if needs_cross && index.span() < big_k {
        return Err(Error::InsufficientFloors {
            span: index.span(),
            needed: big_k,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let (n_same, n_cross) = match mode {
        QueryMode::SameFloor => (n, 0),
        QueryMode::CrossFloor => (0, n),
        QueryMode::Mixed => (n - n / 2, n / 2),
    };
    let mut out = Vec::with_capacity(n);
    for _ in 0..n_same {
        let s = index.order[rng.random_range(0..index.order.len())];
        let z = surface.state(s).z;
        let partners = index.range(z - k, z + k);
        let mut g = index.order[rng.random_range(partners.clone())];
        if g == s && partners.len() > 1 {
            // redraw among the other partners
            let mut i = rng.random_range(partners.start..partners.end - 1);
            if index.order[i] == s {
                i = partners.end - 1;
            }
            g = index.order[i];
        }
        out.push((surface.state(s), surface.state(g)));
    }
    let (z_min, z_max) = (index.z(0), index.z(index.order.len() - 1));
    let low = index.range(z_min, z_max - big_k);
    let high = index.range(z_min + big_k, z_max);
    for _ in 0..n_cross {
        // Eligible starts are exactly low ∪ high.
        let s_pos = loop {
            let i = rng.random_range(0..index.order.len());
            if low.contains(&i) || high.contains(&i) {
                break i;
            }
        };
        let s = index.order[s_pos];
        let z = surface.state(s).z;
        let below = index.range(z_min, z - big_k);
        let above = index.range(z + big_k, z_max);
        let pick = rng.random_range(0..below.len() + above.len());
        let g_pos = if pick < below.len() {
            below.start + pick
        } else {
            above.start + pick - below.len()
        };
        out.push((surface.state(s), surface.state(index.order[g_pos])));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extract::{extract_surface, CandidateSet, DerivedVoxelParams};
    use crate::grid::{Dims, GridGeometry};

    fn ramp() -> Surface {
        // a 30-long ramp climbing one voxel per column
        let geo = GridGeometry {
            dims: Dims::new(30, 2, 40),
            resolution: 0.2,
            origin: [0.0; 3],
        };
        let vox = (0..30).flat_map(|x| (0..2).map(move |y| Voxel::new(x, y, x + 1)));
        let c = CandidateSet::from_voxels(geo, vox);
        extract_surface(&c, &[Voxel::new(0, 0, 1)], &DerivedVoxelParams::new(1, 8, 0).unwrap()).unwrap()
    }

    #[test]
    fn mixed_split_and_predicates() {
        let s = ramp();
        let q = sample_queries(&s, 50, QueryMode::Mixed, 3).unwrap();
        assert_eq!(q.len(), 50);
        assert!(q[..25].iter().all(|(a, b)| (a.z - b.z).abs() <= 1));
        assert!(q[25..].iter().all(|(a, b)| (a.z - b.z).abs() >= 8));
        assert!(q.iter().all(|(a, b)| s.contains(*a) && s.contains(*b)));
    }

    #[test]
    fn deterministic_and_empty() {
        let s = ramp();
        assert_eq!(
            sample_queries(&s, 20, QueryMode::Mixed, 9).unwrap(),
            sample_queries(&s, 20, QueryMode::Mixed, 9).unwrap()
        );
        assert!(sample_queries(&s, 0, QueryMode::CrossFloor, 1).unwrap().is_empty());
    }

    #[test]
    fn single_floor_rejects_cross() {
        let geo = GridGeometry {
            dims: Dims::new(5, 5, 4),
            resolution: 0.2,
            origin: [0.0; 3],
        };
        let vox = (0..5).flat_map(|x| (0..5).map(move |y| Voxel::new(x, y, 1)));
        let c = CandidateSet::from_voxels(geo, vox);
        let s = extract_surface(&c, &[Voxel::new(0, 0, 1)], &DerivedVoxelParams::new(1, 2, 0).unwrap()).unwrap();
        assert!(matches!(
            sample_queries(&s, 4, QueryMode::CrossFloor, 1),
            Err(Error::InsufficientFloors { .. })
        ));
        let q = sample_queries(&s, 10, QueryMode::SameFloor, 1).unwrap();
        assert!(q.iter().all(|(a, b)| a != b));
    }
}
