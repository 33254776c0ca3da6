//! Weighted A* over the extracted surface.
//!
//! Edge cost from `s` to a Z-connected neighbor `s'`:
//!
//! ```text
//! c(s, s') = r·‖s' − s‖₂ + |Δz|·r·ω_z + ω_obs·r / (D(s') + 1)
//! ```
//!
//! with `ω_z = ω↑` when climbing, `ω↓` when descending and 0 on flat moves.
//! The heuristic `h(s) = r·‖s − goal‖₂ + r·|z_goal − z_s|·ω↓` is consistent
//! whenever `ω↑ ≥ ω↓`, so a closed set without re-expansion is safe.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::dfield::DistanceField;
use crate::error::{Endpoint, Error, Result};
use crate::extract::Surface;
use crate::grid::Voxel;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanParams {
    /// Heuristic inflation, `>= 1`.
    pub epsilon: f64,
    /// Ascent penalty.
    pub w_up: f64,
    /// Descent penalty.
    pub w_down: f64,
    /// Obstacle bias.
    pub w_obs: f64,
}

impl Default for PlanParams {
    fn default() -> Self {
        PlanParams {
            epsilon: 1.0,
            w_up: 2.0,
            w_down: 1.0,
            w_obs: 0.5,
        }
    }
}

impl PlanParams {
    pub fn validate(&self) -> Result<()> {
        let all_finite = [self.epsilon, self.w_up, self.w_down, self.w_obs]
            .iter()
            .all(|v| v.is_finite());
        if !all_finite {
            return Err(Error::InvalidParams("plan weights must be finite".into()));
        }
        if self.epsilon < 1.0 {
            return Err(Error::InvalidParams(format!("epsilon must be >= 1, got {}", self.epsilon)));
        }
        if self.w_down < 0.0 || self.w_up < self.w_down {
            return Err(Error::InvalidParams(format!(
                "need w_up >= w_down >= 0, got w_up = {} and w_down = {}",
                self.w_up, self.w_down
            )));
        }
        if self.w_obs < 0.0 {
            return Err(Error::InvalidParams(format!("w_obs must be >= 0, got {}", self.w_obs)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathResult {
    /// Surface ordinals from start to goal.
    #[serde(skip)]
    pub ordinals: Vec<u32>,
    pub states: Vec<Voxel>,
    pub cost: f64,
    /// Σ r·‖Δ‖₂ over consecutive states, meters.
    #[serde(rename = "L")]
    pub metric_length: f64,
    /// Same, horizontal components only.
    #[serde(rename = "L_xy")]
    pub xy_length: f64,
    #[serde(rename = "N_s")]
    pub expanded: usize,
    /// Seconds.
    #[serde(rename = "T_s")]
    pub search_time: f64,
}

/// Z-connected neighbors of `s` with their height change.
pub fn successors(surface: &Surface, ordinal: u32) -> Vec<(u32, i32)> {
    let z = surface.state(ordinal).z;
    surface
        .neighbors(ordinal)
        .map(|o| (o, surface.state(o).z - z))
        .collect()
}

#[inline]
fn displacement_norm(dx: i32, dy: i32, dz: i32) -> f64 {
    ((dx * dx + dy * dy + dz * dz) as f64).sqrt()
}

pub fn edge_cost(from: Voxel, to: Voxel, d_next: u32, resolution: f64, p: &PlanParams) -> f64 {
    let (dx, dy, dz) = (to.x - from.x, to.y - from.y, to.z - from.z);
    let w_z = match dz.cmp(&0) {
        Ordering::Greater => p.w_up,
        Ordering::Less => p.w_down,
        Ordering::Equal => 0.0,
    };
    resolution * displacement_norm(dx, dy, dz)
        + dz.abs() as f64 * resolution * w_z
        + p.w_obs * resolution / (d_next as f64 + 1.0)
}

pub fn heuristic(s: Voxel, goal: Voxel, resolution: f64, p: &PlanParams) -> f64 {
    let (dx, dy, dz) = (goal.x - s.x, goal.y - s.y, goal.z - s.z);
    resolution * displacement_norm(dx, dy, dz) + resolution * dz.abs() as f64 * p.w_down
}

#[derive(Debug, Clone, Copy)]
struct OpenEntry {
    f: f64,
    g: f64,
    voxel: Voxel,
    seq: u64,
    ordinal: u32,
}

impl PartialEq for OpenEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for OpenEntry {}

impl PartialOrd for OpenEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OpenEntry {
    // BinaryHeap is a max-heap: "greater" pops first. Lowest f, then highest
    // g, then smallest voxel, then earliest insertion.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .f
            .total_cmp(&self.f)
            .then_with(|| self.g.total_cmp(&other.g))
            .then_with(|| other.voxel.cmp(&self.voxel))
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

const NO_PARENT: u32 = u32::MAX;

/// Weighted A* from `start` to `goal` (both surface voxels).
pub fn plan(
    surface: &Surface,
    dfield: &DistanceField,
    start: Voxel,
    goal: Voxel,
    p: &PlanParams,
) -> Result<PathResult> {
    p.validate()?;
    let t0 = Instant::now();
    let start_o = surface.index_of(start).ok_or(Error::NotOnSurface {
        which: Endpoint::Start,
        voxel: start,
    })?;
    let goal_o = surface.index_of(goal).ok_or(Error::NotOnSurface {
        which: Endpoint::Goal,
        voxel: goal,
    })?;
    let r = surface.resolution();
    let n = surface.len();
    let mut g = vec![f64::INFINITY; n];
    let mut parent = vec![NO_PARENT; n];
    let mut closed = vec![false; n];
    let mut open = BinaryHeap::new();
    let mut seq = 0u64;
    let mut expanded = 0usize;

    g[start_o as usize] = 0.0;
    open.push(OpenEntry {
        f: p.epsilon * heuristic(start, goal, r, p),
        g: 0.0,
        voxel: start,
        seq,
        ordinal: start_o,
    });

    let mut reached = false;
    while let Some(e) = open.pop() {
        let o = e.ordinal as usize;
        if closed[o] || e.g > g[o] {
            continue;
        }
        if e.ordinal == goal_o {
            reached = true;
            break;
        }
        closed[o] = true;
        expanded += 1;
        let s = e.voxel;
        for n_o in surface.neighbors(e.ordinal) {
            let ni = n_o as usize;
            if closed[ni] {
                continue;
            }
            let nv = surface.state(n_o);
            let tentative = e.g + edge_cost(s, nv, dfield.get(n_o), r, p);
            if tentative < g[ni] {
                g[ni] = tentative;
                parent[ni] = e.ordinal;
                seq += 1;
                open.push(OpenEntry {
                    f: tentative + p.epsilon * heuristic(nv, goal, r, p),
                    g: tentative,
                    voxel: nv,
                    seq,
                    ordinal: n_o,
                });
            }
        }
    }
    if !reached {
        // Only possible when start and goal lie in different seed components.
        return Err(Error::Unreachable { start, goal });
    }

    let mut ordinals = vec![goal_o];
    let mut cur = goal_o;
    while cur != start_o {
        cur = parent[cur as usize];
        ordinals.push(cur);
    }
    ordinals.reverse();
    let states: Vec<Voxel> = ordinals.iter().map(|&o| surface.state(o)).collect();
    let (mut metric_length, mut xy_length) = (0.0, 0.0);
    for w in states.windows(2) {
        let (dx, dy, dz) = (w[1].x - w[0].x, w[1].y - w[0].y, w[1].z - w[0].z);
        metric_length += r * displacement_norm(dx, dy, dz);
        xy_length += r * displacement_norm(dx, dy, 0);
    }
    Ok(PathResult {
        ordinals,
        states,
        cost: g[goal_o as usize],
        metric_length,
        xy_length,
        expanded,
        search_time: t0.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dfield::distance_field;
    use crate::extract::{extract_surface, CandidateSet, DerivedVoxelParams};
    use crate::grid::{Dims, GridGeometry};

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * b.abs().max(1.0)
    }

    #[test]
    fn edge_cost_examples() {
        let p = PlanParams::default();
        let a = Voxel::new(0, 0, 1);
        assert!(close(edge_cost(a, Voxel::new(1, 0, 1), 3, 0.2, &p), 0.225));
        let up = edge_cost(a, Voxel::new(1, 0, 2), 9, 0.2, &p);
        assert!(close(up, 0.2 * 2f64.sqrt() + 0.4 + 0.01));
        assert!((up - 0.692842).abs() < 1e-6);
        let flat = PlanParams { w_obs: 0.0, ..p };
        assert_eq!(edge_cost(a, Voxel::new(0, 1, 1), 0, 0.2, &flat), 0.2);
        let down = edge_cost(a, Voxel::new(1, 0, 0), 0, 0.2, &flat);
        assert!(close(down, 0.2 * 2f64.sqrt() + 0.2));
    }

    #[test]
    fn heuristic_examples() {
        let p = PlanParams::default();
        let o = Voxel::new(0, 0, 0);
        assert_eq!(heuristic(o, o, 0.2, &p), 0.0);
        assert!(close(heuristic(o, Voxel::new(3, 4, 0), 0.2, &p), 1.0));
        assert!(close(heuristic(o, Voxel::new(0, 0, 2), 0.2, &p), 0.8));
    }

    #[test]
    fn params_validation() {
        assert!(PlanParams::default().validate().is_ok());
        assert!(PlanParams { epsilon: 0.5, ..Default::default() }.validate().is_err());
        assert!(PlanParams { w_up: 0.5, ..Default::default() }.validate().is_err());
        assert!(PlanParams { w_obs: -1.0, ..Default::default() }.validate().is_err());
        assert!(PlanParams { w_down: f64::NAN, ..Default::default() }.validate().is_err());
    }

    fn floor(n: i32) -> (Surface, DistanceField) {
        let geo = GridGeometry {
            dims: Dims::new(n as usize, n as usize, 4),
            resolution: 0.2,
            origin: [0.0; 3],
        };
        let vox = (0..n).flat_map(|y| (0..n).map(move |x| Voxel::new(x, y, 1)));
        let c = CandidateSet::from_voxels(geo, vox);
        let s = extract_surface(&c, &[Voxel::new(0, 0, 1)], &DerivedVoxelParams::new(1, 2, 0).unwrap()).unwrap();
        let d = distance_field(&s);
        (s, d)
    }

    #[test]
    fn separate_seed_components_are_unreachable() {
        let geo = GridGeometry {
            dims: Dims::new(6, 1, 4),
            resolution: 0.2,
            origin: [0.0; 3],
        };
        let vox = [0, 1, 4, 5].map(|x| Voxel::new(x, 0, 1));
        let c = CandidateSet::from_voxels(geo, vox);
        let (a, b) = (Voxel::new(0, 0, 1), Voxel::new(5, 0, 1));
        let s = extract_surface(&c, &[a, b], &DerivedVoxelParams::new(1, 2, 0).unwrap()).unwrap();
        let d = distance_field(&s);
        assert!(matches!(plan(&s, &d, a, b, &PlanParams::default()), Err(Error::Unreachable { .. })));
    }

    #[test]
    fn trivial_query() {
        let (s, d) = floor(4);
        let v = Voxel::new(2, 2, 1);
        let res = plan(&s, &d, v, v, &PlanParams::default()).unwrap();
        assert_eq!(res.states, vec![v]);
        assert_eq!(res.cost, 0.0);
        assert_eq!(res.metric_length, 0.0);
    }

    #[test]
    fn corner_to_corner_manhattan() {
        let (s, d) = floor(10);
        let p = PlanParams { w_obs: 0.0, ..Default::default() };
        let res = plan(&s, &d, Voxel::new(0, 0, 1), Voxel::new(9, 9, 1), &p).unwrap();
        assert!(close(res.cost, 18.0 * 0.2));
        assert_eq!(res.states.len(), 19);
        assert!(close(res.metric_length, 3.6));
    }

    #[test]
    fn off_surface_endpoints() {
        let (s, d) = floor(4);
        let p = PlanParams::default();
        let bad = Voxel::new(1, 1, 3);
        assert!(matches!(
            plan(&s, &d, bad, Voxel::new(0, 0, 1), &p),
            Err(Error::NotOnSurface { which: Endpoint::Start, .. })
        ));
        assert!(matches!(
            plan(&s, &d, Voxel::new(0, 0, 1), bad, &p),
            Err(Error::NotOnSurface { which: Endpoint::Goal, .. })
        ));
    }

    #[test]
    fn interior_successors() {
        let (s, _) = floor(5);
        let o = s.index_of(Voxel::new(2, 2, 1)).unwrap();
        let succ = successors(&s, o);
        let got: Vec<Voxel> = succ.iter().map(|&(n, _)| s.state(n)).collect();
        assert_eq!(
            got,
            vec![Voxel::new(3, 2, 1), Voxel::new(1, 2, 1), Voxel::new(2, 3, 1), Voxel::new(2, 1, 1)]
        );
        assert!(succ.iter().all(|&(_, dz)| dz == 0));
    }
}
