//! Brute-force reference implementations used to check extraction, the
//! distance field and the planner.
//!
//! Nothing here calls into `extract`, `dfield` or `plan`; adjacency, boundary
//! tests and edge costs are re-derived from hash sets of voxels. These are
//! deliberately slow and meant for surfaces of at most ~10⁴ states.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap, HashSet};

use crate::error::{Error, Result};
use crate::grid::Voxel;

const DIRS: [(i32, i32); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];

/// Weights for the reference cost model.
#[derive(Debug, Clone, Copy)]
pub struct CostWeights {
    pub resolution: f64,
    pub w_up: f64,
    pub w_down: f64,
    pub w_obs: f64,
}

/// Everything the oracles know about one scene.
#[derive(Debug, Clone, Default)]
pub struct OracleReport {
    pub reachable_set: HashSet<Voxel>,
    /// Optimal cost from the source state.
    pub distance_map: HashMap<Voxel, f64>,
    /// Boundary distance per state.
    pub d_field: HashMap<Voxel, u32>,
}

impl OracleReport {
    pub fn compute(
        candidates: &HashSet<Voxel>,
        seed: Voxel,
        step: i32,
        source: Voxel,
        weights: &CostWeights,
    ) -> Result<Self> {
        let reachable_set = flood_fill_reference(candidates, seed, step)?;
        let d_field = boundary_distance_reference(&reachable_set, step);
        let distance_map = dijkstra_reference(&reachable_set, &d_field, source, step, weights);
        Ok(OracleReport {
            reachable_set,
            distance_map,
            d_field,
        })
    }
}

fn z_connected(a: Voxel, b: Voxel, step: i32) -> bool {
    (a.x - b.x).abs() + (a.y - b.y).abs() == 1 && (a.z - b.z).abs() <= step
}

/// Grows `{seed}` by sweeping all candidates until nothing changes.
pub fn flood_fill_reference(
    candidates: &HashSet<Voxel>,
    seed: Voxel,
    step: i32,
) -> Result<HashSet<Voxel>> {
    if !candidates.contains(&seed) {
        return Err(Error::InvalidSeed(Some(seed)));
    }
    let mut reached = HashSet::from([seed]);
    loop {
        let mut grew = false;
        for &c in candidates {
            if reached.contains(&c) {
                continue;
            }
            let touches = DIRS.iter().any(|&(dx, dy)| {
                (-step..=step).any(|dz| reached.contains(&c.offset(dx, dy, dz)))
            });
            if touches {
                reached.insert(c);
                grew = true;
            }
        }
        if !grew {
            return Ok(reached);
        }
    }
}

fn neighbors_in(states: &HashSet<Voxel>, v: Voxel, step: i32) -> Vec<Voxel> {
    let mut out = Vec::new();
    for &(dx, dy) in &DIRS {
        for dz in -step..=step {
            let n = v.offset(dx, dy, dz);
            if states.contains(&n) {
                debug_assert!(z_connected(v, n, step));
                out.push(n);
            }
        }
    }
    out
}

fn is_boundary_reference(states: &HashSet<Voxel>, v: Voxel, step: i32) -> bool {
    DIRS.iter()
        .any(|&(dx, dy)| !(-step..=step).any(|dz| states.contains(&v.offset(dx, dy, dz))))
}

/// Boundary distance by a separate BFS from every state.
pub fn boundary_distance_reference(states: &HashSet<Voxel>, step: i32) -> HashMap<Voxel, u32> {
    let mut out = HashMap::with_capacity(states.len());
    for &s in states {
        let mut seen = HashSet::from([s]);
        let mut frontier = vec![s];
        let mut dist = 0u32;
        let found = loop {
            if frontier.iter().any(|&v| is_boundary_reference(states, v, step)) {
                break Some(dist);
            }
            let mut next = Vec::new();
            for &v in &frontier {
                for n in neighbors_in(states, v, step) {
                    if seen.insert(n) {
                        next.push(n);
                    }
                }
            }
            if next.is_empty() {
                break None;
            }
            frontier = next;
            dist += 1;
        };
        out.insert(s, found.unwrap_or(u32::MAX));
    }
    out
}

/// Reference edge cost, written out independently of the planner.
pub fn reference_edge_cost(a: Voxel, b: Voxel, d_b: u32, w: &CostWeights) -> f64 {
    let dz = b.z - a.z;
    let dx = b.x - a.x;
    let dy = b.y - a.y;
    let base = w.resolution * ((dx * dx + dy * dy + dz * dz) as f64).sqrt();
    let climb = if dz > 0 {
        dz as f64 * w.resolution * w.w_up
    } else if dz < 0 {
        (-dz) as f64 * w.resolution * w.w_down
    } else {
        0.0
    };
    base + climb + w.w_obs * w.resolution / (1.0 + d_b as f64)
}

#[derive(PartialEq)]
struct Item(f64, Voxel);

impl Eq for Item {}

impl PartialOrd for Item {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Item {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

fn dijkstra(
    states: &HashSet<Voxel>,
    source: Voxel,
    step: i32,
    mut relax: impl FnMut(Voxel, Voxel) -> f64,
) -> HashMap<Voxel, f64> {
    let mut dist: HashMap<Voxel, f64> = HashMap::new();
    if !states.contains(&source) {
        return dist;
    }
    let mut done = HashSet::new();
    let mut heap = BinaryHeap::from([Item(0.0, source)]);
    dist.insert(source, 0.0);
    while let Some(Item(d, v)) = heap.pop() {
        if !done.insert(v) {
            continue;
        }
        for n in neighbors_in(states, v, step) {
            let nd = d + relax(v, n);
            if dist.get(&n).is_none_or(|&cur| nd < cur) {
                dist.insert(n, nd);
                heap.push(Item(nd, n));
            }
        }
    }
    dist
}

/// Single-source optimal path cost from `start` to every reachable state.
pub fn dijkstra_reference(
    states: &HashSet<Voxel>,
    d_field: &HashMap<Voxel, u32>,
    start: Voxel,
    step: i32,
    w: &CostWeights,
) -> HashMap<Voxel, f64> {
    dijkstra(states, start, step, |a, b| reference_edge_cost(a, b, d_field[&b], w))
}

/// Optimal cost from every state *to* `goal`, by Dijkstra on reversed edges.
pub fn dijkstra_to_goal_reference(
    states: &HashSet<Voxel>,
    d_field: &HashMap<Voxel, u32>,
    goal: Voxel,
    step: i32,
    w: &CostWeights,
) -> HashMap<Voxel, f64> {
    // Relaxing goal-side v to n uses the forward edge n -> v.
    dijkstra(states, goal, step, |v, n| reference_edge_cost(n, v, d_field[&v], w))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn floor(n: i32) -> HashSet<Voxel> {
        (0..n).flat_map(|y| (0..n).map(move |x| Voxel::new(x, y, 1))).collect()
    }

    #[test]
    fn single_state() {
        let c = HashSet::from([Voxel::new(0, 0, 1)]);
        assert_eq!(flood_fill_reference(&c, Voxel::new(0, 0, 1), 1).unwrap(), c);
        assert!(flood_fill_reference(&c, Voxel::new(1, 0, 1), 1).is_err());
    }

    #[test]
    fn flat_only_on_stairs() {
        let mut c = floor(3);
        for x in 3..6 {
            c.insert(Voxel::new(x, 0, x - 1));
        }
        let r = flood_fill_reference(&c, Voxel::new(0, 0, 1), 0).unwrap();
        assert_eq!(r, floor(3));
        let r = flood_fill_reference(&c, Voxel::new(0, 0, 1), 1).unwrap();
        assert_eq!(r.len(), 12);
    }

    #[test]
    fn dijkstra_floor() {
        let s = floor(10);
        let d = boundary_distance_reference(&s, 1);
        let w = CostWeights { resolution: 0.2, w_up: 2.0, w_down: 1.0, w_obs: 0.0 };
        let dist = dijkstra_reference(&s, &d, Voxel::new(0, 0, 1), 1, &w);
        assert_eq!(dist[&Voxel::new(0, 0, 1)], 0.0);
        assert!((dist[&Voxel::new(9, 9, 1)] - 3.6).abs() < 1e-12);
        let back = dijkstra_to_goal_reference(&s, &d, Voxel::new(9, 9, 1), 1, &w);
        assert!((back[&Voxel::new(0, 0, 1)] - 3.6).abs() < 1e-12);
    }

    #[test]
    fn boundary_distances_on_patch() {
        let d = boundary_distance_reference(&floor(5), 1);
        assert_eq!(d[&Voxel::new(2, 2, 1)], 2);
        assert_eq!(d.values().filter(|&&v| v == 0).count(), 16);
    }
}
