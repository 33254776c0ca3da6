//! Boundary distance over the surface graph.
//!
//! A state is on the boundary when at least one cardinal direction has no
//! Z-connected neighbor. `D(s)` is the number of Z-connected moves from `s`
//! to the nearest boundary state, computed by one multi-source BFS.

use std::collections::VecDeque;

use crate::extract::{Surface, CARDINALS};

/// Per-state boundary distance, indexed by surface ordinal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceField {
    d: Vec<u32>,
}

impl DistanceField {
    #[inline]
    pub fn get(&self, ordinal: u32) -> u32 {
        self.d[ordinal as usize]
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.d
    }

    pub fn len(&self) -> usize {
        self.d.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d.is_empty()
    }

    pub fn max(&self) -> u32 {
        self.d.iter().copied().max().unwrap_or(0)
    }
}

fn is_boundary(surface: &Surface, ordinal: u32) -> bool {
    let s = surface.state(ordinal);
    let k = surface.params().step_i32();
    CARDINALS.iter().any(|&(dx, dy)| {
        !surface
            .column(s.x + dx, s.y + dy)
            .iter()
            .any(|&o| (surface.state(o).z - s.z).abs() <= k)
    })
}

/// Ordinals of boundary states, ascending.
pub fn boundary_states(surface: &Surface) -> Vec<u32> {
    (0..surface.len() as u32).filter(|&o| is_boundary(surface, o)).collect()
}

pub fn distance_field(surface: &Surface) -> DistanceField {
    let mut d = vec![u32::MAX; surface.len()];
    let mut queue = VecDeque::new();
    for o in boundary_states(surface) {
        d[o as usize] = 0;
        queue.push_back(o);
    }
    while let Some(o) = queue.pop_front() {
        let next = d[o as usize] + 1;
        for n in surface.neighbors(o) {
            if d[n as usize] == u32::MAX {
                d[n as usize] = next;
                queue.push_back(n);
            }
        }
    }
    // Every finite component has a boundary state, so nothing stays unset.
    debug_assert!(d.iter().all(|&v| v != u32::MAX));
    DistanceField { d }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extract::{extract_surface, CandidateSet, DerivedVoxelParams};
    use crate::grid::{Dims, GridGeometry, Voxel};

    fn flat(w: i32, h: i32) -> Surface {
        let geo = GridGeometry {
            dims: Dims::new(w as usize + 2, h as usize + 2, 4),
            resolution: 0.2,
            origin: [0.0; 3],
        };
        let mut vox = Vec::new();
        for y in 1..=h {
            for x in 1..=w {
                vox.push(Voxel::new(x, y, 1));
            }
        }
        let c = CandidateSet::from_voxels(geo, vox);
        extract_surface(&c, &[Voxel::new(1, 1, 1)], &DerivedVoxelParams::new(1, 2, 0).unwrap()).unwrap()
    }

    #[test]
    fn single_state_is_boundary() {
        let s = flat(1, 1);
        assert_eq!(boundary_states(&s), vec![0]);
        assert_eq!(distance_field(&s).as_slice(), &[0]);
    }

    #[test]
    fn five_by_five_patch() {
        let s = flat(5, 5);
        assert_eq!(boundary_states(&s).len(), 16);
        let d = distance_field(&s);
        let center = s.index_of(Voxel::new(3, 3, 1)).unwrap();
        assert_eq!(d.get(center), 2);
        assert_eq!(d.max(), 2);
    }

    #[test]
    fn corridor_centerline() {
        let s = flat(20, 3);
        let d = distance_field(&s);
        assert!(d.as_slice().iter().all(|&v| v <= 1));
        for x in 2..=19 {
            assert_eq!(d.get(s.index_of(Voxel::new(x, 2, 1)).unwrap()), 1);
        }
    }

    #[test]
    fn large_floor_center_is_interior() {
        let s = flat(41, 41);
        let center = s.index_of(Voxel::new(21, 21, 1)).unwrap();
        assert!(!boundary_states(&s).contains(&center));
        assert_eq!(distance_field(&s).get(center), 20);
    }

    #[test]
    fn step_too_high_is_a_boundary() {
        // two flat rows at different heights: the step of 2 exceeds k = 1
        let geo = GridGeometry {
            dims: Dims::new(7, 5, 6),
            resolution: 0.2,
            origin: [0.0; 3],
        };
        let mut vox = Vec::new();
        for x in 0..7 {
            for y in 0..5 {
                vox.push(Voxel::new(x, y, if x < 4 { 1 } else { 3 }));
            }
        }
        let c = CandidateSet::from_voxels(geo, vox);
        let s = extract_surface(&c, &[Voxel::new(0, 0, 1)], &DerivedVoxelParams::new(1, 4, 0).unwrap()).unwrap();
        assert_eq!(s.len(), 20);
        let b = boundary_states(&s);
        assert!(b.contains(&s.index_of(Voxel::new(3, 2, 1)).unwrap()));
    }
}
