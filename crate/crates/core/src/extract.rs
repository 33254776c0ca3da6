//! Candidate filtering and seed-reachable surface extraction.
//!
//! A voxel is a *candidate* when it is free, rests on an in-bounds occupied
//! voxel, and has `K` free voxels above it. The traversable surface is the
//! set of candidates reachable from the seed(s) by cardinal XY moves that
//! change height by at most `k` voxels.

use std::collections::VecDeque;
use std::io::{BufRead, Write};

use bitvec::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Dims, GridGeometry, OccupancyGrid, Voxel};

/// Cardinal XY directions in expansion order: +x, -x, +y, -y.
pub const CARDINALS: [(i32, i32); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];

// Physical thresholds are divided by the resolution and then rounded; a
// tolerance keeps 0.3 / 0.1 at 3 and 1.6 / 0.2 at 8.
const ROUNDING_EPS: f64 = 1e-9;

/// Physical robot thresholds, meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtractionParams {
    /// Largest climbable step.
    pub t_conn: f64,
    /// Robot height.
    pub h_clear: f64,
    /// Collision radius in the XY plane.
    pub r_inf: f64,
}

impl Default for ExtractionParams {
    fn default() -> Self {
        ExtractionParams {
            t_conn: 0.3,
            h_clear: 1.6,
            r_inf: 0.3,
        }
    }
}

impl ExtractionParams {
    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v >= 0.0;
        if !ok(self.t_conn) || !ok(self.r_inf) {
            return Err(Error::InvalidParams(format!(
                "t_conn and r_inf must be finite and >= 0, got {} and {}",
                self.t_conn, self.r_inf
            )));
        }
        if !(self.h_clear.is_finite() && self.h_clear > 0.0) {
            return Err(Error::InvalidParams(format!("h_clear must be > 0, got {}", self.h_clear)));
        }
        if self.t_conn >= self.h_clear {
            return Err(Error::InvalidParams(format!(
                "t_conn ({}) must be below h_clear ({})",
                self.t_conn, self.h_clear
            )));
        }
        Ok(())
    }

    /// Voxel-space thresholds at resolution `r`.
    pub fn to_voxels(&self, resolution: f64) -> Result<DerivedVoxelParams> {
        self.validate()?;
        if !(resolution.is_finite() && resolution > 0.0) {
            return Err(Error::InvalidParams(format!("resolution must be > 0, got {resolution}")));
        }
        let floor = |v: f64| (v / resolution + ROUNDING_EPS).floor() as u32;
        let ceil = |v: f64| (v / resolution - ROUNDING_EPS).ceil().max(0.0) as u32;
        DerivedVoxelParams::new(floor(self.t_conn), ceil(self.h_clear), ceil(self.r_inf))
    }
}

/// Thresholds in voxels: `step = ⌊t_conn/r⌋`, `clearance = ⌈h_clear/r⌉`,
/// `radius = ⌈r_inf/r⌉`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DerivedVoxelParams {
    pub step: u32,
    pub clearance: u32,
    pub radius: u32,
}

impl DerivedVoxelParams {
    pub fn new(step: u32, clearance: u32, radius: u32) -> Result<Self> {
        if clearance == 0 {
            return Err(Error::InvalidParams("clearance must be at least one voxel".into()));
        }
        if step >= clearance {
            return Err(Error::InvalidParams(format!(
                "step height ({step} voxels) must be below clearance ({clearance} voxels)"
            )));
        }
        Ok(DerivedVoxelParams {
            step,
            clearance,
            radius,
        })
    }

    pub fn step_i32(&self) -> i32 {
        self.step as i32
    }

    pub fn clearance_i32(&self) -> i32 {
        self.clearance as i32
    }

    /// Vertical offsets, relative to a standing voxel, that the robot body
    /// occupies in neighboring columns: everything above a climbable step and
    /// below the head.
    pub fn body_span(&self) -> (i32, i32) {
        (self.step_i32() + 1, self.clearance_i32())
    }

    /// XY offsets within the collision radius, excluding the own column.
    pub fn body_disk(&self) -> Vec<(i32, i32)> {
        let r = self.radius as i32;
        let mut out = Vec::new();
        for dy in -r..=r {
            for dx in -r..=r {
                if (dx, dy) != (0, 0) && dx * dx + dy * dy <= r * r {
                    out.push((dx, dy));
                }
            }
        }
        out
    }
}

/// A subset of grid voxels, stored as a bitset over the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSet {
    geometry: GridGeometry,
    bits: BitVec<u64, Lsb0>,
}

impl CandidateSet {
    pub fn empty(geometry: GridGeometry) -> Self {
        let n = geometry.dims.volume();
        CandidateSet {
            geometry,
            bits: bitvec![u64, Lsb0; 0; n],
        }
    }

    pub fn from_voxels(geometry: GridGeometry, voxels: impl IntoIterator<Item = Voxel>) -> Self {
        let mut set = Self::empty(geometry);
        for v in voxels {
            set.insert(v);
        }
        set
    }

    pub fn geometry(&self) -> &GridGeometry {
        &self.geometry
    }

    pub fn dims(&self) -> Dims {
        self.geometry.dims
    }

    #[inline]
    pub fn contains(&self, v: Voxel) -> bool {
        self.geometry.dims.index(v).is_some_and(|i| self.bits[i])
    }

    pub fn insert(&mut self, v: Voxel) -> bool {
        match self.geometry.dims.index(v) {
            Some(i) => {
                let was = self.bits.replace(i, true);
                !was
            }
            None => false,
        }
    }

    pub fn remove(&mut self, v: Voxel) -> bool {
        match self.geometry.dims.index(v) {
            Some(i) => self.bits.replace(i, false),
            None => false,
        }
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.not_any()
    }

    /// Members in linear-index order (x fastest).
    pub fn iter(&self) -> impl Iterator<Item = Voxel> + '_ {
        self.bits.iter_ones().map(|i| self.geometry.dims.voxel(i))
    }
}

/// Voxels satisfying ground support and overhead clearance.
///
/// Support must be an in-bounds occupied voxel; the clearance column treats
/// everything above the grid as occupied.
pub fn candidate_set(grid: &OccupancyGrid, dv: &DerivedVoxelParams) -> CandidateSet {
    let dims = grid.dims();
    let layer = dims.nx * dims.ny;
    let clearance = dv.clearance;
    let mut out = CandidateSet::empty(*grid.geometry());
    // Free run length directly above the current layer, per column.
    let mut free_above = vec![0u32; layer];
    for z in (0..dims.nz).rev() {
        let base = z * layer;
        for (col, run) in free_above.iter_mut().enumerate() {
            let idx = base + col;
            let free = !grid.get_index(idx);
            if free && z >= 1 && *run >= clearance && grid.get_index(idx - layer) {
                out.bits.set(idx, true);
            }
            *run = if free { *run + 1 } else { 0 };
        }
    }
    out
}

/// Marks voxels whose column has an occupied voxel in `[z + lo, z + hi]`.
fn blocked_spans(grid: &OccupancyGrid, lo: i32, hi: i32) -> BitVec<u64, Lsb0> {
    let dims = grid.dims();
    let layer = dims.nx * dims.ny;
    let nz = dims.nz as i32;
    let mut out = bitvec![u64, Lsb0; 0; dims.volume()];
    let mut next_occ = vec![0i32; dims.nz];
    for col in 0..layer {
        // next_occ[z] = lowest occupied z' >= z in this column, nz if none.
        let mut next = nz;
        for z in (0..dims.nz).rev() {
            if grid.get_index(col + z * layer) {
                next = z as i32;
            }
            next_occ[z] = next;
        }
        for z in 0..nz {
            let start = z + lo;
            let end = z + hi;
            let hit = if end >= nz {
                // The span reaches above the grid.
                true
            } else if start >= nz {
                false
            } else {
                next_occ[start.max(0) as usize] <= end
            };
            if hit {
                out.set(col + z as usize * layer, true);
            }
        }
    }
    out
}

/// Removes candidates whose robot body would intersect an occupied voxel.
///
/// The body is every column within `radius` voxels (XY Euclidean, own column
/// excluded) over the vertical span [`DerivedVoxelParams::body_span`].
/// Columns outside the grid count as occupied.
pub fn collision_filter(
    candidates: &CandidateSet,
    grid: &OccupancyGrid,
    dv: &DerivedVoxelParams,
) -> CandidateSet {
    let disk = dv.body_disk();
    if disk.is_empty() {
        return candidates.clone();
    }
    let (lo, hi) = dv.body_span();
    let blocked = blocked_spans(grid, lo, hi);
    let dims = grid.dims();
    let mut out = candidates.clone();
    for v in candidates.iter() {
        let hit = disk.iter().any(|&(dx, dy)| match dims.index(v.offset(dx, dy, 0)) {
            Some(i) => blocked[i],
            None => true,
        });
        if hit {
            out.remove(v);
        }
    }
    out
}

/// Nearest candidate to a world pose; ties go to the lexicographically
/// smallest voxel.
pub fn select_seed(
    pose: [f64; 3],
    candidates: &CandidateSet,
    max_snap: f64,
) -> Result<Voxel> {
    nearest_voxel(pose, candidates.iter(), candidates.geometry(), max_snap)
}

pub(crate) fn nearest_voxel(
    pose: [f64; 3],
    voxels: impl Iterator<Item = Voxel>,
    geometry: &GridGeometry,
    max_snap: f64,
) -> Result<Voxel> {
    if pose.iter().any(|c| !c.is_finite()) {
        return Err(Error::InvalidPoint(format!("{pose:?}")));
    }
    let mut best: Option<(f64, Voxel)> = None;
    for v in voxels {
        let c = geometry.voxel_to_world(v);
        let d2 = (0..3).map(|i| (c[i] - pose[i]).powi(2)).sum::<f64>();
        let better = match best {
            None => true,
            Some((bd, bv)) => d2 < bd || (d2 == bd && v < bv),
        };
        if better {
            best = Some((d2, v));
        }
    }
    let (d2, v) = best.ok_or(Error::NoCandidates)?;
    let distance = d2.sqrt();
    if distance > max_snap {
        return Err(Error::SeedSnapFailed {
            which: None,
            distance,
            max_snap,
        });
    }
    Ok(v)
}

/// The extracted state space: reachable candidates with stable ordinals and a
/// per-column height index.
#[derive(Debug, Clone, PartialEq)]
pub struct Surface {
    geometry: GridGeometry,
    params: DerivedVoxelParams,
    states: Vec<Voxel>,
    seeds: Vec<Voxel>,
    /// Offsets into `column_states`, one slot per (x, y) column plus a sentinel.
    column_start: Vec<u32>,
    /// State ordinals grouped by column, ascending z within a column.
    column_states: Vec<u32>,
}

impl Surface {
    /// Builds the column index over `states`. Ordinals follow `states` order.
    pub fn from_states(
        geometry: GridGeometry,
        params: DerivedVoxelParams,
        states: Vec<Voxel>,
        seeds: Vec<Voxel>,
    ) -> Result<Self> {
        let dims = geometry.dims;
        let columns = dims.nx * dims.ny;
        if states.len() > u32::MAX as usize {
            return Err(Error::InvalidParams("too many states".into()));
        }
        let mut counts = vec![0u32; columns + 1];
        for v in &states {
            if !dims.contains(*v) {
                return Err(Error::InvalidParams(format!("state {v:?} outside grid")));
            }
            counts[v.x as usize + dims.nx * v.y as usize + 1] += 1;
        }
        for i in 1..counts.len() {
            counts[i] += counts[i - 1];
        }
        let column_start = counts.clone();
        let mut fill = counts;
        let mut column_states = vec![0u32; states.len()];
        for (ord, v) in states.iter().enumerate() {
            let c = v.x as usize + dims.nx * v.y as usize;
            column_states[fill[c] as usize] = ord as u32;
            fill[c] += 1;
        }
        for c in 0..columns {
            let slice = &mut column_states[column_start[c] as usize..column_start[c + 1] as usize];
            slice.sort_unstable_by_key(|&o| states[o as usize].z);
            if slice.windows(2).any(|w| states[w[0] as usize].z == states[w[1] as usize].z) {
                return Err(Error::InvalidParams("duplicate surface state".into()));
            }
        }
        for s in &seeds {
            let in_column = dims.contains(*s) && {
                let c = s.x as usize + dims.nx * s.y as usize;
                column_states[column_start[c] as usize..column_start[c + 1] as usize]
                    .iter()
                    .any(|&o| states[o as usize] == *s)
            };
            if !in_column {
                return Err(Error::InvalidSeed(Some(*s)));
            }
        }
        Ok(Surface {
            geometry,
            params,
            states,
            seeds,
            column_start,
            column_states,
        })
    }

    pub fn geometry(&self) -> &GridGeometry {
        &self.geometry
    }

    pub fn params(&self) -> &DerivedVoxelParams {
        &self.params
    }

    pub fn resolution(&self) -> f64 {
        self.geometry.resolution
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[Voxel] {
        &self.states
    }

    #[inline]
    pub fn state(&self, ordinal: u32) -> Voxel {
        self.states[ordinal as usize]
    }

    /// Canonical seed.
    pub fn seed(&self) -> Voxel {
        self.seeds[0]
    }

    pub fn seeds(&self) -> &[Voxel] {
        &self.seeds
    }

    /// State ordinals in column `(x, y)`, ascending z. Empty outside the grid.
    #[inline]
    pub fn column(&self, x: i32, y: i32) -> &[u32] {
        let dims = self.geometry.dims;
        if x < 0 || y < 0 || x as usize >= dims.nx || y as usize >= dims.ny {
            return &[];
        }
        let c = x as usize + dims.nx * y as usize;
        &self.column_states[self.column_start[c] as usize..self.column_start[c + 1] as usize]
    }

    pub fn index_of(&self, v: Voxel) -> Option<u32> {
        let col = self.column(v.x, v.y);
        col.binary_search_by_key(&v.z, |&o| self.states[o as usize].z)
            .ok()
            .map(|i| col[i])
    }

    pub fn contains(&self, v: Voxel) -> bool {
        self.index_of(v).is_some()
    }

    /// Heights of all states at column `(x, y)`, strictly increasing.
    pub fn levels_at(&self, x: i32, y: i32) -> Vec<i32> {
        self.column(x, y).iter().map(|&o| self.states[o as usize].z).collect()
    }

    /// Z-connected neighbors of `ordinal`: directions +x, -x, +y, -y, each
    /// column in ascending z.
    pub fn neighbors(&self, ordinal: u32) -> impl Iterator<Item = u32> + '_ {
        let s = self.state(ordinal);
        let k = self.params.step_i32();
        CARDINALS.iter().flat_map(move |&(dx, dy)| {
            self.column(s.x + dx, s.y + dy)
                .iter()
                .copied()
                .filter(move |&o| (self.states[o as usize].z - s.z).abs() <= k)
        })
    }

    pub fn world_position(&self, ordinal: u32) -> [f64; 3] {
        self.geometry.voxel_to_world(self.state(ordinal))
    }

    /// Nearest state to a world pose within `max_snap` meters.
    pub fn snap(&self, pose: [f64; 3], max_snap: f64) -> Result<u32> {
        let v = nearest_voxel(pose, self.states.iter().copied(), &self.geometry, max_snap)?;
        Ok(self.index_of(v).expect("snapped voxel is a state"))
    }

    /// Plain-text export: `#` header lines, then one state per line as
    /// `wx wy wz vx vy vz [d]` with world-frame voxel centers first.
    pub fn write_to<W: Write>(&self, mut w: W, distances: Option<&[u32]>) -> Result<()> {
        let g = &self.geometry;
        writeln!(w, "# surfnav surface v1")?;
        writeln!(w, "# dims {} {} {}", g.dims.nx, g.dims.ny, g.dims.nz)?;
        writeln!(w, "# resolution {:?}", g.resolution)?;
        writeln!(w, "# origin {:?} {:?} {:?}", g.origin[0], g.origin[1], g.origin[2])?;
        writeln!(
            w,
            "# voxel_params {} {} {}",
            self.params.step, self.params.clearance, self.params.radius
        )?;
        write!(w, "# seeds")?;
        for s in &self.seeds {
            write!(w, " {} {} {}", s.x, s.y, s.z)?;
        }
        writeln!(w)?;
        writeln!(w, "# states {}", self.states.len())?;
        for (i, v) in self.states.iter().enumerate() {
            let c = g.voxel_to_world(*v);
            write!(w, "{:.6} {:.6} {:.6} {} {} {}", c[0], c[1], c[2], v.x, v.y, v.z)?;
            if let Some(d) = distances {
                write!(w, " {}", d[i])?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn read_from<R: BufRead>(r: R) -> Result<Self> {
        let mut dims = None;
        let mut resolution = None;
        let mut origin = None;
        let mut params = None;
        let mut seeds = Vec::new();
        let mut states = Vec::new();
        let perr = |line: usize, reason: String| Error::Parse { line, reason };
        for (i, line) in r.lines().enumerate() {
            let line = line?;
            let n = i + 1;
            let t = line.trim();
            if t.is_empty() {
                continue;
            }
            if let Some(rest) = t.strip_prefix('#') {
                let mut it = rest.split_whitespace();
                let key = it.next().unwrap_or("");
                let vals: Vec<&str> = it.collect();
                let nums = |count: usize| -> Result<Vec<f64>> {
                    if vals.len() != count {
                        return Err(perr(n, format!("{key}: expected {count} values")));
                    }
                    vals.iter()
                        .map(|s| s.parse::<f64>().map_err(|e| perr(n, format!("{key}: {e}"))))
                        .collect()
                };
                match key {
                    "dims" => {
                        let v = nums(3)?;
                        dims = Some(Dims::new(v[0] as usize, v[1] as usize, v[2] as usize));
                    }
                    "resolution" => resolution = Some(nums(1)?[0]),
                    "origin" => {
                        let v = nums(3)?;
                        origin = Some([v[0], v[1], v[2]]);
                    }
                    "voxel_params" => {
                        let v = nums(3)?;
                        params = Some(DerivedVoxelParams::new(v[0] as u32, v[1] as u32, v[2] as u32)?);
                    }
                    "seeds" => {
                        if vals.is_empty() || !vals.len().is_multiple_of(3) {
                            return Err(perr(n, "seeds: expected voxel triples".into()));
                        }
                        let v = nums(vals.len())?;
                        seeds = v
                            .chunks(3)
                            .map(|c| Voxel::new(c[0] as i32, c[1] as i32, c[2] as i32))
                            .collect();
                    }
                    _ => {}
                }
                continue;
            }
            let fields: Vec<&str> = t.split_whitespace().collect();
            if fields.len() != 6 && fields.len() != 7 {
                return Err(perr(n, format!("expected 6 or 7 fields, found {}", fields.len())));
            }
            let int = |s: &str| s.parse::<i32>().map_err(|e| perr(n, format!("{s:?}: {e}")));
            states.push(Voxel::new(int(fields[3])?, int(fields[4])?, int(fields[5])?));
        }
        let missing = |what: &str| perr(0, format!("missing header field {what}"));
        let geometry = GridGeometry {
            dims: dims.ok_or_else(|| missing("dims"))?,
            resolution: resolution.ok_or_else(|| missing("resolution"))?,
            origin: origin.ok_or_else(|| missing("origin"))?,
        };
        let params = params.ok_or_else(|| missing("voxel_params"))?;
        if seeds.is_empty() {
            return Err(missing("seeds"));
        }
        Surface::from_states(geometry, params, states, seeds)
    }
}

/// Breadth-first extraction of every candidate component containing a seed.
///
/// Neighbors are visited in direction order +x, -x, +y, -y and, within a
/// direction, at height offsets 0, +1, -1, ..., +k, -k. Ordinals are assigned
/// in discovery order. Seeds already reached from an earlier seed are dropped.
pub fn extract_surface(
    candidates: &CandidateSet,
    seeds: &[Voxel],
    dv: &DerivedVoxelParams,
) -> Result<Surface> {
    if seeds.is_empty() {
        return Err(Error::InvalidSeed(None));
    }
    for s in seeds {
        if !candidates.contains(*s) {
            return Err(Error::InvalidSeed(Some(*s)));
        }
    }
    let dims = candidates.dims();
    let k = dv.step_i32();
    let mut dz_order = vec![0];
    for d in 1..=k {
        dz_order.push(d);
        dz_order.push(-d);
    }
    let mut visited = bitvec![u64, Lsb0; 0; dims.volume()];
    let mut states = Vec::new();
    let mut kept_seeds = Vec::new();
    let mut queue = VecDeque::new();
    for &s in seeds {
        let i = dims.index(s).expect("seed is a candidate");
        if visited[i] {
            continue;
        }
        visited.set(i, true);
        kept_seeds.push(s);
        states.push(s);
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            for &(dx, dy) in &CARDINALS {
                for &dz in &dz_order {
                    let n = v.offset(dx, dy, dz);
                    let Some(ni) = dims.index(n) else { continue };
                    if candidates.bits[ni] && !visited[ni] {
                        visited.set(ni, true);
                        states.push(n);
                        queue.push_back(n);
                    }
                }
            }
        }
    }
    Surface::from_states(*candidates.geometry(), *dv, states, kept_seeds)
}

/// State-space size summary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReductionStats {
    #[serde(rename = "V")]
    pub total_voxels: usize,
    #[serde(rename = "S_size")]
    pub surface_size: usize,
    /// `1 - |S| / V`.
    pub reduction: f64,
    /// Extraction wall time, seconds.
    #[serde(rename = "T_ext")]
    pub t_ext: f64,
}

pub fn reduction_stats(grid: &OccupancyGrid, surface: &Surface, t_ext: f64) -> ReductionStats {
    reduction_from_counts(grid.len(), surface.len(), t_ext)
}

pub fn reduction_from_counts(total_voxels: usize, surface_size: usize, t_ext: f64) -> ReductionStats {
    let reduction = if total_voxels == 0 {
        1.0
    } else {
        1.0 - surface_size as f64 / total_voxels as f64
    };
    ReductionStats {
        total_voxels,
        surface_size,
        reduction,
        t_ext,
    }
}
