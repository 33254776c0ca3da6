//! Declarative synthetic scenes.
//!
//! A [`SceneSpec`] is an ordered list of primitives in world meters that is
//! rasterized into an [`OccupancyGrid`] plus a per-voxel [`Label`] map. A
//! voxel belongs to a box when its center lies in the half-open box, so any
//! coordinate that is a multiple of the resolution rasterizes exactly.

mod presets;
mod queries;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Dims, OccupancyGrid, Voxel};

pub use presets::{preset, PresetName};
pub use queries::{sample_queries, QueryMode};

const BOUNDS_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    PlusX,
    MinusX,
    PlusY,
    MinusY,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Primitive {
    /// Solid slab over `[min, max)` in XY from `z_top - thickness` to `z_top`.
    FloorSlab {
        min: [f64; 2],
        max: [f64; 2],
        z_top: f64,
        thickness: f64,
    },
    /// Vertical wall along a segment; columns whose center is within
    /// `thickness / 2` of the segment are filled.
    Wall {
        from: [f64; 2],
        to: [f64; 2],
        thickness: f64,
        z_base: f64,
        height: f64,
    },
    /// Solid steps; step `i` covers tread `i` and rises to `base_z + (i + 1) * riser`.
    Staircase {
        origin: [f64; 2],
        direction: Direction,
        tread_depth: f64,
        width: f64,
        riser: f64,
        steps: u32,
        base_z: f64,
    },
    /// Table top over the footprint with square legs centered at `legs`.
    Table {
        min: [f64; 2],
        max: [f64; 2],
        base_z: f64,
        top_z: f64,
        top_thickness: f64,
        legs: Vec<[f64; 2]>,
        leg_size: f64,
    },
    /// Solid box floating at `underside_z`; the gap below is too low to enter.
    LowCabinet {
        min: [f64; 2],
        max: [f64; 2],
        underside_z: f64,
        top_z: f64,
    },
    /// Sealed hollow box: free interior `[floor_z, ceiling_z)` with a shell
    /// of the given thickness on every side.
    CeilingCavity {
        min: [f64; 2],
        max: [f64; 2],
        floor_z: f64,
        ceiling_z: f64,
        shell: f64,
    },
    /// Clears `[z_bottom, z_top)` over the region. The solid voxel left
    /// directly below the cleared span is labeled as hole floor.
    Hole {
        min: [f64; 2],
        max: [f64; 2],
        z_bottom: f64,
        z_top: f64,
    },
    /// Generic solid box (planters, shelves).
    Block { min: [f64; 3], max: [f64; 3] },
    /// Vertical cylinder.
    Pillar {
        center: [f64; 2],
        radius: f64,
        z_base: f64,
        height: f64,
    },
    /// Helical stepped ramp around `center`. Step index along the helix is
    /// `⌊(turn + θ/2π)·steps_per_turn⌋`; each tread is a slab of `thickness`.
    SpiralRamp {
        center: [f64; 2],
        inner_radius: f64,
        outer_radius: f64,
        base_z: f64,
        riser: f64,
        steps_per_turn: u32,
        turns: u32,
        thickness: f64,
    },
}

/// What a voxel was rasterized from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
#[repr(u8)]
pub enum Label {
    #[default]
    Empty,
    Floor,
    Wall,
    Stair,
    TableTop,
    TableLeg,
    Cabinet,
    CavityShell,
    HoleFloor,
    Obstacle,
    Ramp,
    /// Free space under a table top.
    UnderTable,
    /// Free space under a low cabinet.
    UnderCabinet,
    /// Free, unsupported voxel beside a wall face.
    WallFace,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneSpec {
    pub name: String,
    /// World size in meters; the grid origin is (0, 0, 0).
    pub extent: [f64; 3],
    pub resolution: f64,
    pub primitives: Vec<Primitive>,
    #[serde(default)]
    pub rng_seed: u64,
    /// Robot pose used to pick the extraction seed.
    pub robot_pose: [f64; 3],
}

impl SceneSpec {
    /// Same extent, floors and walls, with all furniture removed.
    pub fn structural_only(&self) -> SceneSpec {
        SceneSpec {
            name: format!("{}_empty", self.name),
            primitives: self
                .primitives
                .iter()
                .filter(|p| matches!(p, Primitive::FloorSlab { .. } | Primitive::Wall { .. }))
                .cloned()
                .collect(),
            ..self.clone()
        }
    }

    pub fn dims(&self) -> Result<Dims> {
        if !(self.resolution.is_finite() && self.resolution > 0.0) {
            return Err(Error::InvalidParams(format!("resolution must be > 0, got {}", self.resolution)));
        }
        let n = |e: f64| -> Result<usize> {
            let v = (e / self.resolution).round();
            if !(e.is_finite() && v >= 1.0) {
                return Err(Error::InvalidParams(format!("extent {e} too small")));
            }
            Ok(v as usize)
        };
        Ok(Dims::new(n(self.extent[0])?, n(self.extent[1])?, n(self.extent[2])?))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabelMap {
    dims: Dims,
    labels: Vec<Label>,
}

impl LabelMap {
    pub fn get(&self, v: Voxel) -> Label {
        self.dims.index(v).map_or(Label::Empty, |i| self.labels[i])
    }

    pub fn voxels_with(&self, label: Label) -> impl Iterator<Item = Voxel> + '_ {
        self.labels
            .iter()
            .enumerate()
            .filter(move |(_, &l)| l == label)
            .map(|(i, _)| self.dims.voxel(i))
    }

    /// Label of the voxel a standing state rests on.
    pub fn support_of(&self, state: Voxel) -> Label {
        self.get(state.offset(0, 0, -1))
    }
}

#[derive(Debug, Clone)]
pub struct Scene {
    pub grid: OccupancyGrid,
    pub labels: LabelMap,
}

struct Raster<'a> {
    grid: &'a mut OccupancyGrid,
    labels: &'a mut [Label],
    r: f64,
    dims: Dims,
    extent: [f64; 3],
}

impl Raster<'_> {
    fn check(&self, what: &str, lo: [f64; 3], hi: [f64; 3]) -> Result<()> {
        for a in 0..3 {
            let ok = lo[a].is_finite()
                && hi[a].is_finite()
                && lo[a] >= -BOUNDS_EPS
                && hi[a] <= self.extent[a] + BOUNDS_EPS
                && lo[a] <= hi[a];
            if !ok {
                return Err(Error::SpecOutOfBounds(format!(
                    "{what} spans {lo:?}..{hi:?}, extent is {:?}",
                    self.extent
                )));
            }
        }
        Ok(())
    }

    /// Index range of voxel centers inside `[lo, hi)` along one axis.
    fn span(&self, lo: f64, hi: f64, n: usize) -> std::ops::Range<i32> {
        let a = ((lo / self.r) - 0.5).ceil().max(0.0) as i32;
        let b = ((hi / self.r) - 0.5).ceil().min(n as f64) as i32;
        a..b.max(a)
    }

    fn fill_box(&mut self, lo: [f64; 3], hi: [f64; 3], occupied: bool, label: Label) {
        let xs = self.span(lo[0], hi[0], self.dims.nx);
        let ys = self.span(lo[1], hi[1], self.dims.ny);
        let zs = self.span(lo[2], hi[2], self.dims.nz);
        for z in zs {
            for y in ys.clone() {
                for x in xs.clone() {
                    self.put(Voxel::new(x, y, z), occupied, label);
                }
            }
        }
    }

    fn put(&mut self, v: Voxel, occupied: bool, label: Label) {
        if let Some(i) = self.dims.index(v) {
            self.grid.set(v, occupied);
            self.labels[i] = label;
        }
    }

    fn center(&self, i: i32) -> f64 {
        (i as f64 + 0.5) * self.r
    }

    fn columns(&self) -> impl Iterator<Item = (i32, i32)> {
        let (nx, ny) = (self.dims.nx as i32, self.dims.ny as i32);
        (0..ny).flat_map(move |y| (0..nx).map(move |x| (x, y)))
    }

    fn fill_column(&mut self, x: i32, y: i32, z_lo: f64, z_hi: f64, label: Label) {
        for z in self.span(z_lo, z_hi, self.dims.nz) {
            self.put(Voxel::new(x, y, z), true, label);
        }
    }

    fn draw(&mut self, p: &Primitive) -> Result<()> {
        match *p {
            Primitive::FloorSlab { min, max, z_top, thickness } => {
                let lo = [min[0], min[1], z_top - thickness];
                let hi = [max[0], max[1], z_top];
                self.check("floor slab", lo, hi)?;
                self.fill_box(lo, hi, true, Label::Floor);
            }
            Primitive::Wall { from, to, thickness, z_base, height } => {
                let half = thickness / 2.0;
                self.check(
                    "wall",
                    [from[0].min(to[0]) - half, from[1].min(to[1]) - half, z_base],
                    [from[0].max(to[0]) + half, from[1].max(to[1]) + half, z_base + height],
                )?;
                let (sx, sy) = (to[0] - from[0], to[1] - from[1]);
                let len2 = sx * sx + sy * sy;
                let cols: Vec<(i32, i32)> = self
                    .columns()
                    .filter(|&(x, y)| {
                        let (px, py) = (self.center(x) - from[0], self.center(y) - from[1]);
                        let t = if len2 > 0.0 { ((px * sx + py * sy) / len2).clamp(0.0, 1.0) } else { 0.0 };
                        let (dx, dy) = (px - t * sx, py - t * sy);
                        dx * dx + dy * dy < half * half
                    })
                    .collect();
                for (x, y) in cols {
                    self.fill_column(x, y, z_base, z_base + height, Label::Wall);
                }
            }
            Primitive::Staircase { origin, direction, tread_depth, width, riser, steps, base_z } => {
                for i in 0..steps {
                    let a = i as f64 * tread_depth;
                    let b = a + tread_depth;
                    let (lo, hi) = match direction {
                        Direction::PlusX => ([origin[0] + a, origin[1]], [origin[0] + b, origin[1] + width]),
                        Direction::MinusX => ([origin[0] - b, origin[1]], [origin[0] - a, origin[1] + width]),
                        Direction::PlusY => ([origin[0], origin[1] + a], [origin[0] + width, origin[1] + b]),
                        Direction::MinusY => ([origin[0], origin[1] - b], [origin[0] + width, origin[1] - a]),
                    };
                    let top = base_z + (i + 1) as f64 * riser;
                    let lo3 = [lo[0], lo[1], base_z];
                    let hi3 = [hi[0], hi[1], top];
                    self.check("staircase", lo3, hi3)?;
                    self.fill_box(lo3, hi3, true, Label::Stair);
                }
            }
            Primitive::Table { min, max, base_z, top_z, top_thickness, ref legs, leg_size } => {
                let lo = [min[0], min[1], top_z - top_thickness];
                let hi = [max[0], max[1], top_z];
                self.check("table", [min[0], min[1], base_z], hi)?;
                self.fill_box(lo, hi, true, Label::TableTop);
                let h = leg_size / 2.0;
                for leg in legs {
                    let llo = [leg[0] - h, leg[1] - h, base_z];
                    let lhi = [leg[0] + h, leg[1] + h, top_z - top_thickness];
                    self.check("table leg", llo, lhi)?;
                    self.fill_box(llo, lhi, true, Label::TableLeg);
                }
            }
            Primitive::LowCabinet { min, max, underside_z, top_z } => {
                let lo = [min[0], min[1], underside_z];
                let hi = [max[0], max[1], top_z];
                self.check("low cabinet", lo, hi)?;
                self.fill_box(lo, hi, true, Label::Cabinet);
            }
            Primitive::CeilingCavity { min, max, floor_z, ceiling_z, shell } => {
                let lo = [min[0] - shell, min[1] - shell, floor_z - shell];
                let hi = [max[0] + shell, max[1] + shell, ceiling_z + shell];
                self.check("ceiling cavity", lo, hi)?;
                self.fill_box(lo, hi, true, Label::CavityShell);
                self.fill_box([min[0], min[1], floor_z], [max[0], max[1], ceiling_z], false, Label::Empty);
            }
            Primitive::Hole { min, max, z_bottom, z_top } => {
                let lo = [min[0], min[1], z_bottom];
                let hi = [max[0], max[1], z_top];
                self.check("hole", lo, hi)?;
                self.fill_box(lo, hi, false, Label::Empty);
                let below = self.span(z_bottom, z_top, self.dims.nz).start - 1;
                if below >= 0 {
                    for y in self.span(min[1], max[1], self.dims.ny) {
                        for x in self.span(min[0], max[0], self.dims.nx) {
                            let v = Voxel::new(x, y, below);
                            if self.grid.is_occupied_in_bounds(v) {
                                self.put(v, true, Label::HoleFloor);
                            }
                        }
                    }
                }
            }
            Primitive::Block { min, max } => {
                self.check("block", min, max)?;
                self.fill_box(min, max, true, Label::Obstacle);
            }
            Primitive::Pillar { center, radius, z_base, height } => {
                self.check(
                    "pillar",
                    [center[0] - radius, center[1] - radius, z_base],
                    [center[0] + radius, center[1] + radius, z_base + height],
                )?;
                let cols: Vec<(i32, i32)> = self
                    .columns()
                    .filter(|&(x, y)| {
                        (self.center(x) - center[0]).powi(2) + (self.center(y) - center[1]).powi(2)
                            < radius * radius
                    })
                    .collect();
                for (x, y) in cols {
                    self.fill_column(x, y, z_base, z_base + height, Label::Obstacle);
                }
            }
            Primitive::SpiralRamp {
                center,
                inner_radius,
                outer_radius,
                base_z,
                riser,
                steps_per_turn,
                turns,
                thickness,
            } => {
                let top = base_z + (steps_per_turn * turns) as f64 * riser;
                self.check(
                    "spiral ramp",
                    [center[0] - outer_radius, center[1] - outer_radius, (base_z - thickness).max(0.0)],
                    [center[0] + outer_radius, center[1] + outer_radius, top],
                )?;
                let cols: Vec<(i32, i32, f64)> = self
                    .columns()
                    .filter_map(|(x, y)| {
                        let (dx, dy) = (self.center(x) - center[0], self.center(y) - center[1]);
                        let rho = (dx * dx + dy * dy).sqrt();
                        (rho >= inner_radius && rho < outer_radius).then(|| {
                            let frac = dy.atan2(dx).rem_euclid(std::f64::consts::TAU) / std::f64::consts::TAU;
                            (x, y, frac)
                        })
                    })
                    .collect();
                for (x, y, frac) in cols {
                    for turn in 0..turns {
                        let step = ((turn as f64 + frac) * steps_per_turn as f64).floor();
                        let step = step.min((steps_per_turn * turns - 1) as f64);
                        let tread = base_z + (step + 1.0) * riser;
                        self.fill_column(x, y, (tread - thickness).max(0.0), tread, Label::Ramp);
                    }
                }
            }
        }
        Ok(())
    }

    fn label_free_regions(&mut self, spec: &SceneSpec) {
        for p in &spec.primitives {
            let (min, max, underside, label) = match *p {
                Primitive::Table { min, max, top_z, top_thickness, .. } => {
                    (min, max, top_z - top_thickness, Label::UnderTable)
                }
                Primitive::LowCabinet { min, max, underside_z, .. } => (min, max, underside_z, Label::UnderCabinet),
                _ => continue,
            };
            let top = self.span(0.0, underside, self.dims.nz).end;
            for y in self.span(min[1], max[1], self.dims.ny) {
                for x in self.span(min[0], max[0], self.dims.nx) {
                    for z in (0..top).rev() {
                        let v = Voxel::new(x, y, z);
                        if self.grid.is_occupied_in_bounds(v) {
                            break;
                        }
                        self.labels[self.dims.index(v).unwrap()] = label;
                    }
                }
            }
        }
        let mut faces = Vec::new();
        for i in 0..self.labels.len() {
            if self.labels[i] != Label::Wall {
                continue;
            }
            let w = self.dims.voxel(i);
            for (dx, dy) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
                let v = w.offset(dx, dy, 0);
                let supported = self.grid.is_occupied_in_bounds(v.offset(0, 0, -1));
                if self.dims.contains(v) && !self.grid.is_occupied_in_bounds(v) && !supported {
                    faces.push(v);
                }
            }
        }
        for v in faces {
            let i = self.dims.index(v).unwrap();
            if self.labels[i] == Label::Empty {
                self.labels[i] = Label::WallFace;
            }
        }
    }
}

/// Rasterizes every primitive in order; later primitives overwrite earlier ones.
pub fn build_scene(spec: &SceneSpec) -> Result<Scene> {
    let dims = spec.dims()?;
    let mut grid = OccupancyGrid::new(dims, spec.resolution, [0.0; 3])?;
    let mut labels = vec![Label::Empty; dims.volume()];
    {
        let mut raster = Raster {
            grid: &mut grid,
            labels: &mut labels,
            r: spec.resolution,
            dims,
            extent: spec.extent,
        };
        for p in &spec.primitives {
            raster.draw(p)?;
        }
        raster.label_free_regions(spec);
    }
    Ok(Scene {
        grid,
        labels: LabelMap { dims, labels },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(prims: Vec<Primitive>) -> SceneSpec {
        SceneSpec {
            name: "t".into(),
            extent: [2.0, 2.0, 2.0],
            resolution: 0.2,
            primitives: prims,
            rng_seed: 0,
            robot_pose: [1.0, 1.0, 0.5],
        }
    }

    #[test]
    fn single_floor_slab() {
        let s = spec(vec![Primitive::FloorSlab { min: [0.4, 0.0], max: [1.2, 2.0], z_top: 0.4, thickness: 0.4 }]);
        let scene = build_scene(&s).unwrap();
        assert_eq!(scene.grid.dims(), Dims::new(10, 10, 10));
        assert_eq!(scene.grid.count_occupied(), 4 * 10 * 2);
        for v in scene.grid.occupied_voxels() {
            assert!((2..6).contains(&v.x) && v.z < 2);
            assert_eq!(scene.labels.get(v), Label::Floor);
        }
    }

    #[test]
    fn out_of_extent_is_rejected() {
        let s = spec(vec![Primitive::Block { min: [0.0, 0.0, 0.0], max: [3.0, 1.0, 1.0] }]);
        assert!(matches!(build_scene(&s), Err(Error::SpecOutOfBounds(_))));
    }

    #[test]
    fn hole_clears_and_labels_pit_floor() {
        let s = spec(vec![
            Primitive::FloorSlab { min: [0.0, 0.0], max: [2.0, 2.0], z_top: 1.0, thickness: 1.0 },
            Primitive::Hole { min: [0.8, 0.8], max: [1.2, 1.2], z_bottom: 0.4, z_top: 1.0 },
        ]);
        let scene = build_scene(&s).unwrap();
        assert!(!scene.grid.is_occupied(Voxel::new(4, 4, 2)));
        assert!(!scene.grid.is_occupied(Voxel::new(4, 4, 4)));
        assert_eq!(scene.labels.get(Voxel::new(4, 4, 1)), Label::HoleFloor);
        assert_eq!(scene.labels.get(Voxel::new(3, 4, 4)), Label::Floor);
    }

    #[test]
    fn later_primitives_overwrite() {
        let s = spec(vec![
            Primitive::Block { min: [0.0, 0.0, 0.0], max: [2.0, 2.0, 0.4] },
            Primitive::FloorSlab { min: [0.0, 0.0], max: [1.0, 1.0], z_top: 0.4, thickness: 0.4 },
        ]);
        let scene = build_scene(&s).unwrap();
        assert_eq!(scene.labels.get(Voxel::new(0, 0, 0)), Label::Floor);
        assert_eq!(scene.labels.get(Voxel::new(9, 9, 0)), Label::Obstacle);
    }

    #[test]
    fn spec_json_round_trip() {
        let s = preset(PresetName::Table1Fixture, 0.2).unwrap();
        let text = serde_json::to_string(&s).unwrap();
        let back: SceneSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
    }
}
