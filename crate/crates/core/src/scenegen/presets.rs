use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Direction, Primitive, SceneSpec};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PresetName {
    Table1Fixture,
    TwoStoryHouse,
    FurnitureRoom,
    PlazaLike,
    SpiralRamp,
}

impl PresetName {
    pub const ALL: [PresetName; 5] = [
        PresetName::Table1Fixture,
        PresetName::TwoStoryHouse,
        PresetName::FurnitureRoom,
        PresetName::PlazaLike,
        PresetName::SpiralRamp,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            PresetName::Table1Fixture => "table1_fixture",
            PresetName::TwoStoryHouse => "two_story_house",
            PresetName::FurnitureRoom => "furniture_room",
            PresetName::PlazaLike => "plaza_like",
            PresetName::SpiralRamp => "spiral_ramp",
        }
    }
}

impl fmt::Display for PresetName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PresetName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PresetName::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| Error::UnknownPreset(s.to_string()))
    }
}

// Every length below is a multiple of 0.2 m so the presets rasterize
// identically in shape at 0.1 m and 0.2 m.
const WALL: f64 = 0.4;
const FLOOR_TOP: f64 = 0.4;

fn perimeter_walls(x: f64, y: f64, height: f64) -> Vec<Primitive> {
    let h = WALL / 2.0;
    let wall = |from: [f64; 2], to: [f64; 2]| Primitive::Wall {
        from,
        to,
        thickness: WALL,
        z_base: 0.0,
        height,
    };
    vec![
        wall([h, h], [x - h, h]),
        wall([h, y - h], [x - h, y - h]),
        wall([h, h], [h, y - h]),
        wall([x - h, h], [x - h, y - h]),
    ]
}

fn ground(x: f64, y: f64, top: f64) -> Primitive {
    Primitive::FloorSlab {
        min: [0.0, 0.0],
        max: [x, y],
        z_top: top,
        thickness: top,
    }
}

fn table(min: [f64; 2], max: [f64; 2], base_z: f64, height: f64) -> Primitive {
    let leg = 0.2;
    Primitive::Table {
        min,
        max,
        base_z,
        top_z: base_z + height,
        top_thickness: 0.2,
        legs: vec![
            [min[0] + leg / 2.0, min[1] + leg / 2.0],
            [max[0] - leg / 2.0, min[1] + leg / 2.0],
            [min[0] + leg / 2.0, max[1] - leg / 2.0],
            [max[0] - leg / 2.0, max[1] - leg / 2.0],
        ],
        leg_size: leg,
    }
}

/// Snaps to the 0.2 m lattice.
fn snap(v: f64) -> f64 {
    (v / 0.2).round() * 0.2
}

pub fn preset(name: PresetName, resolution: f64) -> Result<SceneSpec> {
    if !(resolution.is_finite() && resolution > 0.0) {
        return Err(Error::InvalidParams(format!("resolution must be > 0, got {resolution}")));
    }
    let spec = match name {
        PresetName::Table1Fixture => table1_fixture(),
        PresetName::TwoStoryHouse => two_story_house(),
        PresetName::FurnitureRoom => furniture_room(7),
        PresetName::PlazaLike => plaza_like(11),
        PresetName::SpiralRamp => spiral_ramp(),
    };
    Ok(SceneSpec { resolution, ..spec })
}

/// One room holding every structure class: floor, stairs to a mezzanine,
/// perimeter walls, a sealed ceiling cavity, a table, a low cabinet and a pit
/// left by a hole in the floor.
fn table1_fixture() -> SceneSpec {
    let (x, y, z) = (12.0, 10.0, 5.4);
    let floor_top = 1.0;
    let mut p = vec![ground(x, y, floor_top)];
    p.extend(perimeter_walls(x, y, z));
    p.push(Primitive::Hole {
        min: [1.6, 1.6],
        max: [3.2, 3.2],
        z_bottom: 0.4,
        z_top: floor_top,
    });
    p.push(Primitive::Staircase {
        origin: [4.0, 1.6],
        direction: Direction::PlusX,
        tread_depth: 0.4,
        width: 1.6,
        riser: 0.2,
        steps: 4,
        base_z: floor_top,
    });
    p.push(Primitive::FloorSlab {
        min: [5.6, 1.2],
        max: [7.6, 3.6],
        z_top: 1.8,
        thickness: 0.8,
    });
    p.push(Primitive::CeilingCavity {
        min: [8.4, 1.2],
        max: [11.2, 4.4],
        floor_z: 3.2,
        ceiling_z: 5.0,
        shell: 0.4,
    });
    p.push(table([1.6, 6.0], [3.6, 7.6], floor_top, 0.8));
    p.push(Primitive::LowCabinet {
        min: [5.2, 6.4],
        max: [7.2, 7.6],
        underside_z: floor_top + 0.4,
        top_z: floor_top + 1.2,
    });
    SceneSpec {
        name: PresetName::Table1Fixture.to_string(),
        extent: [x, y, z],
        resolution: 0.2,
        primitives: p,
        rng_seed: 0,
        robot_pose: [9.0, 7.0, floor_top + 0.1],
    }
}

/// Ground floor and a partial upper floor joined by a straight staircase; the
/// upper floor overhangs part of the ground floor.
fn two_story_house() -> SceneSpec {
    let (x, y, z) = (10.0, 8.0, 5.2);
    let upper = 2.8;
    let mut p = vec![ground(x, y, FLOOR_TOP)];
    p.extend(perimeter_walls(x, y, z));
    p.push(Primitive::FloorSlab {
        min: [6.8, 0.4],
        max: [9.6, 7.6],
        z_top: upper,
        thickness: 0.4,
    });
    p.push(Primitive::FloorSlab {
        min: [0.4, 4.0],
        max: [6.8, 7.6],
        z_top: upper,
        thickness: 0.4,
    });
    p.push(Primitive::Staircase {
        origin: [2.0, 1.6],
        direction: Direction::PlusX,
        tread_depth: 0.4,
        width: 1.6,
        riser: 0.2,
        steps: 12,
        base_z: FLOOR_TOP,
    });
    p.push(table([1.2, 5.2], [2.8, 6.4], FLOOR_TOP, 0.8));
    p.push(Primitive::LowCabinet {
        min: [4.0, 6.8],
        max: [5.6, 7.6],
        underside_z: FLOOR_TOP + 0.4,
        top_z: FLOOR_TOP + 1.0,
    });
    p.push(table([2.0, 5.6], [3.6, 6.8], upper, 0.8));
    SceneSpec {
        name: PresetName::TwoStoryHouse.to_string(),
        extent: [x, y, z],
        resolution: 0.2,
        primitives: p,
        rng_seed: 0,
        robot_pose: [1.2, 1.0, FLOOR_TOP + 0.1],
    }
}

/// A closed room densely packed with randomly placed tables, cabinets and
/// shelves, leaving a cleared patch around the robot.
fn furniture_room(rng_seed: u64) -> SceneSpec {
    let (x, y, z) = (12.0, 10.0, 3.4);
    let mut p = vec![ground(x, y, FLOOR_TOP)];
    p.push(Primitive::FloorSlab {
        min: [0.0, 0.0],
        max: [x, y],
        z_top: z,
        thickness: 0.4,
    });
    p.extend(perimeter_walls(x, y, z));
    let robot = [1.2, 1.2];
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut placed: Vec<([f64; 2], [f64; 2])> = vec![([0.4, 0.4], [2.4, 2.4])];
    let mut attempts = 0;
    while placed.len() < 26 && attempts < 2000 {
        attempts += 1;
        let kind = rng.random_range(0..3);
        let (w, d) = match kind {
            0 => (snap(rng.random_range(1.2..2.2)), snap(rng.random_range(0.8..1.4))),
            1 => (snap(rng.random_range(0.8..1.6)), snap(rng.random_range(0.6..1.0))),
            _ => (snap(rng.random_range(0.6..1.8)), 0.4),
        };
        let (w, d) = if rng.random_bool(0.5) { (w, d) } else { (d, w) };
        let min = [snap(rng.random_range(0.4..x - 0.4 - w)), snap(rng.random_range(0.4..y - 0.4 - d))];
        let max = [min[0] + w, min[1] + d];
        // keep 0.8 m aisles between pieces
        let clear = placed.iter().all(|(a, b)| {
            min[0] >= b[0] + 0.8 || max[0] + 0.8 <= a[0] || min[1] >= b[1] + 0.8 || max[1] + 0.8 <= a[1]
        });
        if !clear || max[0] > x - 0.4 || max[1] > y - 0.4 {
            continue;
        }
        placed.push((min, max));
        p.push(match kind {
            0 => table(min, max, FLOOR_TOP, 0.8),
            1 => Primitive::LowCabinet {
                min,
                max,
                underside_z: FLOOR_TOP + 0.2,
                top_z: FLOOR_TOP + 0.8,
            },
            _ => Primitive::Block {
                min: [min[0], min[1], FLOOR_TOP],
                max: [max[0], max[1], z - 0.4],
            },
        });
    }
    SceneSpec {
        name: PresetName::FurnitureRoom.to_string(),
        extent: [x, y, z],
        resolution: 0.2,
        primitives: p,
        rng_seed,
        robot_pose: [robot[0], robot[1], FLOOR_TOP + 0.1],
    }
}

/// Open-air square with a raised terrace reached by broad steps, plus
/// planters, benches and pillars.
fn plaza_like(rng_seed: u64) -> SceneSpec {
    let (x, y, z) = (32.0, 32.0, 4.4);
    let terrace = 2.4;
    let mut p = vec![ground(x, y, FLOOR_TOP)];
    p.push(Primitive::FloorSlab {
        min: [20.0, 8.0],
        max: [28.0, 24.0],
        z_top: terrace,
        thickness: terrace - FLOOR_TOP,
    });
    p.push(Primitive::Staircase {
        origin: [16.0, 12.0],
        direction: Direction::PlusX,
        tread_depth: 0.4,
        width: 8.0,
        riser: 0.2,
        steps: 10,
        base_z: FLOOR_TOP,
    });
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let keep_out = [([2.0, 2.0], [6.0, 6.0]), ([14.0, 10.0], [29.0, 26.0])];
    let mut placed: Vec<([f64; 2], [f64; 2])> = keep_out.to_vec();
    let mut attempts = 0;
    while placed.len() < keep_out.len() + 30 && attempts < 3000 {
        attempts += 1;
        let kind = rng.random_range(0..3);
        let (w, d) = match kind {
            0 => (snap(rng.random_range(1.0..3.0)), snap(rng.random_range(1.0..3.0))),
            1 => (snap(rng.random_range(1.6..2.4)), 0.6),
            _ => (0.6, 0.6),
        };
        let min = [snap(rng.random_range(1.0..x - 1.0 - w)), snap(rng.random_range(1.0..y - 1.0 - d))];
        let max = [min[0] + w, min[1] + d];
        let clear = placed.iter().all(|(a, b)| {
            min[0] >= b[0] + 1.2 || max[0] + 1.2 <= a[0] || min[1] >= b[1] + 1.2 || max[1] + 1.2 <= a[1]
        });
        if !clear {
            continue;
        }
        placed.push((min, max));
        p.push(match kind {
            0 => Primitive::Block {
                min: [min[0], min[1], FLOOR_TOP],
                max: [max[0], max[1], FLOOR_TOP + 0.6],
            },
            1 => table(min, max, FLOOR_TOP, 0.6),
            _ => Primitive::Pillar {
                center: [min[0] + 0.3, min[1] + 0.3],
                radius: 0.3,
                z_base: FLOOR_TOP,
                height: z - FLOOR_TOP,
            },
        });
    }
    // planters on the terrace
    for (cx, cy) in [(22.0, 10.0), (26.0, 21.2), (25.2, 14.0)] {
        p.push(Primitive::Block {
            min: [cx, cy, terrace],
            max: [cx + 1.2, cy + 1.2, terrace + 0.6],
        });
    }
    SceneSpec {
        name: PresetName::PlazaLike.to_string(),
        extent: [x, y, z],
        resolution: 0.2,
        primitives: p,
        rng_seed,
        robot_pose: [4.0, 4.0, FLOOR_TOP + 0.1],
    }
}

/// Three turns of a stepped helical ramp around a solid core.
fn spiral_ramp() -> SceneSpec {
    let (x, y, z) = (10.0, 10.0, 10.0);
    let center = [5.0, 5.0];
    let p = vec![
        ground(x, y, FLOOR_TOP),
        Primitive::Pillar {
            center,
            radius: 1.0,
            z_base: 0.0,
            height: z,
        },
        Primitive::SpiralRamp {
            center,
            inner_radius: 1.0,
            outer_radius: 3.0,
            base_z: FLOOR_TOP,
            riser: 0.2,
            steps_per_turn: 12,
            turns: 3,
            thickness: 0.4,
        },
    ];
    SceneSpec {
        name: PresetName::SpiralRamp.to_string(),
        extent: [x, y, z],
        resolution: 0.2,
        primitives: p,
        rng_seed: 0,
        robot_pose: [9.0, 5.0, FLOOR_TOP + 0.1],
    }
}
