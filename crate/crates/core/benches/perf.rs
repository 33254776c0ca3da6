//! Extraction and search timings for every preset.
//!
//! `cargo bench -p surfnav --bench perf [-- RESOLUTION]`

use std::time::Instant;

use surfnav::report::{run_bench, BenchConfig};
use surfnav::scenegen::{build_scene, preset, PresetName, QueryMode};
use surfnav::{run_extraction, ExtractionParams, PlanParams, SeedSpec};

fn main() {
    let resolution: f64 = std::env::args()
        .skip(1)
        .find_map(|a| a.parse().ok())
        .unwrap_or(0.1);
    println!(
        "{:<16} {:>10} {:>8} {:>9} {:>9} {:>9} {:>8} {:>5}",
        "scene", "V", "|S|", "T_p ms", "T_ext ms", "T_s ms", "N_s", "SR"
    );
    for name in PresetName::ALL {
        let spec = preset(name, resolution).expect("preset");
        let t0 = Instant::now();
        let grid = build_scene(&spec).expect("scene").grid;
        let t_build = t0.elapsed().as_secs_f64();
        let cfg = BenchConfig {
            extraction: ExtractionParams::default(),
            plan: PlanParams::default(),
            seed: SeedSpec::Pose { position: spec.robot_pose, max_snap: 1.0 },
            queries: 50,
            mode: QueryMode::Mixed,
            rng_seed: 1,
            repeat: 3,
        };
        let r = run_bench(name.as_str(), &grid, t_build, &cfg).expect("bench");
        println!(
            "{:<16} {:>10} {:>8} {:>9.2} {:>9.2} {:>9.3} {:>8.0} {:>5.2}",
            r.scene,
            r.total_voxels,
            r.surface_size,
            r.t_build * 1e3,
            r.t_ext * 1e3,
            r.aggregate.t_search_mean * 1e3,
            r.aggregate.expanded_mean,
            r.aggregate.success_rate
        );
    }

    // Raise the plaza ceiling until the grid exceeds 10^7 voxels.
    let mut tall = preset(PresetName::PlazaLike, 0.1).expect("preset");
    tall.extent[2] = 10.0;
    let grid = build_scene(&tall).expect("scene").grid;
    let seed = SeedSpec::Pose { position: tall.robot_pose, max_snap: 1.0 };
    let mut best = f64::INFINITY;
    for _ in 0..3 {
        let t0 = Instant::now();
        run_extraction(&grid, &ExtractionParams::default(), &seed).expect("extraction");
        best = best.min(t0.elapsed().as_secs_f64());
    }
    println!("extraction of {} voxels: {:.1} ms (best of 3)", grid.len(), best * 1e3);
}
