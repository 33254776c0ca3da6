mod common;

use std::collections::HashSet;

use surfnav::extract::candidate_set;
use surfnav::oracle::flood_fill_reference;
use surfnav::scenegen::{build_scene, preset, sample_queries, Label, PresetName, QueryMode};
use surfnav::{plan, run_extraction, ExtractionParams, PlanParams, SeedSpec};

fn pose_seed(position: [f64; 3]) -> SeedSpec {
    SeedSpec::Pose { position, max_snap: 1.0 }
}

#[test]
fn every_preset_extracts_and_plans_at_both_resolutions() {
    for name in PresetName::ALL {
        for r in [0.2, 0.1] {
            let spec = preset(name, r).unwrap();
            let scene = build_scene(&spec).unwrap();
            let ex = run_extraction(&scene.grid, &ExtractionParams::default(), &pose_seed(spec.robot_pose)).unwrap();
            assert!(ex.surface.len() > 100, "{name:?} at {r}");
            let pairs = sample_queries(&ex.surface, 6, QueryMode::SameFloor, 5).unwrap();
            for (s, g) in pairs {
                plan(&ex.surface, &ex.dfield, s, g, &PlanParams::default()).unwrap();
            }
        }
    }
}

#[test]
fn presets_are_bit_identical_across_builds() {
    for name in PresetName::ALL {
        let a = build_scene(&preset(name, 0.2).unwrap()).unwrap();
        let b = build_scene(&preset(name, 0.2).unwrap()).unwrap();
        assert_eq!(a.grid, b.grid, "{name:?}");
    }
}

#[test]
fn table1_fixture_contains_every_structure_class() {
    let scene = build_scene(&preset(PresetName::Table1Fixture, 0.2).unwrap()).unwrap();
    for label in [
        Label::Floor,
        Label::Wall,
        Label::Stair,
        Label::TableTop,
        Label::Cabinet,
        Label::CavityShell,
        Label::HoleFloor,
        Label::UnderCabinet,
    ] {
        assert!(scene.labels.voxels_with(label).next().is_some(), "{label:?}");
    }
}

#[test]
fn tabletop_seed_yields_only_the_tabletop() {
    let spec = preset(PresetName::Table1Fixture, 0.2).unwrap();
    let scene = build_scene(&spec).unwrap();
    let ex = run_extraction(&scene.grid, &ExtractionParams::default(), &pose_seed([2.6, 6.8, 1.9])).unwrap();
    let surface: HashSet<_> = ex.surface.states().iter().copied().collect();
    assert!(surface.iter().all(|&v| scene.labels.support_of(v) == Label::TableTop));
    // the whole 2.0 m x 1.6 m top survives the collision filter
    assert_eq!(surface.len(), 10 * 8);
}

#[test]
fn zero_step_confines_the_surface_to_the_seed_floor() {
    let spec = preset(PresetName::Table1Fixture, 0.2).unwrap();
    let scene = build_scene(&spec).unwrap();
    let params = ExtractionParams { t_conn: 0.0, ..ExtractionParams::default() };
    let ex = run_extraction(&scene.grid, &params, &pose_seed(spec.robot_pose)).unwrap();
    let z = ex.surface.seed().z;
    assert!(ex.surface.states().iter().all(|v| v.z == z));
    assert!(ex.surface.states().iter().all(|&v| scene.labels.support_of(v) != Label::Stair));
    let full = run_extraction(&scene.grid, &ExtractionParams::default(), &pose_seed(spec.robot_pose)).unwrap();
    assert!(full.surface.states().iter().any(|&v| scene.labels.support_of(v) == Label::Stair));
}

#[test]
fn two_story_house_has_stacked_states() {
    let spec = preset(PresetName::TwoStoryHouse, 0.2).unwrap();
    let scene = build_scene(&spec).unwrap();
    let ex = run_extraction(&scene.grid, &ExtractionParams::default(), &pose_seed(spec.robot_pose)).unwrap();
    let stacked = ex.surface.states().iter().filter(|v| ex.surface.column(v.x, v.y).len() >= 2).count();
    assert!(stacked > 0);
}

#[test]
fn spiral_ramp_connects_bottom_to_top() {
    for r in [0.2, 0.1] {
        let spec = preset(PresetName::SpiralRamp, r).unwrap();
        let scene = build_scene(&spec).unwrap();
        let params = ExtractionParams::default();
        let ex = run_extraction(&scene.grid, &params, &pose_seed(spec.robot_pose)).unwrap();
        // the component holds every ramp tread that survives the collision filter
        let ramp: Vec<_> = ex
            .surface
            .states()
            .iter()
            .filter(|&&v| scene.labels.support_of(v) == Label::Ramp)
            .collect();
        let top = ramp.iter().map(|v| v.z).max().unwrap();
        let ground = ex.surface.seed().z;
        // three turns of twelve 0.2 m risers
        assert!((top - ground) as f64 * r >= 6.0, "top {top} ground {ground}");

        let dv = params.to_voxels(r).unwrap();
        let filtered: HashSet<_> = surfnav::collision_filter(&candidate_set(&scene.grid, &dv), &scene.grid, &dv)
            .iter()
            .collect();
        let reference = flood_fill_reference(&filtered, ex.surface.seed(), dv.step_i32()).unwrap();
        assert_eq!(reference, ex.surface.states().iter().copied().collect::<HashSet<_>>());
    }
}

#[test]
fn cross_floor_path_on_two_story_house() {
    let spec = preset(PresetName::TwoStoryHouse, 0.2).unwrap();
    let scene = build_scene(&spec).unwrap();
    let ex = run_extraction(&scene.grid, &ExtractionParams::default(), &pose_seed(spec.robot_pose)).unwrap();
    let k = ex.surface.params().step_i32();
    for (s, g) in sample_queries(&ex.surface, 10, QueryMode::CrossFloor, 2).unwrap() {
        let res = plan(&ex.surface, &ex.dfield, s, g, &PlanParams::default()).unwrap();
        assert!(res.states.windows(2).all(|w| (w[0].z - w[1].z).abs() <= k));
    }
}
