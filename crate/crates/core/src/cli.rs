//! `surfnav` command-line front end.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::error::{Endpoint, Error, Result};
use crate::extract::{reduction_from_counts, ExtractionParams, Surface};
use crate::grid::{voxelize, OccupancyGrid, PointCloud, Voxel};
use crate::pipeline::{run_extraction, snap_endpoint, SeedSpec};
use crate::plan::{plan, PlanParams};
use crate::report::{run_bench, BenchConfig};
use crate::scenegen::{build_scene, preset, sample_queries, PresetName, QueryMode, SceneSpec};

/// Exit code for bad input: missing files, malformed formats, invalid flags.
pub const EXIT_INPUT: i32 = 2;
/// Exit code for pipeline failures: no candidates, seed snapping, off-surface queries.
pub const EXIT_PIPELINE: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "surfnav",
    version,
    about = "Extract reachable traversable surfaces from 3D occupancy grids and plan on them",
    after_help = "Exit codes: 0 success, 2 input error (files, formats, flags), 3 pipeline error (no candidates, seed snap, off-surface query)."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Bin a text point cloud (`x y z` per line) into a grid file.
    Voxelize(VoxelizeArgs),
    /// Build a synthetic scene from a preset or a JSON spec.
    Scenegen(ScenegenArgs),
    /// Extract the reachable surface from a grid file.
    Extract(ExtractArgs),
    /// Plan a path on an extracted surface.
    Plan(PlanArgs),
    /// Extract once, sample queries, plan all and report.
    Bench(BenchArgs),
    /// Sample start/goal pairs from a surface.
    Queries(QueriesArgs),
}

#[derive(Debug, Args)]
pub struct VoxelizeArgs {
    pub input: PathBuf,
    #[arg(long)]
    pub resolution: f64,
    #[arg(long, default_value_t = 1)]
    pub min_points: usize,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
#[group(id = "source", required = true, multiple = false)]
pub struct SceneSource {
    /// Preset name: table1_fixture, two_story_house, furniture_room, plaza_like, spiral_ramp.
    #[arg(long, group = "source")]
    pub preset: Option<String>,
    /// JSON scene spec file.
    #[arg(long, group = "source")]
    pub spec: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScenegenArgs {
    #[command(flatten)]
    pub source: SceneSource,
    /// Overrides the scene resolution (presets default to 0.2 m).
    #[arg(long)]
    pub resolution: Option<f64>,
    #[arg(short, long)]
    pub output: PathBuf,
    /// Also write the occupied voxel centers as a text point cloud.
    #[arg(long)]
    pub export_cloud: Option<PathBuf>,
    /// Also write the resolved scene spec as JSON.
    #[arg(long)]
    pub export_spec: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ExtractionFlags {
    #[arg(long, default_value_t = 0.3)]
    pub t_conn: f64,
    #[arg(long, default_value_t = 1.6)]
    pub h_clear: f64,
    #[arg(long, default_value_t = 0.3)]
    pub r_inf: f64,
    /// Largest distance, meters, a pose may be snapped to the nearest state.
    #[arg(long, default_value_t = 1.0)]
    pub max_snap: f64,
}

impl ExtractionFlags {
    fn params(&self) -> ExtractionParams {
        ExtractionParams {
            t_conn: self.t_conn,
            h_clear: self.h_clear,
            r_inf: self.r_inf,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct PlanFlags {
    #[arg(long, default_value_t = 1.0)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 2.0)]
    pub w_up: f64,
    #[arg(long, default_value_t = 1.0)]
    pub w_down: f64,
    #[arg(long, default_value_t = 0.5)]
    pub w_obs: f64,
}

impl PlanFlags {
    fn params(&self) -> PlanParams {
        PlanParams {
            epsilon: self.epsilon,
            w_up: self.w_up,
            w_down: self.w_down,
            w_obs: self.w_obs,
        }
    }
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    pub grid: PathBuf,
    /// Robot position x,y,z in meters.
    #[arg(long, value_parser = parse_f64_triple, conflicts_with = "seed_voxel", required_unless_present = "seed_voxel")]
    pub seed_pos: Option<[f64; 3]>,
    /// Seed voxel x,y,z; must be a collision-free candidate.
    #[arg(long, value_parser = parse_i32_triple)]
    pub seed_voxel: Option<[i32; 3]>,
    #[command(flatten)]
    pub extraction: ExtractionFlags,
    /// Surface file to write.
    #[arg(short, long)]
    pub output: PathBuf,
    /// Write the stats JSON here instead of stdout.
    #[arg(long)]
    pub stats: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PlanArgs {
    pub surface: PathBuf,
    #[arg(long, value_parser = parse_f64_triple)]
    pub start: [f64; 3],
    #[arg(long, value_parser = parse_f64_triple)]
    pub goal: [f64; 3],
    #[command(flatten)]
    pub plan: PlanFlags,
    #[arg(long, default_value_t = 1.0)]
    pub max_snap: f64,
    /// Polyline file to write (one `x y z` voxel center per line).
    #[arg(short, long)]
    pub output: PathBuf,
    /// Write the query JSON here instead of stdout.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, conflicts_with_all = ["spec", "grid"])]
    pub preset: Option<String>,
    #[arg(long, conflicts_with = "grid")]
    pub spec: Option<PathBuf>,
    #[arg(long)]
    pub grid: Option<PathBuf>,
    #[arg(long)]
    pub resolution: Option<f64>,
    /// Robot position; defaults to the scene's robot pose for presets/specs.
    #[arg(long, value_parser = parse_f64_triple)]
    pub seed_pos: Option<[f64; 3]>,
    #[arg(long, default_value_t = 50)]
    pub queries: usize,
    #[arg(long, default_value = "mixed")]
    pub mode: String,
    #[arg(long, default_value_t = 0)]
    pub rng_seed: u64,
    #[arg(long, default_value_t = 1)]
    pub repeat: usize,
    #[command(flatten)]
    pub extraction: ExtractionFlags,
    #[command(flatten)]
    pub plan: PlanFlags,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct QueriesArgs {
    pub surface: PathBuf,
    #[arg(long, default_value_t = 50)]
    pub n: usize,
    #[arg(long, default_value = "mixed")]
    pub mode: String,
    #[arg(long, default_value_t = 0)]
    pub rng_seed: u64,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

fn parse_triple<T: std::str::FromStr>(s: &str) -> std::result::Result<[T; 3], String>
where
    T::Err: std::fmt::Display,
{
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected x,y,z, got {s:?}"));
    }
    let mut out = Vec::with_capacity(3);
    for p in parts {
        out.push(p.parse::<T>().map_err(|e| format!("{p:?}: {e}"))?);
    }
    let mut it = out.into_iter();
    Ok([it.next().unwrap(), it.next().unwrap(), it.next().unwrap()])
}

fn parse_f64_triple(s: &str) -> std::result::Result<[f64; 3], String> {
    parse_triple(s)
}

fn parse_i32_triple(s: &str) -> std::result::Result<[i32; 3], String> {
    parse_triple(s)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

fn emit_json<T: Serialize>(value: &T, dest: Option<&Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match dest {
        Some(p) => {
            let mut w = create(p)?;
            writeln!(w, "{text}").map_err(|e| Error::io(p, e))?;
            w.flush().map_err(|e| Error::io(p, e))
        }
        None => {
            let mut out = std::io::stdout().lock();
            match writeln!(out, "{text}").and_then(|_| out.flush()) {
                // a closed reader (`| head`) is not a failure
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
                _ => Ok(()),
            }
        }
    }
}

fn load_spec(path: &Path) -> Result<SceneSpec> {
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_reader(BufReader::new(f))?)
}

fn resolve_spec(preset_name: Option<&str>, spec: Option<&Path>, resolution: Option<f64>) -> Result<SceneSpec> {
    let mut s = match (preset_name, spec) {
        (Some(name), _) => preset(name.parse::<PresetName>()?, resolution.unwrap_or(0.2))?,
        (None, Some(path)) => load_spec(path)?,
        (None, None) => return Err(Error::InvalidParams("need --preset or --spec".into())),
    };
    if let Some(r) = resolution {
        s.resolution = r;
    }
    Ok(s)
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Voxelize(a) => cmd_voxelize(&a),
        Command::Scenegen(a) => cmd_scenegen(&a),
        Command::Extract(a) => cmd_extract(&a),
        Command::Plan(a) => cmd_plan(&a),
        Command::Bench(a) => cmd_bench(&a),
        Command::Queries(a) => cmd_queries(&a),
    }
}

#[derive(Serialize)]
struct GridSummary {
    dims: [usize; 3],
    #[serde(rename = "V")]
    total_voxels: usize,
    occupied: usize,
    resolution: f64,
    origin: [f64; 3],
}

impl GridSummary {
    fn of(g: &OccupancyGrid) -> Self {
        let d = g.dims();
        GridSummary {
            dims: [d.nx, d.ny, d.nz],
            total_voxels: g.len(),
            occupied: g.count_occupied(),
            resolution: g.resolution(),
            origin: g.origin(),
        }
    }
}

pub fn cmd_voxelize(a: &VoxelizeArgs) -> Result<()> {
    let cloud = PointCloud::load(&a.input)?;
    let grid = voxelize(&cloud, a.resolution, a.min_points)?;
    grid.save(&a.output)?;
    emit_json(&GridSummary::of(&grid), None)
}

pub fn cmd_scenegen(a: &ScenegenArgs) -> Result<()> {
    let spec = resolve_spec(a.source.preset.as_deref(), a.source.spec.as_deref(), a.resolution)?;
    let scene = build_scene(&spec)?;
    scene.grid.save(&a.output)?;
    if let Some(p) = &a.export_cloud {
        let mut w = create(p)?;
        PointCloud::from_grid(&scene.grid).write_to(&mut w)?;
        w.flush().map_err(|e| Error::io(p, e))?;
    }
    if let Some(p) = &a.export_spec {
        emit_json(&spec, Some(p))?;
    }
    emit_json(&GridSummary::of(&scene.grid), None)
}

#[derive(Serialize)]
struct ExtractReport {
    #[serde(flatten)]
    stats: crate::extract::ReductionStats,
    candidates: usize,
    candidates_collision_free: usize,
    seed: Voxel,
    levels_max: usize,
    d_max: u32,
    #[serde(rename = "T_e")]
    t_evaluate: f64,
    #[serde(rename = "T_stages")]
    stages: crate::pipeline::ExtractionTimings,
}

pub fn cmd_extract(a: &ExtractArgs) -> Result<()> {
    let grid = OccupancyGrid::load(&a.grid)?;
    let seed = match (a.seed_pos, a.seed_voxel) {
        (Some(p), _) => SeedSpec::Pose {
            position: p,
            max_snap: a.extraction.max_snap,
        },
        (None, Some(v)) => SeedSpec::Voxels(vec![Voxel::from(v)]),
        (None, None) => return Err(Error::InvalidParams("need --seed-pos or --seed-voxel".into())),
    };
    let ex = run_extraction(&grid, &a.extraction.params(), &seed)?;
    let mut w = create(&a.output)?;
    ex.surface.write_to(&mut w, Some(ex.dfield.as_slice()))?;
    w.flush().map_err(|e| Error::io(&a.output, e))?;
    let s = &ex.surface;
    let levels_max = s
        .states()
        .iter()
        .map(|v| s.column(v.x, v.y).len())
        .max()
        .unwrap_or(0);
    let report = ExtractReport {
        stats: reduction_from_counts(grid.len(), s.len(), ex.timings.total()),
        candidates: ex.raw_candidates,
        candidates_collision_free: ex.filtered_candidates,
        seed: s.seed(),
        levels_max,
        d_max: ex.dfield.max(),
        t_evaluate: ex.timings.evaluation(),
        stages: ex.timings,
    };
    emit_json(&report, a.stats.as_deref())
}

fn load_surface(path: &Path) -> Result<Surface> {
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    Surface::read_from(BufReader::new(f))
}


#[derive(Serialize)]
struct PlanReport<'a> {
    start: Voxel,
    goal: Voxel,
    success: bool,
    #[serde(flatten)]
    result: &'a crate::plan::PathResult,
}

pub fn cmd_plan(a: &PlanArgs) -> Result<()> {
    let surface = load_surface(&a.surface)?;
    let dfield = crate::dfield::distance_field(&surface);
    let s = snap_endpoint(&surface, a.start, a.max_snap, Endpoint::Start)?;
    let g = snap_endpoint(&surface, a.goal, a.max_snap, Endpoint::Goal)?;
    let (start, goal) = (surface.state(s), surface.state(g));
    let result = plan(&surface, &dfield, start, goal, &a.plan.params())?;
    let mut w = create(&a.output)?;
    for &o in &result.ordinals {
        let c = surface.world_position(o);
        writeln!(w, "{:.6} {:.6} {:.6}", c[0], c[1], c[2]).map_err(|e| Error::io(&a.output, e))?;
    }
    w.flush().map_err(|e| Error::io(&a.output, e))?;
    emit_json(
        &PlanReport {
            start,
            goal,
            success: true,
            result: &result,
        },
        a.json.as_deref(),
    )
}

pub fn cmd_bench(a: &BenchArgs) -> Result<()> {
    let t0 = Instant::now();
    let (scene, grid, pose) = if let Some(path) = &a.grid {
        (path.display().to_string(), OccupancyGrid::load(path)?, None)
    } else {
        let spec = resolve_spec(a.preset.as_deref(), a.spec.as_deref(), a.resolution)?;
        let built = build_scene(&spec)?;
        (spec.name.clone(), built.grid, Some(spec.robot_pose))
    };
    let t_build = t0.elapsed().as_secs_f64();
    let position = a
        .seed_pos
        .or(pose)
        .ok_or_else(|| Error::InvalidParams("--seed-pos is required with --grid".into()))?;
    let cfg = BenchConfig {
        extraction: a.extraction.params(),
        plan: a.plan.params(),
        seed: SeedSpec::Pose {
            position,
            max_snap: a.extraction.max_snap,
        },
        queries: a.queries,
        mode: a.mode.parse::<QueryMode>()?,
        rng_seed: a.rng_seed,
        repeat: a.repeat,
    };
    let report = run_bench(&scene, &grid, t_build, &cfg)?;
    emit_json(&report, a.output.as_deref())
}

#[derive(Serialize)]
struct QueryPair {
    start: Voxel,
    goal: Voxel,
}

pub fn cmd_queries(a: &QueriesArgs) -> Result<()> {
    let surface = load_surface(&a.surface)?;
    let pairs = sample_queries(&surface, a.n, a.mode.parse()?, a.rng_seed)?;
    let out: Vec<QueryPair> = pairs.into_iter().map(|(start, goal)| QueryPair { start, goal }).collect();
    emit_json(&out, a.output.as_deref())
}

pub fn exit_code(e: &Error) -> i32 {
    if e.is_input_error() {
        EXIT_INPUT
    } else {
        EXIT_PIPELINE
    }
}
