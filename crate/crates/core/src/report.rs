//! Multi-query benchmark runs and their JSON reports.
//!
//! Keys are short metric symbols (`V`, `S_size`, `SR`, `T_s`, `N_s`, `L`).
//! Every wall-clock field starts with `T_`; all other fields are
//! deterministic for fixed inputs.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::extract::reduction_from_counts;
use crate::grid::{OccupancyGrid, Voxel};
use crate::pipeline::{run_extraction, Extraction, ExtractionTimings, SeedSpec};
use crate::plan::{plan, PlanParams};
use crate::scenegen::{sample_queries, QueryMode};
use crate::extract::ExtractionParams;

#[derive(Debug, Clone, Serialize)]
pub struct QueryRecord {
    pub index: usize,
    pub start: Voxel,
    pub goal: Voxel,
    pub success: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(rename = "T_s")]
    pub t_search: f64,
    #[serde(rename = "N_s")]
    pub expanded: usize,
    pub cost: Option<f64>,
    #[serde(rename = "L")]
    pub metric_length: Option<f64>,
    #[serde(rename = "L_xy")]
    pub xy_length: Option<f64>,
    pub path_states: usize,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Aggregate {
    pub queries: usize,
    pub successes: usize,
    #[serde(rename = "SR")]
    pub success_rate: f64,
    #[serde(rename = "T_s_mean")]
    pub t_search_mean: f64,
    #[serde(rename = "T_s_std")]
    pub t_search_std: f64,
    #[serde(rename = "N_s_mean")]
    pub expanded_mean: f64,
    #[serde(rename = "L_mean")]
    pub length_mean: f64,
    #[serde(rename = "L_std")]
    pub length_std: f64,
    pub cost_mean: f64,
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

impl Aggregate {
    pub fn from_records(records: &[QueryRecord]) -> Self {
        let ok: Vec<&QueryRecord> = records.iter().filter(|r| r.success).collect();
        let times: Vec<f64> = ok.iter().map(|r| r.t_search).collect();
        let lengths: Vec<f64> = ok.iter().filter_map(|r| r.metric_length).collect();
        let costs: Vec<f64> = ok.iter().filter_map(|r| r.cost).collect();
        let expanded: Vec<f64> = ok.iter().map(|r| r.expanded as f64).collect();
        let (t_mean, t_std) = mean_std(&times);
        let (l_mean, l_std) = mean_std(&lengths);
        Aggregate {
            queries: records.len(),
            successes: ok.len(),
            success_rate: if records.is_empty() { 1.0 } else { ok.len() as f64 / records.len() as f64 },
            t_search_mean: t_mean,
            t_search_std: t_std,
            expanded_mean: mean_std(&expanded).0,
            length_mean: l_mean,
            length_std: l_std,
            cost_mean: mean_std(&costs).0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub scene: String,
    #[serde(rename = "V")]
    pub total_voxels: usize,
    pub candidates: usize,
    pub candidates_collision_free: usize,
    #[serde(rename = "S_size")]
    pub surface_size: usize,
    pub reduction: f64,
    pub seed: Voxel,
    pub mode: QueryMode,
    pub rng_seed: u64,
    pub extraction_params: ExtractionParams,
    pub plan_params: PlanParams,
    /// Map build/load time.
    #[serde(rename = "T_p")]
    pub t_build: f64,
    /// Candidate evaluation time (candidates, collision, seed, BFS).
    #[serde(rename = "T_e")]
    pub t_evaluate: f64,
    #[serde(rename = "T_ext")]
    pub t_ext: f64,
    #[serde(rename = "T_stages")]
    pub stages: ExtractionTimings,
    pub queries: Vec<QueryRecord>,
    pub aggregate: Aggregate,
    /// `T_p + T_ext + Σ T_s`.
    #[serde(rename = "T_all")]
    pub t_total: f64,
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub extraction: ExtractionParams,
    pub plan: PlanParams,
    pub seed: SeedSpec,
    pub queries: usize,
    pub mode: QueryMode,
    pub rng_seed: u64,
    /// Timed passes over the query set; with more than one, the first is
    /// warmup and excluded from the means.
    pub repeat: usize,
}

/// Extracts once, samples queries and plans every one of them.
///
/// Mixed mode falls back to same-floor pairs when the surface has a single
/// floor; the report records the mode actually used.
pub fn run_bench(scene: &str, grid: &OccupancyGrid, t_build: f64, cfg: &BenchConfig) -> Result<RunReport> {
    let ex = run_extraction(grid, &cfg.extraction, &cfg.seed)?;
    let (mode, pairs) = match sample_queries(&ex.surface, cfg.queries, cfg.mode, cfg.rng_seed) {
        Err(Error::InsufficientFloors { .. }) if cfg.mode == QueryMode::Mixed => (
            QueryMode::SameFloor,
            sample_queries(&ex.surface, cfg.queries, QueryMode::SameFloor, cfg.rng_seed)?,
        ),
        other => (cfg.mode, other?),
    };
    let records = plan_all(&ex, &pairs, &cfg.plan, cfg.repeat);
    Ok(assemble(scene, grid, t_build, cfg, ex, mode, records))
}

fn plan_all(ex: &Extraction, pairs: &[(Voxel, Voxel)], params: &PlanParams, repeat: usize) -> Vec<QueryRecord> {
    let passes = repeat.max(1);
    let timed_from = usize::from(passes > 1);
    let mut records: Vec<QueryRecord> = Vec::with_capacity(pairs.len());
    for (index, &(start, goal)) in pairs.iter().enumerate() {
        let mut times = Vec::with_capacity(passes);
        let mut last = None;
        for pass in 0..passes {
            let res = plan(&ex.surface, &ex.dfield, start, goal, params);
            if let Ok(p) = &res {
                if pass >= timed_from {
                    times.push(p.search_time);
                }
            }
            last = Some(res);
        }
        let rec = match last.expect("at least one pass") {
            Ok(p) => QueryRecord {
                index,
                start,
                goal,
                success: true,
                error: None,
                t_search: mean_std(&times).0,
                expanded: p.expanded,
                cost: Some(p.cost),
                metric_length: Some(p.metric_length),
                xy_length: Some(p.xy_length),
                path_states: p.states.len(),
            },
            Err(e) => QueryRecord {
                index,
                start,
                goal,
                success: false,
                error: Some(e.to_string()),
                t_search: 0.0,
                expanded: 0,
                cost: None,
                metric_length: None,
                xy_length: None,
                path_states: 0,
            },
        };
        records.push(rec);
    }
    records
}

fn assemble(
    scene: &str,
    grid: &OccupancyGrid,
    t_build: f64,
    cfg: &BenchConfig,
    ex: Extraction,
    mode: QueryMode,
    queries: Vec<QueryRecord>,
) -> RunReport {
    let stats = reduction_from_counts(grid.len(), ex.surface.len(), ex.timings.total());
    let aggregate = Aggregate::from_records(&queries);
    let t_search: f64 = queries.iter().map(|q| q.t_search).sum();
    RunReport {
        scene: scene.to_string(),
        total_voxels: stats.total_voxels,
        candidates: ex.raw_candidates,
        candidates_collision_free: ex.filtered_candidates,
        surface_size: stats.surface_size,
        reduction: stats.reduction,
        seed: ex.surface.seed(),
        mode,
        rng_seed: cfg.rng_seed,
        extraction_params: cfg.extraction,
        plan_params: cfg.plan,
        t_build,
        t_evaluate: ex.timings.evaluation(),
        t_ext: stats.t_ext,
        stages: ex.timings,
        queries,
        aggregate,
        t_total: t_build + stats.t_ext + t_search,
    }
}

/// Replaces every `T_*` field with `null`, recursively.
pub fn strip_timing(value: &mut serde_json::Value) {
    match value {
        serde_json::Value::Object(map) => {
            for (k, v) in map.iter_mut() {
                if k.starts_with("T_") {
                    *v = serde_json::Value::Null;
                } else {
                    strip_timing(v);
                }
            }
        }
        serde_json::Value::Array(items) => items.iter_mut().for_each(strip_timing),
        _ => {}
    }
}
