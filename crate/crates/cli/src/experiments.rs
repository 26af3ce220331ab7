//! One function per experiment kind. Each returns its result files in memory;
//! the caller decides where they go.

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use sqrw_core::search::{optimal_hybrid_speed, BallSizes, HybridParams, SpeedReport, StepModel};
use sqrw_core::sweep::{
    blind_evaluate, blind_plan, grid_size_trend, lattice_vs_grid, maze_study, sweep_with_balls, walls_ensemble,
    weighted_histogram, HistogramBin, SweepSummary,
};
use sqrw_core::walk::radial_profile;
use sqrw_core::{Coord, Geometry, MarkedSet, NodeId, RadialProfile, Walker};

use crate::config::{ExperimentConfig, Kind};

/// A result file, named relative to the output directory.
pub struct Artifact {
    pub name: &'static str,
    pub bytes: Vec<u8>,
}

pub struct Outcome {
    pub artifacts: Vec<Artifact>,
    /// One-line human summary.
    pub summary: String,
}

/// Files a run of `kind` writes, known before anything runs.
pub fn output_names(cfg: &ExperimentConfig) -> Vec<&'static str> {
    let mut names = match cfg.kind {
        Kind::Snapshot => vec!["surface.csv", "radial.csv", "snapshot.json"],
        Kind::Sweep => vec!["curves.csv", "optimal.csv", "sweep.json"],
        Kind::Blind => vec!["classes.csv", "evaluation.csv", "blind.json"],
        Kind::Walls => vec!["samples.csv", "stats.csv", "walls.json"],
        Kind::Maze => vec!["samples.csv", "maze.json"],
        Kind::LatticeCompare => vec!["cumulative.csv", "comparison.json"],
        Kind::Trend => vec!["trend.csv"],
    };
    if matches!(cfg.kind, Kind::Snapshot | Kind::Sweep) && (cfg.walls.unwrap_or(0) > 0 || cfg.geometry.is_some()) {
        names.push("geometry.json");
    }
    names
}

pub fn run(cfg: &ExperimentConfig) -> Result<Outcome> {
    match cfg.kind {
        Kind::Snapshot => snapshot(cfg),
        Kind::Sweep => sweep(cfg),
        Kind::Blind => blind(cfg),
        Kind::Walls => walls(cfg),
        Kind::Maze => maze(cfg),
        Kind::LatticeCompare => lattice(cfg),
        Kind::Trend => trend(cfg),
    }
}

pub fn to_csv<T: Serialize>(rows: &[T]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    Ok(w.into_inner().context("flushing csv")?)
}

pub fn from_csv<T: for<'de> Deserialize<'de>>(bytes: &[u8]) -> Result<Vec<T>> {
    csv::Reader::from_reader(bytes)
        .deserialize()
        .collect::<Result<Vec<T>, _>>()
        .context("parsing csv")
}

fn to_json<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn marked_nodes(cfg: &ExperimentConfig, g: &Geometry) -> Result<(NodeId, MarkedSet)> {
    let f = g.node(cfg.target().context("F is required")?)?;
    let mut marked = vec![f];
    if let Some(s) = cfg.start() {
        marked.push(g.node(s)?);
    }
    Ok((f, marked.into_iter().collect()))
}

fn geometry_artifact(cfg: &ExperimentConfig, g: &Geometry, out: &mut Vec<Artifact>) {
    if output_names(cfg).contains(&"geometry.json") {
        let mut bytes = g.to_json().into_bytes();
        bytes.push(b'\n');
        out.push(Artifact {
            name: "geometry.json",
            bytes,
        });
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialRow {
    pub r: usize,
    pub shell: f64,
    pub cumulative: f64,
}

#[derive(Serialize)]
struct SnapshotReport {
    dims: usize,
    n: usize,
    f: Coord,
    s: Option<Coord>,
    steps: usize,
    wall_count: usize,
    p_f: f64,
    p_s: Option<f64>,
    argmax: Coord,
    p_max: f64,
    radial: RadialProfile,
}

fn snapshot(cfg: &ExperimentConfig) -> Result<Outcome> {
    let g = cfg.build_geometry()?;
    let (f, marked) = marked_nodes(cfg, &g)?;
    let steps = cfg.steps.context("steps is required")? as usize;
    let mut walker = Walker::new(&g, &marked)?;
    walker.advance(steps);
    let p = walker.probabilities();
    let profile = radial_profile(&p, &g, f);

    let mut surface = Vec::new();
    p.write_csv(&g, &mut surface)?;
    let radial: Vec<RadialRow> = profile
        .shells
        .iter()
        .zip(&profile.cumulative)
        .enumerate()
        .map(|(r, (&shell, &cumulative))| RadialRow { r, shell, cumulative })
        .collect();
    let argmax = p.argmax();
    let report = SnapshotReport {
        dims: g.dims(),
        n: g.side(),
        f: g.coord(f),
        s: cfg.start(),
        steps,
        wall_count: g.wall_count(),
        p_f: p.get(f),
        p_s: cfg.start().map(|s| p.get(g.node(s).unwrap())),
        argmax: g.coord(argmax),
        p_max: p.get(argmax),
        radial: profile,
    };
    let summary = format!(
        "P(F) = {:.5} after {steps} steps; max P = {:.5} at {}",
        report.p_f, report.p_max, report.argmax
    );
    let mut artifacts = vec![
        Artifact { name: "surface.csv", bytes: surface },
        Artifact { name: "radial.csv", bytes: to_csv(&radial)? },
        Artifact { name: "snapshot.json", bytes: to_json(&report)? },
    ];
    geometry_artifact(cfg, &g, &mut artifacts);
    Ok(Outcome { artifacts, summary })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub u_s: usize,
    pub p_target: f64,
    pub quantum_speed: Option<f64>,
    pub stable_speed: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimalRow {
    pub u_s: usize,
    pub r: usize,
    pub p_success: f64,
    pub optimal_speed: f64,
}

#[derive(Serialize)]
struct SweepReport {
    n: usize,
    dims: usize,
    wall_count: usize,
    u_max: usize,
    r_max: usize,
    summary: SweepSummary,
    /// Components at the best stable `U_s` (radius = eccentricity of F).
    stable: SpeedReport,
    /// Components at the best `(U_s, r)`.
    optimal: SpeedReport,
}

fn sweep(cfg: &ExperimentConfig) -> Result<Outcome> {
    let g = cfg.build_geometry()?;
    let (f, marked) = marked_nodes(cfg, &g)?;
    let config = cfg.sweep_config().context("sweep bounds")?;
    let balls = BallSizes::compute(&g);
    let result = sweep_with_balls(&g, &balls, &marked, f, config)?;

    let curves: Vec<CurveRow> = (0..=config.max_steps)
        .map(|u| CurveRow {
            u_s: u,
            p_target: result.p_target[u],
            quantum_speed: (u > 0 && result.p_target[u] > 0.0).then(|| u as f64 / result.p_target[u]),
            stable_speed: result.stable[u],
        })
        .collect();
    let optimal: Vec<OptimalRow> = (1..=config.max_steps)
        .flat_map(|u| {
            let result = &result;
            (0..result.optimal[u].len()).map(move |r| OptimalRow {
                u_s: u,
                r,
                p_success: result.p_success[u][r],
                optimal_speed: result.optimal[u][r],
            })
        })
        .collect();

    let model = StepModel::new(&g, &balls, f);
    let report_at = |u: usize, r: usize| -> Result<SpeedReport> {
        let mut walker = Walker::new(&g, &marked)?;
        walker.advance(u);
        let p = walker.probabilities();
        let profile = radial_profile(&p, &g, f);
        Ok(optimal_hybrid_speed(&p, &profile, &model, HybridParams { unitary_steps: u, radius: r })?)
    };
    let best = result.best_optimal;
    let report = SweepReport {
        n: g.side(),
        dims: g.dims(),
        wall_count: g.wall_count(),
        u_max: config.max_steps,
        r_max: config.max_radius,
        summary: result.summary(),
        stable: report_at(result.best_stable.unitary_steps, model.max_distance())?,
        optimal: report_at(best.unitary_steps, best.radius)?,
    };
    let summary = format!(
        "stable {:.1} at U_s={}; optimal {:.1} at U_s={}, r={} (P_success {:.3}); quantum {:.1} at U_s={}",
        result.best_stable.speed,
        result.best_stable.unitary_steps,
        best.speed,
        best.unitary_steps,
        best.radius,
        best.p_success,
        result.best_quantum.speed,
        result.best_quantum.unitary_steps
    );
    let mut artifacts = vec![
        Artifact { name: "curves.csv", bytes: to_csv(&curves)? },
        Artifact { name: "optimal.csv", bytes: to_csv(&optimal)? },
        Artifact { name: "sweep.json", bytes: to_json(&report)? },
    ];
    geometry_artifact(cfg, &g, &mut artifacts);
    Ok(Outcome { artifacts, summary })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassRow {
    pub x: usize,
    pub y: usize,
    pub multiplicity: usize,
    pub stable_steps: usize,
    pub stable_speed: f64,
    pub optimal_steps: usize,
    pub optimal_radius: usize,
    pub optimal_speed: f64,
    pub p_success: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvaluationRow {
    pub x: usize,
    pub y: usize,
    pub multiplicity: usize,
    pub stable_speed: f64,
    pub optimal_speed: f64,
    pub p_success: f64,
}

#[derive(Serialize)]
struct BlindReport {
    n: usize,
    plan: sqrw_core::sweep::BlindPlan,
    mean_stable_steps: f64,
    mean_optimal_steps: f64,
    mean_optimal_radius: f64,
    stable_mean_speed: f64,
    optimal_mean_speed: f64,
    mean_success: f64,
    stable_speed_histogram: Vec<HistogramBin>,
    optimal_speed_histogram: Vec<HistogramBin>,
    success_histogram: Vec<HistogramBin>,
}

fn blind(cfg: &ExperimentConfig) -> Result<Outcome> {
    let n = cfg.side();
    let plan = blind_plan(n, cfg.sweep_config())?;
    let eval = blind_evaluate(n, plan.plan)?;
    let classes: Vec<ClassRow> = plan
        .classes
        .iter()
        .map(|c| ClassRow {
            x: c.class.representative.x,
            y: c.class.representative.y,
            multiplicity: c.class.multiplicity,
            stable_steps: c.summary.best_stable.unitary_steps,
            stable_speed: c.summary.best_stable.speed,
            optimal_steps: c.summary.best_optimal.unitary_steps,
            optimal_radius: c.summary.best_optimal.radius,
            optimal_speed: c.summary.best_optimal.speed,
            p_success: c.summary.best_optimal.p_success,
        })
        .collect();
    let evaluation: Vec<EvaluationRow> = eval
        .records
        .iter()
        .map(|r| EvaluationRow {
            x: r.class.representative.x,
            y: r.class.representative.y,
            multiplicity: r.class.multiplicity,
            stable_speed: r.stable_speed,
            optimal_speed: r.optimal_speed,
            p_success: r.p_success,
        })
        .collect();
    let weighted = |f: fn(&EvaluationRow) -> f64| -> Vec<(f64, usize)> {
        evaluation.iter().map(|r| (f(r), r.multiplicity)).collect()
    };
    let report = BlindReport {
        n,
        plan: plan.plan,
        mean_stable_steps: plan.mean_stable_steps,
        mean_optimal_steps: plan.mean_optimal_steps,
        mean_optimal_radius: plan.mean_optimal_radius,
        stable_mean_speed: eval.stable_mean,
        optimal_mean_speed: eval.optimal_mean,
        mean_success: eval.mean_success,
        stable_speed_histogram: weighted_histogram(&weighted(|r| r.stable_speed), 100.0),
        optimal_speed_histogram: weighted_histogram(&weighted(|r| r.optimal_speed), 25.0),
        success_histogram: weighted_histogram(&weighted(|r| r.p_success), 0.01),
    };
    let summary = format!(
        "plan stable U_s={}, optimal U_s={} r={}; mean speeds {:.1} stable, {:.1} optimal; mean success {:.3}",
        plan.plan.stable_steps,
        plan.plan.optimal_steps,
        plan.plan.optimal_radius,
        eval.stable_mean,
        eval.optimal_mean,
        eval.mean_success
    );
    Ok(Outcome {
        artifacts: vec![
            Artifact { name: "classes.csv", bytes: to_csv(&classes)? },
            Artifact { name: "evaluation.csv", bytes: to_csv(&evaluation)? },
            Artifact { name: "blind.json", bytes: to_json(&report)? },
        ],
        summary,
    })
}

fn walls(cfg: &ExperimentConfig) -> Result<Outcome> {
    let target = cfg.target().context("F is required")?;
    let report = walls_ensemble(cfg.side(), target, &cfg.wall_counts, cfg.samples, cfg.seed, cfg.sweep_config())?;
    let failures: usize = report.stats.iter().map(|s| s.failures).sum();
    let summary = format!(
        "{} samples over {} wall counts, {failures} failures",
        report.records.len(),
        report.stats.len()
    );
    #[derive(Serialize)]
    struct Head<'a> {
        n: usize,
        target: Coord,
        seed: u64,
        stats: &'a [sqrw_core::sweep::EnsembleStats],
    }
    let head = Head {
        n: report.n,
        target: report.target,
        seed: report.seed,
        stats: &report.stats,
    };
    Ok(Outcome {
        artifacts: vec![
            Artifact { name: "samples.csv", bytes: to_csv(&report.records)? },
            Artifact { name: "stats.csv", bytes: to_csv(&report.stats)? },
            Artifact { name: "walls.json", bytes: to_json(&head)? },
        ],
        summary,
    })
}

fn maze(cfg: &ExperimentConfig) -> Result<Outcome> {
    let target = cfg.target().context("F is required")?;
    let report = maze_study(cfg.side(), target, cfg.samples, cfg.seed, cfg.sweep_config())?;
    let mode = report.best_steps_mode();
    let summary = format!(
        "{} mazes: {} fail to beat N²/2; most common best stable U_s = {:?}",
        report.stats.samples, report.stats.failures, mode
    );
    #[derive(Serialize)]
    struct Head<'a> {
        n: usize,
        target: Coord,
        seed: u64,
        stats: &'a sqrw_core::sweep::EnsembleStats,
        best_steps_mode: Option<usize>,
        best_steps_histogram: &'a std::collections::BTreeMap<usize, usize>,
    }
    let head = Head {
        n: report.n,
        target: report.target,
        seed: report.seed,
        stats: &report.stats,
        best_steps_mode: mode,
        best_steps_histogram: &report.best_steps_histogram,
    };
    Ok(Outcome {
        artifacts: vec![
            Artifact { name: "samples.csv", bytes: to_csv(&report.records)? },
            Artifact { name: "maze.json", bytes: to_json(&head)? },
        ],
        summary,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CumulativeRow {
    pub grid_n: usize,
    pub lattice_n: usize,
    pub r: usize,
    pub grid: Option<f64>,
    pub lattice: Option<f64>,
}

fn lattice(cfg: &ExperimentConfig) -> Result<Outcome> {
    let pairs: Vec<(usize, usize)> = cfg.pairs.iter().map(|&[g, l]| (g, l)).collect();
    let cmp = lattice_vs_grid(&pairs)?;
    let mut rows = Vec::new();
    for c in &cmp {
        let len = c.grid_cumulative.len().max(c.lattice_cumulative.len());
        rows.extend((0..len).map(|r| CumulativeRow {
            grid_n: c.grid_n,
            lattice_n: c.lattice_n,
            r,
            grid: c.grid_cumulative.get(r).copied(),
            lattice: c.lattice_cumulative.get(r).copied(),
        }));
    }
    let summary = cmp
        .iter()
        .map(|c| {
            format!(
                "grid {} stable {:.1} vs lattice {} stable {:.1}",
                c.grid_n, c.grid.best_stable.speed, c.lattice_n, c.lattice.best_stable.speed
            )
        })
        .collect::<Vec<_>>()
        .join("; ");
    Ok(Outcome {
        artifacts: vec![
            Artifact { name: "cumulative.csv", bytes: to_csv(&rows)? },
            Artifact { name: "comparison.json", bytes: to_json(&cmp)? },
        ],
        summary,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrendRow {
    pub n: usize,
    pub f_x: usize,
    pub f_y: usize,
    pub stable_steps: usize,
    pub stable_speed: f64,
    pub optimal_steps: usize,
    pub optimal_radius: usize,
    pub optimal_speed: f64,
    pub quantum_steps: usize,
    pub quantum_speed: f64,
    pub classical: f64,
    pub reference: f64,
}

fn trend(cfg: &ExperimentConfig) -> Result<Outcome> {
    let points = grid_size_trend(&cfg.sizes)?;
    let rows: Vec<TrendRow> = points
        .iter()
        .map(|p| TrendRow {
            n: p.n,
            f_x: p.summary.target.x,
            f_y: p.summary.target.y,
            stable_steps: p.summary.best_stable.unitary_steps,
            stable_speed: p.summary.best_stable.speed,
            optimal_steps: p.summary.best_optimal.unitary_steps,
            optimal_radius: p.summary.best_optimal.radius,
            optimal_speed: p.summary.best_optimal.speed,
            quantum_steps: p.summary.best_quantum.unitary_steps,
            quantum_speed: p.summary.best_quantum.speed,
            classical: p.classical,
            reference: p.reference,
        })
        .collect();
    Ok(Outcome {
        summary: format!("{} grid sizes", rows.len()),
        artifacts: vec![Artifact { name: "trend.csv", bytes: to_csv(&rows)? }],
    })
}
