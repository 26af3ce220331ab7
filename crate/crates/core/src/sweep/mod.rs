//! Exhaustive `(U_s, r)` optimization for single targets, plus the blind,
//! ensemble and comparison experiments built on it.

mod blind;
mod compare;
mod ensemble;
mod stats;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geometry::{Coord, Geometry, NodeId};
use crate::search::{BallSizes, RadiusSums, StepModel};
use crate::walk::{MarkedSet, Walker};

pub use blind::{blind_evaluate, blind_plan, BlindEvaluation, BlindPlan, BlindPlanReport, BlindRecord, ClassOptimum};
pub use compare::{grid_size_trend, lattice_vs_grid, quarter_target, LatticeComparison, TrendPoint};
pub use ensemble::{maze_study, sample_geometry, walls_ensemble, EnsembleReport, EnsembleStats, MazeReport, SampleRecord};
pub use stats::{weighted_histogram, HistogramBin};

/// Sweep bounds: `U_s ∈ 0..=max_steps`, `r ∈ 0..=max_radius`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub max_steps: usize,
    pub max_radius: usize,
}

impl SweepConfig {
    /// Defaults for wall-free grids and lattices: `3·⌈√V⌉` steps (3N on a
    /// grid) and radii up to `N/2`. The first probability peak at `F` grows
    /// like `√V`, so this covers it in both dimensions.
    pub fn open(g: &Geometry) -> Self {
        Self::open_for(g.dims(), g.side())
    }

    pub fn open_for(dims: usize, n: usize) -> Self {
        let nodes = n.pow(dims as u32) as f64;
        SweepConfig {
            max_steps: 3 * nodes.sqrt().ceil() as usize,
            max_radius: n / 2,
        }
    }

    /// Defaults for walled grids and mazes: `N²/2` steps, beyond which no
    /// hybrid can beat the classical average, and radii up to `2N`.
    pub fn walled(n: usize) -> Self {
        SweepConfig {
            max_steps: n * n / 2,
            max_radius: 2 * n,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StableOptimum {
    pub unitary_steps: usize,
    pub speed: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimalOptimum {
    pub unitary_steps: usize,
    pub radius: usize,
    pub speed: f64,
    pub p_success: f64,
}

/// Speed curves for one target and their minima.
///
/// `optimal[u][r]` is the repeated bounded-search speed. Its `u = 0` row is
/// infinite: repeating measurements of an unprepared system would make the
/// radius-0 search free.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    pub target: Coord,
    pub config: SweepConfig,
    pub p_target: Vec<f64>,
    pub stable: Vec<f64>,
    pub optimal: Vec<Vec<f64>>,
    pub p_success: Vec<Vec<f64>>,
    pub best_stable: StableOptimum,
    pub best_optimal: OptimalOptimum,
    /// Best `U_s / P_F` over `U_s ≥ 1`.
    pub best_quantum: StableOptimum,
}

impl SweepResult {
    pub fn summary(&self) -> SweepSummary {
        SweepSummary {
            target: self.target,
            best_stable: self.best_stable,
            best_optimal: self.best_optimal,
            best_quantum: self.best_quantum,
        }
    }
}

/// The argmins of a [`SweepResult`], without the curves.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub target: Coord,
    pub best_stable: StableOptimum,
    pub best_optimal: OptimalOptimum,
    pub best_quantum: StableOptimum,
}

/// Evolves once to `config.max_steps`, scoring every intermediate step.
pub fn sweep_single_f(g: &Geometry, target: NodeId, config: SweepConfig) -> Result<SweepResult> {
    let balls = BallSizes::compute(g);
    sweep_with_balls(g, &balls, &MarkedSet::single(target), target, config)
}

/// Same as [`sweep_single_f`] with a precomputed ball table and an arbitrary
/// marked set (the target need not be the only marked node).
pub fn sweep_with_balls(
    g: &Geometry,
    balls: &BallSizes,
    marked: &MarkedSet,
    target: NodeId,
    config: SweepConfig,
) -> Result<SweepResult> {
    let model = StepModel::new(g, balls, target);
    let max_radius = config.max_radius.min(model.max_distance());
    let mut walker = Walker::new(g, marked)?;
    let mut probs = Vec::with_capacity(g.node_count());
    let mut sums = RadiusSums::default();

    let steps = config.max_steps + 1;
    let mut p_target = Vec::with_capacity(steps);
    let mut stable = Vec::with_capacity(steps);
    let mut optimal = Vec::with_capacity(steps);
    let mut p_success = Vec::with_capacity(steps);

    let mut best_stable = StableOptimum {
        unitary_steps: 0,
        speed: f64::INFINITY,
    };
    let mut best_quantum = best_stable;
    let mut best_optimal = OptimalOptimum {
        unitary_steps: 0,
        radius: 0,
        speed: f64::INFINITY,
        p_success: 0.0,
    };

    for u in 0..steps {
        if u > 0 {
            walker.step();
        }
        walker.probabilities_into(&mut probs);
        let pf = probs[target.0];
        p_target.push(pf);

        let s = u as f64 + model.expected_classical_steps(&probs);
        if s < best_stable.speed {
            best_stable = StableOptimum {
                unitary_steps: u,
                speed: s,
            };
        }
        stable.push(s);

        model.radius_sums(&probs, max_radius, &mut sums);
        if u == 0 {
            optimal.push(vec![f64::INFINITY; max_radius + 1]);
        } else {
            let row: Vec<f64> = (0..=max_radius).map(|r| sums.optimal_speed(u, r)).collect();
            for (r, &speed) in row.iter().enumerate() {
                if speed < best_optimal.speed {
                    best_optimal = OptimalOptimum {
                        unitary_steps: u,
                        radius: r,
                        speed,
                        p_success: sums.p_success[r],
                    };
                }
            }
            // The unbounded search (the stable hybrid) closes the radius family
            // when max_radius stops short of the eccentricity of F.
            let full = model.max_distance();
            if max_radius < full && s < best_optimal.speed {
                best_optimal = OptimalOptimum {
                    unitary_steps: u,
                    radius: full,
                    speed: s,
                    p_success: 1.0,
                };
            }
            optimal.push(row);
            if pf > 0.0 && (u as f64 / pf) < best_quantum.speed {
                best_quantum = StableOptimum {
                    unitary_steps: u,
                    speed: u as f64 / pf,
                };
            }
        }
        p_success.push(sums.p_success.clone());
    }

    Ok(SweepResult {
        target: g.coord(target),
        config,
        p_target,
        stable,
        optimal,
        p_success,
        best_stable,
        best_optimal,
        best_quantum,
    })
}
