//! Blind search: one `(U_s, r)` choice for an unknown target location.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{sweep_with_balls, SweepConfig, SweepSummary};
use crate::error::{Error, Result};
use crate::geometry::{unique_octant_nodes, Geometry, SymmetryClass};
use crate::search::{BallSizes, RadiusSums, StepModel};
use crate::walk::{MarkedSet, Walker};

/// Preparation steps and radius fixed in advance of knowing `F`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlindPlan {
    pub stable_steps: usize,
    pub optimal_steps: usize,
    pub optimal_radius: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassOptimum {
    pub class: SymmetryClass,
    pub summary: SweepSummary,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlindPlanReport {
    pub plan: BlindPlan,
    pub mean_stable_steps: f64,
    pub mean_optimal_steps: f64,
    pub mean_optimal_radius: f64,
    pub classes: Vec<ClassOptimum>,
}

fn check_size(n: usize) -> Result<()> {
    if n < 4 {
        return Err(Error::InvalidSize { n, min: 4 });
    }
    Ok(())
}

/// Sweeps every symmetry class of the `n × n` grid and averages the per-class
/// optima, weighted by orbit size, rounding to the nearest integer.
pub fn blind_plan(n: usize, config: Option<SweepConfig>) -> Result<BlindPlanReport> {
    check_size(n)?;
    let g = Geometry::grid(n)?;
    let config = config.unwrap_or_else(|| SweepConfig::open(&g));
    let balls = BallSizes::compute(&g);
    let classes = unique_octant_nodes(n)?;
    let classes = classes
        .par_iter()
        .map(|&class| {
            let f = g.node(class.representative)?;
            let sweep = sweep_with_balls(&g, &balls, &MarkedSet::single(f), f, config)?;
            Ok(ClassOptimum {
                class,
                summary: sweep.summary(),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let total = (n * n) as f64;
    let weighted = |f: &dyn Fn(&ClassOptimum) -> usize| {
        classes
            .iter()
            .map(|c| (c.class.multiplicity * f(c)) as f64)
            .sum::<f64>()
            / total
    };
    let mean_stable_steps = weighted(&|c| c.summary.best_stable.unitary_steps);
    let mean_optimal_steps = weighted(&|c| c.summary.best_optimal.unitary_steps);
    let mean_optimal_radius = weighted(&|c| c.summary.best_optimal.radius);
    Ok(BlindPlanReport {
        plan: BlindPlan {
            stable_steps: mean_stable_steps.round() as usize,
            optimal_steps: mean_optimal_steps.round() as usize,
            optimal_radius: mean_optimal_radius.round() as usize,
        },
        mean_stable_steps,
        mean_optimal_steps,
        mean_optimal_radius,
        classes,
    })
}

/// Speeds obtained by one symmetry class under a fixed plan.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlindRecord {
    pub class: SymmetryClass,
    pub stable_speed: f64,
    pub optimal_speed: f64,
    /// `P(r = optimal_radius)` at `optimal_steps`.
    pub p_success: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlindEvaluation {
    pub plan: BlindPlan,
    pub stable_mean: f64,
    pub optimal_mean: f64,
    pub mean_success: f64,
    pub records: Vec<BlindRecord>,
}

/// Scores a fixed plan for every possible target location.
pub fn blind_evaluate(n: usize, plan: BlindPlan) -> Result<BlindEvaluation> {
    check_size(n)?;
    let g = Geometry::grid(n)?;
    let balls = BallSizes::compute(&g);
    let classes = unique_octant_nodes(n)?;
    let records = classes
        .par_iter()
        .map(|&class| evaluate_target(&g, &balls, class, plan))
        .collect::<Result<Vec<_>>>()?;

    let total = (n * n) as f64;
    let weighted = |f: &dyn Fn(&BlindRecord) -> f64| {
        records
            .iter()
            .map(|r| r.class.multiplicity as f64 * f(r))
            .sum::<f64>()
            / total
    };
    Ok(BlindEvaluation {
        plan,
        stable_mean: weighted(&|r| r.stable_speed),
        optimal_mean: weighted(&|r| r.optimal_speed),
        mean_success: weighted(&|r| r.p_success),
        records,
    })
}

fn evaluate_target(g: &Geometry, balls: &BallSizes, class: SymmetryClass, plan: BlindPlan) -> Result<BlindRecord> {
    let f = g.node(class.representative)?;
    let model = StepModel::new(g, balls, f);
    let mut walker = Walker::new(g, &MarkedSet::single(f))?;
    let mut probs = Vec::new();
    let mut stable_speed = f64::NAN;
    let mut optimal_speed = f64::NAN;
    let mut p_success = f64::NAN;
    for u in 0..=plan.stable_steps.max(plan.optimal_steps) {
        if u > 0 {
            walker.step();
        }
        if u == plan.stable_steps {
            walker.probabilities_into(&mut probs);
            stable_speed = u as f64 + model.expected_classical_steps(&probs);
        }
        if u == plan.optimal_steps {
            walker.probabilities_into(&mut probs);
            let mut sums = RadiusSums::default();
            model.radius_sums(&probs, plan.optimal_radius, &mut sums);
            optimal_speed = sums.optimal_speed(u, plan.optimal_radius);
            p_success = sums.p_success[plan.optimal_radius];
        }
    }
    Ok(BlindRecord {
        class,
        stable_speed,
        optimal_speed,
        p_success,
    })
}
