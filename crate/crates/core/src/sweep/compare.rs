use serde::{Deserialize, Serialize};

use super::{sweep_with_balls, SweepConfig, SweepSummary};
use crate::error::{Error, Result};
use crate::geometry::{Coord, Geometry};
use crate::search::BallSizes;
use crate::walk::{radial_profile, MarkedSet, ProbabilityField, Walker};

/// The node nearest `[N/4, N/4]` (or `[N/4, N/4, N/4]`).
pub fn quarter_target(g: &Geometry) -> Coord {
    let q = ((g.side() as f64 / 4.0).round() as usize).max(1);
    if g.dims() == 2 {
        Coord::planar(q, q)
    } else {
        Coord::cubic(q, q, q)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrendPoint {
    pub n: usize,
    pub summary: SweepSummary,
    /// Classical average `N²/2`.
    pub classical: f64,
    /// Quadratic-speedup reference `sqrt(N²/2)`.
    pub reference: f64,
}

/// Fastest stable and optimal speeds per grid size, with `F` near `[N/4, N/4]`.
pub fn grid_size_trend(sizes: &[usize]) -> Result<Vec<TrendPoint>> {
    sizes
        .iter()
        .map(|&n| {
            if n < 4 {
                return Err(Error::InvalidSize { n, min: 4 });
            }
            let g = Geometry::grid(n)?;
            let f = g.node(quarter_target(&g))?;
            let balls = BallSizes::compute(&g);
            let sweep = sweep_with_balls(&g, &balls, &MarkedSet::single(f), f, SweepConfig::open(&g))?;
            let classical = (n * n) as f64 / 2.0;
            Ok(TrendPoint {
                n,
                summary: sweep.summary(),
                classical,
                reference: classical.sqrt(),
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeComparison {
    pub grid_n: usize,
    pub lattice_n: usize,
    pub grid_nodes: usize,
    pub lattice_nodes: usize,
    pub grid: SweepSummary,
    pub lattice: SweepSummary,
    /// `P(r)` at each geometry's fastest stable moment.
    pub grid_cumulative: Vec<f64>,
    pub lattice_cumulative: Vec<f64>,
}

/// Grid versus cubic lattice at similar node totals, `F` at the quarter point
/// of each.
pub fn lattice_vs_grid(pairs: &[(usize, usize)]) -> Result<Vec<LatticeComparison>> {
    pairs
        .iter()
        .map(|&(grid_n, lattice_n)| {
            let grid = Geometry::grid(grid_n)?;
            let lattice = Geometry::lattice(lattice_n)?;
            let (grid_summary, grid_cumulative) = best_stable_moment(&grid)?;
            let (lattice_summary, lattice_cumulative) = best_stable_moment(&lattice)?;
            Ok(LatticeComparison {
                grid_n,
                lattice_n,
                grid_nodes: grid.node_count(),
                lattice_nodes: lattice.node_count(),
                grid: grid_summary,
                lattice: lattice_summary,
                grid_cumulative,
                lattice_cumulative,
            })
        })
        .collect()
}

fn best_stable_moment(g: &Geometry) -> Result<(SweepSummary, Vec<f64>)> {
    let f = g.node(quarter_target(g))?;
    let balls = BallSizes::compute(g);
    let marked = MarkedSet::single(f);
    let sweep = sweep_with_balls(g, &balls, &marked, f, SweepConfig::open(g))?;
    let mut walker = Walker::new(g, &marked)?;
    walker.advance(sweep.best_stable.unitary_steps);
    let p: ProbabilityField = walker.probabilities();
    Ok((sweep.summary(), radial_profile(&p, g, f).cumulative))
}
