//! Randomized wall and maze ensembles.
//!
//! Sample `i` at wall count `w` draws its walls from the ChaCha stream
//! `(w << 32) | i` of the master seed, so results do not depend on evaluation
//! order, thread count, or which other wall counts are requested.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::stats::mean_std;
use super::{sweep_with_balls, SweepConfig};
use crate::error::{Error, Result};
use crate::geometry::{max_wall_count, place_random_walls, Coord, Geometry};
use crate::search::BallSizes;
use crate::walk::MarkedSet;

/// Outcome of one random geometry.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub wall_count: usize,
    pub sample_id: usize,
    pub stable_speed: f64,
    pub stable_steps: usize,
    pub optimal_speed: f64,
    pub optimal_steps: usize,
    pub optimal_radius: usize,
    /// Expected cost of the classical search alone on this geometry.
    pub classical_speed: f64,
    pub failed: bool,
}

/// Statistics for one wall count, over successful samples only.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleStats {
    pub wall_count: usize,
    pub samples: usize,
    pub failures: usize,
    pub failure_percent: f64,
    pub stable_mean: f64,
    pub stable_std: f64,
    pub optimal_mean: f64,
    pub optimal_std: f64,
}

impl EnsembleStats {
    fn from_records(wall_count: usize, records: &[SampleRecord]) -> Self {
        let ok = records.iter().filter(|r| !r.failed);
        let (stable_mean, stable_std) = mean_std(ok.clone().map(|r| (r.stable_speed, 1.0)));
        let (optimal_mean, optimal_std) = mean_std(ok.map(|r| (r.optimal_speed, 1.0)));
        let failures = records.iter().filter(|r| r.failed).count();
        EnsembleStats {
            wall_count,
            samples: records.len(),
            failures,
            failure_percent: 100.0 * failures as f64 / records.len().max(1) as f64,
            stable_mean,
            stable_std,
            optimal_mean,
            optimal_std,
        }
    }

    pub fn successes(&self) -> usize {
        self.samples - self.failures
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleReport {
    pub n: usize,
    pub target: Coord,
    pub seed: u64,
    pub stats: Vec<EnsembleStats>,
    pub records: Vec<SampleRecord>,
}

fn sample_rng(seed: u64, wall_count: usize, sample_id: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((wall_count as u64) << 32) | sample_id as u64);
    rng
}

/// Geometry of sample `sample_id` at `wall_count` walls, as drawn by
/// [`walls_ensemble`] with the same seed.
pub fn sample_geometry(n: usize, wall_count: usize, sample_id: usize, seed: u64) -> Result<Geometry> {
    let grid = Geometry::grid(n)?;
    place_random_walls(&grid, wall_count, &mut sample_rng(seed, wall_count, sample_id))
}

fn run_sample(
    grid: &Geometry,
    target: Coord,
    wall_count: usize,
    sample_id: usize,
    seed: u64,
    config: SweepConfig,
) -> Result<SampleRecord> {
    let mut rng = sample_rng(seed, wall_count, sample_id);
    let g = place_random_walls(grid, wall_count, &mut rng)?;
    let f = g.node(target)?;
    let balls = BallSizes::compute(&g);
    let sweep = sweep_with_balls(&g, &balls, &MarkedSet::single(f), f, config)?;
    let classical_half = g.node_count() as f64 / 2.0;
    let best = sweep.best_stable.speed.min(sweep.best_optimal.speed);
    Ok(SampleRecord {
        wall_count,
        sample_id,
        stable_speed: sweep.best_stable.speed,
        stable_steps: sweep.best_stable.unitary_steps,
        optimal_speed: sweep.best_optimal.speed,
        optimal_steps: sweep.best_optimal.unitary_steps,
        optimal_radius: sweep.best_optimal.radius,
        classical_speed: sweep.stable[0],
        failed: best >= classical_half,
    })
}

/// Sweeps `samples` random walled `n × n` grids for every wall count.
pub fn walls_ensemble(
    n: usize,
    target: Coord,
    wall_counts: &[usize],
    samples: usize,
    seed: u64,
    config: Option<SweepConfig>,
) -> Result<EnsembleReport> {
    let grid = Geometry::grid(n)?;
    grid.node(target)?;
    let max = max_wall_count(&grid);
    if let Some(&bad) = wall_counts.iter().find(|&&w| w > max) {
        return Err(Error::TooManyWalls { requested: bad, max });
    }
    let config = config.unwrap_or_else(|| SweepConfig::walled(n));
    let tasks: Vec<(usize, usize)> = wall_counts
        .iter()
        .flat_map(|&w| (0..samples).map(move |i| (w, i)))
        .collect();
    let records = tasks
        .par_iter()
        .map(|&(w, i)| run_sample(&grid, target, w, i, seed, config))
        .collect::<Result<Vec<_>>>()?;
    let stats = wall_counts
        .iter()
        .enumerate()
        .map(|(k, &w)| EnsembleStats::from_records(w, &records[k * samples..(k + 1) * samples]))
        .collect();
    Ok(EnsembleReport {
        n,
        target,
        seed,
        stats,
        records,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MazeReport {
    pub n: usize,
    pub target: Coord,
    pub seed: u64,
    pub stats: EnsembleStats,
    /// Count of samples per best stable `U_s`.
    pub best_steps_histogram: BTreeMap<usize, usize>,
    pub records: Vec<SampleRecord>,
}

impl MazeReport {
    /// Most common best stable `U_s` (smallest on ties).
    pub fn best_steps_mode(&self) -> Option<usize> {
        let mut best: Option<(usize, usize)> = None;
        for (&steps, &count) in &self.best_steps_histogram {
            if best.is_none_or(|(_, c)| count > c) {
                best = Some((steps, count));
            }
        }
        best.map(|(steps, _)| steps)
    }
}

/// Perfect-maze ensemble. Sample `i` is the same geometry as sample `i` of
/// [`walls_ensemble`] at the maximum wall count `(n − 1)²`.
pub fn maze_study(n: usize, target: Coord, samples: usize, seed: u64, config: Option<SweepConfig>) -> Result<MazeReport> {
    if n < 4 {
        return Err(Error::InvalidSize { n, min: 4 });
    }
    let max = (n - 1) * (n - 1);
    let report = walls_ensemble(n, target, &[max], samples, seed, config)?;
    let mut best_steps_histogram = BTreeMap::new();
    for r in &report.records {
        *best_steps_histogram.entry(r.stable_steps).or_insert(0) += 1;
    }
    Ok(MazeReport {
        n,
        target,
        seed,
        stats: report.stats[0],
        best_steps_histogram,
        records: report.records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sweep::sweep_single_f;

    fn small() -> SweepConfig {
        SweepConfig {
            max_steps: 40,
            max_radius: 8,
        }
    }

    #[test]
    fn zero_walls_is_the_open_sweep() {
        let target = Coord::planar(3, 4);
        let report = walls_ensemble(8, target, &[0], 3, 5, Some(small())).unwrap();
        let g = Geometry::grid(8).unwrap();
        let open = sweep_single_f(&g, g.node(target).unwrap(), small()).unwrap();
        for r in &report.records {
            assert_eq!(r.stable_speed, open.best_stable.speed);
            assert_eq!(r.optimal_speed, open.best_optimal.speed);
        }
        assert_eq!(report.stats[0].stable_std, 0.0);
    }

    #[test]
    fn stats_reconcile_with_records() {
        let report = walls_ensemble(8, Coord::planar(2, 3), &[0, 20, 49], 6, 1, Some(small())).unwrap();
        assert_eq!(report.records.len(), 18);
        for (k, s) in report.stats.iter().enumerate() {
            let chunk = &report.records[k * 6..(k + 1) * 6];
            assert!(chunk.iter().all(|r| r.wall_count == s.wall_count));
            let failed = chunk.iter().filter(|r| r.failed).count();
            assert_eq!(s.failures, failed);
            assert_eq!(s.failures + s.successes(), s.samples);
            for r in chunk {
                assert_eq!(r.failed, r.stable_speed.min(r.optimal_speed) >= 32.0);
                assert!(r.stable_speed <= r.classical_speed);
            }
        }
    }

    #[test]
    fn independent_of_thread_count_and_request_order() {
        let run = |threads: usize, counts: &[usize]| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| walls_ensemble(7, Coord::planar(2, 2), counts, 4, 9, Some(small())).unwrap())
        };
        let a = run(1, &[10, 30]);
        let b = run(3, &[30, 10]);
        assert_eq!(a.records[..4], b.records[4..]);
        assert_eq!(a.records[4..], b.records[..4]);
    }

    #[test]
    fn sample_geometry_reproduces_ensemble_member() {
        let config = small();
        let report = walls_ensemble(7, Coord::planar(3, 3), &[12], 3, 4, Some(config)).unwrap();
        let g = sample_geometry(7, 12, 2, 4).unwrap();
        let f = g.node(Coord::planar(3, 3)).unwrap();
        let sweep = crate::sweep::sweep_single_f(&g, f, config).unwrap();
        assert_eq!(g.wall_count(), 12);
        assert_eq!(sweep.best_stable.speed, report.records[2].stable_speed);
    }

    #[test]
    fn maze_samples_match_full_wall_ensemble() {
        let maze = maze_study(6, Coord::planar(2, 2), 4, 3, Some(small())).unwrap();
        let walls = walls_ensemble(6, Coord::planar(2, 2), &[25], 4, 3, Some(small())).unwrap();
        assert_eq!(maze.records, walls.records);
        assert_eq!(maze.best_steps_histogram.values().sum::<usize>(), 4);
    }

    #[test]
    fn too_many_walls_rejected() {
        let err = walls_ensemble(40, Coord::planar(10, 15), &[1522], 1, 0, None).unwrap_err();
        assert!(matches!(err, Error::TooManyWalls { requested: 1522, max: 1521 }));
    }

    #[test]
    fn mode_prefers_smallest_on_ties() {
        let report = MazeReport {
            n: 4,
            target: Coord::planar(1, 1),
            seed: 0,
            stats: EnsembleStats::from_records(9, &[]),
            best_steps_histogram: BTreeMap::from([(0, 2), (5, 2), (7, 1)]),
            records: vec![],
        };
        assert_eq!(report.best_steps_mode(), Some(0));
    }
}
