//! Classical breadth-first step models and the hybrid search speed formulas.
//!
//! Step-counting convention: the measured start node is free, and every
//! further node the breadth-first search checks (including the target) costs
//! one step. Ties inside the final BFS shell are resolved by a uniformly random
//! order, so the expected count for a target at distance `d` is
//! `c + (m + 1)/2`, where `c` counts the nodes strictly closer than `d`
//! (start excluded) and `m` the nodes at exactly `d`.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Geometry, NodeId};
use crate::walk::{ProbabilityField, RadialProfile};

/// `|{u : d(v, u) ≤ r}|` for every node `v` and every radius up to the
/// eccentricity of `v`.
#[derive(Clone, Debug)]
pub struct BallSizes {
    node_count: usize,
    offsets: Vec<usize>,
    counts: Vec<u32>,
}

impl BallSizes {
    /// One BFS per node.
    pub fn compute(g: &Geometry) -> Self {
        let n = g.node_count();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut counts = Vec::new();
        let mut dist = vec![u32::MAX; n];
        let mut queue = VecDeque::with_capacity(n);
        let mut visited = Vec::with_capacity(n);
        offsets.push(0);
        for source in 0..n {
            dist[source] = 0;
            queue.push_back(source);
            visited.clear();
            let row_start = counts.len();
            while let Some(v) = queue.pop_front() {
                visited.push(v);
                let d = dist[v] as usize;
                if row_start + d >= counts.len() {
                    counts.push(0);
                }
                counts[row_start + d] += 1;
                for &u in g.neighbor_slice(v) {
                    if dist[u] == u32::MAX {
                        dist[u] = dist[v] + 1;
                        queue.push_back(u);
                    }
                }
            }
            for &v in &visited {
                dist[v] = u32::MAX;
            }
            let mut acc = 0;
            for c in &mut counts[row_start..] {
                acc += *c;
                *c = acc;
            }
            offsets.push(counts.len());
        }
        BallSizes {
            node_count: n,
            offsets,
            counts,
        }
    }

    /// Cumulative ball sizes of `v` for `r = 0..=eccentricity(v)`.
    #[inline]
    pub fn row(&self, v: NodeId) -> &[u32] {
        &self.counts[self.offsets[v.0]..self.offsets[v.0 + 1]]
    }

    pub fn ball(&self, v: NodeId, r: usize) -> usize {
        self.row(v).get(r).map_or(self.node_count, |&c| c as usize)
    }

    /// Nodes at exactly distance `r` from `v`.
    pub fn shell(&self, v: NodeId, r: usize) -> usize {
        if r == 0 {
            1
        } else {
            self.ball(v, r) - self.ball(v, r - 1)
        }
    }

    pub fn eccentricity(&self, v: NodeId) -> usize {
        self.row(v).len() - 1
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }
}

/// Expected breadth-first steps from `start` until `target` is checked.
pub fn expected_bfs_steps(g: &Geometry, start: NodeId, target: NodeId) -> f64 {
    if start == target {
        return 0.0;
    }
    let dist = g.distances_from(start);
    let d = dist[target.0];
    let closer = dist.iter().filter(|&&x| x < d).count() - 1;
    let tied = dist.iter().filter(|&&x| x == d).count();
    closer as f64 + (tied as f64 + 1.0) / 2.0
}

/// Classical search model for one target `F` on one geometry.
#[derive(Clone, Debug)]
pub struct StepModel<'a> {
    target: NodeId,
    balls: &'a BallSizes,
    distance: Vec<u32>,
    expected: Vec<f64>,
}

impl<'a> StepModel<'a> {
    pub fn new(g: &Geometry, balls: &'a BallSizes, target: NodeId) -> Self {
        assert_eq!(balls.node_count(), g.node_count(), "ball table does not match geometry");
        let distance = g.distances_from(target);
        let expected = g
            .nodes()
            .map(|v| {
                let d = distance[v.0] as usize;
                if d == 0 {
                    0.0
                } else {
                    let closer = balls.ball(v, d - 1) - 1;
                    let tied = balls.shell(v, d);
                    closer as f64 + (tied as f64 + 1.0) / 2.0
                }
            })
            .collect();
        StepModel {
            target,
            balls,
            distance,
            expected,
        }
    }

    pub fn target(&self) -> NodeId {
        self.target
    }

    /// `S(v, F)`.
    pub fn expected_steps(&self, start: NodeId) -> f64 {
        self.expected[start.0]
    }

    pub fn expected_steps_all(&self) -> &[f64] {
        &self.expected
    }

    pub fn ball_size(&self, start: NodeId, r: usize) -> usize {
        self.balls.ball(start, r)
    }

    /// Graph distance from the target.
    pub fn distance(&self, v: NodeId) -> usize {
        self.distance[v.0] as usize
    }

    pub fn distances(&self) -> &[u32] {
        &self.distance
    }

    pub fn max_distance(&self) -> usize {
        self.distance.iter().copied().max().unwrap_or(0) as usize
    }

    /// Classical part of the stable hybrid: `Σ P(v)·S(v, F)`.
    pub fn expected_classical_steps(&self, p: &[f64]) -> f64 {
        p.iter().zip(&self.expected).map(|(p, s)| p * s).sum()
    }

    /// Per-radius aggregates of `p` for the bounded search, `r = 0..=max_radius`.
    pub fn radius_sums(&self, p: &[f64], max_radius: usize, out: &mut RadiusSums) {
        let len = max_radius + 1;
        out.reset(len);
        for ((v, &pv), (&d, &s)) in p.iter().enumerate().zip(self.distance.iter().zip(&self.expected)) {
            let d = d as usize;
            if d < len {
                out.p_success[d] += pv;
                out.success_steps[d] += pv * s;
            }
            // Searches from v that stop short of F exhaust their ball.
            let limit = d.min(len);
            let row = &self.balls.row(NodeId(v))[..limit];
            for (acc, &ball) in out.failure_steps[..limit].iter_mut().zip(row) {
                *acc += pv * (ball - 1) as f64;
            }
        }
        for r in 1..len {
            out.p_success[r] += out.p_success[r - 1];
            out.success_steps[r] += out.success_steps[r - 1];
        }
    }
}

/// Bounded-search aggregates for every radius `r`:
/// `P(r)`, `Σ_{d≤r} P·S` and `Σ_{d>r} P·(ball(v, r) − 1)`.
#[derive(Clone, Debug, Default)]
pub struct RadiusSums {
    pub p_success: Vec<f64>,
    pub success_steps: Vec<f64>,
    pub failure_steps: Vec<f64>,
}

impl RadiusSums {
    fn reset(&mut self, len: usize) {
        for v in [&mut self.p_success, &mut self.success_steps, &mut self.failure_steps] {
            v.clear();
            v.resize(len, 0.0);
        }
    }

    /// Expected total steps of the repeated bounded search with radius `r`:
    /// expected cost of one attempt divided by its success probability.
    pub fn optimal_speed(&self, unitary_steps: usize, r: usize) -> f64 {
        let p = self.p_success[r];
        if p <= 0.0 {
            return f64::INFINITY;
        }
        (unitary_steps as f64 + self.success_steps[r] + self.failure_steps[r]) / p
    }
}

/// Preparation steps and classical search radius.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HybridParams {
    pub unitary_steps: usize,
    pub radius: usize,
}

/// All three speeds for one `(U_s, r)` plus the components behind them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpeedReport {
    pub unitary_steps: usize,
    pub radius: usize,
    pub p_target: f64,
    pub p_success: f64,
    pub p_fail: f64,
    pub s_f: f64,
    pub s_max: f64,
    pub quantum_speed: Option<f64>,
    pub stable_speed: f64,
    pub optimal_speed: f64,
}

/// Purely quantum search: repeat preparation and measurement until `F` shows up.
pub fn quantum_speed(p_target: f64, unitary_steps: usize) -> Result<f64> {
    if !(p_target > 0.0 && p_target <= 1.0 + 1e-12) {
        return Err(Error::UndefinedSpeed("probability of measuring F is zero"));
    }
    Ok(unitary_steps as f64 / p_target)
}

/// One preparation, one measurement, then an exhaustive breadth-first search.
pub fn stable_hybrid_speed(p: &ProbabilityField, model: &StepModel<'_>, unitary_steps: usize) -> f64 {
    unitary_steps as f64 + model.expected_classical_steps(p.values())
}

/// `Σ_{k≥1} p^{k−1}·[A(k−1) + B] = (Ap − Bp + B)/(1 − p)²`.
pub fn geometric_closed_form(a: f64, b: f64, p: f64) -> Result<f64> {
    if p.abs() >= 1.0 || p.is_nan() {
        return Err(Error::DivergentSeries(p));
    }
    Ok((a * p - b * p + b) / ((1.0 - p) * (1.0 - p)))
}

/// Repeated bounded-radius hybrid search.
///
/// Attempt `k` succeeds after `k − 1` failures with probability
/// `P_success·P_fail^{k−1}` and costs `(U_s + S_max)(k − 1) + U_s + S_F`, so
/// the expected total is `P_success` times the geometric sum with
/// `A = U_s + S_max`, `B = U_s + S_F`, `p = P_fail`, which simplifies to
/// `[P_fail·(S_max − S_F) + U_s + S_F] / P_success`.
pub fn optimal_hybrid_speed(
    p: &ProbabilityField,
    profile: &RadialProfile,
    model: &StepModel<'_>,
    params: HybridParams,
) -> Result<SpeedReport> {
    let r = params.radius;
    let p_success = profile.within(r).min(1.0);
    if p_success <= 0.0 {
        return Err(Error::UndefinedSpeed("no probability within the search radius"));
    }
    let p_fail = (1.0 - p_success).max(0.0);

    let mut success_steps = 0.0;
    let mut failure_steps = 0.0;
    for v in (0..p.values().len()).map(NodeId) {
        let pv = p.get(v);
        if model.distance(v) <= r {
            success_steps += pv * model.expected_steps(v);
        } else {
            failure_steps += pv * (model.ball_size(v, r) - 1) as f64;
        }
    }
    let s_f = success_steps / p_success;
    let s_max = if p_fail > 0.0 { failure_steps / p_fail } else { 0.0 };

    let u = params.unitary_steps as f64;
    let optimal_speed = p_success * geometric_closed_form(u + s_max, u + s_f, p_fail)?;
    let p_target = p.get(model.target());
    Ok(SpeedReport {
        unitary_steps: params.unitary_steps,
        radius: r,
        p_target,
        p_success,
        p_fail,
        s_f,
        s_max,
        quantum_speed: quantum_speed(p_target, params.unitary_steps).ok(),
        stable_speed: stable_hybrid_speed(p, model, params.unitary_steps),
        optimal_speed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{place_random_walls, Coord};
    use crate::walk::{evolve, node_probabilities, radial_profile, MarkedSet};
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn start_equals_target_costs_nothing() {
        let g = Geometry::grid(5).unwrap();
        assert_eq!(expected_bfs_steps(&g, NodeId(7), NodeId(7)), 0.0);
    }

    #[test]
    fn adjacent_target_from_interior() {
        let g = Geometry::grid(5).unwrap();
        let start = g.node(Coord::planar(3, 3)).unwrap();
        let f = g.node(Coord::planar(3, 4)).unwrap();
        assert_eq!(expected_bfs_steps(&g, start, f), 2.5);
    }

    #[test]
    fn step_model_matches_direct_bfs() {
        let base = Geometry::grid(9).unwrap();
        let g = place_random_walls(&base, 30, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
        let balls = BallSizes::compute(&g);
        let f = g.node(Coord::planar(3, 7)).unwrap();
        let model = StepModel::new(&g, &balls, f);
        for v in g.nodes() {
            assert_eq!(model.expected_steps(v), expected_bfs_steps(&g, v, f));
            let dist = g.distances_from(v);
            for r in 0..20 {
                let brute = dist.iter().filter(|&&d| d as usize <= r).count();
                assert_eq!(model.ball_size(v, r), brute);
            }
        }
        assert_eq!(model.ball_size(f, 0), 1);
        assert_eq!(model.expected_steps(f), 0.0);
    }

    #[test]
    fn quantum_speed_values() {
        assert_eq!(quantum_speed(0.125, 140).unwrap(), 1120.0);
        assert_eq!(quantum_speed(1.0, 7).unwrap(), 7.0);
        assert_eq!(quantum_speed(0.5, 10).unwrap(), 20.0);
        assert!(matches!(quantum_speed(0.0, 10), Err(Error::UndefinedSpeed(_))));
    }

    #[test]
    fn closed_form_values() {
        assert_eq!(geometric_closed_form(0.0, 1.0, 0.5).unwrap(), 2.0);
        assert_eq!(geometric_closed_form(3.0, 4.5, 0.0).unwrap(), 4.5);
        assert!(matches!(geometric_closed_form(1.0, 1.0, 1.0), Err(Error::DivergentSeries(_))));
        assert!(geometric_closed_form(1.0, 1.0, -1.5).is_err());
    }

    /// Truncated `P_success·Σ p^{k−1}·Steps(k)`.
    fn hybrid_series(u: f64, s_max: f64, s_f: f64, p_success: f64, terms: usize) -> f64 {
        let p_fail = 1.0 - p_success;
        let mut total = 0.0;
        let mut weight = 1.0;
        for k in 1..=terms {
            let steps = (u + s_max) * (k - 1) as f64 + u + s_f;
            total += weight * steps;
            weight *= p_fail;
        }
        p_success * total
    }

    #[test]
    fn hand_example_against_series() {
        // U_s = 10, S_max = 5, S_F = 2, P_success = 1/2.
        let series = hybrid_series(10.0, 5.0, 2.0, 0.5, 1000);
        assert_relative_eq!(series, 27.0, max_relative = 1e-12);
        let closed = 0.5 * geometric_closed_form(15.0, 12.0, 0.5).unwrap();
        assert_relative_eq!(closed, series, max_relative = 1e-6);
        // The simplified form.
        assert_relative_eq!((0.5 * (5.0 - 2.0) + 10.0 + 2.0) / 0.5, series, max_relative = 1e-12);
    }

    proptest! {
        #[test]
        fn closed_form_matches_partial_sums(a in -50.0f64..50.0, b in -50.0f64..50.0, p in -0.99f64..0.99) {
            let mut sum = 0.0;
            let mut w = 1.0;
            for k in 1..=10_000 {
                sum += w * (a * (k - 1) as f64 + b);
                w *= p;
            }
            let closed = geometric_closed_form(a, b, p).unwrap();
            let scale = closed.abs().max(1.0);
            prop_assert!((closed - sum).abs() / scale < 1e-8, "closed {closed} series {sum}");
        }
    }

    fn evolved(n: usize, f: Coord, steps: usize) -> (Geometry, NodeId, ProbabilityField) {
        let g = Geometry::grid(n).unwrap();
        let f = g.node(f).unwrap();
        let p = node_probabilities(&evolve(&g, &MarkedSet::single(f), steps).unwrap(), &g);
        (g, f, p)
    }

    #[test]
    fn optimal_reduces_to_stable_without_failures() {
        let (g, f, p) = evolved(8, Coord::planar(3, 2), 9);
        let balls = BallSizes::compute(&g);
        let model = StepModel::new(&g, &balls, f);
        let profile = radial_profile(&p, &g, f);
        let full = profile.max_radius();
        let report = optimal_hybrid_speed(&p, &profile, &model, HybridParams { unitary_steps: 9, radius: full }).unwrap();
        assert_abs_diff_eq!(report.p_fail, 0.0, epsilon = 1e-12);
        assert_relative_eq!(report.optimal_speed, report.stable_speed, max_relative = 1e-9);
        assert_relative_eq!(report.optimal_speed, 9.0 + report.s_f, max_relative = 1e-9);
    }

    #[test]
    fn radius_sums_agree_with_report() {
        let (g, f, p) = evolved(10, Coord::planar(4, 6), 14);
        let balls = BallSizes::compute(&g);
        let model = StepModel::new(&g, &balls, f);
        let profile = radial_profile(&p, &g, f);
        let mut sums = RadiusSums::default();
        model.radius_sums(p.values(), 18, &mut sums);
        for r in 0..=18 {
            let report = optimal_hybrid_speed(&p, &profile, &model, HybridParams { unitary_steps: 14, radius: r }).unwrap();
            assert_relative_eq!(sums.optimal_speed(14, r), report.optimal_speed, max_relative = 1e-9);
            assert_relative_eq!(sums.p_success[r], report.p_success, max_relative = 1e-12);
            assert!(report.optimal_speed >= 14.0);
        }
        // r = 0 is the purely quantum search.
        let r0 = optimal_hybrid_speed(&p, &profile, &model, HybridParams { unitary_steps: 14, radius: 0 }).unwrap();
        assert_relative_eq!(r0.optimal_speed, r0.quantum_speed.unwrap(), max_relative = 1e-12);
    }

    #[test]
    fn concentrated_probability_costs_only_preparation() {
        let g = Geometry::grid(6).unwrap();
        let f = NodeId(8);
        let balls = BallSizes::compute(&g);
        let model = StepModel::new(&g, &balls, f);
        let mut values = vec![0.0; g.node_count()];
        values[f.0] = 1.0;
        let p = ProbabilityField::from_values(values);
        assert_eq!(stable_hybrid_speed(&p, &model, 17), 17.0);
    }

    #[test]
    fn uniform_stable_speed_is_brute_force_average() {
        let n = 7;
        let g = Geometry::grid(n).unwrap();
        let balls = BallSizes::compute(&g);
        let p = ProbabilityField::uniform(g.node_count());
        let mut grand = 0.0;
        for f in g.nodes() {
            let model = StepModel::new(&g, &balls, f);
            let brute: f64 = g.nodes().map(|v| expected_bfs_steps(&g, v, f)).sum::<f64>() / g.node_count() as f64;
            assert_relative_eq!(stable_hybrid_speed(&p, &model, 0), brute, max_relative = 1e-12);
            grand += brute;
        }
        // Averaged over targets as well, F's rank is uniform: (V − 1)/2.
        assert_relative_eq!(grand / g.node_count() as f64, (g.node_count() - 1) as f64 / 2.0, max_relative = 1e-12);
    }

    #[test]
    fn optimal_is_continuous_in_probability() {
        let (g, f, p) = evolved(10, Coord::planar(3, 4), 12);
        let balls = BallSizes::compute(&g);
        let model = StepModel::new(&g, &balls, f);
        let params = HybridParams { unitary_steps: 12, radius: 3 };
        let base = optimal_hybrid_speed(&p, &radial_profile(&p, &g, f), &model, params).unwrap().optimal_speed;
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for eps in [1e-2, 1e-3, 1e-4] {
            // Move eps of mass from a random node to another.
            use rand::Rng;
            let mut values = p.values().to_vec();
            let from = (0..values.len()).max_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap();
            let to = rng.gen_range(0..values.len());
            values[from] -= eps;
            values[to] += eps;
            let q = ProbabilityField::from_values(values);
            let moved = optimal_hybrid_speed(&q, &radial_profile(&q, &g, f), &model, params).unwrap().optimal_speed;
            // Lipschitz bound well above the ratio of steps to success probability.
            assert!((moved - base).abs() < eps * 1e4, "eps {eps}: {base} -> {moved}");
        }
    }

    #[test]
    fn zero_success_probability_is_an_error() {
        let g = Geometry::grid(4).unwrap();
        let balls = BallSizes::compute(&g);
        let f = NodeId(0);
        let model = StepModel::new(&g, &balls, f);
        let mut values = vec![0.0; 16];
        values[15] = 1.0;
        let p = ProbabilityField::from_values(values);
        let profile = radial_profile(&p, &g, f);
        let err = optimal_hybrid_speed(&p, &profile, &model, HybridParams { unitary_steps: 3, radius: 2 });
        assert!(matches!(err, Err(Error::UndefinedSpeed(_))));
    }
}
