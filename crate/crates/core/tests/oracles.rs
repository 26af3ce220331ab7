mod common;

use common::{mean_and_se, truncated_series, DenseWalk, OpenGrid};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sqrw_core::geometry::place_random_walls;
use sqrw_core::search::{expected_bfs_steps, geometric_closed_form, quantum_speed, BallSizes, StepModel};
use sqrw_core::{Coord, Geometry, MarkedSet, NodeId, WalkState, Walker};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[test]
fn bfs_expectation_matches_shuffled_search() {
    let mut r = rng(11);
    let open = Geometry::grid(9).unwrap();
    let walled = place_random_walls(&open, 30, &mut r).unwrap();
    for g in [&open, &walled] {
        let oracle = OpenGrid::from_geometry(g);
        for (s, f) in [((1, 1), (9, 9)), ((5, 5), (5, 6)), ((2, 7), (8, 3)), ((4, 4), (4, 4))] {
            let start = g.node(Coord::planar(s.0, s.1)).unwrap();
            let target = g.node(Coord::planar(f.0, f.1)).unwrap();
            let trials: Vec<f64> = (0..10_000)
                .map(|_| oracle.randomized_bfs(start.index(), target.index(), None, &mut r).0 as f64)
                .collect();
            let (mean, se) = mean_and_se(&trials);
            let exact = expected_bfs_steps(g, start, target);
            assert!((mean - exact).abs() <= 2.0 * se.max(1e-12), "{s:?}->{f:?}: {mean} ± {se} vs {exact}");
            assert_eq!(exact, oracle.average_rank(start.index(), target.index()));
        }
    }
}

#[test]
fn adjacent_interior_target_takes_two_and_a_half() {
    let g = Geometry::grid(5).unwrap();
    let v = |x, y| g.node(Coord::planar(x, y)).unwrap();
    assert_eq!(expected_bfs_steps(&g, v(3, 3), v(3, 4)), 2.5);
}

#[test]
fn step_model_agrees_with_reference_ranks_on_walled_grid() {
    let g = place_random_walls(&Geometry::grid(12).unwrap(), 90, &mut rng(3)).unwrap();
    let balls = BallSizes::compute(&g);
    let oracle = OpenGrid::from_geometry(&g);
    let f = g.node(Coord::planar(4, 9)).unwrap();
    let model = StepModel::new(&g, &balls, f);
    for v in g.nodes() {
        assert_eq!(model.expected_steps(v), oracle.average_rank(v.index(), f.index()));
        let dist = oracle.distances(v.index());
        for r in 0..6 {
            assert_eq!(model.ball_size(v, r), dist.iter().filter(|&&d| d <= r).count());
        }
    }
}

#[test]
fn quantum_speed_matches_repeated_trials() {
    let mut r = rng(5);
    let costs: Vec<f64> = (0..20_000)
        .map(|_| {
            let mut k = 1;
            while !r.gen_bool(0.5) {
                k += 1;
            }
            10.0 * k as f64
        })
        .collect();
    let (mean, se) = mean_and_se(&costs);
    let exact = quantum_speed(0.5, 10).unwrap();
    assert_eq!(exact, 20.0);
    assert!((mean - exact).abs() <= 3.0 * se);
}

#[test]
fn closed_form_matches_series() {
    let mut r = rng(8);
    assert_eq!(geometric_closed_form(0.0, 1.0, 0.5).unwrap(), 2.0);
    assert_eq!(geometric_closed_form(3.0, 7.0, 0.0).unwrap(), 7.0);
    for _ in 0..200 {
        let (a, b, p) = (r.gen_range(0.0..500.0), r.gen_range(0.0..500.0), r.gen_range(0.0..0.99));
        let exact = geometric_closed_form(a, b, p).unwrap();
        let series = truncated_series(a, b, p, 10_000);
        assert!((exact - series).abs() <= 1e-8 * exact.abs().max(1e-300), "{a} {b} {p}");
    }
}

#[test]
fn walk_matches_dense_operator() {
    let mut r = rng(13);
    for n in [2, 3, 4] {
        let g = Geometry::grid(n).unwrap();
        let grid = OpenGrid::new(&g);
        for marked in [vec![], vec![0], vec![1, n * n - 1]] {
            let dense = DenseWalk::new(&grid, &marked);
            assert!(dense.unitarity_defect() < 1e-12);
            let set: MarkedSet = marked.iter().map(|&i| NodeId(i)).collect();

            let mut psi: Vec<Complex64> = (0..dense.states.len())
                .map(|_| Complex64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)))
                .collect();
            let mut amps = vec![Complex64::new(0.0, 0.0); g.state_count()];
            for (k, &(a, b)) in dense.states.iter().enumerate() {
                amps[g.state_index(NodeId(a), NodeId(b)).unwrap()] = psi[k];
            }
            let mut walker = Walker::from_state(&g, &set, WalkState::from_amplitudes(amps)).unwrap();
            for _ in 0..25 {
                psi = dense.apply(&psi);
                walker.step();
                for (k, &(a, b)) in dense.states.iter().enumerate() {
                    let lib = walker.amplitudes()[g.state_index(NodeId(a), NodeId(b)).unwrap()];
                    assert!((lib - psi[k]).norm() < 1e-12);
                }
            }
        }
    }
}
