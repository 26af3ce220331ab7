//! Reference implementations used by the integration tests. They rebuild the
//! walk and the classical searches from coordinates, without the library's
//! CSR tables or step model.

#![allow(dead_code)]

use num_complex::Complex64;
use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rand::Rng;
use sqrw_core::{Coord, Geometry};

/// Open planar grid adjacency indexed like the library's node ids.
pub struct OpenGrid {
    pub n: usize,
    pub adj: Vec<Vec<usize>>,
}

impl OpenGrid {
    pub fn new(g: &Geometry) -> Self {
        assert_eq!(g.dims(), 2);
        let n = g.side();
        let id = |x: usize, y: usize| g.node(Coord::planar(x, y)).unwrap().index();
        let mut adj = vec![Vec::new(); n * n];
        for x in 1..=n {
            for y in 1..=n {
                let here = id(x, y);
                if x > 1 {
                    adj[here].push(id(x - 1, y));
                }
                if x < n {
                    adj[here].push(id(x + 1, y));
                }
                if y > 1 {
                    adj[here].push(id(x, y - 1));
                }
                if y < n {
                    adj[here].push(id(x, y + 1));
                }
            }
        }
        OpenGrid { n, adj }
    }

    pub fn from_geometry(g: &Geometry) -> Self {
        let adj = g.nodes().map(|v| g.neighbors(v).map(|w| w.index()).collect()).collect();
        OpenGrid { n: g.side(), adj }
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn distances(&self, from: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.len()];
        dist[from] = 0;
        let mut queue = std::collections::VecDeque::from([from]);
        while let Some(u) = queue.pop_front() {
            for &w in &self.adj[u] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Average rank of `target` over uniformly shuffled BFS shells: nodes
    /// strictly closer than the target (start excluded) plus `(m + 1)/2`.
    pub fn average_rank(&self, start: usize, target: usize) -> f64 {
        if start == target {
            return 0.0;
        }
        let dist = self.distances(start);
        let d = dist[target];
        let closer = dist.iter().filter(|&&k| k > 0 && k < d).count();
        let shell = dist.iter().filter(|&&k| k == d).count();
        closer as f64 + (shell as f64 + 1.0) / 2.0
    }

    /// Breadth-first search with each shell visited in random order. Returns
    /// the number of nodes checked after the start and whether the target was
    /// found within `radius`.
    pub fn randomized_bfs<R: Rng>(&self, start: usize, target: usize, radius: Option<usize>, rng: &mut R) -> (u64, bool) {
        if start == target {
            return (0, true);
        }
        let mut seen = vec![false; self.len()];
        seen[start] = true;
        let mut layer = vec![start];
        let mut steps = 0;
        let mut depth = 0;
        loop {
            depth += 1;
            if radius.is_some_and(|r| depth > r) {
                return (steps, false);
            }
            let mut next = Vec::new();
            for &u in &layer {
                for &w in &self.adj[u] {
                    if !seen[w] {
                        seen[w] = true;
                        next.push(w);
                    }
                }
            }
            if next.is_empty() {
                return (steps, false);
            }
            next.shuffle(rng);
            for &w in &next {
                steps += 1;
                if w == target {
                    return (steps, true);
                }
            }
            layer = next;
        }
    }

    /// One full run of the repeated bounded hybrid search: prepare, measure,
    /// search within `radius`, start over on failure.
    pub fn hybrid_episode<R: Rng>(
        &self,
        measure: &WeightedIndex<f64>,
        target: usize,
        unitary_steps: u64,
        radius: usize,
        rng: &mut R,
    ) -> u64 {
        let mut cost = 0;
        loop {
            cost += unitary_steps;
            let start = measure.sample(rng);
            let (steps, found) = self.randomized_bfs(start, target, Some(radius), rng);
            cost += steps;
            if found {
                return cost;
            }
        }
    }
}

/// Dense global step operator over directed edges, built from the local
/// scattering rule `(2/n)J − I` (negated at marked nodes).
pub struct DenseWalk {
    /// Directed edges `(from, to)`, the basis order of `matrix`.
    pub states: Vec<(usize, usize)>,
    pub matrix: Vec<Vec<f64>>,
}

impl DenseWalk {
    pub fn new(grid: &OpenGrid, marked: &[usize]) -> Self {
        let mut states = Vec::new();
        for (u, nbrs) in grid.adj.iter().enumerate() {
            for &v in nbrs {
                states.push((u, v));
            }
        }
        let index = |a: usize, b: usize| states.iter().position(|&s| s == (a, b)).unwrap();
        let dim = states.len();
        let mut matrix = vec![vec![0.0; dim]; dim];
        for (col, &(u, v)) in states.iter().enumerate() {
            let n = grid.adj[v].len() as f64;
            let sign = if marked.contains(&v) { -1.0 } else { 1.0 };
            for &w in &grid.adj[v] {
                let kron = if w == u { 1.0 } else { 0.0 };
                matrix[index(v, w)][col] = sign * (2.0 / n - kron);
            }
        }
        DenseWalk { states, matrix }
    }

    pub fn apply(&self, psi: &[Complex64]) -> Vec<Complex64> {
        self.matrix
            .iter()
            .map(|row| row.iter().zip(psi).map(|(&m, &a)| a * m).sum())
            .collect()
    }

    /// Largest entry of `MᵀM − I`.
    pub fn unitarity_defect(&self) -> f64 {
        let dim = self.states.len();
        let mut worst: f64 = 0.0;
        for i in 0..dim {
            for j in 0..dim {
                let dot: f64 = (0..dim).map(|k| self.matrix[k][i] * self.matrix[k][j]).sum();
                let expected = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - expected).abs());
            }
        }
        worst
    }
}

/// `Σ_{k=1}^{terms} p^{k−1}·[A(k−1) + B]`.
pub fn truncated_series(a: f64, b: f64, p: f64, terms: usize) -> f64 {
    let mut sum = 0.0;
    let mut weight = 1.0;
    for k in 1..=terms {
        sum += weight * (a * (k - 1) as f64 + b);
        weight *= p;
    }
    sum
}

/// Sample mean and standard error.
pub fn mean_and_se(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}
