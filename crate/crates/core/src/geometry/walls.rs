use rand::Rng;

use super::Geometry;
use crate::error::{Error, Result};

/// Largest number of walls that keeps `g` connected: `E − (V − 1)` on top of
/// the walls already present.
pub fn max_wall_count(g: &Geometry) -> usize {
    g.edge_count() + 1 - g.node_count()
}

/// Removes `count` edges, each drawn uniformly from the edges that are not
/// bridges at the time of the draw.
pub fn place_random_walls<R: Rng + ?Sized>(g: &Geometry, count: usize, rng: &mut R) -> Result<Geometry> {
    let max = max_wall_count(g);
    if count > max {
        return Err(Error::TooManyWalls {
            requested: count,
            max,
        });
    }
    if count == 0 {
        return Ok(g.clone());
    }
    let mut graph = EdgeGraph::new(g);
    let mut removed = Vec::with_capacity(count);
    let mut candidates = Vec::with_capacity(graph.edges.len());
    for _ in 0..count {
        let bridges = graph.bridges();
        candidates.clear();
        candidates.extend((0..graph.edges.len()).filter(|&e| graph.alive[e] && !bridges[e]));
        let pick = candidates[rng.gen_range(0..candidates.len())];
        graph.alive[pick] = false;
        removed.push(graph.edges[pick]);
    }
    Ok(g.with_extra_walls(removed))
}

/// Random spanning tree of the open `n × n` grid, produced by walling the grid
/// up to its maximum wall count `(n − 1)²`.
pub fn generate_perfect_maze<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Geometry> {
    let grid = Geometry::grid(n)?;
    let max = max_wall_count(&grid);
    place_random_walls(&grid, max, rng)
}

/// Mutable edge-list view used while walls are being placed.
struct EdgeGraph {
    edges: Vec<(usize, usize)>,
    alive: Vec<bool>,
    /// Per node: `(neighbor, edge id)`.
    adjacency: Vec<Vec<(usize, usize)>>,
}

impl EdgeGraph {
    fn new(g: &Geometry) -> Self {
        let edges: Vec<(usize, usize)> = g.edges().into_iter().map(|(a, b)| (a.0, b.0)).collect();
        let mut adjacency = vec![Vec::new(); g.node_count()];
        for (id, &(a, b)) in edges.iter().enumerate() {
            adjacency[a].push((b, id));
            adjacency[b].push((a, id));
        }
        EdgeGraph {
            alive: vec![true; edges.len()],
            edges,
            adjacency,
        }
    }

    /// Bridge flags per edge id (Tarjan low-link, iterative).
    fn bridges(&self) -> Vec<bool> {
        const UNSEEN: usize = usize::MAX;
        let n = self.adjacency.len();
        let mut bridge = vec![false; self.edges.len()];
        let mut disc = vec![UNSEEN; n];
        let mut low = vec![0usize; n];
        let mut time = 0;
        // (node, edge used to enter it, next adjacency position)
        let mut stack: Vec<(usize, usize, usize)> = Vec::new();
        for root in 0..n {
            if disc[root] != UNSEEN {
                continue;
            }
            disc[root] = time;
            low[root] = time;
            time += 1;
            stack.push((root, UNSEEN, 0));
            while let Some(top) = stack.last_mut() {
                let (v, parent_edge) = (top.0, top.1);
                if top.2 < self.adjacency[v].len() {
                    let (w, e) = self.adjacency[v][top.2];
                    top.2 += 1;
                    if !self.alive[e] || e == parent_edge {
                        continue;
                    }
                    if disc[w] == UNSEEN {
                        disc[w] = time;
                        low[w] = time;
                        time += 1;
                        stack.push((w, e, 0));
                    } else {
                        low[v] = low[v].min(disc[w]);
                    }
                } else {
                    stack.pop();
                    if let Some(&(p, _, _)) = stack.last() {
                        low[p] = low[p].min(low[v]);
                        if low[v] > disc[p] {
                            bridge[parent_edge] = true;
                        }
                    }
                }
            }
        }
        bridge
    }
}
