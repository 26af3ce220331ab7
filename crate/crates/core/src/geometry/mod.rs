//! Graph geometries: open grids, cubic lattices, walled grids and mazes.
//!
//! Node coordinates are 1-based (`[1,1]` is a corner). Nodes are indexed in
//! lexicographic coordinate order, so sorting by [`NodeId`] and sorting by
//! [`Coord`] agree.
//!
//! A [`Geometry`] also owns the directed edge index used as the walk basis.
//! The incoming states of node `v` occupy the contiguous block
//! [`Geometry::incoming_states`]`(v)`; state `k` in that block is `|u,v⟩`
//! where `u` is [`Geometry::source`]`(k)`, and [`Geometry::reverse`]`(k)` is
//! the index of `|v,u⟩`.

mod format;
mod symmetry;
mod walls;

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::ops::Range;

use serde::de::{self, Deserializer};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use format::GeometryFile;
pub use symmetry::{octant_class_count, unique_octant_nodes, Symmetry, SymmetryClass};
pub use walls::{generate_perfect_maze, max_wall_count, place_random_walls};

/// A node coordinate. Planar nodes carry `z == 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Coord {
    pub x: usize,
    pub y: usize,
    pub z: usize,
}

impl Coord {
    pub const fn planar(x: usize, y: usize) -> Self {
        Coord { x, y, z: 0 }
    }

    pub const fn cubic(x: usize, y: usize, z: usize) -> Self {
        Coord { x, y, z }
    }

    pub fn dims(&self) -> usize {
        if self.z == 0 {
            2
        } else {
            3
        }
    }

    fn components(&self) -> impl Iterator<Item = usize> {
        let dims = self.dims();
        [self.x, self.y, self.z].into_iter().take(dims)
    }

    /// Taxicab distance.
    pub fn manhattan(&self, other: &Coord) -> usize {
        self.x.abs_diff(other.x) + self.y.abs_diff(other.y) + self.z.abs_diff(other.z)
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.z == 0 {
            write!(f, "[{},{}]", self.x, self.y)
        } else {
            write!(f, "[{},{},{}]", self.x, self.y, self.z)
        }
    }
}

impl std::str::FromStr for Coord {
    type Err = String;

    /// Parses `40,50`, `[40,50]` or `3,4,5`.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let trimmed = s.trim().trim_start_matches('[').trim_end_matches(']');
        let parts = trimmed
            .split(',')
            .map(|p| p.trim().parse::<usize>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| format!("bad coordinate {s:?}: {e}"))?;
        match parts[..] {
            [x, y] => Ok(Coord::planar(x, y)),
            [x, y, z] => Ok(Coord::cubic(x, y, z)),
            _ => Err(format!("bad coordinate {s:?}: expected 2 or 3 components")),
        }
    }
}

impl Serialize for Coord {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.dims()))?;
        for c in self.components() {
            seq.serialize_element(&c)?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for Coord {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let parts = Vec::<usize>::deserialize(deserializer)?;
        if parts.iter().any(|&c| c == 0) {
            return Err(de::Error::custom("coordinates are 1-based"));
        }
        match parts[..] {
            [x, y] => Ok(Coord::planar(x, y)),
            [x, y, z] => Ok(Coord::cubic(x, y, z)),
            _ => Err(de::Error::invalid_length(parts.len(), &"2 or 3 coordinates")),
        }
    }
}

/// Index of a node inside one [`Geometry`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeId(pub usize);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

/// Immutable connected graph on an `N^dims` node set, together with its
/// directed edge index.
#[derive(Clone, Debug)]
pub struct Geometry {
    dims: usize,
    side: usize,
    offsets: Vec<usize>,
    sources: Vec<usize>,
    reverse: Vec<usize>,
    /// Removed lattice edges, canonical (`a < b`, sorted).
    walls: Vec<(usize, usize)>,
}

impl Geometry {
    /// Open `n × n` grid.
    pub fn grid(n: usize) -> Result<Self> {
        Self::with_walls(2, n, &[])
    }

    /// Open `n × n × n` cubic lattice.
    pub fn lattice(n: usize) -> Result<Self> {
        Self::with_walls(3, n, &[])
    }

    /// A grid or lattice with the listed edges removed.
    pub fn with_walls(dims: usize, n: usize, walls: &[(Coord, Coord)]) -> Result<Self> {
        if dims != 2 && dims != 3 {
            return Err(Error::InvalidDims(dims));
        }
        if n < 2 {
            return Err(Error::InvalidSize { n, min: 2 });
        }
        let mut removed = Vec::with_capacity(walls.len());
        for &(a, b) in walls {
            let ia = index_of(dims, n, &a)?;
            let ib = index_of(dims, n, &b)?;
            if a.manhattan(&b) != 1 {
                return Err(Error::EdgeNotFound(a, b));
            }
            removed.push((ia.min(ib), ia.max(ib)));
        }
        removed.sort_unstable();
        let before = removed.len();
        removed.dedup();
        if removed.len() != before {
            return Err(Error::Format("duplicate wall".into()));
        }
        let geometry = Self::assemble(dims, n, removed);
        if geometry.component_count() != 1 {
            return Err(Error::Format("walls disconnect the geometry".into()));
        }
        Ok(geometry)
    }

    fn assemble(dims: usize, side: usize, walls: Vec<(usize, usize)>) -> Self {
        let node_count = side.pow(dims as u32);
        let removed: HashSet<(usize, usize)> = walls.iter().copied().collect();
        let mut offsets = Vec::with_capacity(node_count + 1);
        let mut sources = Vec::with_capacity(2 * dims * node_count);
        offsets.push(0);
        for v in 0..node_count {
            for u in lattice_neighbors(dims, side, v) {
                if !removed.contains(&(u.min(v), u.max(v))) {
                    sources.push(u);
                }
            }
            offsets.push(sources.len());
        }
        let mut reverse = vec![0; sources.len()];
        for v in 0..node_count {
            for k in offsets[v]..offsets[v + 1] {
                let u = sources[k];
                let block = &sources[offsets[u]..offsets[u + 1]];
                let pos = block.binary_search(&v).expect("adjacency is symmetric");
                reverse[k] = offsets[u] + pos;
            }
        }
        Geometry {
            dims,
            side,
            offsets,
            sources,
            reverse,
            walls,
        }
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    /// Side length `N`.
    pub fn side(&self) -> usize {
        self.side
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.sources.len() / 2
    }

    /// Number of directed edge states, `2E`.
    pub fn state_count(&self) -> usize {
        self.sources.len()
    }

    /// Edge count of the wall-free grid or lattice of the same size.
    pub fn full_edge_count(&self) -> usize {
        let n = self.side;
        self.dims * n.pow(self.dims as u32 - 1) * (n - 1)
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.node_count()).map(NodeId)
    }

    #[inline]
    pub fn degree(&self, v: NodeId) -> usize {
        self.offsets[v.0 + 1] - self.offsets[v.0]
    }

    pub fn max_degree(&self) -> usize {
        self.nodes().map(|v| self.degree(v)).max().unwrap_or(0)
    }

    #[inline]
    pub fn neighbors(&self, v: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.sources[self.incoming_states(v)].iter().map(|&u| NodeId(u))
    }

    #[inline]
    pub(crate) fn neighbor_slice(&self, v: usize) -> &[usize] {
        &self.sources[self.offsets[v]..self.offsets[v + 1]]
    }

    /// State indices `|u,v⟩` entering `v`.
    #[inline]
    pub fn incoming_states(&self, v: NodeId) -> Range<usize> {
        self.offsets[v.0]..self.offsets[v.0 + 1]
    }

    /// The node a state leaves from.
    #[inline]
    pub fn source(&self, state: usize) -> NodeId {
        NodeId(self.sources[state])
    }

    /// Index of the oppositely directed state on the same edge.
    #[inline]
    pub fn reverse(&self, state: usize) -> usize {
        self.reverse[state]
    }

    pub(crate) fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub(crate) fn sources(&self) -> &[usize] {
        &self.sources
    }

    pub(crate) fn reverses(&self) -> &[usize] {
        &self.reverse
    }

    /// Index of `|from,to⟩`, if the two nodes are adjacent.
    pub fn state_index(&self, from: NodeId, to: NodeId) -> Option<usize> {
        let range = self.incoming_states(to);
        let start = range.start;
        self.sources[range]
            .binary_search(&from.0)
            .ok()
            .map(|pos| start + pos)
    }

    pub fn has_edge(&self, a: NodeId, b: NodeId) -> bool {
        self.state_index(a, b).is_some()
    }

    /// Undirected edges as `(a, b)` with `a < b`, sorted.
    pub fn edges(&self) -> Vec<(NodeId, NodeId)> {
        let mut edges = Vec::with_capacity(self.edge_count());
        for v in 0..self.node_count() {
            for &u in self.neighbor_slice(v) {
                if v < u {
                    edges.push((NodeId(v), NodeId(u)));
                }
            }
        }
        edges
    }

    /// Removed lattice edges, sorted.
    pub fn walls(&self) -> Vec<(NodeId, NodeId)> {
        self.walls.iter().map(|&(a, b)| (NodeId(a), NodeId(b))).collect()
    }

    pub fn wall_count(&self) -> usize {
        self.walls.len()
    }

    pub fn coord(&self, v: NodeId) -> Coord {
        let n = self.side;
        let i = v.0;
        if self.dims == 2 {
            Coord::planar(i / n + 1, i % n + 1)
        } else {
            Coord::cubic(i / (n * n) + 1, (i / n) % n + 1, i % n + 1)
        }
    }

    pub fn node(&self, c: Coord) -> Result<NodeId> {
        index_of(self.dims, self.side, &c).map(NodeId)
    }

    pub fn contains(&self, c: Coord) -> bool {
        self.node(c).is_ok()
    }

    /// Breadth-first graph distances from `source`, respecting walls.
    pub fn distances_from(&self, source: NodeId) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.node_count()];
        let mut queue = VecDeque::with_capacity(self.node_count());
        dist[source.0] = 0;
        queue.push_back(source.0);
        while let Some(v) = queue.pop_front() {
            let next = dist[v] + 1;
            for &u in self.neighbor_slice(v) {
                if dist[u] == u32::MAX {
                    dist[u] = next;
                    queue.push_back(u);
                }
            }
        }
        dist
    }

    pub fn component_count(&self) -> usize {
        let mut seen = vec![false; self.node_count()];
        let mut stack = Vec::new();
        let mut components = 0;
        for root in 0..self.node_count() {
            if seen[root] {
                continue;
            }
            components += 1;
            seen[root] = true;
            stack.push(root);
            while let Some(v) = stack.pop() {
                for &u in self.neighbor_slice(v) {
                    if !seen[u] {
                        seen[u] = true;
                        stack.push(u);
                    }
                }
            }
        }
        components
    }

    /// Returns a copy with the edge `{a, b}` walled off.
    pub fn remove_edge(&self, a: NodeId, b: NodeId) -> Result<Geometry> {
        if a.0 >= self.node_count() || b.0 >= self.node_count() || !self.has_edge(a, b) {
            return Err(Error::EdgeNotFound(
                self.coord_or_raw(a),
                self.coord_or_raw(b),
            ));
        }
        let mut walls = self.walls.clone();
        walls.push((a.0.min(b.0), a.0.max(b.0)));
        walls.sort_unstable();
        let candidate = Self::assemble(self.dims, self.side, walls);
        // The candidate graph is the bridge test: the edge was a bridge iff
        // the far endpoint is no longer reachable.
        if candidate.distances_from(a)[b.0] == u32::MAX {
            return Err(Error::WouldDisconnect(self.coord(a), self.coord(b)));
        }
        Ok(candidate)
    }

    pub(crate) fn with_extra_walls(&self, extra: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut walls = self.walls.clone();
        walls.extend(extra.into_iter().map(|(a, b)| (a.min(b), a.max(b))));
        walls.sort_unstable();
        Self::assemble(self.dims, self.side, walls)
    }

    fn coord_or_raw(&self, v: NodeId) -> Coord {
        if v.0 < self.node_count() {
            self.coord(v)
        } else {
            Coord::planar(v.0, 0)
        }
    }
}

fn index_of(dims: usize, n: usize, c: &Coord) -> Result<usize> {
    let in_range = |v: usize| (1..=n).contains(&v);
    let ok = c.dims() == dims && in_range(c.x) && in_range(c.y) && (dims == 2 || in_range(c.z));
    if !ok {
        return Err(Error::NodeOutOfRange(*c));
    }
    Ok(if dims == 2 {
        (c.x - 1) * n + (c.y - 1)
    } else {
        ((c.x - 1) * n + (c.y - 1)) * n + (c.z - 1)
    })
}

/// Neighbors of node `v` in the wall-free lattice, ascending.
fn lattice_neighbors(dims: usize, n: usize, v: usize) -> impl Iterator<Item = usize> {
    let mut out = [usize::MAX; 6];
    let mut len = 0;
    // Stride of each axis, most significant first.
    let strides: &[usize] = if dims == 2 { &[n, 1] } else { &[n * n, n, 1] };
    let mut lower = Vec::with_capacity(3);
    let mut upper = Vec::with_capacity(3);
    for &stride in strides {
        let pos = (v / stride) % n;
        if pos > 0 {
            lower.push(v - stride);
        }
        if pos + 1 < n {
            upper.push(v + stride);
        }
    }
    for u in lower.into_iter().chain(upper) {
        out[len] = u;
        len += 1;
    }
    out[..len].sort_unstable();
    out.into_iter().take(len)
}
