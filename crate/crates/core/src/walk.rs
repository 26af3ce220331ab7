//! The scattering walk: local coefficients, state evolution and measurement
//! probabilities.

use std::collections::BTreeSet;
use std::io::{Read, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Coord, Geometry, NodeId};

/// Reflection and transmission amplitudes of a degree-`n` node.
///
/// The local operator maps incoming `|j,A⟩` to `−r|A,j⟩ + t Σ_{i≠j} |A,i⟩`,
/// i.e. it is `(2/n)J − I`. A marked node uses the negation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScatterCoefficients {
    pub degree: usize,
    pub reflection: f64,
    pub transmission: f64,
}

impl ScatterCoefficients {
    pub fn for_degree(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::IsolatedNode);
        }
        let nf = n as f64;
        Ok(ScatterCoefficients {
            degree: n,
            reflection: (nf - 2.0) / nf,
            transmission: 2.0 / nf,
        })
    }

    /// Dense `n × n` local operator, rows indexed by outgoing edge and columns by
    /// incoming edge (same neighbor order).
    pub fn local_operator(&self, marked: bool) -> Vec<Vec<f64>> {
        let sign = if marked { -1.0 } else { 1.0 };
        (0..self.degree)
            .map(|i| {
                (0..self.degree)
                    .map(|j| {
                        if i == j {
                            -sign * self.reflection
                        } else {
                            sign * self.transmission
                        }
                    })
                    .collect()
            })
            .collect()
    }
}

/// Nodes whose scattering operator carries flipped signs.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkedSet(BTreeSet<NodeId>);

impl MarkedSet {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn single(f: NodeId) -> Self {
        MarkedSet([f].into_iter().collect())
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.0.contains(&v)
    }

    pub fn iter(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.0.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn mask(&self, g: &Geometry) -> Result<Vec<bool>> {
        let mut mask = vec![false; g.node_count()];
        for v in self.iter() {
            if v.0 >= g.node_count() {
                return Err(Error::NodeOutOfRange(Coord::planar(v.0, 0)));
            }
            mask[v.0] = true;
        }
        Ok(mask)
    }
}

impl FromIterator<NodeId> for MarkedSet {
    fn from_iter<I: IntoIterator<Item = NodeId>>(iter: I) -> Self {
        MarkedSet(iter.into_iter().collect())
    }
}

/// Amplitudes over the directed edge states of one geometry.
#[derive(Clone, Debug, PartialEq)]
pub struct WalkState {
    amplitudes: Vec<Complex64>,
}

impl WalkState {
    /// Equal superposition `(2E)^{-1/2}` on every state.
    pub fn uniform(g: &Geometry) -> Self {
        let amp = 1.0 / (g.state_count() as f64).sqrt();
        WalkState {
            amplitudes: vec![Complex64::new(amp, 0.0); g.state_count()],
        }
    }

    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Self {
        WalkState { amplitudes }
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }
}

pub fn initial_state(g: &Geometry) -> WalkState {
    WalkState::uniform(g)
}

/// One application of the global scattering operator.
pub fn step(state: &WalkState, g: &Geometry, marked: &MarkedSet) -> Result<WalkState> {
    let mut walker = Walker::from_state(g, marked, state.clone())?;
    walker.step();
    Ok(walker.into_state())
}

/// The equal superposition advanced by `steps` unitary steps.
pub fn evolve(g: &Geometry, marked: &MarkedSet, steps: usize) -> Result<WalkState> {
    let mut walker = Walker::new(g, marked)?;
    walker.advance(steps);
    Ok(walker.into_state())
}

/// Double-buffered evolution over a shared geometry.
///
/// A step is a node-local gather: each node sums its incoming amplitudes once,
/// and the amplitude leaving `u` towards `v` is `±(t_u·sum_u − in_u(v))`, using
/// `r + t = 1`. Cost is `O(2E)` per step.
pub struct Walker<'g> {
    geometry: &'g Geometry,
    /// `+1` for ordinary nodes, `−1` for marked ones.
    sign: Vec<f64>,
    transmission: Vec<f64>,
    state: Vec<Complex64>,
    next: Vec<Complex64>,
    sums: Vec<Complex64>,
    steps: usize,
}

impl<'g> Walker<'g> {
    pub fn new(g: &'g Geometry, marked: &MarkedSet) -> Result<Self> {
        Self::from_state(g, marked, WalkState::uniform(g))
    }

    pub fn from_state(g: &'g Geometry, marked: &MarkedSet, state: WalkState) -> Result<Self> {
        assert_eq!(state.len(), g.state_count(), "state does not match geometry");
        let mask = marked.mask(g)?;
        let transmission = g
            .nodes()
            .map(|v| ScatterCoefficients::for_degree(g.degree(v)).map(|c| c.transmission))
            .collect::<Result<Vec<_>>>()?;
        Ok(Walker {
            geometry: g,
            sign: mask.iter().map(|&m| if m { -1.0 } else { 1.0 }).collect(),
            transmission,
            next: vec![Complex64::default(); state.len()],
            state: state.amplitudes,
            sums: vec![Complex64::default(); g.node_count()],
            steps: 0,
        })
    }

    pub fn step(&mut self) {
        let offsets = self.geometry.offsets();
        let sources = self.geometry.sources();
        let reverse = self.geometry.reverses();
        for (v, sum) in self.sums.iter_mut().enumerate() {
            *sum = self.state[offsets[v]..offsets[v + 1]].iter().sum();
        }
        for (k, out) in self.next.iter_mut().enumerate() {
            let u = sources[k];
            *out = (self.sums[u] * self.transmission[u] - self.state[reverse[k]]) * self.sign[u];
        }
        std::mem::swap(&mut self.state, &mut self.next);
        self.steps += 1;
    }

    pub fn advance(&mut self, steps: usize) {
        for _ in 0..steps {
            self.step();
        }
    }

    /// Unitary steps applied so far.
    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.state
    }

    pub fn into_state(self) -> WalkState {
        WalkState::from_amplitudes(self.state)
    }

    pub fn probabilities(&self) -> ProbabilityField {
        let mut values = Vec::new();
        self.probabilities_into(&mut values);
        ProbabilityField { values }
    }

    /// Writes node probabilities into `out`, reusing its allocation.
    pub fn probabilities_into(&self, out: &mut Vec<f64>) {
        node_probabilities_into(&self.state, self.geometry, out);
    }
}

fn node_probabilities_into(amps: &[Complex64], g: &Geometry, out: &mut Vec<f64>) {
    let offsets = g.offsets();
    out.clear();
    out.extend((0..g.node_count()).map(|v| {
        amps[offsets[v]..offsets[v + 1]]
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
    }));
}

/// Measurement probability per node: the sum over its incoming states.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbabilityField {
    values: Vec<f64>,
}

impl ProbabilityField {
    pub fn from_values(values: Vec<f64>) -> Self {
        ProbabilityField { values }
    }

    /// Uniform `1/V` over nodes.
    pub fn uniform(node_count: usize) -> Self {
        ProbabilityField {
            values: vec![1.0 / node_count as f64; node_count],
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, v: NodeId) -> f64 {
        self.values[v.0]
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Node with the highest probability (lowest index on ties).
    pub fn argmax(&self) -> NodeId {
        let mut best = 0;
        for (i, &p) in self.values.iter().enumerate() {
            if p > self.values[best] {
                best = i;
            }
        }
        NodeId(best)
    }

    /// Writes `x,y[,z],P` rows, one per node.
    pub fn write_csv<W: Write>(&self, g: &Geometry, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        if g.dims() == 2 {
            w.write_record(["x", "y", "P"])?;
        } else {
            w.write_record(["x", "y", "z", "P"])?;
        }
        for v in g.nodes() {
            let c = g.coord(v);
            let p = self.get(v);
            if g.dims() == 2 {
                w.serialize((c.x, c.y, p))?;
            } else {
                w.serialize((c.x, c.y, c.z, p))?;
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a field written by [`ProbabilityField::write_csv`].
    pub fn read_csv<R: Read>(g: &Geometry, reader: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(reader);
        let mut values = vec![f64::NAN; g.node_count()];
        for record in r.records() {
            let record = record?;
            let fields: Vec<&str> = record.iter().collect();
            let parse_usize = |s: &str| {
                s.parse::<usize>()
                    .map_err(|e| Error::Format(format!("bad coordinate {s:?}: {e}")))
            };
            let (coord, p) = match (g.dims(), fields.len()) {
                (2, 3) => (Coord::planar(parse_usize(fields[0])?, parse_usize(fields[1])?), fields[2]),
                (3, 4) => (
                    Coord::cubic(
                        parse_usize(fields[0])?,
                        parse_usize(fields[1])?,
                        parse_usize(fields[2])?,
                    ),
                    fields[3],
                ),
                _ => return Err(Error::Format("unexpected column count".into())),
            };
            let p = p
                .parse::<f64>()
                .map_err(|e| Error::Format(format!("bad probability {p:?}: {e}")))?;
            values[g.node(coord)?.0] = p;
        }
        if values.iter().any(|p| p.is_nan()) {
            return Err(Error::Format("missing nodes in probability table".into()));
        }
        Ok(ProbabilityField { values })
    }
}

pub fn node_probabilities(state: &WalkState, g: &Geometry) -> ProbabilityField {
    let mut values = Vec::new();
    node_probabilities_into(state.amplitudes(), g, &mut values);
    ProbabilityField { values }
}

/// Probability by graph distance from a target node.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    /// Total probability at exactly distance `r`.
    pub shells: Vec<f64>,
    /// `P(r)`: total probability within distance `r`.
    pub cumulative: Vec<f64>,
}

impl RadialProfile {
    /// `P(r)`, saturating beyond the largest radius.
    pub fn within(&self, r: usize) -> f64 {
        self.cumulative[r.min(self.cumulative.len() - 1)]
    }

    pub fn max_radius(&self) -> usize {
        self.shells.len() - 1
    }
}

pub fn radial_profile(p: &ProbabilityField, g: &Geometry, target: NodeId) -> RadialProfile {
    radial_profile_from_distances(p, &g.distances_from(target))
}

pub(crate) fn radial_profile_from_distances(p: &ProbabilityField, dist: &[u32]) -> RadialProfile {
    let max = dist.iter().copied().max().unwrap_or(0) as usize;
    let mut shells = vec![0.0; max + 1];
    for (&d, &pv) in dist.iter().zip(p.values()) {
        shells[d as usize] += pv;
    }
    let cumulative = shells
        .iter()
        .scan(0.0, |acc, &s| {
            *acc += s;
            Some(*acc)
        })
        .collect();
    RadialProfile { shells, cumulative }
}
