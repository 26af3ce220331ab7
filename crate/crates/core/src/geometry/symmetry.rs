use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::Coord;
use crate::error::{Error, Result};

/// One element of the square's dihedral group acting on `n × n` coordinates:
/// optional reflections of each axis followed by an optional transpose.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Symmetry {
    pub flip_x: bool,
    pub flip_y: bool,
    pub transpose: bool,
}

impl Symmetry {
    pub const IDENTITY: Symmetry = Symmetry {
        flip_x: false,
        flip_y: false,
        transpose: false,
    };

    pub fn all() -> [Symmetry; 8] {
        let mut out = [Self::IDENTITY; 8];
        for (i, s) in out.iter_mut().enumerate() {
            *s = Symmetry {
                flip_x: i & 1 != 0,
                flip_y: i & 2 != 0,
                transpose: i & 4 != 0,
            };
        }
        out
    }

    pub fn apply(&self, c: Coord, n: usize) -> Coord {
        let x = if self.flip_x { n + 1 - c.x } else { c.x };
        let y = if self.flip_y { n + 1 - c.y } else { c.y };
        if self.transpose {
            Coord::planar(y, x)
        } else {
            Coord::planar(x, y)
        }
    }

    /// A group element mapping `from` onto `to`, if they share an orbit.
    pub fn between(from: Coord, to: Coord, n: usize) -> Option<Symmetry> {
        Self::all().into_iter().find(|s| s.apply(from, n) == to)
    }
}

/// An orbit of grid nodes under the square's symmetry group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymmetryClass {
    /// Orbit member inside the canonical octant `x ≤ y ≤ ceil(n/2)`.
    pub representative: Coord,
    /// Orbit size: 8, 4, or 1 for the center of an odd grid.
    pub multiplicity: usize,
}

/// Closed-form number of symmetry classes on an `n × n` grid.
pub fn octant_class_count(n: usize) -> usize {
    if n % 2 == 0 {
        n * (n + 2) / 8
    } else {
        (n + 1) * (n + 3) / 8
    }
}

/// All symmetry classes of the `n × n` grid, ordered by representative.
pub fn unique_octant_nodes(n: usize) -> Result<Vec<SymmetryClass>> {
    if n < 2 {
        return Err(Error::InvalidSize { n, min: 2 });
    }
    let half = n.div_ceil(2);
    let mut classes = Vec::with_capacity(octant_class_count(n));
    for x in 1..=half {
        for y in x..=half {
            let representative = Coord::planar(x, y);
            let orbit: BTreeSet<Coord> = Symmetry::all()
                .iter()
                .map(|s| s.apply(representative, n))
                .collect();
            classes.push(SymmetryClass {
                representative,
                multiplicity: orbit.len(),
            });
        }
    }
    Ok(classes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    /// Orbit partition by brute force: label every node with the minimum of its
    /// images and count distinct labels.
    fn brute_force_orbits(n: usize) -> HashMap<Coord, usize> {
        let mut orbits = HashMap::new();
        for x in 1..=n {
            for y in 1..=n {
                let c = Coord::planar(x, y);
                let label = Symmetry::all().iter().map(|s| s.apply(c, n)).min().unwrap();
                *orbits.entry(label).or_insert(0) += 1;
            }
        }
        orbits
    }

    #[test]
    fn hundred_grid_has_1275_classes() {
        let classes = unique_octant_nodes(100).unwrap();
        assert_eq!(classes.len(), 1275);
        assert_eq!(classes.iter().map(|c| c.multiplicity).sum::<usize>(), 10_000);
    }

    #[test]
    fn small_cases() {
        let two = unique_octant_nodes(2).unwrap();
        assert_eq!(two.len(), 1);
        assert_eq!(two[0].multiplicity, 4);

        let three = unique_octant_nodes(3).unwrap();
        let mut mult: Vec<_> = three.iter().map(|c| c.multiplicity).collect();
        mult.sort();
        assert_eq!(mult, vec![1, 4, 4]);
        assert!(unique_octant_nodes(1).is_err());
    }

    #[test]
    fn closed_form_matches_orbit_enumeration() {
        for n in 2..=30 {
            let orbits = brute_force_orbits(n);
            let classes = unique_octant_nodes(n).unwrap();
            assert_eq!(orbits.len(), octant_class_count(n), "n={n}");
            assert_eq!(classes.len(), orbits.len(), "n={n}");
            for class in &classes {
                let label = Symmetry::all()
                    .iter()
                    .map(|s| s.apply(class.representative, n))
                    .min()
                    .unwrap();
                assert_eq!(orbits[&label], class.multiplicity, "n={n}");
            }
        }
    }

    #[test]
    fn between_finds_a_mapping() {
        let n = 100;
        let a = Coord::planar(40, 50);
        let b = Coord::planar(51, 61);
        let s = Symmetry::between(a, b, n).unwrap();
        assert_eq!(s.apply(a, n), b);
        assert!(Symmetry::between(a, Coord::planar(41, 50), n).is_none());
    }
}
