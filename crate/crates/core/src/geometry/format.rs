use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{Coord, Geometry};
use crate::error::{Error, Result};

/// On-disk geometry description: the lattice size plus its walls.
///
/// ```json
/// {"dims":2,"n":4,"removed_edges":[[[1,3],[2,3]],[[2,3],[2,4]]]}
/// ```
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeometryFile {
    pub dims: usize,
    pub n: usize,
    pub removed_edges: Vec<[Coord; 2]>,
}

impl From<&Geometry> for GeometryFile {
    fn from(g: &Geometry) -> Self {
        // Node order is lexicographic coordinate order, so the stored walls are
        // already canonical.
        let removed_edges = g
            .walls()
            .into_iter()
            .map(|(a, b)| [g.coord(a), g.coord(b)])
            .collect();
        GeometryFile {
            dims: g.dims(),
            n: g.side(),
            removed_edges,
        }
    }
}

impl TryFrom<&GeometryFile> for Geometry {
    type Error = Error;

    fn try_from(file: &GeometryFile) -> Result<Self> {
        if file.removed_edges.iter().any(|[a, b]| a.dims() != file.dims || b.dims() != file.dims) {
            return Err(Error::Format("wall endpoint dimension mismatch".into()));
        }
        let walls: Vec<(Coord, Coord)> = file.removed_edges.iter().map(|&[a, b]| (a, b)).collect();
        Geometry::with_walls(file.dims, file.n, &walls)
    }
}

impl Geometry {
    pub fn to_json(&self) -> String {
        serde_json::to_string(&GeometryFile::from(self)).expect("geometry serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: GeometryFile = serde_json::from_str(s)?;
        Geometry::try_from(&file)
    }

    pub fn write_json<W: Write>(&self, mut writer: W) -> Result<()> {
        serde_json::to_writer(&mut writer, &GeometryFile::from(self))?;
        Ok(())
    }

    pub fn read_json<R: Read>(reader: R) -> Result<Self> {
        let file: GeometryFile = serde_json::from_reader(reader)?;
        Geometry::try_from(&file)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::place_random_walls;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn literal_format() {
        let g = Geometry::grid(4).unwrap();
        let n = |x, y| g.node(Coord::planar(x, y)).unwrap();
        let walled = g
            .remove_edge(n(2, 4), n(2, 3))
            .unwrap()
            .remove_edge(n(2, 3), n(1, 3))
            .unwrap();
        assert_eq!(
            walled.to_json(),
            r#"{"dims":2,"n":4,"removed_edges":[[[1,3],[2,3]],[[2,3],[2,4]]]}"#
        );
    }

    #[test]
    fn rejects_bad_files() {
        assert!(Geometry::from_json(r#"{"dims":2,"n":3,"removed_edges":[[[1,1],[3,3]]]}"#).is_err());
        assert!(Geometry::from_json(r#"{"dims":2,"n":3,"removed_edges":[[[0,1],[1,1]]]}"#).is_err());
        assert!(Geometry::from_json(r#"{"dims":4,"n":3,"removed_edges":[]}"#).is_err());
        // Isolating the corner [1,1].
        assert!(Geometry::from_json(
            r#"{"dims":2,"n":3,"removed_edges":[[[1,1],[1,2]],[[1,1],[2,1]]]}"#
        )
        .is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn json_round_trip(n in 2usize..9, frac in 0.0f64..=1.0, seed in any::<u64>(), lattice in any::<bool>()) {
            let base = if lattice { Geometry::lattice(n.min(5)).unwrap() } else { Geometry::grid(n).unwrap() };
            let count = (frac * crate::geometry::max_wall_count(&base) as f64) as usize;
            let g = place_random_walls(&base, count, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
            let text = g.to_json();
            let back = Geometry::from_json(&text).unwrap();
            prop_assert_eq!(back.edges(), g.edges());
            prop_assert_eq!(back.to_json(), text);
            prop_assert_eq!(back.wall_count() + back.edge_count(), back.full_edge_count());
        }
    }
}
