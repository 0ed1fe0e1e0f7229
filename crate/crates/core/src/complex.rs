//! Neighborhood complexes, face enumeration and face posets.

use std::collections::BTreeSet;
use std::sync::Arc;

use rustc_hash::FxHashSet;

use crate::error::{Error, Result};
use crate::face::{submasks, Face, FaceSet};
use crate::kneser::{ground_elements, Graph, Universe, Vertex};

/// Default cap on fully enumerated faces; `k = 4` fits, `k = 5` needs an override.
pub const DEFAULT_FACE_CAP: u64 = 4_000_000;

/// The face cap from `MK_CAP`, falling back to [`DEFAULT_FACE_CAP`].
pub fn face_cap_from_env() -> u64 {
    std::env::var("MK_CAP")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .filter(|&c| c >= 1)
        .unwrap_or(DEFAULT_FACE_CAP)
}

/// `N(A)`: vertices adjacent to every member of `A`. `N(∅) = V(G)`.
pub fn common_neighbors(g: &Graph, a: &[Vertex]) -> Result<Vec<Vertex>> {
    for &v in a {
        if !g.has_vertex(v) {
            return Err(Error::domain(format!("vertex {v} is not in {}", g.name())));
        }
    }
    let face = g.universe().face(a);
    Ok(Face(g.common_neighbor_mask(face))
        .indices()
        .map(|i| g.universe().vertex(i))
        .collect())
}

/// A simplicial complex given by its maximal faces.
#[derive(Clone, Debug)]
pub struct SimplicialComplex {
    universe: Arc<Universe>,
    name: String,
    generators: Vec<Face>,
}

impl SimplicialComplex {
    /// Keeps only inclusion-maximal generators, sorted canonically.
    pub fn from_generators(
        universe: Arc<Universe>,
        name: impl Into<String>,
        generators: impl IntoIterator<Item = Face>,
    ) -> SimplicialComplex {
        let mut gens: Vec<Face> = generators.into_iter().filter(|g| !g.is_empty()).collect();
        // Larger faces first, so each candidate only needs checking against kept ones.
        gens.sort_unstable_by(|a, b| b.cmp(a));
        gens.dedup();
        let mut maximal: Vec<Face> = Vec::with_capacity(gens.len());
        for g in gens {
            if !maximal.iter().any(|m| g.is_subset(*m)) {
                maximal.push(g);
            }
        }
        maximal.sort_unstable();
        SimplicialComplex { universe, name: name.into(), generators: maximal }
    }

    /// The complex generated by an explicit face list.
    pub fn from_faces(universe: Arc<Universe>, name: impl Into<String>, faces: &FaceSet) -> SimplicialComplex {
        Self::from_generators(universe, name, faces.iter())
    }

    pub fn universe(&self) -> &Arc<Universe> {
        &self.universe
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn generators(&self) -> &[Face] {
        &self.generators
    }

    pub fn contains(&self, face: Face) -> bool {
        self.generators.iter().any(|g| face.is_subset(*g))
    }

    pub fn vertex_mask(&self) -> u64 {
        self.generators.iter().fold(0, |m, g| m | g.bits())
    }

    /// Upper bound on the face count: `Σ 2^|g|` over generators, plus the empty face.
    pub fn estimated_face_count(&self) -> u64 {
        self.generators
            .iter()
            .map(|g| 1u64.checked_shl(g.len() as u32).unwrap_or(u64::MAX))
            .fold(1u64, |a, b| a.saturating_add(b))
    }

    /// Every face, deduplicated and in canonical order.
    pub fn enumerate_faces(&self, include_empty: bool, cap: u64) -> Result<FaceSet> {
        let estimate = self.estimated_face_count();
        if estimate > cap {
            return Err(Error::CapExceeded { estimate, cap });
        }
        let mut seen: FxHashSet<u64> = FxHashSet::default();
        seen.reserve(estimate.min(1 << 24) as usize);
        for g in &self.generators {
            for m in submasks(g.bits()) {
                seen.insert(m);
            }
        }
        if !include_empty {
            seen.remove(&0);
        } else {
            seen.insert(0);
        }
        Ok(FaceSet::new(seen.into_iter().map(Face)))
    }
}

/// The neighborhood complex: faces are vertex sets with a common neighbor.
pub fn neighborhood_complex(g: &Graph) -> Result<SimplicialComplex> {
    if g.edge_count() == 0 {
        return Err(Error::EmptyComplex(format!("{} has no edges", g.name())));
    }
    let gens = Face(g.vertex_mask())
        .indices()
        .map(|i| Face(g.neighbor_mask(i)))
        .filter(|f| !f.is_empty());
    Ok(SimplicialComplex::from_generators(g.universe().clone(), format!("N({})", g.name()), gens))
}

/// `S_σ`: the union of the pairs in `σ`.
pub fn support(universe: &Universe, face: Face) -> BTreeSet<u32> {
    ground_elements(universe.support_mask(face)).into_iter().collect()
}

/// `C_σ = [k+4] \ S_σ`.
pub fn complement(universe: &Universe, face: Face) -> BTreeSet<u32> {
    ground_elements(universe.complement_mask(face)).into_iter().collect()
}

/// Cover relation of a face set, by position: `(τ, σ)` with `τ ⊂ σ`, `|σ| = |τ| + 1`.
///
/// Works on any face set, not only complexes; covers are taken between
/// members of the set.
#[derive(Clone, Debug)]
pub struct HasseDiagram {
    node_count: usize,
    covers: Vec<(u32, u32)>,
}

impl HasseDiagram {
    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn covers(&self) -> &[(u32, u32)] {
        &self.covers
    }

    pub fn cover_count(&self) -> usize {
        self.covers.len()
    }
}

pub fn face_poset(faces: &FaceSet) -> HasseDiagram {
    let mut covers = Vec::new();
    for (pos, f) in faces.iter().enumerate() {
        for (_, g) in f.facets() {
            if let Some(q) = faces.position(g) {
                covers.push((q as u32, pos as u32));
            }
        }
    }
    covers.sort_unstable();
    HasseDiagram { node_count: faces.len(), covers }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kneser::{canonical_vertex, kneser_graph, stable_kneser_graph, GroundParam};

    fn p(k: u32) -> GroundParam {
        GroundParam::new(k).unwrap()
    }

    #[test]
    fn common_neighbors_in_small_kneser_graphs() {
        let g0 = kneser_graph(p(0));
        let v = |a, b, k| canonical_vertex(a, b, p(k)).unwrap();
        assert_eq!(common_neighbors(&g0, &[v(1, 2, 0)]).unwrap(), vec![v(3, 4, 0)]);
        let g1 = kneser_graph(p(1));
        assert_eq!(common_neighbors(&g1, &[v(1, 2, 1), v(1, 3, 1)]).unwrap(), vec![v(4, 5, 1)]);
        assert_eq!(common_neighbors(&g1, &[]).unwrap().len(), 10);
        let sg1 = stable_kneser_graph(p(1));
        assert!(matches!(common_neighbors(&sg1, &[v(1, 2, 1)]), Err(Error::Domain(_))));
    }

    #[test]
    fn neighborhood_complex_of_kg0_is_six_points() {
        let k = neighborhood_complex(&kneser_graph(p(0))).unwrap();
        assert_eq!(k.generators().len(), 6);
        assert!(k.generators().iter().all(|g| g.len() == 1));
        assert_eq!(k.enumerate_faces(true, DEFAULT_FACE_CAP).unwrap().len(), 7);
    }

    #[test]
    fn pentagon() {
        let k = neighborhood_complex(&stable_kneser_graph(p(1))).unwrap();
        assert_eq!(k.generators().len(), 5);
        assert!(k.generators().iter().all(|g| g.len() == 2));
        let faces = k.enumerate_faces(true, DEFAULT_FACE_CAP).unwrap();
        assert_eq!(faces.len(), 11);
        assert_eq!(face_poset(&faces).cover_count(), 15);
    }

    #[test]
    fn petersen_neighborhoods_are_maximal_triangles() {
        let k = neighborhood_complex(&kneser_graph(p(1))).unwrap();
        assert_eq!(k.generators().len(), 10);
        assert!(k.generators().iter().all(|g| g.len() == 3));
    }

    #[test]
    fn edgeless_graph_is_rejected() {
        let g = kneser_graph(p(0));
        let empty = g.without_vertices(g.vertex_mask(), "none");
        assert!(matches!(neighborhood_complex(&empty), Err(Error::EmptyComplex(_))));
    }

    #[test]
    fn cap_is_enforced() {
        let k = neighborhood_complex(&kneser_graph(p(2))).unwrap();
        match k.enumerate_faces(true, 100) {
            Err(Error::CapExceeded { estimate, cap }) => {
                assert_eq!(cap, 100);
                assert_eq!(estimate, 1 + 15 * 64);
            }
            other => panic!("expected cap error, got {other:?}"),
        }
    }

    #[test]
    fn single_edge_poset() {
        let faces = FaceSet::new(submasks(0b11).map(Face));
        let covers: Vec<(Face, Face)> = face_poset(&faces)
            .covers()
            .iter()
            .map(|&(a, b)| (faces.get(a as usize), faces.get(b as usize)))
            .collect();
        assert_eq!(covers.len(), 4);
        for pair in [(0, 1), (0, 2), (1, 3), (2, 3)] {
            assert!(covers.contains(&(Face(pair.0), Face(pair.1))));
        }
    }

    #[test]
    fn support_and_complement() {
        let u = Universe::new(p(0));
        let f = u.parse_face("1,3 2,4").unwrap();
        assert_eq!(support(&u, f), BTreeSet::from([1, 2, 3, 4]));
        assert!(complement(&u, f).is_empty());
        let u1 = Universe::new(p(1));
        let f = u1.parse_face("3,4 1,5").unwrap();
        assert_eq!(complement(&u1, f), BTreeSet::from([2]));
    }
}
