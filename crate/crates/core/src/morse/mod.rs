//! Discrete Morse machinery on face posets: partial matchings, acyclicity
//! certificates, cluster composition, and collapses driven by a matching.

mod cluster;
mod collapse;
mod greedy;
mod verify;

use rustc_hash::FxHashMap;

use crate::face::{Face, FaceSet};

pub use cluster::cluster_compose;
pub use collapse::{collapse_by_matching, CollapseTrace};
pub use greedy::{greedy_morse_matching, greedy_morse_matching_by};
pub use verify::{verify_matching, MorseReport};

/// A set of pairs `(d, u)` where `u = d ∪ {x}` for a single vertex `x`.
///
/// The type does not enforce the matching axioms; [`verify_matching`] does.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Matching {
    pairs: Vec<(Face, Face)>,
}

impl Matching {
    pub fn new() -> Matching {
        Matching::default()
    }

    pub fn from_pairs(pairs: Vec<(Face, Face)>) -> Matching {
        Matching { pairs }
    }

    pub fn push(&mut self, down: Face, up: Face) {
        self.pairs.push((down, up));
    }

    pub fn extend(&mut self, other: &Matching) {
        self.pairs.extend_from_slice(&other.pairs);
    }

    pub fn pairs(&self) -> &[(Face, Face)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Applies `f` to both faces of every pair.
    pub fn map(&self, f: impl Fn(Face) -> Face) -> Matching {
        Matching { pairs: self.pairs.iter().map(|&(d, u)| (f(d), f(u))).collect() }
    }

    pub fn matched_faces(&self) -> impl Iterator<Item = Face> + '_ {
        self.pairs.iter().flat_map(|&(d, u)| [d, u])
    }

    /// Partner lookup in both directions.
    pub fn partners(&self) -> FxHashMap<Face, Face> {
        let mut map = FxHashMap::default();
        for &(d, u) in &self.pairs {
            map.insert(d, u);
            map.insert(u, d);
        }
        map
    }

    pub fn sorted(mut self) -> Matching {
        self.pairs.sort_unstable();
        self
    }
}

impl FromIterator<(Face, Face)> for Matching {
    fn from_iter<I: IntoIterator<Item = (Face, Face)>>(iter: I) -> Self {
        Matching { pairs: iter.into_iter().collect() }
    }
}

/// `M_x`: pairs `(σ \ x, σ ∪ x)` with both ends in `faces`, and the set `Δ_x`
/// of faces it covers.
///
/// `M_x` is always a perfect acyclic matching on `Δ_x`.
pub fn element_matching(faces: &FaceSet, x: usize) -> (Matching, FaceSet) {
    let mut m = Matching::new();
    let mut covered = Vec::new();
    for f in faces.iter() {
        if f.contains(x) {
            continue;
        }
        let up = f.with(x);
        if faces.contains(up) {
            m.push(f, up);
            covered.push(f);
            covered.push(up);
        }
    }
    (m, FaceSet::new(covered))
}
