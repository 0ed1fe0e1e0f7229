//! The explicit constructions: the filtration from `N(S)` down to `N(SG)`
//! with its collapse matchings, and the stratification of `N(KG)` over
//! `N(S)` with per-stratum Morse matchings.

mod filtration;
mod strata;

pub use filtration::{
    collapse_s_to_sg, collapse_s_to_sg_with, pair_fiber, pair_fiber_matching, relative_stages, removed_vertices,
    w_complex, w_graph, BettiCheck, RelativeStage, SToSgCollapse, StageKind, StageRecord,
};
pub use strata::{
    classify_stratum, explicit_critical_cell, global_matching, stratify, EClass, GlobalMatching, Stratification,
    Stratum,
};

use crate::face::Face;
use crate::kneser::Universe;

/// Ground bit of the element `x`, taken modulo `n`.
pub(crate) fn gbit(u: &Universe, x: i64) -> u32 {
    1 << (u.param().reduce(x) - 1)
}

pub(crate) fn gmask(u: &Universe, xs: &[i64]) -> u32 {
    xs.iter().fold(0, |m, &x| m | gbit(u, x))
}

/// `σ ∈ N(KG)`: some pair is disjoint from every member, i.e. `|C_σ| ≥ 2`.
pub fn in_kneser_complex(u: &Universe, face: Face) -> bool {
    u.complement_mask(face).count_ones() >= 2
}

/// `σ ∈ N(S ∖ R)` where `R` is a set of removed unstable vertices: `σ`
/// avoids `R` and some surviving vertex inside `C_σ` is either stable, or
/// unstable with every member of `σ` stable.
pub fn in_s_complex_without(u: &Universe, face: Face, removed: u64) -> bool {
    if face.bits() & removed != 0 {
        return false;
    }
    let inside = u.vertices_within(u.complement_mask(face)) & !removed;
    if inside & u.stable_mask() != 0 {
        return true;
    }
    inside != 0 && face.bits() & !u.stable_mask() == 0
}

pub fn in_s_complex(u: &Universe, face: Face) -> bool {
    in_s_complex_without(u, face, 0)
}

pub fn in_w_complex(u: &Universe, face: Face, l: u32) -> bool {
    in_s_complex_without(u, face, removed_vertices(u, l))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{neighborhood_complex, DEFAULT_FACE_CAP};
    use crate::face::submasks;
    use crate::kneser::{kneser_graph, s_graph, GroundParam};

    /// Every subset of the vertex set for small k, checked against enumeration.
    #[test]
    fn membership_predicates_match_enumeration() {
        for k in 0..=1 {
            let p = GroundParam::new(k).unwrap();
            let u = Universe::new(p);
            let kg = neighborhood_complex(&kneser_graph(p)).unwrap().enumerate_faces(true, DEFAULT_FACE_CAP).unwrap();
            let s = neighborhood_complex(&s_graph(p)).unwrap().enumerate_faces(true, DEFAULT_FACE_CAP).unwrap();
            for m in submasks(u.all_mask()) {
                let f = Face(m);
                assert_eq!(in_kneser_complex(&u, f), kg.contains(f), "{f:?}");
                assert_eq!(in_s_complex(&u, f), s.contains(f), "{f:?}");
            }
        }
    }

    #[test]
    fn ground_bits_wrap() {
        let u = Universe::new(GroundParam::new(1).unwrap());
        assert_eq!(gbit(&u, 6), 1);
        assert_eq!(gbit(&u, 0), 1 << 4);
        assert_eq!(gmask(&u, &[1, 2]), 0b11);
    }
}
