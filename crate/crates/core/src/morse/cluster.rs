use std::collections::BTreeMap;
use std::fmt::Debug;

use super::{verify_matching, Matching, MorseReport};
use crate::error::{Error, Result};
use crate::face::FaceSet;

/// Unions per-fiber matchings along a labelling `faces → L` into a chain `L`.
///
/// Checks, rather than assumes, that the labelling is order-preserving on
/// every cover, that each fiber matching stays in its fiber and is acyclic
/// there, and finally re-verifies the union on the whole face set.
pub fn cluster_compose<L>(
    faces: &FaceSet,
    label_of: impl Fn(crate::face::Face) -> L,
    fiber_matchings: impl IntoIterator<Item = (L, Matching)>,
) -> Result<(Matching, MorseReport)>
where
    L: Ord + Clone + Debug,
{
    let labels: Vec<L> = faces.iter().map(&label_of).collect();

    for (pos, f) in faces.iter().enumerate() {
        for (_, g) in f.facets() {
            if let Some(q) = faces.position(g) {
                if labels[q] > labels[pos] {
                    return Err(Error::NotOrderPreserving { lower: format!("{g:?}"), upper: format!("{f:?}") });
                }
            }
        }
    }

    let mut by_label: BTreeMap<L, Matching> = BTreeMap::new();
    for (label, m) in fiber_matchings {
        by_label.entry(label).or_default().extend(&m);
    }

    let mut union = Matching::new();
    for (label, m) in &by_label {
        for f in m.matched_faces() {
            let pos = faces
                .position(f)
                .ok_or_else(|| Error::MalformedMatching(format!("face {f:?} is not in the face set")))?;
            if &labels[pos] != label {
                return Err(Error::MalformedMatching(format!(
                    "face {f:?} has label {:?} but is matched in fiber {label:?}",
                    labels[pos]
                )));
            }
        }
        let fiber = faces.filter(|f| &label_of(f) == label);
        let report = verify_matching(&fiber, m)?;
        if !report.acyclic {
            return Err(Error::NotAcyclic(format!("matching on fiber {label:?} has a cycle")));
        }
        union.extend(m);
    }

    let report = verify_matching(faces, &union)?;
    if !report.acyclic {
        return Err(Error::NotAcyclic("union of fiber matchings has a cycle".into()));
    }
    Ok((union, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::face::{submasks, Face};
    use crate::morse::element_matching;

    #[test]
    fn single_fiber_is_identity() {
        let faces = FaceSet::new(submasks(0b111).map(Face));
        let (m, _) = element_matching(&faces, 0);
        let (union, report) = cluster_compose(&faces, |_| 0u8, [(0u8, m.clone())]).unwrap();
        assert_eq!(union, m);
        assert!(report.acyclic);
    }

    #[test]
    fn order_violation_is_reported() {
        let faces = FaceSet::new(submasks(0b11).map(Face));
        // The empty face gets the top label: violates every cover out of it.
        let err = cluster_compose(&faces, |f: Face| f.is_empty(), Vec::<(bool, Matching)>::new()).unwrap_err();
        assert!(matches!(err, Error::NotOrderPreserving { .. }));
    }

    #[test]
    fn pair_across_fibers_is_rejected() {
        let faces = FaceSet::new(submasks(0b11).map(Face));
        let m = Matching::from_pairs(vec![(Face(0b01), Face(0b11))]);
        let err = cluster_compose(&faces, |f: Face| f.len(), [(1usize, m)]).unwrap_err();
        assert!(matches!(err, Error::MalformedMatching(_)));
    }
}
