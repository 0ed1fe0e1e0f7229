use super::Matching;
use crate::face::{Face, FaceSet};

const UNMATCHED: u32 = u32::MAX;

/// Greedy acyclic matching in canonical order (dimension, then mask).
pub fn greedy_morse_matching(faces: &FaceSet) -> Matching {
    greedy_morse_matching_by(faces, |f| f.order_key())
}

/// Scans faces by `key`; each unmatched face is paired with its first
/// unmatched coface (by `key`) that keeps the matching acyclic.
pub fn greedy_morse_matching_by<K: Ord>(faces: &FaceSet, key: impl Fn(Face) -> K) -> Matching {
    let n = faces.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_cached_key(|&p| key(faces.get(p)));
    let mut rank = vec![0usize; n];
    for (r, &p) in order.iter().enumerate() {
        rank[p] = r;
    }
    let vertex_mask = faces.vertex_mask();
    let mut mate = vec![UNMATCHED; n];
    let mut m = Matching::new();
    let mut seen = vec![0u32; n];
    let mut stamp = 0u32;

    for &p in &order {
        if mate[p] != UNMATCHED {
            continue;
        }
        let f = faces.get(p);
        let mut cofaces: Vec<usize> = Face(vertex_mask & !f.bits())
            .indices()
            .filter_map(|x| faces.position(f.with(x)))
            .filter(|&q| mate[q] == UNMATCHED)
            .collect();
        cofaces.sort_by_key(|&q| rank[q]);
        for q in cofaces {
            stamp += 1;
            if !reaches(faces, &mate, q, p, &mut seen, stamp) {
                mate[p] = q as u32;
                mate[q] = p as u32;
                m.push(f, faces.get(q));
                break;
            }
        }
    }
    m
}

/// Whether adding `(target, up)` would close a cycle: search the rank digraph
/// from the other facets of `up` for `target`.
fn reaches(faces: &FaceSet, mate: &[u32], up: usize, target: usize, seen: &mut [u32], stamp: u32) -> bool {
    let mut stack: Vec<usize> = Vec::new();
    let push_facets = |of: usize, skip: usize, stack: &mut Vec<usize>, seen: &mut [u32]| {
        for (_, g) in faces.get(of).facets() {
            if let Some(q) = faces.position(g) {
                if q != skip && seen[q] != stamp {
                    seen[q] = stamp;
                    stack.push(q);
                }
            }
        }
    };
    push_facets(up, target, &mut stack, seen);
    while let Some(a) = stack.pop() {
        if a == target {
            return true;
        }
        let u = mate[a];
        if u != UNMATCHED && faces.get(u as usize).len() > faces.get(a).len() {
            push_facets(u as usize, a, &mut stack, seen);
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::face::submasks;
    use crate::morse::verify_matching;

    #[test]
    fn single_edge_with_empty_face_is_perfect() {
        let faces = FaceSet::new(submasks(0b11).map(Face));
        let m = greedy_morse_matching(&faces);
        assert_eq!(m.pairs(), &[(Face(0), Face(0b01)), (Face(0b10), Face(0b11))]);
    }

    #[test]
    fn point_pairs_with_empty_face() {
        let faces = FaceSet::new([Face(0), Face(1)]);
        let report = verify_matching(&faces, &greedy_morse_matching(&faces)).unwrap();
        assert_eq!(report.critical_total(), 0);
        assert!(report.empty_face_paired);
    }

    #[test]
    fn greedy_on_triangle_boundary_keeps_a_circle() {
        let faces = FaceSet::new([0, 0b001, 0b010, 0b100, 0b011, 0b110, 0b101].map(Face));
        let m = greedy_morse_matching(&faces);
        let report = verify_matching(&faces, &m).unwrap();
        assert!(report.acyclic);
        assert_eq!(report.critical_counts(), [(1, 1)].into_iter().collect());
    }

    #[test]
    fn greedy_is_acyclic_on_a_solid_simplex() {
        let faces = FaceSet::new(submasks(0b11111).map(Face));
        let report = verify_matching(&faces, &greedy_morse_matching(&faces)).unwrap();
        assert!(report.acyclic);
        // Alternating count of critical faces equals the reduced Euler characteristic, 0.
        let chi: i64 = report.critical.iter().map(|(d, v)| if d.rem_euclid(2) == 0 { v.len() as i64 } else { -(v.len() as i64) }).sum();
        assert_eq!(chi, 0);
    }
}
