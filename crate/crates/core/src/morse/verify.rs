use std::collections::{BTreeMap, VecDeque};

use serde_json::{json, Value};

use super::Matching;
use crate::error::{Error, Result};
use crate::face::{Face, FaceSet};
use crate::kneser::Universe;

const UNMATCHED: u32 = u32::MAX;

/// Outcome of checking a matching against a face poset.
#[derive(Clone, Debug)]
pub struct MorseReport {
    pub acyclic: bool,
    pub total_faces: usize,
    pub pairs: usize,
    /// A linear extension of the modified Hasse digraph (matched covers
    /// pointing up, all others down), present when acyclic.
    pub certificate: Option<Vec<Face>>,
    /// `a1, u(a1), a2, u(a2), ...` closing back at `a1`, present when not acyclic.
    pub cycle: Option<Vec<Face>>,
    /// Unmatched faces grouped by dimension (the empty face sits at -1).
    pub critical: BTreeMap<isize, Vec<Face>>,
    pub empty_face_in_poset: bool,
    pub empty_face_paired: bool,
}

impl MorseReport {
    pub fn critical_counts(&self) -> BTreeMap<isize, usize> {
        self.critical.iter().map(|(&d, v)| (d, v.len())).collect()
    }

    /// All unmatched faces, the empty face included.
    pub fn critical_total(&self) -> usize {
        self.critical.values().map(Vec::len).sum()
    }

    pub fn critical_nonempty(&self) -> usize {
        self.critical.iter().filter(|(&d, _)| d >= 0).map(|(_, v)| v.len()).sum()
    }

    /// Cell counts of the CW model: nonempty critical faces, plus one extra
    /// 0-cell when the empty face is paired.
    pub fn cw_cell_counts(&self) -> BTreeMap<isize, usize> {
        let mut counts: BTreeMap<isize, usize> =
            self.critical.iter().filter(|(&d, _)| d >= 0).map(|(&d, v)| (d, v.len())).collect();
        if self.empty_face_paired {
            *counts.entry(0).or_default() += 1;
        }
        counts.retain(|_, c| *c > 0);
        counts
    }

    pub fn critical_faces(&self) -> Vec<Face> {
        self.critical.values().flatten().copied().collect()
    }

    /// Critical faces of one dimension.
    pub fn critical_in(&self, dim: isize) -> &[Face] {
        self.critical.get(&dim).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn to_json(&self, universe: Option<&Universe>) -> Value {
        let fmt = |f: &Face| match universe {
            Some(u) => u.format_face(*f),
            None => format!("{f:?}"),
        };
        let counts: Vec<Value> = self
            .critical
            .iter()
            .map(|(d, v)| json!({"dim": d, "count": v.len()}))
            .collect();
        let critical: BTreeMap<String, Vec<String>> = self
            .critical
            .iter()
            .map(|(d, v)| (d.to_string(), v.iter().map(fmt).collect()))
            .collect();
        let mut out = json!({
            "acyclic": self.acyclic,
            "total_faces": self.total_faces,
            "pairs": self.pairs,
            "counts": counts,
            "critical": critical,
            "critical_total": self.critical_total(),
            "critical_nonempty": self.critical_nonempty(),
            "empty_face_in_poset": self.empty_face_in_poset,
            "empty_face_paired": self.empty_face_paired,
            "cw_cells": self.cw_cell_counts().iter().map(|(d, c)| json!({"dim": d, "count": c})).collect::<Vec<_>>(),
        });
        if let Some(cert) = &self.certificate {
            out["certificate"] = json!({"linear_extension_length": cert.len()});
        }
        if let Some(cycle) = &self.cycle {
            out["cycle"] = json!(cycle.iter().map(fmt).collect::<Vec<_>>());
        }
        out
    }
}

/// Checks the matching axioms, looks for a cycle of alternating up/down
/// steps, and reports critical cells.
///
/// Malformed input (pairs that are not covers, faces used twice, faces outside
/// the set) is an error. A cyclic but well-formed matching is a report with
/// `acyclic == false` and an explicit cycle.
pub fn verify_matching(faces: &FaceSet, m: &Matching) -> Result<MorseReport> {
    let mate = mate_table(faces, m)?;
    let cycle = find_cycle(faces, &mate);
    let certificate = match cycle {
        Some(_) => None,
        None => Some(linear_extension(faces, &mate)?),
    };

    let mut critical: BTreeMap<isize, Vec<Face>> = BTreeMap::new();
    for (pos, f) in faces.iter().enumerate() {
        if mate[pos] == UNMATCHED {
            critical.entry(f.dim()).or_default().push(f);
        }
    }
    let empty_pos = faces.position(Face::EMPTY);
    Ok(MorseReport {
        acyclic: cycle.is_none(),
        total_faces: faces.len(),
        pairs: m.len(),
        certificate,
        cycle: cycle.map(|c| c.into_iter().map(|p| faces.get(p as usize)).collect()),
        critical,
        empty_face_in_poset: empty_pos.is_some(),
        empty_face_paired: empty_pos.is_some_and(|p| mate[p] != UNMATCHED),
    })
}

pub(super) fn mate_table(faces: &FaceSet, m: &Matching) -> Result<Vec<u32>> {
    let mut mate = vec![UNMATCHED; faces.len()];
    for &(d, u) in m.pairs() {
        let locate = |f: Face| {
            faces
                .position(f)
                .ok_or_else(|| Error::MalformedMatching(format!("face {f:?} is not in the face set")))
        };
        let (pd, pu) = (locate(d)?, locate(u)?);
        if u.added_over(d).is_none() {
            return Err(Error::MalformedMatching(format!("({d:?}, {u:?}) is not a cover")));
        }
        for (p, f) in [(pd, d), (pu, u)] {
            if mate[p] != UNMATCHED {
                return Err(Error::MalformedMatching(format!("face {f:?} is matched twice")));
            }
        }
        mate[pd] = pu as u32;
        mate[pu] = pd as u32;
    }
    Ok(mate)
}

fn is_matched_up(faces: &FaceSet, mate: &[u32], pos: usize) -> bool {
    mate[pos] != UNMATCHED && faces.get(mate[pos] as usize).len() > faces.get(pos).len()
}

/// Successors of a matched-up face `a` in its rank digraph: the other facets of `u(a)`.
fn rank_successors<'a>(faces: &'a FaceSet, mate: &'a [u32], a: usize) -> impl Iterator<Item = usize> + 'a {
    let up = faces.get(mate[a] as usize);
    up.facets()
        .filter_map(move |(_, g)| faces.position(g))
        .filter(move |&p| p != a && is_matched_up(faces, mate, p))
}

/// Depth-first search over the rank digraphs. Any directed cycle of the
/// modified Hasse diagram lives between two adjacent ranks, so this finds
/// one if it exists.
fn find_cycle(faces: &FaceSet, mate: &[u32]) -> Option<Vec<u32>> {
    const WHITE: u8 = 0;
    const GRAY: u8 = 1;
    const BLACK: u8 = 2;
    let n = faces.len();
    let mut color = vec![WHITE; n];
    for start in 0..n {
        if color[start] != WHITE || !is_matched_up(faces, mate, start) {
            continue;
        }
        // Stack of (node, pending successors).
        let mut stack: Vec<(usize, Vec<usize>)> = vec![(start, rank_successors(faces, mate, start).collect())];
        color[start] = GRAY;
        while let Some((node, pending)) = stack.last_mut() {
            let node = *node;
            match pending.pop() {
                Some(next) if color[next] == GRAY => {
                    let from = stack.iter().position(|(v, _)| *v == next).unwrap();
                    let mut cycle = Vec::new();
                    for (v, _) in &stack[from..] {
                        cycle.push(*v as u32);
                        cycle.push(mate[*v]);
                    }
                    return Some(cycle);
                }
                Some(next) if color[next] == WHITE => {
                    color[next] = GRAY;
                    let succ = rank_successors(faces, mate, next).collect();
                    stack.push((next, succ));
                }
                Some(_) => {}
                None => {
                    color[node] = BLACK;
                    stack.pop();
                }
            }
        }
    }
    None
}

/// Kahn's algorithm on the full modified Hasse digraph, followed by a replay
/// that checks every edge points forward in the produced order.
fn linear_extension(faces: &FaceSet, mate: &[u32]) -> Result<Vec<Face>> {
    let n = faces.len();
    let successors = |x: usize, out: &mut Vec<usize>| {
        out.clear();
        let f = faces.get(x);
        for (_, g) in f.facets() {
            if let Some(p) = faces.position(g) {
                if mate[p] != x as u32 {
                    out.push(p);
                }
            }
        }
        if is_matched_up(faces, mate, x) {
            out.push(mate[x] as usize);
        }
    };
    let mut indeg = vec![0u32; n];
    let mut buf = Vec::new();
    for x in 0..n {
        successors(x, &mut buf);
        for &y in &buf {
            indeg[y] += 1;
        }
    }
    let mut queue: VecDeque<usize> = (0..n).filter(|&x| indeg[x] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(x) = queue.pop_front() {
        order.push(x);
        successors(x, &mut buf);
        for &y in &buf {
            indeg[y] -= 1;
            if indeg[y] == 0 {
                queue.push_back(y);
            }
        }
    }
    if order.len() != n {
        return Err(Error::structural(
            "modified Hasse digraph has a cycle that the rank-wise search missed",
        ));
    }
    let mut rank = vec![0u32; n];
    for (r, &x) in order.iter().enumerate() {
        rank[x] = r as u32;
    }
    for x in 0..n {
        successors(x, &mut buf);
        if buf.iter().any(|&y| rank[y] <= rank[x]) {
            return Err(Error::structural("linear extension failed replay"));
        }
    }
    Ok(order.into_iter().map(|p| faces.get(p)).collect())
}
