use super::verify::mate_table;
use super::{verify_matching, Matching};
use crate::error::{Error, Result};
use crate::face::{Face, FaceSet};

const UNMATCHED: u32 = u32::MAX;

/// Sequence of elementary collapses `(free face, face removed with it)`.
#[derive(Clone, Debug)]
pub struct CollapseTrace {
    pub steps: Vec<(Face, Face)>,
    pub residual: FaceSet,
}

impl CollapseTrace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// Realizes an acyclic matching whose critical faces form a subcomplex as a
/// sequence of elementary collapses.
///
/// Each step removes a matched pair `(d, u)` where `d` is free: `u` is its
/// only remaining proper coface. The empty face must stay unmatched.
pub fn collapse_by_matching(faces: &FaceSet, m: &Matching) -> Result<CollapseTrace> {
    if let Some((missing, face)) = faces.downward_closure_violation() {
        return Err(Error::domain(format!("not a complex: {face:?} is present but {missing:?} is not")));
    }
    let report = verify_matching(faces, m)?;
    if !report.acyclic {
        return Err(Error::NotAcyclic("matching has a cycle".into()));
    }
    let mate = mate_table(faces, m)?;
    if let Some(p) = faces.position(Face::EMPTY) {
        if mate[p] != UNMATCHED {
            return Err(Error::NotSubcomplex("the empty face is matched".into()));
        }
    }
    for (pos, f) in faces.iter().enumerate() {
        if mate[pos] != UNMATCHED {
            continue;
        }
        for (_, g) in f.facets() {
            if let Some(q) = faces.position(g) {
                if mate[q] != UNMATCHED {
                    return Err(Error::NotSubcomplex(format!(
                        "critical face {f:?} has matched facet {g:?}"
                    )));
                }
            }
        }
    }

    let n = faces.len();
    let mut alive = vec![true; n];
    // Number of alive cofaces one dimension up.
    let mut up_count = vec![0u32; n];
    for f in faces.iter() {
        for (_, g) in f.facets() {
            if let Some(q) = faces.position(g) {
                up_count[q] += 1;
            }
        }
    }
    let is_free_lower = |p: usize, up_count: &[u32]| {
        mate[p] != UNMATCHED && faces.get(mate[p] as usize).len() > faces.get(p).len() && up_count[p] == 1
    };
    let mut work: Vec<usize> = (0..n).rev().filter(|&p| is_free_lower(p, &up_count)).collect();
    let mut steps = Vec::with_capacity(m.len());
    while let Some(p) = work.pop() {
        if !alive[p] || !is_free_lower(p, &up_count) {
            continue;
        }
        let u = mate[p] as usize;
        if !alive[u] || up_count[u] != 0 {
            continue;
        }
        alive[p] = false;
        alive[u] = false;
        steps.push((faces.get(p), faces.get(u)));
        for removed in [u, p] {
            for (_, g) in faces.get(removed).facets() {
                if let Some(q) = faces.position(g) {
                    if alive[q] {
                        up_count[q] -= 1;
                        if is_free_lower(q, &up_count) {
                            work.push(q);
                        } else if up_count[q] == 0 && mate[q] != UNMATCHED {
                            // q is the upper face of its pair; its partner may now be free.
                            work.push(mate[q] as usize);
                        }
                    }
                }
            }
        }
    }

    if steps.len() != m.len() {
        return Err(Error::structural(format!(
            "collapse stalled after {} of {} pairs",
            steps.len(),
            m.len()
        )));
    }
    let residual = FaceSet::new(faces.iter().enumerate().filter(|&(p, _)| alive[p]).map(|(_, f)| f));
    let critical: FaceSet = report.critical_faces().into_iter().collect();
    if residual != critical {
        return Err(Error::structural("collapse residual differs from the critical faces"));
    }
    Ok(CollapseTrace { steps, residual })
}
