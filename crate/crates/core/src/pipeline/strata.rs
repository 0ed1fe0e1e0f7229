use std::collections::BTreeMap;
use std::sync::Arc;

use super::{collapse_s_to_sg_with, gbit, gmask, BettiCheck};
use crate::complex::{face_cap_from_env, neighborhood_complex};
use crate::error::{Error, Result};
use crate::face::{Face, FaceSet};
use crate::kneser::{kneser_graph, s_graph, stable_kneser_graph, GroundParam, Universe};
use crate::morse::{cluster_compose, element_matching, greedy_morse_matching, verify_matching, Matching, MorseReport};

/// One block `E_j` of a stratum, split by the first index `t` at which the
/// face stops containing `jt` with `t` otherwise free.
#[derive(Clone, Debug)]
pub struct EClass {
    pub j: u32,
    /// `I_j^i = [n] ∖ {i, i+1, j-1, j, j+1}`, ascending.
    pub index_set: Vec<u32>,
    pub faces: FaceSet,
    /// `(t, F_{j,t})` for every `t` in `index_set`.
    pub by_t: Vec<(u32, FaceSet)>,
    /// Faces passing every `t`; a single face.
    pub critical: FaceSet,
}

#[derive(Clone, Debug)]
pub struct Stratum {
    pub i: u32,
    /// Faces of `N(KG)` outside `N(S)` whose common neighbors include `i(i+1)`.
    pub faces: FaceSet,
    /// `I_i = [n] ∖ {i-1, i, i+1}` in cyclic order starting at `i+2`.
    pub index_set: Vec<u32>,
    pub classes: Vec<EClass>,
}

#[derive(Clone, Debug)]
pub struct Stratification {
    pub k: u32,
    pub universe: Arc<Universe>,
    pub kneser_faces: FaceSet,
    pub s_faces: FaceSet,
    pub strata: Vec<Stratum>,
}

impl Stratification {
    /// Stratum index (1-based) of a face, or 0 for faces of `N(S)`.
    pub fn label_of(&self, f: Face) -> u32 {
        self.strata.iter().find(|s| s.faces.contains(f)).map_or(0, |s| s.i)
    }
}

fn cyclic_index_set(u: &Universe, i: u32) -> Vec<u32> {
    let n = u.n() as i64;
    (2..n - 1).map(|d| u.param().reduce(i as i64 + d)).collect()
}

fn index_set_ij(u: &Universe, i: u32, j: u32) -> Vec<u32> {
    let skip = gmask(u, &[i as i64, i as i64 + 1, j as i64 - 1, j as i64, j as i64 + 1]);
    (1..=u.n()).filter(|&x| gbit(u, x as i64) & skip == 0).collect()
}

/// Splits `N(KG)` into `N(S)` and the strata `X_{i,i+1}`, checking that
/// the pieces are disjoint and exhaust `N(KG)`.
pub fn stratify(k: u32) -> Result<Stratification> {
    stratify_with(k, face_cap_from_env())
}

pub fn stratify_with(k: u32, cap: u64) -> Result<Stratification> {
    let p = GroundParam::new(k)?;
    let kg = neighborhood_complex(&kneser_graph(p))?.enumerate_faces(true, cap)?;
    let s = neighborhood_complex(&s_graph(p))?.enumerate_faces(true, cap)?;
    let u = Universe::new(p);
    if !s.is_subset(&kg) {
        return Err(Error::structural("N(S) is not inside N(KG)"));
    }
    let n = u.n();
    let mut buckets: Vec<Vec<Face>> = vec![Vec::new(); n as usize];
    for f in kg.iter().filter(|f| !s.contains(*f)) {
        let c = u.complement_mask(f);
        let hosts: Vec<u32> =
            (1..=n).filter(|&i| c & gmask(&u, &[i as i64, i as i64 + 1]) == gmask(&u, &[i as i64, i as i64 + 1])).collect();
        let [i] = hosts[..] else {
            return Err(Error::structural(format!("{f:?} lies in {} strata", hosts.len())));
        };
        // Independent characterization: complement exactly {i, i+1} and some other j(j+1) present.
        let other_unstable = (1..=n).filter(|&j| j != i).any(|j| f.contains(u.unstable_index(j as i64)));
        if c != gmask(&u, &[i as i64, i as i64 + 1]) || !other_unstable {
            return Err(Error::structural(format!("{f:?} in stratum {i} fails the complement characterization")));
        }
        buckets[i as usize - 1].push(f);
    }
    let mut strata = Vec::with_capacity(n as usize);
    let mut total = s.len();
    for (idx, faces) in buckets.into_iter().enumerate() {
        let i = idx as u32 + 1;
        let faces = FaceSet::new(faces);
        total += faces.len();
        let classes = classify_stratum(&u, i, &faces)?;
        strata.push(Stratum { i, faces, index_set: cyclic_index_set(&u, i), classes });
    }
    if total != kg.len() {
        return Err(Error::structural("strata and N(S) do not add up to N(KG)"));
    }
    Ok(Stratification { k, universe: u, kneser_faces: kg, s_faces: s, strata })
}

/// `j(j+1) ∈ σ` and `t ∈ C_{σ ∖ jt}`.
fn passes(u: &Universe, f: Face, j: u32, t: u32) -> bool {
    let jt = u.pair_index(j as i64, t as i64);
    f.contains(jt) && u.complement_mask(f.without(jt)) & gbit(u, t as i64) != 0
}

/// Partitions a stratum into the blocks `E_j` (by the first `j` in cyclic
/// order from `i+2` with `j(j+1) ∈ σ`) and each block by the first failing
/// `t`. Every face is re-checked against the block predicates written out
/// directly, which must hold for exactly one block.
pub fn classify_stratum(u: &Universe, i: u32, faces: &FaceSet) -> Result<Vec<EClass>> {
    let order = cyclic_index_set(u, i);
    let mut by_j: BTreeMap<u32, Vec<Face>> = order.iter().map(|&j| (j, Vec::new())).collect();
    for f in faces.iter() {
        let j = order
            .iter()
            .copied()
            .find(|&j| f.contains(u.unstable_index(j as i64)))
            .ok_or_else(|| Error::structural(format!("{f:?} in stratum {i} has no j(j+1) with j in I_i")))?;
        by_j.get_mut(&j).unwrap().push(f);
    }
    // Predicate form of E_j: contains j(j+1), and no s(s+1) for s before j in the order.
    for (pos, &j) in order.iter().enumerate() {
        for &f in &by_j[&j] {
            let ok = f.contains(u.unstable_index(j as i64))
                && order[..pos].iter().all(|&s| !f.contains(u.unstable_index(s as i64)));
            if !ok {
                return Err(Error::structural(format!("{f:?} misfiled in E_{j} of stratum {i}")));
            }
        }
    }

    let ii = gmask(u, &[i as i64, i as i64 + 1]);
    let mut classes = Vec::with_capacity(order.len());
    for &j in &order {
        let index_set = index_set_ij(u, i, j);
        let e = FaceSet::new(by_j.remove(&j).unwrap_or_default());
        let mut by_t: Vec<(u32, Vec<Face>)> = index_set.iter().map(|&t| (t, Vec::new())).collect();
        let mut critical = Vec::new();
        for f in e.iter() {
            match index_set.iter().position(|&t| !passes(u, f, j, t)) {
                Some(p) => by_t[p].1.push(f),
                None => critical.push(f),
            }
            // Literal predicates: F_{j,t} for each t, and F_j.
            let mut hits = 0;
            for (p, &t) in index_set.iter().enumerate() {
                let prefix = index_set[..p].iter().all(|&r| {
                    let jr = u.pair_index(j as i64, r as i64);
                    f.contains(jr) && u.complement_mask(f.without(jr)) & gbit(u, r as i64) != 0
                });
                let jt = u.pair_index(j as i64, t as i64);
                let at_t = !f.contains(jt) || u.complement_mask(f.without(jt)) == ii;
                hits += usize::from(prefix && at_t);
            }
            let all = index_set.iter().all(|&s| {
                let js = u.pair_index(j as i64, s as i64);
                f.contains(js) && u.complement_mask(f.without(js)) == ii | gbit(u, s as i64)
            });
            hits += usize::from(all);
            if hits != 1 {
                return Err(Error::structural(format!("{f:?} satisfies {hits} block predicates in E_{j} of stratum {i}")));
            }
        }
        classes.push(EClass {
            j,
            index_set,
            faces: e,
            by_t: by_t.into_iter().map(|(t, v)| (t, FaceSet::new(v))).collect(),
            critical: FaceSet::new(critical),
        });
    }
    Ok(classes)
}

/// The single critical face of `E_j` in stratum `i`:
/// `{(j-1)(j+1), j(j+1)} ∪ {jr : r ∈ I_j^i}`, where `(j-1)(j+1)` is left
/// out when `j-1 = i+1` (it would meet the complement).
pub fn explicit_critical_cell(u: &Universe, i: u32, j: u32) -> Face {
    let (ji, ii) = (j as i64, i as i64);
    let mut f = Face::EMPTY.with(u.unstable_index(ji));
    if u.param().reduce(ji - 1) != u.param().reduce(ii + 1) {
        f = f.with(u.pair_index(ji - 1, ji + 1));
    }
    for r in index_set_ij(u, i, j) {
        f = f.with(u.pair_index(ji, r as i64));
    }
    f
}

/// The global matching on the face poset of `N(KG)` (empty face included)
/// and everything needed to audit it.
#[derive(Clone, Debug)]
pub struct GlobalMatching {
    pub k: u32,
    pub universe: Arc<Universe>,
    pub stratification: Stratification,
    /// `(i, critical faces of the stratum matching)`.
    pub strata_critical: Vec<(u32, Vec<Face>)>,
    /// Stratum critical faces that equal the explicit formula.
    pub strata_formula_matches: usize,
    /// Matching on `N(S)`: collapse matchings plus a greedy matching on `N(SG)`.
    pub r_matching: Matching,
    pub r_report: MorseReport,
    pub matching: Matching,
    pub report: MorseReport,
}

impl GlobalMatching {
    pub fn strata_critical_count(&self) -> usize {
        self.strata_critical.iter().map(|(_, v)| v.len()).sum()
    }
}

pub fn global_matching(k: u32) -> Result<GlobalMatching> {
    let cap = face_cap_from_env();
    let strat = stratify_with(k, cap)?;
    let u = strat.universe.clone();
    let n = u.n();

    let mut strata_critical = Vec::new();
    let mut strata_matchings = Vec::new();
    let mut formula_matches = 0;
    for stratum in &strat.strata {
        let mut e_matchings = Vec::new();
        for (pos, class) in stratum.classes.iter().enumerate() {
            let mut fibers = Vec::new();
            for (t, ft) in &class.by_t {
                let jt = u.pair_index(class.j as i64, *t as i64);
                let (m, delta) = element_matching(ft, jt);
                if &delta != ft {
                    return Err(Error::structural(format!(
                        "F_{{{},{t}}} of stratum {} is not perfectly matched by toggling {jt}",
                        class.j, stratum.i
                    )));
                }
                fibers.push((n + 1 - t, m));
            }
            let label = |f: Face| {
                class.by_t.iter().find(|(_, s)| s.contains(f)).map_or(0, |(t, _)| n + 1 - t)
            };
            let (m, _) = cluster_compose(&class.faces, label, fibers)?;
            // Earlier in the cyclic order gets the larger label.
            e_matchings.push((n - pos as u32, m));
        }
        let label = |f: Face| {
            let pos = stratum.classes.iter().position(|c| c.faces.contains(f)).unwrap_or(0);
            n - pos as u32
        };
        let (m, report) = cluster_compose(&stratum.faces, label, e_matchings)?;
        let crit = report.critical_faces();
        for c in &crit {
            let j_match = stratum.classes.iter().any(|cl| *c == explicit_critical_cell(&u, stratum.i, cl.j));
            formula_matches += usize::from(j_match);
        }
        strata_critical.push((stratum.i, crit));
        strata_matchings.push((n + 1 - stratum.i, m));
    }

    let collapse = collapse_s_to_sg_with(k, BettiCheck::Off, cap)?;
    let sg = neighborhood_complex(&stable_kneser_graph(u.param()))?.enumerate_faces(true, cap)?;
    let mut r = collapse.matching.clone();
    r.extend(&greedy_morse_matching(&sg));
    let r_report = verify_matching(&strat.s_faces, &r)?;
    if !r_report.acyclic {
        return Err(Error::NotAcyclic("matching on N(S) has a cycle".into()));
    }
    strata_matchings.push((0, r.clone()));

    let label = |f: Face| {
        let i = strat.label_of(f);
        if i == 0 {
            0
        } else {
            n + 1 - i
        }
    };
    let (matching, report) = cluster_compose(&strat.kneser_faces, label, strata_matchings)?;
    Ok(GlobalMatching {
        k,
        universe: u,
        stratification: strat,
        strata_critical,
        strata_formula_matches: formula_matches,
        r_matching: r,
        r_report,
        matching,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_sets() {
        let u = Universe::for_k(1).unwrap();
        assert_eq!(cyclic_index_set(&u, 1), vec![3, 4]);
        assert_eq!(cyclic_index_set(&u, 4), vec![1, 2]);
        assert_eq!(cyclic_index_set(&u, 5), vec![2, 3]);
        assert_eq!(index_set_ij(&u, 1, 4), Vec::<u32>::new());
        let u3 = Universe::for_k(3).unwrap();
        assert_eq!(index_set_ij(&u3, 1, 5), vec![3, 7]);
        assert_eq!(index_set_ij(&u3, 1, 3), vec![5, 6, 7]);
    }

    #[test]
    fn decomposition_counts() {
        for k in 0..=2 {
            let s = stratify(k).unwrap();
            let sum: usize = s.strata.iter().map(|x| x.faces.len()).sum();
            assert_eq!(s.kneser_faces.len(), s.s_faces.len() + sum);
            for stratum in &s.strata {
                let ii = gmask(&s.universe, &[stratum.i as i64, stratum.i as i64 + 1]);
                assert!(stratum.faces.iter().all(|f| s.universe.complement_mask(f) == ii));
            }
        }
    }

    #[test]
    fn critical_cells_are_explicit() {
        for k in 1..=2 {
            let s = stratify(k).unwrap();
            for stratum in &s.strata {
                assert_eq!(stratum.classes.len(), k as usize + 1);
                for class in &stratum.classes {
                    assert_eq!(class.critical, FaceSet::new([explicit_critical_cell(&s.universe, stratum.i, class.j)]));
                    assert_eq!(class.critical.get(0).len(), k as usize + 1);
                }
            }
        }
    }

    #[test]
    fn k1_global_matching() {
        let gm = global_matching(1).unwrap();
        assert!(gm.report.acyclic);
        assert_eq!(gm.strata_critical_count(), 10);
        assert_eq!(gm.strata_formula_matches, 10);
        assert!(gm.strata_critical.iter().all(|(_, v)| v.iter().all(|f| f.dim() == 1)));
    }
}
