use std::collections::BTreeMap;
use std::sync::Arc;

use super::gmask;
use crate::complex::{face_cap_from_env, neighborhood_complex, SimplicialComplex};
use crate::error::{Error, Result};
use crate::face::{submasks, Face, FaceSet};
use crate::homology::{betti, BettiVector, Ring};
use crate::kneser::{s_graph, stable_kneser_graph, GroundParam, Graph, Universe};
use crate::morse::{cluster_compose, collapse_by_matching, element_matching, CollapseTrace, Matching};

/// Mask of the unstable vertices `12, 23, …, (l-1)l` deleted to form `W^l`.
pub fn removed_vertices(u: &Universe, l: u32) -> u64 {
    (1..l as i64).fold(0u64, |m, i| m | 1 << u.unstable_index(i))
}

fn check_l(k: u32, l: u32, top: u32) -> Result<()> {
    if l < 1 || l > k + top {
        return Err(Error::domain(format!("l = {l} is outside 1..={} for k = {k}", k + top)));
    }
    Ok(())
}

/// `S` with the vertices `12, …, (l-1)l` deleted.
pub fn w_graph(param: GroundParam, l: u32) -> Result<Graph> {
    check_l(param.k(), l, 5)?;
    let s = s_graph(param);
    let removed = removed_vertices(s.universe(), l);
    Ok(s.without_vertices(removed, format!("W{l}")))
}

/// `W^l = N(S ∖ {12, …, (l-1)l})`, for `1 ≤ l ≤ k+5`.
pub fn w_complex(k: u32, l: u32) -> Result<SimplicialComplex> {
    let g = w_graph(GroundParam::new(k)?, l)?;
    let c = neighborhood_complex(&g)?;
    Ok(SimplicialComplex::from_generators(g.universe().clone(), format!("W^{l}"), c.generators().iter().copied()))
}

fn w_faces(k: u32, l: u32, cap: u64) -> Result<FaceSet> {
    w_complex(k, l)?.enumerate_faces(true, cap)
}

fn fiber_complement(u: &Universe, l: u32) -> u32 {
    gmask(u, &[l as i64, l as i64 + 1])
}

/// Faces `σ` of `W^l` with `C_σ = {l, l+1}`.
///
/// Their only possible common neighbor is the unstable `l(l+1)`, so they are
/// the all-stable subsets of its neighborhood with exactly that complement.
pub fn pair_fiber(k: u32, l: u32) -> Result<FaceSet> {
    check_l(k, l, 4)?;
    let u = Universe::for_k(k)?;
    fiber_in(&u, l, face_cap_from_env())
}

fn fiber_in(u: &Universe, l: u32, cap: u64) -> Result<FaceSet> {
    let target = fiber_complement(u, l);
    let nbhd = u.vertices_avoiding(target) & u.stable_mask();
    let estimate = 1u64.checked_shl(nbhd.count_ones()).unwrap_or(u64::MAX);
    if estimate > cap {
        return Err(Error::CapExceeded { estimate, cap });
    }
    Ok(submasks(nbhd).map(Face).filter(|&f| !f.is_empty() && u.complement_mask(f) == target).collect())
}

/// Perfect acyclic matching on [`pair_fiber`], built recursively from the
/// fibers at `k-1` and `k-2` transported by shifts.
pub fn pair_fiber_matching(k: u32, l: u32) -> Result<Matching> {
    check_l(k, l, 4)?;
    let cap = face_cap_from_env();
    let mut memo = BTreeMap::new();
    let u = Universe::for_k(k)?;
    Ok(build_fiber(&u, l, cap, &mut memo)?.1)
}

type Memo = BTreeMap<(u32, u32), (FaceSet, Matching)>;

fn build_fiber(u: &Arc<Universe>, l: u32, cap: u64, memo: &mut Memo) -> Result<(FaceSet, Matching)> {
    let k = u.k();
    if let Some(hit) = memo.get(&(k, l)) {
        return Ok(hit.clone());
    }
    let fiber = fiber_in(u, l, cap)?;
    let out = if k <= 1 {
        if !fiber.is_empty() {
            return Err(Error::structural(format!("fiber over l(l+1) is nonempty for k = {k}")));
        }
        (fiber, Matching::new())
    } else {
        let li = l as i64;
        let x = u.pair_index(li + 2, li + k as i64 + 3);
        let (mx, delta_x) = element_matching(&fiber, x);
        if k == 2 {
            if delta_x != fiber {
                return Err(Error::structural(format!("k = 2 fiber at l = {l} is not covered by one element matching")));
            }
            (fiber, mx)
        } else {
            let m = fiber_recursive(u, l, cap, memo, &fiber, x, mx, &delta_x)?;
            (fiber, m)
        }
    };
    memo.insert((k, l), out.clone());
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn fiber_recursive(
    u: &Arc<Universe>,
    l: u32,
    cap: u64,
    memo: &mut Memo,
    fiber: &FaceSet,
    x: usize,
    mx: Matching,
    delta_x: &FaceSet,
) -> Result<Matching> {
    let k = u.k();
    let li = l as i64;
    let base = fiber_complement(u, l);
    let (d1, d2, d3) = (
        base | gmask(u, &[li + 2, li + k as i64 + 3]),
        base | gmask(u, &[li + k as i64 + 3]),
        base | gmask(u, &[li + 2]),
    );
    let mut blocks: [Vec<Face>; 3] = Default::default();
    for f in fiber.iter().filter(|f| !delta_x.contains(*f)) {
        if !f.contains(x) {
            return Err(Error::structural(format!("fiber face {f:?} outside the element matching lacks {x}")));
        }
        let c = u.complement_mask(f.without(x));
        let slot = [d1, d2, d3].iter().position(|&d| d == c).ok_or_else(|| {
            Error::structural(format!("fiber face {f:?} falls in none of the recursive blocks"))
        })?;
        blocks[slot].push(f);
    }
    let blocks: Vec<FaceSet> = blocks.into_iter().map(FaceSet::new).collect();

    let small2 = Universe::for_k(k - 2)?;
    let small1 = Universe::for_k(k - 1)?;
    let (fib2, n2) = build_fiber(&small2, 1, cap, memo)?;
    let (fib1, n1) = build_fiber(&small1, 1, cap, memo)?;

    let transport = |small: &Universe, shift: i64| {
        let u = u.clone();
        let small = small.vertices().to_vec();
        move |f: Face| {
            let embedded = Face::from_indices(f.indices().map(|i| u.index_of(small[i])));
            u.shift_face(embedded, shift).with(x)
        }
    };
    let f_map = transport(&small2, li);
    let g_map = transport(&small1, li - 1);
    let h_map = transport(&small1, li);
    let mut transported = Vec::new();
    for (label, (src, m, map, block)) in [
        (&fib2, &n2, &f_map as &dyn Fn(Face) -> Face, &blocks[0]),
        (&fib1, &n1, &g_map, &blocks[1]),
        (&fib1, &n1, &h_map, &blocks[2]),
    ]
    .into_iter()
    .enumerate()
    {
        let image: FaceSet = src.iter().map(map).collect();
        if image.len() != src.len() {
            return Err(Error::structural(format!("transport map {} is not injective", label + 1)));
        }
        if &image != block {
            return Err(Error::structural(format!(
                "transport map {} does not land exactly on its block at k = {k}, l = {l}",
                label + 1
            )));
        }
        transported.push((label as u8 + 1, m.map(map)));
    }
    transported.push((4u8, mx));

    let label_of = |f: Face| {
        if delta_x.contains(f) {
            4u8
        } else {
            1 + blocks.iter().position(|b| b.contains(f)).unwrap_or(0) as u8
        }
    };
    let (m, report) = cluster_compose(fiber, label_of, transported)?;
    if report.critical_total() != 0 {
        return Err(Error::structural(format!(
            "matching on the fiber at k = {k}, l = {l} leaves {} critical faces",
            report.critical_total()
        )));
    }
    Ok(m)
}

/// One step of the second half of the filtration: the faces whose longest
/// common neighbor, read relative to `l`, has length `i + 1`.
#[derive(Clone, Debug)]
pub struct RelativeStage {
    pub i: u32,
    pub fiber: FaceSet,
    pub matching: Matching,
    /// Bucket `s` (the smallest free element, relative to `l`) → faces in it.
    pub buckets: BTreeMap<u32, usize>,
}

/// Complement of `σ ⊖ (l-1)` as sorted integers.
fn relative_complement(u: &Universe, face: Face, l: u32) -> Vec<u32> {
    let shifted = u.shift_face(face, -(l as i64 - 1));
    crate::kneser::ground_elements(u.complement_mask(shifted))
}

/// Perfect matchings realizing `A^l ↘ W^{l+1}` in `k` stages.
///
/// `a` and `w_next` are the face sets of `A^l` and `W^{l+1}`.
pub fn relative_stages(u: &Universe, l: u32, a: &FaceSet, w_next: &FaceSet) -> Result<Vec<RelativeStage>> {
    let k = u.k();
    let li = l as i64;
    let top = u.unstable_index(li);
    let diff = a.difference(w_next);
    if !w_next.is_subset(a) {
        return Err(Error::structural(format!("W^{} is not inside A^{l}", l + 1)));
    }
    // Relative data: (face, i, s).
    let mut tagged: Vec<(Face, u32, u32)> = Vec::with_capacity(diff.len());
    for f in diff.iter() {
        if !f.contains(top) {
            return Err(Error::structural(format!("{f:?} lies in A^{l} minus W^{} but avoids l(l+1)", l + 1)));
        }
        let c = relative_complement(u, f, l);
        let (Some(&lo), Some(&hi)) = (c.first(), c.last()) else {
            return Err(Error::structural(format!("{f:?} has an empty complement")));
        };
        if lo < 3 || hi - lo < 2 {
            return Err(Error::structural(format!("{f:?} has no stable common neighbor clear of 1 and 2")));
        }
        let i = hi - lo - 1;
        if i < 1 || i > k {
            return Err(Error::structural(format!("{f:?} has relative length {} out of range", hi - lo)));
        }
        tagged.push((f, i, lo));
    }

    let mut stages = Vec::with_capacity(k as usize);
    let mut current = a.clone();
    for i in 1..=k {
        let fiber: FaceSet = tagged.iter().filter(|t| t.1 == i).map(|t| t.0).collect();
        let mut m = Matching::new();
        let mut buckets: BTreeMap<u32, usize> = BTreeMap::new();
        for &(f, _, s) in tagged.iter().filter(|t| t.1 == i) {
            *buckets.entry(s).or_default() += 1;
            let x = u.pair_index(li + 1, li + s as i64);
            let partner = if f.contains(x) { f.without(x) } else { f.with(x) };
            if !fiber.contains(partner) {
                return Err(Error::structural(format!("{f:?} has no partner inside stage {i} at l = {l}")));
            }
            if !f.contains(x) {
                m.push(f, partner);
            }
        }
        check_buckets(u, l, i, &fiber)?;
        let (m, _) = cluster_compose(&current, |f| fiber.contains(f), [(true, m)])?;
        current = current.difference(&fiber);
        stages.push(RelativeStage { i, fiber, matching: m, buckets });
    }
    if &current != w_next {
        return Err(Error::structural(format!("stages at l = {l} do not end at W^{}", l + 1)));
    }
    Ok(stages)
}

/// Each fiber face satisfies the bucket predicate for exactly one `s`:
/// toggling `(l+1)(l+s)` stays in the fiber and the lower face's relative
/// complement sits inside `{s, …, s+i+1}`.
fn check_buckets(u: &Universe, l: u32, i: u32, fiber: &FaceSet) -> Result<()> {
    let k = u.k();
    let li = l as i64;
    for f in fiber.iter() {
        let mut hits = 0;
        for s in 3..=(k + 3 - i) {
            let x = u.pair_index(li + 1, li + s as i64);
            let (lo, hi) = (f.without(x), f.with(x));
            if lo == hi || !fiber.contains(lo) || !fiber.contains(hi) {
                continue;
            }
            let c = relative_complement(u, lo, l);
            if c.iter().all(|&e| e >= s && e <= s + i + 1) {
                hits += 1;
            }
        }
        if hits != 1 {
            return Err(Error::structural(format!("{f:?} lies in {hits} buckets at stage {i}, l = {l}")));
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BettiCheck {
    Off,
    /// After every matching-driven collapse.
    PerStage,
    /// After every elementary collapse as well.
    PerStep,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StageKind {
    /// `W^l ↘ A^l`.
    RemoveFiber,
    /// `B_i ↘ B_{i+1}` inside `A^l ↘ W^{l+1}`.
    Relative { i: u32 },
}

#[derive(Clone, Debug)]
pub struct StageRecord {
    pub l: u32,
    pub kind: StageKind,
    pub faces_before: usize,
    pub faces_after: usize,
    pub pairs: usize,
    pub betti_preserved: Option<bool>,
}

/// Everything produced while collapsing `N(S)` onto `N(SG)`.
#[derive(Clone, Debug)]
pub struct SToSgCollapse {
    pub k: u32,
    pub universe: Arc<Universe>,
    pub initial: FaceSet,
    pub stages: Vec<StageRecord>,
    pub trace: CollapseTrace,
    /// Union of every stage matching; acyclic on `initial`.
    pub matching: Matching,
    pub initial_betti: BettiVector,
}

impl SToSgCollapse {
    pub fn all_betti_preserved(&self) -> Option<bool> {
        let checked: Vec<bool> = self.stages.iter().filter_map(|s| s.betti_preserved).collect();
        (!checked.is_empty()).then(|| checked.iter().all(|&b| b))
    }
}

pub fn collapse_s_to_sg(k: u32) -> Result<SToSgCollapse> {
    let check = if k <= 3 { BettiCheck::PerStage } else { BettiCheck::Off };
    collapse_s_to_sg_with(k, check, face_cap_from_env())
}

/// Runs the whole filtration `W^1 ↘ A^1 ↘ W^2 ↘ … ↘ W^{k+5}`, checking each
/// intermediate complex against an independent construction.
pub fn collapse_s_to_sg_with(k: u32, check: BettiCheck, cap: u64) -> Result<SToSgCollapse> {
    let u = Universe::for_k(k)?;
    let initial = w_faces(k, 1, cap)?;
    let initial_betti = betti(initial.faces(), Ring::Gf2)?;
    let same_betti = |faces: &FaceSet| -> Result<bool> { Ok(betti(faces.faces(), Ring::Gf2)? == initial_betti) };

    let mut current = initial.clone();
    let mut stages = Vec::new();
    let mut steps = Vec::new();
    let mut matching = Matching::new();
    let mut memo = BTreeMap::new();

    let mut run = |l: u32, kind: StageKind, from: &FaceSet, m: &Matching, stages: &mut Vec<StageRecord>| -> Result<FaceSet> {
        let trace = collapse_by_matching(from, m)?;
        let betti_preserved = match check {
            BettiCheck::Off => None,
            BettiCheck::PerStage => Some(same_betti(&trace.residual)?),
            BettiCheck::PerStep => {
                let mut alive: rustc_hash::FxHashSet<Face> = from.iter().collect();
                let mut ok = true;
                for &(d, up) in &trace.steps {
                    alive.remove(&d);
                    alive.remove(&up);
                    let faces: Vec<Face> = alive.iter().copied().collect();
                    ok &= betti(&faces, Ring::Gf2)? == initial_betti;
                }
                Some(ok)
            }
        };
        stages.push(StageRecord {
            l,
            kind,
            faces_before: from.len(),
            faces_after: trace.residual.len(),
            pairs: m.len(),
            betti_preserved,
        });
        steps.extend_from_slice(&trace.steps);
        matching.extend(m);
        Ok(trace.residual)
    };

    for l in 1..=k + 4 {
        let target = fiber_complement(&u, l);
        let (fiber, fiber_matching) = build_fiber(&u, l, cap, &mut memo)?;
        if fiber != current.filter(|f| u.complement_mask(f) == target) {
            return Err(Error::structural(format!("fiber at l = {l} differs from the filter of W^{l}")));
        }
        let (m, _) = cluster_compose(&current, |f| fiber.contains(f), [(true, fiber_matching)])?;
        let a = run(l, StageKind::RemoveFiber, &current, &m, &mut stages)?;
        if a != current.filter(|f| u.complement_mask(f) != target) {
            return Err(Error::structural(format!("collapse at l = {l} did not end at A^{l}")));
        }

        let w_next = w_faces(k, l + 1, cap)?;
        let mut b = a.clone();
        for stage in relative_stages(&u, l, &a, &w_next)? {
            b = run(l, StageKind::Relative { i: stage.i }, &b, &stage.matching, &mut stages)?;
        }
        if b != w_next {
            return Err(Error::structural(format!("collapses at l = {l} did not end at W^{}", l + 1)));
        }
        current = b;
    }

    let sg = neighborhood_complex(&stable_kneser_graph(u.param()))?.enumerate_faces(true, cap)?;
    if current != sg {
        return Err(Error::structural("final residual differs from N(SG)"));
    }
    Ok(SToSgCollapse {
        k,
        universe: u,
        initial,
        stages,
        trace: CollapseTrace { steps, residual: current },
        matching,
        initial_betti,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::DEFAULT_FACE_CAP;
    use crate::kneser::kneser_graph;
    use crate::morse::verify_matching;

    #[test]
    fn end_points_of_the_filtration() {
        for k in 0..=2 {
            let p = GroundParam::new(k).unwrap();
            let s = neighborhood_complex(&s_graph(p)).unwrap().enumerate_faces(true, DEFAULT_FACE_CAP).unwrap();
            let sg =
                neighborhood_complex(&stable_kneser_graph(p)).unwrap().enumerate_faces(true, DEFAULT_FACE_CAP).unwrap();
            assert_eq!(w_faces(k, 1, DEFAULT_FACE_CAP).unwrap(), s);
            assert_eq!(w_faces(k, k + 5, DEFAULT_FACE_CAP).unwrap(), sg);
        }
        assert!(matches!(w_complex(1, 0), Err(Error::Domain(_))));
        assert!(matches!(w_complex(1, 7), Err(Error::Domain(_))));
    }

    #[test]
    fn second_w_complex_by_brute_force() {
        let p = GroundParam::new(1).unwrap();
        let g = kneser_graph(p);
        let u = g.universe().clone();
        let removed = u.unstable_index(1);
        // Brute force: a set of surviving vertices is a face iff some surviving
        // vertex of S is adjacent in S to all of them.
        let s = s_graph(p);
        let alive = u.all_mask() & !(1u64 << removed);
        let brute: FaceSet = submasks(alive)
            .map(Face)
            .filter(|f| {
                f.is_empty()
                    || Face(alive).indices().any(|v| f.indices().all(|w| s.adjacent(u.vertex(v), u.vertex(w))))
            })
            .collect();
        assert_eq!(w_faces(1, 2, DEFAULT_FACE_CAP).unwrap(), brute);
    }

    #[test]
    fn small_fibers() {
        for l in 1..=5 {
            assert!(pair_fiber(1, l).unwrap().is_empty());
            assert!(pair_fiber_matching(1, l).unwrap().is_empty());
        }
        for l in 1..=6u32 {
            let u = Universe::for_k(2).unwrap();
            let li = l as i64;
            let alpha = Face::from_indices([u.pair_index(li + 2, li + 4), u.pair_index(li + 3, li + 5)]);
            let beta = alpha.with(u.pair_index(li + 2, li + 5));
            assert_eq!(pair_fiber(2, l).unwrap(), FaceSet::new([alpha, beta]));
            assert_eq!(pair_fiber_matching(2, l).unwrap().pairs(), &[(alpha, beta)]);
        }
    }

    #[test]
    fn k3_fiber_matching_is_perfect() {
        let u = Universe::for_k(3).unwrap();
        let w1 = w_faces(3, 1, DEFAULT_FACE_CAP).unwrap();
        let fiber = pair_fiber(3, 1).unwrap();
        let target = fiber_complement(&u, 1);
        assert_eq!(fiber, w1.filter(|f| u.complement_mask(f) == target));
        let m = pair_fiber_matching(3, 1).unwrap();
        assert_eq!(m.len() * 2, fiber.len());
        assert!(verify_matching(&fiber, &m).unwrap().acyclic);
    }

    #[test]
    fn collapse_k0_and_k1_with_per_step_homology() {
        for k in 0..=1 {
            let c = collapse_s_to_sg_with(k, BettiCheck::PerStep, DEFAULT_FACE_CAP).unwrap();
            assert_eq!(c.all_betti_preserved(), Some(true));
            assert!(verify_matching(&c.initial, &c.matching).unwrap().acyclic);
        }
        let c0 = collapse_s_to_sg(0).unwrap();
        // N(SG) at k = 0: the two points 13 and 24, plus the empty face.
        assert_eq!(c0.trace.residual.len(), 3);
    }

    #[test]
    fn collapse_k2() {
        let c = collapse_s_to_sg(2).unwrap();
        assert_eq!(c.all_betti_preserved(), Some(true));
        assert!(c.initial_betti.is_wedge_of_spheres(2, 1));
    }
}
