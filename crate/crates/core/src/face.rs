//! Bitmask-encoded faces and sorted, indexed face lists.
//!
//! A [`Face`] is a set of vertex indices packed into a `u64`. The meaning of
//! an index is supplied by a [`Universe`](crate::kneser::Universe); the Morse
//! and homology code never needs it and works on raw masks.

use std::fmt;

use rustc_hash::FxHashMap;

/// A finite set of vertex indices below 64.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Face(pub u64);

impl Face {
    pub const EMPTY: Face = Face(0);

    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Face {
        Face(indices.into_iter().fold(0u64, |m, i| m | (1u64 << i)))
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// `|σ| - 1`; the empty face has dimension -1.
    pub fn dim(self) -> isize {
        self.len() as isize - 1
    }

    pub fn contains(self, index: usize) -> bool {
        self.0 >> index & 1 == 1
    }

    pub fn with(self, index: usize) -> Face {
        Face(self.0 | 1u64 << index)
    }

    pub fn without(self, index: usize) -> Face {
        Face(self.0 & !(1u64 << index))
    }

    pub fn is_subset(self, other: Face) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: Face) -> Face {
        Face(self.0 | other.0)
    }

    pub fn minus(self, other: Face) -> Face {
        Face(self.0 & !other.0)
    }

    /// Vertex indices in increasing order.
    pub fn indices(self) -> Indices {
        Indices(self.0)
    }

    /// Codimension-one faces, paired with the removed index.
    pub fn facets(self) -> impl Iterator<Item = (usize, Face)> {
        self.indices().map(move |i| (i, self.without(i)))
    }

    /// If `self` covers `lower` (one extra vertex), the added index.
    pub fn added_over(self, lower: Face) -> Option<usize> {
        if !lower.is_subset(self) {
            return None;
        }
        let extra = self.0 & !lower.0;
        (extra.count_ones() == 1).then(|| extra.trailing_zeros() as usize)
    }

    /// Sort key of the canonical face order: cardinality, then mask value.
    pub fn order_key(self) -> (u32, u64) {
        (self.0.count_ones(), self.0)
    }
}

impl fmt::Debug for Face {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.indices()).finish()
    }
}

impl fmt::Display for Face {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl PartialOrd for Face {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Face {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.order_key().cmp(&other.order_key())
    }
}

pub struct Indices(u64);

impl Iterator for Indices {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(i)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Indices {}

/// All submasks of `mask`, including `0` and `mask` itself.
pub fn submasks(mask: u64) -> impl Iterator<Item = u64> {
    let mut next = Some(mask);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 { None } else { Some((cur - 1) & mask) };
        Some(cur)
    })
}

/// Deduplicated faces in canonical order with O(1) position lookup.
#[derive(Clone, Default)]
pub struct FaceSet {
    faces: Vec<Face>,
    index: FxHashMap<Face, u32>,
}

impl FaceSet {
    pub fn new<I: IntoIterator<Item = Face>>(faces: I) -> FaceSet {
        let mut faces: Vec<Face> = faces.into_iter().collect();
        faces.sort_unstable();
        faces.dedup();
        Self::from_sorted(faces)
    }

    fn from_sorted(faces: Vec<Face>) -> FaceSet {
        let mut index = FxHashMap::default();
        index.reserve(faces.len());
        for (pos, &f) in faces.iter().enumerate() {
            index.insert(f, pos as u32);
        }
        FaceSet { faces, index }
    }

    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn iter(&self) -> impl Iterator<Item = Face> + '_ {
        self.faces.iter().copied()
    }

    pub fn contains(&self, face: Face) -> bool {
        self.index.contains_key(&face)
    }

    pub fn position(&self, face: Face) -> Option<usize> {
        self.index.get(&face).map(|&p| p as usize)
    }

    pub fn get(&self, pos: usize) -> Face {
        self.faces[pos]
    }

    pub fn filter(&self, mut keep: impl FnMut(Face) -> bool) -> FaceSet {
        Self::from_sorted(self.faces.iter().copied().filter(|&f| keep(f)).collect())
    }

    pub fn union(&self, other: &FaceSet) -> FaceSet {
        FaceSet::new(self.iter().chain(other.iter()))
    }

    pub fn difference(&self, other: &FaceSet) -> FaceSet {
        self.filter(|f| !other.contains(f))
    }

    pub fn is_subset(&self, other: &FaceSet) -> bool {
        self.len() <= other.len() && self.iter().all(|f| other.contains(f))
    }

    /// Union of all vertices used by some face.
    pub fn vertex_mask(&self) -> u64 {
        self.faces.iter().fold(0, |m, f| m | f.0)
    }

    /// Largest dimension present, or `None` if the set has no nonempty face.
    pub fn max_dim(&self) -> Option<isize> {
        self.faces.last().map(|f| f.dim()).filter(|&d| d >= 0)
    }

    /// Face counts indexed by dimension `0..=max_dim` (the empty face is not counted).
    pub fn f_vector(&self) -> Vec<usize> {
        let mut counts = Vec::new();
        for f in &self.faces {
            if f.is_empty() {
                continue;
            }
            let d = f.dim() as usize;
            if counts.len() <= d {
                counts.resize(d + 1, 0);
            }
            counts[d] += 1;
        }
        counts
    }

    /// A missing facet and its face, if the set is not closed under taking
    /// subsets. The empty face is allowed to be absent.
    pub fn downward_closure_violation(&self) -> Option<(Face, Face)> {
        for &f in &self.faces {
            for (_, g) in f.facets() {
                if !g.is_empty() && !self.contains(g) {
                    return Some((g, f));
                }
            }
        }
        None
    }

    pub fn is_downward_closed(&self) -> bool {
        self.downward_closure_violation().is_none()
    }

    pub fn into_vec(self) -> Vec<Face> {
        self.faces
    }
}

impl PartialEq for FaceSet {
    fn eq(&self, other: &Self) -> bool {
        self.faces == other.faces
    }
}

impl Eq for FaceSet {}

impl fmt::Debug for FaceSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.faces.iter()).finish()
    }
}

impl FromIterator<Face> for FaceSet {
    fn from_iter<I: IntoIterator<Item = Face>>(iter: I) -> Self {
        FaceSet::new(iter)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn submasks_enumerates_power_set() {
        let all: Vec<u64> = submasks(0b1011).collect();
        assert_eq!(all.len(), 8);
        assert!(all.contains(&0) && all.contains(&0b1011));
        assert_eq!(submasks(0).count(), 1);
    }

    #[test]
    fn canonical_order_is_by_size_then_mask() {
        let set = FaceSet::new([Face(0b110), Face(0b1), Face(0), Face(0b11), Face(0b1)]);
        assert_eq!(set.faces(), &[Face(0), Face(0b1), Face(0b11), Face(0b110)]);
        assert_eq!(set.position(Face(0b11)), Some(2));
    }

    #[test]
    fn cover_detection() {
        assert_eq!(Face(0b111).added_over(Face(0b101)), Some(1));
        assert_eq!(Face(0b111).added_over(Face(0b001)), None);
        assert_eq!(Face(0b110).added_over(Face(0b001)), None);
    }

    #[test]
    fn downward_closure() {
        let closed = FaceSet::new([Face(0), Face(1), Face(2), Face(3)]);
        assert!(closed.is_downward_closed());
        let open = FaceSet::new([Face(0), Face(1), Face(3)]);
        assert_eq!(open.downward_closure_violation(), Some((Face(2), Face(3))));
    }
}
