//! Ground-set arithmetic on `[k+4]`, 2-subset vertices, and the three graph
//! families `KG(2,k)`, `SG(2,k)` and `S(2,k)`.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::face::Face;

/// Largest supported `k`: all `C(k+4, 2)` vertices must fit in a 64-bit face mask.
pub const MAX_K: u32 = 7;

/// The parameter `k`; the ground set is `[n]` with `n = k + 4`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct GroundParam {
    k: u32,
}

impl GroundParam {
    pub fn new(k: u32) -> Result<GroundParam> {
        if k > MAX_K {
            return Err(Error::domain(format!("k = {k} exceeds the supported maximum {MAX_K}")));
        }
        Ok(GroundParam { k })
    }

    pub fn k(self) -> u32 {
        self.k
    }

    pub fn n(self) -> u32 {
        self.k + 4
    }

    /// Representative of `x mod n` in `{1, ..., n}` (0 becomes `n`).
    pub fn reduce(self, x: i64) -> u32 {
        let n = self.n() as i64;
        ((x - 1).rem_euclid(n) + 1) as u32
    }

    pub fn vertex_count(self) -> usize {
        let n = self.n() as usize;
        n * (n - 1) / 2
    }

    /// Bitmask of the whole ground set, element `x` at bit `x - 1`.
    pub fn ground_mask(self) -> u32 {
        (1u32 << self.n()) - 1
    }
}

/// An unordered pair `{i, j}` stored canonically with `i < j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vertex {
    i: u8,
    j: u8,
}

impl Vertex {
    pub fn new(a: i64, b: i64, param: GroundParam) -> Result<Vertex> {
        canonical_vertex(a, b, param)
    }

    pub fn i(self) -> u32 {
        self.i as u32
    }

    pub fn j(self) -> u32 {
        self.j as u32
    }

    /// `j - i` on the canonical representative.
    pub fn length(self) -> u32 {
        (self.j - self.i) as u32
    }

    pub fn contains(self, x: u32) -> bool {
        self.i() == x || self.j() == x
    }

    pub fn is_disjoint(self, other: Vertex) -> bool {
        self.ground_mask() & other.ground_mask() == 0
    }

    /// The two elements as a ground bitmask (element `x` at bit `x - 1`).
    pub fn ground_mask(self) -> u32 {
        1 << (self.i - 1) | 1 << (self.j - 1)
    }

    pub fn is_stable(self, param: GroundParam) -> bool {
        is_stable(self, param)
    }

    /// Parses the textual form `"i,j"` (either order accepted).
    pub fn parse(token: &str, param: GroundParam) -> Result<Vertex> {
        let (a, b) = token
            .split_once(',')
            .ok_or_else(|| Error::domain(format!("vertex token {token:?} is not of the form i,j")))?;
        let parse = |s: &str| {
            s.trim()
                .parse::<i64>()
                .map_err(|_| Error::domain(format!("vertex token {token:?} has a non-integer element")))
        };
        canonical_vertex(parse(a)?, parse(b)?, param)
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.i, self.j)
    }
}

/// Normalizes `{a, b}` to its canonical vertex.
pub fn canonical_vertex(a: i64, b: i64, param: GroundParam) -> Result<Vertex> {
    let n = param.n() as i64;
    for x in [a, b] {
        if !(1..=n).contains(&x) {
            return Err(Error::domain(format!("{x} is outside the ground set [1, {n}]")));
        }
    }
    if a == b {
        return Err(Error::domain(format!("{{{a}, {b}}} is not a 2-subset")));
    }
    Ok(Vertex { i: a.min(b) as u8, j: a.max(b) as u8 })
}

/// `{i, j}` is stable unless `j = i ± 1` modulo `k + 4`.
pub fn is_stable(v: Vertex, param: GroundParam) -> bool {
    !(v.j == v.i + 1 || (v.i == 1 && v.j() == param.n()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShiftDir {
    Plus,
    Minus,
}

impl ShiftDir {
    fn signed(self, j: i64) -> i64 {
        match self {
            ShiftDir::Plus => j,
            ShiftDir::Minus => -j,
        }
    }
}

/// `v ⊕ j` or `v ⊖ j`: both elements shifted modulo `k + 4`, re-canonicalized.
pub fn shift_vertex(v: Vertex, j: i64, dir: ShiftDir, param: GroundParam) -> Vertex {
    let d = dir.signed(j);
    let a = param.reduce(v.i as i64 + d);
    let b = param.reduce(v.j as i64 + d);
    Vertex { i: a.min(b) as u8, j: a.max(b) as u8 }
}

pub fn shift_simplex(
    sigma: &BTreeSet<Vertex>,
    j: i64,
    dir: ShiftDir,
    param: GroundParam,
) -> BTreeSet<Vertex> {
    sigma.iter().map(|&v| shift_vertex(v, j, dir, param)).collect()
}

/// Elements of a ground bitmask in increasing order.
pub fn ground_elements(mask: u32) -> Vec<u32> {
    (0..32).filter(|b| mask >> b & 1 == 1).map(|b| b + 1).collect()
}

pub fn ground_mask_of(elements: &[u32]) -> u32 {
    elements.iter().fold(0, |m, &x| m | 1 << (x - 1))
}

/// Lookup tables for the vertex set of `KG(2,k)`, which indexes face bitmasks.
///
/// Vertices are numbered lexicographically by `(i, j)`. Every graph and complex
/// for a given `k` shares this numbering, so faces from different complexes
/// are directly comparable.
#[derive(Debug)]
pub struct Universe {
    param: GroundParam,
    vertices: Vec<Vertex>,
    ground: Vec<u32>,
    index: Vec<u8>,
    stable: u64,
}

impl Universe {
    pub fn new(param: GroundParam) -> Arc<Universe> {
        let n = param.n();
        let mut vertices = Vec::with_capacity(param.vertex_count());
        let mut index = vec![u8::MAX; ((n + 1) * (n + 1)) as usize];
        for i in 1..=n {
            for j in i + 1..=n {
                let pos = vertices.len() as u8;
                index[(i * (n + 1) + j) as usize] = pos;
                index[(j * (n + 1) + i) as usize] = pos;
                vertices.push(Vertex { i: i as u8, j: j as u8 });
            }
        }
        let ground = vertices.iter().map(|v| v.ground_mask()).collect();
        let stable = vertices
            .iter()
            .enumerate()
            .filter(|(_, v)| is_stable(**v, param))
            .fold(0u64, |m, (p, _)| m | 1 << p);
        Arc::new(Universe { param, vertices, ground, index, stable })
    }

    pub fn for_k(k: u32) -> Result<Arc<Universe>> {
        Ok(Universe::new(GroundParam::new(k)?))
    }

    pub fn param(&self) -> GroundParam {
        self.param
    }

    pub fn k(&self) -> u32 {
        self.param.k()
    }

    pub fn n(&self) -> u32 {
        self.param.n()
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex(&self, index: usize) -> Vertex {
        self.vertices[index]
    }

    pub fn index_of(&self, v: Vertex) -> usize {
        self.index[(v.i() * (self.n() + 1) + v.j()) as usize] as usize
    }

    /// Index of the pair `{a, b}` with both elements taken modulo `n`.
    pub fn pair_index(&self, a: i64, b: i64) -> usize {
        let (a, b) = (self.param.reduce(a), self.param.reduce(b));
        debug_assert_ne!(a, b);
        self.index[(a * (self.n() + 1) + b) as usize] as usize
    }

    /// Mask of all vertex indices.
    pub fn all_mask(&self) -> u64 {
        if self.len() == 64 {
            u64::MAX
        } else {
            (1u64 << self.len()) - 1
        }
    }

    pub fn stable_mask(&self) -> u64 {
        self.stable
    }

    /// Index of the unstable vertex `i(i+1)` (with `i` taken modulo `n`).
    pub fn unstable_index(&self, i: i64) -> usize {
        self.pair_index(i, i + 1)
    }

    pub fn face(&self, vertices: &[Vertex]) -> Face {
        Face::from_indices(vertices.iter().map(|&v| self.index_of(v)))
    }

    pub fn face_vertices(&self, face: Face) -> Vec<Vertex> {
        face.indices().map(|i| self.vertices[i]).collect()
    }

    /// `S_σ` as a ground bitmask.
    pub fn support_mask(&self, face: Face) -> u32 {
        face.indices().fold(0, |m, i| m | self.ground[i])
    }

    /// `C_σ = [n] \ S_σ` as a ground bitmask.
    pub fn complement_mask(&self, face: Face) -> u32 {
        self.param.ground_mask() & !self.support_mask(face)
    }

    /// Mask of vertices disjoint from the ground bitmask `avoid`.
    pub fn vertices_avoiding(&self, avoid: u32) -> u64 {
        self.ground
            .iter()
            .enumerate()
            .filter(|(_, g)| **g & avoid == 0)
            .fold(0u64, |m, (p, _)| m | 1 << p)
    }

    /// Mask of vertices contained in the ground bitmask `within`.
    pub fn vertices_within(&self, within: u32) -> u64 {
        self.vertices_avoiding(self.param.ground_mask() & !within)
    }

    pub fn shift_index(&self, index: usize, j: i64) -> usize {
        let v = self.vertices[index];
        self.pair_index(v.i as i64 + j, v.j as i64 + j)
    }

    /// `σ ⊕ j` for positive `j`, `σ ⊖ |j|` for negative `j`.
    pub fn shift_face(&self, face: Face, j: i64) -> Face {
        Face::from_indices(face.indices().map(|i| self.shift_index(i, j)))
    }

    /// Re-expresses a face of a smaller universe in this one (same pairs of integers).
    pub fn embed_from(&self, smaller: &Universe, face: Face) -> Face {
        Face::from_indices(face.indices().map(|i| self.index_of(smaller.vertex(i))))
    }

    /// Space-separated vertex tokens, or `-` for the empty face.
    pub fn format_face(&self, face: Face) -> String {
        if face.is_empty() {
            return "-".to_string();
        }
        face.indices()
            .map(|i| self.vertices[i].to_string())
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn parse_face(&self, text: &str) -> Result<Face> {
        let text = text.trim();
        if text == "-" {
            return Ok(Face::EMPTY);
        }
        let mut face = Face::EMPTY;
        for token in text.split_whitespace() {
            let v = Vertex::parse(token, self.param)?;
            let i = self.index_of(v);
            if face.contains(i) {
                return Err(Error::domain(format!("vertex {v} repeated in face {text:?}")));
            }
            face = face.with(i);
        }
        if face.is_empty() {
            return Err(Error::domain("blank face token; write '-' for the empty face"));
        }
        Ok(face)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Kneser,
    Stable,
    S,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Kneser => "kneser",
            Family::Stable => "stable",
            Family::S => "s",
        }
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Family> {
        match s {
            "kneser" | "kg" => Ok(Family::Kneser),
            "stable" | "sg" => Ok(Family::Stable),
            "s" => Ok(Family::S),
            _ => Err(Error::domain(format!("unknown graph family {s:?} (expected kneser, stable or s)"))),
        }
    }
}

/// An immutable graph whose vertices are a subset of the universe.
///
/// Adjacency is kept as one neighbor bitmask per universe index, which makes
/// common-neighbor queries a chain of `&`.
#[derive(Clone, Debug)]
pub struct Graph {
    universe: Arc<Universe>,
    name: String,
    present: u64,
    adjacency: Vec<u64>,
}

impl Graph {
    fn from_edge_rule(
        universe: Arc<Universe>,
        name: impl Into<String>,
        present: u64,
        edge: impl Fn(Vertex, Vertex) -> bool,
    ) -> Graph {
        let len = universe.len();
        let mut adjacency = vec![0u64; len];
        for a in 0..len {
            if present >> a & 1 == 0 {
                continue;
            }
            for b in a + 1..len {
                if present >> b & 1 == 0 {
                    continue;
                }
                let (u, v) = (universe.vertex(a), universe.vertex(b));
                if u.is_disjoint(v) && edge(u, v) {
                    adjacency[a] |= 1 << b;
                    adjacency[b] |= 1 << a;
                }
            }
        }
        Graph { universe, name: name.into(), present, adjacency }
    }

    pub fn family(param: GroundParam, family: Family) -> Graph {
        match family {
            Family::Kneser => kneser_graph(param),
            Family::Stable => stable_kneser_graph(param),
            Family::S => s_graph(param),
        }
    }

    pub fn universe(&self) -> &Arc<Universe> {
        &self.universe
    }

    pub fn param(&self) -> GroundParam {
        self.universe.param()
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Vertices in lexicographic order.
    pub fn vertices(&self) -> Vec<Vertex> {
        Face(self.present).indices().map(|i| self.universe.vertex(i)).collect()
    }

    pub fn vertex_mask(&self) -> u64 {
        self.present
    }

    pub fn has_vertex(&self, v: Vertex) -> bool {
        self.present >> self.universe.index_of(v) & 1 == 1
    }

    pub fn vertex_count(&self) -> usize {
        self.present.count_ones() as usize
    }

    /// Neighbor mask of the vertex at a universe index (0 if absent).
    pub fn neighbor_mask(&self, index: usize) -> u64 {
        self.adjacency[index]
    }

    pub fn neighbors(&self, v: Vertex) -> Vec<Vertex> {
        Face(self.neighbor_mask(self.universe.index_of(v)))
            .indices()
            .map(|i| self.universe.vertex(i))
            .collect()
    }

    pub fn adjacent(&self, u: Vertex, v: Vertex) -> bool {
        self.adjacency[self.universe.index_of(u)] >> self.universe.index_of(v) & 1 == 1
    }

    /// Edges `(u, v)` with `u < v`, sorted lexicographically.
    pub fn edges(&self) -> Vec<(Vertex, Vertex)> {
        let mut out = Vec::new();
        for a in Face(self.present).indices() {
            for b in Face(self.adjacency[a] & !((2u64 << a) - 1)).indices() {
                out.push((self.universe.vertex(a), self.universe.vertex(b)));
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(|m| m.count_ones() as usize).sum::<usize>() / 2
    }

    /// Common neighbors of a face, as a vertex mask; `N(∅)` is every vertex.
    pub fn common_neighbor_mask(&self, face: Face) -> u64 {
        face.indices().fold(self.present, |m, i| m & self.adjacency[i])
    }

    /// The induced subgraph on the remaining vertices.
    pub fn without_vertices(&self, removed: u64, name: impl Into<String>) -> Graph {
        let present = self.present & !removed;
        let adjacency = self
            .adjacency
            .iter()
            .enumerate()
            .map(|(i, &m)| if present >> i & 1 == 1 { m & present } else { 0 })
            .collect();
        Graph { universe: self.universe.clone(), name: name.into(), present, adjacency }
    }

    /// Header `k=<k>` followed by one `i,j i,j` line per edge.
    pub fn dump(&self) -> String {
        let mut out = format!("k={}\n", self.param().k());
        for (u, v) in self.edges() {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }
}

/// `KG(2,k)`: all 2-subsets of `[k+4]`, adjacent when disjoint.
pub fn kneser_graph(param: GroundParam) -> Graph {
    let universe = Universe::new(param);
    let all = universe.all_mask();
    Graph::from_edge_rule(universe, "KG", all, |_, _| true)
}

/// `SG(2,k)`: the subgraph of `KG(2,k)` induced on stable vertices.
pub fn stable_kneser_graph(param: GroundParam) -> Graph {
    let universe = Universe::new(param);
    let stable = universe.stable_mask();
    Graph::from_edge_rule(universe, "SG", stable, |_, _| true)
}

/// `S(2,k)`: `KG(2,k)` minus the edges whose endpoints are both unstable.
pub fn s_graph(param: GroundParam) -> Graph {
    let universe = Universe::new(param);
    let all = universe.all_mask();
    Graph::from_edge_rule(universe, "S", all, move |u, v| is_stable(u, param) || is_stable(v, param))
}
