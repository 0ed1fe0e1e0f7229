//! Simplicial homology over GF(2) and the integers, used as an independent
//! check on everything the Morse side claims.

mod gf2;
mod snf;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::face::{Face, FaceSet};

pub use snf::{smith_normal_form, smith_normal_form_dense, DENSE_NNZ_LIMIT};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Ring {
    Gf2,
    Integers,
}

impl Ring {
    pub fn name(self) -> &'static str {
        match self {
            Ring::Gf2 => "gf2",
            Ring::Integers => "integers",
        }
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Ring {
    type Err = Error;

    fn from_str(s: &str) -> Result<Ring> {
        match s.to_ascii_lowercase().as_str() {
            "gf2" | "f2" | "z2" => Ok(Ring::Gf2),
            "z" | "int" | "integers" => Ok(Ring::Integers),
            other => Err(Error::domain(format!("unknown ring {other:?} (expected gf2 or z)"))),
        }
    }
}

/// Column-sparse integer matrix; each column is sorted by row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    pub rows: usize,
    pub cols: usize,
    pub columns: Vec<Vec<(u32, i64)>>,
}

impl SparseMatrix {
    pub fn zero(rows: usize, cols: usize) -> SparseMatrix {
        SparseMatrix { rows, cols, columns: vec![Vec::new(); cols] }
    }

    pub fn from_dense(rows: &[Vec<i64>]) -> SparseMatrix {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut columns = vec![Vec::new(); c];
        for (i, row) in rows.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if v != 0 {
                    columns[j].push((i as u32, v));
                }
            }
        }
        SparseMatrix { rows: r, cols: c, columns }
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    /// `self · other` over the integers, with overflow checks.
    pub fn mul(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        if self.cols != other.rows {
            return Err(Error::domain("matrix shapes do not compose"));
        }
        let mut columns = Vec::with_capacity(other.cols);
        let mut acc: Vec<i64> = vec![0; self.rows];
        let mut touched: Vec<u32> = Vec::new();
        for col in &other.columns {
            for &(k, b) in col {
                for &(i, a) in &self.columns[k as usize] {
                    let slot = &mut acc[i as usize];
                    if *slot == 0 {
                        touched.push(i);
                    }
                    let prod = a.checked_mul(b).ok_or_else(|| Error::Overflow("matrix product".into()))?;
                    *slot = slot.checked_add(prod).ok_or_else(|| Error::Overflow("matrix product".into()))?;
                }
            }
            touched.sort_unstable();
            touched.dedup();
            let mut out = Vec::new();
            for &i in &touched {
                let v = std::mem::take(&mut acc[i as usize]);
                if v != 0 {
                    out.push((i, v));
                }
            }
            touched.clear();
            columns.push(out);
        }
        Ok(SparseMatrix { rows: self.rows, cols: other.cols, columns })
    }
}

/// Oriented chain complex of a face list. Faces keep the order they were
/// given in within each dimension; orientation follows increasing vertex index.
#[derive(Clone, Debug)]
pub struct ChainComplex {
    reduced: bool,
    faces_by_dim: Vec<Vec<Face>>,
    /// `boundaries[d] = ∂_d : C_d → C_{d-1}`; `∂_0` is the augmentation when reduced.
    boundaries: Vec<SparseMatrix>,
}

impl ChainComplex {
    /// The empty face, if present, is ignored; it enters only through the
    /// augmentation when `reduced` is set.
    pub fn new(faces: &[Face], reduced: bool) -> Result<ChainComplex> {
        let top = faces.iter().map(|f| f.len()).max().unwrap_or(0);
        let mut faces_by_dim: Vec<Vec<Face>> = vec![Vec::new(); top];
        for &f in faces {
            if !f.is_empty() {
                faces_by_dim[f.len() - 1].push(f);
            }
        }
        let mut boundaries = Vec::with_capacity(top);
        for d in 0..top {
            if d == 0 {
                let rows = usize::from(reduced);
                let mut m = SparseMatrix::zero(rows, faces_by_dim[0].len());
                if reduced {
                    for col in &mut m.columns {
                        col.push((0, 1));
                    }
                }
                boundaries.push(m);
                continue;
            }
            let index: rustc_hash::FxHashMap<Face, u32> =
                faces_by_dim[d - 1].iter().enumerate().map(|(i, &f)| (f, i as u32)).collect();
            let mut m = SparseMatrix::zero(faces_by_dim[d - 1].len(), faces_by_dim[d].len());
            for (c, f) in faces_by_dim[d].iter().enumerate() {
                let col = &mut m.columns[c];
                for (pos, x) in f.indices().enumerate() {
                    let g = f.without(x);
                    let row = *index.get(&g).ok_or_else(|| {
                        Error::domain(format!("not a complex: {f:?} is present but its facet {g:?} is not"))
                    })?;
                    col.push((row, if pos % 2 == 0 { 1 } else { -1 }));
                }
                col.sort_unstable_by_key(|e| e.0);
            }
            boundaries.push(m);
        }
        Ok(ChainComplex { reduced, faces_by_dim, boundaries })
    }

    pub fn from_face_set(faces: &FaceSet, reduced: bool) -> Result<ChainComplex> {
        Self::new(faces.faces(), reduced)
    }

    pub fn is_reduced(&self) -> bool {
        self.reduced
    }

    /// Number of nonempty dimensions; faces live in `0..dims()`.
    pub fn dims(&self) -> usize {
        self.faces_by_dim.len()
    }

    pub fn faces_in(&self, d: usize) -> &[Face] {
        self.faces_by_dim.get(d).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn boundary(&self, d: usize) -> &SparseMatrix {
        &self.boundaries[d]
    }

    /// `Σ (-1)^d f_d` over nonempty faces.
    pub fn euler_characteristic(&self) -> i64 {
        self.faces_by_dim
            .iter()
            .enumerate()
            .map(|(d, v)| if d % 2 == 0 { v.len() as i64 } else { -(v.len() as i64) })
            .sum()
    }

    /// `∂_{d-1} ∂_d = 0` over the integers, and independently over GF(2).
    pub fn check_boundary_squared_zero(&self) -> Result<()> {
        for d in 1..self.boundaries.len() {
            let prod = self.boundaries[d - 1].mul(&self.boundaries[d])?;
            if prod.nnz() != 0 {
                return Err(Error::structural(format!("∂∂ ≠ 0 over Z in dimension {d}")));
            }
            if !gf2::product_is_zero(&self.boundaries[d - 1], &self.boundaries[d]) {
                return Err(Error::structural(format!("∂∂ ≠ 0 over GF(2) in dimension {d}")));
            }
        }
        Ok(())
    }
}

/// Betti numbers and torsion coefficients by dimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BettiVector {
    pub ring: Ring,
    pub reduced: bool,
    /// `ranks[d]` is the rank of `H_d` (reduced when `reduced`).
    pub ranks: Vec<usize>,
    /// Invariant factors > 1 of `H_d`; always empty over GF(2).
    pub torsion: Vec<Vec<u64>>,
}

impl BettiVector {
    pub fn rank(&self, d: usize) -> usize {
        self.ranks.get(d).copied().unwrap_or(0)
    }

    pub fn is_torsion_free(&self) -> bool {
        self.torsion.iter().all(Vec::is_empty)
    }

    pub fn alternating_sum(&self) -> i64 {
        self.ranks
            .iter()
            .enumerate()
            .map(|(d, &b)| if d % 2 == 0 { b as i64 } else { -(b as i64) })
            .sum()
    }

    /// Reduced homology is that of a wedge of `count` spheres of dimension `dim`.
    pub fn is_wedge_of_spheres(&self, dim: usize, count: usize) -> bool {
        self.reduced
            && self.is_torsion_free()
            && self.ranks.iter().enumerate().all(|(d, &b)| b == if d == dim { count } else { 0 })
            && (count == 0 || self.ranks.len() > dim)
    }

    /// Drops trailing zero ranks (and matching empty torsion lists).
    fn trim(mut self) -> BettiVector {
        while self.ranks.len() > 1 && self.ranks.last() == Some(&0) && self.torsion.last().is_some_and(Vec::is_empty)
        {
            self.ranks.pop();
            self.torsion.pop();
        }
        self
    }

    pub fn to_json(&self) -> Value {
        let key = if self.reduced { "reduced" } else { "unreduced" };
        json!({ key: self.ranks, "torsion": self.torsion, "ring": self.ring.name() })
    }
}

/// Reduced homology of the complex spanned by `faces` (which must be downward closed).
pub fn betti(faces: &[Face], ring: Ring) -> Result<BettiVector> {
    betti_with(faces, ring, true)
}

pub fn betti_with(faces: &[Face], ring: Ring, reduced: bool) -> Result<BettiVector> {
    let cc = ChainComplex::new(faces, reduced)?;
    betti_of(&cc, ring)
}

pub fn betti_of(cc: &ChainComplex, ring: Ring) -> Result<BettiVector> {
    let dims = cc.dims();
    // factors[d]: nonzero invariant factors of ∂_d (all 1 over GF(2)).
    let factors: Vec<Vec<u64>> = match ring {
        Ring::Gf2 => gf2::ranks(cc).into_iter().map(|r| vec![1; r]).collect(),
        Ring::Integers => {
            let mut out = Vec::with_capacity(dims);
            for d in 0..dims {
                out.push(smith_normal_form(cc.boundary(d))?);
            }
            out
        }
    };
    let mut ranks = Vec::with_capacity(dims.max(1));
    let mut torsion = Vec::with_capacity(dims.max(1));
    for d in 0..dims {
        let rank_here = factors[d].len();
        let rank_above = factors.get(d + 1).map_or(0, Vec::len);
        let cycles = cc.faces_in(d).len() - rank_here;
        ranks.push(cycles - rank_above);
        torsion.push(factors.get(d + 1).map_or_else(Vec::new, |f| f.iter().copied().filter(|&x| x > 1).collect()));
    }
    if dims == 0 {
        // Only the empty face (or nothing): the void complex has H̃_{-1} = Z,
        // which this vector does not index; report no ranks.
        ranks.push(0);
        torsion.push(Vec::new());
    }
    Ok(BettiVector { ring, reduced: cc.is_reduced(), ranks, torsion }.trim())
}

/// Euler–Poincaré: alternating face count equals alternating Betti sum
/// (shifted by one for reduced homology).
pub fn euler_poincare_holds(cc: &ChainComplex, b: &BettiVector) -> bool {
    let chi = cc.euler_characteristic();
    let expected = if b.reduced { chi - 1 } else { chi };
    b.alternating_sum() == expected
}
