use super::{ChainComplex, SparseMatrix};

fn support_mod2(col: &[(u32, i64)]) -> Vec<u32> {
    col.iter().filter(|e| e.1 % 2 != 0).map(|e| e.0).collect()
}

fn symmetric_difference(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Ranks of every `∂_d` over GF(2), by standard column reduction with
/// clearing: top dimension first, and a column of `∂_d` whose index is a
/// pivot row of the reduced `∂_{d+1}` is known to reduce to zero.
pub(super) fn ranks(cc: &ChainComplex) -> Vec<usize> {
    let dims = cc.dims();
    let mut ranks = vec![0; dims];
    let mut cleared: Vec<bool> = Vec::new();
    for d in (0..dims).rev() {
        let m = cc.boundary(d);
        let skip = std::mem::take(&mut cleared);
        let mut pivot_of_row: Vec<u32> = vec![u32::MAX; m.rows];
        let mut reduced: Vec<Vec<u32>> = Vec::new();
        let mut next_cleared = vec![false; m.rows];
        for (c, col) in m.columns.iter().enumerate() {
            if skip.get(c).copied().unwrap_or(false) {
                continue;
            }
            let mut col = support_mod2(col);
            while let Some(&low) = col.last() {
                let p = pivot_of_row[low as usize];
                if p == u32::MAX {
                    pivot_of_row[low as usize] = reduced.len() as u32;
                    next_cleared[low as usize] = true;
                    break;
                }
                col = symmetric_difference(&col, &reduced[p as usize]);
            }
            if !col.is_empty() {
                reduced.push(col);
            }
        }
        ranks[d] = reduced.len();
        cleared = next_cleared;
    }
    ranks
}

/// Whether `a · b ≡ 0 (mod 2)`, computed with parity sets only.
pub(super) fn product_is_zero(a: &SparseMatrix, b: &SparseMatrix) -> bool {
    let a_cols: Vec<Vec<u32>> = a.columns.iter().map(|c| support_mod2(c)).collect();
    for col in &b.columns {
        let mut acc: Vec<u32> = Vec::new();
        for k in support_mod2(col) {
            acc = symmetric_difference(&acc, &a_cols[k as usize]);
        }
        if !acc.is_empty() {
            return false;
        }
    }
    true
}
