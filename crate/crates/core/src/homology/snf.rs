use std::cmp::Reverse;
use std::collections::BinaryHeap;

use super::SparseMatrix;
use crate::error::{Error, Result};

/// Largest number of nonzeros left after unit-pivot elimination that is
/// handed to the dense Smith normal form.
pub const DENSE_NNZ_LIMIT: usize = 20_000;

fn overflow() -> Error {
    Error::Overflow("Smith normal form".into())
}

/// `a - λ·b` on sorted sparse columns.
fn axpy(a: &[(u32, i64)], lambda: i64, b: &[(u32, i64)]) -> Result<Vec<(u32, i64)>> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    let scaled = |v: i64| v.checked_mul(lambda).ok_or_else(overflow);
    while i < a.len() || j < b.len() {
        let ra = a.get(i).map_or(u32::MAX, |e| e.0);
        let rb = b.get(j).map_or(u32::MAX, |e| e.0);
        if ra < rb {
            out.push(a[i]);
            i += 1;
        } else if rb < ra {
            out.push((rb, scaled(b[j].1)?.checked_neg().ok_or_else(overflow)?));
            j += 1;
        } else {
            let v = a[i].1.checked_sub(scaled(b[j].1)?).ok_or_else(overflow)?;
            if v != 0 {
                out.push((ra, v));
            }
            i += 1;
            j += 1;
        }
    }
    Ok(out)
}

/// Nonzero invariant factors of an integer matrix, in divisibility order.
///
/// Unit pivots are eliminated sparsely first (each contributes a factor 1);
/// whatever remains goes through a dense reduction in checked `i128`.
pub fn smith_normal_form(m: &SparseMatrix) -> Result<Vec<u64>> {
    let mut cols: Vec<Vec<(u32, i64)>> = m.columns.clone();
    let mut row_cols: Vec<Vec<u32>> = vec![Vec::new(); m.rows];
    for (c, col) in cols.iter().enumerate() {
        for &(r, _) in col {
            row_cols[r as usize].push(c as u32);
        }
    }
    let mut alive = vec![true; cols.len()];
    let mut ones = 0usize;
    let mut heap: BinaryHeap<Reverse<(usize, u32)>> =
        cols.iter().enumerate().map(|(c, col)| Reverse((col.len(), c as u32))).collect();
    let mut deferred: Vec<u32> = Vec::new();
    loop {
        let mut progressed = false;
        while let Some(Reverse((len, c))) = heap.pop() {
            let c = c as usize;
            if !alive[c] || cols[c].len() != len {
                continue;
            }
            if len == 0 {
                alive[c] = false;
                continue;
            }
            // A unit entry whose row is shared by the fewest columns.
            let pivot = cols[c]
                .iter()
                .filter(|e| e.1.abs() == 1)
                .min_by_key(|e| row_cols[e.0 as usize].len())
                .copied();
            let Some((r, v)) = pivot else {
                deferred.push(c as u32);
                continue;
            };
            progressed = true;
            let others = std::mem::take(&mut row_cols[r as usize]);
            let pivot_col = std::mem::take(&mut cols[c]);
            alive[c] = false;
            ones += 1;
            for c2 in others {
                let c2 = c2 as usize;
                if !alive[c2] {
                    continue;
                }
                let Ok(at) = cols[c2].binary_search_by_key(&r, |e| e.0) else { continue };
                // v = ±1, so v⁻¹ = v.
                let lambda = cols[c2][at].1.checked_mul(v).ok_or_else(overflow)?;
                let before: Vec<u32> = cols[c2].iter().map(|e| e.0).collect();
                let updated = axpy(&cols[c2], lambda, &pivot_col)?;
                for &(row, _) in &updated {
                    if before.binary_search(&row).is_err() {
                        row_cols[row as usize].push(c2 as u32);
                    }
                }
                cols[c2] = updated;
                heap.push(Reverse((cols[c2].len(), c2 as u32)));
            }
        }
        if !progressed || deferred.is_empty() {
            break;
        }
        for c in deferred.drain(..) {
            if alive[c as usize] {
                heap.push(Reverse((cols[c as usize].len(), c)));
            }
        }
    }

    let rest: Vec<usize> = (0..cols.len()).filter(|&c| alive[c] && !cols[c].is_empty()).collect();
    let mut factors = vec![1u64; ones];
    if rest.is_empty() {
        return Ok(factors);
    }
    let nnz: usize = rest.iter().map(|&c| cols[c].len()).sum();
    if nnz > DENSE_NNZ_LIMIT {
        return Err(Error::domain(format!(
            "integer reduction left {nnz} nonzeros, above the dense limit of {DENSE_NNZ_LIMIT}"
        )));
    }
    let mut rows: Vec<u32> = rest.iter().flat_map(|&c| cols[c].iter().map(|e| e.0)).collect();
    rows.sort_unstable();
    rows.dedup();
    let mut dense = vec![vec![0i128; rest.len()]; rows.len()];
    for (j, &c) in rest.iter().enumerate() {
        for &(r, v) in &cols[c] {
            let i = rows.binary_search(&r).unwrap();
            dense[i][j] = v as i128;
        }
    }
    let mut tail = dense_snf(dense)?;
    factors.append(&mut tail);
    factors.sort_unstable();
    Ok(factors)
}

/// Dense entry point; rows are given in order.
pub fn smith_normal_form_dense(rows: &[Vec<i64>]) -> Result<Vec<u64>> {
    smith_normal_form(&SparseMatrix::from_dense(rows))
}

#[allow(clippy::needless_range_loop)]
fn dense_snf(mut a: Vec<Vec<i128>>) -> Result<Vec<u64>> {
    let nr = a.len();
    let nc = a.first().map_or(0, Vec::len);
    let mut factors = Vec::new();
    let ck = |x: Option<i128>| x.ok_or_else(overflow);
    for t in 0..nr.min(nc) {
        // Smallest nonzero entry of the trailing block goes to (t, t).
        let Some((pi, pj)) = (t..nr)
            .flat_map(|i| (t..nc).map(move |j| (i, j)))
            .filter(|&(i, j)| a[i][j] != 0)
            .min_by_key(|&(i, j)| a[i][j].abs())
        else {
            break;
        };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let mut clean = true;
            for i in t + 1..nr {
                if a[i][t] != 0 {
                    let q = a[i][t] / a[t][t];
                    for j in t..nc {
                        a[i][j] = ck(a[i][j].checked_sub(ck(q.checked_mul(a[t][j]))?))?;
                    }
                    clean &= a[i][t] == 0;
                }
            }
            for j in t + 1..nc {
                if a[t][j] != 0 {
                    let q = a[t][j] / a[t][t];
                    for i in t..nr {
                        a[i][j] = ck(a[i][j].checked_sub(ck(q.checked_mul(a[i][t]))?))?;
                    }
                    clean &= a[t][j] == 0;
                }
            }
            if !clean {
                // Move the smallest leftover in row/column t onto the diagonal.
                let (mut bi, mut bj) = (t, t);
                for i in t + 1..nr {
                    if a[i][t] != 0 && a[i][t].abs() < a[bi][bj].abs() {
                        (bi, bj) = (i, t);
                    }
                }
                for j in t + 1..nc {
                    if a[t][j] != 0 && a[t][j].abs() < a[bi][bj].abs() {
                        (bi, bj) = (t, j);
                    }
                }
                a.swap(t, bi);
                for row in a.iter_mut() {
                    row.swap(t, bj);
                }
                continue;
            }
            let bad = (t + 1..nr).find(|&i| (t + 1..nc).any(|j| a[i][j] % a[t][t] != 0));
            match bad {
                Some(i) => {
                    for j in t..nc {
                        a[t][j] = ck(a[t][j].checked_add(a[i][j]))?;
                    }
                }
                None => break,
            }
        }
        let d = a[t][t].unsigned_abs();
        factors.push(u64::try_from(d).map_err(|_| overflow())?);
    }
    Ok(factors)
}
