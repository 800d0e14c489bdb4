//! Dense linear algebra over a prime field `F_p`, `p < 2^32`.

use crate::modp::{inv_mod, mul_mod};

#[inline]
fn sub(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + p - b
    }
}

/// Reduced row echelon form in place; returns pivot columns.
pub fn rref(rows: &mut Vec<Vec<u64>>, p: u64) -> Vec<usize> {
    let ncols = rows.first().map(|r| r.len()).unwrap_or(0);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(piv) = (r..rows.len()).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(r, piv);
        let inv = inv_mod(rows[r][c], p).expect("nonzero element of a prime field");
        for x in rows[r].iter_mut() {
            *x = mul_mod(*x, inv, p);
        }
        for i in 0..rows.len() {
            if i != r && rows[i][c] != 0 {
                let f = rows[i][c];
                for j in c..ncols {
                    let t = mul_mod(f, rows[r][j], p);
                    rows[i][j] = sub(rows[i][j], t, p);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    pivots
}

/// Basis of `{x : A x = 0}` for a square or rectangular `A` (row-major rows).
pub fn nullspace(a: &[Vec<u64>], p: u64) -> Vec<Vec<u64>> {
    let ncols = a.first().map(|r| r.len()).unwrap_or(0);
    let mut rows = a.to_vec();
    let pivots = rref(&mut rows, p);
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![0u64; ncols];
        v[free] = 1;
        for (i, &pc) in pivots.iter().enumerate() {
            v[pc] = sub(0, rows[i][free], p);
        }
        basis.push(v);
    }
    basis
}

/// Characteristic polynomial `det(xI − A)`, coefficients from constant term up,
/// via reduction to upper Hessenberg form.
pub fn charpoly(a: &[Vec<u64>], p: u64) -> Vec<u64> {
    let n = a.len();
    let mut h = a.to_vec();
    for j in 0..n.saturating_sub(2) {
        let Some(piv) = (j + 1..n).find(|&i| h[i][j] != 0) else {
            continue;
        };
        if piv != j + 1 {
            h.swap(piv, j + 1);
            for row in h.iter_mut() {
                row.swap(piv, j + 1);
            }
        }
        let inv = inv_mod(h[j + 1][j], p).unwrap();
        for i in j + 2..n {
            if h[i][j] == 0 {
                continue;
            }
            let u = mul_mod(h[i][j], inv, p);
            for c in 0..n {
                let t = mul_mod(u, h[j + 1][c], p);
                h[i][c] = sub(h[i][c], t, p);
            }
            for row in h.iter_mut() {
                let t = mul_mod(u, row[i], p);
                row[j + 1] = (row[j + 1] + t) % p;
            }
        }
    }
    // p_{m+1} = (x − h_mm) p_m − Σ_{i<m} h_im (Π_{t=i+1}^{m} h_{t,t−1}) p_i
    let mut polys: Vec<Vec<u64>> = vec![vec![1]];
    for m in 0..n {
        let prev = &polys[m];
        let mut next = vec![0u64; m + 2];
        for (d, &c) in prev.iter().enumerate() {
            next[d + 1] = (next[d + 1] + c) % p;
            next[d] = sub(next[d], mul_mod(h[m][m], c, p), p);
        }
        let mut prod = 1u64;
        for i in (0..m).rev() {
            prod = mul_mod(prod, h[i + 1][i], p);
            let coef = mul_mod(h[i][m], prod, p);
            if coef != 0 {
                for (d, &c) in polys[i].iter().enumerate() {
                    next[d] = sub(next[d], mul_mod(coef, c, p), p);
                }
            }
        }
        polys.push(next);
    }
    polys.pop().unwrap()
}

/// All roots in `F_p`, by exhaustive evaluation.
pub fn roots(poly: &[u64], p: u64) -> Vec<u64> {
    (0..p)
        .filter(|&x| {
            let mut acc = 0u64;
            for &c in poly.iter().rev() {
                acc = (mul_mod(acc, x, p) + c) % p;
            }
            acc == 0
        })
        .collect()
}
