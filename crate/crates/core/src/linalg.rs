//! Complex dense linear algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Eigenvalues in ascending order with matching eigenvector columns.
pub fn hermitian_eigen(m: &CMat) -> (Vec<f64>, CMat) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), CMat::zeros(0, 0));
    }
    let herm = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = nalgebra::SymmetricEigen::new(herm);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMat::zeros(n, n);
    for (c, &i) in order.iter().enumerate() {
        vectors.set_column(c, &eig.eigenvectors.column(i));
    }
    (values, vectors)
}

pub fn max_hermitian_eigenvalue(m: &CMat) -> f64 {
    hermitian_eigen(m).0.last().copied().unwrap_or(0.0)
}

/// Singular values in descending order.
pub fn singular_values(m: &CMat) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Numerical rank with tolerance relative to the largest singular value.
pub fn rank(m: &CMat, rel_tol: f64) -> usize {
    let s = singular_values(m);
    let Some(&top) = s.first() else { return 0 };
    if top == 0.0 {
        return 0;
    }
    s.iter().filter(|&&x| x > rel_tol * top.max(1.0)).count()
}

/// Orthonormal basis (as columns) of the null space of `m`.
///
/// Computed from the eigenvectors of `m* m`, which stay reliable when
/// singular values repeat. Directions with `σ² ≤ rel_tol · max(σ_max², 1)`
/// count as null.
pub fn null_space(m: &CMat, rel_tol: f64) -> CMat {
    let c = m.ncols();
    if c == 0 {
        return CMat::zeros(0, 0);
    }
    let (vals, vecs) = hermitian_eigen(&(m.adjoint() * m));
    // eigenvalues of the Gram matrix carry absolute error near eps times its
    // norm, so the cut is relative to the squared scale rather than squared
    let cut = rel_tol * vals.last().copied().unwrap_or(0.0).max(1.0);
    let cols: Vec<usize> = (0..c).filter(|&i| vals[i] <= cut).collect();
    let mut out = CMat::zeros(c, cols.len());
    for (k, &i) in cols.iter().enumerate() {
        out.set_column(k, &vecs.column(i));
    }
    out
}

/// Orthonormal basis (as columns) of the column space of `m`.
pub fn range_basis(m: &CMat, rel_tol: f64) -> CMat {
    let (r, c) = m.shape();
    if c == 0 {
        return CMat::zeros(r, 0);
    }
    let (vals, vecs) = hermitian_eigen(&(m.adjoint() * m));
    // eigenvalues of the Gram matrix carry absolute error near eps times its
    // norm, so the cut is relative to the squared scale rather than squared
    let cut = rel_tol * vals.last().copied().unwrap_or(0.0).max(1.0);
    let cols: Vec<usize> = (0..c).rev().filter(|&i| vals[i] > cut).collect();
    let mut out = CMat::zeros(r, cols.len());
    for (k, &i) in cols.iter().enumerate() {
        let col = m * vecs.column(i) / Complex64::new(vals[i].sqrt(), 0.0);
        out.set_column(k, &col);
    }
    // one Gram-Schmidt pass tidies the orthogonality lost to rounding
    for k in 0..out.ncols() {
        for j in 0..k {
            let proj = out.column(j).dotc(&out.column(k));
            let prev = out.column(j).into_owned();
            let mut col = out.column_mut(k);
            col -= prev * proj;
        }
        let norm = out.column(k).norm();
        out.column_mut(k).unscale_mut(norm);
    }
    out
}

/// Null space of a family of stacked blocks `[B_1; B_2; …]` through the
/// Hermitian form `Σ B_k* B_k`.
pub fn common_null_space(blocks: &[CMat], tol: f64) -> CMat {
    let c = blocks.first().map(|b| b.ncols()).unwrap_or(0);
    let mut gram = CMat::zeros(c, c);
    for b in blocks {
        gram += b.adjoint() * b;
    }
    let (vals, vecs) = hermitian_eigen(&gram);
    let cols: Vec<usize> = (0..c).filter(|&i| vals[i] <= tol).collect();
    let mut out = CMat::zeros(c, cols.len());
    for (k, &i) in cols.iter().enumerate() {
        out.set_column(k, &vecs.column(i));
    }
    out
}

/// Greedy pivoted Cholesky `K ≈ L L*` of a Hermitian positive semidefinite matrix.
///
/// Pivots are chosen by largest remaining diagonal (first index on ties) and
/// the factorization stops once that diagonal drops below `rel_tol` times the
/// largest diagonal entry of `K`.
pub fn pivoted_cholesky(k: &CMat, rel_tol: f64) -> (Vec<usize>, CMat) {
    let n = k.nrows();
    let mut diag: Vec<f64> = (0..n).map(|i| k[(i, i)].re).collect();
    let scale = diag.iter().copied().fold(0.0f64, f64::max);
    let mut pivots = Vec::new();
    let mut cols: Vec<CVec> = Vec::new();
    while pivots.len() < n {
        let mut best = None;
        for i in 0..n {
            if pivots.contains(&i) {
                continue;
            }
            match best {
                Some((_, v)) if diag[i] <= v => {}
                _ => best = Some((i, diag[i])),
            }
        }
        let Some((p, d)) = best else { break };
        if d <= rel_tol * scale || d <= 0.0 {
            break;
        }
        let root = d.sqrt();
        let mut col = CVec::zeros(n);
        for i in 0..n {
            let mut s = k[(i, p)];
            for c in &cols {
                s -= c[i] * c[p].conj();
            }
            col[i] = s / root;
        }
        for i in 0..n {
            diag[i] -= col[i].norm_sqr();
        }
        pivots.push(p);
        cols.push(col);
    }
    let mut l = CMat::zeros(n, cols.len());
    for (j, c) in cols.iter().enumerate() {
        l.set_column(j, c);
    }
    (pivots, l)
}

/// Largest singular triple with a residual error bound.
#[derive(Clone, Debug)]
pub struct TopSingular {
    pub value: f64,
    pub left: CVec,
    pub right: CVec,
    /// `√(‖Aw − σu‖² + ‖A*u − σw‖²)`; some singular value of `A` lies within this distance of `value`.
    pub error_bound: f64,
}

pub fn top_singular(a: &CMat) -> TopSingular {
    let (r, c) = a.shape();
    if r == 0 || c == 0 {
        return TopSingular {
            value: 0.0,
            left: CVec::zeros(r),
            right: CVec::zeros(c),
            error_bound: 0.0,
        };
    }
    let (vals, vecs) = hermitian_eigen(&(a.adjoint() * a));
    let top = vals.len() - 1;
    let right: CVec = vecs.column(top).into_owned();
    let image = a * &right;
    let sigma = image.norm();
    let left: CVec = if sigma > 0.0 {
        image / Complex64::new(sigma, 0.0)
    } else {
        let mut e = CVec::zeros(r);
        e[0] = ONE;
        e
    };
    let s = Complex64::new(sigma, 0.0);
    let r1 = (a * &right - &left * s).norm();
    let r2 = (a.adjoint() * &left - &right * s).norm();
    TopSingular {
        value: sigma,
        left,
        right,
        error_bound: (r1 * r1 + r2 * r2).sqrt(),
    }
}

pub fn operator_norm(a: &CMat) -> f64 {
    singular_values(a).first().copied().unwrap_or(0.0)
}

/// `X ↦ A X − X A` as an `n² × n²` matrix acting on column-major `vec(X)`.
pub fn commutator_operator(a: &CMat) -> CMat {
    let n = a.nrows();
    let id = CMat::identity(n, n);
    id.kronecker(a) - a.transpose().kronecker(&id)
}

pub fn is_unitary(u: &CMat, tol: f64) -> bool {
    let n = u.nrows();
    (u.adjoint() * u - CMat::identity(n, n)).norm() <= tol * (n.max(1) as f64)
}

pub fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}
