//! Small dense helpers shared across the crate.

use nalgebra::{DMatrix, DVector};

pub type Mat = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// Spectral (operator) norm: the largest singular value.
pub fn op_norm(a: &Mat) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    if a.iter().all(|&x| x == 0.0) {
        return 0.0;
    }
    a.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .fold(0.0_f64, |m, &s| m.max(s))
}

/// Operator norm of a matrix known to be symmetric, via its eigenvalues.
pub fn sym_op_norm(a: &Mat) -> f64 {
    if a.iter().all(|&x| x == 0.0) {
        return 0.0;
    }
    let s = symmetrize(a);
    s.symmetric_eigenvalues()
        .iter()
        .fold(0.0_f64, |m, &l| m.max(l.abs()))
}

/// Hilbert-Schmidt (Frobenius) norm.
pub fn hs_norm(a: &Mat) -> f64 {
    a.norm()
}

pub fn max_abs(a: &Mat) -> f64 {
    a.iter().fold(0.0_f64, |m, &x| m.max(x.abs()))
}

pub fn symmetrize(a: &Mat) -> Mat {
    (a + a.transpose()) * 0.5
}

/// `D A D` for a diagonal `D` given by its entries.
pub fn diag_sandwich(left: &Vector, a: &Mat, right: &Vector) -> Mat {
    let mut out = a.clone();
    for (i, mut row) in out.row_iter_mut().enumerate() {
        for (k, x) in row.iter_mut().enumerate() {
            *x *= left[i] * right[k];
        }
    }
    out
}

/// `U diag(w) Uᵀ`.
pub fn spectral_matrix(basis: &Mat, weights: &Vector) -> Mat {
    let mut scaled = basis.clone();
    for (k, mut col) in scaled.column_iter_mut().enumerate() {
        col *= weights[k];
    }
    scaled * basis.transpose()
}

/// Binomial coefficient as f64; exact for the ranges used here.
pub fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0_f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc.round()
}

/// Calls `visit` with every tuple of `parts` non-negative integers summing to `total`,
/// in lexicographic order.
pub fn for_each_composition(total: usize, parts: usize, mut visit: impl FnMut(&[usize])) {
    if parts == 0 {
        if total == 0 {
            visit(&[]);
        }
        return;
    }
    let mut buf = vec![0usize; parts];
    fn rec(buf: &mut [usize], pos: usize, left: usize, visit: &mut dyn FnMut(&[usize])) {
        if pos + 1 == buf.len() {
            buf[pos] = left;
            visit(buf);
            return;
        }
        for k in 0..=left {
            buf[pos] = k;
            rec(buf, pos + 1, left - k, visit);
        }
    }
    rec(&mut buf, 0, total, &mut visit);
}
