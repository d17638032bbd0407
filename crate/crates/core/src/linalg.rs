//! Dense complex linear algebra helpers.
//!
//! Frames (matrices with orthonormal columns) over large ambients are mostly
//! zero, so inner products and right-multiplications gather the nonzero rows
//! first.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Rows of `m` holding at least one nonzero entry.
pub fn row_support(m: &CMat) -> Vec<usize> {
    let mut nonzero = vec![false; m.nrows()];
    for col in m.column_iter() {
        for (i, z) in col.iter().enumerate() {
            if z.re != 0.0 || z.im != 0.0 {
                nonzero[i] = true;
            }
        }
    }
    nonzero
        .iter()
        .enumerate()
        .filter_map(|(i, &nz)| nz.then_some(i))
        .collect()
}

pub fn gather_rows(m: &CMat, rows: &[usize]) -> CMat {
    CMat::from_fn(rows.len(), m.ncols(), |i, j| m[(rows[i], j)])
}

fn split(m: &CMat) -> (DMatrix<f64>, DMatrix<f64>) {
    (m.map(|z| z.re), m.map(|z| z.im))
}

fn join(re: &DMatrix<f64>, im: &DMatrix<f64>) -> CMat {
    CMat::from_fn(re.nrows(), re.ncols(), |i, j| Complex64::new(re[(i, j)], im[(i, j)]))
}

/// Below this many multiply-adds the plain complex product is used.
const BLOCKED_PRODUCT_WORK: usize = 1 << 14;

/// `a · b` through real products, which use the blocked `f64` kernel.
pub fn matmul(a: &CMat, b: &CMat) -> CMat {
    assert_eq!(a.ncols(), b.nrows());
    if a.nrows() * a.ncols() * b.ncols() < BLOCKED_PRODUCT_WORK {
        return a * b;
    }
    let (ar, ai) = split(a);
    let (br, bi) = split(b);
    join(&(&ar * &br - &ai * &bi), &(&ar * &bi + &ai * &br))
}

/// `a^* · b` without forming the adjoint.
pub fn adjoint_mul(a: &CMat, b: &CMat) -> CMat {
    assert_eq!(a.nrows(), b.nrows());
    if a.nrows() * a.ncols() * b.ncols() < BLOCKED_PRODUCT_WORK {
        return a.adjoint() * b;
    }
    let (ar, ai) = split(a);
    let (br, bi) = split(b);
    join(&(ar.tr_mul(&br) + ai.tr_mul(&bi)), &(ar.tr_mul(&bi) - ai.tr_mul(&br)))
}

/// `a^* b`, summing only over rows where `a` is nonzero.
pub fn gram(a: &CMat, b: &CMat) -> CMat {
    assert_eq!(a.nrows(), b.nrows());
    let rows = row_support(a);
    if rows.len() * 2 > a.nrows() {
        return adjoint_mul(a, b);
    }
    adjoint_mul(&gather_rows(a, &rows), &gather_rows(b, &rows))
}

/// `v · q`, touching only the nonzero rows of `v`.
pub fn mul_frame(v: &CMat, q: &CMat) -> CMat {
    let rows = row_support(v);
    if rows.len() * 2 > v.nrows() {
        return matmul(v, q);
    }
    let small = matmul(&gather_rows(v, &rows), q);
    let mut out = CMat::zeros(v.nrows(), q.ncols());
    for (i, &r) in rows.iter().enumerate() {
        for j in 0..q.ncols() {
            out[(r, j)] = small[(i, j)];
        }
    }
    out
}

pub fn hstack(blocks: &[&CMat], nrows: usize) -> CMat {
    let ncols = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = CMat::zeros(nrows, ncols);
    let mut offset = 0;
    for b in blocks {
        assert_eq!(b.nrows(), nrows);
        out.view_mut((0, offset), (nrows, b.ncols())).copy_from(b);
        offset += b.ncols();
    }
    out
}

pub fn frobenius(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Orthonormal basis of the column span, dropping directions whose residual
/// norm falls below `tol` (modified Gram–Schmidt, two passes).
pub fn orthonormalize(cols: &CMat, tol: f64) -> CMat {
    let n = cols.nrows();
    let mut basis: Vec<nalgebra::DVector<Complex64>> = Vec::new();
    for j in 0..cols.ncols() {
        let mut v = cols.column(j).into_owned();
        for _ in 0..2 {
            for b in &basis {
                let proj = b.dotc(&v);
                v -= b * proj;
            }
        }
        let norm = v.norm();
        if norm > tol {
            basis.push(v / real(norm));
        }
    }
    let mut out = CMat::zeros(n, basis.len());
    for (j, b) in basis.iter().enumerate() {
        out.set_column(j, b);
    }
    out
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eigen(a: &CMat) -> (Vec<f64>, CMat) {
    let n = a.nrows();
    if n == 0 {
        return (Vec::new(), CMat::zeros(0, 0));
    }
    let sym = (a + a.adjoint()) * real(0.5);
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMat::from_fn(n, n, |r, k| eig.eigenvectors[(r, order[k])]);
    (values, vectors)
}

/// Groups ascending eigenvalues whose consecutive gaps are at most `tol`.
/// Returns `(representative value, column indices)` per cluster.
pub fn cluster_sorted(values: &[f64], tol: f64) -> Vec<(f64, Vec<usize>)> {
    let mut out: Vec<(f64, Vec<usize>)> = Vec::new();
    for (i, &v) in values.iter().enumerate() {
        match out.last_mut() {
            Some((_, idx)) if (v - values[*idx.last().unwrap()]).abs() <= tol => idx.push(i),
            _ => out.push((v, vec![i])),
        }
    }
    for (rep, idx) in out.iter_mut() {
        *rep = idx.iter().map(|&i| values[i]).sum::<f64>() / idx.len() as f64;
    }
    out
}

/// Spectral norm of a Hermitian matrix.
pub fn hermitian_norm(a: &CMat) -> f64 {
    let (vals, _) = hermitian_eigen(a);
    vals.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Spectral norm of an arbitrary matrix via `A^*A`.
pub fn operator_norm(a: &CMat) -> f64 {
    if a.nrows() == 0 || a.ncols() == 0 {
        return 0.0;
    }
    let ata = if a.nrows() < a.ncols() {
        a * a.adjoint()
    } else {
        a.adjoint() * a
    };
    hermitian_norm(&ata).max(0.0).sqrt()
}

/// `‖V₁A₁V₁^* − V₂A₂V₂^*‖_F` for frames with orthonormal columns, given
/// `t = V₁^* V₂`.
pub fn compressed_distance(a1: &CMat, a2: &CMat, t: &CMat) -> f64 {
    let cross = a1 * t * a2 * t.adjoint();
    let sq = frobenius(a1).powi(2) + frobenius(a2).powi(2) - 2.0 * cross.trace().re;
    sq.max(0.0).sqrt()
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

pub fn anticommutator(a: &CMat, b: &CMat) -> CMat {
    a * b + b * a
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}
