//! Monomial (phase-permutation) matrices.
//!
//! Every structural operator of a module built from regular Clifford modules
//! and graded background spaces (gradings, Real structures, generator
//! actions, tensor reindexings) has exactly one nonzero entry per column.
//! Storing them this way keeps products of universes cheap.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::linalg::CMat;

/// `M e_j = phase[j] · e_{perm[j]}`.
#[derive(Clone, Debug, PartialEq)]
pub struct MonomialOp {
    perm: Vec<usize>,
    phase: Vec<Complex64>,
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

impl MonomialOp {
    pub fn new(perm: Vec<usize>, phase: Vec<Complex64>) -> Self {
        assert_eq!(perm.len(), phase.len());
        debug_assert!({
            let mut seen = vec![false; perm.len()];
            perm.iter().all(|&r| r < seen.len() && !std::mem::replace(&mut seen[r], true))
        });
        Self { perm, phase }
    }

    pub fn identity(n: usize) -> Self {
        Self::new((0..n).collect(), vec![one(); n])
    }

    pub fn diagonal(entries: &[f64]) -> Self {
        Self::new(
            (0..entries.len()).collect(),
            entries.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        )
    }

    pub fn permutation(perm: Vec<usize>) -> Self {
        let n = perm.len();
        Self::new(perm, vec![one(); n])
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn phases(&self) -> &[Complex64] {
        &self.phase
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim());
        let perm = other.perm.iter().map(|&r| self.perm[r]).collect();
        let phase = other
            .perm
            .iter()
            .zip(&other.phase)
            .map(|(&r, &c)| c * self.phase[r])
            .collect();
        Self::new(perm, phase)
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim();
        let mut perm = vec![0; n];
        let mut phase = vec![one(); n];
        for j in 0..n {
            perm[self.perm[j]] = j;
            phase[self.perm[j]] = self.phase[j].conj();
        }
        Self::new(perm, phase)
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Self {
        Self::new(self.perm.clone(), self.phase.iter().map(|c| c.conj()).collect())
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self::new(self.perm.clone(), self.phase.iter().map(|c| c * factor).collect())
    }

    /// Kronecker product, row-major index `(a, b) ↦ a·dim(other) + b`.
    pub fn kron(&self, other: &Self) -> Self {
        let n = other.dim();
        let mut perm = Vec::with_capacity(self.dim() * n);
        let mut phase = Vec::with_capacity(self.dim() * n);
        for a in 0..self.dim() {
            for b in 0..n {
                perm.push(self.perm[a] * n + other.perm[b]);
                phase.push(self.phase[a] * other.phase[b]);
            }
        }
        Self::new(perm, phase)
    }

    /// Block-diagonal sum.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let m = self.dim();
        let mut perm = self.perm.clone();
        perm.extend(other.perm.iter().map(|r| r + m));
        let mut phase = self.phase.clone();
        phase.extend(other.phase.iter().copied());
        Self::new(perm, phase)
    }

    pub fn apply(&self, x: &CMat) -> CMat {
        assert_eq!(x.nrows(), self.dim());
        let mut out = CMat::zeros(x.nrows(), x.ncols());
        for j in 0..self.dim() {
            let (r, c) = (self.perm[j], self.phase[j]);
            for col in 0..x.ncols() {
                out[(r, col)] = c * x[(j, col)];
            }
        }
        out
    }

    /// `x ↦ self · conj(x)`, the antilinear map with matrix part `self`.
    pub fn apply_antilinear(&self, x: &CMat) -> CMat {
        self.apply(&x.map(|z| z.conj()))
    }

    /// `self ∘ X ∘ self⁻¹` for a unitary monomial `self`.
    pub fn conjugate_dense(&self, x: &CMat) -> CMat {
        // (M (M X)^*)^* = M X M^*
        let left = self.apply(x);
        self.apply(&left.adjoint()).adjoint()
    }

    pub fn to_dense(&self) -> CMat {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for j in 0..n {
            m[(self.perm[j], j)] = self.phase[j];
        }
        m
    }

    /// Largest column norm of `self - other`; zero iff the operators agree.
    pub fn distance(&self, other: &Self) -> f64 {
        assert_eq!(self.dim(), other.dim());
        (0..self.dim())
            .map(|j| {
                if self.perm[j] == other.perm[j] {
                    (self.phase[j] - other.phase[j]).norm()
                } else {
                    (self.phase[j].norm_sqr() + other.phase[j].norm_sqr()).sqrt()
                }
            })
            .fold(0.0, f64::max)
    }

    /// Largest column norm of `self + other`.
    pub fn sum_norm(&self, other: &Self) -> f64 {
        self.distance(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// Deviation from unitarity (phases must have modulus one).
    pub fn unitarity_defect(&self) -> f64 {
        self.phase
            .iter()
            .map(|c| (c.norm() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    pub fn is_diagonal(&self) -> bool {
        self.perm.iter().enumerate().all(|(j, &r)| j == r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> MonomialOp {
        MonomialOp::new(
            vec![2, 0, 1],
            vec![
                Complex64::new(0.0, 1.0),
                Complex64::new(-1.0, 0.0),
                Complex64::new(1.0, 0.0),
            ],
        )
    }

    #[test]
    fn dense_agrees_with_compose_and_adjoint() {
        let a = sample();
        let b = MonomialOp::new(vec![1, 2, 0], vec![one(), Complex64::new(0.0, -1.0), one()]);
        let dense = a.to_dense() * b.to_dense();
        assert_eq!(a.compose(&b).to_dense(), dense);
        assert_eq!(a.adjoint().to_dense(), a.to_dense().adjoint());
        assert_eq!(a.compose(&a.adjoint()), MonomialOp::identity(3));
    }

    #[test]
    fn kron_matches_dense_kronecker() {
        let a = sample();
        let b = MonomialOp::diagonal(&[1.0, -1.0]);
        assert_eq!(a.kron(&b).to_dense(), a.to_dense().kronecker(&b.to_dense()));
    }

    #[test]
    fn conjugation_and_apply() {
        let a = sample();
        let x = CMat::from_fn(3, 3, |i, j| Complex64::new(i as f64 + 0.5, j as f64 - 1.0));
        assert_eq!(a.apply(&x), a.to_dense() * &x);
        let expect = a.to_dense() * &x * a.to_dense().adjoint();
        assert!((a.conjugate_dense(&x) - expect).norm() < 1e-15);
    }
}
