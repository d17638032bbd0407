//! Unit maps `η(v) = L_v ⋆ G₀₀^{⋆(p+q)}` and the `Σ_p × Σ_q` action on
//! their modules.

use crate::bott::{clifford_merge, left_multiplication, unit_clifford};
use crate::classes::{clifford_automorphism, transport, Shuffle};
use crate::clifford::CliffordSignature;
use crate::error::{Error, Result};
use crate::linalg::CMat;
use crate::maps::{h00, make_g00, star_compressed, CompressedOperator};
use crate::module::{factor_permutation, graded_tensor, Context, GradedRealModule};
use crate::monomial::MonomialOp;
use crate::spectral::HinfOperator;

pub fn unit_context(p: usize, q: usize) -> Context {
    Context::new(p, q, p, q)
}

/// `ℂl(2p, 2q) ⊗̂ ℋ₀₀^{⊗̂(p+q)}`, one `ℋ₀₀` factor per coordinate of `v`.
pub fn unit_module(p: usize, q: usize, level: usize) -> Result<GradedRealModule> {
    let h = h00(level)?;
    let mut m = unit_clifford(p, q);
    for _ in 0..p + q {
        m = graded_tensor(&m, &h);
    }
    Ok(m)
}

/// `η(v)` for `v ∈ ℝ^{p,q}`; `None` is the point at infinity.
pub fn unit_map(v: Option<&[f64]>, p: usize, q: usize, level: usize) -> Result<HinfOperator> {
    let ctx = unit_context(p, q);
    let c = unit_clifford(p, q);
    let h = h00(level)?;
    let dim = c.dim() * h.dim().pow((p + q) as u32);
    let Some(v) = v else {
        return Ok(HinfOperator::base_point(dim, ctx));
    };
    if v.iter().any(|x| !x.is_finite()) {
        return Ok(HinfOperator::base_point(dim, ctx));
    }
    let g00 = CompressedOperator::from_config(&make_g00(level)?.config);
    let mut acc = CompressedOperator::new(CMat::identity(c.dim(), c.dim()), left_multiplication(&c, v)?);
    let mut module = c;
    for _ in 0..p + q {
        acc = star_compressed(&acc, &module, &g00);
        module = graded_tensor(&module, &h);
    }
    Ok(HinfOperator::new(acc.to_config(), ctx))
}

/// Generator images in `ℂl(2p, 2q)` moving the right generator `e_i` and
/// its twisted partner `e_{p+i}` together (likewise for `f`).
fn paired_images(p: usize, q: usize, sigma: &Shuffle) -> Vec<usize> {
    let mut images = vec![0; 2 * (p + q)];
    for (i, &t) in sigma.e.iter().enumerate() {
        images[i] = t;
        images[p + i] = p + t;
    }
    for (j, &t) in sigma.f.iter().enumerate() {
        images[2 * p + j] = 2 * p + t;
        images[2 * p + q + j] = 2 * p + q + t;
    }
    images
}

/// The isometry of `unit_module(p, q, level)` implementing `σ`: the
/// Clifford factor moves by the automorphism, the `ℋ₀₀` factors follow
/// their coordinates.
pub fn unit_shuffle(p: usize, q: usize, level: usize, sigma: &Shuffle) -> Result<MonomialOp> {
    if sigma.e.len() != p || sigma.f.len() != q {
        return Err(Error::InvalidArgument(format!(
            "shuffle of sizes ({},{}) for the unit of ({p},{q})",
            sigma.e.len(),
            sigma.f.len()
        )));
    }
    let c = unit_clifford(p, q);
    let h = h00(level)?;
    let auto = clifford_automorphism(CliffordSignature { p: 2 * p, q: 2 * q }, &paired_images(p, q, sigma));
    // coordinate i lands in slot σ(i), so slot t holds old factor σ⁻¹(t)
    let coords: Vec<usize> = sigma.e.iter().copied().chain(sigma.f.iter().map(|&t| p + t)).collect();
    let mut order = vec![0; 1 + p + q];
    for (i, &t) in coords.iter().enumerate() {
        order[1 + t] = 1 + i;
    }
    let mut gradings: Vec<&[f64]> = vec![&c.grading];
    gradings.extend(std::iter::repeat_n(h.grading.as_slice(), p + q));
    let swap = factor_permutation(&gradings, &order);
    let rest = MonomialOp::identity(h.dim().pow((p + q) as u32));
    Ok(auto.kron(&rest).compose(&swap))
}

/// `Σ_p × Σ_q` acting on an operator on `unit_module(p, q, level)`.
pub fn unit_permutation_action(sigma: &Shuffle, g: &HinfOperator, level: usize) -> Result<HinfOperator> {
    let (p, q) = (sigma.e.len(), sigma.f.len());
    let u = unit_shuffle(p, q, level, sigma)?;
    if u.dim() != g.ambient_dim() {
        return Err(Error::AmbientMismatch("operator does not live on the unit module".into()));
    }
    Ok(transport(g, &u))
}

/// The isometry `unit_module(a) ⊗̂ unit_module(b) → unit_module(a + b)`
/// under which `η(v) ⋆ η(w)` becomes `η(v ⊕ w)`.
pub fn unit_product_reindex(a: (usize, usize), b: (usize, usize), level: usize) -> Result<MonomialOp> {
    let ((p, q), (p2, q2)) = (a, b);
    let (pt, qt) = (p + p2, q + q2);
    let (na, nb) = (p + q, p2 + q2);
    let ca = unit_clifford(p, q);
    let cb = unit_clifford(p2, q2);
    let h = h00(level)?;

    let mut gradings: Vec<&[f64]> = vec![&ca.grading];
    gradings.extend(std::iter::repeat_n(h.grading.as_slice(), na));
    gradings.push(&cb.grading);
    gradings.extend(std::iter::repeat_n(h.grading.as_slice(), nb));
    let hb = 2 + na;
    let mut order = vec![0, 1 + na];
    order.extend((0..p).map(|i| 1 + i));
    order.extend((0..p2).map(|i| hb + i));
    order.extend((0..q).map(|j| 1 + p + j));
    order.extend((0..q2).map(|j| hb + p2 + j));
    let swap = factor_permutation(&gradings, &order);

    // ℂl(2p', 2q') generator order: e, e-twisted, f, f-twisted
    let images_a: Vec<usize> = (0..p)
        .chain((0..p).map(|i| pt + i))
        .chain((0..q).map(|j| 2 * pt + j))
        .chain((0..q).map(|j| 2 * pt + qt + j))
        .collect();
    let images_b: Vec<usize> = (0..p2)
        .map(|i| p + i)
        .chain((0..p2).map(|i| pt + p + i))
        .chain((0..q2).map(|j| 2 * pt + q + j))
        .chain((0..q2).map(|j| 2 * pt + qt + q + j))
        .collect();
    let merge = clifford_merge(
        CliffordSignature { p: 2 * p, q: 2 * q },
        &images_a,
        CliffordSignature { p: 2 * p2, q: 2 * q2 },
        &images_b,
        CliffordSignature { p: 2 * pt, q: 2 * qt },
    );
    let rest = MonomialOp::identity(h.dim().pow((na + nb) as u32));
    Ok(merge.kron(&rest).compose(&swap))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::{is_member, OperatorClass};
    use crate::maps::graded_index;

    #[test]
    fn unit_at_zero_keeps_the_kernel() {
        let m = unit_module(1, 0, 1).unwrap();
        let g = unit_map(Some(&[0.0]), 1, 0, 1).unwrap();
        assert_eq!(g.config.eigenvalues(), vec![0.0]);
        assert!(is_member(&g, &m, OperatorClass::KrConnective).unwrap().passed());
        assert_eq!(graded_index(&g, &m), 0);
    }

    #[test]
    fn unit_spectrum_is_the_norm() {
        let g = unit_map(Some(&[1.2, 1.6]), 1, 1, 1).unwrap();
        let eig = g.config.eigenvalues();
        assert_eq!(eig.len(), 2);
        assert!((eig[0] + 2.0).abs() < 1e-12 && (eig[1] - 2.0).abs() < 1e-12);
        assert!(unit_map(None, 1, 1, 1).unwrap().is_base_point());
    }
}
