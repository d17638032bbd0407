//! Operator classes `KR_{p,q}`, `kr_{p,q}` and the even companion classes,
//! together with the `ℤ/2` action, fixed points, the cover map, filtration
//! levels and the `Σ_p × Σ_q` action.
//!
//! Skew-adjoint companions `F` are stored through the self-adjoint `H` with
//! `F = iH`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::clifford::{map_word, CliffordSignature};
use crate::error::{Error, Result};
use crate::linalg::{frobenius, gram, matmul, mul_frame, real, CMat};
use crate::module::{Context, GradedRealModule};
use crate::monomial::MonomialOp;
use crate::report::Report;
use crate::spectral::{configuration_distance, projection_distance, HinfOperator, SpectralConfiguration};

pub const MEMBER_TOL: f64 = 1e-9;
pub const FIXED_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OperatorClass {
    /// Odd, self-adjoint, right-Clifford-linear.
    Kr,
    /// `Kr` with `G²` also commuting with the left action.
    KrConnective,
    /// Even, self-adjoint, linear for the combined action.
    EClass,
    /// Even, skew-adjoint, linear for the combined action.
    FClass,
}

/// `‖[G, X]‖_F` (or `‖{G, X}‖_F`) for `G = V A V^*` and a unitary monomial
/// `X` that is self- or skew-adjoint.
///
/// With `XV = VB + W` and `X^*V = VB^* + W'` the squared norm splits as
/// `‖AB ∓ BA‖² + ‖WA‖² + ‖W'A‖²`, which avoids cancellation.
pub fn commutation_residual(v: &CMat, a: &CMat, x: &MonomialOp, anti: bool) -> f64 {
    if v.ncols() == 0 {
        return 0.0;
    }
    let xv = x.apply(v);
    let b = gram(v, &xv);
    let w = &xv - mul_frame(v, &b);
    let xadj_v = x.adjoint().apply(v);
    let w2 = &xadj_v - mul_frame(v, &b.adjoint());
    let sign = if anti { 1.0 } else { -1.0 };
    let r = a.nrows();
    let diagonal = (0..r).all(|i| (0..r).all(|j| i == j || a[(i, j)] == Complex64::new(0.0, 0.0)));
    let (inner, wa, w2a) = if diagonal {
        let d: Vec<Complex64> = (0..r).map(|i| a[(i, i)]).collect();
        (
            CMat::from_fn(r, r, |i, j| b[(i, j)] * (d[i] + d[j] * sign)),
            CMat::from_fn(w.nrows(), r, |i, j| w[(i, j)] * d[j]),
            CMat::from_fn(w2.nrows(), r, |i, j| w2[(i, j)] * d[j]),
        )
    } else {
        let ab = matmul(a, &b);
        let ba = matmul(&b, a);
        (ab + ba * real(sign), matmul(&w, a), matmul(&w2, a))
    };
    (frobenius(&inner).powi(2) + frobenius(&wa).powi(2) + frobenius(&w2a).powi(2)).sqrt()
}

/// `‖XV − V V^* X V‖_F`: how far `X` moves the span of `V` off itself.
pub fn invariance_residual(v: &CMat, x: &MonomialOp) -> f64 {
    if v.ncols() == 0 {
        return 0.0;
    }
    let xv = x.apply(v);
    let b = gram(v, &xv);
    frobenius(&(&xv - mul_frame(v, &b)))
}

fn check_context(g: &HinfOperator, module: &GradedRealModule) -> Result<()> {
    if g.context != module.context() {
        return Err(Error::AmbientMismatch(format!(
            "operator context {} on a module of context {}",
            g.context,
            module.context()
        )));
    }
    if g.ambient_dim() != module.dim() {
        return Err(Error::AmbientMismatch(format!(
            "operator on dimension {} but module has dimension {}",
            g.ambient_dim(),
            module.dim()
        )));
    }
    Ok(())
}

/// Evaluates the defining predicates of `cls` for `g` on `module`.
pub fn is_member(g: &HinfOperator, module: &GradedRealModule, cls: OperatorClass) -> Result<Report> {
    check_context(g, module)?;
    let (v, a) = g.config.compressed();
    let eps = module.grading_op();
    let mut report = Report::new();
    let worst = |ops: &mut dyn Iterator<Item = &MonomialOp>, f: &dyn Fn(&MonomialOp) -> f64| {
        ops.map(f).fold(0.0, f64::max)
    };

    // eigenvalues are real by construction
    report.record("self-adjoint", 0.0, MEMBER_TOL);
    report.record("domain graded", invariance_residual(&v, &eps), MEMBER_TOL);
    let parity = commutation_residual(&v, &a, &eps, matches!(cls, OperatorClass::Kr | OperatorClass::KrConnective));
    match cls {
        OperatorClass::Kr | OperatorClass::KrConnective => report.record("odd", parity, MEMBER_TOL),
        OperatorClass::EClass | OperatorClass::FClass => report.record("even", parity, MEMBER_TOL),
    }
    report.record(
        "domain right-invariant",
        worst(&mut module.right_generators(), &|x| invariance_residual(&v, x)),
        MEMBER_TOL,
    );
    report.record(
        "right-linear",
        worst(&mut module.right_generators(), &|x| commutation_residual(&v, &a, x, false)),
        MEMBER_TOL,
    );
    match cls {
        OperatorClass::Kr => {}
        OperatorClass::KrConnective => {
            let a2 = &a * &a;
            report.record(
                "domain left-invariant",
                worst(&mut module.left_generators(), &|x| invariance_residual(&v, x)),
                MEMBER_TOL,
            );
            report.record(
                "square left-linear",
                worst(&mut module.left_generators(), &|x| commutation_residual(&v, &a2, x, false)),
                MEMBER_TOL,
            );
        }
        OperatorClass::EClass | OperatorClass::FClass => {
            report.record(
                "domain left-invariant",
                worst(&mut module.left_generators(), &|x| invariance_residual(&v, x)),
                MEMBER_TOL,
            );
            report.record(
                "left-linear",
                worst(&mut module.left_generators(), &|x| commutation_residual(&v, &a, x, false)),
                MEMBER_TOL,
            );
        }
    }
    Ok(report)
}

pub fn is_member_bool(g: &HinfOperator, module: &GradedRealModule, cls: OperatorClass) -> bool {
    is_member(g, module, cls).map(|r| r.passed()).unwrap_or(false)
}

/// `θ G θ`: same eigenvalues, eigenspaces moved by `θ`.
pub fn theta_conjugate(g: &HinfOperator, module: &GradedRealModule) -> HinfOperator {
    HinfOperator::new(theta_config(&g.config, module), g.context)
}

pub fn theta_config(c: &SpectralConfiguration, module: &GradedRealModule) -> SpectralConfiguration {
    c.map_frames(c.ambient_dim(), |f| module.theta_frame(f))
}

/// `θ F θ` for a skew companion stored as `H` with `F = iH`: since `θ` is
/// antilinear the stored operator becomes `-θHθ`.
pub fn theta_conjugate_skew(h: &HinfOperator, module: &GradedRealModule) -> HinfOperator {
    let c = theta_config(&h.config, module).functional_calculus(|t| -t);
    HinfOperator::new(c, h.context)
}

/// Fixed point via the configuration metric: `d(G, θGθ) ≤ 1e-9`.
pub fn is_fixed_point(g: &HinfOperator, module: &GradedRealModule) -> bool {
    fixed_point_distance(g, module) <= FIXED_TOL
}

pub fn fixed_point_distance(g: &HinfOperator, module: &GradedRealModule) -> f64 {
    let t = theta_conjugate(g, module);
    configuration_distance(&g.config, &t.config).unwrap_or(f64::INFINITY)
}

/// Fixed point via eigenspaces: every `P_λ` satisfies `θ P_λ θ = P_λ`.
pub fn eigenspaces_theta_invariant(g: &HinfOperator, module: &GradedRealModule) -> bool {
    eigenspace_theta_defect(g, module) <= FIXED_TOL
}

pub fn eigenspace_theta_defect(g: &HinfOperator, module: &GradedRealModule) -> f64 {
    g.config
        .points()
        .iter()
        .map(|p| projection_distance(&p.frame, &module.theta_frame(&p.frame)))
        .fold(0.0, f64::max)
}

/// Inclusion `kr_{p,q} ⊂ KR_{p,q}`: identity on data.
pub fn cover_map(g: &HinfOperator, module: &GradedRealModule) -> Result<HinfOperator> {
    let report = is_member(g, module, OperatorClass::KrConnective)?;
    if let Some(fail) = report.failures().first() {
        return Err(Error::Precondition {
            check: format!("kr membership: {}", fail.check),
            residual: fail.residual,
        });
    }
    Ok(g.clone())
}

/// Domain rank in units of the regular module of `Cl(p+k, q+l)`.
pub fn filtration_level(g: &HinfOperator, module: &GradedRealModule) -> Result<usize> {
    check_context(g, module)?;
    let v = g.config.domain_frame();
    let eps = module.grading_op();
    let residual = module
        .right_generators()
        .chain(module.left_generators())
        .chain(std::iter::once(&eps))
        .map(|x| invariance_residual(&v, x))
        .fold(0.0, f64::max);
    if residual > MEMBER_TOL {
        return Err(Error::Precondition {
            check: "domain invariant under the combined Clifford action".into(),
            residual,
        });
    }
    let unit = g.context.combined().dim();
    let rank = g.config.rank();
    if !rank.is_multiple_of(unit) {
        return Err(Error::NonIntegerLevel { rank, unit });
    }
    Ok(rank / unit)
}

/// An element of `Σ_p × Σ_q`; `e[i]` is the image of `e_{i+1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Shuffle {
    pub e: Vec<usize>,
    pub f: Vec<usize>,
}

impl Shuffle {
    pub fn new(e: Vec<usize>, f: Vec<usize>) -> Result<Self> {
        for (name, perm) in [("e", &e), ("f", &f)] {
            let mut seen = vec![false; perm.len()];
            for &x in perm.iter() {
                if x >= perm.len() || std::mem::replace(&mut seen[x], true) {
                    return Err(Error::InvalidArgument(format!("{name} part {perm:?} is not a permutation")));
                }
            }
        }
        Ok(Self { e, f })
    }

    pub fn identity(p: usize, q: usize) -> Self {
        Self {
            e: (0..p).collect(),
            f: (0..q).collect(),
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            e: other.e.iter().map(|&i| self.e[i]).collect(),
            f: other.f.iter().map(|&j| self.f[j]).collect(),
        }
    }

    pub fn inverse(&self) -> Self {
        let inv = |p: &[usize]| {
            let mut out = vec![0; p.len()];
            for (i, &x) in p.iter().enumerate() {
                out[x] = i;
            }
            out
        };
        Self {
            e: inv(&self.e),
            f: inv(&self.f),
        }
    }

    /// Image of a vector `(v₁..v_p, w₁..w_q)`: coordinate `i` moves to
    /// position `σ(i)`.
    pub fn act_on_vector(&self, v: &[f64]) -> Vec<f64> {
        let p = self.e.len();
        let mut out = vec![0.0; v.len()];
        for (i, &t) in self.e.iter().enumerate() {
            out[t] = v[i];
        }
        for (j, &t) in self.f.iter().enumerate() {
            out[p + t] = v[p + j];
        }
        out
    }
}

/// Algebra automorphism of `ℂl(sig)` sending generator `g` to `images[g]`,
/// as an operator on the regular module. Must map `e`'s to `e`'s and `f`'s
/// to `f`'s.
pub fn clifford_automorphism(sig: CliffordSignature, images: &[usize]) -> MonomialOp {
    let n = sig.dim();
    let mut perm = Vec::with_capacity(n);
    let mut phase = Vec::with_capacity(n);
    for w in 0..n as u32 {
        let (out, sign) = map_word(w, images);
        perm.push(out as usize);
        phase.push(Complex64::new(sign, 0.0));
    }
    MonomialOp::new(perm, phase)
}

/// Generator images in `ℂl(p+k, q+l)` for a shuffle of the right
/// generators; the left generators stay put.
pub fn shuffle_images(ctx: Context, sigma: &Shuffle) -> Vec<usize> {
    let sig = ctx.combined();
    let mut images: Vec<usize> = (0..sig.generators()).collect();
    for (i, &t) in sigma.e.iter().enumerate() {
        images[i] = t;
    }
    for (j, &t) in sigma.f.iter().enumerate() {
        images[sig.p + j] = sig.p + t;
    }
    images
}

/// The isometry implementing `σ` on the universe of context `ctx` at
/// `level` (background factor untouched).
pub fn universe_shuffle(ctx: Context, level: usize, sigma: &Shuffle) -> Result<MonomialOp> {
    if sigma.e.len() != ctx.p || sigma.f.len() != ctx.q {
        return Err(Error::InvalidArgument(format!(
            "shuffle of sizes ({},{}) for context {ctx}",
            sigma.e.len(),
            sigma.f.len()
        )));
    }
    let background = MonomialOp::identity(2 * level);
    if ctx.total() == 0 {
        return Ok(background.kron(&background));
    }
    let auto = clifford_automorphism(ctx.combined(), &shuffle_images(ctx, sigma));
    Ok(background.kron(&auto))
}

/// Conjugates every eigenspace by the isometry `u`.
pub fn transport(g: &HinfOperator, u: &MonomialOp) -> HinfOperator {
    HinfOperator::new(g.config.map_frames(g.ambient_dim(), |f| u.apply(f)), g.context)
}

/// `Σ_p × Σ_q` acting on an operator on a universe.
pub fn permutation_action(sigma: &Shuffle, g: &HinfOperator, level: usize) -> Result<HinfOperator> {
    let u = universe_shuffle(g.context, level, sigma)?;
    if u.dim() != g.ambient_dim() {
        return Err(Error::AmbientMismatch("operator does not live on the universe".into()));
    }
    Ok(transport(g, &u))
}
