//! Total spaces `ĤE`, `ĤF` and the maps `φ(G,E) = G + E·εe_p`,
//! `ψ(G,F) = G + F·εf_q`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::classes::{invariance_residual, is_member, OperatorClass, MEMBER_TOL};
use crate::error::{Error, Result};
use crate::linalg::{frobenius, gram, hermitian_eigen, matmul, mul_frame, orthonormalize, CMat};
use crate::maps::CompressedOperator;
use crate::module::{Context, GradedRealModule};
use crate::monomial::MonomialOp;
use crate::report::Report;
use crate::spectral::{HinfOperator, SpectralConfiguration};

pub const SPLIT_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Flavor {
    E,
    F,
}

/// A point `(D; G, E)` or `(D; G, F)` of a total space.
///
/// `g` and `companion` are written in the basis `domain`. A skew companion
/// `F` is stored as `H` with `F = iH`. The columns of `minus_infinity`
/// (domain coordinates) span the eigenspace where the companion is `−∞`
/// (resp. `−i∞`); the companion block vanishes there.
#[derive(Clone, Debug, PartialEq)]
pub struct TotalSpaceTriple {
    pub flavor: Flavor,
    pub context: Context,
    pub domain: CMat,
    pub g: CMat,
    pub companion: CMat,
    pub minus_infinity: CMat,
}

impl TotalSpaceTriple {
    pub fn new(flavor: Flavor, context: Context, domain: CMat, g: CMat, companion: CMat) -> Self {
        let r = domain.ncols();
        Self {
            flavor,
            context,
            domain,
            g,
            companion,
            minus_infinity: CMat::zeros(r, 0),
        }
    }

    pub fn base_point(flavor: Flavor, context: Context, ambient_dim: usize) -> Self {
        Self::new(flavor, context, CMat::zeros(ambient_dim, 0), CMat::zeros(0, 0), CMat::zeros(0, 0))
    }

    pub fn with_minus_infinity(mut self, cols: CMat) -> Self {
        self.minus_infinity = cols;
        self
    }

    pub fn rank(&self) -> usize {
        self.domain.ncols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.domain.nrows()
    }

    /// Orthonormal basis (domain coordinates) of `D ∩ (E_{−∞})^⊥`.
    pub fn finite_part(&self) -> CMat {
        let r = self.rank();
        if self.minus_infinity.ncols() == 0 {
            return CMat::identity(r, r);
        }
        let id = CMat::identity(r, r);
        let pi = &self.minus_infinity * self.minus_infinity.adjoint();
        orthonormalize(&(id - pi), 1e-8)
    }

    pub fn g_operator(&self) -> HinfOperator {
        HinfOperator::new(
            SpectralConfiguration::from_compressed(&self.domain, &self.g),
            self.context,
        )
    }

    /// The companion on its own (finite) domain.
    pub fn companion_operator(&self) -> HinfOperator {
        let q = self.finite_part();
        let frame = mul_frame(&self.domain, &q);
        let a = q.adjoint() * &self.companion * &q;
        HinfOperator::new(SpectralConfiguration::from_compressed(&frame, &a), self.context)
    }

    /// `G` restricted to `D ∩ (E_{−∞})^⊥`, in the reduced frame.
    pub fn reduced(&self) -> (CMat, CMat, CMat) {
        let q = self.finite_part();
        let frame = mul_frame(&self.domain, &q);
        let g = q.adjoint() * &self.g * &q;
        let c = q.adjoint() * &self.companion * &q;
        (frame, g, c)
    }

    /// Checks the triple invariants: commuting `G` and companion, memberships
    /// and the `−∞` flag compatibility.
    pub fn validate(&self, module: &GradedRealModule) -> Result<Report> {
        let mut report = Report::new();
        let commutator = &self.g * &self.companion - &self.companion * &self.g;
        report.record("[G, companion] = 0 on D", frobenius(&commutator), MEMBER_TOL);
        if self.minus_infinity.ncols() > 0 {
            let pi = &self.minus_infinity * self.minus_infinity.adjoint();
            report.record("G preserves the -inf part", frobenius(&(&self.g * &pi - &pi * &self.g)), MEMBER_TOL);
            report.record("companion vanishes on the -inf part", frobenius(&(&self.companion * &pi)), MEMBER_TOL);
        }
        report.extend(is_member(&self.g_operator(), module, OperatorClass::KrConnective)?);
        let cls = match self.flavor {
            Flavor::E => OperatorClass::EClass,
            Flavor::F => OperatorClass::FClass,
        };
        let comp = is_member(&self.companion_operator(), module, cls)?;
        for mut c in comp.checks {
            c.check = format!("companion {}", c.check);
            report.push(c);
        }
        let combined = module
            .right_generators()
            .chain(module.left_generators())
            .map(|x| invariance_residual(&self.domain, x))
            .fold(0.0, f64::max);
        report.record("domain Clifford-invariant", combined, MEMBER_TOL);
        Ok(report)
    }
}

fn twist(module: &GradedRealModule, flavor: Flavor) -> Result<MonomialOp> {
    let ctx = module.context();
    match flavor {
        Flavor::E if ctx.p >= 1 => Ok(module.twist_e(ctx.p - 1)),
        Flavor::F if ctx.q >= 1 => Ok(module.twist_f(ctx.q - 1)),
        Flavor::E => Err(Error::InvalidArgument("φ needs p ≥ 1".into())),
        Flavor::F => Err(Error::InvalidArgument("ψ needs q ≥ 1".into())),
    }
}

/// Context of the image: `(p−1, q, k+1, l)` for `φ`, `(p, q−1, k, l+1)` for `ψ`.
pub fn image_context(ctx: Context, flavor: Flavor) -> Context {
    match flavor {
        Flavor::E => Context::new(ctx.p - 1, ctx.q, ctx.k + 1, ctx.l),
        Flavor::F => Context::new(ctx.p, ctx.q - 1, ctx.k, ctx.l + 1),
    }
}

/// Module of the image (the twisted generator moved to the left).
pub fn image_module(module: &GradedRealModule, flavor: Flavor) -> Result<GradedRealModule> {
    match flavor {
        Flavor::E => module.fold_e(),
        Flavor::F => module.fold_f(),
    }
}

/// The image operator in compressed form on the reduced domain.
pub fn quasi_compressed(t: &TotalSpaceTriple, module: &GradedRealModule) -> Result<CompressedOperator> {
    let tau = twist(module, t.flavor)?;
    let (frame, g, c) = t.reduced();
    let tau_c = gram(&frame, &tau.apply(&frame));
    let extra = match t.flavor {
        Flavor::E => &c * &tau_c,
        Flavor::F => (&c * &tau_c) * Complex64::new(0.0, 1.0),
    };
    Ok(CompressedOperator::new(frame, g + extra))
}

fn quasi_map(t: &TotalSpaceTriple, module: &GradedRealModule, flavor: Flavor) -> Result<HinfOperator> {
    if t.flavor != flavor {
        return Err(Error::InvalidArgument(format!("expected a {flavor:?}-triple")));
    }
    if t.context != module.context() {
        return Err(Error::AmbientMismatch(format!(
            "triple context {} on module {}",
            t.context,
            module.context()
        )));
    }
    let report = t.validate(module)?;
    if let Some(fail) = report.failures().first() {
        return Err(Error::Invariant {
            check: fail.check.clone(),
            residual: fail.residual,
        });
    }
    let c = quasi_compressed(t, module)?;
    Ok(HinfOperator::new(c.to_config(), image_context(t.context, flavor)))
}

/// `φ(D; G, E) = G + E·εe_p` on `D ∩ (E_{−∞})^⊥`.
pub fn phi_total(t: &TotalSpaceTriple, module: &GradedRealModule) -> Result<HinfOperator> {
    quasi_map(t, module, Flavor::E)
}

/// `ψ(D; G, F) = G + F·εf_q` on `D ∩ (F_{−i∞})^⊥`.
pub fn psi_total(t: &TotalSpaceTriple, module: &GradedRealModule) -> Result<HinfOperator> {
    quasi_map(t, module, Flavor::F)
}

/// `‖P² − (G² + E²)‖` for `φ`, `‖P² − (G² − F²)‖` for `ψ`, with `P` read
/// back from the image configuration.
pub fn square_law_residual(t: &TotalSpaceTriple, image: &HinfOperator) -> f64 {
    let (frame, g, c) = t.reduced();
    let (v, a) = image.config.compressed();
    let basis = gram(&frame, &v);
    let p = &basis * &a * basis.adjoint();
    // F = iH gives −F² = H², so both laws read G² + C².
    let expect = &g * &g + &c * &c;
    let leak = frobenius(&(&v - mul_frame(&frame, &basis)));
    frobenius(&(&p * &p - expect)) + leak
}

/// Splits `P` along the last left generator of `module` (the folded twist):
/// `G = (P − τPτ⁻¹)/2` and `companion·τ = (P + τPτ⁻¹)/2`.
pub fn fiber_extract(p: &HinfOperator, module: &GradedRealModule, flavor: Flavor) -> Result<TotalSpaceTriple> {
    let ctx = p.context;
    let (tau, origin) = match flavor {
        Flavor::E => (
            module.left_pos.last(),
            ctx.k.checked_sub(1).map(|k| Context::new(ctx.p + 1, ctx.q, k, ctx.l)),
        ),
        Flavor::F => (
            module.left_neg.last(),
            ctx.l.checked_sub(1).map(|l| Context::new(ctx.p, ctx.q + 1, ctx.k, l)),
        ),
    };
    let (tau, origin) = match (tau, origin) {
        (Some(t), Some(o)) => (t, o),
        _ => return Err(Error::InvalidArgument("no twisted generator to split along".into())),
    };
    if p.is_base_point() {
        return Ok(TotalSpaceTriple::base_point(flavor, origin, p.ambient_dim()));
    }
    let (v, a) = p.config.compressed();
    let leak = invariance_residual(&v, tau);
    if leak > SPLIT_TOL {
        return Err(Error::Invariant {
            check: "domain invariant under the twist".into(),
            residual: leak,
        });
    }
    let t = gram(&v, &tau.apply(&v));
    let conj = matmul(&matmul(&t, &a), &t.adjoint());
    let half = Complex64::new(0.5, 0.0);
    let g = (&a - &conj) * half;
    let x = (&a + &conj) * half;
    let mut companion = &x * t.adjoint();
    if flavor == Flavor::F {
        companion *= Complex64::new(0.0, -1.0);
    }
    let defect = frobenius(&(&companion - companion.adjoint())) + frobenius(&(&g * &companion - &companion * &g));
    if defect > SPLIT_TOL {
        return Err(Error::Invariant {
            check: "splitting along the twist".into(),
            residual: defect,
        });
    }
    let companion = (&companion + companion.adjoint()) * half;
    Ok(TotalSpaceTriple::new(flavor, origin, v, g, companion))
}

/// Operator-norm style distance between two compressed operators written in
/// (possibly different) frames of the same subspace.
pub fn compressed_distance(v1: &CMat, a1: &CMat, v2: &CMat, a2: &CMat) -> f64 {
    let t = gram(v1, v2);
    let leak = frobenius(&(v2 - mul_frame(v1, &t)));
    frobenius(&(a1 - matmul(&matmul(&t, a2), &t.adjoint()))) + leak
}

/// Eigenvalues of the compressed companion together with those of `G` on a
/// joint eigenbasis, as `(λ, μ)` pairs.
pub fn joint_spectrum(t: &TotalSpaceTriple) -> Vec<(f64, f64)> {
    let (_, g, c) = t.reduced();
    // generic combination separates joint eigenspaces
    let mix = &g + &c * Complex64::new(std::f64::consts::SQRT_2 / 3.0, 0.0);
    let (_, vecs) = hermitian_eigen(&mix);
    (0..vecs.ncols())
        .map(|j| {
            let col = vecs.column(j);
            let lam = (col.adjoint() * &g * col)[(0, 0)].re;
            let mu = (col.adjoint() * &c * col)[(0, 0)].re;
            (lam, mu)
        })
        .collect()
}
