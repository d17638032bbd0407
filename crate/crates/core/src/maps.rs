//! Structure maps: the `⋆` product, `G₀₀`, graded index, the index shift,
//! the quasifibration maps `φ`/`ψ` with fiber extraction, Bott maps and
//! their `θ`-actions, and the unit map.
//!
//! Everything is computed on compressed operators `(V, A)` meaning
//! `V A V^*`, where `V` has orthonormal columns; configurations are only
//! formed at the end.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::Result;
use crate::linalg::{frobenius, gram, hermitian_eigen, real, CMat};
use crate::module::{build_universe, graded_tensor, regular_with_context, Context, GradedRealModule};
use crate::monomial::MonomialOp;
use crate::spectral::{HinfOperator, Point, SpectralConfiguration};

/// `V A V^*` with `V` orthonormal and `A` Hermitian.
#[derive(Clone, Debug, PartialEq)]
pub struct CompressedOperator {
    pub frame: CMat,
    pub matrix: CMat,
}

impl CompressedOperator {
    pub fn new(frame: CMat, matrix: CMat) -> Self {
        debug_assert_eq!(frame.ncols(), matrix.nrows());
        Self { frame, matrix }
    }

    pub fn from_config(c: &SpectralConfiguration) -> Self {
        let (frame, matrix) = c.compressed();
        Self { frame, matrix }
    }

    pub fn to_config(&self) -> SpectralConfiguration {
        SpectralConfiguration::from_compressed(&self.frame, &self.matrix)
    }

    pub fn ambient_dim(&self) -> usize {
        self.frame.nrows()
    }

    pub fn rank(&self) -> usize {
        self.frame.ncols()
    }

    /// `V^* X V`.
    pub fn restrict(&self, x: &MonomialOp) -> CMat {
        gram(&self.frame, &x.apply(&self.frame))
    }

    pub fn with_matrix(&self, matrix: CMat) -> Self {
        Self::new(self.frame.clone(), matrix)
    }
}

/// `G ⋆ H = G ⊗̂ I + I ⊗̂ H` on `dom G ⊗ dom H`; the second summand is
/// `ε_M ⊗ H` by the Koszul rule.
pub fn star_compressed(g: &CompressedOperator, m: &GradedRealModule, h: &CompressedOperator) -> CompressedOperator {
    let eps_g = g.restrict(&m.grading_op());
    let id_h = CMat::identity(h.rank(), h.rank());
    let matrix = g.matrix.kronecker(&id_h) + eps_g.kronecker(&h.matrix);
    CompressedOperator::new(g.frame.kronecker(&h.frame), matrix)
}

/// `⋆` product; the result lives on `graded_tensor(m, n)` with the summed
/// context.
pub fn star_product(g: &HinfOperator, m: &GradedRealModule, h: &HinfOperator) -> HinfOperator {
    let gc = CompressedOperator::from_config(&g.config);
    let hc = CompressedOperator::from_config(&h.config);
    let config = if gc.rank() == 0 || hc.rank() == 0 {
        SpectralConfiguration::base_point(g.ambient_dim() * h.ambient_dim())
    } else {
        star_compressed(&gc, m, &hc).to_config()
    };
    HinfOperator::new(config, g.context.add(&h.context))
}

/// Absolute tolerance below which an eigenvalue counts as kernel.
pub const KERNEL_TOL: f64 = 1e-9;

/// `dim ker⁺ − dim ker⁻` of the kernel inside the domain.
pub fn graded_index(g: &HinfOperator, m: &GradedRealModule) -> i64 {
    let eps = m.grading_op();
    g.config
        .points()
        .iter()
        .filter(|p| p.lambda.abs() <= KERNEL_TOL)
        .map(|p| gram(&p.frame, &eps.apply(&p.frame)).trace().re)
        .sum::<f64>()
        .round() as i64
}

/// `ℋ_{0,0}` at `level`: the background squared.
pub fn h00(level: usize) -> Result<GradedRealModule> {
    build_universe(Context::default(), level)
}

/// `G₀₀`: eigenvalue 0 on the even, real basis line `e₀ ⊗ e₀` of `ℋ_{0,0}`.
pub fn make_g00(level: usize) -> Result<HinfOperator> {
    let m = h00(level)?;
    let mut frame = CMat::zeros(m.dim(), 1);
    frame[(0, 0)] = real(1.0);
    let config = SpectralConfiguration::from_points_unchecked(m.dim(), vec![Point { lambda: 0.0, frame }]);
    Ok(HinfOperator::new(config, Context::default()))
}

/// The factor `ℂl(1,1) ⊗̂ ℋ_{0,0}` with `G̃₀₀ = Id_{ℂl(1,1)} ⊗̂ G₀₀` on it.
#[derive(Debug)]
pub struct ShiftFactor {
    pub module: GradedRealModule,
    pub op: CompressedOperator,
}

pub fn shift_factor(level: usize) -> Result<Arc<ShiftFactor>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<ShiftFactor>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(found) = cache.lock().unwrap().get(&level) {
        return Ok(found.clone());
    }
    let cl = regular_with_context(Context::new(1, 1, 0, 0));
    let h = h00(level)?;
    let module = graded_tensor(&cl, &h);
    let g00 = CompressedOperator::from_config(&make_g00(level)?.config);
    let id = CompressedOperator::new(CMat::identity(cl.dim(), cl.dim()), CMat::zeros(cl.dim(), cl.dim()));
    let op = star_compressed(&id, &cl, &g00);
    let factor = Arc::new(ShiftFactor { module, op });
    cache.lock().unwrap().insert(level, factor.clone());
    Ok(factor)
}

pub fn make_g00_tilde(level: usize) -> Result<HinfOperator> {
    let s = shift_factor(level)?;
    Ok(HinfOperator::new(s.op.to_config(), Context::new(1, 1, 0, 0)))
}

/// `ℂl(1,1) ⊗̂ ℋ_{0,0} ⊗̂ M` with the new right generators listed last.
pub fn shift_module(m: &GradedRealModule, level: usize) -> Result<GradedRealModule> {
    let s = shift_factor(level)?;
    Ok(graded_tensor(&s.module, m).rotate_right_front(1, 1))
}

pub fn index_shift_compressed(g: &CompressedOperator, level: usize) -> Result<CompressedOperator> {
    let s = shift_factor(level)?;
    Ok(star_compressed(&s.op, &s.module, g))
}

/// `(Id_{ℂl(1,1)} ⊗̂ G₀₀) ⋆ G`, reindexed to context `(p+1, q+1, k, l)` on
/// `shift_module(m, level)`.
pub fn index_shift(g: &HinfOperator, level: usize) -> Result<HinfOperator> {
    let s = shift_factor(level)?;
    let ctx = Context::new(g.context.p + 1, g.context.q + 1, g.context.k, g.context.l);
    if g.is_base_point() {
        return Ok(HinfOperator::base_point(s.module.dim() * g.ambient_dim(), ctx));
    }
    let gc = CompressedOperator::from_config(&g.config);
    Ok(HinfOperator::new(index_shift_compressed(&gc, level)?.to_config(), ctx))
}

/// Largest entry-wise Frobenius deviation from Hermitian.
pub fn hermitian_defect(a: &CMat) -> f64 {
    frobenius(&(a - a.adjoint()))
}

/// Eigenvalues (with multiplicity) of a compressed operator.
pub fn compressed_spectrum(c: &CompressedOperator) -> Vec<f64> {
    hermitian_eigen(&c.matrix).0
}
