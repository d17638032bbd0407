//! Bott maps `β₁₀`, `β₀₁`, `β₁₁`, loop families and their `θ`-actions.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classes::theta_config;
use crate::clifford::{map_word, reorder_sign, CliffordSignature};
use crate::error::{Error, Result};
use crate::linalg::{frobenius, gram, matmul, mul_frame, CMat};
use crate::maps::{h00, index_shift_compressed, make_g00, shift_factor, shift_module, star_compressed, CompressedOperator};
use crate::module::{factor_permutation, graded_tensor, regular_with_context, Context, GradedRealModule};
use crate::monomial::MonomialOp;
use crate::spectral::{ConfigJson, HinfOperator, SpectralConfiguration};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LoopFlavor {
    Omega10,
    Omega01,
}

/// `n` finite samples `t = tan(u)`, `u` uniform in `(−π/2, π/2)`, plus the
/// endpoints `±∞`. `n` must be odd; the grid is exactly symmetric.
pub fn symmetric_grid(n: usize) -> Result<Vec<f64>> {
    if n.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!("grid size {n} must be odd")));
    }
    let half = (n - 1) / 2;
    let positive: Vec<f64> = (1..=half)
        .map(|j| (j as f64 * PI / (2 * (half + 1)) as f64).tan())
        .collect();
    let mut grid = vec![f64::NEG_INFINITY];
    grid.extend(positive.iter().rev().map(|t| -t));
    grid.push(0.0);
    grid.extend(positive.iter().copied());
    grid.push(f64::INFINITY);
    Ok(grid)
}

pub fn is_symmetric(grid: &[f64]) -> bool {
    let n = grid.len();
    (0..n).all(|i| grid[i] == -grid[n - 1 - i])
}

/// A sampled loop `t ↦ γ(t)` with base points at `±∞`.
#[derive(Clone, Debug, PartialEq)]
pub struct LoopFamily {
    pub grid: Vec<f64>,
    pub values: Vec<HinfOperator>,
    pub context: Context,
    pub flavor: LoopFlavor,
}

impl LoopFamily {
    pub fn endpoints_are_base_points(&self) -> bool {
        self.grid
            .iter()
            .zip(&self.values)
            .all(|(t, v)| t.is_finite() || v.is_base_point())
    }

    pub fn to_json(&self) -> LoopJson {
        LoopJson {
            schema: "loop.v1".into(),
            flavor: self.flavor,
            grid: self.grid.iter().map(|&t| GridPoint::from(t)).collect(),
            values: self.values.iter().map(HinfOperator::to_json).collect(),
        }
    }

    pub fn from_json(json: &LoopJson) -> Result<Self> {
        let values = json
            .values
            .iter()
            .map(HinfOperator::from_json)
            .collect::<Result<Vec<_>>>()?;
        if values.len() != json.grid.len() {
            return Err(Error::Parse("grid and values differ in length".into()));
        }
        let grid = json.grid.iter().map(GridPoint::value).collect::<Result<Vec<_>>>()?;
        let context = values
            .first()
            .map(|v| v.context)
            .ok_or_else(|| Error::Parse("empty loop".into()))?;
        Ok(Self {
            grid,
            values,
            context,
            flavor: json.flavor,
        })
    }
}

/// Grid coordinate; the endpoints are written as `"-inf"` / `"+inf"`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridPoint {
    Finite(f64),
    Infinite(String),
}

impl From<f64> for GridPoint {
    fn from(t: f64) -> Self {
        if t.is_finite() {
            GridPoint::Finite(t)
        } else if t > 0.0 {
            GridPoint::Infinite("+inf".into())
        } else {
            GridPoint::Infinite("-inf".into())
        }
    }
}

impl GridPoint {
    pub fn value(&self) -> Result<f64> {
        match self {
            GridPoint::Finite(t) => Ok(*t),
            GridPoint::Infinite(s) if s == "+inf" || s == "inf" => Ok(f64::INFINITY),
            GridPoint::Infinite(s) if s == "-inf" => Ok(f64::NEG_INFINITY),
            GridPoint::Infinite(s) => Err(Error::Parse(format!("bad grid point {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LoopJson {
    pub schema: String,
    pub flavor: LoopFlavor,
    pub grid: Vec<GridPoint>,
    pub values: Vec<ConfigJson>,
}

/// Module carrying `β₁₀(G)_t`: the shifted module with its new `e` folded.
pub fn bott10_module(m: &GradedRealModule, level: usize) -> Result<GradedRealModule> {
    shift_module(m, level)?.fold_e()
}

/// Module carrying `β₀₁(G)_t`: the shifted module with its new `f` folded.
pub fn bott01_module(m: &GradedRealModule, level: usize) -> Result<GradedRealModule> {
    shift_module(m, level)?.fold_f()
}

/// The line `t ↦ shift(G) + t·D` as `(shift(G), D)` in compressed form.
/// `D` is `εe_{p+1}` for `Ω^{1,0}` and `i·εf_{q+1}` for `Ω^{0,1}`.
pub fn bott_line(g: &CompressedOperator, level: usize, flavor: LoopFlavor) -> Result<(CompressedOperator, CMat)> {
    let shifted = index_shift_compressed(g, level)?;
    let s = shift_factor(level)?;
    let (gen, phase) = match flavor {
        LoopFlavor::Omega10 => (&s.module.right_e[0], Complex64::new(1.0, 0.0)),
        LoopFlavor::Omega01 => (&s.module.right_f[0], Complex64::new(0.0, 1.0)),
    };
    // ε_{S⊗M}·(R ⊗ ε_M) = ε_S R ⊗ Id
    let twist = s
        .module
        .grading_op()
        .compose(gen)
        .kron(&MonomialOp::identity(g.ambient_dim()));
    let d = gram(&shifted.frame, &twist.apply(&shifted.frame)) * phase;
    Ok((shifted, d))
}

pub fn loop_context(ctx: Context, flavor: LoopFlavor) -> Context {
    match flavor {
        LoopFlavor::Omega10 => Context::new(ctx.p, ctx.q + 1, ctx.k + 1, ctx.l),
        LoopFlavor::Omega01 => Context::new(ctx.p + 1, ctx.q, ctx.k, ctx.l + 1),
    }
}

fn bott_loop(g: &HinfOperator, level: usize, grid: &[f64], flavor: LoopFlavor) -> Result<LoopFamily> {
    let target = loop_context(g.context, flavor);
    let dim = shift_factor(level)?.module.dim() * g.ambient_dim();
    let values = if g.is_base_point() {
        vec![HinfOperator::base_point(dim, target); grid.len()]
    } else {
        let gc = CompressedOperator::from_config(&g.config);
        let (shifted, d) = bott_line(&gc, level, flavor)?;
        grid.par_iter()
            .map(|&t| {
                if t.is_finite() {
                    let a = &shifted.matrix + &d * Complex64::new(t, 0.0);
                    HinfOperator::new(SpectralConfiguration::from_compressed(&shifted.frame, &a), target)
                } else {
                    HinfOperator::base_point(dim, target)
                }
            })
            .collect()
    };
    Ok(LoopFamily {
        grid: grid.to_vec(),
        values,
        context: target,
        flavor,
    })
}

/// `β₁₀(G)_t = G̃₀₀⋆G + t·εe_{p+1}`.
pub fn bott_1_0(g: &HinfOperator, level: usize, grid: &[f64]) -> Result<LoopFamily> {
    bott_loop(g, level, grid, LoopFlavor::Omega10)
}

/// `β₀₁(G)_t = G̃₀₀⋆G + t·i·εf_{q+1}`.
pub fn bott_0_1(g: &HinfOperator, level: usize, grid: &[f64]) -> Result<LoopFamily> {
    bott_loop(g, level, grid, LoopFlavor::Omega01)
}

/// `Ω^{1,0}`: `t ↦ θγ(t)θ`; `Ω^{0,1}`: `t ↦ θγ(−t)θ`. `module` is the
/// module the loop values live on.
pub fn loop_theta(gamma: &LoopFamily, flavor: LoopFlavor, module: &GradedRealModule) -> Result<LoopFamily> {
    let n = gamma.grid.len();
    let values = match flavor {
        LoopFlavor::Omega10 => gamma.values.iter().map(|v| theta_op(v, module)).collect(),
        LoopFlavor::Omega01 => {
            if !is_symmetric(&gamma.grid) {
                return Err(Error::InvalidArgument("Ω01 needs a grid symmetric about 0".into()));
            }
            (0..n).map(|i| theta_op(&gamma.values[n - 1 - i], module)).collect()
        }
    };
    Ok(LoopFamily {
        grid: gamma.grid.clone(),
        values,
        context: gamma.context,
        flavor: gamma.flavor,
    })
}

fn theta_op(g: &HinfOperator, module: &GradedRealModule) -> HinfOperator {
    HinfOperator::new(theta_config(&g.config, module), g.context)
}

/// `β₁₁(G)(v) = base + v₁·dir₁ + v₂·dir₂` on `S₂ ⊗̂ S₁ ⊗̂ M`, where the
/// inner `β₀₁` uses `v₂` and the outer `β₁₀` uses `v₁`.
#[derive(Clone, Debug)]
pub struct Surface {
    pub frame: CMat,
    pub base: CMat,
    pub dir1: CMat,
    pub dir2: CMat,
}

impl Surface {
    pub fn at(&self, v1: f64, v2: f64) -> CMat {
        &self.base + &self.dir1 * Complex64::new(v1, 0.0) + &self.dir2 * Complex64::new(v2, 0.0)
    }

    pub fn operator(&self, v1: f64, v2: f64) -> CompressedOperator {
        CompressedOperator::new(self.frame.clone(), self.at(v1, v2))
    }
}

pub fn bott11_context(ctx: Context) -> Context {
    loop_context(loop_context(ctx, LoopFlavor::Omega01), LoopFlavor::Omega10)
}

/// `β₁₁ = β₁₀ ∘ β₀₁` as an affine surface.
pub fn bott11_surface(g: &CompressedOperator, level: usize) -> Result<Surface> {
    let (inner, d01) = bott_line(g, level, LoopFlavor::Omega01)?;
    let s = shift_factor(level)?;
    let outer_base = index_shift_compressed(&inner, level)?;
    // the shift is linear in the inner operator: ε_S ⊗ D on the G̃₀₀ domain
    let eps_s = s.op.restrict(&s.module.grading_op());
    let dir2 = eps_s.kronecker(&d01);
    let (_, d10) = bott_line(&inner, level, LoopFlavor::Omega10)?;
    Ok(Surface {
        frame: outer_base.frame,
        base: outer_base.matrix,
        dir1: d10,
        dir2,
    })
}

pub fn bott_1_1(g: &HinfOperator, level: usize, v1: f64, v2: f64) -> Result<HinfOperator> {
    let ctx = bott11_context(g.context);
    if !(v1.is_finite() && v2.is_finite()) || g.is_base_point() {
        let s = shift_factor(level)?.module.dim();
        return Ok(HinfOperator::base_point(s * s * g.ambient_dim(), ctx));
    }
    let surf = bott11_surface(&CompressedOperator::from_config(&g.config), level)?;
    Ok(HinfOperator::new(surf.operator(v1, v2).to_config(), ctx))
}

/// Module carrying `β₁₁(G)`.
pub fn bott11_module(m: &GradedRealModule, level: usize) -> Result<GradedRealModule> {
    bott10_module(&bott01_module(m, level)?, level)
}

/// The unit Clifford factor `ℂl(2p, 2q)` with context `(p,q,p,q)`.
pub fn unit_clifford(p: usize, q: usize) -> GradedRealModule {
    regular_with_context(Context::new(p, q, p, q))
}

/// `L_v = Σ vᵢ·εe_{p+i} + Σ wⱼ·i·εf_{q+j}` on the unit Clifford factor.
pub fn left_multiplication(c: &GradedRealModule, v: &[f64]) -> Result<CMat> {
    let ctx = c.context();
    if v.len() != ctx.k + ctx.l {
        return Err(Error::InvalidArgument(format!(
            "vector of length {} for {} twisted generators",
            v.len(),
            ctx.k + ctx.l
        )));
    }
    let n = c.dim();
    let mut out = CMat::zeros(n, n);
    for (i, op) in c.left_pos.iter().enumerate() {
        out += op.to_dense() * Complex64::new(v[i], 0.0);
    }
    for (j, op) in c.left_neg.iter().enumerate() {
        out += op.to_dense() * Complex64::new(0.0, v[ctx.k + j]);
    }
    Ok(out)
}

/// `L_v ⋆ G₀₀ ⋆ G₀₀ ⋆ G` on `ℂl(2,2) ⊗̂ ℋ₀₀ ⊗̂ ℋ₀₀ ⊗̂ M`, affine in `v`.
pub fn b11_surface(g: &CompressedOperator, level: usize) -> Result<Surface> {
    let c = unit_clifford(1, 1);
    let h = h00(level)?;
    let g00 = CompressedOperator::from_config(&make_g00(level)?.config);
    let full = CMat::identity(c.dim(), c.dim());
    let zero = CMat::zeros(c.dim(), c.dim());
    let lv = |v: [f64; 2]| -> Result<CompressedOperator> {
        Ok(CompressedOperator::new(full.clone(), left_multiplication(&c, &v)?))
    };
    let ch = graded_tensor(&c, &h);
    let chh = graded_tensor(&ch, &h);
    let chain = |l: CompressedOperator| -> CompressedOperator {
        let a = star_compressed(&l, &c, &g00);
        let b = star_compressed(&a, &ch, &g00);
        star_compressed(&b, &chh, g)
    };
    let base = chain(CompressedOperator::new(full.clone(), zero));
    let d1 = chain(lv([1.0, 0.0])?);
    let d2 = chain(lv([0.0, 1.0])?);
    Ok(Surface {
        dir1: &d1.matrix - &base.matrix,
        dir2: &d2.matrix - &base.matrix,
        frame: base.frame,
        base: base.matrix,
    })
}

pub fn b11_formula(g: &HinfOperator, level: usize, v1: f64, v2: f64) -> Result<HinfOperator> {
    let ctx = bott11_context(g.context);
    let surf = b11_surface(&CompressedOperator::from_config(&g.config), level)?;
    Ok(HinfOperator::new(surf.operator(v1, v2).to_config(), ctx))
}

/// `x ⊗ y ↦ ι_a(x)·ι_b(y)` from `ℂl(a) ⊗̂ ℂl(b)` into `ℂl(target)`, where
/// `images_a[g]` is the target generator of generator `g` of `a`.
pub fn clifford_merge(
    sig_a: CliffordSignature,
    images_a: &[usize],
    sig_b: CliffordSignature,
    images_b: &[usize],
    target: CliffordSignature,
) -> MonomialOp {
    debug_assert_eq!(sig_a.dim() * sig_b.dim(), target.dim());
    let mut perm = Vec::with_capacity(target.dim());
    let mut phase = Vec::with_capacity(target.dim());
    for x in 0..sig_a.dim() as u32 {
        let (wa, sa) = map_word(x, images_a);
        for y in 0..sig_b.dim() as u32 {
            let (wb, sb) = map_word(y, images_b);
            debug_assert_eq!(wa & wb, 0);
            perm.push((wa | wb) as usize);
            phase.push(Complex64::new(sa * sb * reorder_sign(wa, wb), 0.0));
        }
    }
    MonomialOp::new(perm, phase)
}

/// The canonical isometry from `S₂ ⊗̂ S₁ ⊗̂ M` (where `β₁₁` lives) onto
/// `ℂl(2,2) ⊗̂ ℋ₀₀ ⊗̂ ℋ₀₀ ⊗̂ M` (where the `b₁₁` formula lives): move `ℋ₀₀⁽²⁾`
/// past `ℂl⁽¹⁾`, then identify `ℂl(1,1)⁽²⁾ ⊗̂ ℂl(1,1)⁽¹⁾` with `ℂl(2,2)` by
/// `e⁽²⁾ ↦ e₂, f⁽²⁾ ↦ f₁, e⁽¹⁾ ↦ e₁, f⁽¹⁾ ↦ f₂`.
pub fn bott11_reindex(m: &GradedRealModule, level: usize) -> Result<MonomialOp> {
    let cl = regular_with_context(Context::new(1, 1, 0, 0));
    let h = h00(level)?;
    let swap = factor_permutation(
        &[&cl.grading, &h.grading, &cl.grading, &h.grading, &m.grading],
        &[0, 2, 1, 3, 4],
    );
    let sig11 = CliffordSignature { p: 1, q: 1 };
    let sig22 = CliffordSignature { p: 2, q: 2 };
    // ℂl(2,2) generator indices: e₁=0, e₂=1, f₁=2, f₂=3
    let merge = clifford_merge(sig11, &[1, 2], sig11, &[0, 3], sig22);
    let rest = MonomialOp::identity(h.dim() * h.dim() * m.dim());
    Ok(merge.kron(&rest).compose(&swap))
}

/// Compares `β₁₁(G)(v)` with `L_v ⋆ G₀₀^{⋆2} ⋆ G` after reindexing, at
/// every sample; returns the residual per sample.
pub fn bott11_residuals(g: &HinfOperator, m: &GradedRealModule, level: usize, samples: &[(f64, f64)]) -> Result<Vec<f64>> {
    let gc = CompressedOperator::from_config(&g.config);
    let beta = bott11_surface(&gc, level)?;
    let b = b11_surface(&gc, level)?;
    let u = bott11_reindex(m, level)?;
    let moved = u.apply(&beta.frame);
    let t = gram(&b.frame, &moved);
    let leak = frobenius(&(&moved - mul_frame(&b.frame, &t)));
    Ok(samples
        .par_iter()
        .map(|&(v1, v2)| {
            let lhs = matmul(&matmul(&t, &beta.at(v1, v2)), &t.adjoint());
            frobenius(&(b.at(v1, v2) - lhs)) + leak
        })
        .collect())
}
