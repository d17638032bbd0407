//! Seeded random corpora: members of `kr_{p,q}` built from flags, fixed
//! points, and total-space triples.
//!
//! Every member lives on `build_universe(ctx, level) = B ⊗̂ C` and is
//! assembled from steps `Y ⊗ C` with `Y ⊂ B` graded and balanced. The step
//! involutions are unit combinations of pairwise anticommuting odd
//! involutions that commute with the right action, so `G² = Σ tᵢ² P_{Yᵢ⊗C}`
//! commutes with the left action as well.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::clifford::word_product;
use crate::error::{Error, Result};
use crate::homotopy::{assemble_from_flag, FlagChain, FlagStep};
use crate::linalg::{c, hstack, orthonormalize, real, CMat};
use crate::module::{background, build_universe, graded_tensor, regular_with_context, Context, GradedRealModule};
use crate::quasi::{Flavor, TotalSpaceTriple};
use crate::spectral::HinfOperator;

pub const DEFAULT_SEED: u64 = 42;

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `Generic` uses complex frames and every available involution; `Fixed`
/// keeps everything real so the result is a `θ`-fixed point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reality {
    Generic,
    Fixed,
}

/// A corpus member with the flag it was assembled from.
#[derive(Clone, Debug)]
pub struct Member {
    pub module: GradedRealModule,
    pub flag: FlagChain,
    pub op: HinfOperator,
}

pub fn gaussian<R: Rng>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

pub fn random_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize, reality: Reality) -> CMat {
    CMat::from_fn(rows, cols, |_, _| match reality {
        Reality::Generic => c(gaussian(rng), gaussian(rng)),
        Reality::Fixed => real(gaussian(rng)),
    })
}

pub fn random_unitary<R: Rng>(rng: &mut R, n: usize, reality: Reality) -> CMat {
    loop {
        let q = orthonormalize(&random_matrix(rng, n, n, reality), 1e-6);
        if q.ncols() == n {
            return q;
        }
    }
}

pub fn random_unit_vector<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| gaussian(rng)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-6 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// The universe split as `B ⊗̂ C`; for the empty context `B` is the
/// background squared and `C` is trivial.
struct Split {
    b_grading: Vec<f64>,
    c: Option<GradedRealModule>,
}

impl Split {
    fn new(ctx: Context, level: usize) -> Self {
        let b = background(level);
        if ctx.total() == 0 {
            Self {
                b_grading: graded_tensor(&b, &b).grading,
                c: None,
            }
        } else {
            Self {
                b_grading: b.grading,
                c: Some(regular_with_context(ctx)),
            }
        }
    }

    fn c_dim(&self) -> usize {
        self.c.as_ref().map_or(1, GradedRealModule::dim)
    }

    fn indices(&self, parity: f64) -> Vec<usize> {
        (0..self.b_grading.len()).filter(|&i| self.b_grading[i] == parity).collect()
    }

    /// Odd self-adjoint involutions on `C` that commute with its right
    /// action and pairwise anticommute.
    fn c_involutions(&self, reality: Reality) -> Vec<CMat> {
        let Some(m) = &self.c else {
            return Vec::new();
        };
        let i = c(0.0, 1.0);
        let mut out: Vec<CMat> = m.left_pos.iter().map(|x| x.to_dense()).collect();
        out.extend(m.left_neg.iter().map(|x| x.to_dense() * i));
        if reality == Reality::Generic {
            let sig = m.context().combined();
            let n = sig.dim();
            for g in 0..sig.generators() {
                let mut l = CMat::zeros(n, n);
                for w in 0..n as u32 {
                    let (s, out_word) = word_product(sig, 1 << g, w);
                    l[(out_word as usize, w as usize)] = real(s);
                }
                out.push(if sig.square(g) < 0.0 { l * i } else { l });
            }
        }
        out
    }
}

/// `[Y_even | Y_odd] ⊗ I_C` as a frame of the universe.
fn step_frame(y: &CMat, c_dim: usize) -> CMat {
    y.kronecker(&CMat::identity(c_dim, c_dim))
}

/// Picks columns `cols` of a unitary on the `idx` coordinates of `B`.
fn embed_columns(u: &CMat, idx: &[usize], cols: std::ops::Range<usize>, b_dim: usize) -> CMat {
    let mut out = CMat::zeros(b_dim, cols.len());
    for (j, col) in cols.enumerate() {
        for (r, &row) in idx.iter().enumerate() {
            out[(row, j)] = u[(r, col)];
        }
    }
    out
}

/// A random flag on `build_universe(ctx, level)`: `steps` balanced steps
/// with sorted distinct `t ∈ [1, 4]` and a random graded kernel.
pub fn random_flag<R: Rng>(rng: &mut R, ctx: Context, level: usize, reality: Reality) -> Result<FlagChain> {
    if level == 0 {
        return Err(Error::InvalidArgument("universe level must be positive".into()));
    }
    let split = Split::new(ctx, level);
    let (even, odd) = (split.indices(1.0), split.indices(-1.0));
    let n = even.len().min(odd.len());
    let b_dim = split.b_grading.len();
    let c_dim = split.c_dim();
    let ue = random_unitary(rng, even.len(), reality);
    let uo = random_unitary(rng, odd.len(), reality);
    let involutions = split.c_involutions(reality);

    let m = rng.gen_range(1..=n);
    let a0 = rng.gen_range(0..=even.len() - m);
    let b0 = rng.gen_range(0..=odd.len() - m);
    let w0 = step_frame(
        &hstack(
            &[&embed_columns(&ue, &even, 0..a0, b_dim), &embed_columns(&uo, &odd, 0..b0, b_dim)],
            b_dim,
        ),
        c_dim,
    );

    let mut t: Vec<f64> = (0..m).map(|_| rng.gen_range(1.0..4.0)).collect();
    t.sort_by(f64::total_cmp);
    let steps = (0..m)
        .map(|i| {
            let ye = embed_columns(&ue, &even, a0 + i..a0 + i + 1, b_dim);
            let yo = embed_columns(&uo, &odd, b0 + i..b0 + i + 1, b_dim);
            let y = hstack(&[&ye, &yo], b_dim);
            FlagStep {
                frame: step_frame(&y, c_dim),
                involution: step_involution(rng, &involutions, c_dim, reality),
            }
        })
        .collect();
    Ok(FlagChain {
        ambient_dim: b_dim * c_dim,
        w0,
        steps,
        t,
    })
}

/// `c₀·X ⊗ I + Σ cⱼ ε ⊗ Aⱼ` on a step `[y_even, y_odd] ⊗ C`.
fn step_involution<R: Rng>(rng: &mut R, involutions: &[CMat], c_dim: usize, reality: Reality) -> CMat {
    let coeffs = random_unit_vector(rng, 1 + involutions.len());
    let phase = match reality {
        Reality::Generic => {
            let a: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            Complex64::from_polar(1.0, a)
        }
        Reality::Fixed => real(1.0),
    };
    let x = CMat::from_row_slice(2, 2, &[real(0.0), phase.conj(), phase, real(0.0)]);
    let eps = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![real(1.0), real(-1.0)]));
    let mut r = x.kronecker(&CMat::identity(c_dim, c_dim)) * real(coeffs[0]);
    for (a, &cj) in involutions.iter().zip(&coeffs[1..]) {
        r += eps.kronecker(a) * real(cj);
    }
    r
}

/// A random member of `kr_{p,q}` (context `ctx`) together with its flag.
pub fn random_member<R: Rng>(rng: &mut R, ctx: Context, level: usize, reality: Reality) -> Result<Member> {
    let module = build_universe(ctx, level)?;
    let flag = random_flag(rng, ctx, level, reality)?;
    let op = HinfOperator::new(assemble_from_flag(&flag), ctx);
    Ok(Member { module, flag, op })
}

/// A random triple `(D; G, E)` or `(D; G, F)`: `G` from a random flag and
/// the companion constant on the kernel and on each step. With
/// `minus_infinity` one block is flagged as the `−∞` eigenspace.
pub fn random_triple<R: Rng>(
    rng: &mut R,
    ctx: Context,
    level: usize,
    flavor: Flavor,
    minus_infinity: bool,
) -> Result<(GradedRealModule, TotalSpaceTriple)> {
    let module = build_universe(ctx, level)?;
    let flag = random_flag(rng, ctx, level, Reality::Generic)?;
    let mut frames: Vec<&CMat> = vec![&flag.w0];
    frames.extend(flag.steps.iter().map(|s| &s.frame));
    let domain = hstack(&frames, flag.ambient_dim);
    let r = domain.ncols();

    let mut g = CMat::zeros(r, r);
    let mut companion = CMat::zeros(r, r);
    let mut blocks = vec![(0, flag.w0.ncols())];
    let mut offset = flag.w0.ncols();
    for (s, &t) in flag.steps.iter().zip(&flag.t) {
        let k = s.frame.ncols();
        g.view_mut((offset, offset), (k, k)).copy_from(&(&s.involution * real(t)));
        blocks.push((offset, k));
        offset += k;
    }
    let blocks: Vec<(usize, usize)> = blocks.into_iter().filter(|b| b.1 > 0).collect();
    let flagged = if minus_infinity { Some(rng.gen_range(0..blocks.len())) } else { None };
    let mut minus = CMat::zeros(r, 0);
    for (b, &(start, k)) in blocks.iter().enumerate() {
        if Some(b) == flagged {
            minus = CMat::from_fn(r, k, |i, j| if i == start + j { real(1.0) } else { real(0.0) });
            continue;
        }
        let mu = rng.gen_range(-3.0..3.0);
        for i in start..start + k {
            companion[(i, i)] = real(mu);
        }
    }
    let triple = TotalSpaceTriple::new(flavor, ctx, domain, g, companion).with_minus_infinity(minus);
    Ok((module, triple))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::{is_fixed_point, is_member, OperatorClass};

    #[test]
    fn members_are_members() {
        let mut rng = seeded(DEFAULT_SEED);
        for ctx in [Context::new(0, 0, 0, 0), Context::new(1, 1, 0, 0), Context::new(1, 0, 1, 1)] {
            for reality in [Reality::Generic, Reality::Fixed] {
                let m = random_member(&mut rng, ctx, 2, reality).unwrap();
                assert!(m.flag.validate(&m.module).passed());
                let report = is_member(&m.op, &m.module, OperatorClass::KrConnective).unwrap();
                assert!(report.passed(), "{ctx} {reality:?}: {:?}", report.failures());
            }
        }
    }

    #[test]
    fn fixed_members_are_fixed() {
        let mut rng = seeded(7);
        let m = random_member(&mut rng, Context::new(0, 1, 1, 1), 1, Reality::Fixed).unwrap();
        assert!(is_fixed_point(&m.op, &m.module));
        let m = random_member(&mut rng, Context::new(1, 0, 0, 1), 2, Reality::Generic).unwrap();
        assert!(!is_fixed_point(&m.op, &m.module));
    }

    #[test]
    fn triples_validate() {
        let mut rng = seeded(DEFAULT_SEED);
        for flavor in [Flavor::E, Flavor::F] {
            let (module, t) = random_triple(&mut rng, Context::new(1, 1, 0, 0), 2, flavor, true).unwrap();
            let report = t.validate(&module).unwrap();
            assert!(report.passed(), "{:?}", report.failures());
        }
    }
}
