//! Flag chains and the explicit homotopies: connectivity path, collapse
//! toward `∞`, cone contraction of total spaces, stabilization.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::classes::{commutation_residual, MEMBER_TOL};
use crate::error::{Error, Result};
use crate::json::{matrix_from_json, matrix_to_json, JsonMatrix};
use crate::linalg::{frobenius, gram, hermitian_eigen, hstack, mul_frame, real, CMat};
use crate::maps::KERNEL_TOL;
use crate::module::{direct_sum, GradedRealModule};
use crate::quasi::{Flavor, TotalSpaceTriple};
use crate::report::Report;
use crate::spectral::{HinfOperator, Point, SpectralConfiguration};

/// One step `W_i ⊖ W_{i−1}` of a flag with its odd involution `R_i`
/// (written in the step frame).
#[derive(Clone, Debug, PartialEq)]
pub struct FlagStep {
    pub frame: CMat,
    pub involution: CMat,
}

/// `W₀ ⊂ W₁ ⊂ … ⊂ W_m` with involutions on the steps and the simplex point
/// `0 ≤ t₁ ≤ … ≤ t_m ≤ ∞`.
#[derive(Clone, Debug, PartialEq)]
pub struct FlagChain {
    pub ambient_dim: usize,
    pub w0: CMat,
    pub steps: Vec<FlagStep>,
    pub t: Vec<f64>,
}

impl FlagChain {
    pub fn empty(ambient_dim: usize) -> Self {
        Self {
            ambient_dim,
            w0: CMat::zeros(ambient_dim, 0),
            steps: Vec::new(),
            t: Vec::new(),
        }
    }

    /// Checks `R² = Id`, oddness, `R e_i = e_i R`, orthogonality of the
    /// steps and monotonicity of `t`.
    pub fn validate(&self, module: &GradedRealModule) -> Report {
        let mut report = Report::new();
        let eps = module.grading_op();
        let mut square: f64 = 0.0;
        let mut odd: f64 = 0.0;
        let mut linear: f64 = 0.0;
        for s in &self.steps {
            let r = s.frame.ncols();
            square = square.max(frobenius(&(&s.involution * &s.involution - CMat::identity(r, r))));
            odd = odd.max(commutation_residual(&s.frame, &s.involution, &eps, true));
            for x in module.right_generators() {
                linear = linear.max(commutation_residual(&s.frame, &s.involution, x, false));
            }
        }
        report.record("involutions square to identity", square, MEMBER_TOL);
        report.record("involutions odd", odd, MEMBER_TOL);
        report.record("involutions right-linear", linear, MEMBER_TOL);
        let mut frames: Vec<&CMat> = vec![&self.w0];
        frames.extend(self.steps.iter().map(|s| &s.frame));
        let all = hstack(&frames, self.ambient_dim);
        let k = all.ncols();
        report.record("steps orthonormal", frobenius(&(gram(&all, &all) - CMat::identity(k, k))), 1e-12);
        let sorted = self.t.len() == self.steps.len()
            && self.t.iter().all(|t| *t >= 0.0)
            && self.t.windows(2).all(|w| w[0] <= w[1]);
        report.record("simplex coordinates ordered", if sorted { 0.0 } else { 1.0 }, 0.0);
        report
    }

    pub fn to_json(&self) -> FlagJson {
        FlagJson {
            schema: "flag.v1".into(),
            ambient_dim: self.ambient_dim,
            w0: matrix_to_json(&self.w0),
            steps: self
                .steps
                .iter()
                .map(|s| StepJson {
                    projection: matrix_to_json(&(&s.frame * s.frame.adjoint())),
                    frame: matrix_to_json(&s.frame),
                    involution: matrix_to_json(&s.involution),
                })
                .collect(),
            t: self.t.iter().map(|&t| if t.is_finite() { Some(t) } else { None }).collect(),
        }
    }

    pub fn from_json(json: &FlagJson) -> Result<Self> {
        let steps = json
            .steps
            .iter()
            .map(|s| {
                Ok(FlagStep {
                    frame: matrix_from_json(&s.frame)?,
                    involution: matrix_from_json(&s.involution)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut w0 = matrix_from_json(&json.w0)?;
        if w0.nrows() == 0 {
            w0 = CMat::zeros(json.ambient_dim, 0);
        }
        Ok(Self {
            ambient_dim: json.ambient_dim,
            w0,
            steps,
            t: json.t.iter().map(|t| t.unwrap_or(f64::INFINITY)).collect(),
        })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StepJson {
    pub projection: JsonMatrix,
    pub frame: JsonMatrix,
    pub involution: JsonMatrix,
}

/// `t = null` encodes `∞`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FlagJson {
    pub schema: String,
    pub ambient_dim: usize,
    pub w0: JsonMatrix,
    pub steps: Vec<StepJson>,
    pub t: Vec<Option<f64>>,
}

/// `(±1)`-eigenframes of an involution written in a step frame.
fn involution_split(frame: &CMat, r: &CMat) -> (CMat, CMat) {
    let n = r.nrows();
    let is_diagonal = (0..n).all(|i| (0..n).all(|j| i == j || r[(i, j)] == Complex64::new(0.0, 0.0)));
    let (values, q) = if is_diagonal {
        ((0..n).map(|i| r[(i, i)].re).collect::<Vec<_>>(), CMat::identity(n, n))
    } else {
        hermitian_eigen(r)
    };
    let pick = |sign: f64| -> CMat {
        let cols: Vec<usize> = (0..n).filter(|&i| values[i] * sign > 0.0).collect();
        let sub = CMat::from_fn(n, cols.len(), |a, b| q[(a, cols[b])]);
        if is_diagonal {
            CMat::from_fn(frame.nrows(), cols.len(), |a, b| frame[(a, cols[b])])
        } else {
            mul_frame(frame, &sub)
        }
    };
    (pick(1.0), pick(-1.0))
}

fn merge_points(ambient_dim: usize, mut items: Vec<(f64, CMat)>) -> SpectralConfiguration {
    items.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut points: Vec<Point> = Vec::new();
    for (lambda, frame) in items {
        if frame.ncols() == 0 {
            continue;
        }
        match points.last_mut() {
            Some(last) if last.lambda == lambda => {
                last.frame = hstack(&[&last.frame, &frame], ambient_dim);
            }
            _ => points.push(Point { lambda, frame }),
        }
    }
    SpectralConfiguration::from_points_unchecked(ambient_dim, points)
}

/// Eigenvalue 0 on `W₀`, `±t_i` on the `(±1)`-eigenspaces of `R_i`;
/// coincident values merge and `t_i = ∞` is omitted.
pub fn assemble_from_flag(flag: &FlagChain) -> SpectralConfiguration {
    let mut items = vec![(0.0, flag.w0.clone())];
    for (s, &t) in flag.steps.iter().zip(&flag.t) {
        if !t.is_finite() {
            continue;
        }
        let (plus, minus) = involution_split(&s.frame, &s.involution);
        items.push((t, plus));
        items.push((-t, minus));
    }
    merge_points(flag.ambient_dim, items)
}

/// Inverse of [`assemble_from_flag`] on configurations with distinct
/// eigenvalue magnitudes; ties merge into one step.
pub fn decompose_to_flag(c: &SpectralConfiguration) -> FlagChain {
    let n = c.ambient_dim();
    let mut flag = FlagChain::empty(n);
    let mut rest: Vec<&Point> = Vec::new();
    for p in c.points() {
        if p.lambda == 0.0 {
            flag.w0 = p.frame.clone();
        } else {
            rest.push(p);
        }
    }
    rest.sort_by(|a, b| a.lambda.abs().total_cmp(&b.lambda.abs()).then(b.lambda.total_cmp(&a.lambda)));
    let mut i = 0;
    while i < rest.len() {
        let t = rest[i].lambda.abs();
        let mut j = i;
        while j < rest.len() && rest[j].lambda.abs() == t {
            j += 1;
        }
        let group = &rest[i..j];
        let frames: Vec<&CMat> = group.iter().map(|p| &p.frame).collect();
        let frame = hstack(&frames, n);
        let signs: Vec<f64> = group
            .iter()
            .flat_map(|p| std::iter::repeat_n(p.lambda.signum(), p.rank()))
            .collect();
        let involution = CMat::from_diagonal(&nalgebra::DVector::from_iterator(signs.len(), signs.into_iter().map(real)));
        flag.steps.push(FlagStep { frame, involution });
        flag.t.push(t);
        i = j;
    }
    flag
}

/// A left generator used by the connectivity path.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LeftGenerator {
    /// `left_pos[i]`, self-adjoint, from `ℂl(0,k)`.
    Pos(usize),
    /// `i·left_neg[i]`, made self-adjoint.
    Neg(usize),
}

/// `H_t(G) = G/(1−t) + (t/(1−t))·π_{ker G}·f` for `0 ≤ t < 1`.
pub fn connectivity_path(g: &HinfOperator, module: &GradedRealModule, f: LeftGenerator, t: f64) -> Result<HinfOperator> {
    let ctx = g.context;
    if ctx.k + ctx.l == 0 {
        return Err(Error::InvalidArgument("connectivity path needs a left generator".into()));
    }
    if !(0.0..1.0).contains(&t) {
        return Err(Error::InvalidArgument(format!("path parameter {t} outside [0, 1)")));
    }
    let (op, phase) = match f {
        LeftGenerator::Pos(i) if i < ctx.k => (&module.left_pos[i], Complex64::new(1.0, 0.0)),
        LeftGenerator::Neg(i) if i < ctx.l => (&module.left_neg[i], Complex64::new(0.0, 1.0)),
        _ => {
            return Err(Error::IndexOutOfRange {
                what: "left generator",
                index: match f {
                    LeftGenerator::Pos(i) | LeftGenerator::Neg(i) => i + 1,
                },
                bound: match f {
                    LeftGenerator::Pos(_) => ctx.k,
                    LeftGenerator::Neg(_) => ctx.l,
                },
            })
        }
    };
    let (v, a) = g.config.compressed();
    let r = v.ncols();
    let kernel = CMat::from_fn(r, r, |i, j| {
        if i == j && a[(i, i)].re.abs() <= KERNEL_TOL {
            real(1.0)
        } else {
            real(0.0)
        }
    });
    let fc = gram(&v, &op.apply(&v)) * phase;
    let h = &a * real(1.0 / (1.0 - t)) + (&kernel * fc * &kernel) * real(t / (1.0 - t));
    Ok(HinfOperator::new(SpectralConfiguration::from_compressed(&v, &h), ctx))
}

/// Normalized escape coordinate `min_λ (2/π)|arctan λ|` in `[0, 1]`; the
/// base point sits at 1.
pub fn escape_coordinate(c: &SpectralConfiguration) -> f64 {
    c.points()
        .iter()
        .map(|p| p.lambda.atan().abs() / FRAC_PI_2)
        .fold(1.0, f64::min)
}

/// `f_s(λ) = λ` on `[−R, R]`, `sign(λ)(R + (|λ|−R)/(1 − s·g(|λ|)))`
/// outside, with `g` ramping from 0 at `R` to 1 at `R + R/10`.
pub fn collapse_profile(lambda: f64, radius: f64, s: f64) -> f64 {
    let x = lambda.abs();
    if x <= radius {
        return lambda;
    }
    let delta = radius / 10.0;
    let g = ((x - radius) / delta).clamp(0.0, 1.0);
    let denom = 1.0 - s * g;
    if denom <= 0.0 {
        return f64::INFINITY;
    }
    lambda.signum() * (radius + (x - radius) / denom)
}

pub fn collapse_homotopy(g: &HinfOperator, radius: f64, s: f64) -> Result<HinfOperator> {
    if !(radius > 0.0) || !(0.0..=1.0).contains(&s) {
        return Err(Error::InvalidArgument(format!("collapse with R = {radius}, s = {s}")));
    }
    Ok(HinfOperator::new(
        g.config.functional_calculus(|l| collapse_profile(l, radius, s)),
        g.context,
    ))
}

/// Moves a cone coordinate toward the base point `+∞` (linearly in
/// `arctan`); `−∞` is `f64::NEG_INFINITY`.
pub fn cone_profile(mu: f64, s: f64) -> f64 {
    if s >= 1.0 {
        return f64::INFINITY;
    }
    let u = mu.atan();
    (u + s * (FRAC_PI_2 - u)).tan()
}

/// Contracts the companion toward the cone base point; `s = 1` gives the
/// base-point triple.
pub fn cone_contraction(t: &TotalSpaceTriple, s: f64) -> Result<TotalSpaceTriple> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::InvalidArgument(format!("cone parameter {s} outside [0, 1]")));
    }
    if s == 0.0 {
        return Ok(t.clone());
    }
    if s == 1.0 {
        return Ok(TotalSpaceTriple::base_point(t.flavor, t.context, t.ambient_dim()));
    }
    let q = t.finite_part();
    let c = q.adjoint() * &t.companion * &q;
    let (mus, vecs) = hermitian_eigen(&c);
    let basis = &q * vecs;
    let r = t.rank();
    let mut companion = CMat::zeros(r, r);
    for (j, &mu) in mus.iter().enumerate() {
        let col = basis.column(j);
        companion += (col * col.adjoint()) * real(cone_profile(mu, s));
    }
    if t.minus_infinity.ncols() > 0 {
        let pi = &t.minus_infinity * t.minus_infinity.adjoint();
        companion += pi * real(cone_profile(f64::NEG_INFINITY, s));
    }
    let companion = (&companion + companion.adjoint()) * real(0.5);
    Ok(TotalSpaceTriple::new(t.flavor, t.context, t.domain.clone(), t.g.clone(), companion))
}

/// `θ` on a triple: frames move by `θ`, compressed blocks conjugate (a
/// skew companion `F = iH` also changes sign).
pub fn theta_triple(t: &TotalSpaceTriple, module: &GradedRealModule) -> TotalSpaceTriple {
    let conj = |m: &CMat| m.map(|z| z.conj());
    let mut companion = conj(&t.companion);
    if t.flavor == Flavor::F {
        companion = -companion;
    }
    TotalSpaceTriple {
        flavor: t.flavor,
        context: t.context,
        domain: module.theta_frame(&t.domain),
        g: conj(&t.g),
        companion,
        minus_infinity: conj(&t.minus_infinity),
    }
}

/// Distance between two triples: operator distances of `G`, of the
/// companion and of the `−∞` projections.
pub fn triple_distance(a: &TotalSpaceTriple, b: &TotalSpaceTriple) -> f64 {
    let embed = |t: &TotalSpaceTriple, m: &CMat| -> (CMat, CMat) { (t.domain.clone(), m.clone()) };
    let dist = |x: (CMat, CMat), y: (CMat, CMat)| -> f64 {
        let cx = SpectralConfiguration::from_compressed(&x.0, &x.1);
        let cy = SpectralConfiguration::from_compressed(&y.0, &y.1);
        crate::spectral::operator_distance(&cx, &cy)
    };
    let proj = |t: &TotalSpaceTriple| -> (CMat, CMat) {
        let f = mul_frame(&t.domain, &t.minus_infinity);
        let k = f.ncols();
        (f, CMat::identity(k, k))
    };
    let domain = |t: &TotalSpaceTriple| -> (CMat, CMat) {
        let k = t.rank();
        (t.domain.clone(), CMat::identity(k, k))
    };
    dist(embed(a, &a.g), embed(b, &b.g))
        + dist(embed(a, &a.companion), embed(b, &b.companion))
        + dist(proj(a), proj(b))
        + dist(domain(a), domain(b))
}

/// Extends `g` by zero to `R ⊕ V`.
pub fn stabilize(g: &HinfOperator, r: &GradedRealModule, v: &GradedRealModule) -> Result<(HinfOperator, GradedRealModule)> {
    let sum = direct_sum(r, v)?;
    if g.ambient_dim() != r.dim() {
        return Err(Error::AmbientMismatch("operator does not live on R".into()));
    }
    Ok((HinfOperator::new(g.config.extend_by_zero(v.dim()), g.context), sum))
}

/// Restriction back to `R` (the left inverse of [`stabilize`]).
pub fn destabilize(g: &HinfOperator, r_dim: usize) -> HinfOperator {
    let config = g.config.map_frames(r_dim, |f| f.rows(0, r_dim).into_owned());
    HinfOperator::new(config, g.context)
}
