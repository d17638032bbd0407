//! Finite-dimensional graded Real bimodules.
//!
//! Right actions come from `ℂl(p,q)`, left actions from `ℂl(l,k)`. A left
//! generator squaring to `+1` is listed in `left_pos` (there are `k` of
//! them), one squaring to `-1` in `left_neg` (`l` of them). Left and right
//! actions commute plainly.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::clifford::{word_parity, word_product, word_theta_sign, CliffordSignature};
use crate::error::{Error, Result};
use crate::json::{matrix_to_json, JsonMatrix};
use crate::linalg::CMat;
use crate::monomial::MonomialOp;
use crate::report::Report;

pub const AXIOM_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Context {
    pub p: usize,
    pub q: usize,
    pub k: usize,
    pub l: usize,
}

impl Context {
    pub const fn new(p: usize, q: usize, k: usize, l: usize) -> Self {
        Self { p, q, k, l }
    }

    /// Signature of the combined Clifford action `Cl(p+k, q+l)`.
    pub fn combined(&self) -> CliffordSignature {
        CliffordSignature {
            p: self.p + self.k,
            q: self.q + self.l,
        }
    }

    pub fn right(&self) -> CliffordSignature {
        CliffordSignature { p: self.p, q: self.q }
    }

    pub fn total(&self) -> usize {
        self.p + self.q + self.k + self.l
    }

    pub fn add(&self, other: &Context) -> Context {
        Context::new(self.p + other.p, self.q + other.q, self.k + other.k, self.l + other.l)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<usize> = text
            .split(',')
            .map(|s| s.trim().parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse(format!("signature {text:?}: {e}")))?;
        match parts.as_slice() {
            [p, q, k, l] => Ok(Self::new(*p, *q, *k, *l)),
            [p, q] => Ok(Self::new(*p, *q, 0, 0)),
            _ => Err(Error::Parse(format!("signature {text:?}: expected p,q,k,l"))),
        }
    }
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{},{})", self.p, self.q, self.k, self.l)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Right,
    Left,
}

/// A generator action together with its defining relations.
#[derive(Clone, Debug)]
pub struct Generator<'a> {
    pub name: String,
    pub side: Side,
    pub op: &'a MonomialOp,
    /// `A² = square · Id`; also `A^* = square · A`.
    pub square: f64,
    /// `θ A θ = theta_sign · A`.
    pub theta_sign: f64,
}

/// Graded Hilbert space with an antilinear Real structure `v ↦ J·conj(v)`
/// and Clifford generator actions, all stored as monomial matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedRealModule {
    pub grading: Vec<f64>,
    pub real: MonomialOp,
    pub right_e: Vec<MonomialOp>,
    pub right_f: Vec<MonomialOp>,
    pub left_pos: Vec<MonomialOp>,
    pub left_neg: Vec<MonomialOp>,
}

impl GradedRealModule {
    pub fn dim(&self) -> usize {
        self.grading.len()
    }

    pub fn context(&self) -> Context {
        Context::new(
            self.right_e.len(),
            self.right_f.len(),
            self.left_pos.len(),
            self.left_neg.len(),
        )
    }

    /// `(even, odd)` dimensions.
    pub fn graded_dims(&self) -> (usize, usize) {
        let even = self.grading.iter().filter(|&&g| g > 0.0).count();
        (even, self.dim() - even)
    }

    pub fn grading_op(&self) -> MonomialOp {
        MonomialOp::diagonal(&self.grading)
    }

    pub fn generators(&self) -> Vec<Generator<'_>> {
        let lists = [
            (&self.right_e, "right e", Side::Right, -1.0, 1.0),
            (&self.right_f, "right f", Side::Right, 1.0, -1.0),
            (&self.left_pos, "left+ ", Side::Left, 1.0, 1.0),
            (&self.left_neg, "left- ", Side::Left, -1.0, -1.0),
        ];
        lists
            .into_iter()
            .flat_map(|(list, label, side, square, theta_sign)| {
                list.iter().enumerate().map(move |(i, op)| Generator {
                    name: format!("{label}{}", i + 1),
                    side,
                    op,
                    square,
                    theta_sign,
                })
            })
            .collect()
    }

    pub fn right_generators(&self) -> impl Iterator<Item = &MonomialOp> {
        self.right_e.iter().chain(&self.right_f)
    }

    pub fn left_generators(&self) -> impl Iterator<Item = &MonomialOp> {
        self.left_pos.iter().chain(&self.left_neg)
    }

    /// `ε·R_{e_i}` (0-based), the twisted generator that squares to `+1`.
    pub fn twist_e(&self, i: usize) -> MonomialOp {
        self.grading_op().compose(&self.right_e[i])
    }

    /// `ε·R_{f_j}` (0-based), squares to `-1`.
    pub fn twist_f(&self, j: usize) -> MonomialOp {
        self.grading_op().compose(&self.right_f[j])
    }

    /// `θ X θ` for a linear operator `X`.
    pub fn theta_conjugate_dense(&self, x: &CMat) -> CMat {
        self.real.conjugate_dense(&x.map(|z| z.conj()))
    }

    /// Image of the columns of `frame` under `θ`.
    pub fn theta_frame(&self, frame: &CMat) -> CMat {
        self.real.apply_antilinear(frame)
    }

    /// Moves the last right `e` generator to the left as `ε·R_e`.
    pub fn fold_e(&self) -> Result<Self> {
        let mut out = self.clone();
        let r = out.right_e.pop().ok_or_else(|| {
            Error::InvalidArgument("no right e generator to fold".into())
        })?;
        out.left_pos.push(self.grading_op().compose(&r));
        Ok(out)
    }

    /// Moves the last right `f` generator to the left as `ε·R_f`.
    pub fn fold_f(&self) -> Result<Self> {
        let mut out = self.clone();
        let r = out.right_f.pop().ok_or_else(|| {
            Error::InvalidArgument("no right f generator to fold".into())
        })?;
        out.left_neg.push(self.grading_op().compose(&r));
        Ok(out)
    }

    /// Moves the first `e` right-`e` and first `f` right-`f` generators to
    /// the end of their lists.
    pub fn rotate_right_front(&self, e: usize, f: usize) -> Self {
        let mut out = self.clone();
        out.right_e.rotate_left(e);
        out.right_f.rotate_left(f);
        out
    }

    /// Conjugates every structure operator by the unitary `u`
    /// (`A ↦ u A u^*`, grading and `J` likewise).
    pub fn transport(&self, u: &MonomialOp) -> Self {
        let ui = u.adjoint();
        let conj = |a: &MonomialOp| u.compose(a).compose(&ui);
        let grading_op = conj(&self.grading_op());
        debug_assert!(grading_op.is_diagonal());
        let grading = grading_op.phases().iter().map(|c| c.re).collect();
        Self {
            grading,
            real: u.compose(&self.real).compose(&ui.conj()),
            right_e: self.right_e.iter().map(conj).collect(),
            right_f: self.right_f.iter().map(conj).collect(),
            left_pos: self.left_pos.iter().map(conj).collect(),
            left_neg: self.left_neg.iter().map(conj).collect(),
        }
    }

    pub fn to_json(&self) -> ModuleJson {
        let (even, odd) = self.graded_dims();
        let dense = |list: &[MonomialOp]| list.iter().map(|a| matrix_to_json(&a.to_dense())).collect();
        ModuleJson {
            context: self.context(),
            dims: [even, odd],
            grading: self.grading.clone(),
            real: matrix_to_json(&self.real.to_dense()),
            right_e: dense(&self.right_e),
            right_f: dense(&self.right_f),
            left_pos: dense(&self.left_pos),
            left_neg: dense(&self.left_neg),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModuleJson {
    pub context: Context,
    pub dims: [usize; 2],
    pub grading: Vec<f64>,
    pub real: JsonMatrix,
    pub right_e: Vec<JsonMatrix>,
    pub right_f: Vec<JsonMatrix>,
    pub left_pos: Vec<JsonMatrix>,
    pub left_neg: Vec<JsonMatrix>,
}

/// Graded background space of dims `(i|i)` with plain conjugation.
pub fn background(i: usize) -> GradedRealModule {
    let mut grading = vec![1.0; i];
    grading.extend(std::iter::repeat_n(-1.0, i));
    GradedRealModule {
        real: MonomialOp::identity(2 * i),
        grading,
        right_e: Vec::new(),
        right_f: Vec::new(),
        left_pos: Vec::new(),
        left_neg: Vec::new(),
    }
}

/// Right multiplication by generator `g` on the basis words of `ℂl(sig)`.
fn right_multiplication(sig: CliffordSignature, g: usize) -> MonomialOp {
    let n = sig.dim();
    let mut perm = Vec::with_capacity(n);
    let mut phase = Vec::with_capacity(n);
    for w in 0..n as u32 {
        let (s, out) = word_product(sig, w, 1 << g);
        perm.push(out as usize);
        phase.push(Complex64::new(s, 0.0));
    }
    MonomialOp::new(perm, phase)
}

/// `ℂl(p,q)` acting on itself from the right, graded by `ε`, Real via `θ`.
pub fn regular_module(sig: CliffordSignature) -> GradedRealModule {
    regular_with_context(Context::new(sig.p, sig.q, 0, 0))
}

/// `ℂl(p+k, q+l)` acting on itself: the first `p` e's and `q` f's act from
/// the right, the remaining generators act from the left as `ε·R`.
pub fn regular_with_context(ctx: Context) -> GradedRealModule {
    let sig = ctx.combined();
    let n = sig.dim();
    let grading: Vec<f64> = (0..n as u32).map(word_parity).collect();
    let real = MonomialOp::diagonal(
        &(0..n as u32).map(|w| word_theta_sign(sig, w)).collect::<Vec<_>>(),
    );
    let eps = MonomialOp::diagonal(&grading);
    let e = |i: usize| right_multiplication(sig, i);
    let f = |j: usize| right_multiplication(sig, sig.p + j);
    GradedRealModule {
        right_e: (0..ctx.p).map(e).collect(),
        right_f: (0..ctx.q).map(f).collect(),
        left_pos: (ctx.p..sig.p).map(|i| eps.compose(&e(i))).collect(),
        left_neg: (ctx.q..sig.q).map(|j| eps.compose(&f(j))).collect(),
        grading,
        real,
    }
}

/// Graded tensor product `M ⊗̂ N` (basis index `a·dim N + b`).
///
/// Left actions (and operators) of `N` pick up `ε_M`; right actions of `M`
/// pick up `ε_N`. With this split left and right actions still commute
/// plainly and each side's generators anticommute.
pub fn graded_tensor(m: &GradedRealModule, n: &GradedRealModule) -> GradedRealModule {
    let id_m = MonomialOp::identity(m.dim());
    let id_n = MonomialOp::identity(n.dim());
    let eps_m = m.grading_op();
    let eps_n = n.grading_op();
    let right = |mine: &[MonomialOp], theirs: &[MonomialOp]| -> Vec<MonomialOp> {
        mine.iter()
            .map(|a| a.kron(&eps_n))
            .chain(theirs.iter().map(|b| id_m.kron(b)))
            .collect()
    };
    let left = |mine: &[MonomialOp], theirs: &[MonomialOp]| -> Vec<MonomialOp> {
        mine.iter()
            .map(|a| a.kron(&id_n))
            .chain(theirs.iter().map(|b| eps_m.kron(b)))
            .collect()
    };
    let grading = m
        .grading
        .iter()
        .flat_map(|&a| n.grading.iter().map(move |&b| a * b))
        .collect();
    GradedRealModule {
        grading,
        real: m.real.kron(&n.real),
        right_e: right(&m.right_e, &n.right_e),
        right_f: right(&m.right_f, &n.right_f),
        left_pos: left(&m.left_pos, &n.left_pos),
        left_neg: left(&m.left_neg, &n.left_neg),
    }
}

/// Block sum of two modules with the same context.
pub fn direct_sum(m: &GradedRealModule, n: &GradedRealModule) -> Result<GradedRealModule> {
    if m.context() != n.context() {
        return Err(Error::AmbientMismatch(format!(
            "direct sum of contexts {} and {}",
            m.context(),
            n.context()
        )));
    }
    let sum = |a: &[MonomialOp], b: &[MonomialOp]| -> Vec<MonomialOp> {
        a.iter().zip(b).map(|(x, y)| x.direct_sum(y)).collect()
    };
    let mut grading = m.grading.clone();
    grading.extend_from_slice(&n.grading);
    Ok(GradedRealModule {
        grading,
        real: m.real.direct_sum(&n.real),
        right_e: sum(&m.right_e, &n.right_e),
        right_f: sum(&m.right_f, &n.right_f),
        left_pos: sum(&m.left_pos, &n.left_pos),
        left_neg: sum(&m.left_neg, &n.left_neg),
    })
}

/// Truncated universe `ℋ_{p,q}^{k,l}(i)`: background `(i|i)` tensored with
/// the regular module of `ℂl(p+k, q+l)`. For the empty context this is the
/// background squared.
pub fn build_universe(ctx: Context, level: usize) -> Result<GradedRealModule> {
    if level == 0 {
        return Err(Error::InvalidArgument("universe level must be positive".into()));
    }
    let b = background(level);
    if ctx.total() == 0 {
        Ok(graded_tensor(&b, &b))
    } else {
        Ok(graded_tensor(&b, &regular_with_context(ctx)))
    }
}

/// Isometric embedding sending basis vector `j` to basis vector `map[j]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Embedding {
    pub map: Vec<usize>,
    pub target_dim: usize,
}

impl Embedding {
    pub fn to_dense(&self) -> CMat {
        let mut m = CMat::zeros(self.target_dim, self.map.len());
        for (j, &r) in self.map.iter().enumerate() {
            m[(r, j)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn apply(&self, x: &CMat) -> CMat {
        let mut out = CMat::zeros(self.target_dim, x.ncols());
        for (j, &r) in self.map.iter().enumerate() {
            out.row_mut(r).copy_from(&x.row(j));
        }
        out
    }

    fn compose_kron(&self, other: &Embedding) -> Embedding {
        let n = other.target_dim;
        let map = self
            .map
            .iter()
            .flat_map(|&a| other.map.iter().map(move |&b| a * n + b))
            .collect();
        Embedding {
            map,
            target_dim: self.target_dim * n,
        }
    }

    fn identity(n: usize) -> Embedding {
        Embedding {
            map: (0..n).collect(),
            target_dim: n,
        }
    }
}

fn background_embedding(i: usize) -> Embedding {
    let map = (0..i).chain(i + 1..2 * i + 1).collect();
    Embedding {
        map,
        target_dim: 2 * i + 2,
    }
}

/// The inclusion `ℋ(i) ↪ ℋ(i+1)` of truncated universes.
pub fn filtration_embedding(ctx: Context, level: usize) -> Result<Embedding> {
    if level == 0 {
        return Err(Error::InvalidArgument("universe level must be positive".into()));
    }
    let b = background_embedding(level);
    if ctx.total() == 0 {
        Ok(b.compose_kron(&b))
    } else {
        Ok(b.compose_kron(&Embedding::identity(ctx.combined().dim())))
    }
}

/// Checks that `emb` intertwines every structure operator of `src` with the
/// corresponding operator of `dst`.
pub fn verify_embedding(src: &GradedRealModule, dst: &GradedRealModule, emb: &Embedding) -> Report {
    let mut report = Report::new();
    let intertwines = |a: &MonomialOp, b: &MonomialOp| -> f64 {
        (0..a.dim())
            .map(|j| {
                let (r, c) = (a.perm()[j], a.phases()[j]);
                let t = emb.map[j];
                if b.perm()[t] == emb.map[r] {
                    (b.phases()[t] - c).norm()
                } else {
                    (b.phases()[t].norm_sqr() + c.norm_sqr()).sqrt()
                }
            })
            .fold(0.0, f64::max)
    };
    let injective = {
        let mut seen = vec![false; emb.target_dim];
        emb.map.len() == src.dim()
            && emb.target_dim == dst.dim()
            && emb.map.iter().all(|&r| r < seen.len() && !std::mem::replace(&mut seen[r], true))
    };
    report.push(crate::report::Check::flag("embedding injective", injective));
    if !injective || src.context() != dst.context() {
        report.push(crate::report::Check::flag("embedding contexts agree", false));
        return report;
    }
    report.record("embedding preserves grading", intertwines(&src.grading_op(), &dst.grading_op()), AXIOM_TOL);
    report.record("embedding preserves real structure", intertwines(&src.real, &dst.real), AXIOM_TOL);
    let worst = src
        .generators()
        .iter()
        .zip(dst.generators())
        .map(|(a, b)| intertwines(a.op, b.op))
        .fold(0.0, f64::max);
    report.record("embedding preserves actions", worst, AXIOM_TOL);
    report
}

/// Evaluates every module axiom; passes iff all violations are ≤ 1e-12.
pub fn verify_module_axioms(m: &GradedRealModule) -> Report {
    let n = m.dim();
    let id = MonomialOp::identity(n);
    let eps = m.grading_op();
    let j = &m.real;
    let mut report = Report::new();

    let grading_defect = m.grading.iter().map(|g| (g * g - 1.0).abs()).fold(0.0, f64::max);
    report.record("grading squares to identity", grading_defect, AXIOM_TOL);
    report.record("real structure is an involution", j.compose(&j.conj()).distance(&id), AXIOM_TOL);
    report.record("real structure is unitary", j.unitarity_defect(), AXIOM_TOL);
    report.record("real structure preserves grading", j.compose(&eps).distance(&eps.compose(j)), AXIOM_TOL);

    let gens = m.generators();
    let mut odd: f64 = 0.0;
    let mut square: f64 = 0.0;
    let mut unitary: f64 = 0.0;
    let mut adjoint: f64 = 0.0;
    let mut real_right: f64 = 0.0;
    let mut real_left: f64 = 0.0;
    for g in &gens {
        let a = g.op;
        let s = Complex64::new(g.square, 0.0);
        odd = odd.max(a.compose(&eps).sum_norm(&eps.compose(a)));
        square = square.max(a.compose(a).distance(&id.scale(s)));
        unitary = unitary.max(a.unitarity_defect());
        adjoint = adjoint.max(a.adjoint().distance(&a.scale(s)));
        let axiom = j
            .compose(&a.conj())
            .distance(&a.compose(j).scale(Complex64::new(g.theta_sign, 0.0)));
        match g.side {
            Side::Right => real_right = real_right.max(axiom),
            Side::Left => real_left = real_left.max(axiom),
        }
    }
    report.record("generators are odd", odd, AXIOM_TOL);
    report.record("generator squares", square, AXIOM_TOL);
    report.record("generators are unitary", unitary, AXIOM_TOL);
    report.record("generator adjointness", adjoint, AXIOM_TOL);
    report.record("real-module axiom (right)", real_right, AXIOM_TOL);
    report.record("real-module axiom (left)", real_left, AXIOM_TOL);

    let mut anti_right: f64 = 0.0;
    let mut anti_left: f64 = 0.0;
    let mut bimodule: f64 = 0.0;
    for (x, a) in gens.iter().enumerate() {
        for b in &gens[x + 1..] {
            let ab = a.op.compose(b.op);
            let ba = b.op.compose(a.op);
            match (a.side, b.side) {
                (Side::Right, Side::Right) => anti_right = anti_right.max(ab.sum_norm(&ba)),
                (Side::Left, Side::Left) => anti_left = anti_left.max(ab.sum_norm(&ba)),
                _ => bimodule = bimodule.max(ab.distance(&ba)),
            }
        }
    }
    report.record("right generators anticommute", anti_right, AXIOM_TOL);
    report.record("left generators anticommute", anti_left, AXIOM_TOL);
    report.record("left and right actions commute", bimodule, AXIOM_TOL);
    report
}

/// Reindexing isometry for a permutation of tensor factors, with the Koszul
/// sign `(-1)^{|a||b|}` for every pair of factors whose order is reversed.
/// New factor `t` is old factor `order[t]`.
pub fn factor_permutation(gradings: &[&[f64]], order: &[usize]) -> MonomialOp {
    let r = gradings.len();
    assert_eq!(order.len(), r);
    let dims: Vec<usize> = gradings.iter().map(|g| g.len()).collect();
    let total: usize = dims.iter().product();
    let new_dims: Vec<usize> = order.iter().map(|&o| dims[o]).collect();
    let mut position = vec![0; r];
    for (t, &o) in order.iter().enumerate() {
        position[o] = t;
    }
    let mut perm = Vec::with_capacity(total);
    let mut phase = Vec::with_capacity(total);
    let mut digits = vec![0usize; r];
    for idx in 0..total {
        let mut rest = idx;
        for f in (0..r).rev() {
            digits[f] = rest % dims[f];
            rest /= dims[f];
        }
        let mut sign = 1.0;
        for a in 0..r {
            if gradings[a][digits[a]] > 0.0 {
                continue;
            }
            for b in a + 1..r {
                if gradings[b][digits[b]] < 0.0 && position[a] > position[b] {
                    sign = -sign;
                }
            }
        }
        let mut target = 0;
        for t in 0..r {
            target = target * new_dims[t] + digits[order[t]];
        }
        perm.push(target);
        phase.push(Complex64::new(sign, 0.0));
    }
    MonomialOp::new(perm, phase)
}
