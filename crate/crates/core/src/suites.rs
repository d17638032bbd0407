//! The named verification suites. Each suite draws its corpus from the
//! seed (one ChaCha stream per sample, so parallel runs are reproducible),
//! runs its checks and reports the worst residual per check, sorted by name.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bott::{
    bott01_module, bott10_module, bott11_module, bott11_residuals, bott_0_1, bott_1_0, bott_1_1, loop_theta,
    symmetric_grid, LoopFamily, LoopFlavor,
};
use crate::classes::{
    cover_map, eigenspaces_theta_invariant, fixed_point_distance, is_fixed_point, is_member, theta_conjugate, transport,
    OperatorClass, Shuffle,
};
use crate::clifford::{CliffordElement, CliffordSignature, GeneratorKind};
use crate::corpus::{random_member, random_triple, random_unit_vector, seeded, Reality, DEFAULT_SEED};
use crate::error::{Error, Result};
use crate::homotopy::{
    assemble_from_flag, connectivity_path, decompose_to_flag, escape_coordinate, stabilize, FlagChain, FlagStep,
    LeftGenerator,
};
use crate::json::fixed_precision;
use crate::linalg::{adjoint_mul, frobenius, hermitian_eigen, matmul, real, CMat};
use crate::maps::{graded_index, make_g00, star_product};
use crate::module::{
    build_universe, filtration_embedding, graded_tensor, regular_module, regular_with_context, verify_embedding,
    verify_module_axioms, Context, GradedRealModule,
};
use crate::quasi::{
    compressed_distance, fiber_extract, image_module, joint_spectrum, phi_total, psi_total, square_law_residual, Flavor,
};
use crate::report::{Check, Report};
use crate::spectral::{configuration_distance, HinfOperator, SpectralConfiguration};
use crate::unit::{unit_map, unit_module, unit_permutation_action, unit_product_reindex};

pub const SUITE_NAMES: [&str; 12] = [
    "clifford-relations",
    "real-module",
    "spectral-law",
    "square-law",
    "equivariance",
    "bott-commutation",
    "connectivity-path",
    "index",
    "unit",
    "round-trip",
    "multiplicativity",
    "fixed-point",
];

/// Suite parameters. `level` is the universe level of the random corpus,
/// `factor_level` the level of the `ℋ₀₀` factors used by `⋆`-shifts, Bott
/// maps and units.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteParams {
    pub seed: u64,
    pub level: usize,
    pub factor_level: usize,
    pub samples: usize,
    pub grid: usize,
    pub tol: f64,
    pub signature: Option<Context>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteDescriptor {
    pub name: String,
    pub params: SuiteParams,
    pub checks: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub schema: String,
    pub suite: String,
    pub params: SuiteParams,
    pub passed: bool,
    pub max_residual: f64,
    pub checks: Vec<Check>,
}

fn names(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

impl SuiteDescriptor {
    /// The descriptor with default parameters.
    pub fn new(name: &str) -> Result<Self> {
        let (samples, tol, checks) = match name {
            "clifford-relations" => (
                0,
                0.0,
                names(&[
                    "associativity",
                    "generator squares",
                    "generators anticommute",
                    "grading is multiplicative",
                    "theta is multiplicative",
                    "theta is antilinear",
                    "theta is an involution",
                    "theta commutes with grading",
                    "basis dimension",
                ]),
            ),
            "real-module" => (
                0,
                1e-12,
                names(&["generator squares", "real-module axiom (right)", "left and right actions commute", "embedding"]),
            ),
            "spectral-law" => (
                200,
                1e-9,
                names(&["star spectrum", "dense oracle spectrum", "star product membership", "example 3,4 gives 5"]),
            ),
            "square-law" => (
                100,
                1e-9,
                names(&["phi square law", "psi square law", "phi image membership", "psi image membership"]),
            ),
            "equivariance" => (
                8,
                1e-12,
                names(&["beta10 loop equivariance", "beta01 loop equivariance", "loop endpoints are base points"]),
            ),
            "bott-commutation" => (
                20,
                1e-12,
                names(&["beta11 equals L_v * G00 * G00 * G", "beta11 membership"]),
            ),
            "connectivity-path" => (
                6,
                1e-9,
                names(&[
                    "path membership",
                    "path at t=0 is G",
                    "path preserves fixed points",
                    "escape monotone for t >= 0.5",
                    "escape at t=0.999",
                ]),
            ),
            "index" => (
                100,
                0.0,
                names(&["index of G00", "index multiplicativity", "index under stabilize", "index under theta"]),
            ),
            "unit" => (
                10,
                1e-12,
                names(&["unit equivariance", "unit min eigenvalue", "cover/unit triangle", "unit membership"]),
            ),
            "round-trip" => (
                100,
                1e-9,
                names(&["flag round trip (exact)", "phi fiber round trip", "psi fiber round trip"]),
            ),
            "multiplicativity" => (
                50,
                1e-12,
                names(&["cover star square", "theta star square"]),
            ),
            "fixed-point" => (
                200,
                0.0,
                names(&["characterizations agree", "constructed labels"]),
            ),
            other => return Err(Error::UnknownSuite(other.to_string())),
        };
        Ok(Self {
            name: name.to_string(),
            params: SuiteParams {
                seed: DEFAULT_SEED,
                level: 2,
                factor_level: 1,
                samples,
                grid: 33,
                tol,
                signature: None,
            },
            checks,
        })
    }

    fn contexts(&self, defaults: &[Context]) -> Vec<Context> {
        match self.params.signature {
            Some(ctx) => vec![ctx],
            None => defaults.to_vec(),
        }
    }
}

/// Runs a suite; fails if a referenced check never ran.
/// Caps the worker pool at `KR_LAB_THREADS` when it is set. Only the first
/// call has an effect.
pub fn configure_threads_from_env() -> Result<()> {
    let Ok(text) = std::env::var("KR_LAB_THREADS") else {
        return Ok(());
    };
    let n: usize = text
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("KR_LAB_THREADS={text:?} is not a thread count")))?;
    if n == 0 {
        return Err(Error::InvalidArgument("KR_LAB_THREADS must be positive".into()));
    }
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

pub fn run_suite(desc: &SuiteDescriptor) -> Result<SuiteReport> {
    if desc.params.level == 0 || desc.params.factor_level == 0 {
        return Err(Error::InvalidArgument("levels must be positive".into()));
    }
    let report = match desc.name.as_str() {
        "clifford-relations" => clifford_relations(desc),
        "real-module" => real_module(desc),
        "spectral-law" => spectral_law(desc),
        "square-law" => square_law(desc),
        "equivariance" => equivariance(desc),
        "bott-commutation" => bott_commutation(desc),
        "connectivity-path" => connectivity_path_suite(desc),
        "index" => index_suite(desc),
        "unit" => unit_suite(desc),
        "round-trip" => round_trip(desc),
        "multiplicativity" => multiplicativity(desc),
        "fixed-point" => fixed_point_suite(desc),
        other => Err(Error::UnknownSuite(other.to_string())),
    }?
    .condensed();
    for name in &desc.checks {
        if report.get(name).is_none() {
            return Err(Error::InvalidArgument(format!("suite {} did not run check {name:?}", desc.name)));
        }
    }
    let checks: Vec<Check> = report
        .checks
        .into_iter()
        .map(|c| Check {
            residual: fixed_precision(c.residual),
            ..c
        })
        .collect();
    Ok(SuiteReport {
        schema: "report.v1".into(),
        suite: desc.name.clone(),
        params: desc.params.clone(),
        passed: checks.iter().all(|c| c.pass),
        max_residual: checks.iter().map(|c| c.residual).fold(0.0, f64::max),
        checks,
    })
}

pub fn sample_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = seeded(seed);
    rng.set_stream(stream);
    rng
}

/// Runs `f` on samples `0..n` in parallel and merges the reports in order.
fn par_samples(n: usize, f: impl Fn(usize) -> Result<Report> + Sync + Send) -> Result<Report> {
    let parts: Vec<Result<Report>> = (0..n).into_par_iter().map(f).collect();
    let mut out = Report::new();
    for part in parts {
        out.extend(part?);
    }
    Ok(out)
}

fn ctx(p: usize, q: usize, k: usize, l: usize) -> Context {
    Context::new(p, q, k, l)
}

fn worst(report: &Report) -> f64 {
    report.max_residual()
}

/// Largest absolute difference of two sorted lists; `∞` on length mismatch.
fn sorted_distance(mut a: Vec<f64>, mut b: Vec<f64>) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn signatures_up_to(n: usize) -> Vec<CliffordSignature> {
    (0..=n)
        .flat_map(|total| (0..=total).map(move |p| CliffordSignature { p, q: total - p }))
        .collect()
}

fn contexts_up_to(n: usize) -> Vec<Context> {
    let mut out = Vec::new();
    for p in 0..=n {
        for q in 0..=n - p {
            for k in 0..=n - p - q {
                for l in 0..=n - p - q - k {
                    out.push(ctx(p, q, k, l));
                }
            }
        }
    }
    out
}

fn clifford_relations(desc: &SuiteDescriptor) -> Result<Report> {
    let tol = desc.params.tol;
    let sigs = match desc.params.signature {
        Some(c) => vec![c.right()],
        None => signatures_up_to(4),
    };
    par_samples(sigs.len(), |s| {
        let sig = sigs[s];
        let mut report = Report::new();
        let n = sig.dim() as u32;
        let one = real(1.0);
        let basis: Vec<CliffordElement> = (0..n).map(|w| CliffordElement::from_word(sig, w, one)).collect();
        let mul = |a: &CliffordElement, b: &CliffordElement| a.multiply(b);
        let mut assoc: f64 = 0.0;
        let mut theta_mul: f64 = 0.0;
        let mut eps_mul: f64 = 0.0;
        for a in &basis {
            for b in &basis {
                let ab = mul(a, b)?;
                theta_mul = theta_mul.max(ab.real_involution().max_abs_difference(&mul(&a.real_involution(), &b.real_involution())?));
                eps_mul = eps_mul.max(ab.grading_involution().max_abs_difference(&mul(&a.grading_involution(), &b.grading_involution())?));
                for c in &basis {
                    assoc = assoc.max(mul(&ab, c)?.max_abs_difference(&mul(a, &mul(b, c)?)?));
                }
            }
        }
        report.record("associativity", assoc, tol);
        report.record("theta is multiplicative", theta_mul, tol);
        report.record("grading is multiplicative", eps_mul, tol);

        let gens: Vec<CliffordElement> = (1..=sig.p)
            .map(|i| CliffordElement::generator(sig, GeneratorKind::E, i))
            .chain((1..=sig.q).map(|j| CliffordElement::generator(sig, GeneratorKind::F, j)))
            .collect::<Result<_>>()?;
        let mut squares: f64 = 0.0;
        let mut anti: f64 = 0.0;
        for (i, g) in gens.iter().enumerate() {
            let expect = CliffordElement::scalar(sig, real(sig.square(i)));
            squares = squares.max(mul(g, g)?.max_abs_difference(&expect));
            for h in &gens[i + 1..] {
                anti = anti.max(mul(g, h)?.max_abs_difference(&mul(h, g)?.scale(real(-1.0))));
            }
        }
        report.record("generator squares", squares, tol);
        report.record("generators anticommute", anti, tol);

        let z = crate::linalg::c(0.25, -1.5);
        let mut antilinear: f64 = 0.0;
        let mut involution: f64 = 0.0;
        let mut commute: f64 = 0.0;
        for w in 0..n {
            let x = CliffordElement::from_word(sig, w, z);
            let tx = x.real_involution();
            antilinear = antilinear.max(tx.max_abs_difference(&basis[w as usize].real_involution().scale(z.conj())));
            involution = involution.max(tx.real_involution().max_abs_difference(&x));
            commute = commute.max(
                x.grading_involution()
                    .real_involution()
                    .max_abs_difference(&tx.grading_involution()),
            );
        }
        report.record("theta is antilinear", antilinear, tol);
        report.record("theta is an involution", involution, tol);
        report.record("theta commutes with grading", commute, tol);

        // products of ascending generator subsets span the algebra
        let mut words = std::collections::BTreeSet::new();
        for mask in 0..n {
            let mut x = CliffordElement::one(sig);
            for (g, gen) in gens.iter().enumerate() {
                if mask & (1 << g) != 0 {
                    x = mul(&x, gen)?;
                }
            }
            words.extend(x.terms().map(|(w, _)| w));
        }
        report.push(Check::flag("basis dimension", words.len() == sig.dim()));
        Ok(report)
    })
}

fn real_module(desc: &SuiteDescriptor) -> Result<Report> {
    let tol = desc.params.tol;
    let contexts = desc.contexts(&contexts_up_to(4));
    let mut modules: Vec<GradedRealModule> = Vec::new();
    if desc.params.signature.is_none() {
        modules.extend(signatures_up_to(4).into_iter().map(regular_module));
        modules.push(unit_module(1, 1, desc.params.factor_level)?);
    }
    for &c in &contexts {
        modules.push(regular_with_context(c));
        for level in 1..=desc.params.level {
            modules.push(build_universe(c, level)?);
        }
    }
    let mut report = par_samples(modules.len(), |i| {
        let r = verify_module_axioms(&modules[i]);
        Ok(Report {
            checks: r.checks.into_iter().map(|c| Check::new(c.check, c.residual, tol)).collect(),
        })
    })?;
    for &c in &contexts {
        for level in 1..desc.params.level.max(2) {
            let emb = verify_embedding(
                &build_universe(c, level)?,
                &build_universe(c, level + 1)?,
                &filtration_embedding(c, level)?,
            );
            report.record("embedding", worst(&emb), tol);
        }
    }
    Ok(report)
}

/// A rank-2 member of `kr_{0,0}` with eigenvalues `±t` on the first even
/// and odd basis lines of `ℋ₀₀`.
fn elementary_member(level: usize, t: f64) -> Result<(GradedRealModule, HinfOperator)> {
    let m = build_universe(Context::default(), level)?;
    let even = (0..m.dim()).find(|&i| m.grading[i] > 0.0).unwrap();
    let odd = (0..m.dim()).find(|&i| m.grading[i] < 0.0).unwrap();
    let frame = CMat::from_fn(m.dim(), 2, |r, c| real(((c == 0 && r == even) || (c == 1 && r == odd)) as u8 as f64));
    let flag = FlagChain {
        ambient_dim: m.dim(),
        w0: CMat::zeros(m.dim(), 0),
        steps: vec![FlagStep {
            frame,
            involution: CMat::from_row_slice(2, 2, &[real(0.0), real(1.0), real(1.0), real(0.0)]),
        }],
        t: vec![t],
    };
    let op = HinfOperator::new(assemble_from_flag(&flag), Context::default());
    Ok((m, op))
}

/// `{s·√(λ² + μ²)}` over eigenvalue pairs, the sign taken from `λ` unless
/// it vanishes.
fn star_spectrum_formula(g: &HinfOperator, h: &HinfOperator) -> Vec<f64> {
    let (a, b) = (g.config.spectrum(), h.config.spectrum());
    a.iter()
        .flat_map(|&l| {
            b.iter().map(move |&m| {
                let sign = if l != 0.0 { l.signum() } else { m.signum() };
                sign * l.hypot(m)
            })
        })
        .collect()
}

/// Eigenvalues of `G ⊗ I + ε ⊗ H` compressed to `dom G ⊗ dom H`, computed
/// from the dense assembled factors.
fn dense_star_spectrum(g: &HinfOperator, m: &GradedRealModule, h: &HinfOperator) -> Vec<f64> {
    let vg = g.config.domain_frame();
    let vh = h.config.domain_frame();
    let gd = matmul(&adjoint_mul(&vg, &g.config.assemble()), &vg);
    let hd = matmul(&adjoint_mul(&vh, &h.config.assemble()), &vh);
    let eps = adjoint_mul(&vg, &m.grading_op().apply(&vg));
    let total = gd.kronecker(&CMat::identity(hd.nrows(), hd.nrows())) + eps.kronecker(&hd);
    hermitian_eigen(&total).0
}

fn spectral_law(desc: &SuiteDescriptor) -> Result<Report> {
    let tol = desc.params.tol;
    let pool = desc.contexts(&[
        ctx(0, 0, 0, 0),
        ctx(1, 0, 0, 0),
        ctx(0, 1, 0, 0),
        ctx(1, 1, 0, 0),
        ctx(0, 0, 1, 0),
        ctx(0, 0, 0, 1),
        ctx(1, 0, 0, 1),
    ]);
    let level = desc.params.level;
    let mut report = par_samples(desc.params.samples, |i| {
        let mut rng = sample_rng(desc.params.seed, i as u64);
        let c1 = pool[rng.gen_range(0..pool.len())];
        let c2 = pool[rng.gen_range(0..pool.len())];
        let a = random_member(&mut rng, c1, level, Reality::Generic)?;
        let b = random_member(&mut rng, c2, level, Reality::Generic)?;
        let prod = star_product(&a.op, &a.module, &b.op);
        let formula = star_spectrum_formula(&a.op, &b.op);
        let mut r = Report::new();
        r.record("star spectrum", sorted_distance(prod.config.spectrum(), formula.clone()), tol);
        r.record("dense oracle spectrum", sorted_distance(dense_star_spectrum(&a.op, &a.module, &b.op), formula), tol);
        let member = is_member(&prod, &graded_tensor(&a.module, &b.module), OperatorClass::KrConnective)?;
        r.record("star product membership", worst(&member), tol);
        Ok(r)
    })?;
    let (m, g) = elementary_member(1, 3.0)?;
    let (_, h) = elementary_member(1, 4.0)?;
    let prod = star_product(&g, &m, &h);
    report.record("example 3,4 gives 5", sorted_distance(prod.config.spectrum(), vec![-5.0, -5.0, 5.0, 5.0]), tol);
    let (_, u) = elementary_member(1, 1.0)?;
    let prod = star_product(&u, &m, &u);
    let r2 = std::f64::consts::SQRT_2;
    report.record("example 1,1 gives sqrt 2", sorted_distance(prod.config.spectrum(), vec![-r2, -r2, r2, r2]), tol);
    Ok(report)
}

fn square_law(desc: &SuiteDescriptor) -> Result<Report> {
    let tol = desc.params.tol;
    let level = desc.params.level;
    let e_pool = desc.contexts(&[ctx(1, 0, 0, 0), ctx(1, 1, 0, 0), ctx(2, 0, 0, 0), ctx(1, 0, 1, 0), ctx(1, 0, 0, 1)]);
    let f_pool = desc.contexts(&[ctx(0, 1, 0, 0), ctx(1, 1, 0, 0), ctx(0, 2, 0, 0), ctx(0, 1, 1, 0), ctx(0, 1, 0, 1)]);
    let n = desc.params.samples;
    par_samples(2 * n, |i| {
        let (flavor, pool, label) = if i < n {
            (Flavor::E, &e_pool, "phi")
        } else {
            (Flavor::F, &f_pool, "psi")
        };
        let mut rng = sample_rng(desc.params.seed, i as u64);
        let c = pool[i % pool.len()];
        let (module, triple) = random_triple(&mut rng, c, level, flavor, i % 2 == 1)?;
        let image = match flavor {
            Flavor::E => phi_total(&triple, &module)?,
            Flavor::F => psi_total(&triple, &module)?,
        };
        let mut r = Report::new();
        r.record(format!("{label} square law"), square_law_residual(&triple, &image), tol);
        let target = image_module(&module, flavor)?;
        let member = is_member(&image, &target, OperatorClass::KrConnective)?;
        r.record(format!("{label} image membership"), worst(&member), tol);
        let magnitudes: Vec<f64> = joint_spectrum(&triple).iter().map(|(l, m)| l.hypot(*m)).collect();
        let observed: Vec<f64> = image.config.spectrum().iter().map(|x| x.abs()).collect();
        r.record(format!("{label} eigenvalues sqrt(l^2 + m^2)"), sorted_distance(observed, magnitudes), tol);
        Ok(r)
    })
}

fn loop_distance(a: &LoopFamily, b: &LoopFamily) -> f64 {
    a.values
        .iter()
        .zip(&b.values)
        .map(|(x, y)| frobenius(&(x.config.assemble() - y.config.assemble())))
        .fold(0.0, f64::max)
}

fn equivariance(desc: &SuiteDescriptor) -> Result<Report> {
    let tol = desc.params.tol;
    let level = desc.params.level;
    let fl = desc.params.factor_level;
    let grid = symmetric_grid(desc.params.grid)?;
    let pool = desc.contexts(&[ctx(0, 0, 0, 0), ctx(1, 0, 0, 0), ctx(0, 1, 0, 0), ctx(1, 1, 0, 0), ctx(0, 0, 1, 0), ctx(0, 1, 0, 1)]);
    par_samples(desc.params.samples, |i| {
        let mut rng = sample_rng(desc.params.seed, i as u64);
        let a = random_member(&mut rng, pool[i % pool.len()], level, Reality::Generic)?;
        let theta_g = theta_conjugate(&a.op, &a.module);
        let mut r = Report::new();
        for flavor in [LoopFlavor::Omega10, LoopFlavor::Omega01] {
            let (label, module, beta): (&str, _, fn(&HinfOperator, usize, &[f64]) -> Result<LoopFamily>) = match flavor {
                LoopFlavor::Omega10 => ("beta10", bott10_module(&a.module, fl)?, bott_1_0),
                LoopFlavor::Omega01 => ("beta01", bott01_module(&a.module, fl)?, bott_0_1),
            };
            let gamma = beta(&a.op, fl, &grid)?;
            let expect = beta(&theta_g, fl, &grid)?;
            let acted = loop_theta(&gamma, flavor, &module)?;
            r.record(format!("{label} loop equivariance"), loop_distance(&acted, &expect), tol);
            // θ applied pointwise, without reversing the loop parameter
            let pointwise = loop_theta(&gamma, LoopFlavor::Omega10, &module)?;
            r.record(format!("{label} pointwise theta"), loop_distance(&pointwise, &expect), tol);
            r.record("loop_theta is an involution", loop_distance(&loop_theta(&acted, flavor, &module)?, &gamma), tol);
            r.push(Check::flag("loop endpoints are base points", gamma.endpoints_are_base_points()));
            let mut member: f64 = 0.0;
            for v in gamma.values.iter().filter(|v| !v.is_base_point()) {
                member = member.max(worst(&is_member(v, &module, OperatorClass::KrConnective)?));
            }
            r.record(format!("{label} loop membership"), member, 1e-9);
        }
        Ok(r)
    })
}

fn bott_commutation(desc: &SuiteDescriptor) -> Result<Report> {
    let tol = desc.params.tol;
    let level = desc.params.level;
    let fl = desc.params.factor_level;
    let c = desc.params.signature.unwrap_or(ctx(1, 1, 0, 0));
    let axis = [-2.0, -1.0, 0.0, 1.0, 2.0];
    let samples: Vec<(f64, f64)> = axis.iter().flat_map(|&a| axis.iter().map(move |&b| (a, b))).collect();
    par_samples(desc.params.samples, |i| {
        let mut rng = sample_rng(desc.params.seed, i as u64);
        let a = random_member(&mut rng, c, level, Reality::Generic)?;
        let residuals = bott11_residuals(&a.op, &a.module, fl, &samples)?;
        let mut r = Report::new();
        r.record("beta11 equals L_v * G00 * G00 * G", residuals.iter().copied().fold(0.0, f64::max), tol);
        if i < 2 {
            let module = bott11_module(&a.module, fl)?;
            let value = bott_1_1(&a.op, fl, 1.0, -2.0)?;
            r.record("beta11 membership", worst(&is_member(&value, &module, OperatorClass::KrConnective)?), 1e-9);
            let far = bott_1_1(&a.op, fl, 300.0, 400.0)?;
            let low = far.config.spectrum().iter().map(|x| x.abs()).fold(f64::INFINITY, f64::min);
            r.record("beta11 escapes along rays", (500.0 - low).max(0.0), 1e-9);
        }
        Ok(r)
    })
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|j| a + (b - a) * j as f64 / (n - 1) as f64).collect()
}

fn connectivity_path_suite(desc: &SuiteDescriptor) -> Result<Report> {
    let tol = desc.params.tol;
    let level = desc.params.level;
    let pool = desc.contexts(&[ctx(0, 0, 1, 0), ctx(0, 0, 0, 1), ctx(1, 0, 1, 0), ctx(0, 1, 0, 1), ctx(0, 0, 1, 1), ctx(1, 1, 1, 1)]);
    if pool.iter().any(|c| c.k + c.l == 0) {
        return Err(Error::InvalidArgument("connectivity path needs k + l >= 1".into()));
    }
    let n = desc.params.samples;
    let samples = linspace(0.0, 0.95, 20);
    let late = linspace(0.5, 0.999, 50);
    par_samples(n * pool.len(), |i| {
        let c = pool[i / n];
        let reality = if i % 2 == 0 { Reality::Fixed } else { Reality::Generic };
        let mut rng = sample_rng(desc.params.seed, i as u64);
        let a = random_member(&mut rng, c, level, reality)?;
        let f = if c.k > 0 && (reality == Reality::Fixed || c.l == 0 || i % 4 == 1) {
            LeftGenerator::Pos(rng.gen_range(0..c.k))
        } else {
            LeftGenerator::Neg(rng.gen_range(0..c.l))
        };
        let mut r = Report::new();
        let mut member: f64 = 0.0;
        let mut fixed: f64 = 0.0;
        for &t in &samples {
            let h = connectivity_path(&a.op, &a.module, f, t)?;
            member = member.max(worst(&is_member(&h, &a.module, OperatorClass::KrConnective)?));
            if reality == Reality::Fixed {
                fixed = fixed.max(fixed_point_distance(&h, &a.module));
            }
        }
        r.record("path membership", member, tol);
        if reality == Reality::Fixed {
            r.record("path preserves fixed points", fixed, tol);
        }
        let start = connectivity_path(&a.op, &a.module, f, 0.0)?;
        r.record("path at t=0 is G", configuration_distance(&start.config, &a.op.config)?, tol);

        let base = SpectralConfiguration::base_point(a.module.dim());
        let mut escape = Vec::with_capacity(late.len());
        let mut to_base = Vec::with_capacity(late.len());
        for &t in &late {
            let h = connectivity_path(&a.op, &a.module, f, t)?;
            escape.push(escape_coordinate(&h.config));
            to_base.push(configuration_distance(&h.config, &base)?);
        }
        let drop = |xs: &[f64], sign: f64| xs.windows(2).map(|w| (sign * (w[0] - w[1])).max(0.0)).fold(0.0, f64::max);
        r.record("escape monotone for t >= 0.5", drop(&escape, 1.0), 0.0);
        r.record("distance to base point shrinks for t >= 0.5", drop(&to_base, -1.0), 0.0);
        r.record("escape at t=0.999", 1.0 - escape[late.len() - 1], 1e-3);
        Ok(r)
    })
}

fn index_suite(desc: &SuiteDescriptor) -> Result<Report> {
    let level = desc.params.level;
    let mut report = Report::new();
    for l in 1..=level.max(2) {
        let g = make_g00(l)?;
        let m = build_universe(Context::default(), l)?;
        report.record("index of G00", (graded_index(&g, &m) - 1).abs() as f64, 0.0);
        report.push(Check::flag("G00 is a fixed point", is_fixed_point(&g, &m)));
    }
    let m = build_universe(Context::default(), level)?;
    report.record("index of base point", graded_index(&HinfOperator::base_point(m.dim(), m.context()), &m).abs() as f64, 0.0);
    let pool = desc.contexts(&[ctx(0, 0, 0, 0), ctx(0, 0, 0, 0), ctx(0, 0, 0, 0), ctx(1, 0, 0, 0), ctx(0, 0, 1, 0)]);
    report.extend(par_samples(desc.params.samples, |i| {
        let mut rng = sample_rng(desc.params.seed, i as u64);
        let a = random_member(&mut rng, pool[i % pool.len()], level, Reality::Generic)?;
        let b = random_member(&mut rng, pool[(i / pool.len()) % pool.len()], level, Reality::Generic)?;
        let (ia, ib) = (graded_index(&a.op, &a.module), graded_index(&b.op, &b.module));
        let prod = star_product(&a.op, &a.module, &b.op);
        let ip = graded_index(&prod, &graded_tensor(&a.module, &b.module));
        let mut r = Report::new();
        r.record("index multiplicativity", (ip - ia * ib).abs() as f64, 0.0);
        let extra = build_universe(a.op.context, 1)?;
        let (s, sum) = stabilize(&a.op, &a.module, &extra)?;
        r.record("index under stabilize", (graded_index(&s, &sum) - ia).abs() as f64, 0.0);
        let t = theta_conjugate(&a.op, &a.module);
        r.record("index under theta", (graded_index(&t, &a.module) - ia).abs() as f64, 0.0);
        Ok(r)
    })?);
    Ok(report)
}

/// All permutations of `0..n` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for rest in permutations(n - 1) {
        for pos in 0..n {
            let mut p = rest.clone();
            p.insert(pos, n - 1);
            out.push(p);
        }
    }
    out.sort();
    out
}

fn unit_suite(desc: &SuiteDescriptor) -> Result<Report> {
    let tol = desc.params.tol;
    let fl = desc.params.factor_level;
    let sigs: Vec<(usize, usize)> = match desc.params.signature {
        Some(c) => vec![(c.p, c.q)],
        None => vec![(1, 0), (0, 1), (2, 0), (1, 1), (0, 2)],
    };
    let n = desc.params.samples;
    let mut report = par_samples(n * sigs.len(), |i| {
        let (p, q) = sigs[i / n];
        let mut rng = sample_rng(desc.params.seed, i as u64);
        let scale = rng.gen_range(0.1..3.0);
        let v: Vec<f64> = random_unit_vector(&mut rng, p + q).into_iter().map(|x| x * scale).collect();
        let module = unit_module(p, q, fl)?;
        let eta = unit_map(Some(&v), p, q, fl)?;
        let mut r = Report::new();
        let mut equiv: f64 = 0.0;
        for e in permutations(p) {
            for f in permutations(q) {
                let sigma = Shuffle::new(e.clone(), f)?;
                let moved = unit_map(Some(&sigma.act_on_vector(&v)), p, q, fl)?;
                let acted = unit_permutation_action(&sigma, &eta, fl)?;
                equiv = equiv.max(configuration_distance(&moved.config, &acted.config)?);
            }
        }
        r.record("unit equivariance", equiv, tol);
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let low = eta.config.spectrum().iter().map(|x| x.abs()).fold(f64::INFINITY, f64::min);
        r.record("unit min eigenvalue", (norm - low).max(0.0), tol);
        r.record("unit spectrum is +-|v|", eta.config.spectrum().iter().map(|x| (x.abs() - norm).abs()).fold(0.0, f64::max), tol);
        r.record("unit membership", worst(&is_member(&eta, &module, OperatorClass::KrConnective)?), 1e-9);
        let covered = cover_map(&eta, &module)?;
        r.push(Check::flag("cover/unit triangle", covered == eta));
        if p + q >= 2 {
            let (a, b) = if p >= 1 { ((1, 0), (p - 1, q)) } else { ((0, 1), (0, q - 1)) };
            let head = unit_map(Some(&v[..1]), a.0, a.1, fl)?;
            let tail = unit_map(Some(&v[1..]), b.0, b.1, fl)?;
            let prod = star_product(&head, &unit_module(a.0, a.1, fl)?, &tail);
            let u = unit_product_reindex(a, b, fl)?;
            r.record("unit multiplicativity", configuration_distance(&transport(&prod, &u).config, &eta.config)?, tol);
        }
        Ok(r)
    })?;
    for &(p, q) in &sigs {
        report.push(Check::flag("unit at infinity is the base point", unit_map(None, p, q, fl)?.is_base_point()));
    }
    Ok(report)
}

fn round_trip(desc: &SuiteDescriptor) -> Result<Report> {
    let tol = desc.params.tol;
    let level = desc.params.level;
    let pool = desc.contexts(&[ctx(0, 0, 0, 0), ctx(1, 0, 0, 0), ctx(0, 1, 0, 0), ctx(1, 1, 0, 0), ctx(0, 0, 1, 1), ctx(1, 0, 1, 0)]);
    let e_pool: Vec<Context> = pool.iter().copied().filter(|c| c.p >= 1).collect();
    let f_pool: Vec<Context> = pool.iter().copied().filter(|c| c.q >= 1).collect();
    par_samples(desc.params.samples, |i| {
        let mut rng = sample_rng(desc.params.seed, i as u64);
        let mut r = Report::new();
        let a = random_member(&mut rng, pool[i % pool.len()], level, Reality::Generic)?;
        let once = decompose_to_flag(&a.op.config);
        let back = assemble_from_flag(&once);
        r.push(Check::flag("flag round trip (exact)", back == a.op.config));
        r.push(Check::flag("decompose is idempotent", decompose_to_flag(&back) == once));
        r.push(Check::flag("decomposed flag is valid", once.validate(&a.module).passed()));
        for (flavor, list, label) in [(Flavor::E, &e_pool, "phi"), (Flavor::F, &f_pool, "psi")] {
            if list.is_empty() {
                continue;
            }
            let (module, triple) = random_triple(&mut rng, list[i % list.len()], level, flavor, i % 3 == 0)?;
            let image = match flavor {
                Flavor::E => phi_total(&triple, &module)?,
                Flavor::F => psi_total(&triple, &module)?,
            };
            let extracted = fiber_extract(&image, &image_module(&module, flavor)?, flavor)?;
            let (frame, g, comp) = triple.reduced();
            let residual = if extracted.rank() == 0 {
                frobenius(&g) + frobenius(&comp)
            } else {
                compressed_distance(&frame, &g, &extracted.domain, &extracted.g)
                    + compressed_distance(&frame, &comp, &extracted.domain, &extracted.companion)
            };
            r.record(format!("{label} fiber round trip"), residual, tol);
            r.push(Check::flag(format!("{label} fiber context"), extracted.context == triple.context));
        }
        Ok(r)
    })
}

fn multiplicativity(desc: &SuiteDescriptor) -> Result<Report> {
    let tol = desc.params.tol;
    let level = desc.params.level;
    let pool = desc.contexts(&[ctx(0, 0, 0, 0), ctx(1, 0, 0, 0), ctx(0, 1, 0, 0), ctx(1, 1, 0, 0), ctx(0, 0, 1, 0), ctx(0, 0, 0, 1)]);
    par_samples(desc.params.samples, |i| {
        let mut rng = sample_rng(desc.params.seed, i as u64);
        let reality = if i % 2 == 0 { Reality::Generic } else { Reality::Fixed };
        let (ca, cb) = (pool[rng.gen_range(0..pool.len())], pool[rng.gen_range(0..pool.len())]);
        let a = random_member(&mut rng, ca, level, reality)?;
        let b = random_member(&mut rng, cb, level, Reality::Generic)?;
        let tensor = graded_tensor(&a.module, &b.module);
        let prod = star_product(&a.op, &a.module, &b.op);
        let mut r = Report::new();
        let lhs = cover_map(&prod, &tensor)?;
        let rhs = star_product(&cover_map(&a.op, &a.module)?, &a.module, &cover_map(&b.op, &b.module)?);
        r.push(Check::flag("cover star square", lhs == rhs));
        let lhs = theta_conjugate(&prod, &tensor);
        let rhs = star_product(&theta_conjugate(&a.op, &a.module), &a.module, &theta_conjugate(&b.op, &b.module));
        r.record("theta star square", frobenius(&(lhs.config.assemble() - rhs.config.assemble())), tol);
        Ok(r)
    })
}

fn fixed_point_suite(desc: &SuiteDescriptor) -> Result<Report> {
    let level = desc.params.level;
    let pool = desc.contexts(&[ctx(0, 0, 0, 0), ctx(1, 0, 0, 0), ctx(0, 1, 0, 0), ctx(1, 1, 0, 0), ctx(0, 1, 1, 1), ctx(0, 0, 0, 1)]);
    let mut report = par_samples(desc.params.samples, |i| {
        let mut rng = sample_rng(desc.params.seed, i as u64);
        let reality = if i % 2 == 0 { Reality::Fixed } else { Reality::Generic };
        let a = random_member(&mut rng, pool[(i / 2) % pool.len()], level, reality)?;
        let by_distance = is_fixed_point(&a.op, &a.module);
        let by_eigenspaces = eigenspaces_theta_invariant(&a.op, &a.module);
        let mut r = Report::new();
        r.push(Check::flag("characterizations agree", by_distance == by_eigenspaces));
        r.push(Check::flag("constructed labels", by_distance == (reality == Reality::Fixed)));
        Ok(r)
    })?;
    let m = build_universe(Context::default(), level)?;
    for g in [HinfOperator::base_point(m.dim(), m.context()), make_g00(level)?] {
        report.push(Check::flag("characterizations agree", is_fixed_point(&g, &m) == eigenspaces_theta_invariant(&g, &m)));
        report.push(Check::flag("constructed labels", is_fixed_point(&g, &m)));
    }
    Ok(report)
}
