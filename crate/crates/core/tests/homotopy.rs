use kr_core::classes::{filtration_level, is_fixed_point, is_member, OperatorClass};
use kr_core::corpus::{random_flag, random_member, random_triple, seeded, Reality};
use kr_core::homotopy::{
    assemble_from_flag, collapse_homotopy, cone_contraction, connectivity_path, decompose_to_flag, destabilize,
    escape_coordinate, stabilize, theta_triple, triple_distance, FlagChain, FlagJson, FlagStep, LeftGenerator,
};
use kr_core::linalg::{real, CMat};
use kr_core::maps::graded_index;
use kr_core::module::{build_universe, Context, GradedRealModule};
use kr_core::quasi::Flavor;
use kr_core::spectral::{configuration_distance, HinfOperator, SpectralConfiguration};
use proptest::prelude::*;

fn dist(a: &SpectralConfiguration, b: &SpectralConfiguration) -> f64 {
    configuration_distance(a, b).unwrap()
}

/// A flag on the trivial universe: `kernel` even lines, then one
/// (even, odd) pair swapped by the involution per entry of `ts`.
fn line_flag(m: &GradedRealModule, kernel: usize, ts: &[f64]) -> FlagChain {
    let n = m.dim();
    let even: Vec<usize> = (0..n).filter(|&i| m.grading[i] > 0.0).collect();
    let odd: Vec<usize> = (0..n).filter(|&i| m.grading[i] < 0.0).collect();
    let unit = |i: usize| CMat::from_fn(n, 1, |r, _| real((r == i) as u8 as f64));
    let w0 = CMat::from_fn(n, kernel, |r, c| real((r == even[c]) as u8 as f64));
    let swap = CMat::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0].map(real));
    let steps = (0..ts.len())
        .map(|j| {
            let (a, b) = (unit(even[kernel + j]), unit(odd[j]));
            FlagStep {
                frame: CMat::from_columns(&[a.column(0), b.column(0)]),
                involution: swap.clone(),
            }
        })
        .collect();
    FlagChain {
        ambient_dim: n,
        w0,
        steps,
        t: ts.to_vec(),
    }
}

fn trivial(level: usize) -> GradedRealModule {
    build_universe(Context::default(), level).unwrap()
}

#[test]
fn empty_flag_is_the_base_point() {
    let m = trivial(1);
    let c = assemble_from_flag(&FlagChain::empty(m.dim()));
    assert!(c.is_base_point());
    let back = decompose_to_flag(&c);
    assert!(back.steps.is_empty() && back.w0.ncols() == 0);
}

#[test]
fn step_at_infinity_is_omitted() {
    let m = trivial(2);
    let flag = line_flag(&m, 1, &[f64::INFINITY]);
    assert!(flag.validate(&m).passed());
    let c = assemble_from_flag(&flag);
    assert_eq!(c.eigenvalues(), vec![0.0]);
    assert_eq!(c.rank(), 1);
}

#[test]
fn small_spectra_decompose_by_hand() {
    let m = trivial(2);
    let c = assemble_from_flag(&line_flag(&m, 1, &[2.0]));
    assert_eq!(c.eigenvalues(), vec![-2.0, 0.0, 2.0]);
    let flag = decompose_to_flag(&c);
    assert_eq!(flag.t, vec![2.0]);
    assert_eq!(flag.steps.len(), 1);
    assert_eq!(flag.w0.ncols(), 1);
    // a tie ±2 across two projections collapses to one step whose
    // involution carries both eigenspaces
    let c = assemble_from_flag(&line_flag(&m, 0, &[2.0]));
    let flag = decompose_to_flag(&c);
    assert_eq!(flag.steps.len(), 1);
    let signs: Vec<f64> = (0..2).map(|i| flag.steps[0].involution[(i, i)].re).collect();
    assert_eq!(signs, vec![1.0, -1.0]);
}

#[test]
fn coincident_steps_merge() {
    let m = trivial(2);
    let c = assemble_from_flag(&line_flag(&m, 0, &[1.5, 1.5]));
    assert_eq!(c.eigenvalues(), vec![-1.5, 1.5]);
    assert_eq!(c.points()[0].rank(), 2);
    let flag = decompose_to_flag(&c);
    assert_eq!(flag.steps.len(), 1);
    assert_eq!(dist(&assemble_from_flag(&flag), &c), 0.0);
}

#[test]
fn flag_json_round_trip() {
    let m = trivial(2);
    let flag = line_flag(&m, 1, &[1.0, f64::INFINITY]);
    let text = serde_json::to_string(&flag.to_json()).unwrap();
    assert!(text.contains("\"flag.v1\"") && text.contains("null"));
    let back = FlagChain::from_json(&serde_json::from_str::<FlagJson>(&text).unwrap()).unwrap();
    assert_eq!(back, flag);
}

#[test]
fn invalid_flags_are_reported() {
    let m = trivial(2);
    let mut flag = line_flag(&m, 0, &[2.0, 1.0]);
    assert!(!flag.validate(&m).passed(), "t must be sorted");
    flag.t = vec![1.0, 2.0];
    flag.steps[0].involution = CMat::identity(2, 2);
    let failed: Vec<String> = flag.validate(&m).failures().iter().map(|c| c.check.clone()).collect();
    assert_eq!(failed, vec!["involutions odd".to_string()]);
}

#[test]
fn connectivity_path_examples() {
    let ctx = Context::new(0, 0, 1, 0);
    let m = build_universe(ctx, 2).unwrap();
    let mut rng = seeded(3);
    let g = (0..500)
        .map(|_| random_member(&mut rng, ctx, 2, Reality::Generic).unwrap().op)
        .find(|g| g.config.eigenvalues().contains(&0.0) && g.config.points().len() > 1)
        .expect("corpus produces a kernel");
    let f = LeftGenerator::Pos(0);
    assert_eq!(connectivity_path(&g, &m, f, 0.0).unwrap(), g);
    let half = connectivity_path(&g, &m, f, 0.5).unwrap();
    let kernel_rank = g.config.points().iter().find(|p| p.lambda == 0.0).unwrap().rank();
    let mut expected: Vec<f64> = g.config.spectrum().iter().filter(|&&l| l != 0.0).map(|l| 2.0 * l).collect();
    expected.extend(std::iter::repeat_n(1.0, kernel_rank / 2));
    expected.extend(std::iter::repeat_n(-1.0, kernel_rank / 2));
    expected.sort_by(f64::total_cmp);
    let got = half.config.spectrum();
    assert_eq!(got.len(), expected.len());
    assert!(got.iter().zip(&expected).all(|(a, b)| (a - b).abs() < 1e-12), "{got:?} vs {expected:?}");
    assert!(connectivity_path(&g, &m, f, 1.0).is_err());
    assert!(connectivity_path(&g, &m, LeftGenerator::Neg(0), 0.5).is_err());
    let plain = Context::new(1, 0, 0, 0);
    let pm = build_universe(plain, 1).unwrap();
    let h = random_member(&mut rng, plain, 1, Reality::Generic).unwrap().op;
    assert!(connectivity_path(&h, &pm, f, 0.5).is_err());
}

#[test]
fn connectivity_path_keeps_fixed_points_and_escapes() {
    let ctx = Context::new(1, 0, 2, 0);
    let mut rng = seeded(8);
    let member = random_member(&mut rng, ctx, 1, Reality::Fixed).unwrap();
    let (g, m) = (&member.op, &member.module);
    assert!(is_fixed_point(g, m));
    let mut last = 0.0;
    for j in 0..=20 {
        let t = 0.95 * j as f64 / 20.0;
        let h = connectivity_path(g, m, LeftGenerator::Pos(1), t).unwrap();
        assert!(is_fixed_point(&h, m), "t = {t}");
        assert!(is_member(&h, m, OperatorClass::KrConnective).unwrap().passed(), "t = {t}");
        let e = escape_coordinate(&h.config);
        assert!(e >= last);
        last = e;
    }
    let end = connectivity_path(g, m, LeftGenerator::Pos(0), 0.999).unwrap();
    assert!(1.0 - escape_coordinate(&end.config) < 1e-2);
}

#[test]
fn collapse_examples() {
    let m = trivial(2);
    let g = HinfOperator::new(assemble_from_flag(&line_flag(&m, 1, &[0.5, 1.0, 3.0])), Context::default());
    let radius = 1.5;
    let inner = HinfOperator::new(assemble_from_flag(&line_flag(&m, 1, &[0.5, 1.0])), Context::default());
    for s in [0.0, 0.3, 1.0] {
        assert_eq!(collapse_homotopy(&inner, radius, s).unwrap(), inner);
    }
    assert_eq!(collapse_homotopy(&g, radius, 0.0).unwrap(), g);
    let end = collapse_homotopy(&g, radius, 1.0).unwrap();
    assert_eq!(end.config.eigenvalues(), vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
    assert!(filtration_level(&end, &m).unwrap() < filtration_level(&g, &m).unwrap());
    assert!(is_member(&end, &m, OperatorClass::KrConnective).unwrap().passed());
    let mut last = f64::INFINITY;
    for k in 2..7 {
        let step = 1.0 / f64::powi(2.0, k);
        let a = collapse_homotopy(&g, radius, 0.5).unwrap();
        let b = collapse_homotopy(&g, radius, 0.5 + step).unwrap();
        let d = dist(&a.config, &b.config);
        assert!(d < last);
        last = d;
    }
    assert!(collapse_homotopy(&g, -1.0, 0.5).is_err());
    assert!(collapse_homotopy(&g, 1.0, 1.5).is_err());
}

#[test]
fn cone_contraction_endpoints_and_theta() {
    let ctx = Context::new(1, 0, 0, 0);
    for (seed, minus) in [(1u64, false), (2, true), (3, false)] {
        let (m, t) = random_triple(&mut seeded(seed), ctx, 1, Flavor::E, minus).unwrap();
        assert_eq!(cone_contraction(&t, 0.0).unwrap(), t);
        let end = cone_contraction(&t, 1.0).unwrap();
        assert_eq!(end.rank(), 0);
        for s in [0.2, 0.5, 0.9] {
            let c = cone_contraction(&t, s).unwrap();
            assert!(c.validate(&m).unwrap().passed());
            let lhs = theta_triple(&c, &m);
            let rhs = cone_contraction(&theta_triple(&t, &m), s).unwrap();
            assert!(triple_distance(&lhs, &rhs) < 1e-12, "s = {s}");
        }
    }
    let (_, t) = random_triple(&mut seeded(4), ctx, 1, Flavor::E, false).unwrap();
    assert!(cone_contraction(&t, 1.2).is_err());
}

#[test]
fn stabilize_examples() {
    let ctx = Context::new(1, 1, 0, 0);
    let r = build_universe(ctx, 1).unwrap();
    let v = build_universe(ctx, 2).unwrap();
    let base = HinfOperator::base_point(r.dim(), ctx);
    let (sb, _) = stabilize(&base, &r, &v).unwrap();
    assert!(sb.is_base_point());
    assert_eq!(sb.ambient_dim(), r.dim() + v.dim());
    let member = random_member(&mut seeded(9), ctx, 1, Reality::Fixed).unwrap();
    let (s, sum) = stabilize(&member.op, &r, &v).unwrap();
    assert_eq!(s.config.spectrum(), member.op.config.spectrum());
    assert!(is_member(&s, &sum, OperatorClass::KrConnective).unwrap().passed());
    assert!(is_fixed_point(&s, &sum));
    assert_eq!(graded_index(&s, &sum), graded_index(&member.op, &r));
    assert_eq!(destabilize(&s, r.dim()), member.op);
    assert!(stabilize(&member.op, &v, &r).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn flag_round_trip_is_exact(seed in 0u64..2000, which in 0usize..4) {
        let ctx = [Context::new(0, 0, 0, 0), Context::new(1, 0, 0, 0), Context::new(0, 1, 1, 0), Context::new(1, 1, 0, 1)][which];
        let m = build_universe(ctx, 1).unwrap();
        let flag = random_flag(&mut seeded(seed), ctx, 1, Reality::Generic).unwrap();
        prop_assert!(flag.validate(&m).passed());
        let c = assemble_from_flag(&flag);
        let back = decompose_to_flag(&c);
        prop_assert!(back.validate(&m).passed());
        prop_assert_eq!(&back.t, &flag.t);
        let again = assemble_from_flag(&back);
        prop_assert_eq!(dist(&again, &c), 0.0);
        prop_assert_eq!(decompose_to_flag(&again), back);
    }

    #[test]
    fn collapse_never_raises_the_level(seed in 0u64..2000, radius in 0.5f64..5.0, s in 0.0f64..=1.0) {
        let ctx = Context::new(1, 0, 0, 0);
        let member = random_member(&mut seeded(seed), ctx, 1, Reality::Generic).unwrap();
        let (g, m) = (&member.op, &member.module);
        let c = collapse_homotopy(g, radius, s).unwrap();
        prop_assert!(filtration_level(&c, m).unwrap() <= filtration_level(g, m).unwrap());
        prop_assert!(is_member(&c, m, OperatorClass::KrConnective).unwrap().passed());
        if g.config.eigenvalues().iter().any(|l| l.abs() > radius * 1.1) {
            let end = collapse_homotopy(g, radius, 1.0).unwrap();
            prop_assert!(filtration_level(&end, m).unwrap() < filtration_level(g, m).unwrap());
        }
    }
}
