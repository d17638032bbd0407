use kr_core::classes::{
    cover_map, eigenspace_theta_defect, eigenspaces_theta_invariant, filtration_level, fixed_point_distance,
    is_fixed_point, is_member, permutation_action, theta_conjugate, OperatorClass, Shuffle,
};
use kr_core::corpus::{random_member, seeded, Reality};
use kr_core::linalg::CMat;
use kr_core::module::{build_universe, Context};
use kr_core::spectral::{configuration_distance, HinfOperator, Point, SpectralConfiguration};
use kr_core::unit::{unit_map, unit_module};
use num_complex::Complex64;
use proptest::prelude::*;

const CLASSES: [OperatorClass; 4] =
    [OperatorClass::Kr, OperatorClass::KrConnective, OperatorClass::EClass, OperatorClass::FClass];

fn rows(n: usize, idx: &[usize]) -> CMat {
    CMat::from_fn(n, idx.len(), |r, c| Complex64::new((r == idx[c]) as u8 as f64, 0.0))
}

fn zero_on(ctx: Context, frame: CMat) -> HinfOperator {
    let n = frame.nrows();
    HinfOperator::new(SpectralConfiguration::new(n, vec![Point { lambda: 0.0, frame }]).unwrap(), ctx)
}

fn same(a: &HinfOperator, b: &HinfOperator) -> f64 {
    configuration_distance(&a.config, &b.config).unwrap()
}

#[test]
fn base_point_is_in_every_class() {
    let ctx = Context::new(1, 1, 1, 0);
    let m = build_universe(ctx, 1).unwrap();
    let g = HinfOperator::base_point(m.dim(), ctx);
    for cls in CLASSES {
        assert!(is_member(&g, &m, cls).unwrap().passed(), "{cls:?}");
    }
    assert!(theta_conjugate(&g, &m).is_base_point());
    assert!(is_fixed_point(&g, &m));
    assert!(cover_map(&g, &m).unwrap().is_base_point());
    assert_eq!(filtration_level(&g, &m).unwrap(), 0);
}

#[test]
fn domain_not_closed_under_e1_fails() {
    let ctx = Context::new(1, 0, 0, 0);
    let m = build_universe(ctx, 1).unwrap();
    let g = zero_on(ctx, rows(m.dim(), &[0]));
    let report = is_member(&g, &m, OperatorClass::Kr).unwrap();
    assert!(!report.passed());
}

#[test]
fn unit_maps_are_connective_members() {
    let m = unit_module(1, 1, 1).unwrap();
    let g = unit_map(Some(&[0.6, -1.3]), 1, 1, 1).unwrap();
    assert!(is_member(&g, &m, OperatorClass::KrConnective).unwrap().passed());
    let covered = cover_map(&g, &m).unwrap();
    assert!(is_member(&covered, &m, OperatorClass::Kr).unwrap().passed());
    assert_eq!(covered, g);
}

#[test]
fn one_regular_copy_has_level_one() {
    let ctx = Context::new(1, 1, 0, 0);
    let m = build_universe(ctx, 1).unwrap();
    // the first background vector tensored with the regular module
    let g = zero_on(ctx, rows(m.dim(), &[0, 1, 2, 3]));
    assert!(is_member(&g, &m, OperatorClass::Kr).unwrap().passed());
    assert_eq!(filtration_level(&g, &m).unwrap(), 1);
    assert_eq!(filtration_level(&theta_conjugate(&g, &m), &m).unwrap(), 1);
}

#[test]
fn theta_invariant_line_is_fixed() {
    let ctx = Context::new(0, 0, 0, 0);
    let m = build_universe(ctx, 1).unwrap();
    let mut v = rows(m.dim(), &[0]);
    v += m.theta_frame(&v);
    let norm = v.norm();
    let g = zero_on(ctx, v / Complex64::new(norm, 0.0));
    assert!(is_fixed_point(&g, &m));
    assert!(eigenspaces_theta_invariant(&g, &m));
    let tilted = zero_on(ctx, rows(m.dim(), &[0]) * Complex64::new(0.0, 1.0));
    assert_eq!(is_fixed_point(&tilted, &m), eigenspaces_theta_invariant(&tilted, &m));
}

#[test]
fn fixed_point_characterizations_agree() {
    let mut rng = seeded(11);
    for i in 0..100 {
        let ctx = [Context::new(1, 0, 0, 0), Context::new(0, 1, 1, 0), Context::new(1, 1, 0, 0)][i % 3];
        let reality = if i % 2 == 0 { Reality::Fixed } else { Reality::Generic };
        let member = random_member(&mut rng, ctx, 1, reality).unwrap();
        let (g, m) = (&member.op, &member.module);
        let fixed = is_fixed_point(g, m);
        assert_eq!(fixed, eigenspaces_theta_invariant(g, m), "sample {i}");
        if reality == Reality::Fixed {
            assert!(fixed);
            assert!(fixed_point_distance(g, m) < 1e-9);
            assert!(eigenspace_theta_defect(g, m) < 1e-9);
        }
    }
}

#[test]
fn identity_and_transposition_actions() {
    let ctx = Context::new(2, 2, 0, 0);
    let mut rng = seeded(5);
    let g = random_member(&mut rng, ctx, 1, Reality::Generic).unwrap().op;
    let id = permutation_action(&Shuffle::identity(2, 2), &g, 1).unwrap();
    assert!(same(&id, &g) < 1e-12);
    let swap = Shuffle::new(vec![1, 0], vec![0, 1]).unwrap();
    let twice = permutation_action(&swap, &permutation_action(&swap, &g, 1).unwrap(), 1).unwrap();
    assert!(same(&twice, &g) < 1e-12);
    assert!(Shuffle::new(vec![0, 0], vec![]).is_err());
}

fn shuffle22() -> impl Strategy<Value = Shuffle> {
    (prop::bool::ANY, prop::bool::ANY).prop_map(|(a, b)| {
        let pick = |s: bool| if s { vec![1, 0] } else { vec![0, 1] };
        Shuffle::new(pick(a), pick(b)).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn actions_compose(seed in 0u64..1000, sigma in shuffle22(), tau in shuffle22()) {
        let ctx = Context::new(2, 2, 0, 0);
        let g = random_member(&mut seeded(seed), ctx, 1, Reality::Generic).unwrap().op;
        let m = build_universe(ctx, 1).unwrap();
        let step = permutation_action(&sigma, &permutation_action(&tau, &g, 1).unwrap(), 1).unwrap();
        let once = permutation_action(&sigma.compose(&tau), &g, 1).unwrap();
        prop_assert!(same(&step, &once) < 1e-12);
        prop_assert!(is_member(&once, &m, OperatorClass::Kr).unwrap().passed());
    }

    #[test]
    fn theta_is_an_involution_preserving_spectrum(seed in 0u64..1000, which in 0usize..4) {
        let ctx = [Context::new(1, 0, 0, 0), Context::new(0, 1, 0, 1), Context::new(1, 1, 1, 0), Context::new(0, 0, 1, 1)][which];
        let member = random_member(&mut seeded(seed), ctx, 1, Reality::Generic).unwrap();
        let (g, m) = (&member.op, &member.module);
        let t = theta_conjugate(g, m);
        prop_assert_eq!(t.config.eigenvalues(), g.config.eigenvalues());
        prop_assert!(same(&theta_conjugate(&t, m), g) < 1e-12);
        prop_assert!(is_member(&t, m, OperatorClass::KrConnective).unwrap().passed());
        prop_assert_eq!(filtration_level(&t, m).unwrap(), filtration_level(g, m).unwrap());
    }

    #[test]
    fn corpus_members_cover_into_kr(seed in 0u64..1000, which in 0usize..3) {
        let ctx = [Context::new(1, 1, 0, 0), Context::new(0, 1, 1, 0), Context::new(1, 0, 0, 1)][which];
        let member = random_member(&mut seeded(seed), ctx, 1, Reality::Generic).unwrap();
        let covered = cover_map(&member.op, &member.module).unwrap();
        prop_assert!(is_member(&covered, &member.module, OperatorClass::Kr).unwrap().passed());
    }
}
