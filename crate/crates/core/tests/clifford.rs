use kr_core::clifford::{CliffordElement, CliffordSignature, GeneratorKind};
use num_complex::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn sig(p: usize, q: usize) -> CliffordSignature {
    CliffordSignature::new(p, q).unwrap()
}

fn gen(s: CliffordSignature, kind: GeneratorKind, i: usize) -> CliffordElement {
    CliffordElement::generator(s, kind, i).unwrap()
}

fn mul(a: &CliffordElement, b: &CliffordElement) -> CliffordElement {
    a.multiply(b).unwrap()
}

#[test]
fn e_squares_to_minus_one() {
    let s = sig(1, 0);
    let e1 = gen(s, GeneratorKind::E, 1);
    assert_eq!(mul(&e1, &e1), CliffordElement::scalar(s, c(-1.0, 0.0)));
}

#[test]
fn f_squares_to_one() {
    let s = sig(0, 2);
    for j in 1..=2 {
        let f = gen(s, GeneratorKind::F, j);
        assert_eq!(mul(&f, &f), CliffordElement::one(s));
    }
}

#[test]
fn e1f1_squares_to_one() {
    let s = sig(1, 1);
    let x = mul(&gen(s, GeneratorKind::E, 1), &gen(s, GeneratorKind::F, 1));
    assert_eq!(mul(&x, &x), CliffordElement::one(s));
}

#[test]
fn grading_examples() {
    let s = sig(1, 2);
    let e1 = gen(s, GeneratorKind::E, 1);
    assert_eq!(e1.grading_involution(), e1.scale(c(-1.0, 0.0)));
    let x = CliffordElement::from_subsets(s, &[(vec![], c(1.0, 0.0)), (vec![1, 3], c(1.0, 0.0))]).unwrap();
    assert_eq!(x.grading_involution(), x);
}

#[test]
fn theta_examples() {
    let s = sig(1, 1);
    let e1 = gen(s, GeneratorKind::E, 1);
    let f1 = gen(s, GeneratorKind::F, 1);
    assert_eq!(f1.real_involution(), f1.scale(c(-1.0, 0.0)));
    assert_eq!(e1.real_involution(), e1);
    let i = CliffordElement::scalar(s, c(0.0, 1.0));
    assert_eq!(i.real_involution(), CliffordElement::scalar(s, c(0.0, -1.0)));
    let e1f1 = mul(&e1, &f1);
    assert_eq!(e1f1.real_involution(), e1f1.scale(c(-1.0, 0.0)));
}

#[test]
fn theta_is_an_involution_on_the_cl22_basis() {
    let s = sig(2, 2);
    for w in 0..s.dim() as u32 {
        for v in [c(1.0, 0.0), c(0.0, 1.0), c(0.3, -2.0)] {
            let x = CliffordElement::from_word(s, w, v);
            assert_eq!(x.real_involution().real_involution(), x);
        }
    }
}

#[test]
fn generator_constructor() {
    let s = sig(2, 1);
    assert_eq!(
        gen(s, GeneratorKind::E, 2),
        CliffordElement::from_subsets(s, &[(vec![2], c(1.0, 0.0))]).unwrap()
    );
    assert_eq!(
        gen(s, GeneratorKind::F, 1),
        CliffordElement::from_subsets(s, &[(vec![3], c(1.0, 0.0))]).unwrap()
    );
    assert!(CliffordElement::generator(s, GeneratorKind::F, 2).is_err());
    assert!(CliffordElement::generator(s, GeneratorKind::E, 0).is_err());
}

#[test]
fn mixed_signatures_do_not_multiply() {
    let a = CliffordElement::one(sig(1, 0));
    let b = CliffordElement::one(sig(0, 1));
    assert!(a.multiply(&b).is_err());
}

#[test]
fn bad_subsets_are_rejected() {
    let s = sig(1, 1);
    assert!(CliffordElement::from_subsets(s, &[(vec![2, 1], c(1.0, 0.0))]).is_err());
    assert!(CliffordElement::from_subsets(s, &[(vec![3], c(1.0, 0.0))]).is_err());
}

fn element(s: CliffordSignature) -> impl Strategy<Value = CliffordElement> {
    // small integer coefficients keep every product exact
    prop::collection::vec(((-3i32..=3), (-3i32..=3)), s.dim()).prop_map(move |coeffs| {
        let terms: Vec<(Vec<usize>, Complex64)> = coeffs
            .into_iter()
            .enumerate()
            .map(|(w, (re, im))| {
                let subset = (0..s.generators()).filter(|b| w & (1 << b) != 0).map(|b| b + 1).collect();
                (subset, c(re as f64, im as f64))
            })
            .collect();
        CliffordElement::from_subsets(s, &terms).unwrap()
    })
}

fn signature() -> impl Strategy<Value = CliffordSignature> {
    (0usize..=2, 0usize..=2).prop_map(|(p, q)| sig(p, q))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn multiplication_is_associative(
        (a, b, d) in signature().prop_flat_map(|s| (element(s), element(s), element(s)))
    ) {
        prop_assert_eq!(mul(&mul(&a, &b), &d), mul(&a, &mul(&b, &d)));
    }

    #[test]
    fn one_is_a_unit(a in signature().prop_flat_map(element)) {
        let one = CliffordElement::one(a.signature());
        prop_assert_eq!(mul(&one, &a), a.clone());
        prop_assert_eq!(mul(&a, &one), a);
    }

    #[test]
    fn grading_is_a_multiplicative_involution(
        (a, b) in signature().prop_flat_map(|s| (element(s), element(s)))
    ) {
        prop_assert_eq!(a.grading_involution().grading_involution(), a.clone());
        prop_assert_eq!(mul(&a, &b).grading_involution(), mul(&a.grading_involution(), &b.grading_involution()));
    }

    #[test]
    fn theta_is_antilinear_multiplicative_and_commutes_with_grading(
        (a, b) in signature().prop_flat_map(|s| (element(s), element(s)))
    ) {
        prop_assert_eq!(mul(&a, &b).real_involution(), mul(&a.real_involution(), &b.real_involution()));
        let i = c(0.0, 1.0);
        prop_assert_eq!(a.scale(i).real_involution(), a.real_involution().scale(-i));
        prop_assert_eq!(a.real_involution().grading_involution(), a.grading_involution().real_involution());
        prop_assert_eq!(a.real_involution().real_involution(), a);
    }
}
