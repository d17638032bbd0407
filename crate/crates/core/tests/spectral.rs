use kr_core::linalg::{frobenius, CMat};
use kr_core::spectral::{
    configuration_distance, distance_to_infinity, ConfigJson, Point, SpectralConfiguration,
};
use nalgebra::DVector;
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::FRAC_PI_2;

fn diag(values: &[f64]) -> CMat {
    CMat::from_diagonal(&DVector::from_iterator(values.len(), values.iter().map(|&v| Complex64::new(v, 0.0))))
}

fn basis(n: usize, cols: &[usize]) -> CMat {
    CMat::from_fn(n, cols.len(), |r, c| if r == cols[c] { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) })
}

fn hermitian(n: usize, entries: &[(f64, f64)]) -> CMat {
    let a = CMat::from_fn(n, n, |r, c| {
        let (re, im) = entries[r * n + c];
        Complex64::new(re, im)
    });
    (&a + a.adjoint()) * Complex64::new(0.5, 0.0)
}

#[test]
fn base_point_assembles_to_zero() {
    let c = SpectralConfiguration::base_point(5);
    assert_eq!(c.assemble(), CMat::zeros(5, 5));
    assert!(c.is_base_point());
}

#[test]
fn single_point_assembles_to_a_multiple_of_its_projection() {
    let frame = basis(3, &[1]);
    let c = SpectralConfiguration::new(3, vec![Point { lambda: 2.0, frame: frame.clone() }]).unwrap();
    assert_eq!(frobenius(&(c.assemble() - (&frame * frame.adjoint()) * Complex64::new(2.0, 0.0))), 0.0);
}

#[test]
fn zero_matrix_on_a_domain() {
    let d = basis(4, &[0, 2]);
    let c = SpectralConfiguration::decompose(&CMat::zeros(4, 4), Some(&(&d * d.adjoint()))).unwrap();
    assert_eq!(c.eigenvalues(), vec![0.0]);
    assert_eq!(c.points()[0].rank(), 2);
}

#[test]
fn diagonal_decomposition() {
    let c = SpectralConfiguration::decompose(&diag(&[3.0, 3.0, -1.0]), None).unwrap();
    assert_eq!(c.eigenvalues(), vec![-1.0, 3.0]);
    let minus = &c.points()[0];
    let plus = &c.points()[1];
    assert_eq!(minus.rank(), 1);
    assert_eq!(plus.rank(), 2);
    assert!(frobenius(&(plus.projection() - diag(&[1.0, 1.0, 0.0]))) < 1e-14);
}

#[test]
fn non_hermitian_input_is_rejected() {
    let mut m = diag(&[1.0, 2.0]);
    m[(0, 1)] = Complex64::new(1.0, 0.0);
    assert!(SpectralConfiguration::decompose(&m, None).is_err());
}

#[test]
fn overlapping_points_are_rejected() {
    let f = basis(2, &[0]);
    let g = CMat::from_fn(2, 1, |_, _| Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0));
    let bad = SpectralConfiguration::new(2, vec![Point { lambda: 1.0, frame: f }, Point { lambda: 2.0, frame: g }]);
    assert!(bad.is_err());
}

#[test]
fn squaring_merges_plus_and_minus() {
    let c = SpectralConfiguration::decompose(&diag(&[1.0, -1.0]), None).unwrap();
    let sq = c.functional_calculus(|t| t * t);
    assert_eq!(sq.eigenvalues(), vec![1.0]);
    assert_eq!(sq.points()[0].rank(), 2);
}

#[test]
fn infinite_values_delete_points() {
    let c = SpectralConfiguration::decompose(&diag(&[0.5, -3.0, 4.0, 1.0]), None).unwrap();
    let r = 2.0;
    let cut = c.functional_calculus(|t| if t.abs() > r { f64::INFINITY } else { t });
    assert_eq!(cut.eigenvalues(), vec![0.5, 1.0]);
    assert_eq!(cut.rank(), 2);
    assert_eq!(c.functional_calculus(|t| t), c);
}

#[test]
fn distance_examples() {
    let c = SpectralConfiguration::decompose(&diag(&[0.5, -3.0, 4.0]), None).unwrap();
    assert_eq!(configuration_distance(&c, &c).unwrap(), 0.0);
    let base = SpectralConfiguration::base_point(1);
    for lambda in [1.0, 10.0, 1e3, 1e6] {
        let one = SpectralConfiguration::decompose(&diag(&[lambda]), None).unwrap();
        let d = configuration_distance(&base, &one).unwrap();
        assert!((d - distance_to_infinity(lambda)).abs() < 1e-15);
    }
    let far = SpectralConfiguration::decompose(&diag(&[1e9]), None).unwrap();
    assert!(configuration_distance(&base, &far).unwrap() < 1e-8);
    assert!((distance_to_infinity(0.0) - FRAC_PI_2).abs() < 1e-15);
    let other = SpectralConfiguration::base_point(2);
    assert!(configuration_distance(&base, &other).is_err());
}

#[test]
fn distance_is_continuous_along_scaling() {
    let c = SpectralConfiguration::decompose(&diag(&[0.5, -2.0, 3.0]), None).unwrap();
    let mut last = f64::INFINITY;
    for k in 1..=5 {
        let h = 0.1 / f64::powi(2.0, k);
        let d = configuration_distance(&c, &c.functional_calculus(|t| t * (1.0 + h))).unwrap();
        assert!(d < last);
        assert!(d <= 3.0 * h);
        last = d;
    }
}

#[test]
fn json_round_trip() {
    let c = SpectralConfiguration::decompose(&diag(&[2.0, 2.0, -1.0, 0.0]), None).unwrap();
    let text = serde_json::to_string(&c.to_json(None)).unwrap();
    let back = SpectralConfiguration::from_json(&serde_json::from_str::<ConfigJson>(&text).unwrap()).unwrap();
    assert_eq!(configuration_distance(&c, &back).unwrap(), 0.0);
    // projections alone are enough to rebuild the frames
    let mut json = c.to_json(None);
    for p in &mut json.points {
        p.frame = None;
    }
    let back = SpectralConfiguration::from_json(&json).unwrap();
    assert!(configuration_distance(&c, &back).unwrap() < 1e-12);
    assert!(serde_json::from_str::<ConfigJson>("{\"points\": 3}").is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn decompose_then_assemble(entries in prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 64)) {
        let m = hermitian(8, &entries);
        let c = SpectralConfiguration::decompose(&m, None).unwrap();
        prop_assert!(frobenius(&(c.assemble() - &m)) < 1e-9);
        prop_assert!(c.validate().is_ok());
        let again = SpectralConfiguration::decompose(&c.assemble(), None).unwrap();
        prop_assert!(configuration_distance(&c, &again).unwrap() < 1e-9);
    }

    #[test]
    fn distance_is_a_symmetric_metric(
        a in prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 16),
        b in prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 16),
        d in prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 16),
    ) {
        let [x, y, z] = [&a, &b, &d].map(|e| SpectralConfiguration::decompose(&hermitian(4, e), None).unwrap());
        let xy = configuration_distance(&x, &y).unwrap();
        prop_assert!((xy - configuration_distance(&y, &x).unwrap()).abs() < 1e-12);
        prop_assert!(configuration_distance(&x, &x).unwrap() < 1e-12);
        let via = configuration_distance(&x, &z).unwrap() + configuration_distance(&z, &y).unwrap();
        prop_assert!(xy <= via + 1e-9);
    }
}
