use super::*;
use crate::core::DiagonalForm;
use std::f64::consts::PI;

#[test]
fn c1_closed_form() {
    let expected = 2.0 * (1.0 + std::f64::consts::PI.ln());
    assert!((c_n_constant(1) - expected).abs() < 1e-12);
    assert!((c_n_constant(1) - 4.289_459_771_698_8).abs() < 1e-10);
}

#[test]
fn c2_closed_form() {
    let pi = std::f64::consts::PI;
    let expected = 13.5 * (2.5 + (pi * pi / 2.0).ln());
    assert!((c_n_constant(2) - expected).abs() < 1e-10);
}

#[test]
fn factorials() {
    assert_eq!(factorial(0), 1.0);
    assert_eq!(factorial(4), 24.0);
}

#[test]
fn main_conjecture_equality_at_p1_fs() {
    // h_{2FS}(-K) = 2, complex mass pi, vol 2: lhs = 1 + log pi = rhs
    let r = main_conjecture_check(2.0, PI, 2.0, 1, 1e-9);
    assert!(r.slack.abs() < 1e-12, "slack {}", r.slack);
    assert_eq!(r.verdict, Verdict::Inconclusive); // genuinely at equality
    assert!((r.rhs - (1.0 + PI.ln())).abs() < 1e-12);
}

#[test]
fn main_conjecture_weil_is_satisfied_strictly() {
    let r = main_conjecture_check(0.0, 2.0 * PI, 2.0, 1, 1e-9);
    assert!((r.lhs - (2.0 * PI).ln()).abs() < 1e-12);
    assert_eq!(r.verdict, Verdict::Satisfied);
    assert!(r.slack > 0.3);
}

#[test]
fn main_conjecture_shift_invariance() {
    // shift lambda: h gains lambda*(n+1)!*vol/2, mass gains factor e^{-lambda}
    for n in [1u32, 2, 3] {
        let (h, mu, vol) = (1.3, 2.2, (n as f64) + 1.0);
        let base = main_conjecture_check(h, mu, vol, n, 1e-9);
        let lambda = 0.77;
        let shifted = main_conjecture_check(
            h + lambda * factorial(n + 1) * vol / 2.0,
            mu * (-lambda).exp(),
            vol,
            n,
            1e-9,
        );
        assert!((base.lhs - shifted.lhs).abs() < 1e-12, "n={n}");
    }
}

#[test]
fn diagonal_bound_values() {
    let d1 = DiagonalForm::from_i64(1, 2, &[5, 1, 1, 1]);
    assert!((diagonal_bound_rhs(&d1).unwrap() - c_n_constant(2)).abs() < 1e-12);
    let trivial = DiagonalForm::from_i64(2, 2, &[1, 1, 1, 1]);
    assert!((diagonal_bound_rhs(&trivial).unwrap() - c_n_constant(2)).abs() < 1e-12);
    let skew = DiagonalForm::from_i64(2, 2, &[2, 1, 1, 1]);
    let expect = c_n_constant(2) - 4.0 * 2f64.ln();
    assert!((diagonal_bound_rhs(&skew).unwrap() - expect).abs() < 1e-12);
    // sign of a_0 is irrelevant: the display uses log|a_i|
    let neg = DiagonalForm::from_i64(2, 2, &[-2, 1, 1, 1]);
    assert_eq!(diagonal_bound_rhs(&neg).unwrap(), diagonal_bound_rhs(&skew).unwrap());
}

#[test]
fn diagonal_bound_strict_and_monotone() {
    let mut prev = diagonal_bound_rhs(&DiagonalForm::from_i64(3, 3, &[1, 1, 1, 1, 1])).unwrap();
    assert!((prev - c_n_constant(3)).abs() < 1e-12);
    for a0 in [2i64, 5, 50] {
        let rhs = diagonal_bound_rhs(&DiagonalForm::from_i64(3, 3, &[a0, 1, 1, 1, 1])).unwrap();
        assert!(rhs < prev, "not strictly decreasing at a0={a0}");
        prev = rhs;
    }
}

#[test]
fn non_fano_rejected() {
    let f = DiagonalForm::from_i64(4, 2, &[1, 1, 1, 1]);
    assert_eq!(diagonal_bound_rhs(&f).unwrap_err(), VerdictError::NotFano { d: 4, n: 2 });
}

#[test]
fn min_point_bound_reference_values() {
    let fs = min_point_bound(PI, 2.0, 1);
    assert!((fs - std::f64::consts::E * PI.sqrt()).abs() < 1e-10, "fs bound {fs}");
    let weil = min_point_bound(2.0 * PI, 2.0, 1);
    assert!((weil - std::f64::consts::E * PI / (2.0 * PI).sqrt()).abs() < 1e-10);
    assert!(1.0 <= fs && 1.0 <= weil); // observed min H = 1 on P^1
    // scaling: mass e^{-lambda} multiplies the bound by e^{lambda/2}
    let lambda = 0.9f64;
    let shifted = min_point_bound(PI * (-lambda).exp(), 2.0, 1);
    assert!((shifted - fs * (lambda / 2.0).exp()).abs() < 1e-10);
}

#[test]
fn zhang_sandwich_cases() {
    // P^1 Weil: all successive minima and the height vanish; tight
    let tight = zhang_report(&[0.0, 0.0], 0.0, 0.0).unwrap();
    assert_eq!(tight.slack, 0.0);
    assert_eq!(tight.verdict, Verdict::Satisfied);
    let ok = zhang_report(&[3.0, 0.0], 2.0, 1e-12).unwrap();
    assert_eq!(ok.verdict, Verdict::Satisfied);
    let bad_top = zhang_report(&[1.0, 0.5], 2.0, 1e-12).unwrap();
    assert_eq!(bad_top.verdict, Verdict::Violated);
    let bad_mean = zhang_report(&[4.0, 4.0], 2.0, 1e-12).unwrap();
    assert_eq!(bad_mean.verdict, Verdict::Violated);
    assert_eq!(
        zhang_report(&[1.0, 2.0], 1.5, 0.0).unwrap_err(),
        VerdictError::OrderViolation(1)
    );
}

#[test]
fn zhang_envelope_upper_bound_on_p1() {
    // combining the sandwich with the real-mass theorem: h_hat <= log(2pi/mu_R);
    // at the Weil metric mu_R = 4 and h_hat = 0 <= log(pi/2)
    let bound = (2.0 * PI / 4.0).ln();
    let r = zhang_report(&[bound, -bound], 0.0, 0.0).unwrap();
    assert_eq!(r.verdict, Verdict::Satisfied);
    assert!(bound > 0.0);
}

#[test]
fn peyre_assembly_shapes() {
    // F = Q: one real place
    let q = peyre_assemble(0.5, 7.0, 3.0, (1, 0, 1)).unwrap();
    assert!((q.theta - 1.5).abs() < 1e-15);
    // F = Q(i): one complex place, m_C = 2
    let qi = peyre_assemble(0.5, 9.0, 3.0, (0, 2, 2)).unwrap();
    assert!((qi.theta - 0.5 * 9f64.sqrt()).abs() < 1e-12);
    assert_eq!(
        peyre_assemble(1.0, 1.0, 1.0, (1, 2, 2)).unwrap_err(),
        VerdictError::FieldShapeInvalid { m_r: 1, m_c: 2, degree: 2 }
    );
}

#[test]
fn peyre_scaling_law() {
    // masses scale as e^{-lambda} (complex) and e^{-lambda/2} (real); theta
    // then scales by e^{-lambda/2} for any field shape
    let lambda = 1.1f64;
    for shape in [(1u32, 0u32, 1u32), (0, 2, 2), (2, 2, 4)] {
        let base = peyre_assemble(0.8, 5.0, 2.0, shape).unwrap().theta;
        let shifted = peyre_assemble(
            0.8,
            5.0 * (-lambda).exp(),
            2.0 * (-lambda / 2.0).exp(),
            shape,
        )
        .unwrap()
        .theta;
        assert!((shifted - base * (-lambda / 2.0).exp()).abs() < 1e-12, "{shape:?}");
    }
}

#[test]
fn ej_product_for_p1_weil() {
    // eta = 1/zeta(2) from the projective-line Euler product, mu_R = 4
    let eta: f64 = crate::localdens::primes_up_to(2000)
        .iter()
        .map(|&p| 1.0 - 1.0 / (p as f64 * p as f64))
        .product();
    let theta = peyre_assemble(eta, 2.0 * PI, 4.0, (1, 0, 1)).unwrap().theta;
    let product = ej_product(1.0, theta);
    let expect = 6.0 / (PI * PI) * 4.0;
    assert!((product - expect).abs() < 0.01, "product {product} expect {expect}");
}

#[test]
fn xa_study_table() {
    let study = xa_study(4, 3, &[3, 33], 30, 6).unwrap();
    assert_eq!(study.rows.len(), 2);
    let r3 = &study.rows[0];
    assert_eq!(r3.h_min, Some(1.0));
    // bad primes of d*a = 12: 2 and 3; closed form
    // mu_3 = 3^{-2}*(3+1)^2 = 16/9, and every bad factor is capped by 4
    let mu3 = r3.bad_primes.iter().find(|(p, _)| *p == 3).unwrap().1;
    assert!((mu3 - 16.0 / 9.0).abs() < 1e-12, "mu3 {mu3}");
    assert!(r3.bad_primes.iter().all(|&(_, mu)| mu <= 4.0 + 1e-12));
    assert!(r3.cap_product >= r3.bad_product);
    let r33 = &study.rows[1];
    assert_eq!(r33.h_min, Some(2.0));
    let mu11 = r33.bad_primes.iter().find(|(p, _)| *p == 11).unwrap().1;
    assert!((mu11 - 144.0 / 121.0).abs() < 1e-12, "mu11 {mu11}");
    // growth trends
    assert!(study.min_h_exponent.unwrap() >= 0.25 - 0.1);
    assert!(study.good_products_bounded());
}

impl XaStudy {
    fn good_products_bounded(&self) -> bool {
        self.rows.iter().all(|r| r.good_partial_product.is_finite() && r.good_partial_product > 0.0)
    }
}
