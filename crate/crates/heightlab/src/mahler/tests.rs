use super::*;
use crate::core::{DiagonalForm, HomogeneousForm};
use num::bigint::BigInt;
use num::Zero;
use std::collections::BTreeMap;

fn form(degree: u32, nvars: usize, terms: &[(&[u32], i64)]) -> HomogeneousForm {
    HomogeneousForm::from_i64_terms(degree, nvars, terms)
}

fn measure(f: &HomogeneousForm, res: usize) -> MahlerReport {
    mahler_measure(f, MahlerMethod::Quadrature, res).unwrap()
}

fn mul_forms(f: &HomogeneousForm, g: &HomogeneousForm) -> HomogeneousForm {
    assert_eq!(f.nvars, g.nvars);
    let mut out: BTreeMap<Vec<u32>, BigInt> = BTreeMap::new();
    for (ea, ca) in &f.terms {
        for (eb, cb) in &g.terms {
            let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            *out.entry(e).or_insert_with(BigInt::zero) += ca * cb;
        }
    }
    HomogeneousForm {
        degree: f.degree + g.degree,
        nvars: f.nvars,
        terms: out.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
    }
}

#[test]
fn monomial_measure_zero() {
    let f = form(1, 1, &[(&[1], 1)]);
    let r = measure(&f, 64);
    assert_eq!(r.m, 0.0);
    assert_eq!(r.coeff_gap, 0.0);
}

#[test]
fn binary_sum_is_zero() {
    let f = form(1, 2, &[(&[1, 0], 1), (&[0, 1], 1)]);
    let r = measure(&f, 512);
    assert!(r.m.abs() < 1e-12, "m={}", r.m);
}

#[test]
fn scaled_binary_is_log_a() {
    for a in [1i64, 2, 7, 100] {
        let f = form(1, 2, &[(&[1, 0], a), (&[0, 1], 1)]);
        let r = measure(&f, 256);
        assert!((r.m - (a as f64).ln()).abs() < 1e-10, "a={a} m={}", r.m);
    }
}

#[test]
fn root_inside_circle() {
    // m(x0 + 3 x1) = log 3: the slice root has modulus 1/3 < 1
    let f = form(1, 2, &[(&[1, 0], 1), (&[0, 1], 3)]);
    let r = measure(&f, 256);
    assert!((r.m - 3f64.ln()).abs() < 1e-10);
}

#[test]
fn smyth_ternary_constant() {
    let f = form(1, 3, &[(&[1, 0, 0], 1), (&[0, 1, 0], 1), (&[0, 0, 1], 1)]);
    let r = measure(&f, 512);
    assert!((r.m - 0.323_065_947_2).abs() < 5e-4, "m={}", r.m);
    assert!(r.est_error < 5e-3);
}

#[test]
fn qmc_agrees_with_quadrature() {
    let f = form(1, 3, &[(&[1, 0, 0], 1), (&[0, 1, 0], 1), (&[0, 0, 1], 1)]);
    let q = measure(&f, 512);
    let mc = mahler_measure(&f, MahlerMethod::Qmc, 40_000).unwrap();
    assert!((q.m - mc.m).abs() < 5.0 * mc.est_error.max(1e-3), "q={} mc={}", q.m, mc.m);
}

#[test]
fn variable_permutation_invariance() {
    let f = form(1, 3, &[(&[1, 0, 0], 1), (&[0, 1, 0], 2), (&[0, 0, 1], 3)]);
    let g = form(1, 3, &[(&[1, 0, 0], 3), (&[0, 1, 0], 1), (&[0, 0, 1], 2)]);
    let (rf, rg) = (measure(&f, 512), measure(&g, 512));
    assert!((rf.m - rg.m).abs() < 2e-3, "f={} g={}", rf.m, rg.m);
}

#[test]
fn multiplicativity() {
    let f = form(1, 2, &[(&[1, 0], 2), (&[0, 1], 1)]);
    let g = form(1, 2, &[(&[1, 0], 1), (&[0, 1], -3)]);
    let fg = mul_forms(&f, &g);
    let (a, b, c) = (measure(&f, 512).m, measure(&g, 512).m, measure(&fg, 512).m);
    assert!((c - a - b).abs() < 1e-9, "m(fg)={c} m(f)+m(g)={}", a + b);
}

#[test]
fn monomial_scaling_exact() {
    let f = form(2, 3, &[(&[2, 0, 0], 1), (&[0, 1, 1], 2), (&[0, 0, 2], -1)]);
    let scaled = HomogeneousForm {
        degree: f.degree,
        nvars: f.nvars,
        terms: f.terms.iter().map(|(e, c)| (e.clone(), c * 5)).collect(),
    };
    let (a, b) = (measure(&f, 128).m, measure(&scaled, 128).m);
    assert!((b - a - 5f64.ln()).abs() < 1e-10);
}

#[test]
fn fermat_cubic_gap_stable() {
    let f = DiagonalForm::from_i64(3, 2, &[1, 1, 1, 1]).to_homogeneous();
    let r32 = measure(&f, 32);
    let r64 = measure(&f, 64);
    assert!(r64.m.is_finite());
    assert!((r64.m - r32.m).abs() < 0.05, "m32={} m64={}", r32.m, r64.m);
    assert!(r64.coeff_gap < 2.0);
}

#[test]
fn weil_height_equals_measure() {
    let f = form(1, 2, &[(&[1, 0], 4), (&[0, 1], 1)]);
    let h = hypersurface_weil_height(&f).unwrap();
    assert!((h - 4f64.ln()).abs() < 1e-10);
    assert!(mahler_gap(&f).unwrap() < 1e-10);
}

#[test]
fn xa_height_grows_like_log_a() {
    // slope of m(X_a) against log a tends to 1
    let mut prev: Option<f64> = None;
    for a in [8i64, 64, 512] {
        let f = DiagonalForm::from_i64(4, 3, &[-a, 1, 1, 1, 1]).to_homogeneous();
        let m = measure(&f, 16).m;
        if let Some(p) = prev {
            let slope = (m - p) / (8f64).ln();
            assert!((slope - 1.0).abs() < 0.2, "a={a} slope={slope}");
        }
        prev = Some(m);
    }
}

#[test]
fn zero_form_rejected() {
    let f = HomogeneousForm { degree: 1, nvars: 2, terms: vec![] };
    assert_eq!(
        mahler_measure(&f, MahlerMethod::Quadrature, 16).unwrap_err(),
        MahlerError::ZeroForm
    );
}
