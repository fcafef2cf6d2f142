use super::*;
use num::bigint::BigInt;
use proptest::prelude::*;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[test]
fn normalize_divides_by_gcd() {
    let p = normalize_point(&[rat(2, 1), rat(4, 1), rat(6, 1)]).unwrap();
    assert_eq!(p, RationalPoint::from_i64(&[1, 2, 3]).unwrap());
}

#[test]
fn normalize_clears_denominators() {
    let p = normalize_point(&[rat(1, 1), rat(1, 2)]).unwrap();
    assert_eq!(p, RationalPoint::from_i64(&[2, 1]).unwrap());
}

#[test]
fn normalize_fixes_sign() {
    let p = normalize_point(&[rat(0, 1), rat(-5, 1)]).unwrap();
    assert_eq!(p, RationalPoint::from_i64(&[0, 1]).unwrap());
}

#[test]
fn normalize_rejects_zero() {
    assert_eq!(normalize_point(&[rat(0, 1), rat(0, 1)]), Err(CoreError::AllZero));
}

#[test]
fn gaussian_already_primitive() {
    // 3 is inert in Z[i], so gcd(1+i, 3) = 1 and the tuple is untouched.
    let p = GaussianPoint::from_gaussian_integers(&[GaussInt::new(1, 1), GaussInt::new(3, 0)])
        .unwrap();
    assert_eq!(p.coords(), &[GaussInt::new(1, 1), GaussInt::new(3, 0)]);
}

#[test]
fn gaussian_ramified_gcd() {
    // 2 = (1+i)(1-i) ramifies, so (1+i, 2) is not primitive: it reduces to (1, 1-i).
    let p = GaussianPoint::from_gaussian_integers(&[GaussInt::new(1, 1), GaussInt::new(2, 0)])
        .unwrap();
    assert_eq!(p.coords(), &[GaussInt::new(1, 0), GaussInt::new(1, -1)]);
}

#[test]
fn gaussian_gcd_and_unit() {
    // (2i, 2) / 2i = (1, -i); unit-normalization keeps the lead canonical.
    let p = GaussianPoint::from_gaussian_integers(&[GaussInt::new(0, 2), GaussInt::new(2, 0)])
        .unwrap();
    assert_eq!(p.coords(), &[GaussInt::new(1, 0), GaussInt::new(0, -1)]);
}

#[test]
fn gaussian_unit_brute_force() {
    // Cross-check the canonical representative against all four unit rotations
    // of the gcd-reduced tuple.
    let raws = [
        vec![GaussInt::new(0, 2), GaussInt::new(2, 0)],
        vec![GaussInt::new(-1, -1), GaussInt::new(0, 3)],
        vec![GaussInt::new(0, 0), GaussInt::new(0, -7)],
    ];
    for raw in &raws {
        let p = GaussianPoint::from_gaussian_integers(raw).unwrap();
        let lead = p.coords().iter().find(|c| !c.is_zero()).unwrap();
        assert!(lead.re.is_positive() && !lead.im.is_negative());
        let mut canonical_count = 0;
        for u in [GaussInt::one(), GaussInt::i(), GaussInt::one().neg(), GaussInt::i().neg()] {
            let rotated: Vec<GaussInt> = p.coords().iter().map(|c| c.mul(&u)).collect();
            let l = rotated.iter().find(|c| !c.is_zero()).unwrap();
            if l.re.is_positive() && !l.im.is_negative() {
                canonical_count += 1;
                assert_eq!(&rotated, p.coords());
            }
        }
        assert_eq!(canonical_count, 1);
    }
}

#[test]
fn gaussian_rejects_zero() {
    assert_eq!(
        GaussianPoint::from_gaussian_integers(&[GaussInt::zero(), GaussInt::zero()]),
        Err(CoreError::AllZero)
    );
}

fn pythagorean_conic() -> HomogeneousForm {
    HomogeneousForm::from_i64_terms(
        2,
        3,
        &[(&[2, 0, 0], 1), (&[0, 2, 0], 1), (&[0, 0, 2], -1)],
    )
}

#[test]
fn eval_form_conic() {
    let f = pythagorean_conic();
    let at = |x: &[i64]| {
        let v: Vec<BigInt> = x.iter().map(|&i| BigInt::from(i)).collect();
        eval_form(&f, &v).unwrap()
    };
    assert_eq!(at(&[3, 4, 5]), BigInt::from(0));
    assert_eq!(at(&[1, 1, 1]), BigInt::from(1));
}

#[test]
fn eval_form_diagonal() {
    let f = DiagonalForm::from_i64(4, 3, &[-2, 1, 1, 1, 1]).to_homogeneous();
    let v: Vec<BigInt> = [1i64, 1, 1, 0, 0].iter().map(|&i| BigInt::from(i)).collect();
    assert_eq!(eval_form(&f, &v).unwrap(), BigInt::from(0));
}

#[test]
fn eval_form_dimension_mismatch() {
    let f = pythagorean_conic();
    let v = vec![BigInt::from(1), BigInt::from(2)];
    assert!(matches!(eval_form(&f, &v), Err(CoreError::DimensionMismatch { .. })));
}

#[test]
fn diagonal_predicates() {
    let f = DiagonalForm::from_i64(4, 3, &[-3, 1, 1, 1, 1]);
    assert!(f.is_fano());
    assert_eq!(f.k_ac(), 1);
    let cubic = DiagonalForm::from_i64(3, 1, &[1, 1, 1]);
    assert!(!cubic.is_fano());
    assert_eq!(
        f.to_homogeneous().diagonal_coefficients().unwrap()[0],
        BigInt::from(-3)
    );
    assert!(pythagorean_conic().diagonal_coefficients().is_some());
}

#[test]
fn lp_norm_examples() {
    assert_eq!(lp_norm(&[1.0, 1.0], f64::INFINITY), 1.0);
    assert!((lp_norm(&[1.0, 1.0], 2.0) - 2f64.sqrt()).abs() < 1e-15);
    assert!((lp_norm(&[3.0, 4.0], 2.0) - 5.0).abs() < 1e-12);
}

#[test]
fn form_json_shape() {
    let f = pythagorean_conic();
    let j = serde_json::to_value(&f).unwrap();
    assert_eq!(j["degree"], 2);
    assert_eq!(j["nvars"], 3);
    let back: HomogeneousForm = serde_json::from_value(j).unwrap();
    assert_eq!(back, f);
}

proptest! {
    #[test]
    fn normalize_idempotent_and_scale_invariant(
        xs in prop::collection::vec(-50i64..50, 2..5),
        num in 1i64..20,
        den in 1i64..20,
    ) {
        prop_assume!(xs.iter().any(|&x| x != 0));
        let raw: Vec<BigRational> = xs.iter().map(|&x| rat(x, 1)).collect();
        let scaled: Vec<BigRational> = raw.iter().map(|x| x * rat(num, den)).collect();
        let p1 = normalize_point(&raw).unwrap();
        let p2 = normalize_point(&scaled).unwrap();
        prop_assert_eq!(&p1, &p2);
        let again: Vec<BigRational> =
            p1.coords().iter().map(|c| BigRational::from(c.clone())).collect();
        prop_assert_eq!(normalize_point(&again).unwrap(), p1);
    }

    #[test]
    fn eval_form_homogeneity(x0 in -9i64..9, x1 in -9i64..9, x2 in -9i64..9, lam in -5i64..5) {
        let f = pythagorean_conic();
        let x: Vec<BigInt> = [x0, x1, x2].iter().map(|&i| BigInt::from(i)).collect();
        let lx: Vec<BigInt> = x.iter().map(|v| v * BigInt::from(lam)).collect();
        let lhs = eval_form(&f, &lx).unwrap();
        let rhs = BigInt::from(lam).pow(2) * eval_form(&f, &x).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn lp_norm_monotone_in_p(xs in prop::collection::vec(0.01f64..10.0, 1..5), p in 1.0f64..6.0, q in 0.0f64..6.0) {
        let q = p + q;
        let np = lp_norm(&xs, p);
        let nq = lp_norm(&xs, q);
        prop_assert!(np >= nq - 1e-9 * np.max(1.0));
        prop_assert!(lp_norm(&xs, f64::INFINITY) <= nq + 1e-12);
    }
}
