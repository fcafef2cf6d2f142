use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Signed, Zero};
use serde::{Deserialize, Serialize};

/// Gaussian integer with arbitrary-precision components.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GaussInt {
    pub re: BigInt,
    pub im: BigInt,
}

impl GaussInt {
    pub fn new(re: impl Into<BigInt>, im: impl Into<BigInt>) -> Self {
        GaussInt { re: re.into(), im: im.into() }
    }

    pub fn zero() -> Self {
        GaussInt::new(0, 0)
    }

    pub fn one() -> Self {
        GaussInt::new(1, 0)
    }

    pub fn i() -> Self {
        GaussInt::new(0, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        GaussInt { re: self.re.clone(), im: -&self.im }
    }

    pub fn neg(&self) -> Self {
        GaussInt { re: -&self.re, im: -&self.im }
    }

    /// Field norm re^2 + im^2.
    pub fn norm(&self) -> BigInt {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn add(&self, rhs: &Self) -> Self {
        GaussInt { re: &self.re + &rhs.re, im: &self.im + &rhs.im }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        GaussInt { re: &self.re - &rhs.re, im: &self.im - &rhs.im }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        GaussInt {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }

    pub fn mul_int(&self, k: &BigInt) -> Self {
        GaussInt { re: &self.re * k, im: &self.im * k }
    }

    /// Nearest-Gaussian-integer quotient; the remainder has norm strictly
    /// smaller than the divisor's, which makes the Euclidean gcd terminate.
    pub fn div_round(&self, rhs: &Self) -> Self {
        let n = rhs.norm();
        let num = self.mul(&rhs.conj());
        GaussInt {
            re: round_div(&num.re, &n),
            im: round_div(&num.im, &n),
        }
    }

    pub fn rem(&self, rhs: &Self) -> Self {
        self.sub(&rhs.mul(&self.div_round(rhs)))
    }

    /// Exact division; panics if rhs does not divide self.
    pub fn div_exact(&self, rhs: &Self) -> Self {
        let q = self.div_round(rhs);
        debug_assert!(self.sub(&rhs.mul(&q)).is_zero(), "non-exact Gaussian division");
        q
    }

    /// Euclidean gcd, defined up to a unit.
    pub fn gcd(&self, rhs: &Self) -> Self {
        let mut a = self.clone();
        let mut b = rhs.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a
    }

    /// The unique unit u in {1, i, -1, -i} such that u * self has re > 0 and
    /// im >= 0. Requires self nonzero.
    pub fn canonicalizing_unit(&self) -> Self {
        assert!(!self.is_zero());
        for u in [GaussInt::one(), GaussInt::i(), GaussInt::one().neg(), GaussInt::i().neg()] {
            let z = u.mul(self);
            if z.re.is_positive() && !z.im.is_negative() {
                return u;
            }
        }
        unreachable!("one rotation is always canonical")
    }

    pub fn modulus(&self) -> f64 {
        let r = BigRational::from(self.norm());
        rational_to_f64(&r).sqrt()
    }
}

pub(crate) fn rational_to_f64(r: &BigRational) -> f64 {
    use num::ToPrimitive;
    r.to_f64().expect("rational within f64 range")
}

/// Round a/b to the nearest integer, ties away from zero.
fn round_div(a: &BigInt, b: &BigInt) -> BigInt {
    BigRational::new(a.clone(), b.clone()).round().to_integer()
}
