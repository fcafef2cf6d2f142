//! Exact arithmetic foundation: primitive projective coordinates over Z and
//! Z[i], homogeneous forms, and the metric specifications shared by the
//! numerical modules.
//!
//! All point and form arithmetic here is exact (arbitrary-precision
//! integers); floating point enters only through norms.

mod gaussian;

pub use gaussian::GaussInt;
pub(crate) use gaussian::rational_to_f64;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Integer, One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CoreError {
    #[error("all coordinates are zero")]
    AllZero,
    #[error("dimension mismatch: form has {expected} variables, point has {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid form: {0}")]
    InvalidForm(String),
}

/// A point of `P^m(Q)` in its unique primitive integer representation:
/// coordinates coprime, first nonzero coordinate positive.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalPoint {
    coords: Vec<BigInt>,
}

impl RationalPoint {
    pub fn coords(&self) -> &[BigInt] {
        &self.coords
    }

    pub fn ambient_dim(&self) -> usize {
        self.coords.len() - 1
    }

    /// Primitive representative from integer coordinates (no denominators to
    /// clear). Fails on the zero tuple.
    pub fn from_integers(raw: &[BigInt]) -> Result<Self, CoreError> {
        let rats: Vec<BigRational> = raw.iter().map(|x| BigRational::from(x.clone())).collect();
        normalize_point(&rats)
    }

    pub fn from_i64(raw: &[i64]) -> Result<Self, CoreError> {
        let ints: Vec<BigInt> = raw.iter().map(|&x| BigInt::from(x)).collect();
        Self::from_integers(&ints)
    }
}

/// A point of `P^m(Q(i))` with Gaussian-integer coordinates whose gcd is a
/// unit, the first nonzero coordinate lying in the canonical unit class
/// (`re > 0, im >= 0`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GaussianPoint {
    coords: Vec<GaussInt>,
}

impl GaussianPoint {
    pub fn coords(&self) -> &[GaussInt] {
        &self.coords
    }

    pub fn ambient_dim(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn from_gaussian_integers(raw: &[GaussInt]) -> Result<Self, CoreError> {
        normalize_gaussian_integers(raw)
    }
}

/// Clears denominators, divides by the gcd and fixes the sign so the first
/// nonzero coordinate is positive. Idempotent and invariant under scaling by
/// any nonzero rational.
pub fn normalize_point(raw: &[BigRational]) -> Result<RationalPoint, CoreError> {
    if raw.iter().all(|x| x.is_zero()) {
        return Err(CoreError::AllZero);
    }
    let mut denom_lcm = BigInt::one();
    for x in raw {
        denom_lcm = denom_lcm.lcm(x.denom());
    }
    let mut ints: Vec<BigInt> = raw
        .iter()
        .map(|x| x.numer() * (&denom_lcm / x.denom()))
        .collect();
    let mut g = BigInt::zero();
    for x in &ints {
        g = g.gcd(x);
    }
    for x in &mut ints {
        *x = &*x / &g;
    }
    let flip = ints
        .iter()
        .find(|x| !x.is_zero())
        .map(|x| x.is_negative())
        .unwrap_or(false);
    if flip {
        for x in &mut ints {
            *x = -&*x;
        }
    }
    Ok(RationalPoint { coords: ints })
}

/// Gaussian-rational input as pairs (numerator GaussInt, integer denominator).
pub fn normalize_gaussian(raw: &[(GaussInt, BigInt)]) -> Result<GaussianPoint, CoreError> {
    if raw.iter().any(|(_, d)| d.is_zero()) {
        return Err(CoreError::InvalidForm("zero denominator".into()));
    }
    let mut denom_lcm = BigInt::one();
    for (_, d) in raw {
        denom_lcm = denom_lcm.lcm(d);
    }
    let ints: Vec<GaussInt> = raw
        .iter()
        .map(|(n, d)| n.mul_int(&(&denom_lcm / d)))
        .collect();
    normalize_gaussian_integers(&ints)
}

fn normalize_gaussian_integers(raw: &[GaussInt]) -> Result<GaussianPoint, CoreError> {
    if raw.iter().all(|x| x.is_zero()) {
        return Err(CoreError::AllZero);
    }
    let mut g = GaussInt::zero();
    for x in raw {
        g = g.gcd(x);
    }
    let mut coords: Vec<GaussInt> = raw.iter().map(|x| x.div_exact(&g)).collect();
    // Rotate by the unique unit putting the first nonzero coordinate into the
    // canonical class re > 0, im >= 0.
    let lead = coords.iter().find(|x| !x.is_zero()).unwrap().clone();
    let unit = lead.canonicalizing_unit();
    for x in &mut coords {
        *x = x.mul(&unit);
    }
    Ok(GaussianPoint { coords })
}

/// Integer homogeneous form of degree `d` in `n_vars` variables, stored as a
/// sparse list of `(exponent vector, coefficient)` terms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomogeneousForm {
    pub degree: u32,
    pub nvars: usize,
    pub terms: Vec<(Vec<u32>, BigInt)>,
}

impl HomogeneousForm {
    pub fn new(degree: u32, nvars: usize, terms: Vec<(Vec<u32>, BigInt)>) -> Result<Self, CoreError> {
        let f = HomogeneousForm { degree, nvars, terms };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<(), CoreError> {
        if self.terms.iter().all(|(_, c)| c.is_zero()) {
            return Err(CoreError::InvalidForm("no nonzero coefficient".into()));
        }
        let mut seen: Vec<&Vec<u32>> = Vec::new();
        for (exps, _) in &self.terms {
            if exps.len() != self.nvars {
                return Err(CoreError::InvalidForm(format!(
                    "exponent vector length {} != nvars {}",
                    exps.len(),
                    self.nvars
                )));
            }
            if exps.iter().sum::<u32>() != self.degree {
                return Err(CoreError::InvalidForm(format!(
                    "exponent vector {exps:?} does not sum to degree {}",
                    self.degree
                )));
            }
            if seen.contains(&exps) {
                return Err(CoreError::InvalidForm(format!(
                    "duplicate exponent vector {exps:?}"
                )));
            }
            seen.push(exps);
        }
        Ok(())
    }

    /// Convenience constructor for terms with i64 coefficients.
    pub fn from_i64_terms(degree: u32, nvars: usize, terms: &[(&[u32], i64)]) -> Self {
        let terms = terms
            .iter()
            .map(|(e, c)| (e.to_vec(), BigInt::from(*c)))
            .collect();
        Self::new(degree, nvars, terms).expect("valid form")
    }

    /// Each term involves a single variable, i.e. the form is diagonal up to
    /// variable order. Returns per-variable coefficients when so.
    pub fn diagonal_coefficients(&self) -> Option<Vec<BigInt>> {
        let mut coeffs = vec![BigInt::zero(); self.nvars];
        for (exps, c) in &self.terms {
            let mut idx = None;
            for (i, &e) in exps.iter().enumerate() {
                if e != 0 {
                    if idx.is_some() {
                        return None;
                    }
                    idx = Some(i);
                }
            }
            match idx {
                Some(i) => coeffs[i] = c.clone(),
                // degree-0 term cannot occur in a homogeneous form of degree >= 1
                None => return None,
            }
        }
        Some(coeffs)
    }
}

/// Diagonal hypersurface data: `sum_i a_i x_i^d` in `P^{n+1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagonalForm {
    pub d: u32,
    pub n: usize,
    pub a: Vec<BigInt>,
}

impl DiagonalForm {
    pub fn new(d: u32, n: usize, a: Vec<BigInt>) -> Result<Self, CoreError> {
        if a.len() != n + 2 {
            return Err(CoreError::InvalidForm(format!(
                "expected {} coefficients, got {}",
                n + 2,
                a.len()
            )));
        }
        if a.iter().any(|c| c.is_zero()) {
            return Err(CoreError::InvalidForm("zero diagonal coefficient".into()));
        }
        Ok(DiagonalForm { d, n, a })
    }

    pub fn from_i64(d: u32, n: usize, a: &[i64]) -> Self {
        Self::new(d, n, a.iter().map(|&x| BigInt::from(x)).collect()).expect("valid diagonal form")
    }

    /// Fano exactly when d <= n+1.
    pub fn is_fano(&self) -> bool {
        self.d as usize <= self.n + 1
    }

    /// Anticanonical twist n+2-d from adjunction.
    pub fn k_ac(&self) -> i64 {
        self.n as i64 + 2 - self.d as i64
    }

    pub fn to_homogeneous(&self) -> HomogeneousForm {
        let nvars = self.n + 2;
        let terms = self
            .a
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let mut e = vec![0u32; nvars];
                e[i] = self.d;
                (e, c.clone())
            })
            .collect();
        HomogeneousForm::new(self.d, nvars, terms).expect("diagonal form is valid")
    }
}

/// Exact evaluation of a homogeneous form at an integer tuple.
pub fn eval_form(f: &HomogeneousForm, x: &[BigInt]) -> Result<BigInt, CoreError> {
    if x.len() != f.nvars {
        return Err(CoreError::DimensionMismatch {
            expected: f.nvars,
            got: x.len(),
        });
    }
    let mut acc = BigInt::zero();
    for (exps, c) in &f.terms {
        let mut t = c.clone();
        for (xi, &e) in x.iter().zip(exps) {
            if e > 0 {
                t *= xi.pow(e);
            }
        }
        acc += t;
    }
    Ok(acc)
}

/// Ambient L^p norm selector. `Weil` is the sup norm, `FubiniStudy` the
/// Euclidean one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum LpExponent {
    Weil,
    FubiniStudy,
    General(f64),
}

impl LpExponent {
    pub fn p(&self) -> f64 {
        match self {
            LpExponent::Weil => f64::INFINITY,
            LpExponent::FubiniStudy => 2.0,
            LpExponent::General(p) => *p,
        }
    }
}

/// Truncated Fourier series `a0 + sum_k a_k cos k t + b_k sin k t` on the
/// circle. Shared between metric twists and the Moser-Trudinger machinery.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct FourierFunction {
    pub a0: f64,
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
}

impl FourierFunction {
    pub fn new(a0: f64, cos: Vec<f64>, sin: Vec<f64>) -> Self {
        FourierFunction { a0, cos, sin }
    }

    pub fn eval(&self, theta: f64) -> f64 {
        let mut v = self.a0;
        for (k, a) in self.cos.iter().enumerate() {
            v += a * ((k + 1) as f64 * theta).cos();
        }
        for (k, b) in self.sin.iter().enumerate() {
            v += b * ((k + 1) as f64 * theta).sin();
        }
        v
    }

    pub fn max_harmonic(&self) -> usize {
        self.cos.len().max(self.sin.len())
    }
}

/// An L^p ambient metric, optionally twisted by a smooth perturbation and
/// shifted by a constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSpec {
    pub p: LpExponent,
    pub twist: Option<FourierFunction>,
    pub shift: f64,
}

impl MetricSpec {
    pub fn weil() -> Self {
        MetricSpec { p: LpExponent::Weil, twist: None, shift: 0.0 }
    }

    pub fn fubini_study() -> Self {
        MetricSpec { p: LpExponent::FubiniStudy, twist: None, shift: 0.0 }
    }

    pub fn lp(p: f64) -> Self {
        MetricSpec { p: LpExponent::General(p), twist: None, shift: 0.0 }
    }

    pub fn with_shift(mut self, shift: f64) -> Self {
        self.shift = shift;
        self
    }
}

/// The usual p-norm of a tuple of moduli; max modulus for p = infinity.
pub fn lp_norm(moduli: &[f64], p: f64) -> f64 {
    assert!(p >= 1.0, "lp_norm requires p >= 1");
    if p.is_infinite() {
        moduli.iter().cloned().fold(0.0, f64::max)
    } else {
        moduli
            .iter()
            .map(|m| m.abs().powf(p))
            .sum::<f64>()
            .powf(1.0 / p)
    }
}

#[cfg(test)]
mod tests;
