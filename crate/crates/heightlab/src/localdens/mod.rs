//! p-adic local densities by congruence counting, Euler products with
//! convergence factors, and Deligne-bound checks.
//!
//! For a hypersurface X = {f = 0} ⊂ ℙ^{k−1} of dimension n, the local density
//! is μ_p = (p^r)^{−n} · #X(ℤ/p^r), where the projective count is the number
//! of primitive affine solutions divided by #(ℤ/p^r)^×. At primes of good
//! reduction r = 1 suffices.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Integer, One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::core::{rational_to_f64, DiagonalForm, HomogeneousForm};

mod count;

pub(crate) use count::is_prime;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LocalError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("counting budget exceeded at p={p}, r={r}")]
    BudgetExceeded { p: u64, r: u32 },
    #[error("bad reduction at p={0}")]
    BadReduction(u64),
}

/// Number of affine solutions of f ≡ 0 over (ℤ/p^r)^k.
pub fn count_affine_mod(f: &HomogeneousForm, p: u64, r: u32) -> Result<BigInt, LocalError> {
    count::count_affine(f, p, r, count::DEFAULT_BUDGET)
}

/// Number of primitive affine solutions (not all coordinates ≡ 0 mod p).
pub fn count_primitive_affine(
    f: &HomogeneousForm,
    p: u64,
    r: u32,
) -> Result<BigInt, LocalError> {
    let total = count_affine_mod(f, p, r)?;
    let k = f.nvars as u32;
    let d = f.degree;
    // nonprimitive x = p·y: f(p y) = p^d f(y)
    let nonprimitive = if f.terms.is_empty() || r <= d {
        BigInt::from(p).pow((r - 1) * k)
    } else {
        count_affine_mod(f, p, r - d)? * BigInt::from(p).pow((d - 1) * k)
    };
    Ok(total - nonprimitive)
}

/// Projective point count #X(ℤ/p^r): primitive solutions modulo the free
/// action of (ℤ/p^r)^×.
pub fn count_projective_mod(f: &HomogeneousForm, p: u64, r: u32) -> Result<BigInt, LocalError> {
    let primitive = count_primitive_affine(f, p, r)?;
    let units = BigInt::from(p).pow(r - 1) * BigInt::from(p - 1);
    let (q, rem) = primitive.div_rem(&units);
    assert!(rem.is_zero(), "unit action must be free on primitive solutions");
    Ok(q)
}

/// Dimension of the variety cut out by f in ℙ^{nvars−1} (the whole space for
/// the zero form).
fn variety_dim(f: &HomogeneousForm) -> u32 {
    let ambient = f.nvars as u32 - 1;
    if f.terms.is_empty() {
        ambient
    } else {
        ambient - 1
    }
}

fn mu_at(f: &HomogeneousForm, p: u64, r: u32) -> Result<BigRational, LocalError> {
    let n = variety_dim(f);
    let count = count_projective_mod(f, p, r)?;
    Ok(BigRational::new(count, BigInt::from(p).pow(r * n)))
}

#[derive(Debug, Clone, Serialize)]
pub struct LocalDensity {
    pub p: u64,
    pub r_used: u32,
    /// Projective count #X(ℤ/p^{r_used}).
    pub count: BigInt,
    pub mu_p: BigRational,
    pub stabilized: bool,
    pub good_reduction: bool,
}

/// Sufficient good-reduction criterion for diagonal forms: p ∤ d·∏a_i.
pub fn good_reduction_diag(f: &DiagonalForm, p: u64) -> bool {
    let pb = BigInt::from(p);
    let mut prod = BigInt::from(f.d);
    for a in &f.a {
        prod *= a;
    }
    !(prod % pb).is_zero()
}

/// Brute-force smoothness of the mod-p fiber: f and its partials have no
/// common projective zero over 𝔽_p.
pub fn smooth_mod_p(f: &HomogeneousForm, p: u64) -> Result<bool, LocalError> {
    if !is_prime(p) {
        return Err(LocalError::NotPrime(p));
    }
    let k = f.nvars;
    if (p as f64).powi(k as i32) > count::DEFAULT_BUDGET as f64 {
        return Err(LocalError::BudgetExceeded { p, r: 1 });
    }
    let pb = BigInt::from(p);
    let reduce = |v: &BigInt| -> BigInt { ((v % &pb) + &pb) % &pb };
    let partials: Vec<HomogeneousForm> = (0..k)
        .map(|j| {
            let terms: Vec<(Vec<u32>, BigInt)> = f
                .terms
                .iter()
                .filter(|(e, _)| e[j] > 0)
                .map(|(e, c)| {
                    let mut e2 = e.clone();
                    e2[j] -= 1;
                    (e2, c * BigInt::from(e[j]))
                })
                .collect();
            HomogeneousForm { degree: f.degree.saturating_sub(1), nvars: k, terms }
        })
        .collect();
    let mut x = vec![0u64; k];
    'outer: loop {
        if x.iter().any(|&xi| xi != 0) {
            let coords: Vec<BigInt> = x.iter().map(|&xi| BigInt::from(xi)).collect();
            let f0 = reduce(&crate::core::eval_form(f, &coords).unwrap());
            if f0.is_zero()
                && partials
                    .iter()
                    .all(|d| reduce(&crate::core::eval_form(d, &coords).unwrap()).is_zero())
            {
                return Ok(false);
            }
        }
        for j in 0..k {
            x[j] += 1;
            if x[j] < p {
                continue 'outer;
            }
            x[j] = 0;
        }
        break;
    }
    Ok(true)
}

/// Good-reduction detection: divisibility shortcut for diagonal forms, odd-p
/// determinant test for quadratics, brute-force smoothness otherwise.
fn good_reduction(f: &HomogeneousForm, p: u64) -> Option<bool> {
    if f.terms.is_empty() {
        return Some(true);
    }
    if f.nvars >= 2 {
        if let Some(coeffs) = f.diagonal_coefficients() {
            let d = DiagonalForm { d: f.degree, n: f.nvars - 2, a: coeffs };
            return Some(good_reduction_diag(&d, p));
        }
    }
    // the Gram determinant test is only valid away from 2
    if f.degree == 2 && p != 2 {
        // smooth quadric ⟺ p ∤ det of the doubled Gram matrix
        let k = f.nvars;
        let mut gram = vec![vec![BigInt::zero(); k]; k];
        for (exps, c) in &f.terms {
            let nz: Vec<usize> = (0..k).filter(|&j| exps[j] > 0).collect();
            match nz.as_slice() {
                [i] => gram[*i][*i] += 2 * c,
                [i, j] => {
                    gram[*i][*j] += c;
                    gram[*j][*i] += c;
                }
                _ => unreachable!(),
            }
        }
        let det = integer_det(&gram);
        return Some(!(det % BigInt::from(p)).is_zero());
    }
    smooth_mod_p(f, p).ok()
}

fn integer_det(m: &[Vec<BigInt>]) -> BigInt {
    let rows: Vec<Vec<BigRational>> = m
        .iter()
        .map(|r| r.iter().map(|x| BigRational::from(x.clone())).collect())
        .collect();
    let n = rows.len();
    // Bareiss would be tidier; rational elimination is fine at this size.
    let mut mat = rows;
    let mut det = BigRational::one();
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| !mat[r][col].is_zero()) else {
            return BigInt::zero();
        };
        if p != col {
            mat.swap(col, p);
            det = -det;
        }
        det *= mat[col][col].clone();
        let inv = mat[col][col].recip();
        for r in col + 1..n {
            if mat[r][col].is_zero() {
                continue;
            }
            let factor = &mat[r][col] * &inv;
            for c in col..n {
                let delta = &factor * &mat[col][c];
                mat[r][c] = &mat[r][c] - delta;
            }
        }
    }
    assert!(det.is_integer());
    det.to_integer()
}

/// Local density with stabilization in r.
pub fn local_density(f: &HomogeneousForm, p: u64, r_max: u32) -> Result<LocalDensity, LocalError> {
    if !is_prime(p) {
        return Err(LocalError::NotPrime(p));
    }
    let good = good_reduction(f, p);
    let mu1 = mu_at(f, p, 1)?;
    if good == Some(true) {
        return Ok(LocalDensity {
            p,
            r_used: 1,
            count: count_projective_mod(f, p, 1)?,
            mu_p: mu1,
            stabilized: true,
            good_reduction: true,
        });
    }
    let mut r = 1;
    let mut mu = mu1;
    while r < r_max {
        let next = match mu_at(f, p, r + 1) {
            Ok(v) => v,
            // can't verify further; report unstabilized at current depth
            Err(LocalError::BudgetExceeded { .. }) => {
                return Ok(LocalDensity {
                    p,
                    r_used: r,
                    count: count_projective_mod(f, p, r)?,
                    mu_p: mu,
                    stabilized: false,
                    good_reduction: false,
                })
            }
            Err(e) => return Err(e),
        };
        if next == mu {
            return Ok(LocalDensity {
                p,
                r_used: r,
                count: count_projective_mod(f, p, r)?,
                mu_p: mu,
                stabilized: true,
                good_reduction: good.unwrap_or(false) && r == 1,
            });
        }
        mu = next;
        r += 1;
    }
    Ok(LocalDensity {
        p,
        r_used: r_max,
        count: count_projective_mod(f, p, r_max)?,
        mu_p: mu,
        stabilized: false,
        good_reduction: false,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct EulerFactor {
    pub p: u64,
    pub r_used: u32,
    pub mu_p: Option<BigRational>,
    /// (1 − 1/p)·μ_p
    pub factor: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EulerProductReport {
    pub factors: Vec<EulerFactor>,
    /// Partial products after each prime, failed factors skipped.
    pub partial_products: Vec<f64>,
    pub p_max: u64,
    pub tail_note: String,
}

pub fn primes_up_to(p_max: u64) -> Vec<u64> {
    (2..=p_max).filter(|&p| is_prime(p)).collect()
}

/// ∏_{p ≤ P} (1−1/p)·μ_p with per-prime error reporting.
pub fn euler_product(f: &HomogeneousForm, p_max: u64, r_max: u32) -> EulerProductReport {
    let mut factors = Vec::new();
    let mut partial_products = Vec::new();
    let mut product = 1.0;
    for p in primes_up_to(p_max) {
        match local_density(f, p, r_max) {
            Ok(ld) => {
                let factor = (1.0 - 1.0 / p as f64) * rational_to_f64(&ld.mu_p);
                product *= factor;
                factors.push(EulerFactor {
                    p,
                    r_used: ld.r_used,
                    mu_p: Some(ld.mu_p),
                    factor: Some(factor),
                    error: if ld.stabilized {
                        None
                    } else {
                        Some("not stabilized at r_max".to_string())
                    },
                });
            }
            Err(e) => {
                factors.push(EulerFactor {
                    p,
                    r_used: 0,
                    mu_p: None,
                    factor: None,
                    error: Some(e.to_string()),
                });
            }
        }
        partial_products.push(product);
    }
    EulerProductReport {
        factors,
        partial_products,
        p_max,
        tail_note: "tail over p > P_max not estimated; compare successive partial products"
            .to_string(),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DeligneReport {
    pub p: u64,
    pub count: BigInt,
    pub pi_n: BigInt,
    /// |count − π_n| / p^{n/2}
    pub deviation: f64,
}

/// π_n = p^n + … + 1.
fn pi_n(p: u64, n: u32) -> BigInt {
    let mut acc = BigInt::zero();
    for j in 0..=n {
        acc += BigInt::from(p).pow(j);
    }
    acc
}

/// Deviation of #X(𝔽_p) from π_n, normalized by p^{n/2}; requires good
/// reduction.
pub fn deligne_check(f: &HomogeneousForm, p: u64) -> Result<DeligneReport, LocalError> {
    if good_reduction(f, p) != Some(true) {
        return Err(LocalError::BadReduction(p));
    }
    let n = variety_dim(f);
    let count = count_projective_mod(f, p, 1)?;
    let pi = pi_n(p, n);
    let diff = (&count - &pi).magnitude().clone();
    let deviation = rational_to_f64(&BigRational::from(BigInt::from(diff)))
        / (p as f64).powf(n as f64 / 2.0);
    Ok(DeligneReport { p, count, pi_n: pi, deviation })
}
