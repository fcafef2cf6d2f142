//! Assembled verdicts: sharp constants, inequality checkers, Peyre-constant
//! assembly, Zhang's sandwich, and the diagonal-family study tables.

use serde::Serialize;
use std::collections::BTreeMap;
use thiserror::Error;

use crate::core::{DiagonalForm, MetricSpec};
use crate::enumerate::{min_point, NumberField, Variety};
use crate::localdens::{euler_product, local_density, primes_up_to};
use crate::mahler::{mahler_measure, MahlerMethod};

#[derive(Debug, Error, PartialEq)]
pub enum VerdictError {
    #[error("variety is not Fano: d={d}, n={n}")]
    NotFano { d: u32, n: usize },
    #[error("successive minima must be nonincreasing at index {0}")]
    OrderViolation(usize),
    #[error("field shape invalid: m_R={m_r} + m_C={m_c} != degree {degree}")]
    FieldShapeInvalid { m_r: u32, m_c: u32, degree: u32 },
    #[error("{0}")]
    Upstream(String),
}

/// The sharp constant
///   c_n = (1/2)(n+1)^{n+1} ( (n+1) Σ_{k=1}^n 1/k − n + log(π^n / n!) ).
/// c_1 = 2(1 + log π), c_2 = (27/2)(5/2 + log(π²/2)).
pub fn c_n_constant(n: u32) -> f64 {
    let nf = n as f64;
    let harmonic: f64 = (1..=n).map(|k| 1.0 / k as f64).sum();
    let mut log_fact = 0.0;
    for k in 2..=n {
        log_fact += (k as f64).ln();
    }
    0.5 * (nf + 1.0).powi(n as i32 + 1)
        * ((nf + 1.0) * harmonic - nf + nf * std::f64::consts::PI.ln() - log_fact)
}

/// n! as a float, for normalizing degree-scale quantities.
pub(crate) fn factorial(n: u32) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Satisfied,
    Violated,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct InequalityReport {
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub verdict: Verdict,
    pub est_error: f64,
    pub inputs: BTreeMap<String, f64>,
}

impl InequalityReport {
    fn build(lhs: f64, rhs: f64, est_error: f64, inputs: BTreeMap<String, f64>) -> Self {
        let slack = rhs - lhs;
        let verdict = if slack.abs() < est_error {
            Verdict::Inconclusive
        } else if slack >= 0.0 {
            Verdict::Satisfied
        } else {
            Verdict::Violated
        };
        InequalityReport { lhs, rhs, slack, verdict, est_error, inputs }
    }
}

/// Main height conjecture in scale-free form:
///   h/(n+1)! + (vol/2)·log μ_C ≤ c_n/(n+1)!.
/// h is the unnormalized anticanonical height; the shift λ adds
/// λ·(n+1)!·vol/2 to h and −λ·vol/2 to the mass term, so the lhs is
/// shift-invariant.
pub fn main_conjecture_check(h: f64, mu_c: f64, vol: f64, n: u32, est_error: f64) -> InequalityReport {
    let lhs = h / factorial(n + 1) + 0.5 * vol * mu_c.ln();
    let rhs = c_n_constant(n) / factorial(n + 1);
    let inputs =
        BTreeMap::from([("h".into(), h), ("mu_c".into(), mu_c), ("vol".into(), vol), ("n".into(), n as f64)]);
    InequalityReport::build(lhs, rhs, est_error, inputs)
}

/// Right hand side of the diagonal-hypersurface height bound:
///   c_n − (d−1)(n+2−d)ⁿ Σ log|a_i|.
pub fn diagonal_bound_rhs(form: &DiagonalForm) -> Result<f64, VerdictError> {
    if !form.is_fano() {
        return Err(VerdictError::NotFano { d: form.d, n: form.n });
    }
    let n = form.n as u32;
    let log_sum: f64 = form
        .a
        .iter()
        .map(|a| {
            crate::core::rational_to_f64(&num::rational::BigRational::from(a.clone()))
                .abs()
                .ln()
        })
        .sum();
    let correction =
        (form.d as f64 - 1.0) * ((form.n as f64 + 2.0 - form.d as f64).powi(form.n as i32));
    Ok(c_n_constant(n) - correction * log_sum)
}

/// Minimal-point bound inf H ≤ e^{c_n/vol}/√μ_C; under a metric shift both
/// sides scale by e^{λ/2}.
pub fn min_point_bound(mu_c: f64, vol: f64, n: u32) -> f64 {
    (c_n_constant(n) / vol).exp() / mu_c.sqrt()
}

/// Zhang's sandwich e_1 ≥ ĥ ≥ (n+1)^{−1} Σ e_i for nonincreasing successive
/// minima.
pub fn zhang_report(e_values: &[f64], h_hat: f64, est_error: f64) -> Result<InequalityReport, VerdictError> {
    for (i, w) in e_values.windows(2).enumerate() {
        if w[0] < w[1] {
            return Err(VerdictError::OrderViolation(i + 1));
        }
    }
    let mean = e_values.iter().sum::<f64>() / e_values.len() as f64;
    let top = e_values[0];
    // the sandwich holds iff mean ≤ ĥ ≤ top; report the tighter side
    let slack_hi = top - h_hat;
    let slack_lo = h_hat - mean;
    let (lhs, rhs) = if slack_hi <= slack_lo { (h_hat, top) } else { (mean, h_hat) };
    let mut inputs = BTreeMap::from([("h_hat".into(), h_hat), ("mean".into(), mean), ("e_max".into(), top)]);
    for (i, e) in e_values.iter().enumerate() {
        inputs.insert(format!("e_{i}"), *e);
    }
    Ok(InequalityReport::build(lhs, rhs, est_error, inputs))
}

#[derive(Debug, Clone, Serialize)]
pub struct PeyreConstant {
    pub theta: f64,
    pub eta_part: f64,
    pub mu_c: f64,
    pub mu_r: f64,
    /// (m_R, m_C, [𝔽:ℚ]).
    pub field_shape: (u32, u32, u32),
}

/// Θ = η · μ_C^{m_C/2[𝔽:ℚ]} · μ_R^{m_R/[𝔽:ℚ]}.
pub fn peyre_assemble(
    eta_part: f64,
    mu_c: f64,
    mu_r: f64,
    field_shape: (u32, u32, u32),
) -> Result<PeyreConstant, VerdictError> {
    let (m_r, m_c, degree) = field_shape;
    if m_r + m_c != degree || degree == 0 {
        return Err(VerdictError::FieldShapeInvalid { m_r, m_c, degree });
    }
    let theta = eta_part
        * mu_c.powf(m_c as f64 / (2.0 * degree as f64))
        * mu_r.powf(m_r as f64 / degree as f64);
    Ok(PeyreConstant { theta, eta_part, mu_c, mu_r, field_shape })
}

/// The Elsenhans-Jahnel product min H · Θ, tabulated, not bounded: the
/// diagonal family exhibits unbounded growth.
pub fn ej_product(min_h: f64, theta: f64) -> f64 {
    min_h * theta
}

#[derive(Debug, Clone, Serialize)]
pub struct XaRow {
    pub a: i64,
    pub h_min: Option<f64>,
    /// Mahler-based proxy exp(m(f)/(d(n+1))) for exp ĥ; not an exact
    /// anticanonical height.
    pub exp_h_proxy: f64,
    /// (p, μ_p) over primes dividing d·a.
    pub bad_primes: Vec<(u64, f64)>,
    pub bad_product: f64,
    /// ∏ 4 over bad primes: the universal cap p^{−2}(p+1)² ≤ 4.
    pub cap_product: f64,
    pub good_partial_product: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct XaStudy {
    pub d: u32,
    pub n: usize,
    pub rows: Vec<XaRow>,
    /// Log-log fit of H_min against a over rows with points.
    pub min_h_exponent: Option<f64>,
    /// Log-log fit of the exp ĥ proxy against a.
    pub proxy_exponent: f64,
}

fn loglog_slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let mx = pts.iter().map(|p| p.0.ln()).sum::<f64>() / pts.len() as f64;
    let my = pts.iter().map(|p| p.1.ln()).sum::<f64>() / pts.len() as f64;
    let sxx: f64 = pts.iter().map(|p| (p.0.ln() - mx) * (p.0.ln() - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0.ln() - mx) * (p.1.ln() - my)).sum();
    Some(sxy / sxx)
}

/// Study table for the family −a·x0^d + x1^d + … + x_{n+1}^d over an a-grid:
/// minimal points, Mahler proxies, bad-prime densities and the good-prime
/// partial Euler product.
pub fn xa_study(
    d: u32,
    n: usize,
    a_grid: &[i64],
    good_p_max: u64,
    r_max: u32,
) -> Result<XaStudy, VerdictError> {
    let mut rows = Vec::new();
    for &a in a_grid {
        let mut coeffs = vec![1i64; n + 2];
        coeffs[0] = -a;
        let diag = DiagonalForm::from_i64(d, n, &coeffs);
        let f = diag.to_homogeneous();
        let report = min_point(&Variety::Hypersurface(f.clone()), &MetricSpec::weil(), 1e6, NumberField::Q)
            .map_err(|e| VerdictError::Upstream(e.to_string()))?;
        let m = mahler_measure(&f, MahlerMethod::Quadrature, 16)
            .map_err(|e| VerdictError::Upstream(e.to_string()))?
            .m;
        let exp_h_proxy = (m / (d as f64 * (n as f64 + 1.0))).exp();
        let bad: Vec<u64> = primes_up_to(50)
            .into_iter()
            .filter(|&p| (d as i64 * a).rem_euclid(p as i64) == 0)
            .collect();
        let mut bad_primes = Vec::new();
        let mut bad_product = 1.0;
        for &p in &bad {
            let ld = local_density(&f, p, r_max)
                .map_err(|e| VerdictError::Upstream(format!("p={p}: {e}")))?;
            let mu = crate::core::rational_to_f64(&ld.mu_p);
            bad_primes.push((p, mu));
            bad_product *= mu;
        }
        let ep = euler_product(&f, good_p_max, r_max);
        let good_partial_product = ep
            .factors
            .iter()
            .zip(&ep.partial_products)
            .filter(|(fac, _)| !bad.contains(&fac.p))
            .fold(1.0, |acc, (fac, _)| acc * fac.factor.unwrap_or(1.0));
        rows.push(XaRow {
            a,
            h_min: report.h_min,
            exp_h_proxy,
            bad_primes,
            bad_product,
            cap_product: 4f64.powi(bad.len() as i32),
            good_partial_product,
        });
    }
    let min_pts: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| r.h_min.map(|h| (r.a as f64, h)))
        .collect();
    let proxy_pts: Vec<(f64, f64)> =
        rows.iter().map(|r| (r.a as f64, r.exp_h_proxy)).collect();
    Ok(XaStudy {
        d,
        n,
        rows,
        min_h_exponent: loglog_slope(&min_pts),
        proxy_exponent: loglog_slope(&proxy_pts).unwrap_or(f64::NAN),
    })
}

#[cfg(test)]
mod tests;
