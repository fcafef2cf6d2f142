//! Mahler measures of integer forms and the Weil-metric height of
//! hypersurface models.
//!
//! m(f) = ∫_{T^k} log|f| dHaar with probability Haar measure on the unit
//! torus. The last variable is integrated exactly by Jensen's formula on the
//! slice polynomial (roots via Durand-Kerner), which removes the logarithmic
//! singularity; the remaining angles use a periodic trapezoid grid or seeded
//! Monte Carlo.

use num::bigint::BigInt;
use num::rational::BigRational;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::core::{rational_to_f64, HomogeneousForm};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MahlerError {
    #[error("form must be nonzero")]
    ZeroForm,
    #[error("resolution too low: {degenerate} of {total} slices degenerate")]
    ResolutionTooLow { degenerate: usize, total: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MahlerMethod {
    Quadrature,
    Qmc,
}

#[derive(Debug, Clone, Serialize)]
pub struct MahlerReport {
    /// Log-Mahler measure.
    pub m: f64,
    /// |m − log max|a_i||.
    pub coeff_gap: f64,
    /// Slices evaluated at the finest resolution.
    pub nodes: usize,
    /// Two-resolution (or sampling) error estimate.
    pub est_error: f64,
}

/// Durand-Kerner simultaneous root iteration for a monic-normalizable
/// complex polynomial given by coefficients c_0 + c_1 z + … + c_d z^d.
fn poly_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut c: Vec<Complex64> = coeffs.to_vec();
    while let Some(last) = c.last() {
        if last.norm() < 1e-14 && c.len() > 1 {
            c.pop();
        } else {
            break;
        }
    }
    let d = c.len() - 1;
    if d == 0 {
        return Vec::new();
    }
    let lead = c[d];
    let monic: Vec<Complex64> = c.iter().map(|x| x / lead).collect();
    let eval = |z: Complex64| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &cj in monic.iter().rev() {
            acc = acc * z + cj;
        }
        acc
    };
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..d).map(|j| seed.powu(j as u32 + 1)).collect();
    for _ in 0..200 {
        let mut delta: f64 = 0.0;
        for i in 0..d {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..d {
                if j != i {
                    denom *= roots[i] - roots[j];
                }
            }
            let step = eval(roots[i]) / denom;
            roots[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-13 {
            break;
        }
    }
    roots
}

/// Exact Jensen value (1/2π)∫ log|q(e^{iθ})| dθ = log|c_d| + Σ log⁺|ρ_j|.
fn jensen_slice(coeffs: &[Complex64]) -> Option<f64> {
    let max_norm = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if max_norm < 1e-12 {
        return None;
    }
    let mut c: Vec<Complex64> = coeffs.to_vec();
    while c.last().map_or(false, |x| x.norm() < 1e-13 * max_norm) {
        c.pop();
    }
    // roots at the origin from trailing zero coefficients contribute log⁺0 = 0
    let first = c.iter().position(|x| x.norm() >= 1e-13 * max_norm)?;
    let c = &c[first..];
    let d = c.len() - 1;
    let mut value = c[d].norm().ln();
    if d > 0 {
        for rho in poly_roots(c) {
            value += rho.norm().max(1.0).ln();
        }
    }
    Some(value)
}

fn coeff_f64(c: &BigInt) -> f64 {
    rational_to_f64(&BigRational::from(c.clone()))
}

/// Slice-polynomial coefficients in the last variable at outer angles θ'.
fn slice_coeffs(f: &HomogeneousForm, theta: &[f64]) -> Vec<Complex64> {
    let last = f.nvars - 1;
    let mut coeffs = vec![Complex64::new(0.0, 0.0); f.degree as usize + 1];
    for (exps, c) in &f.terms {
        let mut phase = 0.0;
        for (l, &e) in exps[..last].iter().enumerate() {
            phase += e as f64 * theta[l];
        }
        coeffs[exps[last] as usize] += Complex64::from_polar(coeff_f64(c), phase);
    }
    coeffs
}

fn log_max_coeff(f: &HomogeneousForm) -> f64 {
    f.terms
        .iter()
        .map(|(_, c)| coeff_f64(c).abs())
        .fold(0.0, f64::max)
        .ln()
}

fn grid_pass(f: &HomogeneousForm, n: usize) -> Result<(f64, usize), MahlerError> {
    let outer = f.nvars - 1;
    let total: usize = n.pow(outer as u32);
    let step = std::f64::consts::TAU / n as f64;
    let values: Vec<Option<f64>> = (0..total)
        .into_par_iter()
        .map(|mut idx| {
            let mut theta = vec![0.0; outer];
            for t in theta.iter_mut() {
                *t = (idx % n) as f64 * step;
                idx /= n;
            }
            jensen_slice(&slice_coeffs(f, &theta))
        })
        .collect();
    let degenerate = values.iter().filter(|v| v.is_none()).count();
    if degenerate * 100 > total {
        return Err(MahlerError::ResolutionTooLow { degenerate, total });
    }
    let sum: f64 = values.iter().flatten().sum();
    Ok((sum / (total - degenerate) as f64, total))
}

fn qmc_pass(f: &HomogeneousForm, samples: usize, seed: u64) -> Result<(f64, f64), MahlerError> {
    let outer = f.nvars - 1;
    let mut rng = StdRng::seed_from_u64(seed);
    let mut sum = 0.0;
    let mut sumsq = 0.0;
    let mut used = 0usize;
    let mut degenerate = 0usize;
    for _ in 0..samples {
        let theta: Vec<f64> =
            (0..outer).map(|_| rng.gen::<f64>() * std::f64::consts::TAU).collect();
        match jensen_slice(&slice_coeffs(f, &theta)) {
            Some(v) => {
                sum += v;
                sumsq += v * v;
                used += 1;
            }
            None => degenerate += 1,
        }
    }
    if degenerate * 100 > samples || used == 0 {
        return Err(MahlerError::ResolutionTooLow { degenerate, total: samples });
    }
    let mean = sum / used as f64;
    let var = (sumsq / used as f64 - mean * mean).max(0.0);
    Ok((mean, (var / used as f64).sqrt()))
}

pub fn mahler_measure(
    f: &HomogeneousForm,
    method: MahlerMethod,
    resolution: usize,
) -> Result<MahlerReport, MahlerError> {
    if f.terms.is_empty() {
        return Err(MahlerError::ZeroForm);
    }
    let (m, nodes, est_error) = match method {
        MahlerMethod::Quadrature => {
            let coarse = grid_pass(f, (resolution / 2).max(1))?;
            let (m, nodes) = grid_pass(f, resolution.max(1))?;
            (m, nodes, (m - coarse.0).abs())
        }
        MahlerMethod::Qmc => {
            let (m, se) = qmc_pass(f, resolution.max(16), 0x6d61686c)?;
            (m, resolution.max(16), se)
        }
    };
    Ok(MahlerReport { m, coeff_gap: (m - log_max_coeff(f)).abs(), nodes, est_error })
}

/// Default resolution by number of outer torus dimensions.
fn default_resolution(f: &HomogeneousForm) -> usize {
    match f.nvars {
        0..=2 => 4096,
        3 => 512,
        4 => 64,
        _ => 24,
    }
}

/// Weil-metric height of the hypersurface model cut out by f: equals the
/// log-Mahler measure.
pub fn hypersurface_weil_height(f: &HomogeneousForm) -> Result<f64, MahlerError> {
    Ok(mahler_measure(f, MahlerMethod::Quadrature, default_resolution(f))?.m)
}

/// |m(f) − log max|a_i||.
pub fn mahler_gap(f: &HomogeneousForm) -> Result<f64, MahlerError> {
    Ok(mahler_measure(f, MahlerMethod::Quadrature, default_resolution(f))?.coeff_gap)
}

#[cfg(test)]
mod tests;
