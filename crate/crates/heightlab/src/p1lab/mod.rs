//! Numerics on the projective line: Monge-Ampere energy, metric heights,
//! anticanonical masses, the arithmetic Ding functional, and the
//! Moser-Trudinger machinery on the circle.
//!
//! A metric on O(1) is written through its weight on the affine chart,
//! ψ(z) = base(z) + u(z) + λ, with base either log(1+|z|²) (Fubini-Study) or
//! log max(1,|z|²) (Weil). All integrals over ℙ¹(ℂ) split at |z| = 1 and the
//! outer region is pulled back to the unit disc through z ↦ 1/z, so the Weil
//! kink sits exactly on a quadrature cell boundary. Fourier perturbations are
//! extended harmonically into both discs; the Dirichlet integral is conformally
//! invariant, so no Jacobians appear in the gradient terms.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::core::FourierFunction;

mod quad;

pub const DEFAULT_TOL: f64 = 1e-9;
const MAX_NODES: usize = 4096;
const TAU: f64 = std::f64::consts::TAU;

#[derive(Debug, Error, PartialEq)]
pub enum P1Error {
    #[error("quadrature failed to reach tolerance at {max_nodes} nodes")]
    QuadratureFailure { max_nodes: usize },
    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum P1Base {
    FubiniStudy,
    Weil,
}

/// Smooth perturbation of the O(1) weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Perturbation {
    /// Circle data, extended harmonically to both discs (r^k inside, r^{-k}
    /// outside). Continuous across |z| = 1 and harmonic off it.
    Fourier(FourierFunction),
    /// Radial bump amp·exp(-((log r - center)/width)²); decays at 0 and ∞.
    RadialBump { amp: f64, center: f64, width: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct P1Metric {
    pub base: P1Base,
    pub perturbation: Option<Perturbation>,
    pub shift: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Chart {
    Inner,
    Outer,
}

impl P1Metric {
    pub fn fs() -> Self {
        P1Metric { base: P1Base::FubiniStudy, perturbation: None, shift: 0.0 }
    }

    pub fn weil() -> Self {
        P1Metric { base: P1Base::Weil, perturbation: None, shift: 0.0 }
    }

    pub fn with_fourier(mut self, v: FourierFunction) -> Self {
        self.perturbation = Some(Perturbation::Fourier(v));
        self
    }

    pub fn with_bump(mut self, amp: f64, center: f64, width: f64) -> Self {
        self.perturbation = Some(Perturbation::RadialBump { amp, center, width });
        self
    }

    pub fn with_shift(mut self, shift: f64) -> Self {
        self.shift = shift;
        self
    }

    /// ψ − Weil on the given chart, shift excluded (added analytically by the
    /// callers so the scaling laws hold exactly). The Weil weight vanishes on
    /// the closed unit disc of either chart.
    pub(crate) fn rel_value(&self, chart: Chart, r: f64, theta: f64) -> f64 {
        let base = match self.base {
            P1Base::FubiniStudy => (1.0 + r * r).ln(),
            P1Base::Weil => 0.0,
        };
        base + self.pert(chart, r, theta).0
    }

    /// |∇(ψ − Weil)|² in chart polar coordinates: (∂_r f)² + (∂_θ f / r)².
    pub(crate) fn grad_sq(&self, chart: Chart, r: f64, theta: f64) -> f64 {
        let base_dr = match self.base {
            P1Base::FubiniStudy => 2.0 * r / (1.0 + r * r),
            P1Base::Weil => 0.0,
        };
        let (_, dr, dtheta) = self.pert(chart, r, theta);
        let total_dr = base_dr + dr;
        let ang = dtheta / r;
        total_dr * total_dr + ang * ang
    }

    /// (value, ∂_r, ∂_θ) of the perturbation on the given chart.
    fn pert(&self, chart: Chart, r: f64, theta: f64) -> (f64, f64, f64) {
        match &self.perturbation {
            None => (0.0, 0.0, 0.0),
            Some(Perturbation::Fourier(v)) => {
                // outer chart coordinate w = 1/z reverses the angle, which
                // flips the sine coefficients
                let sgn = match chart {
                    Chart::Inner => 1.0,
                    Chart::Outer => -1.0,
                };
                let kmax = v.max_harmonic();
                let mut val = v.a0;
                let mut dr = 0.0;
                let mut dth = 0.0;
                let mut rk1 = 1.0; // r^{k-1}
                for k in 1..=kmax {
                    let kf = k as f64;
                    let a = v.cos.get(k - 1).copied().unwrap_or(0.0);
                    let b = sgn * v.sin.get(k - 1).copied().unwrap_or(0.0);
                    let (s, c) = (kf * theta).sin_cos();
                    let rk = rk1 * r;
                    val += rk * (a * c + b * s);
                    dr += kf * rk1 * (a * c + b * s);
                    dth += rk * kf * (-a * s + b * c);
                    rk1 = rk;
                }
                (val, dr, dth)
            }
            Some(Perturbation::RadialBump { amp, center, width }) => {
                let (amp, center, width) = (*amp, *center, *width);
                if r < 1e-300 {
                    return (0.0, 0.0, 0.0);
                }
                let lr = match chart {
                    Chart::Inner => r.ln(),
                    Chart::Outer => -r.ln(),
                };
                let t = (lr - center) / width;
                let g = amp * (-t * t).exp();
                let dg_dlr = g * (-2.0 * t / width);
                let dlr_dr = match chart {
                    Chart::Inner => 1.0 / r,
                    Chart::Outer => -1.0 / r,
                };
                (g, dg_dlr * dlr_dr, 0.0)
            }
        }
    }
}

/// Anticanonical metric 2ψ + λ on −K_{ℙ¹}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcMetric {
    pub psi: P1Metric,
    pub shift: f64,
}

impl AcMetric {
    pub fn twice(psi: P1Metric) -> Self {
        AcMetric { psi, shift: 0.0 }
    }

    pub fn with_shift(mut self, shift: f64) -> Self {
        self.shift = shift;
        self
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EnergyReport {
    pub value: f64,
    pub quadrature_nodes: usize,
    pub est_error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DensityReport {
    pub mass: f64,
    pub quadrature_nodes: usize,
    pub est_error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct InequalityReport {
    pub value: f64,
    pub bound: f64,
    pub slack: f64,
}

/// E_{Weil}(φ) at a fixed node count, shift excluded:
/// (1/2π)∫_{S¹}(φ−W)dθ − (1/8π)∫_ℂ|∇(φ−W)|²dA.
fn e_weil_at(m: &P1Metric, n: usize) -> f64 {
    let circle = quad::circle_mean(|t| m.rel_value(Chart::Inner, 1.0, t), 2 * n);
    let d_in = quad::disc_integral(|r, t| m.grad_sq(Chart::Inner, r, t), n);
    let d_out = quad::disc_integral(|r, t| m.grad_sq(Chart::Outer, r, t), n);
    circle - (d_in + d_out) / (8.0 * std::f64::consts::PI)
}

/// Monge-Ampere energy against the Weil reference,
/// E_W(φ) = (1/2)∫_{ℙ¹}(φ−W)(ω_φ + ω_W).
pub fn energy_weil(m: &P1Metric, tol: f64) -> Result<EnergyReport, P1Error> {
    let (value, n, err) = quad::refine(|n| e_weil_at(m, n), 8, MAX_NODES, tol)?;
    Ok(EnergyReport { value: value + m.shift, quadrature_nodes: n, est_error: err })
}

/// E_{φ0}(φ) via the cocycle E_{φ0}(φ) = E_W(φ) − E_W(φ0); both terms are
/// evaluated at the same node count so shared error cancels.
pub fn energy_e(phi: &P1Metric, phi0: &P1Metric, tol: f64) -> Result<EnergyReport, P1Error> {
    let (value, n, err) =
        quad::refine(|n| e_weil_at(phi, n) - e_weil_at(phi0, n), 8, MAX_NODES, tol)?;
    Ok(EnergyReport {
        value: value + phi.shift - phi0.shift,
        quadrature_nodes: n,
        est_error: err,
    })
}

/// h_φ(O(1)) on ℙ¹_ℤ: equals E(φ, Weil).
pub fn metric_height_p1(m: &P1Metric, tol: f64) -> Result<EnergyReport, P1Error> {
    energy_weil(m, tol)
}

/// h_{2ψ+λ}(−K): 4·h_ψ(O(1)) + 2λ by tensor homogeneity and scale
/// equivariance ((λ/2)·(n+1)!·vol with vol(−K) = 2).
pub fn anticanonical_height(ac: &AcMetric, tol: f64) -> Result<f64, P1Error> {
    Ok(4.0 * metric_height_p1(&ac.psi, tol)?.value + 2.0 * ac.shift)
}

/// Normalized height ĥ = h/((n+1)!·vol(−K)) = h_{ac}/4.
pub fn normalized_height(ac: &AcMetric, tol: f64) -> Result<f64, P1Error> {
    Ok(anticanonical_height(ac, tol)? / 4.0)
}

/// ∫_{ℙ¹(ℂ)} e^{−(2ψ+λ)} dA over both charts; scaling μ_{φ+λ} = e^{−λ}μ_φ
/// is applied analytically.
pub fn complex_mass_p1(ac: &AcMetric, tol: f64) -> Result<DensityReport, P1Error> {
    let m = &ac.psi;
    let eval = |n: usize| {
        quad::disc_integral(|r, t| (-2.0 * m.rel_value(Chart::Inner, r, t)).exp(), n)
            + quad::disc_integral(|r, t| (-2.0 * m.rel_value(Chart::Outer, r, t)).exp(), n)
    };
    let (raw, n, err) = quad::refine(eval, 8, MAX_NODES, tol)?;
    let factor = (-ac.shift - 2.0 * m.shift).exp();
    Ok(DensityReport { mass: factor * raw, quadrature_nodes: n, est_error: factor * err })
}

/// ∫_{ℙ¹(ℝ)} e^{−(2ψ+λ)/2} dx: the segment [−1,1] in each chart (the outer
/// chart substitution x = 1/w absorbs the Jacobian into the weight
/// transformation exactly). Scaling factor e^{−λ/2}.
pub fn real_mass_p1(ac: &AcMetric, tol: f64) -> Result<DensityReport, P1Error> {
    let m = &ac.psi;
    let seg = |chart: Chart, n: usize| {
        quad::integrate_sym(
            |x| {
                let theta = if x < 0.0 { std::f64::consts::PI } else { 0.0 };
                (-m.rel_value(chart, x.abs(), theta)).exp()
            },
            n,
        )
    };
    let eval = |n: usize| seg(Chart::Inner, n) + seg(Chart::Outer, n);
    let (raw, n, err) = quad::refine(eval, 8, MAX_NODES, tol)?;
    let factor = (-0.5 * ac.shift - m.shift).exp();
    Ok(DensityReport { mass: factor * raw, quadrature_nodes: n, est_error: factor * err })
}

/// Arithmetic Ding functional 𝒟_ℤ(φ) = −2h_φ(−K)/(n+1)! − vol(−K)·log∫μ_φ;
/// shift-invariant since the height gains 2λ and the log-mass loses λ.
pub fn ding_arith(ac: &AcMetric, tol: f64) -> Result<f64, P1Error> {
    let h = anticanonical_height(ac, tol)?;
    let mass = complex_mass_p1(ac, tol)?.mass;
    Ok(-h - 2.0 * mass.ln())
}

/// Anticanonical height after the volume-normalizing shift λ = log∫μ:
/// 4h_ψ + 2·log(complex mass).
pub fn volume_normalized_ac_height(psi: &P1Metric, tol: f64) -> Result<f64, P1Error> {
    let ac = AcMetric::twice(psi.clone());
    let h = anticanonical_height(&ac, tol)?;
    let mass = complex_mass_p1(&ac, tol)?.mass;
    Ok(h + 2.0 * mass.ln())
}

/// Exact spectral Dirichlet energy (1/2)Σ k(a_k²+b_k²) = (1/2π)∫_D|∇ṽ|².
pub fn dirichlet_energy(v: &FourierFunction) -> f64 {
    let mut e = 0.0;
    for (k, a) in v.cos.iter().enumerate() {
        e += (k + 1) as f64 * a * a;
    }
    for (k, b) in v.sin.iter().enumerate() {
        e += (k + 1) as f64 * b * b;
    }
    0.5 * e
}

/// Moser-Trudinger functional on S¹:
/// mt(v) = −(1/4π)∫_D|∇ṽ|² + ∫v dθ/2π + log∫e^{−v} dθ/2π ≤ 0,
/// with equality exactly on the Möbius pullback family.
pub fn mt_functional(v: &FourierFunction, tol: f64) -> Result<f64, P1Error> {
    let start = (4 * v.max_harmonic()).next_power_of_two().max(64);
    let (log_int, _, _) = quad::refine(
        |n| quad::circle_mean(|t| (-v.eval(t)).exp(), n).ln(),
        start,
        1 << 22,
        tol,
    )?;
    Ok(-dirichlet_energy(v) / 2.0 + v.a0 + log_int)
}

/// ĥ_φ(−K) + log∫_{X(ℝ)}μ_φ against the bound log 2π.
pub fn real_theorem_functional(ac: &AcMetric, tol: f64) -> Result<InequalityReport, P1Error> {
    let value = normalized_height(ac, tol)? + real_mass_p1(ac, tol)?.mass.ln();
    let bound = TAU.ln();
    Ok(InequalityReport { value, bound, slack: bound - value })
}

/// Circle data of the Möbius pullback density: e^{−v_t}dθ/2π = A_t^*(dθ/2π),
/// i.e. v_t(θ) = −log P_t(θ) = −log(1−t²) + log(1 − 2t cos θ + t²), with
/// Fourier coefficients a_0 = −log(1−t²), a_k = −2t^k/k.
pub fn mobius_equality_family(t: f64) -> Result<FourierFunction, P1Error> {
    if !(t.abs() < 1.0) {
        return Err(P1Error::ParameterOutOfRange(format!("mobius parameter |t| < 1, got {t}")));
    }
    if t == 0.0 {
        return Ok(FourierFunction::default());
    }
    let kmax = ((1e-15f64.ln() / t.abs().ln()).ceil() as usize).clamp(1, 4000);
    let cos: Vec<f64> = (1..=kmax).map(|k| -2.0 * t.powi(k as i32) / k as f64).collect();
    Ok(FourierFunction::new(-(1.0 - t * t).ln(), cos, Vec::new()))
}

#[derive(Debug, Clone, Serialize)]
pub struct Su2Case {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub deviation: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Su2Report {
    pub cases: Vec<Su2Case>,
    pub max_deviation: f64,
}

/// Both sides of the Step-1 rotation identity
/// ∫_ℝ e^{−u(x)} (1+x²)^{−1} dx = (1/2)∫_{S¹} e^{−u(T^{−1}(e^{iθ}))} dθ
/// for the Möbius rotation T sending ℝ∪{∞} to S¹; on angles,
/// T^{−1}(e^{iθ}) = tan(π/4 − θ/2).
fn su2_case(name: &str, u: impl Fn(f64) -> f64) -> Result<Su2Case, P1Error> {
    let lhs_eval = |n: usize| {
        quad::integrate_sym(|x| (-u(x)).exp() / (1.0 + x * x), n)
            + quad::integrate_sym(|w| (-u(1.0 / w)).exp() / (1.0 + w * w), n)
    };
    let (lhs, _, _) = quad::refine(lhs_eval, 16, MAX_NODES, 1e-11)?;
    let rhs_eval = |n: usize| {
        0.5 * TAU * quad::circle_mean(|t| (-u((0.25 * TAU / 2.0 - t / 2.0).tan())).exp(), n)
    };
    let (rhs, _, _) = quad::refine(rhs_eval, 32, 1 << 20, 1e-11)?;
    Ok(Su2Case { name: name.into(), lhs, rhs, deviation: (lhs - rhs).abs() })
}

/// Battery of perturbations for the rotation identity; reports per-case sides
/// and the worst deviation.
pub fn su2_rotation_check() -> Result<Su2Report, P1Error> {
    let mut cases = vec![
        su2_case("zero", |_| 0.0)?,
        su2_case("const", |_| 0.7)?,
        su2_case("rational", |x| x * x / (1.0 + x * x))?,
    ];
    for (i, (amp, center, width)) in
        [(0.5, 0.3, 0.8), (-0.4, -0.2, 1.1), (1.0, 0.0, 0.5)].iter().enumerate()
    {
        let (amp, center, width) = (*amp, *center, *width);
        cases.push(su2_case(&format!("bump{i}"), move |x: f64| {
            if x == 0.0 {
                0.0
            } else {
                let t = (x.abs().ln() - center) / width;
                amp * (-t * t).exp()
            }
        })?);
    }
    let max_deviation = cases.iter().map(|c| c.deviation).fold(0.0, f64::max);
    Ok(Su2Report { cases, max_deviation })
}

/// Random Fourier data with harmonics ≤ kmax and coefficients in [−1,1].
pub fn random_fourier(rng: &mut impl Rng, kmax: usize) -> FourierFunction {
    let k = rng.gen_range(1..=kmax);
    FourierFunction::new(
        rng.gen_range(-1.0..1.0),
        (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect(),
    )
}
