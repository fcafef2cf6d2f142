//! Gauss-Legendre nodes and adaptive node-doubling drivers.

use super::P1Error;

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
pub(crate) fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 1..=n {
        // Tricomi initial guess, then Newton on P_n
        let mut x = (std::f64::consts::PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_and_deriv(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_and_deriv(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((x, w));
    }
    out
}

fn legendre_and_deriv(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// ∫_{-1}^1 f(x) dx by Gauss-Legendre.
pub(crate) fn integrate_sym(f: impl Fn(f64) -> f64, n: usize) -> f64 {
    gauss_legendre(n).iter().map(|&(x, w)| w * f(x)).sum()
}

/// (1/2π)∫_0^{2π} f(θ) dθ by the periodic trapezoid rule.
pub(crate) fn circle_mean(f: impl Fn(f64) -> f64, n: usize) -> f64 {
    let h = std::f64::consts::TAU / n as f64;
    (0..n).map(|j| f(j as f64 * h)).sum::<f64>() / n as f64
}

/// ∫_{unit disc} g(r, θ) dA with a Gauss-Legendre × trapezoid tensor rule.
pub(crate) fn disc_integral(g: impl Fn(f64, f64) -> f64, n: usize) -> f64 {
    let radial = gauss_legendre(n);
    let ntheta = 2 * n;
    let h = std::f64::consts::TAU / ntheta as f64;
    let mut total = 0.0;
    for &(x, w) in &radial {
        let r = 0.5 * (x + 1.0);
        let mut ring = 0.0;
        for j in 0..ntheta {
            ring += g(r, j as f64 * h);
        }
        total += 0.5 * w * r * ring * h;
    }
    total
}

/// Node-doubling driver: evaluates at n = start, 2·start, … until two
/// successive values differ by less than tol.
pub(crate) fn refine(
    eval: impl Fn(usize) -> f64,
    start: usize,
    max_n: usize,
    tol: f64,
) -> Result<(f64, usize, f64), P1Error> {
    let mut n = start;
    let mut prev = eval(n);
    while n < max_n {
        n *= 2;
        let cur = eval(n);
        let err = (cur - prev).abs();
        if err < tol {
            return Ok((cur, n, err));
        }
        prev = cur;
    }
    Err(P1Error::QuadratureFailure { max_nodes: max_n })
}
