//! Exact enumeration of rational points of bounded height, constant fitting
//! for the point-counting asymptotics, and minimal-point search over ℚ and
//! ℚ(i).
//!
//! Anticanonical height convention: for a primitive tuple x the height is
//! H(x) = ‖x‖_p^e · e^{λ/2}, where e = n+1 on ℙⁿ and e = n+2−d for a degree-d
//! hypersurface in ℙ^{n+1} (adjunction), ‖·‖_p is the metric's norm on the
//! moduli, and λ the anticanonical shift. Over ℚ(i) the degree normalization
//! takes the [ℚ(i):ℚ]-root, which on primitive Gaussian tuples again leaves
//! the p-norm of the coordinate moduli.

use num::bigint::BigInt;
use num::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::core::{
    lp_norm, GaussInt, GaussianPoint, HomogeneousForm, MetricSpec, RationalPoint,
};
use crate::localdens::count_primitive_affine;

#[derive(Debug, Error, PartialEq)]
pub enum EnumError {
    #[error("need at least 4 grid values to fit, got {0}")]
    InsufficientData(usize),
    #[error("invalid variety: {0}")]
    InvalidVariety(String),
}

/// What gets counted: all of ℙⁿ or a hypersurface cut out by one form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Variety {
    Projective { n: usize },
    Hypersurface(HomogeneousForm),
}

impl Variety {
    pub fn nvars(&self) -> usize {
        match self {
            Variety::Projective { n } => n + 1,
            Variety::Hypersurface(f) => f.nvars,
        }
    }

    pub fn form(&self) -> Option<&HomogeneousForm> {
        match self {
            Variety::Hypersurface(f) => Some(f),
            Variety::Projective { .. } => None,
        }
    }

    /// Anticanonical exponent on the ambient norm.
    pub fn exponent(&self) -> Result<u32, EnumError> {
        let e = match self {
            Variety::Projective { n } => *n as i64 + 1,
            Variety::Hypersurface(f) => f.nvars as i64 - f.degree as i64,
        };
        if e < 1 {
            return Err(EnumError::InvalidVariety(format!(
                "anticanonical exponent {e} is not positive (variety is not Fano)"
            )));
        }
        Ok(e as u32)
    }
}

/// A linear subvariety given by the common zero locus of integer linear
/// forms; used as an explicit thin-set exclusion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearSubvariety {
    pub forms: Vec<Vec<i64>>,
}

impl LinearSubvariety {
    fn contains(&self, x: &[i64]) -> bool {
        self.forms.iter().all(|l| {
            l.iter().zip(x).map(|(&c, &v)| c as i128 * v as i128).sum::<i128>() == 0
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CountReport {
    pub b_grid: Vec<f64>,
    pub counts: Vec<u64>,
    pub excluded: Vec<LinearSubvariety>,
    pub metric: MetricSpec,
    pub theta_hat: Option<f64>,
    pub theta_stderr: Option<f64>,
    pub r_used: i32,
}

/// Form with i128 coefficients for the inner scan loops; coordinates stay
/// far below overflow at the scan radii used here.
struct FastForm {
    degree: usize,
    terms: Vec<(Vec<u32>, i128)>,
}

impl FastForm {
    fn new(f: &HomogeneousForm) -> Result<Self, EnumError> {
        let mut terms = Vec::with_capacity(f.terms.len());
        for (e, c) in &f.terms {
            let c = i128::try_from(c.clone())
                .map_err(|_| EnumError::InvalidVariety("coefficient exceeds i128".into()))?;
            terms.push((e.clone(), c));
        }
        Ok(FastForm { degree: f.degree as usize, terms })
    }

    /// Coefficients of the univariate restriction in the last variable.
    fn univariate(&self, prefix: &[i64]) -> Vec<i128> {
        let mut c = vec![0i128; self.degree + 1];
        for (exps, coeff) in &self.terms {
            let mut v = *coeff;
            for (j, &e) in exps[..prefix.len()].iter().enumerate() {
                for _ in 0..e {
                    v *= prefix[j] as i128;
                }
            }
            c[exps[prefix.len()] as usize] += v;
        }
        c
    }

    fn eval(&self, x: &[i64]) -> i128 {
        self.terms
            .iter()
            .map(|(exps, c)| {
                exps.iter().zip(x).fold(*c, |v, (&e, &xi)| {
                    (0..e).fold(v, |v, _| v * xi as i128)
                })
            })
            .sum()
    }
}

fn horner(c: &[i128], t: i128) -> i128 {
    c.iter().rev().fold(0i128, |acc, &k| acc * t + k)
}

fn gcd_i64(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

const SIEVE_MODULUS: i64 = 30;

/// Enumerates every primitive canonical representative (first nonzero
/// coordinate positive, gcd 1) with max|x_i| ≤ t, on the variety's zero
/// locus, and feeds it to the visitor. Sharding splits the leading
/// coordinate range; the union over shards is an exact partition.
struct Scanner<'a> {
    k: usize,
    t: i64,
    form: Option<FastForm>,
    exclusions: &'a [LinearSubvariety],
    sieve: bool,
}

impl<'a> Scanner<'a> {
    fn new(
        variety: &Variety,
        t: i64,
        exclusions: &'a [LinearSubvariety],
        sieve: bool,
    ) -> Result<Self, EnumError> {
        let form = variety.form().map(FastForm::new).transpose()?;
        Ok(Scanner { k: variety.nvars(), t, form, exclusions, sieve })
    }

    fn run(&self, shard: usize, shards: usize, visit: &mut impl FnMut(&[i64])) {
        let mut x = vec![0i64; self.k];
        for first in 0..self.k {
            for v in (1..=self.t).filter(|v| (v - 1) as usize % shards == shard) {
                x[first] = v;
                self.descend(&mut x, first + 1, v, visit);
            }
            x[first] = 0;
        }
    }

    fn descend(&self, x: &mut Vec<i64>, depth: usize, g: i64, visit: &mut impl FnMut(&[i64])) {
        if depth + 1 == self.k {
            self.last_level(x, g, visit);
            return;
        }
        if depth == self.k {
            // the leading coordinate was the last one; nothing left to scan
            let on_variety = self.form.as_ref().map_or(true, |f| f.eval(x) == 0);
            if g == 1 && on_variety && self.accept(x) {
                visit(x);
            }
            return;
        }
        for v in -self.t..=self.t {
            x[depth] = v;
            self.descend(x, depth + 1, gcd_i64(g, v), visit);
        }
        x[depth] = 0;
    }

    fn last_level(&self, x: &mut Vec<i64>, g: i64, visit: &mut impl FnMut(&[i64])) {
        let uni = self.form.as_ref().map(|f| f.univariate(&x[..self.k - 1]));
        let allowed: Option<Vec<bool>> = match (&uni, self.sieve) {
            (Some(c), true) => {
                let mut ok = vec![false; SIEVE_MODULUS as usize];
                for (r, slot) in ok.iter_mut().enumerate() {
                    *slot = horner(c, r as i128).rem_euclid(SIEVE_MODULUS as i128) == 0;
                }
                Some(ok)
            }
            _ => None,
        };
        for v in -self.t..=self.t {
            if let Some(ok) = &allowed {
                if !ok[v.rem_euclid(SIEVE_MODULUS) as usize] {
                    continue;
                }
            }
            if let Some(c) = &uni {
                if horner(c, v as i128) != 0 {
                    continue;
                }
            }
            if gcd_i64(g, v) != 1 {
                continue;
            }
            x[self.k - 1] = v;
            if self.accept(x) {
                visit(x);
            }
        }
        x[self.k - 1] = 0;
    }

    fn accept(&self, x: &[i64]) -> bool {
        !self.exclusions.iter().any(|s| s.contains(x))
    }
}

/// H(x) for a primitive integer tuple under the given metric and exponent.
fn tuple_height(x: &[i64], metric: &MetricSpec, exponent: u32) -> f64 {
    let moduli: Vec<f64> = x.iter().map(|&v| v.abs() as f64).collect();
    (exponent as f64 * lp_norm(&moduli, metric.p.p()).ln() + 0.5 * metric.shift).exp()
}

/// Largest per-coordinate bound compatible with H ≤ b: ‖x‖ ≥ max|x_i| for
/// every p-norm.
fn coordinate_bound(b: f64, metric: &MetricSpec, exponent: u32) -> i64 {
    let norm_cap = (b.max(1.0).ln() - 0.5 * metric.shift) / exponent as f64;
    norm_cap.exp().floor().max(0.0) as i64
}

/// Exact N(B) over the grid of bounds: primitive points on the variety with
/// H ≤ B, minus the listed thin-set exclusions.
pub fn count_points(
    variety: &Variety,
    metric: &MetricSpec,
    b_grid: &[f64],
    exclusions: &[LinearSubvariety],
    shards: usize,
    sieve: bool,
) -> Result<CountReport, EnumError> {
    let exponent = variety.exponent()?;
    let b_max = b_grid.iter().cloned().fold(1.0, f64::max);
    let t = coordinate_bound(b_max * (1.0 + 1e-9), metric, exponent);
    let scanner = Scanner::new(variety, t, exclusions, sieve)?;
    let mut counts = vec![0u64; b_grid.len()];
    for shard in 0..shards.max(1) {
        scanner.run(shard, shards.max(1), &mut |x| {
            let h = tuple_height(x, metric, exponent);
            for (slot, &b) in counts.iter_mut().zip(b_grid) {
                if h <= b * (1.0 + 1e-9) {
                    *slot += 1;
                }
            }
        });
    }
    Ok(CountReport {
        b_grid: b_grid.to_vec(),
        counts,
        excluded: exclusions.to_vec(),
        metric: metric.clone(),
        theta_hat: None,
        theta_stderr: None,
        r_used: 0,
    })
}

/// Least-squares fit of N(B) = Θ·B(log B)^r over the tail half of the grid;
/// a large relative stderr flags model misfit.
pub fn fit_theta(report: &CountReport, r: i32) -> Result<(f64, f64), EnumError> {
    let usable: Vec<(f64, u64)> = report
        .b_grid
        .iter()
        .cloned()
        .zip(report.counts.iter().cloned())
        .filter(|&(b, _)| b > 1.0 || r == 0)
        .collect();
    if usable.len() < 4 {
        return Err(EnumError::InsufficientData(usable.len()));
    }
    let tail = &usable[usable.len() / 2..];
    let ys: Vec<f64> = tail
        .iter()
        .map(|&(b, n)| n as f64 / (b * b.ln().powi(r)))
        .collect();
    let mean = ys.iter().sum::<f64>() / ys.len() as f64;
    let var = ys.iter().map(|y| (y - mean) * (y - mean)).sum::<f64>()
        / (ys.len() as f64 - 1.0).max(1.0);
    Ok((mean, (var / ys.len() as f64).sqrt()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NumberField {
    Q,
    Qi,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum FoundPoint {
    Rational(RationalPoint),
    Gaussian(GaussianPoint),
}

#[derive(Debug, Clone, Serialize)]
pub struct MinPointReport {
    pub point: Option<FoundPoint>,
    pub h_min: Option<f64>,
    pub search_bound: f64,
    pub field: NumberField,
    /// Modulus m with no primitive solution mod m: certifies emptiness of
    /// X(ℚ) outright, not just up to the search bound.
    pub certificate: Option<u64>,
    /// ℚ(i) searches bound the infimum over algebraic points from above
    /// only; no completeness claim beyond the scanned shells.
    pub upper_bound_only: bool,
}

/// Local obstruction scan: the smallest p^r (p ≤ 13, p^r ≤ 10⁴) with no
/// primitive solution, if one exists. Counting errors are treated as
/// "no certificate found at this level".
fn obstruction_certificate(f: &HomogeneousForm) -> Option<u64> {
    for p in [2u64, 3, 5, 7, 11, 13] {
        let mut m = p;
        let mut r = 1;
        while m <= 10_000 && r <= 4 {
            match count_primitive_affine(f, p, r) {
                Ok(c) if c.is_zero() => return Some(m),
                Ok(_) => {}
                Err(_) => break,
            }
            m *= p;
            r += 1;
        }
    }
    None
}

/// Minimal-height point by increasing max-coordinate shells; Weil and L^p
/// norms dominate the max coordinate, so a shell at radius t has
/// H ≥ t^e·e^{λ/2} and the search terminates exactly.
pub fn min_point(
    variety: &Variety,
    metric: &MetricSpec,
    b_cap: f64,
    field: NumberField,
) -> Result<MinPointReport, EnumError> {
    let exponent = variety.exponent()?;
    if field == NumberField::Q {
        if let Some(f) = variety.form() {
            if let Some(m) = obstruction_certificate(f) {
                return Ok(MinPointReport {
                    point: None,
                    h_min: None,
                    search_bound: b_cap,
                    field,
                    certificate: Some(m),
                    upper_bound_only: false,
                });
            }
        }
    }
    let mut best: Option<(f64, FoundPoint)> = None;
    let mut t = 1i64;
    loop {
        let shell_floor = (exponent as f64 * (t as f64).ln() + 0.5 * metric.shift).exp();
        let cap = best.as_ref().map_or(b_cap, |(h, _)| h.min(b_cap));
        if shell_floor > cap * (1.0 + 1e-9) {
            break;
        }
        match field {
            NumberField::Q => {
                let scanner = Scanner::new(variety, t, &[], true)?;
                scanner.run(0, 1, &mut |x| {
                    if x.iter().map(|v| v.abs()).max() != Some(t) {
                        return;
                    }
                    let h = tuple_height(x, metric, exponent);
                    if h <= b_cap * (1.0 + 1e-9)
                        && best.as_ref().map_or(true, |(bh, _)| h < *bh)
                    {
                        let coords: Vec<BigInt> = x.iter().map(|&v| BigInt::from(v)).collect();
                        let p = RationalPoint::from_integers(&coords).expect("nonzero tuple");
                        best = Some((h, FoundPoint::Rational(p)));
                    }
                });
            }
            NumberField::Qi => gaussian_shell(variety, metric, exponent, t, b_cap, &mut best)?,
        }
        t += 1;
        if t > 1_000_000 {
            break;
        }
    }
    Ok(MinPointReport {
        h_min: best.as_ref().map(|(h, _)| *h),
        point: best.map(|(_, p)| p),
        search_bound: b_cap,
        field,
        certificate: None,
        upper_bound_only: field == NumberField::Qi,
    })
}

/// One Gaussian shell: all tuples with |Re|,|Im| ≤ t and sup-component
/// exactly t; heights are taken after gcd reduction in ℤ[i].
fn gaussian_shell(
    variety: &Variety,
    metric: &MetricSpec,
    exponent: u32,
    t: i64,
    b_cap: f64,
    best: &mut Option<(f64, FoundPoint)>,
) -> Result<(), EnumError> {
    let k = variety.nvars();
    let fast = variety.form().map(FastForm::new).transpose()?;
    let side = (2 * t + 1) as usize;
    let total = side.pow(2 * k as u32);
    let decode = |mut idx: usize| -> Vec<(i64, i64)> {
        (0..k)
            .map(|_| {
                let re = (idx % side) as i64 - t;
                idx /= side;
                let im = (idx % side) as i64 - t;
                idx /= side;
                (re, im)
            })
            .collect()
    };
    for idx in 0..total {
        let z = decode(idx);
        if z.iter().flat_map(|&(a, b)| [a.abs(), b.abs()]).max() != Some(t) {
            continue;
        }
        if z.iter().all(|&(a, b)| a == 0 && b == 0) {
            continue;
        }
        if let Some(f) = &fast {
            if !gaussian_vanishes(f, &z) {
                continue;
            }
        }
        let raw: Vec<GaussInt> = z.iter().map(|&(a, b)| GaussInt::new(a, b)).collect();
        let point = match GaussianPoint::from_gaussian_integers(&raw) {
            Ok(p) => p,
            Err(_) => continue,
        };
        let moduli: Vec<f64> = point.coords().iter().map(|c| c.modulus()).collect();
        let h = (exponent as f64 * lp_norm(&moduli, metric.p.p()).ln() + 0.5 * metric.shift)
            .exp();
        if h <= b_cap * (1.0 + 1e-9) && best.as_ref().map_or(true, |(bh, _)| h < *bh) {
            *best = Some((h, FoundPoint::Gaussian(point)));
        }
    }
    Ok(())
}

fn gaussian_vanishes(f: &FastForm, z: &[(i64, i64)]) -> bool {
    let (mut re, mut im) = (0i128, 0i128);
    for (exps, c) in &f.terms {
        let (mut tr, mut ti) = (*c, 0i128);
        for (j, &e) in exps.iter().enumerate() {
            for _ in 0..e {
                let (zr, zi) = (z[j].0 as i128, z[j].1 as i128);
                (tr, ti) = (tr * zr - ti * zi, tr * zi + ti * zr);
            }
        }
        re += tr;
        im += ti;
    }
    re == 0 && im == 0
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthRow {
    pub a: i64,
    pub h_min: Option<f64>,
    pub a_pow: f64,
    pub certificate: Option<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthReport {
    pub rows: Vec<GrowthRow>,
    /// Log-log slope of H_min against a over the rows with points; fibers
    /// certified empty have infinite minimal height and only strengthen the
    /// lower-bound trend.
    pub slope: f64,
}

/// Minimal heights along the diagonal family −a·x0^d + x1^d + … = 0 in
/// ℙ^{n+1}, with the elementary trend H_min ≳ a^{1/d}.
pub fn min_height_growth(
    d: u32,
    n: usize,
    a_grid: &[i64],
    metric: &MetricSpec,
    b_cap: f64,
) -> Result<GrowthReport, EnumError> {
    let mut rows = Vec::new();
    for &a in a_grid {
        let mut coeffs = vec![1i64; n + 2];
        coeffs[0] = -a;
        let f = crate::core::DiagonalForm::from_i64(d, n, &coeffs).to_homogeneous();
        let report = min_point(&Variety::Hypersurface(f), metric, b_cap, NumberField::Q)?;
        rows.push(GrowthRow {
            a,
            h_min: report.h_min,
            a_pow: (a as f64).powf(1.0 / d as f64),
            certificate: report.certificate,
        });
    }
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| r.h_min.map(|h| ((r.a as f64).ln(), h.ln())))
        .collect();
    if pts.len() < 2 {
        return Err(EnumError::InsufficientData(pts.len()));
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / pts.len() as f64;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / pts.len() as f64;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Ok(GrowthReport { rows, slope: sxy / sxx })
}
