//! Exact solution counting for congruences f(x) ≡ 0 mod p^r.
//!
//! Strategy dispatch: closed forms for quadratics at odd p (via exact
//! diagonalization mod p^r), histogram convolution for diagonal forms with a
//! small modulus, FFT character sums for diagonal forms at r = 1 (with an
//! integrality guard), and budgeted enumeration with Hensel lifting otherwise.

use num::bigint::BigInt;
use num::One;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use super::LocalError;
use crate::core::HomogeneousForm;

pub(crate) const DEFAULT_BUDGET: u64 = 20_000_000;
const CONV_LIMIT: u64 = 8192;

#[inline]
fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, a, m);
        }
        a = mulmod(a, a, m);
        e >>= 1;
    }
    acc
}

fn modinv(a: u64, m: u64) -> u64 {
    // extended Euclid; a must be a unit mod m
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    assert_eq!(old_r, 1, "not a unit");
    (old_s.rem_euclid(m as i128)) as u64
}

pub(crate) fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn val_p(mut x: u64, p: u64, cap: u32) -> u32 {
    if x == 0 {
        return cap;
    }
    let mut v = 0;
    while v < cap && x % p == 0 {
        x /= p;
        v += 1;
    }
    v
}

/// A form with coefficients reduced modulo m, restricted to its active
/// variables (variables with no nonzero term are counted as free outside).
struct ModForm {
    m: u64,
    k: usize,
    terms: Vec<(Vec<u32>, u64)>,
}

impl ModForm {
    /// Returns the reduced form on active variables and the number of
    /// inactive (free) variables.
    fn new(f: &HomogeneousForm, m: u64) -> (ModForm, usize) {
        let mb = BigInt::from(m);
        let reduced: Vec<(Vec<u32>, u64)> = f
            .terms
            .iter()
            .filter_map(|(exps, c)| {
                let cm = ((c % &mb) + &mb) % &mb;
                let cm = u64::try_from(cm).unwrap();
                (cm != 0).then(|| (exps.clone(), cm))
            })
            .collect();
        let active: Vec<usize> = (0..f.nvars)
            .filter(|&j| reduced.iter().any(|(e, _)| e[j] > 0))
            .collect();
        let terms = reduced
            .iter()
            .map(|(e, c)| (active.iter().map(|&j| e[j]).collect(), *c))
            .collect();
        let free = f.nvars - active.len();
        (ModForm { m, k: active.len(), terms }, free)
    }

    fn eval(&self, x: &[u64]) -> u64 {
        let mut acc = 0u64;
        for (exps, c) in &self.terms {
            let mut t = *c;
            for (j, &e) in exps.iter().enumerate() {
                if e > 0 {
                    t = mulmod(t, powmod(x[j], e as u64, self.m), self.m);
                }
            }
            acc = (acc + t) % self.m;
        }
        acc
    }

    /// Partial derivatives reduced mod m.
    fn gradient(&self) -> Vec<ModForm> {
        (0..self.k)
            .map(|j| {
                let terms: Vec<(Vec<u32>, u64)> = self
                    .terms
                    .iter()
                    .filter_map(|(exps, c)| {
                        if exps[j] == 0 {
                            return None;
                        }
                        let mut e = exps.clone();
                        e[j] -= 1;
                        let c = mulmod(*c, exps[j] as u64 % self.m, self.m);
                        (c != 0).then_some((e, c))
                    })
                    .collect();
                ModForm { m: self.m, k: self.k, terms }
            })
            .collect()
    }

    fn diagonal(&self) -> Option<Vec<(usize, u64)>> {
        let mut out = Vec::new();
        for (exps, c) in &self.terms {
            let nz: Vec<usize> = (0..self.k).filter(|&j| exps[j] > 0).collect();
            if nz.len() != 1 {
                return None;
            }
            out.push((nz[0], *c));
        }
        let mut seen = vec![false; self.k];
        for &(j, _) in &out {
            if seen[j] {
                return None;
            }
            seen[j] = true;
        }
        Some(out)
    }
}

/// Number of x ∈ (ℤ/p^r)^k with f(x) ≡ 0.
pub(crate) fn count_affine(
    f: &HomogeneousForm,
    p: u64,
    r: u32,
    budget: u64,
) -> Result<BigInt, LocalError> {
    if !is_prime(p) {
        return Err(LocalError::NotPrime(p));
    }
    if r == 0 || (r as f64) * (p as f64).log2() > 62.0 {
        return Err(LocalError::BudgetExceeded { p, r });
    }
    let m = p.pow(r);
    let (g, free) = ModForm::new(f, m);
    let multiplier = BigInt::from(m).pow(free as u32);
    if g.terms.is_empty() {
        return Ok(multiplier);
    }
    let core = count_active(&g, f.degree, p, r, m, budget)?;
    Ok(core * multiplier)
}

/// Direct enumeration engine, for cross-checking the specialized paths.
#[cfg(test)]
pub(crate) fn count_affine_via_brute(
    f: &HomogeneousForm,
    p: u64,
    r: u32,
    budget: u64,
) -> Result<BigInt, LocalError> {
    let m = p.pow(r);
    let (g, free) = ModForm::new(f, m);
    let multiplier = BigInt::from(m).pow(free as u32);
    if g.terms.is_empty() {
        return Ok(multiplier);
    }
    Ok(count_brute(&g, budget)? * multiplier)
}

/// Convolution engine regardless of modulus size, for cross-checking.
#[cfg(test)]
pub(crate) fn count_affine_via_convolution(
    f: &HomogeneousForm,
    p: u64,
    r: u32,
) -> Result<BigInt, LocalError> {
    let m = p.pow(r);
    let (g, free) = ModForm::new(f, m);
    let multiplier = BigInt::from(m).pow(free as u32);
    if g.terms.is_empty() {
        return Ok(multiplier);
    }
    let diag = g.diagonal().ok_or(LocalError::BudgetExceeded { p, r })?;
    Ok(count_convolution(&diag, g_degree(&g), m, g.k) * multiplier)
}

/// FFT engine directly, for cross-checking at small primes.
#[cfg(test)]
pub(crate) fn count_affine_via_fft(f: &HomogeneousForm, p: u64) -> Option<BigInt> {
    let (g, free) = ModForm::new(f, p);
    let diag = g.diagonal()?;
    let core = count_fft(&diag, g_degree(&g), p, g.k)?;
    Some(core * BigInt::from(p).pow(free as u32))
}

#[cfg(test)]
fn g_degree(g: &ModForm) -> u32 {
    g.terms[0].0.iter().sum()
}

/// Hensel-lifting engine, for cross-checking the specialized paths.
#[cfg(test)]
pub(crate) fn count_affine_via_lifting(
    f: &HomogeneousForm,
    p: u64,
    r: u32,
    budget: u64,
) -> Result<BigInt, LocalError> {
    let m = p.pow(r);
    let (g, free) = ModForm::new(f, m);
    let multiplier = BigInt::from(m).pow(free as u32);
    if g.terms.is_empty() {
        return Ok(multiplier);
    }
    Ok(count_lifting(&g, p, r, budget)? * multiplier)
}

fn count_active(
    g: &ModForm,
    degree: u32,
    p: u64,
    r: u32,
    m: u64,
    budget: u64,
) -> Result<BigInt, LocalError> {
    if degree == 2 && p % 2 == 1 {
        return Ok(count_quadratic(g, p, r, m));
    }
    if let Some(diag) = g.diagonal() {
        if m <= 1024 || (r > 1 && m <= CONV_LIMIT) {
            return Ok(count_convolution(&diag, degree, m, g.k));
        }
        if r == 1 {
            if let Some(n) = count_fft(&diag, degree, p, g.k) {
                return Ok(n);
            }
            if m <= CONV_LIMIT {
                return Ok(count_convolution(&diag, degree, m, g.k));
            }
        }
    }
    if r == 1 {
        return count_brute(g, budget);
    }
    count_lifting(g, p, r, budget)
}

fn count_convolution(diag: &[(usize, u64)], degree: u32, m: u64, k: usize) -> BigInt {
    let mu = m as usize;
    let mut acc = vec![0u128; mu];
    acc[0] = 1;
    let mut hist = vec![0u64; mu];
    for &(_, c) in diag {
        hist.iter_mut().for_each(|h| *h = 0);
        for x in 0..m {
            let v = mulmod(c, powmod(x, degree as u64, m), m);
            hist[v as usize] += 1;
        }
        let mut next = vec![0u128; mu];
        for (v, &a) in acc.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (w, &h) in hist.iter().enumerate() {
                if h == 0 {
                    continue;
                }
                let idx = v + w;
                let idx = if idx >= mu { idx - mu } else { idx };
                next[idx] += a * h as u128;
            }
        }
        acc = next;
    }
    // free active variables (none: diag covers all active vars by construction,
    // but guard anyway)
    let covered = diag.len();
    BigInt::from(acc[0]) * BigInt::from(m).pow((k - covered) as u32)
}

/// Character-sum count over 𝔽_p for diagonal forms:
/// N = (1/p) Σ_t ∏_i Σ_x e(t·a_i x^d / p). Returns None if the integrality
/// guard fails.
fn count_fft(diag: &[(usize, u64)], degree: u32, p: u64, k: usize) -> Option<BigInt> {
    let pu = p as usize;
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(pu);
    let mut transforms: Vec<Vec<Complex64>> = Vec::with_capacity(diag.len());
    for &(_, c) in diag {
        let mut buf = vec![Complex64::new(0.0, 0.0); pu];
        for x in 0..p {
            let v = mulmod(c, powmod(x, degree as u64, p), p);
            buf[v as usize].re += 1.0;
        }
        fft.process(&mut buf);
        transforms.push(buf);
    }
    let mut sum = Complex64::new(0.0, 0.0);
    for t in 0..pu {
        let mut prod = Complex64::new(1.0, 0.0);
        for tr in &transforms {
            prod *= tr[t];
        }
        sum += prod;
    }
    let n = sum.re / p as f64;
    let rounded = n.round();
    let scale = (p as f64).powi(diag.len() as i32 - 1).max(1.0);
    if (n - rounded).abs() > 1e-3 * scale.sqrt().max(1.0) || rounded < 0.0 {
        return None;
    }
    let count = BigInt::from(rounded as u128);
    Some(count * BigInt::from(p).pow((k - diag.len()) as u32))
}

fn count_brute(g: &ModForm, budget: u64) -> Result<BigInt, LocalError> {
    let m = g.m;
    let states = (m as f64).powi(g.k as i32);
    if states > budget as f64 {
        return Err(LocalError::BudgetExceeded { p: m, r: 1 });
    }
    let mut x = vec![0u64; g.k];
    let mut count: u64 = 0;
    'outer: loop {
        if g.eval(&x) == 0 {
            count += 1;
        }
        for j in 0..g.k {
            x[j] += 1;
            if x[j] < m {
                continue 'outer;
            }
            x[j] = 0;
        }
        break;
    }
    Ok(BigInt::from(count))
}

/// Hensel-style counting for r ≥ 2: smooth mod-p solutions lift p^{k−1} to
/// one per level; singular ones are enumerated level by level.
fn count_lifting(g: &ModForm, p: u64, r: u32, budget: u64) -> Result<BigInt, LocalError> {
    let k = g.k;
    let pk = (p as f64).powi(k as i32);
    if pk > budget as f64 {
        return Err(LocalError::BudgetExceeded { p, r });
    }
    let (gp, _) = restrict(g, p);
    let grads = gp.gradient();
    let mut smooth: u64 = 0;
    let mut frontier: Vec<Vec<u64>> = Vec::new();
    let mut x = vec![0u64; k];
    'outer: loop {
        if gp.eval(&x) == 0 {
            if grads.iter().any(|d| d.eval(&x) != 0) {
                smooth += 1;
            } else {
                frontier.push(x.clone());
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
    let mut total =
        BigInt::from(smooth) * BigInt::from(p).pow((r - 1) * (k as u32 - 1));
    let mut modulus = p;
    for level in 1..r {
        if frontier.is_empty() {
            break;
        }
        let work = frontier.len() as f64 * pk;
        if work > budget as f64 {
            return Err(LocalError::BudgetExceeded { p, r });
        }
        let next_modulus = modulus * p;
        let (gm, _) = restrict(g, next_modulus);
        let last = level + 1 == r;
        let mut next: Vec<Vec<u64>> = Vec::new();
        let mut survivors: u64 = 0;
        for s in &frontier {
            let mut e = vec![0u64; k];
            'lift: loop {
                let t: Vec<u64> = s
                    .iter()
                    .zip(&e)
                    .map(|(&si, &ei)| si + modulus * ei)
                    .collect();
                if gm.eval(&t) == 0 {
                    if last {
                        survivors += 1;
                    } else {
                        next.push(t);
                    }
                }
                for j in 0..k {
                    e[j] += 1;
                    if e[j] < p {
                        continue 'lift;
                    }
                    e[j] = 0;
                }
                break;
            }
        }
        if last {
            total += BigInt::from(survivors);
            frontier.clear();
        } else {
            frontier = next;
        }
        modulus = next_modulus;
    }
    if r == 1 {
        total += BigInt::from(frontier.len() as u64);
    }
    Ok(total)
}

/// Reduce an already-active ModForm to a smaller modulus (keeping the same
/// variable set).
fn restrict(g: &ModForm, m: u64) -> (ModForm, usize) {
    let terms: Vec<(Vec<u32>, u64)> = g
        .terms
        .iter()
        .filter_map(|(e, c)| {
            let cm = c % m;
            (cm != 0).then(|| (e.clone(), cm))
        })
        .collect();
    (ModForm { m, k: g.k, terms }, 0)
}

fn legendre(a: u64, p: u64) -> i64 {
    let a = a % p;
    if a == 0 {
        return 0;
    }
    let s = powmod(a, (p - 1) / 2, p);
    if s == 1 {
        1
    } else {
        -1
    }
}

/// Number of solutions of a nondegenerate diagonal quadratic Σ u_i x_i² ≡ 0
/// over 𝔽_p^s, all u_i units.
fn quadratic_closed_form(units: &[u64], p: u64) -> BigInt {
    let s = units.len();
    if s == 0 {
        return BigInt::one();
    }
    if s % 2 == 1 {
        return BigInt::from(p).pow(s as u32 - 1);
    }
    let mut disc = 1u64;
    for &u in units {
        disc = mulmod(disc, u, p);
    }
    // χ((−1)^{s/2} Π u_i)
    if (s / 2) % 2 == 1 {
        disc = mulmod(disc, p - 1, p);
    }
    let chi = legendre(disc, p);
    let main = BigInt::from(p).pow(s as u32 - 1);
    let secondary = BigInt::from(p - 1) * BigInt::from(p).pow(s as u32 / 2 - 1);
    match chi {
        1 => main + secondary,
        -1 => main - secondary,
        _ => unreachable!("discriminant is a unit"),
    }
}

/// Quadratic forms at odd p: diagonalize exactly mod p^r by congruence
/// transformations, then count the diagonal form recursively.
fn count_quadratic(g: &ModForm, p: u64, r: u32, m: u64) -> BigInt {
    let k = g.k;
    let inv2 = modinv(2 % m, m);
    let mut a = vec![vec![0u64; k]; k];
    for (exps, c) in &g.terms {
        let nz: Vec<(usize, u32)> =
            (0..k).filter(|&j| exps[j] > 0).map(|j| (j, exps[j])).collect();
        match nz.as_slice() {
            [(i, 2)] => a[*i][*i] = (a[*i][*i] + c) % m,
            [(i, 1), (j, 1)] => {
                let half = mulmod(*c, inv2, m);
                a[*i][*j] = (a[*i][*j] + half) % m;
                a[*j][*i] = (a[*j][*i] + half) % m;
            }
            _ => unreachable!("degree-2 form"),
        }
    }
    let diag = diagonalize_symmetric(&mut a, p, r, m);
    let exps_units: Vec<(u32, u64)> = diag
        .iter()
        .map(|&d| {
            let v = val_p(d, p, r);
            if v >= r {
                (r, 1)
            } else {
                (v, d / p.pow(v))
            }
        })
        .collect();
    count_diag_quadratic(&exps_units, p, r)
}

/// Congruence-diagonalization of a symmetric matrix mod m = p^r, p odd.
fn diagonalize_symmetric(a: &mut [Vec<u64>], p: u64, r: u32, m: u64) -> Vec<u64> {
    let k = a.len();
    let mut diag = Vec::with_capacity(k);
    for i in 0..k {
        // locate minimal-valuation entry in the trailing block
        let mut best: Option<(usize, usize, u32)> = None;
        for j in i..k {
            for l in j..k {
                let v = val_p(a[j][l], p, r);
                if v < r && best.map_or(true, |(_, _, bv)| v < bv) {
                    best = Some((j, l, v));
                }
            }
        }
        let Some((j, l, v)) = best else {
            for _ in i..k {
                diag.push(0);
            }
            return diag;
        };
        if j == l {
            swap_sym(a, i, j);
        } else {
            // create a pivot at (l,l): col_l ± col_j (and symmetric row op)
            let plus = (a[l][l] + a[j][j] + 2 * a[j][l] % m) % m;
            let sign_plus = val_p(plus % m, p, r) == v;
            add_sym(a, l, j, if sign_plus { 1 } else { m - 1 }, m);
            debug_assert_eq!(val_p(a[l][l], p, r), v);
            swap_sym(a, i, l);
        }
        let d = a[i][i];
        let u = d / p.pow(v);
        let uinv = modinv(u % m, m);
        for j2 in i + 1..k {
            if a[j2][i] == 0 {
                continue;
            }
            debug_assert!(val_p(a[j2][i], p, r) >= v);
            let factor = mulmod(a[j2][i] / p.pow(v), uinv, m);
            // row_j2 -= factor·row_i; col_j2 -= factor·col_i
            add_sym(a, j2, i, (m - factor) % m, m);
        }
        diag.push(d);
    }
    diag
}

/// Symmetric congruence op: row_t += c·row_s and col_t += c·col_s.
fn add_sym(a: &mut [Vec<u64>], t: usize, s: usize, c: u64, m: u64) {
    let k = a.len();
    for col in 0..k {
        a[t][col] = (a[t][col] + mulmod(c, a[s][col], m)) % m;
    }
    for row in 0..k {
        a[row][t] = (a[row][t] + mulmod(c, a[row][s], m)) % m;
    }
}

fn swap_sym(a: &mut [Vec<u64>], i: usize, j: usize) {
    if i == j {
        return;
    }
    a.swap(i, j);
    for row in a.iter_mut() {
        row.swap(i, j);
    }
}

/// Count Σ u_i p^{e_i} x_i² ≡ 0 mod p^r over (ℤ/p^r)^k, u_i units.
fn count_diag_quadratic(coeffs: &[(u32, u64)], p: u64, r: u32) -> BigInt {
    let k = coeffs.len() as u32;
    if r == 0 || k == 0 {
        return BigInt::one();
    }
    let units: Vec<u64> = coeffs.iter().filter(|&&(e, _)| e == 0).map(|&(_, u)| u).collect();
    let s0 = units.len() as u32;
    if r == 1 {
        return quadratic_closed_form(&units, p) * BigInt::from(p).pow(k - s0);
    }
    // solutions with some unit-variable a unit: smooth, Hensel-lift freely
    let smooth_mod_p = (quadratic_closed_form(&units, p) - BigInt::one())
        * BigInt::from(p).pow(k - s0);
    let case_a = smooth_mod_p * BigInt::from(p).pow((r - 1) * (k - 1));
    // all unit-variables ≡ 0 mod p: substitute x = p·y and divide by p
    let reduced: Vec<(u32, u64)> = coeffs
        .iter()
        .map(|&(e, u)| {
            if e == 0 {
                (1.min(r - 1), u % p.pow(r - 1).max(1))
            } else {
                ((e - 1).min(r - 1), u % p.pow(r - 1).max(1))
            }
        })
        .collect();
    let case_b = BigInt::from(p).pow(k - s0) * count_diag_quadratic(&reduced, p, r - 1);
    case_a + case_b
}
