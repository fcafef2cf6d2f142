//! C ABI for heightlab. Handles are opaque pointers, every fallible call
//! returns an error code and writes results through out-pointers, and the
//! last error message is kept in thread-local storage. The matching header
//! lives in include/heightlab.h.

use std::cell::RefCell;
use std::ffi::{c_char, c_double, c_int, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
#[cfg(test)]
use std::ptr;

use heightlab::core::{normalize_point, DiagonalForm, MetricSpec};
use heightlab::core::FourierFunction;
use heightlab::enumerate::{min_point, NumberField, Variety};
use heightlab::heights::point_height;
use heightlab::localdens::local_density;
use heightlab::p1lab::{
    complex_mass_p1, dirichlet_energy, mt_functional, normalized_height, real_mass_p1, AcMetric,
    P1Error, P1Metric,
};
use heightlab::verdict::c_n_constant;
use num::bigint::BigInt;
use num::rational::BigRational;

pub const HL_OK: c_int = 0;
pub const HL_ERR_NULL: c_int = 1;
pub const HL_ERR_INPUT: c_int = 2;
pub const HL_ERR_BUDGET: c_int = 3;
pub const HL_ERR_PANIC: c_int = 4;

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: &str) {
    let cleaned: String = msg.chars().filter(|&c| c != '\0').collect();
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(cleaned).unwrap());
}

fn fail(code: c_int, msg: &str) -> c_int {
    set_error(msg);
    code
}

/// Message for the most recent error on this thread. Borrowed pointer, valid
/// until the next failing call on the same thread; never NULL.
#[no_mangle]
pub extern "C" fn hl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

fn guarded(f: impl FnOnce() -> c_int) -> c_int {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(code) => code,
        Err(_) => fail(HL_ERR_PANIC, "internal panic"),
    }
}

/// Opaque metric handle.
pub struct HlMetric {
    spec: MetricSpec,
}

/// kind: 0 = Weil (sup norm), 1 = Fubini-Study (l2), 2 = lp with exponent p.
#[no_mangle]
pub extern "C" fn hl_metric_new(
    kind: c_int,
    p: c_double,
    shift: c_double,
    out: *mut *mut HlMetric,
) -> c_int {
    guarded(|| {
        if out.is_null() {
            return fail(HL_ERR_NULL, "out is NULL");
        }
        let spec = match kind {
            0 => MetricSpec::weil(),
            1 => MetricSpec::fubini_study(),
            2 if p >= 1.0 => MetricSpec::lp(p),
            2 => return fail(HL_ERR_INPUT, "lp exponent must be >= 1"),
            _ => return fail(HL_ERR_INPUT, "unknown metric kind"),
        };
        unsafe { *out = Box::into_raw(Box::new(HlMetric { spec: spec.with_shift(shift) })) };
        HL_OK
    })
}

#[no_mangle]
pub extern "C" fn hl_metric_free(m: *mut HlMetric) {
    if !m.is_null() {
        drop(unsafe { Box::from_raw(m) });
    }
}

/// Height of the rational point (num[0]/den[0] : ... : num[len-1]/den[len-1]).
/// Writes the logarithmic height to *h and the exponential height to *big_h.
#[no_mangle]
pub extern "C" fn hl_point_height(
    metric: *const HlMetric,
    num: *const i64,
    den: *const i64,
    len: usize,
    h: *mut c_double,
    big_h: *mut c_double,
) -> c_int {
    guarded(|| {
        if metric.is_null() || num.is_null() || den.is_null() || h.is_null() || big_h.is_null() {
            return fail(HL_ERR_NULL, "NULL argument");
        }
        if len == 0 {
            return fail(HL_ERR_INPUT, "empty coordinate vector");
        }
        let metric = unsafe { &*metric };
        let num = unsafe { std::slice::from_raw_parts(num, len) };
        let den = unsafe { std::slice::from_raw_parts(den, len) };
        let mut coords = Vec::with_capacity(len);
        for i in 0..len {
            if den[i] == 0 {
                return fail(HL_ERR_INPUT, "zero denominator");
            }
            coords.push(BigRational::new(BigInt::from(num[i]), BigInt::from(den[i])));
        }
        let point = match normalize_point(&coords) {
            Ok(p) => p,
            Err(e) => return fail(HL_ERR_INPUT, &e.to_string()),
        };
        let ph = point_height(&point, &metric.spec);
        unsafe {
            *h = ph.h;
            *big_h = ph.big_h;
        }
        HL_OK
    })
}

/// The sharp constant c_n.
#[no_mangle]
pub extern "C" fn hl_cn_constant(n: u32) -> c_double {
    c_n_constant(n)
}

fn p1_code(e: &P1Error) -> c_int {
    match e {
        P1Error::QuadratureFailure { .. } => HL_ERR_BUDGET,
        _ => HL_ERR_INPUT,
    }
}

/// Normalized anticanonical height, complex mass and real mass on the
/// projective line. base: 0 = Weil, 1 = Fubini-Study; shift applies at the
/// anticanonical level. Any out-pointer may be NULL to skip that quantity.
#[no_mangle]
pub extern "C" fn hl_p1_summary(
    base: c_int,
    shift: c_double,
    tol: c_double,
    h_hat: *mut c_double,
    complex_mass: *mut c_double,
    real_mass: *mut c_double,
) -> c_int {
    guarded(|| {
        let psi = match base {
            0 => P1Metric::weil(),
            1 => P1Metric::fs(),
            _ => return fail(HL_ERR_INPUT, "unknown p1 base"),
        };
        let ac = AcMetric::twice(psi).with_shift(shift);
        if !h_hat.is_null() {
            match normalized_height(&ac, tol) {
                Ok(v) => unsafe { *h_hat = v },
                Err(e) => return fail(p1_code(&e), &e.to_string()),
            }
        }
        if !complex_mass.is_null() {
            match complex_mass_p1(&ac, tol) {
                Ok(r) => unsafe { *complex_mass = r.mass },
                Err(e) => return fail(p1_code(&e), &e.to_string()),
            }
        }
        if !real_mass.is_null() {
            match real_mass_p1(&ac, tol) {
                Ok(r) => unsafe { *real_mass = r.mass },
                Err(e) => return fail(p1_code(&e), &e.to_string()),
            }
        }
        HL_OK
    })
}

/// Moser-Trudinger functional and Dirichlet energy of the trigonometric
/// polynomial a0 + sum_k (cos_c[k] cos((k+1)t) + sin_c[k] sin((k+1)t)).
#[no_mangle]
pub extern "C" fn hl_mt_functional(
    a0: c_double,
    cos_c: *const c_double,
    sin_c: *const c_double,
    harmonics: usize,
    tol: c_double,
    mt: *mut c_double,
    dirichlet: *mut c_double,
) -> c_int {
    guarded(|| {
        if (harmonics > 0 && (cos_c.is_null() || sin_c.is_null())) || mt.is_null() {
            return fail(HL_ERR_NULL, "NULL argument");
        }
        let cos_c = if harmonics == 0 {
            Vec::new()
        } else {
            unsafe { std::slice::from_raw_parts(cos_c, harmonics) }.to_vec()
        };
        let sin_c = if harmonics == 0 {
            Vec::new()
        } else {
            unsafe { std::slice::from_raw_parts(sin_c, harmonics) }.to_vec()
        };
        let v = FourierFunction::new(a0, cos_c, sin_c);
        if !dirichlet.is_null() {
            unsafe { *dirichlet = dirichlet_energy(&v) };
        }
        match mt_functional(&v, tol) {
            Ok(value) => {
                unsafe { *mt = value };
                HL_OK
            }
            Err(e) => fail(p1_code(&e), &e.to_string()),
        }
    })
}

/// Local density mu_p of the diagonal hypersurface a[0] x0^d + ... = 0 in
/// P^{n+1} (pass len = n+2 coefficients).
#[no_mangle]
pub extern "C" fn hl_local_density_diag(
    d: u32,
    a: *const i64,
    len: usize,
    p: u64,
    r_max: u32,
    mu_p: *mut c_double,
    stabilized: *mut c_int,
) -> c_int {
    guarded(|| {
        if a.is_null() || mu_p.is_null() {
            return fail(HL_ERR_NULL, "NULL argument");
        }
        if len < 2 {
            return fail(HL_ERR_INPUT, "need at least 2 coefficients");
        }
        let coeffs = unsafe { std::slice::from_raw_parts(a, len) };
        let form = DiagonalForm::from_i64(d, len - 2, coeffs).to_homogeneous();
        match local_density(&form, p, r_max) {
            Ok(ld) => {
                let num: f64 = ld.mu_p.numer().to_string().parse().unwrap_or(f64::NAN);
                let den: f64 = ld.mu_p.denom().to_string().parse().unwrap_or(f64::NAN);
                unsafe {
                    *mu_p = num / den;
                    if !stabilized.is_null() {
                        *stabilized = ld.stabilized as c_int;
                    }
                }
                HL_OK
            }
            Err(e @ heightlab::localdens::LocalError::BudgetExceeded { .. }) => {
                fail(HL_ERR_BUDGET, &e.to_string())
            }
            Err(e) => fail(HL_ERR_INPUT, &e.to_string()),
        }
    })
}

/// Minimal Weil height of a rational point on the diagonal hypersurface, or
/// an emptiness certificate. On return *found is 1 when a point was found
/// (then *h_min holds its height) and *certificate is a modulus with no
/// primitive solution, or 0 when none was detected.
#[no_mangle]
pub extern "C" fn hl_min_point_diag(
    d: u32,
    a: *const i64,
    len: usize,
    cap: c_double,
    found: *mut c_int,
    h_min: *mut c_double,
    certificate: *mut u64,
) -> c_int {
    guarded(|| {
        if a.is_null() || found.is_null() || h_min.is_null() || certificate.is_null() {
            return fail(HL_ERR_NULL, "NULL argument");
        }
        if len < 2 {
            return fail(HL_ERR_INPUT, "need at least 2 coefficients");
        }
        let coeffs = unsafe { std::slice::from_raw_parts(a, len) };
        let form = DiagonalForm::from_i64(d, len - 2, coeffs).to_homogeneous();
        let variety = Variety::Hypersurface(form);
        match min_point(&variety, &MetricSpec::weil(), cap, NumberField::Q) {
            Ok(report) => {
                unsafe {
                    *found = report.h_min.is_some() as c_int;
                    *h_min = report.h_min.unwrap_or(f64::INFINITY);
                    *certificate = report.certificate.unwrap_or(0);
                }
                HL_OK
            }
            Err(e) => fail(HL_ERR_INPUT, &e.to_string()),
        }
    })
}
