//! C ABI for the localzeta verification library: opaque handles, error
//! codes, and flat complex returns so other languages can bind the gamma
//! calculus, the scattering scalars, and the suite runner.
//!
//! Conventions:
//!   - every function returns an `LzStatus`; outputs go through pointers;
//!   - complex numbers pass as (re, im) pairs of doubles;
//!   - handles returned by `lz_*_new` functions must be released with the
//!     matching `lz_*_free`; passing NULL where a handle is expected yields
//!     `LZ_STATUS_NULL_ARGUMENT`.

use localzeta::cases::{builtin_case_table, find_case, mu_x};
use localzeta::config::RunConfig;
use localzeta::field::{AdditiveCharacter, MultiplicativeCharacter};
use localzeta::gamma::{gamma_padic_unramified, gamma_real, GammaProduct, GammaValue};
use localzeta::report::Report;
use localzeta::suites::run_suites;
use localzeta::C64;
use std::ffi::{c_char, CStr};
use std::ptr;

/// Status codes of the C interface.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LzStatus {
    /// Success.
    Ok = 0,
    /// A pole of the evaluated quantity; no value was produced.
    Pole = 1,
    /// Invalid argument (domain error, unknown label, bad configuration).
    InvalidArgument = 2,
    /// A required pointer argument was NULL.
    NullArgument = 3,
    /// Evaluation was refused (odd character on a half-integral coefficient).
    Refused = 4,
    /// Internal numerical failure.
    Numerical = 5,
}

fn status_of(err: &localzeta::Error) -> LzStatus {
    match err {
        localzeta::Error::Pole { .. } => LzStatus::Pole,
        localzeta::Error::Refused(_) => LzStatus::Refused,
        localzeta::Error::Domain(_) | localzeta::Error::Config(_) | localzeta::Error::Data(_) => {
            LzStatus::InvalidArgument
        }
        _ => LzStatus::Numerical,
    }
}

/// Opaque formal gamma product.
pub struct LzGammaProduct {
    inner: GammaProduct,
}

/// Opaque verification report.
pub struct LzReport {
    inner: Report,
}

/// Real-place gamma factor gamma(chi, s, psi) for chi = sgn^parity |.|^{z}
/// and psi(x) = exp(i hbar x). Writes the value to (out_re, out_im).
#[no_mangle]
pub extern "C" fn lz_gamma_real(
    parity: u32,
    z_re: f64,
    z_im: f64,
    s_re: f64,
    s_im: f64,
    hbar: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> LzStatus {
    if out_re.is_null() || out_im.is_null() {
        return LzStatus::NullArgument;
    }
    let psi = match AdditiveCharacter::new(hbar.abs(), if hbar >= 0.0 { 1 } else { -1 }) {
        Ok(p) => p,
        Err(e) => return status_of(&e),
    };
    let chi = MultiplicativeCharacter::new((parity % 2) as u8, C64::new(z_re, z_im));
    match gamma_real(&chi, C64::new(s_re, s_im), &psi) {
        GammaValue::Value(v) => {
            unsafe {
                *out_re = v.re;
                *out_im = v.im;
            }
            LzStatus::Ok
        }
        GammaValue::Pole { .. } => LzStatus::Pole,
    }
}

/// Unramified p-adic gamma factor for chi = |.|_p^{z}.
#[no_mangle]
pub extern "C" fn lz_gamma_padic(
    p: u64,
    z_re: f64,
    z_im: f64,
    s_re: f64,
    s_im: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> LzStatus {
    if out_re.is_null() || out_im.is_null() {
        return LzStatus::NullArgument;
    }
    if p < 2 {
        return LzStatus::InvalidArgument;
    }
    match gamma_padic_unramified(p, C64::new(z_re, z_im), C64::new(s_re, s_im)) {
        GammaValue::Value(v) => {
            unsafe {
                *out_re = v.re;
                *out_im = v.im;
            }
            LzStatus::Ok
        }
        GammaValue::Pole { .. } => LzStatus::Pole,
    }
}

/// Build the scattering scalar mu_X for a case label of the rank-one table
/// (A1, An, Bn, Cn, F4, G2, D2, Dn, D4pp, B3pp). The handle must be freed
/// with `lz_product_free`.
#[no_mangle]
pub extern "C" fn lz_mu_x_new(label: *const c_char, out: *mut *mut LzGammaProduct) -> LzStatus {
    if label.is_null() || out.is_null() {
        return LzStatus::NullArgument;
    }
    let label = match unsafe { CStr::from_ptr(label) }.to_str() {
        Ok(s) => s,
        Err(_) => return LzStatus::InvalidArgument,
    };
    let table = builtin_case_table();
    let case = match find_case(&table, label) {
        Ok(c) => c,
        Err(e) => return status_of(&e),
    };
    let boxed = Box::new(LzGammaProduct { inner: mu_x(case) });
    unsafe {
        *out = Box::into_raw(boxed);
    }
    LzStatus::Ok
}

/// Number of gamma atoms in a product.
#[no_mangle]
pub extern "C" fn lz_product_len(prod: *const LzGammaProduct, out: *mut usize) -> LzStatus {
    if prod.is_null() || out.is_null() {
        return LzStatus::NullArgument;
    }
    unsafe {
        *out = (*prod).inner.atoms.len();
    }
    LzStatus::Ok
}

/// Evaluate a product at the even unitary spectral character |.|^{i t} and
/// the standard psi.
#[no_mangle]
pub extern "C" fn lz_product_eval_unitary(
    prod: *const LzGammaProduct,
    t: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> LzStatus {
    if prod.is_null() || out_re.is_null() || out_im.is_null() {
        return LzStatus::NullArgument;
    }
    let chi = [MultiplicativeCharacter::unitary(t)];
    let psi = AdditiveCharacter::standard();
    match unsafe { &(*prod).inner }.eval(&chi, &psi) {
        Ok(GammaValue::Value(v)) => {
            unsafe {
                *out_re = v.re;
                *out_im = v.im;
            }
            LzStatus::Ok
        }
        Ok(GammaValue::Pole { .. }) => LzStatus::Pole,
        Err(e) => status_of(&e),
    }
}

/// Replace psi by psi(a .) in a product, returning a new handle.
#[no_mangle]
pub extern "C" fn lz_product_rescale_psi(
    prod: *const LzGammaProduct,
    a: f64,
    out: *mut *mut LzGammaProduct,
) -> LzStatus {
    if prod.is_null() || out.is_null() {
        return LzStatus::NullArgument;
    }
    match unsafe { &(*prod).inner }.rescale_psi(a) {
        Ok(p) => {
            unsafe {
                *out = Box::into_raw(Box::new(LzGammaProduct { inner: p }));
            }
            LzStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Cancel inverse pairs, returning a new handle.
#[no_mangle]
pub extern "C" fn lz_product_simplify(
    prod: *const LzGammaProduct,
    out: *mut *mut LzGammaProduct,
) -> LzStatus {
    if prod.is_null() || out.is_null() {
        return LzStatus::NullArgument;
    }
    let p = unsafe { &(*prod).inner }.simplify();
    unsafe {
        *out = Box::into_raw(Box::new(LzGammaProduct { inner: p }));
    }
    LzStatus::Ok
}

/// Release a product handle.
#[no_mangle]
pub extern "C" fn lz_product_free(prod: *mut LzGammaProduct) {
    if !prod.is_null() {
        drop(unsafe { Box::from_raw(prod) });
    }
}

/// Run a named suite (gamma, scattering, transfer, hankel, symplectic, all)
/// and return a report handle. `slow` enables the GL_3 checks.
#[no_mangle]
pub extern "C" fn lz_run_suite(
    name: *const c_char,
    seed: u64,
    slow: bool,
    out: *mut *mut LzReport,
) -> LzStatus {
    if name.is_null() || out.is_null() {
        return LzStatus::NullArgument;
    }
    let name = match unsafe { CStr::from_ptr(name) }.to_str() {
        Ok(s) => s,
        Err(_) => return LzStatus::InvalidArgument,
    };
    let cfg = RunConfig { seed, slow, ..RunConfig::default() };
    match run_suites(&[name], &cfg) {
        Ok(records) => {
            let report = Report::new(cfg.echo(), seed, records);
            unsafe {
                *out = Box::into_raw(Box::new(LzReport { inner: report }));
            }
            LzStatus::Ok
        }
        Err(e) => status_of(&e),
    }
}

/// Counts of (total, pass, fail, inconclusive) checks in a report.
#[no_mangle]
pub extern "C" fn lz_report_counts(
    report: *const LzReport,
    total: *mut usize,
    pass: *mut usize,
    fail: *mut usize,
    inconclusive: *mut usize,
) -> LzStatus {
    if report.is_null() || total.is_null() || pass.is_null() || fail.is_null() || inconclusive.is_null() {
        return LzStatus::NullArgument;
    }
    let s = unsafe { &(*report).inner.summary };
    unsafe {
        *total = s.total;
        *pass = s.pass;
        *fail = s.fail;
        *inconclusive = s.inconclusive;
    }
    LzStatus::Ok
}

/// Serialize a report as JSON into a caller buffer; writes the required
/// length to `len` (including the NUL terminator). When `buf` is NULL only
/// the length is reported.
#[no_mangle]
pub extern "C" fn lz_report_json(
    report: *const LzReport,
    buf: *mut c_char,
    cap: usize,
    len: *mut usize,
) -> LzStatus {
    if report.is_null() || len.is_null() {
        return LzStatus::NullArgument;
    }
    let json = match unsafe { &(*report).inner }.full_json() {
        Ok(j) => j,
        Err(e) => return status_of(&e),
    };
    let needed = json.len() + 1;
    unsafe {
        *len = needed;
    }
    if buf.is_null() {
        return LzStatus::Ok;
    }
    if cap < needed {
        return LzStatus::InvalidArgument;
    }
    unsafe {
        ptr::copy_nonoverlapping(json.as_ptr(), buf as *mut u8, json.len());
        *buf.add(json.len()) = 0;
    }
    LzStatus::Ok
}

/// Release a report handle.
#[no_mangle]
pub extern "C" fn lz_report_free(report: *mut LzReport) {
    if !report.is_null() {
        drop(unsafe { Box::from_raw(report) });
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CString;

    #[test]
    fn gamma_real_roundtrip() {
        let mut re = 0.0;
        let mut im = 0.0;
        let st = lz_gamma_real(0, 0.0, 0.0, 0.5, 0.0, std::f64::consts::TAU, &mut re, &mut im);
        assert_eq!(st, LzStatus::Ok);
        assert!((re - 1.0).abs() < 1e-12 && im.abs() < 1e-12);
        // pole flag
        let st = lz_gamma_real(0, 0.0, 0.0, 1.0, 0.0, std::f64::consts::TAU, &mut re, &mut im);
        assert_eq!(st, LzStatus::Pole);
        // null argument
        let st = lz_gamma_real(0, 0.0, 0.0, 0.5, 0.0, std::f64::consts::TAU, std::ptr::null_mut(), &mut im);
        assert_eq!(st, LzStatus::NullArgument);
    }

    #[test]
    fn padic_value() {
        let mut re = 0.0;
        let mut im = 0.0;
        let st = lz_gamma_padic(2, 0.0, 0.0, 2.0, 0.0, &mut re, &mut im);
        assert_eq!(st, LzStatus::Ok);
        assert!((re + 0.75).abs() < 1e-13);
        assert_eq!(lz_gamma_padic(1, 0.0, 0.0, 2.0, 0.0, &mut re, &mut im), LzStatus::InvalidArgument);
    }

    #[test]
    fn product_lifecycle() {
        let label = CString::new("A1").unwrap();
        let mut prod: *mut LzGammaProduct = std::ptr::null_mut();
        assert_eq!(lz_mu_x_new(label.as_ptr(), &mut prod), LzStatus::Ok);
        let mut n = 0usize;
        assert_eq!(lz_product_len(prod, &mut n), LzStatus::Ok);
        assert_eq!(n, 3);
        let mut re = 0.0;
        let mut im = 0.0;
        assert_eq!(lz_product_eval_unitary(prod, 0.7, &mut re, &mut im), LzStatus::Ok);
        assert!((re * re + im * im).sqrt() > 0.0);
        let mut scaled: *mut LzGammaProduct = std::ptr::null_mut();
        assert_eq!(lz_product_rescale_psi(prod, 2.0, &mut scaled), LzStatus::Ok);
        let mut simp: *mut LzGammaProduct = std::ptr::null_mut();
        assert_eq!(lz_product_simplify(prod, &mut simp), LzStatus::Ok);
        lz_product_free(simp);
        lz_product_free(scaled);
        lz_product_free(prod);
        // unknown label
        let bad = CString::new("Z9").unwrap();
        let mut p2: *mut LzGammaProduct = std::ptr::null_mut();
        assert_eq!(lz_mu_x_new(bad.as_ptr(), &mut p2), LzStatus::InvalidArgument);
    }
}
