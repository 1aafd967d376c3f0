//! C ABI for the repeller laboratory.
//!
//! The surface is deliberately small and POD-shaped: an opaque lab handle
//! built from `(C, N)`, status codes for every failure mode, log-polar
//! doubles (`log2` magnitude + angle) at the boundary so callers never see
//! the extended-exponent representation, and paired allocate/free functions
//! for every object that crosses the boundary. A C header is generated into
//! `include/repeller.h` at build time.
//!
//! Conventions:
//! - Every function returns a [`RepStatus`]; results land in out-pointers.
//! - Out-pointers are written only on `Ok`.
//! - A thread-local message describes the most recent failure in detail;
//!   fetch it with [`repeller_last_error`].
//! - No function unwinds across the boundary: internal panics are caught
//!   and surfaced as `Internal`.

use repeller::construction::{build_scales, Params, Scales};
use repeller::dimension::{bowen_zero, closed_form_bound, DimError};
use repeller::dynamics::{iterate, Verdict};
use repeller::inverse::preimages;
use repeller::xnum::XComplex;
use std::cell::RefCell;
use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};

/// Result of every API call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RepStatus {
    /// The call succeeded and every out-pointer is filled.
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// Parameters outside their documented ranges.
    InvalidParams = 2,
    /// The computation failed numerically (overflow, lost bracket, contour
    /// through a zero, ...); `repeller_last_error` has the details.
    Numerical = 3,
    /// A mathematical precondition does not hold (e.g. no contraction).
    Domain = 4,
    /// An index was outside the structure it addresses.
    OutOfRange = 5,
    /// A library invariant broke; always a bug worth reporting.
    Internal = 6,
}

/// Opaque laboratory handle: parameters plus the built scale ladder.
pub struct RepLab {
    params: Params,
    scales: Scales,
}

/// One located preimage, in log-polar form plus its annulus index and the
/// local expansion strength.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct RepPreimage {
    /// log2 of the point's magnitude.
    pub log2_mag: f64,
    /// Argument in radians, in (-pi, pi].
    pub angle: f64,
    /// Index j of the annulus containing the point.
    pub region: usize,
    /// log2 |f'| at the point.
    pub f_prime_log2: f64,
}

/// Orbit classification outcome at the ABI: mirrors the library's verdict
/// codes (0 bounded witness, 1 certified escape, 2 undecided).
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RepVerdict {
    BoundedWitness = 0,
    EscapeCertified = 1,
    Undecided = 2,
}

thread_local! {
    static LAST_ERROR: RefCell<Vec<u8>> = const { RefCell::new(Vec::new()) };
}

fn fail(status: RepStatus, msg: impl AsRef<str>) -> RepStatus {
    LAST_ERROR.with(|cell| {
        let mut buf = cell.borrow_mut();
        buf.clear();
        buf.extend_from_slice(msg.as_ref().as_bytes());
        buf.push(0);
    });
    status
}

/// Runs a closure, translating panics into `Internal` instead of unwinding
/// across the ABI.
fn guarded(f: impl FnOnce() -> RepStatus) -> RepStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".to_string());
            fail(RepStatus::Internal, format!("internal panic: {msg}"))
        }
    }
}

/// Copies the most recent error message (UTF-8, NUL-terminated) into `buf`.
///
/// Returns the full length of the message including the terminating NUL.
/// When `cap` is smaller, the copy is truncated but still NUL-terminated;
/// call again with the returned length to get the whole text. A zero return
/// means no error has been recorded on this thread.
///
/// # Safety
/// `buf` must point to at least `cap` writable bytes, or be null (then only
/// the required length is returned).
#[no_mangle]
pub unsafe extern "C" fn repeller_last_error(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|cell| {
        let msg = cell.borrow();
        if msg.is_empty() {
            return 0;
        }
        if !buf.is_null() && cap > 0 {
            let n = msg.len().min(cap);
            std::ptr::copy_nonoverlapping(msg.as_ptr(), buf.cast::<u8>(), n);
            // Guarantee termination even on truncation.
            *buf.add(n - 1) = 0;
        }
        msg.len()
    })
}

/// Builds a laboratory for coefficient `c` and top annulus index `n` with
/// default evaluation settings, and stores the handle in `out`.
///
/// # Safety
/// `out` must be a valid pointer. The returned handle must be released with
/// [`repeller_lab_free`] exactly once.
#[no_mangle]
pub unsafe extern "C" fn repeller_lab_new(c: f64, n: usize, out: *mut *mut RepLab) -> RepStatus {
    if out.is_null() {
        return fail(RepStatus::NullArgument, "out handle pointer is null");
    }
    guarded(|| {
        let params = Params::new(c, n);
        match build_scales(&params) {
            Ok(scales) => {
                let lab = Box::new(RepLab { params, scales });
                unsafe { *out = Box::into_raw(lab) };
                RepStatus::Ok
            }
            Err(e) => fail(
                match e {
                    repeller::construction::BuildError::InvalidParams(_) => {
                        RepStatus::InvalidParams
                    }
                    _ => RepStatus::Numerical,
                },
                e.to_string(),
            ),
        }
    })
}

/// Releases a handle from [`repeller_lab_new`]. Null is a no-op.
///
/// # Safety
/// `lab` must be a handle returned by `repeller_lab_new` that has not been
/// freed already.
#[no_mangle]
pub unsafe extern "C" fn repeller_lab_free(lab: *mut RepLab) {
    if !lab.is_null() {
        drop(unsafe { Box::from_raw(lab) });
    }
}

/// Number of ladder rungs the lab tracks (the truncation order M).
///
/// # Safety
/// `lab` must be a live handle from `repeller_lab_new`.
#[no_mangle]
pub unsafe extern "C" fn repeller_lab_height(lab: *const RepLab) -> usize {
    if lab.is_null() {
        return 0;
    }
    unsafe { &*lab }.scales.m()
}

/// Writes the log2 magnitudes of the k-th rung: the zero `a_k` and the
/// annulus radii `r_k <= a_k <= s_k`. Index 0 is the origin rung, where all
/// of `a_0 = r_0 = 0` report as -infinity.
///
/// # Safety
/// `lab` must be a live handle; the out-pointers must be valid or null
/// (null entries are skipped).
#[no_mangle]
pub unsafe extern "C" fn repeller_lab_scale(
    lab: *const RepLab,
    k: usize,
    a_log2: *mut f64,
    r_log2: *mut f64,
    s_log2: *mut f64,
) -> RepStatus {
    if lab.is_null() {
        return fail(RepStatus::NullArgument, "lab handle is null");
    }
    let sc = &unsafe { &*lab }.scales;
    if k > sc.m() {
        return fail(
            RepStatus::OutOfRange,
            format!("rung {k} is above the ladder height {}", sc.m()),
        );
    }
    guarded(|| {
        let write = |ptr: *mut f64, v: repeller::xnum::XReal| {
            if !ptr.is_null() {
                unsafe { *ptr = v.log2().unwrap_or(f64::NEG_INFINITY) };
            }
        };
        write(a_log2, sc.a(k));
        write(r_log2, sc.r(k));
        write(s_log2, sc.s(k));
        RepStatus::Ok
    })
}

/// Evaluates `f` at the log-polar point `(2^log2_mag, angle)` and writes the
/// image in the same form, plus the relative-error bound of the evaluation.
///
/// # Safety
/// `lab` must be a live handle; non-null out-pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn repeller_eval(
    lab: *const RepLab,
    log2_mag: f64,
    angle: f64,
    out_log2_mag: *mut f64,
    out_angle: *mut f64,
    out_rel_err: *mut f64,
) -> RepStatus {
    if lab.is_null() {
        return fail(RepStatus::NullArgument, "lab handle is null");
    }
    let lab = unsafe { &*lab };
    guarded(|| {
        let z = match XComplex::from_polar(log2_mag, angle) {
            Ok(z) => z,
            Err(e) => return fail(RepStatus::InvalidParams, format!("bad input point: {e}")),
        };
        match repeller::construction::eval_f(&lab.scales, &z) {
            Ok((w, rel)) => match w.polar() {
                Ok((m, a)) => {
                    if !out_log2_mag.is_null() {
                        unsafe { *out_log2_mag = m };
                    }
                    if !out_angle.is_null() {
                        unsafe { *out_angle = a };
                    }
                    if !out_rel_err.is_null() {
                        unsafe { *out_rel_err = rel };
                    }
                    RepStatus::Ok
                }
                Err(e) => fail(RepStatus::Numerical, format!("image left polar range: {e}")),
            },
            Err(e) => fail(RepStatus::Numerical, e.to_string()),
        }
    })
}

/// Classifies the orbit of the log-polar point, writing the verdict and the
/// number of iterations actually inspected.
///
/// # Safety
/// `lab` must be a live handle; non-null out-pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn repeller_classify(
    lab: *const RepLab,
    log2_mag: f64,
    angle: f64,
    max_iter: usize,
    out_verdict: *mut RepVerdict,
    out_steps: *mut usize,
) -> RepStatus {
    if lab.is_null() {
        return fail(RepStatus::NullArgument, "lab handle is null");
    }
    let lab = unsafe { &*lab };
    guarded(|| {
        let z = match XComplex::from_polar(log2_mag, angle) {
            Ok(z) => z,
            Err(e) => return fail(RepStatus::InvalidParams, format!("bad start point: {e}")),
        };
        let rec = iterate(&lab.params, &lab.scales, &z, max_iter);
        let verdict = match rec.verdict {
            Verdict::BoundedWitness { .. } => RepVerdict::BoundedWitness,
            Verdict::EscapeCertified { .. } => RepVerdict::EscapeCertified,
            Verdict::Undecided => RepVerdict::Undecided,
        };
        if !out_verdict.is_null() {
            unsafe { *out_verdict = verdict };
        }
        if !out_steps.is_null() {
            unsafe { *out_steps = rec.points.len() };
        }
        RepStatus::Ok
    })
}

/// Solves `f(b) = a` over the bounded annuli for the log-polar base point
/// `a`, allocating an array of [`RepPreimage`] in canonical order (annulus,
/// then angle). The array must be released with [`repeller_preimages_free`].
///
/// # Safety
/// `lab` must be a live handle; `out` and `out_len` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn repeller_preimages(
    lab: *const RepLab,
    log2_mag: f64,
    angle: f64,
    out: *mut *mut RepPreimage,
    out_len: *mut usize,
) -> RepStatus {
    if lab.is_null() {
        return fail(RepStatus::NullArgument, "lab handle is null");
    }
    if out.is_null() || out_len.is_null() {
        return fail(RepStatus::NullArgument, "output pointers are null");
    }
    let lab = unsafe { &*lab };
    guarded(|| {
        let a = match XComplex::from_polar(log2_mag, angle) {
            Ok(a) => a,
            Err(e) => return fail(RepStatus::InvalidParams, format!("bad base point: {e}")),
        };
        let found = match preimages(&lab.params, &lab.scales, &a) {
            Ok(v) => v,
            Err(e) => return fail(RepStatus::Numerical, e.to_string()),
        };
        let mut rows = Vec::with_capacity(found.len());
        for pre in &found {
            let (m, ang) = match pre.value.polar() {
                Ok(p) => p,
                Err(e) => {
                    return fail(
                        RepStatus::Numerical,
                        format!("preimage left polar range: {e}"),
                    )
                }
            };
            let fp = match pre.f_prime_abs.log2() {
                Ok(v) => v,
                Err(e) => return fail(RepStatus::Numerical, format!("derivative modulus: {e}")),
            };
            rows.push(RepPreimage {
                log2_mag: m,
                angle: ang,
                region: pre.region,
                f_prime_log2: fp,
            });
        }
        let boxed: Box<[RepPreimage]> = rows.into_boxed_slice();
        let len = boxed.len();
        unsafe {
            *out = Box::into_raw(boxed).cast::<RepPreimage>();
            *out_len = len;
        }
        RepStatus::Ok
    })
}

/// Releases an array from [`repeller_preimages`]. Null is a no-op.
///
/// # Safety
/// `ptr`/`len` must come from a single `repeller_preimages` call and must
/// not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn repeller_preimages_free(ptr: *mut RepPreimage, len: usize) {
    if !ptr.is_null() {
        drop(unsafe { Box::from_raw(std::ptr::slice_from_raw_parts_mut(ptr, len)) });
    }
}

/// Computes the closed-form dimension ceiling t* for coefficient `c`
/// (the root of `L^{-t} = 1 - 2^{-t}` with `L = c/(4e)`), without building
/// a lab. Fails with `Domain` when `L <= 1`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn repeller_dimension_ceiling(c: f64, out: *mut f64) -> RepStatus {
    if out.is_null() {
        return fail(RepStatus::NullArgument, "out pointer is null");
    }
    guarded(|| match closed_form_bound(c) {
        Ok(t) => {
            unsafe { *out = t };
            RepStatus::Ok
        }
        Err(e) => fail(
            match e {
                DimError::Domain(_) => RepStatus::Domain,
                _ => RepStatus::Numerical,
            },
            e.to_string(),
        ),
    })
}

/// Finite-depth Bowen dimension estimate: builds the depth-`depth` preimage
/// tree over the log-polar base point and bisects the pressure to its zero
/// inside `[t_lo, t_hi]`.
///
/// # Safety
/// `lab` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn repeller_dimension_estimate(
    lab: *const RepLab,
    log2_mag: f64,
    angle: f64,
    depth: usize,
    t_lo: f64,
    t_hi: f64,
    out: *mut f64,
) -> RepStatus {
    if lab.is_null() {
        return fail(RepStatus::NullArgument, "lab handle is null");
    }
    if out.is_null() {
        return fail(RepStatus::NullArgument, "out pointer is null");
    }
    if depth == 0 {
        return fail(RepStatus::InvalidParams, "depth must be at least 1");
    }
    if !(t_lo > 0.0 && t_lo < t_hi && t_hi <= 2.0) {
        return fail(
            RepStatus::InvalidParams,
            format!("t range must satisfy 0 < t_lo < t_hi <= 2, got ({t_lo}, {t_hi})"),
        );
    }
    let lab = unsafe { &*lab };
    guarded(|| {
        let a = match XComplex::from_polar(log2_mag, angle) {
            Ok(a) => a,
            Err(e) => return fail(RepStatus::InvalidParams, format!("bad base point: {e}")),
        };
        match bowen_zero(&lab.params, &lab.scales, &a, depth, (t_lo, t_hi)) {
            Ok(t) => {
                unsafe { *out = t };
                RepStatus::Ok
            }
            Err(e) => fail(
                match e {
                    DimError::Domain(_) => RepStatus::Domain,
                    _ => RepStatus::Numerical,
                },
                e.to_string(),
            ),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ptr;

    fn lab(c: f64, n: usize) -> *mut RepLab {
        let mut h: *mut RepLab = ptr::null_mut();
        let st = unsafe { repeller_lab_new(c, n, &mut h) };
        assert_eq!(st, RepStatus::Ok);
        assert!(!h.is_null());
        h
    }

    fn last_error() -> String {
        let mut buf = vec![0u8; 256];
        let n = unsafe { repeller_last_error(buf.as_mut_ptr().cast(), buf.len()) };
        assert!(n > 0, "an error message should be recorded");
        let n = n.min(buf.len());
        String::from_utf8_lossy(&buf[..n - 1]).into_owned()
    }

    #[test]
    fn handle_lifecycle_and_ladder_queries() {
        let h = lab(2000.0, 3);
        assert_eq!(
            unsafe { repeller_lab_height(h) },
            11,
            "trunc defaults to N + 8"
        );
        let (mut a, mut r, mut s) = (0.0f64, 0.0f64, 0.0f64);
        let st = unsafe { repeller_lab_scale(h, 1, &mut a, &mut r, &mut s) };
        assert_eq!(st, RepStatus::Ok);
        assert_eq!(a, 0.0, "the first rung is 1, so log2 a_1 = 0");
        assert!(r < a && a < s, "rung radii bracket the zero");
        let st = unsafe { repeller_lab_scale(h, 0, &mut a, &mut r, &mut s) };
        assert_eq!(st, RepStatus::Ok);
        assert_eq!(a, f64::NEG_INFINITY, "the origin rung reports -inf");
        let st = unsafe { repeller_lab_scale(h, 99, &mut a, &mut r, &mut s) };
        assert_eq!(st, RepStatus::OutOfRange);
        assert!(last_error().contains("above the ladder height"));
        unsafe { repeller_lab_free(h) };
        unsafe { repeller_lab_free(ptr::null_mut()) };
    }

    #[test]
    fn invalid_parameters_are_reported_not_panicked() {
        let mut h: *mut RepLab = ptr::null_mut();
        let st = unsafe { repeller_lab_new(-5.0, 3, &mut h) };
        assert_eq!(st, RepStatus::InvalidParams);
        assert!(h.is_null(), "the out handle stays untouched on failure");
        assert!(last_error().contains("positive"));
        assert_eq!(
            unsafe { repeller_lab_new(2000.0, 3, ptr::null_mut()) },
            RepStatus::NullArgument
        );
    }

    #[test]
    fn evaluation_matches_the_library_directly() {
        let h = lab(2000.0, 3);
        let (mut m, mut ang, mut rel) = (0.0f64, 0.0f64, 0.0f64);
        let st = unsafe { repeller_eval(h, 1.0, 0.5, &mut m, &mut ang, &mut rel) };
        assert_eq!(st, RepStatus::Ok);
        let lab_ref = unsafe { &*h };
        let z = XComplex::from_polar(1.0, 0.5).unwrap();
        let (w, rel_direct) = repeller::construction::eval_f(&lab_ref.scales, &z).unwrap();
        let (m_direct, ang_direct) = w.polar().unwrap();
        assert_eq!(m, m_direct);
        assert_eq!(ang, ang_direct);
        assert_eq!(rel, rel_direct);
        unsafe { repeller_lab_free(h) };
    }

    #[test]
    fn classification_crosses_the_boundary() {
        let h = lab(2000.0, 3);
        let mut v = RepVerdict::Undecided;
        let mut steps = 0usize;
        // Deep inside the core disk with a short budget: the orbit is still
        // inside the tracked annuli when the budget runs out, a witness.
        let st = unsafe { repeller_classify(h, -30.0, 0.0, 2, &mut v, &mut steps) };
        assert_eq!(st, RepStatus::Ok);
        assert_eq!(v, RepVerdict::BoundedWitness);
        assert!(steps > 0);
        // In the first gap ring: certified escape.
        let sc = &unsafe { &*h }.scales;
        let gap = (sc.s(1).log2().unwrap() + sc.r(2).log2().unwrap()) / 2.0;
        let st = unsafe { repeller_classify(h, gap, 1.0, 64, &mut v, &mut steps) };
        assert_eq!(st, RepStatus::Ok);
        assert_eq!(v, RepVerdict::EscapeCertified);
        unsafe { repeller_lab_free(h) };
    }

    #[test]
    fn preimage_array_allocates_and_frees() {
        let h = lab(2000.0, 3);
        let mut ptr_out: *mut RepPreimage = ptr::null_mut();
        let mut len = 0usize;
        let st = unsafe { repeller_preimages(h, 0.0, 0.0, &mut ptr_out, &mut len) };
        assert_eq!(st, RepStatus::Ok);
        assert_eq!(len, 4, "a = 1 has one preimage per annulus at N = 3");
        let rows = unsafe { std::slice::from_raw_parts(ptr_out, len) };
        let regions: Vec<usize> = rows.iter().map(|r| r.region).collect();
        assert_eq!(regions, [0, 1, 2, 3]);
        for row in rows {
            assert!(row.angle > -std::f64::consts::PI - 1e-12);
            assert!(row.f_prime_log2 > 0.0, "every branch expands");
        }
        unsafe { repeller_preimages_free(ptr_out, len) };
        unsafe { repeller_preimages_free(ptr::null_mut(), 0) };
        unsafe { repeller_lab_free(h) };
    }

    #[test]
    fn dimension_calls_report_domain_violations() {
        let mut t = 0.0f64;
        let st = unsafe { repeller_dimension_ceiling(2000.0, &mut t) };
        assert_eq!(st, RepStatus::Ok);
        assert!((0.29..0.33).contains(&t), "t* = {t}");
        let st = unsafe { repeller_dimension_ceiling(10.0, &mut t) };
        assert_eq!(st, RepStatus::Domain);
        assert!(last_error().contains("must exceed 1"));

        let h = lab(2000.0, 3);
        let mut t1 = 0.0f64;
        let st = unsafe { repeller_dimension_estimate(h, 0.0, 0.0, 1, 1e-3, 1.5, &mut t1) };
        assert_eq!(st, RepStatus::Ok);
        assert!(t1 > 0.0 && t1 < 1.5);
        let st = unsafe { repeller_dimension_estimate(h, 0.0, 0.0, 1, 0.9, 0.5, &mut t1) };
        assert_eq!(st, RepStatus::InvalidParams);
        unsafe { repeller_lab_free(h) };
    }

    #[test]
    fn truncated_error_messages_stay_nul_terminated() {
        let h = lab(2000.0, 3);
        unsafe { repeller_lab_scale(h, 99, ptr::null_mut(), ptr::null_mut(), ptr::null_mut()) };
        let mut tiny = [0 as c_char; 8];
        let full = unsafe { repeller_last_error(tiny.as_mut_ptr(), tiny.len()) };
        assert!(
            full > tiny.len(),
            "the real message is longer than the buffer"
        );
        assert_eq!(tiny[7], 0, "truncation keeps the terminator");
        let needed = unsafe { repeller_last_error(ptr::null_mut(), 0) };
        assert_eq!(needed, full, "null buffer still reports the length");
        unsafe { repeller_lab_free(h) };
    }
}
