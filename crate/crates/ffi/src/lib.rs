//! C ABI over `lumpgeom`.
//!
//! Every function returns an [`LgStatus`]; results go through out
//! pointers, which are written only on success. After a non-`Ok` status,
//! [`lg_last_error_message`] describes the failure on the calling thread.
//! `mu = INFINITY` selects the limit at infinity where one exists.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use lumpgeom::actions::{self, Mode};
use lumpgeom::metric_profiles::{self, MetricFamily, MetricKind, ModelParams, MuPoint};
use lumpgeom::quadrature::QuadratureOptions;
use lumpgeom::ricci;
use lumpgeom::verify::{run_suite, SuiteConfig};
use lumpgeom::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LgStatus {
    Ok = 0,
    Domain = 1,
    Precondition = 2,
    Dimension = 3,
    Singular = 4,
    Divergent = 5,
    Quadrature = 6,
    NullPointer = 7,
    InvalidArgument = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LgMetric {
    L2 = 0,
    Fs = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LgMode {
    Closed = 0,
    Quadrature = 1,
}

/// A value with its first two `mu`-derivatives.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct LgJet2 {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct LgCoefficients {
    pub a0: f64,
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub a4: f64,
}

/// Opaque metric family handle.
pub struct LgFamily(MetricFamily);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Failure(LgStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Domain(_) => LgStatus::Domain,
            Error::Precondition(_) => LgStatus::Precondition,
            Error::Dimension(_) => LgStatus::Dimension,
            Error::Singular(_) => LgStatus::Singular,
            Error::Divergent(_) => LgStatus::Divergent,
            Error::Quadrature { .. } => LgStatus::Quadrature,
        };
        Failure(status, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> LgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            LgStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(&format!("panic: {msg}"));
            LgStatus::Panic
        }
    }
}

unsafe fn handle<'a>(f: *const LgFamily) -> Result<&'a MetricFamily, Failure> {
    f.as_ref().map(|f| &f.0).ok_or_else(|| Failure(LgStatus::NullPointer, "null family handle".into()))
}

unsafe fn write<T>(out: *mut T, v: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(LgStatus::NullPointer, "null output pointer".into()));
    }
    out.write(v);
    Ok(())
}

fn point(mu: f64) -> Result<MuPoint, Failure> {
    if mu == f64::INFINITY {
        Ok(MuPoint::Infinity)
    } else {
        Ok(MuPoint::checked(mu)?)
    }
}

fn jet(j: lumpgeom::jet::Jet2) -> LgJet2 {
    LgJet2 { value: j.value, d1: j.d1, d2: j.d2 }
}

fn options(tol: f64) -> Result<QuadratureOptions, Failure> {
    if tol > 0.0 && tol.is_finite() {
        Ok(QuadratureOptions::relative(tol))
    } else {
        Err(Failure(LgStatus::InvalidArgument, format!("tol = {tol}: need a positive finite value")))
    }
}

fn mode(m: LgMode) -> Mode {
    match m {
        LgMode::Closed => Mode::Closed,
        LgMode::Quadrature => Mode::Quadrature,
    }
}

/// Message for the last failed call on this thread, empty after a success.
/// The pointer stays valid until the next call into this library from the
/// same thread.
#[no_mangle]
pub extern "C" fn lg_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Creates a family of metric `metric` on the charge-one `CP^k` lumps.
/// `c1`, `c2` are the curvatures used by L2, `c` the one used by FS.
///
/// # Safety
/// `out` must be valid for a pointer write. Release the handle with
/// [`lg_family_free`].
#[no_mangle]
pub unsafe extern "C" fn lg_family_new(
    metric: LgMetric,
    k: u32,
    c1: f64,
    c2: f64,
    c: f64,
    out: *mut *mut LgFamily,
) -> LgStatus {
    guard(|| {
        let kind = match metric {
            LgMetric::L2 => MetricKind::L2,
            LgMetric::Fs => MetricKind::FS,
        };
        let fam = MetricFamily::new(kind, ModelParams::new(k, c1, c2, c)?);
        write(out, Box::into_raw(Box::new(LgFamily(fam))))
    })
}

/// # Safety
/// `family` must come from [`lg_family_new`] and not be freed twice.
/// Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn lg_family_free(family: *mut LgFamily) {
    if !family.is_null() {
        drop(Box::from_raw(family));
    }
}

/// The constant `B`.
///
/// # Safety
/// `family` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lg_family_b(family: *const LgFamily, out: *mut f64) -> LgStatus {
    guard(|| write(out, handle(family)?.b()))
}

/// The profile `A` with two derivatives.
///
/// # Safety
/// `family` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lg_profile(family: *const LgFamily, mu: f64, out: *mut LgJet2) -> LgStatus {
    guard(|| write(out, jet(metric_profiles::a_profile(handle(family)?, point(mu)?)?)))
}

/// # Safety
/// `family` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lg_coefficients(family: *const LgFamily, mu: f64, out: *mut LgCoefficients) -> LgStatus {
    guard(|| {
        let c = metric_profiles::coefficients(handle(family)?, point(mu)?)?;
        write(out, LgCoefficients { a0: c.a0, a1: c.a1, a2: c.a2, a3: c.a3, a4: c.a4 })
    })
}

/// # Safety
/// `family` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lg_volume_density(family: *const LgFamily, mu: f64, out: *mut f64) -> LgStatus {
    guard(|| write(out, metric_profiles::volume_density(handle(family)?, point(mu)?)?))
}

/// The Ricci profile `C` with two derivatives.
///
/// # Safety
/// `family` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lg_ricci_c(family: *const LgFamily, mu: f64, out: *mut LgJet2) -> LgStatus {
    guard(|| write(out, jet(ricci::ricci_profile(handle(family)?).c(point(mu)?)?)))
}

/// The constant `D`.
///
/// # Safety
/// `family` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lg_ricci_d(family: *const LgFamily, out: *mut f64) -> LgStatus {
    guard(|| write(out, ricci::ricci_profile(handle(family)?).d))
}

/// Scalar curvature from the closed expression in the coefficients.
///
/// # Safety
/// `family` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lg_scalar_curvature(family: *const LgFamily, mu: f64, out: *mut f64) -> LgStatus {
    guard(|| write(out, ricci::scalar_curvature(handle(family)?, point(mu)?)?))
}

/// Scalar curvature as `trace(gamma^-1 rho)` of the assembled forms.
/// Finite `mu > 1` only.
///
/// # Safety
/// `family` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lg_scalar_curvature_trace(family: *const LgFamily, mu: f64, out: *mut f64) -> LgStatus {
    guard(|| {
        let fam = handle(family)?;
        let p = point(mu)?;
        let g = ricci::assemble_metric_form(fam, p)?;
        let r = ricci::assemble_ricci_form(fam, p)?;
        write(out, ricci::scalar_from_trace(&g, &r)?)
    })
}

/// Total volume. `tol` is the relative quadrature tolerance and is
/// checked in both modes.
///
/// # Safety
/// `family` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lg_total_volume(family: *const LgFamily, mode: LgMode, tol: f64, out: *mut f64) -> LgStatus {
    guard(|| write(out, actions::total_volume(handle(family)?, self::mode(mode), options(tol)?)?.to_f64()))
}

/// Einstein-Hilbert action. `Closed` evaluates
/// `2^(2k+2) pi^(2k+1) (k+1) B^(2k) / (2k)!` on L2, which is half of the
/// integral computed by `Quadrature`; see [`lg_eh_action_by_parts`].
///
/// # Safety
/// `family` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lg_eh_action(family: *const LgFamily, mode: LgMode, tol: f64, out: *mut f64) -> LgStatus {
    guard(|| write(out, actions::eh_action(handle(family)?, self::mode(mode), options(tol)?)?.to_f64()))
}

/// Closed form of `int kappa dVol` obtained by integrating by parts.
///
/// # Safety
/// `family` must be a live handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lg_eh_action_by_parts(family: *const LgFamily, out: *mut f64) -> LgStatus {
    guard(|| write(out, actions::eh_action_by_parts(handle(family)?)?.to_f64()))
}

/// `int_0^1 t^2 (1 - t^2)^(k-2) dt`, exact rational
/// rounded to `f64`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lg_beta_integral(k: u32, out: *mut f64) -> LgStatus {
    guard(|| write(out, actions::rational_to_f64(&actions::beta_integral(k)?)))
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LgExact {
    Volume = 0,
    Action = 1,
    ActionByParts = 2,
}

/// Exact value as text, e.g. `1/120*pi^10`. Release with
/// [`lg_string_free`].
///
/// # Safety
/// `family` must be a live handle and `out` valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn lg_exact_value(family: *const LgFamily, which: LgExact, out: *mut *mut c_char) -> LgStatus {
    guard(|| {
        let fam = handle(family)?;
        let v = match which {
            LgExact::Volume => actions::total_volume_closed(fam)?,
            LgExact::Action => actions::eh_action_closed(fam)?,
            LgExact::ActionByParts => actions::eh_action_by_parts(fam)?,
        };
        let s = CString::new(v.to_string()).expect("no nul in formatted value");
        write(out, s.into_raw())
    })
}

/// # Safety
/// `s` must come from this library and not be freed twice. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn lg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Runs the verification suite on `steps` log-spaced points of
/// `[mu_min, mu_max]`; writes the number of checks run and failed.
///
/// # Safety
/// `family` must be a live handle; the outputs valid for writes.
#[no_mangle]
pub unsafe extern "C" fn lg_verify(
    family: *const LgFamily,
    mu_min: f64,
    mu_max: f64,
    steps: usize,
    out_total: *mut usize,
    out_failed: *mut usize,
) -> LgStatus {
    guard(|| {
        if !(mu_min > 1.0 && mu_min < mu_max && mu_max <= ricci::MU_RICCI_MAX) || steps < 2 {
            return Err(Failure(
                LgStatus::InvalidArgument,
                format!("grid [{mu_min}, {mu_max}] x {steps}: need 1 < mu_min < mu_max <= 1e40, steps >= 2"),
            ));
        }
        let fam = *handle(family)?;
        let checks = run_suite(&SuiteConfig { family: fam, mu_min, mu_max, steps, tol: 1e-10, perturb: 0.0 });
        if out_total.is_null() || out_failed.is_null() {
            return Err(Failure(LgStatus::NullPointer, "null output pointer".into()));
        }
        write(out_total, checks.len())?;
        write(out_failed, checks.iter().filter(|c| !c.passed).count())
    })
}
