//! C ABI over the spherical-cavity library.
//!
//! Conventions:
//! - Every function returns a [`SphcavStatus`]; results come back through
//!   out-pointers, which are written only on `SPHCAV_OK` (except
//!   `SPHCAV_NO_CONVERGENCE`, which still writes the best estimate).
//! - The cavity is an opaque handle created by one of the `sphcav_system_new_*`
//!   constructors and released with `sphcav_system_free`.
//! - On any non-OK status a human-readable message is stored per thread and
//!   readable via `sphcav_last_error_message` until the next call on that
//!   thread.
//! - Panics never unwind across the boundary; they surface as
//!   `SPHCAV_PANIC`.
//!
//! The generated header is written to `include/sphcav.h` at build time.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use num_complex::Complex64;

use sphcav::energy::{atom_shift, channel_energy};
use sphcav::media::{DielectricModel, PolarizabilityModel};
use sphcav::modes::{count_modes, dos_binned_total, CenterModel, Rect, System};
use sphcav::quadrature::QuadratureSpec;
use sphcav::scattering::{Channel, Polarization};
use sphcav::Error;

/// Result of every API call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SphcavStatus {
    /// Success.
    SphcavOk = 0,
    /// A pointer argument was null.
    SphcavNullPointer = 1,
    /// An argument failed validation (range, enum value, model parameters).
    SphcavInvalidArgument = 2,
    /// The evaluation point is outside the mathematical domain.
    SphcavDomain = 3,
    /// A result overflowed the double range.
    SphcavOverflow = 4,
    /// The evaluation point sits on a pole of the response.
    SphcavPole = 5,
    /// The quadrature or contour did not converge; outputs hold the best
    /// estimate.
    SphcavNoConvergence = 6,
    /// An internal invariant failed.
    SphcavInternal = 7,
    /// A panic was caught at the boundary.
    SphcavPanic = 8,
}

/// Opaque cavity handle.
pub struct SphcavSystem {
    inner: System,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let sanitized: String = msg.chars().map(|c| if c == '\0' { ' ' } else { c }).collect();
    LAST_ERROR.with(|e| {
        *e.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

fn clear_error() {
    LAST_ERROR.with(|e| {
        *e.borrow_mut() = CString::default();
    });
}

fn status_of(err: &Error) -> SphcavStatus {
    match err {
        Error::Domain(_) => SphcavStatus::SphcavDomain,
        Error::Overflow(_) => SphcavStatus::SphcavOverflow,
        Error::Pole(_) | Error::Resonance(_) => SphcavStatus::SphcavPole,
        Error::Unwrap(_) | Error::ContourThroughZero(_) => SphcavStatus::SphcavNoConvergence,
        Error::Config(_) | Error::Validation(_) => SphcavStatus::SphcavInvalidArgument,
    }
}

fn fail(err: &Error) -> SphcavStatus {
    set_error(&err.to_string());
    status_of(err)
}

fn invalid(msg: &str) -> SphcavStatus {
    set_error(msg);
    SphcavStatus::SphcavInvalidArgument
}

/// Run `body` with panic containment; `body` returns the status itself.
fn guarded(body: impl FnOnce() -> SphcavStatus) -> SphcavStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(s) => s,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic with non-string payload".into());
            set_error(&format!("panic: {msg}"));
            SphcavStatus::SphcavPanic
        }
    }
}

fn channel_of(l: usize, pol: c_int) -> Result<Channel, SphcavStatus> {
    let pol = match pol {
        0 => Polarization::Te,
        1 => Polarization::Tm,
        other => {
            return Err(invalid(&format!(
                "polarization must be 0 (TE) or 1 (TM), got {other}"
            )))
        }
    };
    Channel::new(l, pol).map_err(|e| fail(&e))
}

/// # Safety
/// `sys` must be a valid pointer from a constructor, not yet freed.
unsafe fn system_ref<'a>(sys: *const SphcavSystem) -> Result<&'a System, SphcavStatus> {
    if sys.is_null() {
        set_error("system handle is null");
        return Err(SphcavStatus::SphcavNullPointer);
    }
    Ok(&(*sys).inner)
}

fn write_out<T>(ptr: *mut T, value: T) -> Result<(), SphcavStatus> {
    if ptr.is_null() {
        set_error("output pointer is null");
        return Err(SphcavStatus::SphcavNullPointer);
    }
    unsafe { ptr.write(value) };
    Ok(())
}

fn make_system(wall: DielectricModel, radius: f64, out: *mut *mut SphcavSystem) -> SphcavStatus {
    guarded(|| {
        let sys = match System::new(wall, CenterModel::Empty, radius) {
            Ok(s) => s,
            Err(e) => return fail(&e),
        };
        let boxed = Box::into_raw(Box::new(SphcavSystem { inner: sys }));
        match write_out(out, boxed) {
            Ok(()) => SphcavStatus::SphcavOk,
            Err(s) => {
                // reclaim to avoid leaking on a null out-pointer
                unsafe { drop(Box::from_raw(boxed)) };
                s
            }
        }
    })
}

/// Message for the most recent failure on this thread; empty string after a
/// success. The pointer stays valid until the next API call on the thread.
#[no_mangle]
pub extern "C" fn sphcav_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Cavity in an undisturbed vacuum host (null experiment: every amplitude
/// vanishes).
#[no_mangle]
pub extern "C" fn sphcav_system_new_vacuum(
    radius: f64,
    out: *mut *mut SphcavSystem,
) -> SphcavStatus {
    make_system(DielectricModel::Vacuum, radius, out)
}

/// Cavity bounded by a perfectly conducting mirror.
#[no_mangle]
pub extern "C" fn sphcav_system_new_perfect_mirror(
    radius: f64,
    out: *mut *mut SphcavSystem,
) -> SphcavStatus {
    make_system(DielectricModel::PerfectConductor, radius, out)
}

/// Cavity in a single-resonance Lorentzian host:
/// `eps(w) = 1 + wp^2 / (w0^2 - w^2 - i g w)`.
#[no_mangle]
pub extern "C" fn sphcav_system_new_lorentzian(
    omega_p: f64,
    omega0: f64,
    gamma: f64,
    radius: f64,
    out: *mut *mut SphcavSystem,
) -> SphcavStatus {
    make_system(
        DielectricModel::Lorentzian {
            omega_p,
            omega0,
            gamma,
        },
        radius,
        out,
    )
}

/// Cavity in a Drude-metal host: `eps(w) = 1 - wp^2 / (w^2 + i g w)`.
#[no_mangle]
pub extern "C" fn sphcav_system_new_drude(
    omega_p: f64,
    gamma: f64,
    radius: f64,
    out: *mut *mut SphcavSystem,
) -> SphcavStatus {
    make_system(DielectricModel::Drude { omega_p, gamma }, radius, out)
}

/// Place a polarizable atom (static polarizability `alpha0`, transition
/// frequency `omega0`) at the cavity center. Replaces any previous center.
///
/// # Safety
/// `sys` must be a live handle from a constructor.
#[no_mangle]
pub unsafe extern "C" fn sphcav_system_set_atom(
    sys: *mut SphcavSystem,
    alpha0: f64,
    omega0: f64,
) -> SphcavStatus {
    guarded(|| {
        if sys.is_null() {
            set_error("system handle is null");
            return SphcavStatus::SphcavNullPointer;
        }
        match PolarizabilityModel::new(alpha0, omega0) {
            Ok(m) => {
                (*sys).inner.center = CenterModel::Atom(m);
                SphcavStatus::SphcavOk
            }
            Err(e) => fail(&e),
        }
    })
}

/// Release a handle. Passing null is a no-op.
///
/// # Safety
/// `sys` must be a handle from a constructor, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn sphcav_system_free(sys: *mut SphcavSystem) {
    if !sys.is_null() {
        drop(Box::from_raw(sys));
    }
}

/// Wall scattering amplitude `s_b` for channel `(l, pol)` at the complex
/// frequency `omega_re + i omega_im` (units of `omega_ref`).
///
/// # Safety
/// `sys` must be a live handle; out-pointers must be writable or null.
#[no_mangle]
pub unsafe extern "C" fn sphcav_s_b(
    sys: *const SphcavSystem,
    l: usize,
    pol: c_int,
    omega_re: f64,
    omega_im: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> SphcavStatus {
    guarded(|| {
        let system = match system_ref(sys) {
            Ok(s) => s,
            Err(st) => return st,
        };
        let ch = match channel_of(l, pol) {
            Ok(c) => c,
            Err(st) => return st,
        };
        match system.s_b(ch, Complex64::new(omega_re, omega_im)) {
            Ok(v) => match write_out(out_re, v.re).and_then(|()| write_out(out_im, v.im)) {
                Ok(()) => SphcavStatus::SphcavOk,
                Err(st) => st,
            },
            Err(e) => fail(&e),
        }
    })
}

/// Center scattering amplitude `s_c` for channel `(l, pol)`; identically 1
/// when the cavity center is empty.
///
/// # Safety
/// `sys` must be a live handle; out-pointers must be writable or null.
#[no_mangle]
pub unsafe extern "C" fn sphcav_s_c(
    sys: *const SphcavSystem,
    l: usize,
    pol: c_int,
    omega_re: f64,
    omega_im: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> SphcavStatus {
    guarded(|| {
        let system = match system_ref(sys) {
            Ok(s) => s,
            Err(st) => return st,
        };
        let ch = match channel_of(l, pol) {
            Ok(c) => c,
            Err(st) => return st,
        };
        match system.s_c(ch, Complex64::new(omega_re, omega_im)) {
            Ok(v) => match write_out(out_re, v.re).and_then(|()| write_out(out_im, v.im)) {
                Ok(()) => SphcavStatus::SphcavOk,
                Err(st) => st,
            },
            Err(e) => fail(&e),
        }
    })
}

/// Degeneracy-folded channel contribution to the regularized ground-state
/// energy, in `hbar omega_ref`. `rel_tol <= 0` selects the default (1e-8).
/// Returns `SPHCAV_NO_CONVERGENCE` (with outputs written) when the error
/// estimate misses the tolerance.
///
/// # Safety
/// `sys` must be a live handle; out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn sphcav_channel_energy(
    sys: *const SphcavSystem,
    l: usize,
    pol: c_int,
    rel_tol: f64,
    out_value: *mut f64,
    out_error: *mut f64,
) -> SphcavStatus {
    guarded(|| {
        let system = match system_ref(sys) {
            Ok(s) => s,
            Err(st) => return st,
        };
        let ch = match channel_of(l, pol) {
            Ok(c) => c,
            Err(st) => return st,
        };
        let mut spec = QuadratureSpec::default();
        if rel_tol > 0.0 {
            spec.rel_tol = rel_tol;
        }
        match channel_energy(ch, system, &spec) {
            Ok(r) => {
                match write_out(out_value, r.value).and_then(|()| write_out(out_error, r.error)) {
                    Ok(()) => {
                        if r.converged {
                            SphcavStatus::SphcavOk
                        } else {
                            set_error("channel energy quadrature did not reach tolerance");
                            SphcavStatus::SphcavNoConvergence
                        }
                    }
                    Err(st) => st,
                }
            }
            Err(e) => fail(&e),
        }
    })
}

/// Energy shift of the centered atom, in `hbar omega_ref`. The handle must
/// have an atom installed via `sphcav_system_set_atom`. Returns
/// `SPHCAV_NO_CONVERGENCE` (with outputs written) when the error estimate
/// misses the tolerance.
///
/// # Safety
/// `sys` must be a live handle; out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn sphcav_atom_shift(
    sys: *const SphcavSystem,
    rel_tol: f64,
    out_value: *mut f64,
    out_error: *mut f64,
) -> SphcavStatus {
    guarded(|| {
        let system = match system_ref(sys) {
            Ok(s) => s,
            Err(st) => return st,
        };
        let atom = match system.center {
            CenterModel::Atom(a) => a,
            CenterModel::Empty => {
                return invalid("atom shift needs an atom: call sphcav_system_set_atom first")
            }
        };
        let mut spec = QuadratureSpec::default();
        if rel_tol > 0.0 {
            spec.rel_tol = rel_tol;
        }
        match atom_shift(system.radius, &system.wall, &atom, &spec) {
            Ok(r) => {
                match write_out(out_value, r.value).and_then(|()| write_out(out_error, r.error)) {
                    Ok(()) => {
                        if r.converged {
                            SphcavStatus::SphcavOk
                        } else {
                            set_error("atom shift quadrature did not reach tolerance");
                            SphcavStatus::SphcavNoConvergence
                        }
                    }
                    Err(st) => st,
                }
            }
            Err(e) => fail(&e),
        }
    })
}

/// Number of cavity modes of channel `(l, pol)` inside the closed rectangle
/// `[re_min, re_max] x [im_min, im_max]` of the complex frequency plane, by
/// the argument principle.
///
/// # Safety
/// `sys` must be a live handle; `out_count` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sphcav_count_modes(
    sys: *const SphcavSystem,
    l: usize,
    pol: c_int,
    re_min: f64,
    re_max: f64,
    im_min: f64,
    im_max: f64,
    out_count: *mut i64,
) -> SphcavStatus {
    guarded(|| {
        let system = match system_ref(sys) {
            Ok(s) => s,
            Err(st) => return st,
        };
        let ch = match channel_of(l, pol) {
            Ok(c) => c,
            Err(st) => return st,
        };
        let rect = Rect {
            re_min,
            re_max,
            im_min,
            im_max,
        };
        match count_modes(ch, system, rect) {
            Ok(n) => match write_out(out_count, n) {
                Ok(()) => SphcavStatus::SphcavOk,
                Err(st) => st,
            },
            Err(e) => fail(&e),
        }
    })
}

/// Integral of the scatterers' density-of-states change of channel
/// `(l, pol)` over `[omega_lo, omega_hi]`, accumulated over `n_bins` bins.
///
/// # Safety
/// `sys` must be a live handle; `out_total` must be writable.
#[no_mangle]
pub unsafe extern "C" fn sphcav_dos_binned_total(
    sys: *const SphcavSystem,
    l: usize,
    pol: c_int,
    omega_lo: f64,
    omega_hi: f64,
    n_bins: usize,
    out_total: *mut f64,
) -> SphcavStatus {
    guarded(|| {
        let system = match system_ref(sys) {
            Ok(s) => s,
            Err(st) => return st,
        };
        let ch = match channel_of(l, pol) {
            Ok(c) => c,
            Err(st) => return st,
        };
        match dos_binned_total(ch, system, omega_lo, omega_hi, n_bins) {
            Ok(v) => match write_out(out_total, v) {
                Ok(()) => SphcavStatus::SphcavOk,
                Err(st) => st,
            },
            Err(e) => fail(&e),
        }
    })
}
