//! Exercises the C ABI from Rust: lifecycle, error paths, and agreement
//! with direct library calls.

use std::ffi::CStr;
use std::ptr;

use num_complex::Complex64;

use sphcav::energy::{atom_shift, channel_energy};
use sphcav::media::{DielectricModel, PolarizabilityModel};
use sphcav::quadrature::QuadratureSpec;
use sphcav::scattering::{s_b, Channel, Polarization};
use sphcav_capi::*;

const TE: i32 = 0;
const TM: i32 = 1;

fn last_error() -> String {
    unsafe { CStr::from_ptr(sphcav_last_error_message()) }
        .to_string_lossy()
        .into_owned()
}

fn new_lorentzian(radius: f64) -> *mut SphcavSystem {
    let mut sys = ptr::null_mut();
    let st = sphcav_system_new_lorentzian(1.0, 1.0, 0.01, radius, &mut sys);
    assert_eq!(st, SphcavStatus::SphcavOk, "{}", last_error());
    assert!(!sys.is_null());
    sys
}

#[test]
fn wall_amplitude_matches_direct_library_call() {
    let sys = new_lorentzian(1.0);
    let (mut re, mut im) = (0.0, 0.0);
    let st = unsafe { sphcav_s_b(sys, 2, TM, 1.7, 0.0, &mut re, &mut im) };
    assert_eq!(st, SphcavStatus::SphcavOk, "{}", last_error());
    let wall = DielectricModel::Lorentzian {
        omega_p: 1.0,
        omega0: 1.0,
        gamma: 0.01,
    };
    let ch = Channel::new(2, Polarization::Tm).unwrap();
    let direct = s_b(ch, Complex64::new(1.7, 0.0), 1.0, &wall).unwrap().value;
    assert!((Complex64::new(re, im) - direct).norm() < 1e-14 * direct.norm());
    unsafe { sphcav_system_free(sys) };
}

#[test]
fn empty_center_scatters_trivially_and_vacuum_wall_not_at_all() {
    let mut sys = ptr::null_mut();
    assert_eq!(
        sphcav_system_new_vacuum(1.0, &mut sys),
        SphcavStatus::SphcavOk
    );
    let (mut re, mut im) = (f64::NAN, f64::NAN);
    assert_eq!(
        unsafe { sphcav_s_b(sys, 1, TE, 2.0, 0.0, &mut re, &mut im) },
        SphcavStatus::SphcavOk
    );
    assert_eq!((re, im), (0.0, 0.0));
    assert_eq!(
        unsafe { sphcav_s_c(sys, 1, TE, 2.0, 0.0, &mut re, &mut im) },
        SphcavStatus::SphcavOk
    );
    assert_eq!((re, im), (1.0, 0.0));
    unsafe { sphcav_system_free(sys) };
}

#[test]
fn channel_energy_matches_direct_library_call() {
    let sys = new_lorentzian(1.0);
    let (mut v, mut e) = (0.0, 0.0);
    let st = unsafe { sphcav_channel_energy(sys, 1, TM, 1e-8, &mut v, &mut e) };
    assert_eq!(st, SphcavStatus::SphcavOk, "{}", last_error());
    let wall = DielectricModel::Lorentzian {
        omega_p: 1.0,
        omega0: 1.0,
        gamma: 0.01,
    };
    let system = sphcav::modes::System::new(wall, sphcav::modes::CenterModel::Empty, 1.0).unwrap();
    let ch = Channel::new(1, Polarization::Tm).unwrap();
    let direct = channel_energy(ch, &system, &QuadratureSpec::default()).unwrap();
    assert!((v - direct.value).abs() < 1e-12 * direct.value.abs());
    assert!(e > 0.0);
    unsafe { sphcav_system_free(sys) };
}

#[test]
fn atom_shift_needs_an_atom_then_matches_the_library() {
    let mut sys = ptr::null_mut();
    assert_eq!(
        sphcav_system_new_perfect_mirror(0.05, &mut sys),
        SphcavStatus::SphcavOk
    );
    let (mut v, mut e) = (0.0, 0.0);
    let st = unsafe { sphcav_atom_shift(sys, 0.0, &mut v, &mut e) };
    assert_eq!(st, SphcavStatus::SphcavInvalidArgument);
    assert!(last_error().contains("set_atom"), "{}", last_error());

    assert_eq!(
        unsafe { sphcav_system_set_atom(sys, 1e-9, 1.0) },
        SphcavStatus::SphcavOk
    );
    let st = unsafe { sphcav_atom_shift(sys, 0.0, &mut v, &mut e) };
    assert_eq!(st, SphcavStatus::SphcavOk, "{}", last_error());
    assert!(v < 0.0, "shift should be negative, got {v}");
    let atom = PolarizabilityModel::new(1e-9, 1.0).unwrap();
    let direct = atom_shift(
        0.05,
        &DielectricModel::PerfectConductor,
        &atom,
        &QuadratureSpec::default(),
    )
    .unwrap();
    assert!((v - direct.value).abs() < 1e-12 * direct.value.abs());
    unsafe { sphcav_system_free(sys) };
}

#[test]
fn mode_count_and_binned_dos_agree_through_the_abi() {
    let mut sys = ptr::null_mut();
    assert_eq!(
        sphcav_system_new_perfect_mirror(1.0, &mut sys),
        SphcavStatus::SphcavOk
    );
    let mut n = -1i64;
    let st = unsafe { sphcav_count_modes(sys, 1, TE, 4.0, 5.0, -0.5, 0.5, &mut n) };
    assert_eq!(st, SphcavStatus::SphcavOk, "{}", last_error());
    assert_eq!(n, 1);
    let mut total = 0.0;
    let st = unsafe { sphcav_dos_binned_total(sys, 1, TE, 4.0, 5.0, 4, &mut total) };
    assert_eq!(st, SphcavStatus::SphcavOk, "{}", last_error());
    assert!((total - 1.0).abs() < 1e-6, "binned total {total}");
    unsafe { sphcav_system_free(sys) };
}

#[test]
fn null_and_invalid_arguments_are_reported_not_crashed() {
    // null out-pointer on construction
    assert_eq!(
        sphcav_system_new_vacuum(1.0, ptr::null_mut()),
        SphcavStatus::SphcavNullPointer
    );
    // invalid model parameters
    let mut sys = ptr::null_mut();
    assert_eq!(
        sphcav_system_new_lorentzian(-1.0, 1.0, 0.01, 1.0, &mut sys),
        SphcavStatus::SphcavInvalidArgument
    );
    assert!(!last_error().is_empty());
    // null system handle
    let (mut re, mut im) = (0.0, 0.0);
    assert_eq!(
        unsafe { sphcav_s_b(ptr::null(), 1, TE, 1.0, 0.0, &mut re, &mut im) },
        SphcavStatus::SphcavNullPointer
    );
    // bad polarization tag
    let sys = new_lorentzian(1.0);
    assert_eq!(
        unsafe { sphcav_s_b(sys, 1, 7, 1.0, 0.0, &mut re, &mut im) },
        SphcavStatus::SphcavInvalidArgument
    );
    assert!(last_error().contains("polarization"), "{}", last_error());
    // l = 0 carries no transverse field
    assert_eq!(
        unsafe { sphcav_s_b(sys, 0, TE, 1.0, 0.0, &mut re, &mut im) },
        SphcavStatus::SphcavInvalidArgument
    );
    // freeing null is a no-op
    unsafe { sphcav_system_free(ptr::null_mut()) };
    unsafe { sphcav_system_free(sys) };
}

#[test]
fn error_message_clears_on_the_next_successful_call() {
    let sys = new_lorentzian(1.0);
    let (mut re, mut im) = (0.0, 0.0);
    assert_eq!(
        unsafe { sphcav_s_b(sys, 1, 9, 1.0, 0.0, &mut re, &mut im) },
        SphcavStatus::SphcavInvalidArgument
    );
    assert!(!last_error().is_empty());
    assert_eq!(
        unsafe { sphcav_s_b(sys, 1, TM, 1.0, 0.0, &mut re, &mut im) },
        SphcavStatus::SphcavOk
    );
    assert!(last_error().is_empty());
    unsafe { sphcav_system_free(sys) };
}
