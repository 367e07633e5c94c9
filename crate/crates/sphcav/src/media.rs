//! Dielectric response of the host and electric-dipole polarizability of the
//! central atom, evaluable at real and imaginary frequencies.
//!
//! All frequencies are in units of the reference `omega_ref`, lengths in
//! `c/omega_ref`. The polarizability is parameterized by its static value
//! `alpha0` (a volume) and the resonance `omega0`; in terms of the oscillator
//! form `alpha = (e^2/m)/(omega0^2 - omega^2)` this identifies
//! `e^2/m = alpha0 * omega0^2`.

use num_complex::Complex64;

use crate::{Error, Result};

/// Host dielectric response.
///
/// `PerfectConductor` is a tag, not a numeric epsilon: the scattering layer
/// routes it to the closed-form mirror amplitudes instead of substituting a
/// large number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DielectricModel {
    Vacuum,
    /// `eps = 1 + omega_p^2 / (omega0^2 - omega^2 - i gamma omega)`
    Lorentzian {
        omega_p: f64,
        omega0: f64,
        gamma: f64,
    },
    /// `eps = 1 - omega_p^2 / (omega^2 + i gamma omega)`
    Drude {
        omega_p: f64,
        gamma: f64,
    },
    PerfectConductor,
}

impl DielectricModel {
    pub fn validate(&self) -> Result<()> {
        let bad = |name: &str, v: f64| Error::Validation(format!("{name} must be >= 0, got {v}"));
        match *self {
            DielectricModel::Lorentzian {
                omega_p,
                omega0,
                gamma,
            } => {
                if omega_p < 0.0 {
                    return Err(bad("omega_p", omega_p));
                }
                if omega0 < 0.0 {
                    return Err(bad("omega0", omega0));
                }
                if gamma < 0.0 {
                    return Err(bad("gamma", gamma));
                }
            }
            DielectricModel::Drude { omega_p, gamma } => {
                if omega_p < 0.0 {
                    return Err(bad("omega_p", omega_p));
                }
                if gamma < 0.0 {
                    return Err(bad("gamma", gamma));
                }
            }
            _ => {}
        }
        Ok(())
    }
}

/// Single-resonance atomic polarizability `alpha0 * omega0^2 / (omega0^2 - omega^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizabilityModel {
    /// Static polarizability, a volume in units of `(c/omega_ref)^3`.
    pub alpha0: f64,
    /// Resonance frequency in units of `omega_ref`.
    pub omega0: f64,
}

impl PolarizabilityModel {
    pub fn new(alpha0: f64, omega0: f64) -> Result<Self> {
        if alpha0 < 0.0 {
            return Err(Error::Validation(format!(
                "alpha0 must be >= 0, got {alpha0}"
            )));
        }
        if !(omega0 > 0.0) {
            return Err(Error::Validation(format!(
                "omega0 must be > 0, got {omega0}"
            )));
        }
        Ok(PolarizabilityModel { alpha0, omega0 })
    }
}

/// Evaluate the dielectric function at a complex frequency.
///
/// On the imaginary axis (`omega = i u`, `u > 0`) the result is purely real
/// and `>= 1` for the Lorentzian and Drude models.
pub fn eval_epsilon(model: &DielectricModel, omega: Complex64) -> Result<Complex64> {
    match *model {
        DielectricModel::Vacuum => Ok(Complex64::new(1.0, 0.0)),
        DielectricModel::Lorentzian {
            omega_p,
            omega0,
            gamma,
        } => {
            let den = Complex64::new(omega0 * omega0, 0.0)
                - omega * omega
                - Complex64::new(0.0, gamma) * omega;
            if den.norm() == 0.0 {
                return Err(Error::Pole(format!(
                    "Lorentzian dielectric pole at omega = {omega}"
                )));
            }
            let eps = Complex64::new(1.0, 0.0) + omega_p * omega_p / den;
            Ok(sanitize_imag_axis(omega, eps))
        }
        DielectricModel::Drude { omega_p, gamma } => {
            let den = omega * omega + Complex64::new(0.0, gamma) * omega;
            if den.norm() == 0.0 {
                return Err(Error::Pole(format!(
                    "Drude dielectric pole at omega = {omega}"
                )));
            }
            let eps = Complex64::new(1.0, 0.0) - omega_p * omega_p / den;
            Ok(sanitize_imag_axis(omega, eps))
        }
        DielectricModel::PerfectConductor => Err(Error::Domain(
            "perfect conductor has no numeric dielectric function; use the closed-form amplitudes"
                .into(),
        )),
    }
}

/// Square root of the dielectric function with branch cuts fixed in the
/// frequency plane rather than inherited from the principal square root.
///
/// `eps(omega).sqrt()` jumps wherever `eps` crosses the negative real axis;
/// for the Lorentzian model that happens along the whole line
/// `Im omega = -gamma/2`, exactly where contour integrals around
/// lower-half-plane mode zeros need an analytic integrand. Factoring `eps`
/// into `(omega - a_+)(omega - a_-) / ((omega - b_+)(omega - b_-))` and
/// taking each factor's square root with its cut running straight down from
/// the root keeps the index analytic on the real axis, in the whole upper
/// half plane, and in the lower half plane away from the vertical rays below
/// the zeros and poles of `eps`. On the positive real and positive imaginary
/// axes it agrees with the principal `eps.sqrt()`.
pub fn eval_refractive_index(model: &DielectricModel, omega: Complex64) -> Result<Complex64> {
    match *model {
        DielectricModel::Vacuum => Ok(Complex64::new(1.0, 0.0)),
        DielectricModel::Lorentzian {
            omega_p,
            omega0,
            gamma,
        } => {
            // zeros of eps at -i gamma/2 +- sqrt(omega0^2 + omega_p^2 - gamma^2/4),
            // poles at -i gamma/2 +- sqrt(omega0^2 - gamma^2/4)
            let center = Complex64::new(0.0, -0.5 * gamma);
            let sa =
                Complex64::new(omega0 * omega0 + omega_p * omega_p - 0.25 * gamma * gamma, 0.0)
                    .sqrt();
            let sb = Complex64::new(omega0 * omega0 - 0.25 * gamma * gamma, 0.0).sqrt();
            let num = sqrt_cut_below(omega, center + sa) * sqrt_cut_below(omega, center - sa);
            let den = sqrt_cut_below(omega, center + sb) * sqrt_cut_below(omega, center - sb);
            if den.norm() == 0.0 {
                return Err(Error::Pole(format!(
                    "Lorentzian dielectric pole at omega = {omega}"
                )));
            }
            Ok(sanitize_imag_axis(omega, num / den))
        }
        DielectricModel::Drude { omega_p, gamma } => {
            // zeros of eps at -i gamma/2 +- sqrt(omega_p^2 - gamma^2/4),
            // poles at 0 and -i gamma
            let center = Complex64::new(0.0, -0.5 * gamma);
            let sa = Complex64::new(omega_p * omega_p - 0.25 * gamma * gamma, 0.0).sqrt();
            let num = sqrt_cut_below(omega, center + sa) * sqrt_cut_below(omega, center - sa);
            let den = sqrt_cut_below(omega, Complex64::new(0.0, 0.0))
                * sqrt_cut_below(omega, Complex64::new(0.0, -gamma));
            if den.norm() == 0.0 {
                return Err(Error::Pole(format!(
                    "Drude dielectric pole at omega = {omega}"
                )));
            }
            Ok(sanitize_imag_axis(omega, num / den))
        }
        DielectricModel::PerfectConductor => Err(Error::Domain(
            "perfect conductor has no numeric refractive index; use the closed-form amplitudes"
                .into(),
        )),
    }
}

/// `sqrt(omega - r)` with the branch cut on the ray going straight down from
/// `r`; equals the principal square root for `omega - r` on the positive
/// real axis.
fn sqrt_cut_below(omega: Complex64, r: Complex64) -> Complex64 {
    let z = omega - r;
    // -i z maps the downward ray onto the principal cut; undo the rotation
    // with e^{i pi/4} after the root
    (Complex64::new(0.0, -1.0) * z).sqrt() * Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4)
}

/// Evaluate the polarizability at a complex frequency.
pub fn eval_alpha(model: &PolarizabilityModel, omega: Complex64) -> Result<Complex64> {
    let w0sq = model.omega0 * model.omega0;
    let den = Complex64::new(w0sq, 0.0) - omega * omega;
    if den.norm() == 0.0 {
        return Err(Error::Pole(format!(
            "polarizability pole at omega = {omega}"
        )));
    }
    Ok(sanitize_imag_axis(
        omega,
        model.alpha0 * w0sq / den,
    ))
}

/// On the imaginary axis the response functions are real by analyticity; drop
/// the roundoff imaginary part so downstream reality checks are exact.
fn sanitize_imag_axis(omega: Complex64, value: Complex64) -> Complex64 {
    if omega.re == 0.0 {
        Complex64::new(value.re, 0.0)
    } else {
        value
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn iu(u: f64) -> Complex64 {
        Complex64::new(0.0, u)
    }

    #[test]
    fn lorentzian_static_limit() {
        let m = DielectricModel::Lorentzian {
            omega_p: 1.0,
            omega0: 1.0,
            gamma: 0.01,
        };
        let eps = eval_epsilon(&m, Complex64::new(0.0, 0.0)).unwrap();
        assert_relative_eq!(eps.re, 2.0, max_relative = 1e-14);
        assert_eq!(eps.im, 0.0);
    }

    #[test]
    fn lorentzian_high_frequency_transparency() {
        let m = DielectricModel::Lorentzian {
            omega_p: 1.0,
            omega0: 1.0,
            gamma: 0.01,
        };
        let eps = eval_epsilon(&m, iu(1e8)).unwrap();
        assert_relative_eq!(eps.re, 1.0, max_relative = 1e-10);
    }

    #[test]
    fn lorentzian_at_u_equals_omega0() {
        let m = DielectricModel::Lorentzian {
            omega_p: 1.0,
            omega0: 1.0,
            gamma: 0.01,
        };
        let eps = eval_epsilon(&m, iu(1.0)).unwrap();
        // 1 + 1/(1 + 1 + 0.01)
        assert_relative_eq!(eps.re, 1.0 + 1.0 / 2.01, max_relative = 1e-14);
    }

    #[test]
    fn lorentzian_pole_without_damping() {
        let m = DielectricModel::Lorentzian {
            omega_p: 1.0,
            omega0: 1.0,
            gamma: 0.0,
        };
        assert!(matches!(
            eval_epsilon(&m, Complex64::new(1.0, 0.0)),
            Err(crate::Error::Pole(_))
        ));
    }

    #[test]
    fn alpha_static_and_imag_axis_values() {
        let m = PolarizabilityModel::new(2.5, 1.0).unwrap();
        let a0 = eval_alpha(&m, Complex64::new(0.0, 0.0)).unwrap();
        assert_relative_eq!(a0.re, 2.5, max_relative = 1e-14);
        let half = eval_alpha(&m, iu(1.0)).unwrap();
        assert_relative_eq!(half.re, 1.25, max_relative = 1e-14);
        let tenth = eval_alpha(&m, iu(3.0)).unwrap();
        assert_relative_eq!(tenth.re, 0.25, max_relative = 1e-14);
    }

    #[test]
    fn alpha_pole_on_resonance() {
        let m = PolarizabilityModel::new(1.0, 2.0).unwrap();
        assert!(matches!(
            eval_alpha(&m, Complex64::new(2.0, 0.0)),
            Err(crate::Error::Pole(_))
        ));
    }

    #[test]
    fn reality_and_monotonicity_on_imag_axis() {
        let models = [
            DielectricModel::Lorentzian {
                omega_p: 0.8,
                omega0: 1.3,
                gamma: 0.05,
            },
            DielectricModel::Drude {
                omega_p: 2.0,
                gamma: 0.1,
            },
        ];
        for m in &models {
            let mut prev = f64::INFINITY;
            let mut u = 1e-3;
            while u <= 1e3 {
                let eps = eval_epsilon(m, iu(u)).unwrap();
                assert_eq!(eps.im, 0.0);
                assert!(eps.re >= 1.0, "eps(iu) < 1 at u={u}");
                assert!(eps.re <= prev + 1e-15, "eps(iu) not non-increasing at u={u}");
                prev = eps.re;
                u *= 1.4;
            }
        }
    }

    #[test]
    fn refractive_index_matches_principal_branch_on_the_axes() {
        let models = [
            DielectricModel::Lorentzian {
                omega_p: 1.0,
                omega0: 1.0,
                gamma: 0.05,
            },
            DielectricModel::Drude {
                omega_p: 2.0,
                gamma: 0.1,
            },
        ];
        for m in &models {
            let mut w = 1e-2;
            while w <= 1e2 {
                for omega in [Complex64::new(w, 0.0), iu(w)] {
                    let n = eval_refractive_index(m, omega).unwrap();
                    let eps = eval_epsilon(m, omega).unwrap();
                    assert!(
                        (n - eps.sqrt()).norm() < 1e-12 * eps.sqrt().norm(),
                        "branch mismatch at omega={omega}: {n} vs {}",
                        eps.sqrt()
                    );
                    assert!((n * n - eps).norm() < 1e-12 * eps.norm());
                }
                w *= 1.7;
            }
        }
    }

    #[test]
    fn refractive_index_is_continuous_below_the_real_axis() {
        // eps crosses the negative real axis on Im omega = -gamma/2, so the
        // principal sqrt(eps) jumps there; the frequency-plane branch must not
        let m = DielectricModel::Lorentzian {
            omega_p: 1.0,
            omega0: 1.0,
            gamma: 0.05,
        };
        let above = Complex64::new(1.125, -0.025 + 1e-9);
        let below = Complex64::new(1.125, -0.025 - 1e-9);
        let n_a = eval_refractive_index(&m, above).unwrap();
        let n_b = eval_refractive_index(&m, below).unwrap();
        assert!((n_a - n_b).norm() < 1e-6, "jump: {n_a} vs {n_b}");
        let p_a = eval_epsilon(&m, above).unwrap().sqrt();
        let p_b = eval_epsilon(&m, below).unwrap().sqrt();
        assert!((p_a - p_b).norm() > 1.0, "principal branch should jump here");
        // still a square root of eps on both sides
        let eps_b = eval_epsilon(&m, below).unwrap();
        assert!((n_b * n_b - eps_b).norm() < 1e-12 * eps_b.norm());
    }

    #[test]
    fn passivity_on_real_axis() {
        let m = DielectricModel::Lorentzian {
            omega_p: 1.1,
            omega0: 0.9,
            gamma: 0.2,
        };
        let mut w = 1e-2;
        while w <= 1e2 {
            let eps = eval_epsilon(&m, Complex64::new(w, 0.0)).unwrap();
            assert!(eps.im >= 0.0, "Im eps < 0 at omega={w}");
            w *= 1.3;
        }
    }
}
