//! Wall and center scattering amplitudes per channel.
//!
//! The wall amplitude for a cavity of radius `R` in a host with dielectric
//! function `eps` is assembled from products
//! `Q_l^{A d A' d'} = k_{A'} h_l^d(k_A R) Dhat h_l^{d'}(k_{A'} R)`
//! with `A, A'` selecting the vacuum or medium wavenumber and `d, d'` the
//! outgoing/ingoing kind:
//!
//! TE: `s_b = -(Q^{MoVo} - Q^{VoMo}) / (Q^{MoVi} - Q^{ViMo})`
//! TM: `s_b = -(Q^{MoVo} - Q^{VoMo}/eps) / (Q^{MoVi} - Q^{ViMo}/eps)`
//!
//! All assembly happens in the scaled (mantissa, exponent) representation;
//! the exponents cancel between numerator and denominator before the ratio
//! is exponentiated. The center amplitude is 1 for an empty cavity and the
//! Moebius form `(1 + (2/3) i k^3 alpha)/(1 - (2/3) i k^3 alpha)` for a
//! polarizable atom, which acts in the l = 1 TM channel only.

use num_complex::Complex64;

use crate::media::{
    eval_alpha, eval_epsilon, eval_refractive_index, DielectricModel, PolarizabilityModel,
};
use crate::scaled::Scaled;
use crate::specfun::{bessel_j_scaled, dhat_scaled, hankel_scaled, HankelKind};
use crate::{Error, Result};

/// Relative denominator magnitude below which an amplitude is flagged as
/// near a cavity resonance (ill-conditioned, not failed).
const CONDITIONING_LN: f64 = -27.631021115928547; // ln(1e-12)

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarization {
    Te,
    Tm,
}

impl std::fmt::Display for Polarization {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Polarization::Te => write!(f, "TE"),
            Polarization::Tm => write!(f, "TM"),
        }
    }
}

/// One (l, polarization) mode family. `m` never appears: the amplitudes are
/// m-independent and the energy layer folds the 2l+1 degeneracy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Channel {
    l: usize,
    pub pol: Polarization,
}

impl Channel {
    /// l = 0 carries no transverse radiation and is excluded from all sums.
    pub fn new(l: usize, pol: Polarization) -> Result<Self> {
        if l == 0 {
            return Err(Error::Validation(
                "channel angular momentum must satisfy l >= 1".into(),
            ));
        }
        Ok(Channel { l, pol })
    }

    pub fn l(&self) -> usize {
        self.l
    }

    /// m-degeneracy factor 2l + 1.
    pub fn degeneracy(&self) -> f64 {
        (2 * self.l + 1) as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScatterSite {
    Wall,
    Center,
}

/// A scattering amplitude for one channel at one frequency.
#[derive(Debug, Clone, Copy)]
pub struct ScatterAmplitude {
    pub value: Complex64,
    pub channel: Channel,
    pub site: ScatterSite,
    pub omega: Complex64,
    /// Set when the assembling denominator was within 1e-12 of its term
    /// scale (cavity resonance); the value is still returned.
    pub near_resonance: bool,
}

/// Which wavenumber a Q-factor slot uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MediumTag {
    Vacuum,
    Medium,
}

/// `Q_l^{A d A' d'}` in scaled form.
///
/// `index` is the medium's refractive index `sqrt(eps)`; the caller picks
/// the branch (`eval_refractive_index` for analyticity in the frequency
/// plane, or the principal `eps.sqrt()` for pointwise real-axis work, where
/// the two agree).
#[allow(clippy::too_many_arguments)]
pub fn q_factor(
    a: MediumTag,
    a_prime: MediumTag,
    d: HankelKind,
    d_prime: HankelKind,
    l: usize,
    omega: Complex64,
    radius: f64,
    index: Complex64,
) -> Result<Scaled> {
    if omega.norm() == 0.0 {
        return Err(Error::Domain("q_factor is singular at omega = 0".into()));
    }
    let k = |tag: MediumTag| match tag {
        MediumTag::Vacuum => omega,
        MediumTag::Medium => omega * index,
    };
    let x_a = k(a) * radius;
    let x_ap = k(a_prime) * radius;
    let h = hankel_scaled(d, l, x_a)?;
    let hp = hankel_scaled(d_prime, l, x_ap)?;
    Ok(h
        .f_scaled()
        .mul(dhat_scaled(&hp, x_ap))
        .mul_complex(k(a_prime)))
}

/// TE wall amplitude at an explicit dielectric value.
pub fn s_b_te_eps(
    l: usize,
    omega: Complex64,
    radius: f64,
    eps: Complex64,
) -> Result<(Complex64, bool)> {
    s_b_eps(l, omega, radius, eps, Polarization::Te)
}

/// TM wall amplitude at an explicit dielectric value.
pub fn s_b_tm_eps(
    l: usize,
    omega: Complex64,
    radius: f64,
    eps: Complex64,
) -> Result<(Complex64, bool)> {
    s_b_eps(l, omega, radius, eps, Polarization::Tm)
}

fn s_b_eps(
    l: usize,
    omega: Complex64,
    radius: f64,
    eps: Complex64,
    pol: Polarization,
) -> Result<(Complex64, bool)> {
    s_b_with_index(l, omega, radius, eps, eps.sqrt(), pol)
}

fn s_b_with_index(
    l: usize,
    omega: Complex64,
    radius: f64,
    eps: Complex64,
    index: Complex64,
    pol: Polarization,
) -> Result<(Complex64, bool)> {
    let scaled = s_b_scaled_with_index(l, omega, radius, eps, index, pol)?;
    let value = scaled.0.to_complex().ok_or_else(|| {
        Error::Overflow(format!(
            "wall amplitude exceeds f64 range at l={l}, omega={omega}"
        ))
    })?;
    Ok((sanitize_imag_axis(omega, eps, value), scaled.1))
}

/// Scaled wall amplitude; the building block shared by the plain entry
/// points and the log-space energy integrands. Uses the principal-branch
/// index `eps.sqrt()`.
pub fn s_b_eps_scaled(
    l: usize,
    omega: Complex64,
    radius: f64,
    eps: Complex64,
    pol: Polarization,
) -> Result<(Scaled, bool)> {
    s_b_scaled_with_index(l, omega, radius, eps, eps.sqrt(), pol)
}

fn s_b_scaled_with_index(
    l: usize,
    omega: Complex64,
    radius: f64,
    eps: Complex64,
    index: Complex64,
    pol: Polarization,
) -> Result<(Scaled, bool)> {
    if omega.norm() == 0.0 {
        return Err(Error::Domain(
            "wall amplitude is singular at omega = 0".into(),
        ));
    }
    if eps == Complex64::new(1.0, 0.0) {
        // no contrast, no scattering: the Q differences cancel algebraically,
        // and relying on floating-point cancellation instead would turn
        // catastrophic at extreme |omega R|
        return Ok((Scaled::zero(), false));
    }
    use HankelKind::{Ingoing, Outgoing};
    use MediumTag::{Medium, Vacuum};
    let q_movo = q_factor(Medium, Vacuum, Outgoing, Outgoing, l, omega, radius, index)?;
    let q_vomo = q_factor(Vacuum, Medium, Outgoing, Outgoing, l, omega, radius, index)?;
    let q_movi = q_factor(Medium, Vacuum, Outgoing, Ingoing, l, omega, radius, index)?;
    let q_vimo = q_factor(Vacuum, Medium, Ingoing, Outgoing, l, omega, radius, index)?;
    let inv_eps = match pol {
        Polarization::Te => Complex64::new(1.0, 0.0),
        Polarization::Tm => eps.inv(),
    };
    let num = q_movo.sub(q_vomo.mul_complex(inv_eps));
    let den = q_movi.sub(q_vimo.mul_complex(inv_eps));
    let term_scale = q_movi
        .ln_norm()
        .max(q_vimo.mul_complex(inv_eps).ln_norm());
    let near_resonance = den.is_zero() || den.ln_norm() < term_scale + CONDITIONING_LN;
    if den.is_zero() {
        return Err(Error::Pole(format!(
            "wall amplitude denominator vanished at l={l}, omega={omega}"
        )));
    }
    Ok((num.div(den).neg(), near_resonance))
}

/// The wall amplitude split into its assembling parts, `s_b = -num/den`,
/// together with the sum `num + den` evaluated cancellation-free.
///
/// At small `|omega R|` the leading parts of `num` and `den` cancel to a
/// relative `(omega R)^2`, so quantities like `1 - s_b` computed from the
/// ratio lose all significance there. The identity
/// `num + den = 2 [k_V h1(X) Dhat j(x) - k_M j(x) Dhat h1(X) / eps~]`
/// (from `h1 + h2 = 2 j`) has terms whose leading parts differ by the factor
/// `-(l+1) eps~ / l`, so `sum` stays accurate at any argument; the energy
/// integrands assemble `1 - s_b s_c = (sum + num (s_c - 1)) / den` from it.
#[derive(Debug, Clone, Copy)]
pub struct WallParts {
    pub num: Scaled,
    pub den: Scaled,
    /// `num + den`, cancellation-free assembly.
    pub sum: Scaled,
}

/// Wall amplitude parts for one polarization and any dielectric model
/// (including the perfect conductor, where `num/den/sum` are the Hankel
/// values or their `Dhat` forms directly). A vanished `den` is returned
/// as-is; callers that need the ratio must check for it.
pub fn wall_parts_pol(
    l: usize,
    omega: Complex64,
    radius: f64,
    model: &DielectricModel,
    pol: Polarization,
) -> Result<WallParts> {
    if omega.norm() == 0.0 {
        return Err(Error::Domain(
            "wall amplitude is singular at omega = 0".into(),
        ));
    }
    if let DielectricModel::PerfectConductor = model {
        let x = omega * radius;
        let h1 = hankel_scaled(HankelKind::Outgoing, l, x)?;
        let h2 = hankel_scaled(HankelKind::Ingoing, l, x)?;
        let j = bessel_j_scaled(l, x)?;
        let (num, den, sum) = match pol {
            Polarization::Te => (
                h1.f_scaled(),
                h2.f_scaled(),
                j.f_scaled().mul_complex(Complex64::new(2.0, 0.0)),
            ),
            Polarization::Tm => (
                dhat_scaled(&h1, x),
                dhat_scaled(&h2, x),
                dhat_scaled(&j, x).mul_complex(Complex64::new(2.0, 0.0)),
            ),
        };
        return Ok(WallParts { num, den, sum });
    }
    let eps = eval_epsilon(model, omega)?;
    if eps == Complex64::new(1.0, 0.0) {
        // no contrast: s_b = 0 exactly
        let one = Scaled::from_complex(Complex64::new(1.0, 0.0));
        return Ok(WallParts {
            num: Scaled::zero(),
            den: one,
            sum: one,
        });
    }
    // the frequency-plane branch of sqrt(eps) keeps the parts analytic
    // across Im omega = -gamma/2, where the principal branch cuts
    let index = eval_refractive_index(model, omega)?;
    use HankelKind::{Ingoing, Outgoing};
    use MediumTag::{Medium, Vacuum};
    let q_movo = q_factor(Medium, Vacuum, Outgoing, Outgoing, l, omega, radius, index)?;
    let q_vomo = q_factor(Vacuum, Medium, Outgoing, Outgoing, l, omega, radius, index)?;
    let q_movi = q_factor(Medium, Vacuum, Outgoing, Ingoing, l, omega, radius, index)?;
    let q_vimo = q_factor(Vacuum, Medium, Ingoing, Outgoing, l, omega, radius, index)?;
    let inv_eps = match pol {
        Polarization::Te => Complex64::new(1.0, 0.0),
        Polarization::Tm => eps.inv(),
    };
    let num = q_movo.sub(q_vomo.mul_complex(inv_eps));
    let den = q_movi.sub(q_vimo.mul_complex(inv_eps));
    // num + den via h1 + h2 = 2 j, assembled without the large cancellation
    let k_v = omega;
    let k_m = omega * index;
    let x = k_v * radius;
    let x_m = k_m * radius;
    let h1_m = hankel_scaled(Outgoing, l, x_m)?;
    let j_v = bessel_j_scaled(l, x)?;
    let term_a = h1_m.f_scaled().mul(dhat_scaled(&j_v, x)).mul_complex(k_v);
    let term_b = j_v
        .f_scaled()
        .mul(dhat_scaled(&h1_m, x_m))
        .mul_complex(k_m * inv_eps);
    let sum = term_a
        .sub(term_b)
        .mul_complex(Complex64::new(2.0, 0.0));
    Ok(WallParts { num, den, sum })
}

/// TE wall amplitude for a dielectric model.
pub fn s_b_te(
    l: usize,
    omega: Complex64,
    radius: f64,
    model: &DielectricModel,
) -> Result<ScatterAmplitude> {
    s_b(Channel::new(l, Polarization::Te)?, omega, radius, model)
}

/// TM wall amplitude for a dielectric model.
pub fn s_b_tm(
    l: usize,
    omega: Complex64,
    radius: f64,
    model: &DielectricModel,
) -> Result<ScatterAmplitude> {
    s_b(Channel::new(l, Polarization::Tm)?, omega, radius, model)
}

/// Wall amplitude for any channel; perfect conductors route to the closed
/// mirror forms, everything else goes through the Q assembly.
pub fn s_b(
    channel: Channel,
    omega: Complex64,
    radius: f64,
    model: &DielectricModel,
) -> Result<ScatterAmplitude> {
    if let DielectricModel::PerfectConductor = model {
        return s_b_pec(channel.l, channel.pol, omega * radius).map(|mut a| {
            a.omega = omega;
            a
        });
    }
    let eps = eval_epsilon(model, omega)?;
    let index = eval_refractive_index(model, omega)?;
    let (value, near_resonance) =
        s_b_with_index(channel.l, omega, radius, eps, index, channel.pol)?;
    Ok(ScatterAmplitude {
        value,
        channel,
        site: ScatterSite::Wall,
        omega,
        near_resonance,
    })
}

/// Closed-form perfect-mirror amplitude at `x = omega R / c`:
/// TE `-h^(1)/h^(2)`, TM `-Dhat h^(1)/Dhat h^(2)`.
pub fn s_b_pec(l: usize, pol: Polarization, x: Complex64) -> Result<ScatterAmplitude> {
    let channel = Channel::new(l, pol)?;
    if x.norm() == 0.0 {
        return Err(Error::Domain("mirror amplitude is singular at x = 0".into()));
    }
    let h1 = hankel_scaled(HankelKind::Outgoing, l, x)?;
    let h2 = hankel_scaled(HankelKind::Ingoing, l, x)?;
    let (num, den) = match pol {
        Polarization::Te => (h1.f_scaled(), h2.f_scaled()),
        Polarization::Tm => (dhat_scaled(&h1, x), dhat_scaled(&h2, x)),
    };
    let near_resonance = den.is_zero();
    if near_resonance {
        return Err(Error::Pole(format!(
            "mirror amplitude denominator vanished at l={l}, x={x}"
        )));
    }
    let value = num.div(den).neg().to_complex().ok_or_else(|| {
        Error::Overflow(format!("mirror amplitude exceeds f64 range at l={l}, x={x}"))
    })?;
    let value = if x.re == 0.0 && x.im != 0.0 {
        Complex64::new(value.re, 0.0)
    } else {
        value
    };
    Ok(ScatterAmplitude {
        value,
        channel,
        site: ScatterSite::Wall,
        omega: x,
        near_resonance: false,
    })
}

/// Empty-cavity center amplitude: the ingoing field crosses the origin and
/// becomes outgoing, `s_c = 1` in every channel.
pub fn s_c_empty() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

/// Center amplitude of a polarizable atom, active in the l = 1 TM channel
/// only; every other channel scatters like empty space.
pub fn s_c_atom(
    channel: Channel,
    omega: Complex64,
    model: &PolarizabilityModel,
) -> Result<ScatterAmplitude> {
    let value = if channel.l == 1 && channel.pol == Polarization::Tm {
        let alpha = eval_alpha(model, omega)?;
        // k = omega in units c = 1
        let q = Complex64::new(0.0, 2.0 / 3.0) * omega * omega * omega * alpha;
        let den = Complex64::new(1.0, 0.0) - q;
        if den.norm() == 0.0 {
            return Err(Error::Pole(format!(
                "atom amplitude pole at omega = {omega}"
            )));
        }
        let v = (Complex64::new(1.0, 0.0) + q) / den;
        if omega.re == 0.0 {
            Complex64::new(v.re, 0.0)
        } else {
            v
        }
    } else {
        s_c_empty()
    };
    Ok(ScatterAmplitude {
        value,
        channel,
        site: ScatterSite::Center,
        omega,
        near_resonance: false,
    })
}

/// `s_c - 1` for the atom, computed directly as `2q/(1 - q)` with
/// `q = (2/3) i k^3 alpha`: forming `s_c` first would round a `q` below
/// machine epsilon away against the 1 and lose the atom entirely.
pub fn s_c_atom_minus_one(
    channel: Channel,
    omega: Complex64,
    model: &PolarizabilityModel,
) -> Result<Complex64> {
    if channel.l != 1 || channel.pol != Polarization::Tm {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let alpha = eval_alpha(model, omega)?;
    let q = Complex64::new(0.0, 2.0 / 3.0) * omega * omega * omega * alpha;
    let den = Complex64::new(1.0, 0.0) - q;
    if den.norm() == 0.0 {
        return Err(Error::Pole(format!("atom amplitude pole at omega = {omega}")));
    }
    let v = 2.0 * q / den;
    Ok(if omega.re == 0.0 {
        Complex64::new(v.re, 0.0)
    } else {
        v
    })
}

/// The response functions are real on the imaginary axis; clear roundoff in
/// the imaginary part of the amplitude there so reality is exact.
fn sanitize_imag_axis(omega: Complex64, eps: Complex64, value: Complex64) -> Complex64 {
    if omega.re == 0.0 && eps.im == 0.0 {
        Complex64::new(value.re, 0.0)
    } else {
        value
    }
}
