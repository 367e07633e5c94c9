//! Detailed-balance total scattering, the normal-mode condition, the
//! scatterers' density of states, and an argument-principle mode counter.
//!
//! The total amplitude `S = (s + e^{i delta} e^{i theta}) / (1 + s* e^{i delta} e^{i theta})`
//! restores unimodularity for lossy channels; the slowly varying phases
//! `delta` cancel in `1 - s_b s_c`, so every counting routine works directly
//! with the coherent mode condition. Counts come from the winding number of
//! `g = 1 - s_b s_c` around rectangles in the complex frequency plane; the
//! pointwise density of states differentiates the unwrapped phase of `g`
//! along the real axis.

use num_complex::Complex64;

use crate::media::{DielectricModel, PolarizabilityModel};
use crate::scattering::{s_b, s_c_atom, s_c_atom_minus_one, s_c_empty, wall_parts_pol, Channel};
use crate::{Error, Result};

use std::f64::consts::PI;

/// What sits at the cavity center.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CenterModel {
    Empty,
    Atom(PolarizabilityModel),
}

/// A cavity configuration: wall response, center scatterer, radius in
/// `c/omega_ref`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct System {
    pub wall: DielectricModel,
    pub center: CenterModel,
    pub radius: f64,
}

impl System {
    pub fn new(wall: DielectricModel, center: CenterModel, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::Validation(format!(
                "cavity radius must be > 0, got {radius}"
            )));
        }
        wall.validate()?;
        Ok(System {
            wall,
            center,
            radius,
        })
    }

    pub fn s_b(&self, channel: Channel, omega: Complex64) -> Result<Complex64> {
        Ok(s_b(channel, omega, self.radius, &self.wall)?.value)
    }

    pub fn s_c(&self, channel: Channel, omega: Complex64) -> Result<Complex64> {
        match self.center {
            CenterModel::Empty => Ok(s_c_empty()),
            CenterModel::Atom(model) => Ok(s_c_atom(channel, omega, &model)?.value),
        }
    }

    /// `s_c - 1` without the rounding loss of forming `s_c` first; zero for
    /// an empty center.
    pub fn s_c_minus_one(&self, channel: Channel, omega: Complex64) -> Result<Complex64> {
        match self.center {
            CenterModel::Empty => Ok(Complex64::new(0.0, 0.0)),
            CenterModel::Atom(model) => s_c_atom_minus_one(channel, omega, &model),
        }
    }

    /// The mode condition `1 - s_b s_c` at a complex frequency.
    pub fn mode_fn(&self, channel: Channel, omega: Complex64) -> Result<Complex64> {
        Ok(mode_condition(
            self.s_b(channel, omega)?,
            self.s_c(channel, omega)?,
        ))
    }

    /// The mode condition with the wall amplitude's denominator multiplied
    /// through: `den (1 - s_b s_c) = (num + den) + num (s_c - 1)` where
    /// `s_b = -num / den`.
    ///
    /// This has the same zeros as `1 - s_b s_c` but none of its poles. For an
    /// absorbing wall each zero of `den` sits just below the real axis next
    /// to a mode zero, and the pair contributes nothing to the winding of
    /// `1 - s_b s_c`; winding this pole-free form instead recovers the count.
    pub fn mode_numerator(&self, channel: Channel, omega: Complex64) -> Result<Complex64> {
        let parts = wall_parts_pol(channel.l(), omega, self.radius, &self.wall, channel.pol)?;
        let sc_m1 = self.s_c_minus_one(channel, omega)?;
        let n = parts.sum.add(parts.num.mul_complex(sc_m1));
        n.to_complex()
            .ok_or_else(|| Error::Overflow("mode numerator overflows f64 range".into()))
    }
}

/// One density-of-states sample, per channel (no m-degeneracy folded).
#[derive(Debug, Clone, Copy)]
pub struct DosSample {
    pub omega: f64,
    pub rho: f64,
}

/// Mode count attributed to one frequency bin.
#[derive(Debug, Clone, Copy)]
pub struct BinCount {
    pub omega_lo: f64,
    pub omega_hi: f64,
    pub delta_n: f64,
}

/// Rectangle in the complex frequency plane.
#[derive(Debug, Clone, Copy)]
pub struct Rect {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

/// Detailed-balance total amplitude; `|S| = 1` for every `theta` when
/// `|s| <= 1`.
pub fn total_scattering(s: Complex64, delta: f64, theta: f64) -> Result<Complex64> {
    let phase = Complex64::from_polar(1.0, delta + theta);
    let den = Complex64::new(1.0, 0.0) + s.conj() * phase;
    if den.norm() == 0.0 {
        return Err(Error::Pole(
            "total scattering pole: |s| = 1 with aligned phases".into(),
        ));
    }
    Ok((s + phase) / den)
}

/// `1 - s_b s_c`; zero exactly at a normal mode.
pub fn mode_condition(s_b: Complex64, s_c: Complex64) -> Complex64 {
    Complex64::new(1.0, 0.0) - s_b * s_c
}

/// Pointwise density of states `rho = -(1/pi) Im d/domega log(1 - s_b s_c)`
/// by Richardson-extrapolated central differences of the unwrapped phase.
///
/// `h_rel` is the relative step; the default from the quadrature layer is
/// `1e-4`. Lossless resonances inside the stencil raise
/// [`Error::Resonance`]; use [`dos_binned`] across those.
pub fn dos(channel: Channel, omega: f64, system: &System, h_rel: f64) -> Result<DosSample> {
    if !(omega > 0.0) {
        return Err(Error::Domain(format!(
            "density of states needs omega > 0, got {omega}"
        )));
    }
    let h = h_rel * omega;
    let g = |w: f64| system.mode_fn(channel, Complex64::new(w, 0.0));
    let center = g(omega)?;
    let mut mags = vec![center.norm()];
    let mut deriv = |step: f64| -> Result<f64> {
        let gp = g(omega + step)?;
        let gm = g(omega - step)?;
        mags.push(gp.norm());
        mags.push(gm.norm());
        // principal-branch phase difference; branch jumps > pi corrected by
        // routing through the ratio
        let dphi = (gp / gm).arg();
        Ok(dphi / (2.0 * step))
    };
    let d1 = deriv(h)?;
    let d2 = deriv(0.5 * h)?;
    let lo = mags.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = mags.iter().cloned().fold(0.0f64, f64::max);
    if lo < 1e-12 * hi.max(1e-300) {
        return Err(Error::Resonance(omega));
    }
    let richardson = (4.0 * d2 - d1) / 3.0;
    Ok(DosSample {
        omega,
        rho: -richardson / PI,
    })
}

/// Maximum bisection depth for phase tracking.
const UNWRAP_MAX_DEPTH: usize = 40;
/// Adjacent samples may differ in phase by at most this much after
/// refinement.
const UNWRAP_STEP_LIMIT: f64 = PI / 2.0;

/// Accumulated phase change of `f` from `a` to `b` along a straight segment,
/// by adaptive bisection. `fa`/`fb` are the endpoint values.
fn phase_sweep<F>(
    f: &F,
    a: Complex64,
    fa: Complex64,
    b: Complex64,
    fb: Complex64,
    depth: usize,
) -> Result<f64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let d = (fb / fa).arg();
    // depth 0 always samples the midpoint: an endpoint-only comparison
    // aliases by 2 pi when the phase loops within the segment
    if d.abs() <= UNWRAP_STEP_LIMIT && depth > 0 {
        return Ok(d);
    }
    if d.abs() <= UNWRAP_STEP_LIMIT && depth >= UNWRAP_MAX_DEPTH {
        return Ok(d);
    }
    if depth >= UNWRAP_MAX_DEPTH {
        return Err(Error::Unwrap(format!(
            "phase step {d:.3} rad not resolved between {a} and {b} at depth {depth}"
        )));
    }
    let mid = 0.5 * (a + b);
    let fm = f(mid)?;
    if fm.norm() == 0.0 {
        return Err(Error::Unwrap(format!("mode condition vanished at {mid}")));
    }
    Ok(phase_sweep(f, a, fa, mid, fm, depth + 1)?
        + phase_sweep(f, mid, fm, b, fb, depth + 1)?)
}

/// Mode count per bin over `[omega_lo, omega_hi]`.
///
/// Each bin is surrounded by a thin rectangle straddling the real axis and
/// the phase of `1 - s_b s_c` is accumulated around it with unwrapping, so
/// lossless resonances sitting exactly on the axis register as unit point
/// masses. A smooth one-sided phase drift (the continuum's rearrangement,
/// see [`dos_phase_difference`]) cancels between the two horizontal legs and
/// never pollutes the counts. `eta` is the rectangle half-height; the
/// default stays well below the first complex zero of the ingoing Hankel
/// functions, which would enter as spurious poles.
pub fn dos_binned(
    channel: Channel,
    system: &System,
    omega_lo: f64,
    omega_hi: f64,
    n_bins: usize,
    eta: Option<f64>,
) -> Result<Vec<BinCount>> {
    if !(omega_lo > 0.0) || !(omega_hi > omega_lo) {
        return Err(Error::Domain(format!(
            "need 0 < omega_lo < omega_hi, got [{omega_lo}, {omega_hi}]"
        )));
    }
    if n_bins == 0 {
        return Err(Error::Domain("need at least one bin".into()));
    }
    let width = (omega_hi - omega_lo) / n_bins as f64;
    let eta = eta.unwrap_or_else(|| (0.25 * width).min(0.4 / system.radius));
    if !(eta > 0.0) {
        return Err(Error::Domain(format!("eta must be > 0, got {eta}")));
    }
    // wind the pole-free numerator form: it shares the zeros of the mode
    // condition but is immune to the wall-amplitude poles that an absorbing
    // host places just below the real axis
    let f = |w: Complex64| system.mode_numerator(channel, w);
    let mut out = Vec::with_capacity(n_bins);
    for k in 0..n_bins {
        let lo = omega_lo + k as f64 * width;
        let hi = if k + 1 == n_bins {
            omega_hi
        } else {
            omega_lo + (k + 1) as f64 * width
        };
        let rect = Rect {
            re_min: lo,
            re_max: hi,
            im_min: -eta,
            im_max: eta,
        };
        // auto-split on unresolved phase steps, up to a modest depth
        let n = winding_with_splits(&f, &rect, 0)?;
        out.push(BinCount {
            omega_lo: lo,
            omega_hi: hi,
            delta_n: n as f64,
        });
    }
    Ok(out)
}

const BIN_SPLIT_MAX_DEPTH: usize = 12;

fn winding_with_splits<F>(f: &F, rect: &Rect, depth: usize) -> Result<i64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    match try_winding(f, rect) {
        Ok(n) => Ok(n),
        Err(Error::Unwrap(_)) | Err(Error::ContourThroughZero(_)) if depth < BIN_SPLIT_MAX_DEPTH => {
            // a zero too close to an edge: shrink vertically first, then
            // split in half and add the parts
            let thin = Rect {
                im_min: 0.5 * rect.im_min,
                im_max: 0.5 * rect.im_max,
                ..*rect
            };
            if let Ok(n) = try_winding(f, &thin) {
                return Ok(n);
            }
            let mid = 0.5 * (rect.re_min + rect.re_max);
            let left = Rect {
                re_max: mid,
                ..*rect
            };
            let right = Rect {
                re_min: mid,
                ..*rect
            };
            Ok(winding_with_splits(f, &left, depth + 1)?
                + winding_with_splits(f, &right, depth + 1)?)
        }
        Err(e) => Err(e),
    }
}

/// One-sided phase difference `-(1/pi) [arg g(omega_hi) - arg g(omega_lo)]`
/// of `g = 1 - s_b s_c` along the real axis, tracked continuously.
///
/// This is exactly the integral of the pointwise density of states over the
/// interval (fundamental theorem of calculus on the unwrapped phase); unlike
/// [`dos_binned`] it includes the smooth continuum rearrangement and is only
/// defined where no resonance sits on the path.
pub fn dos_phase_difference(
    channel: Channel,
    system: &System,
    omega_lo: f64,
    omega_hi: f64,
) -> Result<f64> {
    if !(omega_lo > 0.0) || !(omega_hi > omega_lo) {
        return Err(Error::Domain(format!(
            "need 0 < omega_lo < omega_hi, got [{omega_lo}, {omega_hi}]"
        )));
    }
    let f = |w: Complex64| system.mode_fn(channel, w);
    let a = Complex64::new(omega_lo, 0.0);
    let b = Complex64::new(omega_hi, 0.0);
    let dphi = phase_sweep(&f, a, f(a)?, b, f(b)?, 0)?;
    Ok(-dphi / PI)
}

/// Total of [`dos_binned`] over the interval.
pub fn dos_binned_total(
    channel: Channel,
    system: &System,
    omega_lo: f64,
    omega_hi: f64,
    n_bins: usize,
) -> Result<f64> {
    Ok(dos_binned(channel, system, omega_lo, omega_hi, n_bins, None)?
        .iter()
        .map(|b| b.delta_n)
        .sum())
}

const NUDGE_ATTEMPTS: usize = 4;
const CONTOUR_COARSE_SAMPLES: usize = 32;

/// Number of zeros of the mode condition inside a rectangle, by the argument
/// principle (winding number of the pole-free numerator form
/// [`System::mode_numerator`] along the boundary, counterclockwise).
///
/// The contour is first screened by minimum-modulus sampling; if a zero sits
/// (numerically) on the boundary the rectangle is nudged outward a few times
/// before giving up.
pub fn count_modes(channel: Channel, system: &System, rect: Rect) -> Result<i64> {
    if !(rect.re_min < rect.re_max) || !(rect.im_min < rect.im_max) {
        return Err(Error::Domain("degenerate rectangle".into()));
    }
    let f = |w: Complex64| system.mode_numerator(channel, w);
    let mut r = rect;
    let mut attempt = 0;
    loop {
        match try_winding(&f, &r) {
            Ok(n) => return Ok(n),
            Err(Error::Unwrap(_)) | Err(Error::ContourThroughZero(_)) => {
                attempt += 1;
                if attempt > NUDGE_ATTEMPTS {
                    return Err(Error::ContourThroughZero(attempt - 1));
                }
                let dw = 0.013 * attempt as f64 * (r.re_max - r.re_min);
                let dv = 0.017 * attempt as f64 * (r.im_max - r.im_min);
                r = Rect {
                    re_min: r.re_min - dw,
                    re_max: r.re_max + dw,
                    im_min: r.im_min - dv,
                    im_max: r.im_max + dv,
                };
            }
            Err(e) => return Err(e),
        }
    }
}

fn try_winding<F>(f: &F, r: &Rect) -> Result<i64>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let corners = [
        Complex64::new(r.re_min, r.im_min),
        Complex64::new(r.re_max, r.im_min),
        Complex64::new(r.re_max, r.im_max),
        Complex64::new(r.re_min, r.im_max),
    ];
    // sample each leg densely up front: the samples feed both the
    // minimum-modulus screen and the phase tracking, and pre-splitting the
    // legs keeps any single tracked segment short enough that a full 2 pi
    // loop of the phase inside it (possible near the origin, where the
    // condition behaves like a power of omega) cannot alias away
    let mut legs: Vec<Vec<(Complex64, Complex64)>> = Vec::with_capacity(4);
    let mut mags = Vec::with_capacity(4 * (CONTOUR_COARSE_SAMPLES + 1));
    for i in 0..4 {
        let (a, b) = (corners[i], corners[(i + 1) % 4]);
        let mut samples = Vec::with_capacity(CONTOUR_COARSE_SAMPLES + 1);
        for k in 0..=CONTOUR_COARSE_SAMPLES {
            let t = k as f64 / CONTOUR_COARSE_SAMPLES as f64;
            let w = a + (b - a) * t;
            let v = f(w)?;
            mags.push(v.norm());
            samples.push((w, v));
        }
        legs.push(samples);
    }
    let mut sorted = mags.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = sorted[sorted.len() / 2];
    let min = sorted[0];
    if min < 1e-8 * median.max(1e-300) {
        return Err(Error::ContourThroughZero(0));
    }
    let mut total = 0.0;
    for samples in &legs {
        for pair in samples.windows(2) {
            let (a, fa) = pair[0];
            let (b, fb) = pair[1];
            total += phase_sweep(f, a, fa, b, fb, 0)?;
        }
    }
    let winding = total / (2.0 * PI);
    let n = winding.round();
    if (winding - n).abs() > 0.05 {
        return Err(Error::Unwrap(format!(
            "winding number {winding:.4} is not close to an integer"
        )));
    }
    Ok(n as i64)
}
