//! Scaled complex numbers: `value = mantissa * exp(exponent)`.
//!
//! Spherical Hankel functions on the imaginary axis pair a decaying with a
//! growing exponential, and at large order both kinds blow past the `f64`
//! range long before their ratios do. Everything downstream (the Q products
//! and the wall amplitudes) is assembled in this representation and the
//! exponents cancel analytically before anything is exponentiated.

use num_complex::Complex64;

/// Mantissa magnitudes are folded back into this band on `normalize`.
const RENORM_LIMIT: f64 = 1e150;

/// A complex value stored as `m * exp(e)` with `e` a real exponent offset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaled {
    pub m: Complex64,
    pub e: f64,
}

// methods named add/mul/... keep scaled-arithmetic call sites explicit;
// operator traits would hide the exponent bookkeeping behind plain syntax
#[allow(clippy::should_implement_trait)]
impl Scaled {
    pub fn new(m: Complex64, e: f64) -> Self {
        Scaled { m, e }.normalize()
    }

    pub fn from_complex(z: Complex64) -> Self {
        Scaled { m: z, e: 0.0 }.normalize()
    }

    pub fn zero() -> Self {
        Scaled {
            m: Complex64::new(0.0, 0.0),
            e: 0.0,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.m.re == 0.0 && self.m.im == 0.0
    }

    /// Fold the mantissa magnitude back into a safe band, moving the excess
    /// into the exponent.
    pub fn normalize(mut self) -> Self {
        let a = self.m.norm();
        if a == 0.0 {
            self.e = 0.0;
            return self;
        }
        if !(RENORM_LIMIT.recip()..=RENORM_LIMIT).contains(&a) {
            let shift = a.ln();
            // scalar multiply by the reciprocal: complex division would
            // underflow its |denominator|^2 for tiny shifts
            self.m *= (-shift).exp();
            self.e += shift;
        }
        self
    }

    pub fn mul(self, other: Scaled) -> Scaled {
        Scaled::new(self.m * other.m, self.e + other.e)
    }

    pub fn mul_complex(self, z: Complex64) -> Scaled {
        Scaled::new(self.m * z, self.e)
    }

    pub fn div(self, other: Scaled) -> Scaled {
        Scaled::new(self.m / other.m, self.e - other.e)
    }

    pub fn neg(self) -> Scaled {
        Scaled {
            m: -self.m,
            e: self.e,
        }
    }

    /// Sum with exponent rebasing to the larger offset.
    pub fn add(self, other: Scaled) -> Scaled {
        if self.is_zero() {
            return other;
        }
        if other.is_zero() {
            return self;
        }
        if self.e >= other.e {
            let d = (other.e - self.e).exp();
            Scaled::new(self.m + other.m * d, self.e)
        } else {
            let d = (self.e - other.e).exp();
            Scaled::new(self.m * d + other.m, other.e)
        }
    }

    pub fn sub(self, other: Scaled) -> Scaled {
        self.add(other.neg())
    }

    /// Collapse to a plain complex number. `None` when the true magnitude
    /// overflows `f64`; graceful underflow to zero is allowed.
    pub fn to_complex(self) -> Option<Complex64> {
        if self.is_zero() {
            return Some(Complex64::new(0.0, 0.0));
        }
        let a = self.m.norm();
        let total = a.ln() + self.e;
        if total > 709.0 {
            return None;
        }
        // route through the unit-magnitude mantissa so a large positive e
        // never meets exp() before the tiny mantissa cancels it
        Some(self.m / a * total.exp())
    }

    /// ln |value|; `-inf` for zero.
    pub fn ln_norm(self) -> f64 {
        self.m.norm().ln() + self.e
    }
}

/// A function/derivative pair sharing one exponent offset.
#[derive(Debug, Clone, Copy)]
pub struct ScaledPair {
    pub f: Complex64,
    pub df: Complex64,
    pub e: f64,
}

impl ScaledPair {
    pub fn f_scaled(&self) -> Scaled {
        Scaled {
            m: self.f,
            e: self.e,
        }
    }

    pub fn df_scaled(&self) -> Scaled {
        Scaled {
            m: self.df,
            e: self.e,
        }
    }

    /// Rescale so the larger of |f|, |df| sits in the safe band.
    pub fn normalize(mut self) -> Self {
        let a = self.f.norm().max(self.df.norm());
        if a == 0.0 {
            self.e = 0.0;
            return self;
        }
        if !(RENORM_LIMIT.recip()..=RENORM_LIMIT).contains(&a) {
            let shift = a.ln();
            let s = (-shift).exp();
            self.f *= s;
            self.df *= s;
            self.e += shift;
        }
        self
    }
}
