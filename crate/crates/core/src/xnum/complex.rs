//! Extended-exponent complex numbers (rectangular form).

use super::real::XReal;
use super::{XError, XResult};

/// A complex number with extended-exponent real and imaginary parts.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct XComplex {
    pub re: XReal,
    pub im: XReal,
}

impl XComplex {
    pub const ZERO: XComplex = XComplex {
        re: XReal::ZERO,
        im: XReal::ZERO,
    };
    pub const ONE: XComplex = XComplex {
        re: XReal::ONE,
        im: XReal::ZERO,
    };

    pub fn new(re: XReal, im: XReal) -> XComplex {
        XComplex { re, im }
    }

    pub fn from_f64(re: f64, im: f64) -> XResult<XComplex> {
        Ok(XComplex {
            re: XReal::from_f64(re)?,
            im: XReal::from_f64(im)?,
        })
    }

    pub fn from_real(re: XReal) -> XComplex {
        XComplex {
            re,
            im: XReal::ZERO,
        }
    }

    /// Builds `2^log2_mag * e^(i arg)`.
    pub fn from_polar(log2_mag: f64, arg: f64) -> XResult<XComplex> {
        let mag = XReal::from_log2(log2_mag)?;
        let (s, c) = arg.sin_cos();
        Ok(XComplex {
            re: mag.mul(&XReal::from_f64(c)?)?,
            im: mag.mul(&XReal::from_f64(s)?)?,
        })
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> XComplex {
        XComplex {
            re: self.re,
            im: self.im.neg(),
        }
    }

    pub fn neg(&self) -> XComplex {
        XComplex {
            re: self.re.neg(),
            im: self.im.neg(),
        }
    }

    pub fn add(&self, rhs: &XComplex) -> XResult<XComplex> {
        Ok(XComplex {
            re: self.re.add(&rhs.re)?,
            im: self.im.add(&rhs.im)?,
        })
    }

    pub fn sub(&self, rhs: &XComplex) -> XResult<XComplex> {
        Ok(XComplex {
            re: self.re.sub(&rhs.re)?,
            im: self.im.sub(&rhs.im)?,
        })
    }

    pub fn mul(&self, rhs: &XComplex) -> XResult<XComplex> {
        let re = self.re.mul(&rhs.re)?.sub(&self.im.mul(&rhs.im)?)?;
        let im = self.re.mul(&rhs.im)?.add(&self.im.mul(&rhs.re)?)?;
        Ok(XComplex { re, im })
    }

    /// Scales both components by a real factor.
    pub fn scale(&self, k: &XReal) -> XResult<XComplex> {
        Ok(XComplex {
            re: self.re.mul(k)?,
            im: self.im.mul(k)?,
        })
    }

    /// Divides both components by a real factor.
    pub fn div_real(&self, k: &XReal) -> XResult<XComplex> {
        Ok(XComplex {
            re: self.re.div(k)?,
            im: self.im.div(k)?,
        })
    }

    /// Complex division via the conjugate; domain error when `rhs` is zero.
    pub fn div(&self, rhs: &XComplex) -> XResult<XComplex> {
        if rhs.is_zero() {
            return Err(XError::Domain("complex division by zero".into()));
        }
        let denom = rhs.re.mul(&rhs.re)?.add(&rhs.im.mul(&rhs.im)?)?;
        self.mul(&rhs.conj())?.div_real(&denom)
    }

    /// Modulus. Exact when one component is zero (so values sitting exactly
    /// on a circle of interest compare exactly against its radius);
    /// otherwise a few ulps via an exponent-aligned hypotenuse.
    pub fn abs(&self) -> XResult<XReal> {
        if self.im.is_zero() {
            return Ok(self.re.abs());
        }
        if self.re.is_zero() {
            return Ok(self.im.abs());
        }
        let rr = self.re.mul(&self.re)?;
        let ii = self.im.mul(&self.im)?;
        rr.add(&ii)?.sqrt()
    }

    /// Log-polar form `(log2 |z|, arg z)` with `arg ∈ (-pi, pi]`.
    /// Domain error on zero.
    pub fn polar(&self) -> XResult<(f64, f64)> {
        if self.is_zero() {
            return Err(XError::Domain("polar form of zero".into()));
        }
        // Align both components to the larger exponent so the f64 hypot
        // cannot overflow regardless of the extended exponents.
        let e_re = if self.re.is_zero() {
            i64::MIN
        } else {
            self.re.exponent()
        };
        let e_im = if self.im.is_zero() {
            i64::MIN
        } else {
            self.im.exponent()
        };
        let e = e_re.max(e_im);
        let scaled = |x: &XReal, ex: i64| -> f64 {
            if x.is_zero() || e - ex > 200 {
                0.0
            } else {
                x.sign() as f64 * x.significand() * f64::powi(2.0, -((e - ex) as i32))
            }
        };
        let u = scaled(&self.re, e_re);
        let v = scaled(&self.im, e_im);
        Ok((e as f64 + u.hypot(v).log2(), v.atan2(u)))
    }
}
