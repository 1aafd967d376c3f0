//! Extended-exponent real numbers.

use super::{XError, XResult};
use std::cmp::Ordering;

/// Exponents must satisfy `|exponent| < EXP_LIMIT` (= 2^62). The headroom
/// below `i64::MAX` lets intermediate exponent sums be range-checked in
/// `i128` without wrapping.
pub const EXP_LIMIT: i64 = 1 << 62;

/// Plain `f64` unit roundoff (2^-53); one multiplication or aligned addition
/// on significands contributes at most a couple of these in relative error.
const UNIT: f64 = f64::EPSILON / 2.0;

/// A real number `sign * significand * 2^exponent`.
///
/// Canonical forms: zero is exactly `(0, 1.0, 0)`; nonzero values have
/// `significand ∈ [1, 2)` and `|exponent| < 2^62`. All constructors and
/// operations return canonical values, so derived `PartialEq` is value
/// equality.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XReal {
    sign: i8,
    sig: f64,
    exp: i64,
}

/// Splits a finite positive `f64` into `(sig, e)` with `sig ∈ [1, 2)` and
/// `x = sig * 2^e`, exactly.
fn split_pos(x: f64) -> (f64, i64) {
    debug_assert!(x.is_finite() && x > 0.0);
    let bits = x.to_bits();
    let raw = ((bits >> 52) & 0x7ff) as i64;
    if raw == 0 {
        // Subnormal: scaling by 2^200 is exact and lands in normal range.
        let (sig, e) = split_pos(x * f64::powi(2.0, 200));
        (sig, e - 200)
    } else {
        let sig = f64::from_bits((bits & !(0x7ffu64 << 52)) | (1023u64 << 52));
        (sig, raw - 1023)
    }
}

fn check_exp(e: i128) -> XResult<i64> {
    if e.unsigned_abs() >= EXP_LIMIT as u128 {
        Err(XError::Range(e))
    } else {
        Ok(e as i64)
    }
}

impl XReal {
    /// The canonical zero `(0, 1.0, 0)`.
    pub const ZERO: XReal = XReal {
        sign: 0,
        sig: 1.0,
        exp: 0,
    };
    /// One.
    pub const ONE: XReal = XReal {
        sign: 1,
        sig: 1.0,
        exp: 0,
    };

    /// Builds a canonical value from an arbitrary sign / magnitude /
    /// exponent triple. The significand must be finite and nonnegative
    /// (it need not lie in `[1, 2)`; it is renormalized here).
    pub fn new(sign: i32, significand: f64, exponent: i64) -> XResult<XReal> {
        if !significand.is_finite() || significand < 0.0 {
            return Err(XError::Domain(format!(
                "significand must be finite and nonnegative, got {significand}"
            )));
        }
        if sign == 0 || significand == 0.0 {
            return Ok(XReal::ZERO);
        }
        let (sig, e) = split_pos(significand);
        let exp = check_exp(exponent as i128 + e as i128)?;
        Ok(XReal {
            sign: sign.signum() as i8,
            sig,
            exp,
        })
    }

    /// Converts a finite `f64` exactly.
    pub fn from_f64(x: f64) -> XResult<XReal> {
        if !x.is_finite() {
            return Err(XError::Domain(format!("not finite: {x}")));
        }
        if x == 0.0 {
            return Ok(XReal::ZERO);
        }
        let (sig, e) = split_pos(x.abs());
        Ok(XReal {
            sign: if x > 0.0 { 1 } else { -1 },
            sig,
            exp: e,
        })
    }

    /// Builds `2^l` from a finite `f64` log2 value.
    pub fn from_log2(l: f64) -> XResult<XReal> {
        if !l.is_finite() {
            return Err(XError::Domain(format!("log2 value not finite: {l}")));
        }
        if l.abs() >= EXP_LIMIT as f64 {
            return Err(XError::Range(l as i128));
        }
        let fl = l.floor();
        let mut exp = fl as i64;
        let mut sig = f64::exp2(l - fl);
        if sig >= 2.0 {
            // Rounding in exp2 can push the fractional part to exactly 2.
            sig /= 2.0;
            exp += 1;
        }
        let exp = check_exp(exp as i128)?;
        Ok(XReal { sign: 1, sig, exp })
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    pub fn sign(&self) -> i32 {
        self.sign as i32
    }

    pub fn significand(&self) -> f64 {
        self.sig
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    /// `log2 |self|` as an `f64`, relative error below 1e-14.
    /// Domain error unless `self` is strictly positive.
    pub fn log2(&self) -> XResult<f64> {
        if self.sign <= 0 {
            return Err(XError::Domain(format!(
                "log2 requires a positive value, got sign {}",
                self.sign
            )));
        }
        Ok(self.exp as f64 + self.sig.log2())
    }

    /// `log2 |self|` for any nonzero value (sign discarded).
    pub fn log2_abs(&self) -> XResult<f64> {
        self.abs().log2()
    }

    pub fn neg(&self) -> XReal {
        XReal {
            sign: -self.sign,
            ..*self
        }
    }

    pub fn abs(&self) -> XReal {
        XReal {
            sign: self.sign.abs(),
            ..*self
        }
    }

    /// Multiplication; at most 1 ulp of relative rounding error.
    pub fn mul(&self, rhs: &XReal) -> XResult<XReal> {
        if self.sign == 0 || rhs.sign == 0 {
            return Ok(XReal::ZERO);
        }
        let mut sig = self.sig * rhs.sig; // in [1, 4)
        let mut e = self.exp as i128 + rhs.exp as i128;
        if sig >= 2.0 {
            sig /= 2.0;
            e += 1;
        }
        Ok(XReal {
            sign: self.sign * rhs.sign,
            sig,
            exp: check_exp(e)?,
        })
    }

    /// Division; at most 1 ulp of relative rounding error.
    pub fn div(&self, rhs: &XReal) -> XResult<XReal> {
        if rhs.sign == 0 {
            return Err(XError::Domain("division by zero".into()));
        }
        if self.sign == 0 {
            return Ok(XReal::ZERO);
        }
        let mut sig = self.sig / rhs.sig; // in (1/2, 2)
        let mut e = self.exp as i128 - rhs.exp as i128;
        if sig < 1.0 {
            sig *= 2.0;
            e -= 1;
        }
        Ok(XReal {
            sign: self.sign * rhs.sign,
            sig,
            exp: check_exp(e)?,
        })
    }

    /// Addition with a sticky cutoff: when the exponents differ by more than
    /// 64 the larger operand is returned exactly (the dropped tail is below
    /// 2^-64 relative, i.e. under one `f64` ulp). Exact cancellation yields
    /// canonical zero. Otherwise at most ~2 ulp of relative error.
    pub fn add(&self, rhs: &XReal) -> XResult<XReal> {
        if self.sign == 0 {
            return Ok(*rhs);
        }
        if rhs.sign == 0 {
            return Ok(*self);
        }
        let (hi, lo) = if self.exp >= rhs.exp {
            (self, rhs)
        } else {
            (rhs, self)
        };
        let gap = (hi.exp as i128 - lo.exp as i128) as u128;
        if gap > 64 {
            return Ok(*hi);
        }
        let scaled = lo.sig * f64::powi(2.0, -(gap as i32)); // exact scaling
        let s = hi.sign as f64 * hi.sig + lo.sign as f64 * scaled;
        if s == 0.0 {
            return Ok(XReal::ZERO);
        }
        let (sig, e) = split_pos(s.abs());
        Ok(XReal {
            sign: if s > 0.0 { 1 } else { -1 },
            sig,
            exp: check_exp(hi.exp as i128 + e as i128)?,
        })
    }

    pub fn sub(&self, rhs: &XReal) -> XResult<XReal> {
        self.add(&rhs.neg())
    }

    /// Square root; domain error on negative input.
    pub fn sqrt(&self) -> XResult<XReal> {
        if self.sign < 0 {
            return Err(XError::Domain("sqrt of a negative value".into()));
        }
        if self.sign == 0 {
            return Ok(XReal::ZERO);
        }
        let (mut sig, mut e) = (self.sig, self.exp);
        if e & 1 != 0 {
            sig *= 2.0; // in [2, 4), exact
            e -= 1;
        }
        let (rsig, re) = split_pos(sig.sqrt());
        Ok(XReal {
            sign: 1,
            sig: rsig,
            exp: check_exp(e as i128 / 2 + re as i128)?,
        })
    }

    /// Integer power by repeated squaring.
    pub fn powi(&self, n: u32) -> XResult<XReal> {
        let mut result = XReal::ONE;
        let mut base = *self;
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = result.mul(&base)?;
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(result)
    }

    /// Exact scaling by `2^k`.
    pub fn shift(&self, k: i64) -> XResult<XReal> {
        if self.sign == 0 {
            return Ok(XReal::ZERO);
        }
        Ok(XReal {
            exp: check_exp(self.exp as i128 + k as i128)?,
            ..*self
        })
    }

    /// Total order consistent with the represented real values.
    pub fn total_cmp(&self, rhs: &XReal) -> Ordering {
        match self.sign.cmp(&rhs.sign) {
            Ordering::Equal => {}
            ord => return ord,
        }
        if self.sign == 0 {
            return Ordering::Equal;
        }
        let mag = match self.exp.cmp(&rhs.exp) {
            Ordering::Equal => self.sig.partial_cmp(&rhs.sig).unwrap(),
            ord => ord,
        };
        if self.sign > 0 {
            mag
        } else {
            mag.reverse()
        }
    }

    /// Nearest `f64` (±inf on overflow, signed zero on underflow).
    pub fn to_f64(&self) -> f64 {
        if self.sign == 0 {
            return 0.0;
        }
        let s = self.sign as f64;
        if self.exp > 1030 {
            return s * f64::INFINITY;
        }
        if self.exp < -1080 {
            return s * 0.0;
        }
        // exp2 stays finite over the whole clamped range (powi would build
        // 2^1074 as an intermediate and overflow for deep subnormals).
        s * self.sig * f64::exp2(self.exp as f64)
    }

    /// Decimal rendering `±d.dddddde±E` (6 fractional digits); `"0"` for zero.
    /// For astronomically large exponents the printed mantissa degrades
    /// gracefully (the exponent stays faithful), which is all the reports
    /// need.
    pub fn decimal_string(&self) -> String {
        if self.sign == 0 {
            return "0".to_string();
        }
        let log10 = (self.exp as f64 + self.sig.log2()) * std::f64::consts::LOG10_2;
        let mut e10 = log10.floor();
        let mut mant = f64::powf(10.0, log10 - e10);
        if mant >= 9.999_999_5 {
            mant = 1.0;
            e10 += 1.0;
        }
        let sign_char = if self.sign > 0 { '+' } else { '-' };
        format!("{sign_char}{mant:.6}e{:+}", e10 as i64)
    }

    /// Exact rendering `±m*2^e` with the significand printed in shortest
    /// round-trip form; `"0"` for zero.
    pub fn exact_string(&self) -> String {
        if self.sign == 0 {
            return "0".to_string();
        }
        let sign_char = if self.sign > 0 { '+' } else { '-' };
        format!("{sign_char}{}*2^{}", self.sig, self.exp)
    }

    /// A bound on the relative error after `n` basic operations.
    pub fn rounding_bound(n: usize) -> f64 {
        2.0 * n as f64 * UNIT
    }
}

/// Reports serialize extended reals as their decimal rendering: compact,
/// deterministic, and readable at any exponent.
impl serde::Serialize for XReal {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.decimal_string())
    }
}

impl PartialOrd for XReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.total_cmp(other))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn xr(sign: i32, sig: f64, exp: i64) -> XReal {
        XReal::new(sign, sig, exp).unwrap()
    }

    #[test]
    fn normalize_examples() {
        let a = xr(1, 0.75, 0);
        assert_eq!((a.sign(), a.significand(), a.exponent()), (1, 1.5, -1));

        assert!(XReal::new(1, 0.0, 0).unwrap().is_zero());
        assert_eq!(XReal::new(1, 0.0, 0).unwrap(), XReal::ZERO);

        let b = xr(-1, 6.0, 10);
        assert_eq!((b.sign(), b.significand(), b.exponent()), (-1, 1.5, 12));

        assert!(matches!(XReal::new(1, f64::NAN, 0), Err(XError::Domain(_))));
        assert!(matches!(XReal::new(1, -3.0, 0), Err(XError::Domain(_))));
        assert!(matches!(
            XReal::new(1, 1.0, EXP_LIMIT),
            Err(XError::Range(_))
        ));
    }

    #[test]
    fn mul_examples() {
        let a = xr(1, 1.5, 100);
        let b = xr(1, 1.5, 200);
        let p = a.mul(&b).unwrap();
        // 2.25 * 2^300 = 1.125 * 2^301
        assert_eq!((p.sign(), p.significand(), p.exponent()), (1, 1.125, 301));

        assert!(a.mul(&XReal::ZERO).unwrap().is_zero());

        let big = xr(1, 1.0, 1 << 61);
        assert!(matches!(big.mul(&big), Err(XError::Range(_))));
    }

    #[test]
    fn add_sticky_and_cancellation() {
        let one = XReal::ONE;
        let tiny = xr(1, 1.0, -100);
        // Exponent gap 100 > 64: the larger operand comes back exactly.
        assert_eq!(one.add(&tiny).unwrap(), one);
        // Gaps up to 64 are still computed.
        let close = xr(1, 1.0, -40);
        let sum = one.add(&close).unwrap();
        assert!(sum.total_cmp(&one) == Ordering::Greater);
        // At gap exactly 64 the sum is computed (and rounds in f64 rather
        // than being dropped by the sticky rule).
        let at_cutoff = xr(1, 1.0, -64);
        assert_eq!(one.add(&at_cutoff).unwrap(), one);

        // Exact cancellation gives canonical zero.
        let c = xr(1, 1.7, 42);
        assert_eq!(c.add(&c.neg()).unwrap(), XReal::ZERO);

        // 1 + 1 = 2.
        let two = one.add(&one).unwrap();
        assert_eq!((two.significand(), two.exponent()), (1.0, 1));
    }

    #[test]
    fn add_matches_f64_at_desk_scale() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20_000 {
            let x = rng.gen_range(-1e9..1e9);
            let y = rng.gen_range(-1e9..1e9);
            let xs = XReal::from_f64(x).unwrap();
            let ys = XReal::from_f64(y).unwrap();
            let s = xs.add(&ys).unwrap().to_f64();
            let expect = x + y;
            assert!(
                (s - expect).abs() <= 4.0 * f64::EPSILON * expect.abs().max(1.0),
                "add mismatch: {x} + {y} -> {s} vs {expect}"
            );
        }
    }

    #[test]
    fn log2_examples() {
        assert_eq!(xr(1, 1.0, 1000).log2().unwrap(), 1000.0);
        let v = xr(1, 1.5, -5);
        assert!((v.log2().unwrap() - (1.5f64.log2() - 5.0)).abs() < 1e-15);
        assert!(matches!(XReal::ZERO.log2(), Err(XError::Domain(_))));
        assert!(matches!(xr(-1, 1.0, 0).log2(), Err(XError::Domain(_))));
    }

    #[test]
    fn div_and_sqrt() {
        let a = xr(1, 1.5, 10); // 1536
        assert_eq!(a.div(&a).unwrap(), XReal::ONE);
        let three = XReal::from_f64(3.0).unwrap();
        let two = XReal::from_f64(2.0).unwrap();
        let q = three.div(&two).unwrap();
        assert_eq!((q.significand(), q.exponent()), (1.5, 0));

        let nine = XReal::from_f64(9.0).unwrap();
        let r = nine.sqrt().unwrap();
        assert_eq!(r.to_f64(), 3.0);

        // Odd exponent: sqrt(2^101) = sqrt(2) * 2^50.
        let s = xr(1, 1.0, 101).sqrt().unwrap();
        assert!((s.significand() - std::f64::consts::SQRT_2).abs() < 1e-15);
        assert_eq!(s.exponent(), 50);

        assert!(matches!(xr(-1, 1.0, 0).sqrt(), Err(XError::Domain(_))));
    }

    #[test]
    fn powi_matches_repeated_mul() {
        let b = xr(1, 1.25, 7);
        let mut acc = XReal::ONE;
        for _ in 0..13 {
            acc = acc.mul(&b).unwrap();
        }
        let p = b.powi(13).unwrap();
        assert_eq!(p.exponent(), acc.exponent());
        assert!((p.significand() - acc.significand()).abs() < 1e-13);
        assert_eq!(b.powi(0).unwrap(), XReal::ONE);
    }

    #[test]
    fn from_log2_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10_000 {
            let l = rng.gen_range(-1e6..1e6);
            let v = XReal::from_log2(l).unwrap();
            assert!(v.significand() >= 1.0 && v.significand() < 2.0);
            assert!(
                (v.log2().unwrap() - l).abs() < 1e-9,
                "log2 round trip at {l}"
            );
        }
        assert!(XReal::from_log2(f64::INFINITY).is_err());
        assert!(XReal::from_log2(1e19).is_err());
    }

    #[test]
    fn to_f64_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..10_000 {
            let x: f64 = rng.gen_range(-1e12..1e12);
            assert_eq!(XReal::from_f64(x).unwrap().to_f64(), x);
        }
        assert_eq!(XReal::ZERO.to_f64(), 0.0);
        assert_eq!(xr(1, 1.0, 5000).to_f64(), f64::INFINITY);
        assert_eq!(xr(-1, 1.0, 5000).to_f64(), f64::NEG_INFINITY);
        assert_eq!(xr(1, 1.0, -5000).to_f64(), 0.0);
    }

    /// Long product chains against a split-form log-domain oracle: the
    /// product's (integer exponent, significand) against an exact `i128`
    /// exponent sum plus a compensated sum of significand logs. Comparing the
    /// two *parts* keeps the comparison meaningful at 1e-9 even when the
    /// total log2 is ~1e9 (a single f64 could not resolve that difference).
    #[test]
    fn product_chains_match_log_domain_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(20010);
        for _ in 0..100 {
            let mut product = XReal::ONE;
            let mut exp_sum: i128 = 0;
            let mut frac_sum = 0.0f64;
            let mut frac_comp = 0.0f64; // Kahan compensation
            for _ in 0..1000 {
                let sig = rng.gen_range(1.0..2.0);
                let exp = rng.gen_range(-1_000_000i64..=1_000_000);
                let factor = XReal::new(1, sig, exp).unwrap();
                product = product.mul(&factor).unwrap();
                exp_sum += factor.exponent() as i128;
                let term = factor.significand().log2();
                let y = term - frac_comp;
                let t = frac_sum + y;
                frac_comp = (t - frac_sum) - y;
                frac_sum = t;
            }
            let carry = product.exponent() as i128 - exp_sum;
            let diff = carry as f64 + (product.significand().log2() - frac_sum);
            assert!(
                diff.abs() < 1e-9,
                "chain product drifted from log-domain oracle by {diff}"
            );
        }
    }

    #[test]
    fn ordering_agrees_with_log2() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..20_000 {
            let a = XReal::new(1, rng.gen_range(1.0..2.0), rng.gen_range(-1000..1000)).unwrap();
            let b = XReal::new(1, rng.gen_range(1.0..2.0), rng.gen_range(-1000..1000)).unwrap();
            let (la, lb) = (a.log2().unwrap(), b.log2().unwrap());
            if (la - lb).abs() > 1e-12 {
                let by_log = la.partial_cmp(&lb).unwrap();
                assert_eq!(a.total_cmp(&b), by_log, "ordering vs log2 at {la} {lb}");
            }
        }
        // Sign ordering: negative < zero < positive.
        let neg = xr(-1, 1.0, 100);
        assert_eq!(neg.total_cmp(&XReal::ZERO), Ordering::Less);
        assert_eq!(XReal::ZERO.total_cmp(&XReal::ONE), Ordering::Less);
        // Both negative: larger magnitude is smaller.
        let m1 = xr(-1, 1.0, 10);
        let m2 = xr(-1, 1.0, 20);
        assert_eq!(m2.total_cmp(&m1), Ordering::Less);
    }

    #[test]
    fn shift_is_exact() {
        let v = xr(1, 1.75, 12);
        let s = v.shift(100).unwrap();
        assert_eq!((s.significand(), s.exponent()), (1.75, 112));
        assert!(matches!(v.shift(EXP_LIMIT), Err(XError::Range(_))));
    }

    #[test]
    fn renderings() {
        let v = XReal::from_f64(4.096e12).unwrap();
        assert_eq!(v.decimal_string(), "+4.096000e+12");
        let n = XReal::from_f64(-0.75).unwrap();
        assert_eq!(n.decimal_string(), "-7.500000e-1");
        assert_eq!(n.exact_string(), "-1.5*2^-1");
        assert_eq!(XReal::ZERO.decimal_string(), "0");
        assert_eq!(XReal::ZERO.exact_string(), "0");
        // Huge exponent: decimal exponent still faithful.
        let big = xr(1, 1.0, 2136);
        assert!(big.decimal_string().ends_with("e+643"));
    }

    #[test]
    fn subnormal_significands_normalize() {
        let v = XReal::new(1, 5e-324, 0).unwrap(); // smallest subnormal
        assert!(v.significand() >= 1.0 && v.significand() < 2.0);
        assert_eq!(v.exponent(), -1074);
        assert_eq!(v.to_f64(), 5e-324);
    }
}
