//! Evaluation of the truncated product, its derivative, and the real
//! log-derivative.

use super::{tail_eta, Scales};
use crate::xnum::{XComplex, XError, XReal};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error(transparent)]
    Num(#[from] XError),
    #[error("log-derivative pole: input is within 1e-12 relative of a_{k}")]
    Pole { k: usize },
    #[error("log-derivative needs a strictly positive real input")]
    NonPositive,
}

/// Relative-error contribution of `n` rounded extended-precision operations.
fn rounding(n: usize) -> f64 {
    n as f64 * f64::EPSILON
}

/// Evaluates the truncated product `f(z) = C z prod_{k<=M} (1 - z/a_k)`.
///
/// Returns the value and a relative error bound `rel_err` combining the
/// dropped-tail bound at radius `|z|` with the accumulated rounding of the
/// ~M factor operations. Callers compare `rel_err` against their tolerance;
/// beyond roughly `a_{M+1}/2` the bound saturates to infinity.
///
/// Zeros are exact: at `z = 0` or `z = a_k` the returned value is the
/// canonical zero with `rel_err = 0` (the difference `a_k - a_k` cancels
/// exactly in this arithmetic).
///
/// Each factor is computed as `(a_k - z) / a_k`: subtracting first keeps
/// the factor fully accurate arbitrarily close to a zero, where the
/// algebraically equal `1 - z/a_k` would cancel catastrophically after the
/// division has already rounded.
pub fn eval_f(sc: &Scales, z: &XComplex) -> Result<(XComplex, f64), EvalError> {
    if z.is_zero() {
        return Ok((XComplex::ZERO, 0.0));
    }
    let mut acc = z.scale(&sc.c_x())?;
    for k in 1..=sc.m() {
        let factor = XComplex::from_real(sc.a(k)).sub(z)?.div_real(&sc.a(k))?;
        acc = acc.mul(&factor)?;
    }
    if acc.is_zero() {
        return Ok((acc, 0.0));
    }
    let log2_r = z.abs()?.log2()?;
    let rel_err = tail_eta(sc, log2_r) + rounding(4 * sc.m() + 8);
    Ok((acc, rel_err))
}

/// Evaluates `f'(z)`, choosing between two algebraically equal paths:
///
/// * away from the zeros `{0, a_1, ..., a_M}` (relative distance > 1e-9):
///   the log-derivative form `f(z) * (1/z + sum_k 1/(z - a_k))`;
/// * at or near a zero, where that form degenerates: the product-rule form
///   `C * (g(z) - z * sum_k P_k S_k / a_k)` built from prefix/suffix
///   partial products `P_k = prod_{j<k}(1 - z/a_j)`,
///   `S_k = prod_{j>k}(1 - z/a_j)`.
///
/// Both are O(M); the unit tests pin their agreement on the overlap.
pub fn eval_f_prime(sc: &Scales, z: &XComplex) -> Result<(XComplex, f64), EvalError> {
    if near_a_zero(sc, z)? {
        eval_f_prime_product(sc, z)
    } else {
        eval_f_prime_logderiv(sc, z)
    }
}

fn near_a_zero(sc: &Scales, z: &XComplex) -> Result<bool, EvalError> {
    if z.is_zero() {
        return Ok(true);
    }
    let mag = z.abs()?;
    if !mag.is_zero() && mag.log2()? < -30.0 {
        return Ok(true); // within 2^-30 of the origin: treat as near
    }
    if !z.im.is_zero() {
        // The zeros are real; distance to a_k is at least |Im z|.
        let im_log2 = z.im.log2_abs()?;
        let mag_log2 = mag.log2()?;
        if im_log2 - mag_log2 > -29.0 {
            return Ok(false);
        }
    }
    for k in 1..=sc.m() {
        let d = z.sub(&XComplex::from_real(sc.a(k)))?.abs()?;
        if d.is_zero() {
            return Ok(true);
        }
        if d.log2()? - sc.a(k).log2()? <= -9.0 * std::f64::consts::LOG2_10 {
            return Ok(true);
        }
    }
    Ok(false)
}

pub(crate) fn eval_f_prime_logderiv(
    sc: &Scales,
    z: &XComplex,
) -> Result<(XComplex, f64), EvalError> {
    let (f, f_err) = eval_f(sc, z)?;
    let mut s = XComplex::ONE.div(z)?;
    for k in 1..=sc.m() {
        let d = z.sub(&XComplex::from_real(sc.a(k)))?;
        s = s.add(&XComplex::ONE.div(&d)?)?;
    }
    let value = f.mul(&s)?;
    Ok((value, f_err + rounding(6 * sc.m() + 8)))
}

pub(crate) fn eval_f_prime_product(
    sc: &Scales,
    z: &XComplex,
) -> Result<(XComplex, f64), EvalError> {
    let m = sc.m();
    let mut factors = Vec::with_capacity(m + 1);
    factors.push(XComplex::ONE); // index 0 placeholder
    for k in 1..=m {
        // Subtract-then-divide, as in eval_f, to stay accurate near zeros.
        factors.push(XComplex::from_real(sc.a(k)).sub(z)?.div_real(&sc.a(k))?);
    }
    // prefix[k] = prod_{j<k} factors[j], suffix[k] = prod_{j>k} factors[j].
    let mut prefix = vec![XComplex::ONE; m + 2];
    for k in 1..=m {
        prefix[k + 1] = prefix[k].mul(&factors[k])?;
    }
    let mut suffix = vec![XComplex::ONE; m + 2];
    for k in (1..=m).rev() {
        suffix[k] = suffix[k + 1].mul(&factors[k])?;
    }
    let g = prefix[m + 1];
    let mut sum = XComplex::ZERO;
    for k in 1..=m {
        let around = prefix[k].mul(&suffix[k + 1])?;
        sum = sum.add(&around.div_real(&sc.a(k))?)?;
    }
    let value = g.sub(&z.mul(&sum)?)?.scale(&sc.c_x())?;
    let log2_r = if z.is_zero() {
        f64::NEG_INFINITY
    } else {
        z.abs()?.log2()?
    };
    let tail = if log2_r.is_finite() {
        2.0 * tail_eta(sc, log2_r)
    } else {
        0.0
    };
    Ok((value, tail + rounding(8 * m + 8)))
}

/// The real log-derivative `x f'(x) / f(x) = 1 + sum_{k<=M} x/(x - a_k)`
/// for `x > 0`, as a plain `f64` (its useful range is order one).
///
/// Errors: `NonPositive` unless `x > 0`; `Pole { k }` when `x` is within
/// 1e-12 relative distance of a zero `a_k`.
pub fn log_derivative(sc: &Scales, x: &XReal) -> Result<f64, EvalError> {
    if x.sign() <= 0 {
        return Err(EvalError::NonPositive);
    }
    let lx = x.log2()?;
    let mut total = 1.0f64;
    for k in 1..=sc.m() {
        // x/(x - a_k) = 1/(1 - a_k/x), with the ratio built from exact
        // ladder logs so huge scale gaps cannot overflow.
        let ratio = f64::exp2(sc.a(k).log2()? - lx);
        let denom = 1.0 - ratio;
        if denom.abs() < 1e-12 {
            return Err(EvalError::Pole { k });
        }
        total += 1.0 / denom;
    }
    Ok(total)
}

/// A point written as `a_anchor + offset`, with `a_0 = 0` (so anchor 0 is a
/// plain point).
///
/// Solutions of `f(z) = a` in the higher annuli sit at relative distances
/// from the ladder zeros far below one significand ulp (the offset shrinks
/// like `|a| / |f'(a_j)|`, which drops through 2^-100 already at desk
/// parameters), so no single significand-and-exponent value can carry them.
/// Keeping the anchor index and the offset separately represents such
/// points exactly: the offset has its own exponent, and the critical factor
/// `(a_j - z)` is `-offset` with no subtraction at all.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct AnchoredPoint {
    /// Ladder index of the anchor zero; 0 anchors at the origin.
    pub anchor: usize,
    pub offset: XComplex,
}

/// Below this relative distance from a ladder zero, points are anchored.
const ANCHOR_REL_LOG2: f64 = -20.0;

impl AnchoredPoint {
    pub fn plain(z: XComplex) -> AnchoredPoint {
        AnchoredPoint {
            anchor: 0,
            offset: z,
        }
    }

    /// Anchors `z` to the nearest ladder zero when it is within 2^-20
    /// relative distance of one; the offset `z - a_j` is then exact (the
    /// components are close enough that the subtraction does not round).
    pub fn from_value(sc: &Scales, z: &XComplex) -> Result<AnchoredPoint, XError> {
        if z.is_zero() {
            return Ok(AnchoredPoint::plain(*z));
        }
        let z_log2 = z.abs()?.log2()?;
        for j in 1..=sc.m() {
            let a_log2 = sc.a(j).log2()?;
            if (z_log2 - a_log2).abs() > 0.5 {
                continue;
            }
            let offset = z.sub(&XComplex::from_real(sc.a(j)))?;
            if offset.is_zero() || offset.abs()?.log2()? - a_log2 <= ANCHOR_REL_LOG2 {
                return Ok(AnchoredPoint { anchor: j, offset });
            }
        }
        Ok(AnchoredPoint::plain(*z))
    }

    /// The point collapsed to a single extended-complex value; rounds away
    /// any part of the offset below the significand of the anchor.
    pub fn value(&self, sc: &Scales) -> Result<XComplex, XError> {
        if self.anchor == 0 {
            Ok(self.offset)
        } else {
            XComplex::from_real(sc.a(self.anchor)).add(&self.offset)
        }
    }

    /// Replaces the offset, re-anchoring when the point drifts: onto a
    /// ladder zero's doorstep from a plain representation, or far enough
    /// off its anchor that plain representation is exact again.
    pub fn with_offset(&self, sc: &Scales, offset: XComplex) -> Result<AnchoredPoint, XError> {
        let moved = AnchoredPoint {
            anchor: self.anchor,
            offset,
        };
        if moved.anchor == 0 {
            return AnchoredPoint::from_value(sc, &moved.offset);
        }
        if !offset.is_zero() {
            let rel = offset.abs()?.log2()? - sc.a(moved.anchor).log2()?;
            if rel > ANCHOR_REL_LOG2 {
                return AnchoredPoint::from_value(sc, &moved.value(sc)?);
            }
        }
        Ok(moved)
    }
}

/// `eval_f` for an anchored point: factors are `((a_k - a_j) - offset)/a_k`
/// for `k != j` and `-offset/a_j` for the anchor itself, so accuracy is
/// uniform no matter how deep under the anchor's ulp the point sits.
pub fn eval_f_anchored(sc: &Scales, pt: &AnchoredPoint) -> Result<(XComplex, f64), EvalError> {
    let j = pt.anchor;
    if j == 0 {
        return eval_f(sc, &pt.offset);
    }
    let z = pt.value(sc)?;
    let mut acc = z.scale(&sc.c_x())?;
    for k in 1..=sc.m() {
        let factor = if k == j {
            pt.offset.neg().div_real(&sc.a(k))?
        } else {
            let gap = XComplex::from_real(sc.a(k).sub(&sc.a(j))?);
            gap.sub(&pt.offset)?.div_real(&sc.a(k))?
        };
        acc = acc.mul(&factor)?;
    }
    if acc.is_zero() {
        return Ok((acc, 0.0));
    }
    let log2_r = z.abs()?.log2()?;
    let rel_err = tail_eta(sc, log2_r) + rounding(4 * sc.m() + 8);
    Ok((acc, rel_err))
}

/// `eval_f_prime` for an anchored point. With the anchor factor exact, the
/// log-derivative form is stable right up to the zero; at the zero itself
/// the derivative reduces to the deleted product
/// `-C prod_{k != j} (a_k - a_j)/a_k`.
pub fn eval_f_prime_anchored(
    sc: &Scales,
    pt: &AnchoredPoint,
) -> Result<(XComplex, f64), EvalError> {
    let j = pt.anchor;
    if j == 0 {
        return eval_f_prime(sc, &pt.offset);
    }
    if pt.offset.is_zero() {
        let mut acc = XComplex::from_f64(-1.0, 0.0)?.scale(&sc.c_x())?;
        for k in 1..=sc.m() {
            if k == j {
                continue;
            }
            let gap = XComplex::from_real(sc.a(k).sub(&sc.a(j))?);
            acc = acc.mul(&gap.div_real(&sc.a(k))?)?;
        }
        return Ok((
            acc,
            2.0 * tail_eta(sc, sc.a(j).log2()?) + rounding(4 * sc.m() + 8),
        ));
    }
    let (f, f_err) = eval_f_anchored(sc, pt)?;
    let z = pt.value(sc)?;
    let mut s = XComplex::ONE.div(&z)?;
    for k in 1..=sc.m() {
        let d = if k == j {
            pt.offset
        } else {
            XComplex::from_real(sc.a(j).sub(&sc.a(k))?).add(&pt.offset)?
        };
        s = s.add(&XComplex::ONE.div(&d)?)?;
    }
    let value = f.mul(&s)?;
    Ok((value, f_err + rounding(6 * sc.m() + 8)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::{build_scales, Params};

    fn scales() -> Scales {
        build_scales(&Params::new(2000.0, 3)).unwrap()
    }

    /// Plain-f64 oracle for f at desk scale, written independently of the
    /// extended-precision path (complex arithmetic by hand).
    fn oracle_f(sc: &Scales, re: f64, im: f64) -> (f64, f64) {
        let (mut vr, mut vi) = (sc.c() * re, sc.c() * im);
        for k in 1..=sc.m() {
            let ak = sc.a(k).to_f64();
            if !ak.is_finite() {
                break; // factors this far out are 1 to f64 precision
            }
            let (fr, fi) = (1.0 - re / ak, -im / ak);
            let (nr, ni) = (vr * fr - vi * fi, vr * fi + vi * fr);
            vr = nr;
            vi = ni;
        }
        (vr, vi)
    }

    #[test]
    fn value_at_zero_and_at_ladder_zeros_is_exact() {
        let sc = scales();
        let (v, e) = eval_f(&sc, &XComplex::ZERO).unwrap();
        assert!(v.is_zero());
        assert_eq!(e, 0.0);
        for k in 1..=3 {
            let z = XComplex::from_real(sc.a(k));
            let (v, e) = eval_f(&sc, &z).unwrap();
            assert!(v.is_zero(), "f(a_{k}) must vanish exactly");
            assert_eq!(e, 0.0);
        }
    }

    #[test]
    fn linear_behavior_at_the_origin() {
        let sc = scales();
        let h = XComplex::from_f64(f64::exp2(-30.0), 0.0).unwrap();
        let (v, _) = eval_f(&sc, &h).unwrap();
        let ratio = v.re.div(&h.re).unwrap().to_f64() / sc.c();
        assert!((ratio - 1.0).abs() < 1e-6, "f(h)/(C h) = {ratio}");
        assert!(v.im.is_zero());
    }

    #[test]
    fn values_match_plain_f64_oracle_at_desk_scale() {
        let sc = scales();
        for &(re, im) in &[
            (0.75, 0.0),
            (-0.75, 0.0),
            (3.0, 4.0),
            (10.0, 0.0),
            (-12000.0, 5.0),
            (0.5, -0.5),
        ] {
            let z = XComplex::from_f64(re, im).unwrap();
            let (v, rel) = eval_f(&sc, &z).unwrap();
            let (or, oi) = oracle_f(&sc, re, im);
            let (vr, vi) = (v.re.to_f64(), v.im.to_f64());
            let scale = or.hypot(oi);
            assert!(
                (vr - or).hypot(vi - oi) <= 1e-11 * scale,
                "f({re}+{im}i) = {vr}+{vi}i vs oracle {or}+{oi}i"
            );
            assert!(rel < 1e-9, "rel_err {rel} unexpectedly large at desk scale");
        }
    }

    #[test]
    fn specific_value_is_frozen() {
        // f(0.75) at C = 2000, truncation 11:
        // 2000 * 0.75 * 0.25 * (1 - 0.75/16000) * (1 - 0.75/4.096e12) * ...
        let sc = scales();
        let z = XComplex::from_f64(0.75, 0.0).unwrap();
        let (v, _) = eval_f(&sc, &z).unwrap();
        let expect = 374.98242187493133;
        assert!((v.re.to_f64() - expect).abs() < 1e-9 * expect);
    }

    #[test]
    fn rel_err_is_tiny_below_top_scale_and_saturates_far_beyond() {
        let sc = scales();
        let z = XComplex::new(sc.s(3), XReal::ZERO);
        let (_, rel) = eval_f(&sc, &z).unwrap();
        assert!(rel < 1e-12, "tail at s_3 should be negligible, got {rel}");

        let mut p = Params::new(2000.0, 3);
        p.trunc = 5;
        let sc5 = build_scales(&p).unwrap();
        let far = XComplex::from_polar(sc5.a(6).log2().unwrap() + 1.0, 0.3).unwrap();
        let (_, rel) = eval_f(&sc5, &far).unwrap();
        assert!(
            rel > 1.0,
            "beyond a_(M+1) the bound exceeds 100% and the value is untrusted, got {rel}"
        );
        let very_far = XComplex::from_polar(sc5.a(6).log2().unwrap() + 100.0, 0.3).unwrap();
        let (_, rel) = eval_f(&sc5, &very_far).unwrap();
        assert!(rel.is_infinite(), "far past a_(M+1) the bound saturates");
    }

    #[test]
    fn truncation_order_does_not_change_values_below_the_top() {
        use rand::{Rng, SeedableRng};
        let mut p8 = Params::new(2000.0, 3);
        p8.trunc = 8;
        let mut p16 = Params::new(2000.0, 3);
        p16.trunc = 16;
        let sc8 = build_scales(&p8).unwrap();
        let sc16 = build_scales(&p16).unwrap();
        let hi = sc8.s(3).log2().unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        for _ in 0..100 {
            let z = XComplex::from_polar(
                rng.gen_range(-40.0..hi),
                rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI),
            )
            .unwrap();
            let (v8, rel8) = eval_f(&sc8, &z).unwrap();
            let (v16, _) = eval_f(&sc16, &z).unwrap();
            // The extra factors differ from 1 by far less than one ulp, so
            // the sticky addition keeps the values bit-identical.
            assert_eq!(v8, v16, "trunc?");
            assert!(rel8 < 1e-9);
        }
    }

    #[test]
    fn derivative_at_origin_is_the_coefficient_exactly() {
        let sc = scales();
        let (v, _) = eval_f_prime(&sc, &XComplex::ZERO).unwrap();
        assert_eq!(v.re.to_f64(), 2000.0);
        assert!(v.im.is_zero());
    }

    #[test]
    fn derivative_at_first_zero_matches_deleted_product_oracle() {
        let sc = scales();
        // f'(a_1) = -C * prod_{j>=2} (1 - a_1/a_j).
        let mut expect = -sc.c();
        for j in 2..=sc.m() {
            let aj = sc.a(j).to_f64();
            if aj.is_finite() {
                expect *= 1.0 - 1.0 / aj;
            }
        }
        let z = XComplex::from_real(sc.a(1));
        let (v, _) = eval_f_prime(&sc, &z).unwrap();
        let got = v.re.to_f64();
        assert!(
            (got - expect).abs() < 1e-11 * expect.abs(),
            "f'(1) = {got} vs oracle {expect}"
        );
        assert!(v.im.is_zero());
    }

    #[test]
    fn derivative_paths_agree_on_overlap() {
        let sc = scales();
        for &(scale_k, offset) in &[(1usize, 1e-8), (1, 1e-5), (2, 3e-7), (3, 1e-8)] {
            let x = sc
                .a(scale_k)
                .mul(&XReal::from_f64(1.0 + offset).unwrap())
                .unwrap();
            let z = XComplex::from_real(x);
            let (a, _) = eval_f_prime_product(&sc, &z).unwrap();
            let (b, _) = eval_f_prime_logderiv(&sc, &z).unwrap();
            let la = a.re.log2_abs().unwrap();
            let lb = b.re.log2_abs().unwrap();
            assert!(
                ((la - lb) * std::f64::consts::LN_2).abs() < 1e-6,
                "paths disagree near a_{scale_k}+{offset}: {la} vs {lb}"
            );
            assert_eq!(a.re.sign(), b.re.sign());
        }
    }

    #[test]
    fn derivative_matches_f64_log_derivative_oracle() {
        let sc = scales();
        let x = 0.75;
        let z = XComplex::from_f64(x, 0.0).unwrap();
        let (v, _) = eval_f_prime(&sc, &z).unwrap();
        let (f, _) = oracle_f(&sc, x, 0.0);
        let mut ld = 1.0 / x;
        for k in 1..=sc.m() {
            let ak = sc.a(k).to_f64();
            if ak.is_finite() {
                ld += 1.0 / (x - ak);
            }
        }
        let expect = f * ld;
        let got = v.re.to_f64();
        assert!(
            (got - expect).abs() < 1e-10 * expect.abs(),
            "{got} vs {expect}"
        );
    }

    #[test]
    fn log_derivative_limits_and_values() {
        let sc = scales();
        // x -> 0+: the sum tends to 1.
        let tiny = XReal::from_log2(-40.0).unwrap();
        assert!((log_derivative(&sc, &tiny).unwrap() - 1.0).abs() < 1e-9);

        // Frozen oracle at r_1 = 0.75: 1 + 0.75/(0.75-1) + 0.75/(0.75-16000) + ...
        let v = log_derivative(&sc, &sc.r(1)).unwrap();
        let mut expect = 1.0;
        for k in 1..=sc.m() {
            let ak = sc.a(k).to_f64();
            if ak.is_finite() {
                expect += 0.75 / (0.75 - ak);
            }
        }
        assert!((v - expect).abs() < 1e-10, "{v} vs {expect}");
        assert!(v <= -2.0);

        // At s_1 = 10 the value sits above 1/2.
        let v = log_derivative(&sc, &sc.s(1)).unwrap();
        let mut expect = 1.0;
        for k in 1..=sc.m() {
            let ak = sc.a(k).to_f64();
            if ak.is_finite() {
                expect += 10.0 / (10.0 - ak);
            }
        }
        assert!((v - expect).abs() < 1e-10);
        assert!(v >= 0.5);
    }

    #[test]
    fn log_derivative_pole_detection() {
        let sc = scales();
        let near = sc.a(2).mul(&XReal::from_f64(1.0 + 1e-13).unwrap()).unwrap();
        assert!(matches!(
            log_derivative(&sc, &near),
            Err(EvalError::Pole { k: 2 })
        ));
        let fine = sc.a(2).mul(&XReal::from_f64(1.0 + 1e-6).unwrap()).unwrap();
        assert!(log_derivative(&sc, &fine).unwrap() > 1e5);
        assert!(matches!(
            log_derivative(&sc, &XReal::ZERO),
            Err(EvalError::NonPositive)
        ));
        assert!(matches!(
            log_derivative(&sc, &sc.a(1)),
            Err(EvalError::Pole { k: 1 })
        ));
    }

    fn rel_gap(x: &XComplex, y: &XComplex) -> f64 {
        let d = x.sub(y).unwrap();
        if d.is_zero() {
            return 0.0;
        }
        f64::exp2(d.abs().unwrap().log2().unwrap() - y.abs().unwrap().log2().unwrap())
    }

    #[test]
    fn anchored_evaluation_matches_plain_at_representable_offsets() {
        let sc = scales();
        for scale in [1e-8, 1e-10, 3e-7] {
            let z = XComplex::new(
                sc.a(2).mul(&XReal::from_f64(1.0 + scale).unwrap()).unwrap(),
                sc.a(2).mul(&XReal::from_f64(scale / 2.0).unwrap()).unwrap(),
            );
            let pt = AnchoredPoint::from_value(&sc, &z).unwrap();
            assert_eq!(pt.anchor, 2, "offset {scale} should anchor");
            let (plain, _) = eval_f(&sc, &z).unwrap();
            let (anch, _) = eval_f_anchored(&sc, &pt).unwrap();
            assert!(
                rel_gap(&anch, &plain) < 1e-10,
                "f mismatch at offset {scale}"
            );
            let (plain_d, _) = eval_f_prime(&sc, &z).unwrap();
            let (anch_d, _) = eval_f_prime_anchored(&sc, &pt).unwrap();
            assert!(
                rel_gap(&anch_d, &plain_d) < 1e-8,
                "f' mismatch at offset {scale}"
            );
        }
    }

    #[test]
    fn anchored_points_resolve_far_below_the_significand() {
        let sc = scales();
        // An offset of 2^-80 relative to a_3 falls so far under the
        // anchor's significand that collapsing the point swallows the whole
        // radial displacement...
        let offset = XComplex::from_polar(sc.a(3).log2().unwrap() - 80.0, 0.3).unwrap();
        assert!(!offset.re.is_zero());
        let pt = AnchoredPoint { anchor: 3, offset };
        let collapsed = pt.value(&sc).unwrap();
        assert_eq!(collapsed.re, sc.a(3));
        // ...yet the anchored evaluation still resolves f there: to first
        // order f(a_3 + d) = f'(a_3) d, and the offset is tiny enough that
        // the higher-order terms sit below 1e-20 relative.
        let (f, _) = eval_f_anchored(&sc, &pt).unwrap();
        let (d0, _) = eval_f_prime_anchored(
            &sc,
            &AnchoredPoint {
                anchor: 3,
                offset: XComplex::ZERO,
            },
        )
        .unwrap();
        let first_order = d0.mul(&offset).unwrap();
        assert!(rel_gap(&f, &first_order) < 1e-12);
    }

    #[test]
    fn derivative_at_exact_zero_agrees_between_anchored_and_plain() {
        let sc = scales();
        for j in 1..=3usize {
            let pt = AnchoredPoint {
                anchor: j,
                offset: XComplex::ZERO,
            };
            let (anch, _) = eval_f_prime_anchored(&sc, &pt).unwrap();
            let (plain, _) = eval_f_prime(&sc, &XComplex::from_real(sc.a(j))).unwrap();
            assert!(rel_gap(&anch, &plain) < 1e-12, "f'(a_{j}) paths disagree");
        }
    }

    #[test]
    fn offset_updates_reanchor_on_drift() {
        let sc = scales();
        // A plain point on a zero's doorstep anchors itself.
        let z = XComplex::new(
            sc.a(2)
                .mul(&XReal::from_f64(1.0 + f64::exp2(-30.0)).unwrap())
                .unwrap(),
            XReal::ZERO,
        );
        let pt = AnchoredPoint::from_value(&sc, &z).unwrap();
        assert_eq!(pt.anchor, 2);
        // Drifting the offset up to an eighth of the anchor de-anchors.
        let wide = XComplex::from_polar(sc.a(2).log2().unwrap() - 3.0, 0.0).unwrap();
        let moved = pt.with_offset(&sc, wide).unwrap();
        assert_eq!(moved.anchor, 0);
        // A point in the middle of a gap stays plain.
        let mid = XComplex::from_f64(500.0, 0.0).unwrap();
        assert_eq!(AnchoredPoint::from_value(&sc, &mid).unwrap().anchor, 0);
    }
}
