//! The scale ladder and the function it supports.
//!
//! Given a coefficient `C` and a depth `N`, the ladder is
//!
//! ```text
//! a_1 = 1,    a_{k+1} = 8C * a_k * prod_{j<k} (a_k / a_j),
//! ```
//!
//! so `a_2 = 8C`, `a_3 = (8C)^3`, and in general `a_k = (8C)^{e_k}` with the
//! integer exponents `e_{k+1} = 1 + k e_k - sum_{j<k} e_j` (equivalently
//! `e_k = sum_{j<k} j!`). The function under study is the entire function
//!
//! ```text
//! f(z) = C * z * prod_k (1 - z / a_k),
//! ```
//!
//! truncated at `M = trunc` factors for evaluation, with a rigorous bound on
//! the dropped tail. Around each zero sits a closed annulus
//! `A_k = { r_k <= |z| <= s_k }` with `r_k = ((2k+1)/(2k+2)) a_k` and
//! `s_k = 10 a_k` (`r_0 = 0`, `s_0 = 16/C`), separated by open gap rings
//! `B_k = { s_k < |z| < r_{k+1} }`. The verifier module checks the
//! inequalities that make `f` map each gap ring strictly into the next one
//! out; everything downstream (orbit classification, preimage counting,
//! dimension estimates) consumes the ladder through [`Scales`].

mod eval;

pub use eval::{
    eval_f, eval_f_anchored, eval_f_prime, eval_f_prime_anchored, log_derivative, AnchoredPoint,
    EvalError,
};

use crate::xnum::{XComplex, XError, XReal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Parameters of a laboratory run.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Params {
    /// Coefficient `C` of the function.
    #[serde(rename = "C")]
    pub c: f64,
    /// Top annulus index for boundedness questions: an orbit is a bounded
    /// witness when it never leaves `A_0 ∪ ... ∪ A_N ∪ B_0`.
    #[serde(rename = "N")]
    pub n: usize,
    /// Number of product factors kept when evaluating `f` (called `M`).
    pub trunc: usize,
    /// Evaluations whose relative error bound exceeds this are flagged.
    pub tail_tol: f64,
    /// Samples per circle in the verifier's circle-image checks.
    pub samples_per_circle: usize,
    /// Seed for every randomized sampler (verifier circles, spot checks).
    pub seed: u64,
}

impl Params {
    /// Defaults: `trunc = N + 8`, `tail_tol = 1e-9`, 256 samples, seed 1.
    pub fn new(c: f64, n: usize) -> Params {
        Params {
            c,
            n,
            trunc: n + 8,
            tail_tol: 1e-9,
            samples_per_circle: 256,
            seed: 1,
        }
    }

    pub fn validate(&self) -> Result<(), BuildError> {
        let fail = |msg: String| Err(BuildError::InvalidParams(msg));
        if !self.c.is_finite() || self.c <= 0.0 {
            return fail(format!(
                "C must be a positive finite number, got {}",
                self.c
            ));
        }
        if self.n > 60 {
            return fail(format!(
                "N = {} is beyond the supported ladder height",
                self.n
            ));
        }
        if self.trunc < self.n + 2 {
            return fail(format!(
                "trunc = {} is too small: the checks need scales up to index N + 2 = {}",
                self.trunc,
                self.n + 2
            ));
        }
        if self.trunc > 64 {
            return fail(format!(
                "trunc = {} is beyond the supported ladder height",
                self.trunc
            ));
        }
        if !(self.tail_tol > 0.0 && self.tail_tol <= 1e-6) {
            return fail(format!(
                "tail_tol must lie in (0, 1e-6], got {}",
                self.tail_tol
            ));
        }
        if self.samples_per_circle == 0 {
            return fail("samples_per_circle must be at least 1".into());
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum BuildError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("scale ladder left the representable exponent range at a_{k}")]
    ExponentRange { k: usize },
    #[error("scale ladder invariant failed: {0}")]
    LadderInvariant(String),
    #[error(transparent)]
    Num(#[from] XError),
}

/// The computed scale ladder: zeros `a_k` (k = 1..=M+1), annulus radii
/// `r_k, s_k` (k = 0..=M), and the derivative floor unit `L = C / (4e)`.
#[derive(Debug, Clone)]
pub struct Scales {
    c: f64,
    c_x: XReal,
    n: usize,
    m: usize,
    /// `a[k]` is the k-th zero; `a[0]` is the 0 convention, and `a[m+1]` is
    /// kept for tail bounds.
    a: Vec<XReal>,
    /// Inner annulus radii, `r[0] = 0`.
    r: Vec<XReal>,
    /// Outer annulus radii, `s[0] = 16/C`.
    s: Vec<XReal>,
    l: XReal,
    log2_8c: f64,
}

impl Scales {
    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn c_x(&self) -> XReal {
        self.c_x
    }

    /// Top tracked ladder index `M` (the truncation order).
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The k-th zero, valid for `k = 0..=M+1` (with `a(0) = 0`).
    pub fn a(&self, k: usize) -> XReal {
        self.a[k]
    }

    /// Inner radius of `A_k`, valid for `k = 0..=M`.
    pub fn r(&self, k: usize) -> XReal {
        self.r[k]
    }

    /// Outer radius of `A_k`, valid for `k = 0..=M`.
    pub fn s(&self, k: usize) -> XReal {
        self.s[k]
    }

    /// Derivative floor unit `L = C / (4e)`; on `A_k` the derivative modulus
    /// is bounded below by `2^k L` once the verifier's checks pass.
    pub fn l(&self) -> XReal {
        self.l
    }

    pub fn log2_8c(&self) -> f64 {
        self.log2_8c
    }
}

/// Builds the ladder and verifies its structural invariants: strict growth,
/// the ratio floor `a_{k+1}/a_k >= (8C)^k` (up to 1e-9 in log2, since the
/// first two ratios are exact equalities), and the interleaving
/// `r_k < a_k < s_k < r_{k+1}`.
pub fn build_scales(p: &Params) -> Result<Scales, BuildError> {
    p.validate()?;
    let m = p.trunc;
    let c_x = XReal::from_f64(p.c)?;
    let eight_c = c_x.shift(3)?; // exact 8C
    let log2_8c = eight_c.log2()?;

    let mut a = Vec::with_capacity(m + 2);
    a.push(XReal::ZERO);
    a.push(XReal::ONE);
    let mut prior_product = XReal::ONE; // prod of a_1..a_{k-1}
    for k in 1..=m {
        let ak = a[k];
        let next = eight_c
            .mul(
                &ak.powi(k as u32)
                    .map_err(|_| BuildError::ExponentRange { k: k + 1 })?,
            )
            .and_then(|v| v.div(&prior_product))
            .map_err(|_| BuildError::ExponentRange { k: k + 1 })?;
        a.push(next);
        prior_product = prior_product
            .mul(&ak)
            .map_err(|_| BuildError::ExponentRange { k: k + 1 })?;
    }

    let ten = XReal::from_f64(10.0)?;
    let mut r = Vec::with_capacity(m + 1);
    let mut s = Vec::with_capacity(m + 1);
    r.push(XReal::ZERO);
    s.push(XReal::from_f64(16.0 / p.c)?);
    for (i, ak) in a[1..=m].iter().enumerate() {
        let k = (i + 1) as f64;
        let frac = XReal::from_f64((2.0 * k + 1.0) / (2.0 * k + 2.0))?;
        r.push(ak.mul(&frac)?);
        s.push(ak.mul(&ten)?);
    }

    let l = c_x.div(&XReal::from_f64(4.0 * std::f64::consts::E)?)?;

    let sc = Scales {
        c: p.c,
        c_x,
        n: p.n,
        m,
        a,
        r,
        s,
        l,
        log2_8c,
    };

    // Structural invariants.
    for k in 1..=m {
        if sc.a(k + 1).total_cmp(&sc.a(k)) != std::cmp::Ordering::Greater {
            return Err(BuildError::LadderInvariant(format!(
                "zeros must increase strictly, but a_{} <= a_{}",
                k + 1,
                k
            )));
        }
        let ratio = sc.a(k + 1).log2()? - sc.a(k).log2()?;
        if ratio < k as f64 * log2_8c - 1e-9 {
            return Err(BuildError::LadderInvariant(format!(
                "ratio a_{}/a_{} fell below (8C)^{} in log2: {} vs {}",
                k + 1,
                k,
                k,
                ratio,
                k as f64 * log2_8c
            )));
        }
    }
    if sc.s(0).sign() <= 0 {
        return Err(BuildError::LadderInvariant("s_0 must be positive".into()));
    }
    for k in 0..=m {
        if k >= 1 {
            let inner_ok = sc.r(k).total_cmp(&sc.a(k)) == std::cmp::Ordering::Less
                && sc.a(k).total_cmp(&sc.s(k)) == std::cmp::Ordering::Less;
            if !inner_ok {
                return Err(BuildError::LadderInvariant(format!(
                    "annulus {k} does not straddle its zero: need r_{k} < a_{k} < s_{k}"
                )));
            }
        }
        if k < m && sc.s(k).total_cmp(&sc.r(k + 1)) != std::cmp::Ordering::Less {
            return Err(BuildError::LadderInvariant(format!(
                "annuli {} and {} touch or overlap: need s_{} < r_{}",
                k,
                k + 1,
                k,
                k + 1
            )));
        }
    }
    Ok(sc)
}

/// log2 of the geometric-series bound
/// `S = (R / a_{M+1}) * (1 - 1/(8C))^{-1} >= sum_{j>M} R / a_j`
/// on the dropped-tail exponent sum, for `R = 2^log2_r`.
pub fn tail_sum_log2(sc: &Scales, log2_r: f64) -> f64 {
    let a_next = sc.a(sc.m + 1).log2().expect("ladder zeros are positive");
    log2_r - a_next - (1.0 - 1.0 / (8.0 * sc.c)).log2()
}

/// The tail factor bound `eta = exp(S) - 1`: every dropped factor product
/// lies within relative distance `eta` of 1. Underflows to 0 when the tail
/// is far below f64 resolution; saturates to infinity when `R` is so large
/// that the truncation is meaningless.
pub fn tail_eta(sc: &Scales, log2_r: f64) -> f64 {
    let s_log2 = tail_sum_log2(sc, log2_r);
    if s_log2 > 16.0 {
        return f64::INFINITY;
    }
    f64::exp_m1(f64::exp2(s_log2))
}

/// Public tail-bound entry point, restricted to the radius range the
/// laboratory certifies (`0 < R <= s_N`).
pub fn tail_bound(sc: &Scales, radius: &XReal) -> Result<f64, BuildError> {
    if radius.sign() <= 0 {
        return Err(BuildError::InvalidParams(
            "tail bound needs a positive radius".into(),
        ));
    }
    if radius.total_cmp(&sc.s(sc.n)) == std::cmp::Ordering::Greater {
        return Err(BuildError::InvalidParams(format!(
            "tail bound certified only up to s_N; radius exceeds s_{}",
            sc.n
        )));
    }
    Ok(tail_eta(sc, radius.log2()?))
}

/// Where a point sits relative to the annulus/gap picture.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "k")]
pub enum RegionIndex {
    /// `r_k <= |z| <= s_k` (closed; boundary ties resolve here).
    Annulus(usize),
    /// `s_k < |z| < r_{k+1}` (open gap ring).
    Gap(usize),
    /// `|z| > s_top`: outside every tracked annulus.
    BeyondTop,
}

impl std::fmt::Display for RegionIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RegionIndex::Annulus(k) => write!(f, "A{k}"),
            RegionIndex::Gap(k) => write!(f, "B{k}"),
            RegionIndex::BeyondTop => write!(f, "beyond"),
        }
    }
}

/// Classifies `|z|` against the tracked radii up to annulus index `top`
/// (`top <= M`). Closed annuli win boundary ties by construction: the
/// comparisons are exact on the stored radii, and the modulus of a point
/// with one zero component is computed exactly.
pub fn region_of(sc: &Scales, top: usize, z: &XComplex) -> Result<RegionIndex, XError> {
    assert!(
        top <= sc.m,
        "region_of: top index {top} exceeds ladder height {}",
        sc.m
    );
    // Fast exit for magnitudes far beyond the ladder: avoids squaring
    // exponents near the representable limit inside abs().
    let max_exp = z.re.exponent().max(z.im.exponent());
    if !z.is_zero() && max_exp > sc.s(top).exponent() + 2 {
        return Ok(RegionIndex::BeyondTop);
    }
    let mag = z.abs()?;
    for k in 0..=top {
        if mag.total_cmp(&sc.s(k)) != std::cmp::Ordering::Greater {
            return Ok(if mag.total_cmp(&sc.r(k)) != std::cmp::Ordering::Less {
                RegionIndex::Annulus(k)
            } else {
                RegionIndex::Gap(k - 1)
            });
        }
    }
    Ok(RegionIndex::BeyondTop)
}
