//! Pressure sums over preimage trees, the finite-depth Bowen-zero estimate
//! of the repeller dimension, the closed-form ceiling from the expansion
//! constant, and covering sums.
//!
//! The n-th pressure sum is `S_n(t) = sum over depth-n preimages z of
//! |(F^n)'(z)|^-t`, and `P_n(t) = (1/n) ln S_n(t)` approximates the
//! pressure. Its zero in `t` estimates the dimension of the repeller; the
//! scalar root of `L^-t = 1 - 2^-t` bounds it from above at every level of
//! the construction.

use crate::construction::{Params, Scales};
use crate::inverse::{build_tree, InvError, PreimageTree};
use crate::xnum::{XComplex, XError, XReal};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DimError {
    #[error("tree is partial; refusing: {0}")]
    Partial(String),
    #[error(
        "no sign change on the bracket: P({t_lo}) = {p_lo:.4}, P({t_hi}) = {p_hi:.4}; \
         widen t_range until the pressure is positive on the left and negative on the right"
    )]
    Bracket {
        t_lo: f64,
        t_hi: f64,
        p_lo: f64,
        p_hi: f64,
    },
    #[error("domain error: {0}")]
    Domain(String),
    #[error(transparent)]
    Inverse(#[from] InvError),
    #[error(transparent)]
    Num(#[from] XError),
}

pub const DEFAULT_T_RANGE: (f64, f64) = (1e-3, 1.5);
pub const DEFAULT_DEPTH: usize = 5;

fn require_complete(tree: &PreimageTree) -> Result<(), DimError> {
    if tree.partial {
        return Err(DimError::Partial(format!(
            "{} solve failures, first: {}",
            tree.failures.len(),
            tree.failures.first().map(String::as_str).unwrap_or("?")
        )));
    }
    Ok(())
}

/// Sums a slice pairwise (split at the midpoint, recurse): the reduction
/// order is a fixed function of the length, so results are bit-identical
/// regardless of scheduling.
fn balanced_sum(terms: &[XReal]) -> Result<XReal, XError> {
    match terms.len() {
        0 => Ok(XReal::ZERO),
        1 => Ok(terms[0]),
        n => balanced_sum(&terms[..n / 2])?.add(&balanced_sum(&terms[n / 2..])?),
    }
}

/// `S_n(t)`: the sum over leaves of (accumulated branch derivative)^-t,
/// in extended arithmetic with a fixed balanced reduction.
pub fn pressure_sum(tree: &PreimageTree, t: f64) -> Result<XReal, DimError> {
    assert!(t >= 0.0, "pressure sums need t >= 0");
    require_complete(tree)?;
    let mut terms = Vec::with_capacity(tree.leaves().len());
    for leaf in tree.leaves() {
        terms.push(XReal::from_log2(-t * leaf.acc.log2()?)?);
    }
    Ok(balanced_sum(&terms)?)
}

/// The covering sum: leaves contribute `(2 / accumulated derivative)^t`.
/// Koebe-style constants are omitted — they do not depend on the depth, so
/// the geometric decay in n is the meaningful output.
pub fn cover_sum(tree: &PreimageTree, t: f64) -> Result<XReal, DimError> {
    assert!(t >= 0.0, "cover sums need t >= 0");
    require_complete(tree)?;
    let mut terms = Vec::with_capacity(tree.leaves().len());
    for leaf in tree.leaves() {
        terms.push(XReal::from_log2(t * (1.0 - leaf.acc.log2()?))?);
    }
    Ok(balanced_sum(&terms)?)
}

/// `P_n(t) = (1/n) ln S_n(t)` at the tree's depth.
pub fn finite_pressure(tree: &PreimageTree, t: f64) -> Result<f64, DimError> {
    let s = pressure_sum(tree, t)?;
    Ok(s.log2()? * std::f64::consts::LN_2 / tree.depth as f64)
}

/// The tabulated pressure curve of one tree.
#[derive(Debug, Clone, Serialize)]
pub struct PressureCurve {
    pub base: XComplex,
    pub depth: usize,
    pub t_values: Vec<f64>,
    /// `S_n(t)` per tabulated t.
    pub s_values: Vec<XReal>,
    /// `P_n(t) = (1/n) ln S_n(t)` per tabulated t.
    pub p_values: Vec<f64>,
}

pub fn pressure_curve(tree: &PreimageTree, t_values: &[f64]) -> Result<PressureCurve, DimError> {
    let mut s_values = Vec::with_capacity(t_values.len());
    let mut p_values = Vec::with_capacity(t_values.len());
    for &t in t_values {
        assert!(t > 0.0 && t <= 2.0, "tabulated t must lie in (0, 2]");
        let s = pressure_sum(tree, t)?;
        p_values.push(s.log2()? * std::f64::consts::LN_2 / tree.depth as f64);
        s_values.push(s);
    }
    Ok(PressureCurve {
        base: tree.root,
        depth: tree.depth,
        t_values: t_values.to_vec(),
        s_values,
        p_values,
    })
}

/// Bisects `P_n` on an already-built tree to a bracket of width 1e-4.
/// Valid because `S_n` is strictly decreasing in t (every accumulated
/// derivative exceeds one when the expansion constant does).
pub fn bowen_zero_from(tree: &PreimageTree, t_range: (f64, f64)) -> Result<f64, DimError> {
    let (mut lo, mut hi) = t_range;
    assert!(lo > 0.0 && hi > lo, "need 0 < t_lo < t_hi");
    let p_lo = finite_pressure(tree, lo)?;
    let p_hi = finite_pressure(tree, hi)?;
    if !(p_lo > 0.0 && p_hi < 0.0) {
        return Err(DimError::Bracket {
            t_lo: lo,
            t_hi: hi,
            p_lo,
            p_hi,
        });
    }
    while hi - lo > 1e-4 {
        let mid = 0.5 * (lo + hi);
        if finite_pressure(tree, mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// The depth-n Bowen-zero estimate `t_n` for the dimension of the repeller,
/// from a fresh preimage tree at base point `a`.
pub fn bowen_zero(
    p: &Params,
    sc: &Scales,
    a: &XComplex,
    n: usize,
    t_range: (f64, f64),
) -> Result<f64, DimError> {
    let tree = build_tree(p, sc, a, n)?;
    bowen_zero_from(&tree, t_range)
}

/// The unique root `t*` of `L^-t = 1 - 2^-t` with `L = C/(4e)`, bisected to
/// 1e-6. For every `t > t*` the per-level pressure ratio falls below one,
/// so `t*` bounds the repeller dimension at every level at once.
pub fn closed_form_bound(c: f64) -> Result<f64, DimError> {
    let l = c / (4.0 * std::f64::consts::E);
    if l <= 1.0 {
        return Err(DimError::Domain(format!(
            "expansion constant L = C/(4e) = {l:.4} must exceed 1 for the bound to exist"
        )));
    }
    // g(t) = L^-t - (1 - 2^-t) is strictly decreasing from 1 toward -1.
    let g = |t: f64| (-t * l.ln()).exp() - 1.0 + (-t).exp2();
    let mut lo = 0.0;
    let mut hi = 1.0;
    let mut guard = 0;
    while g(hi) > 0.0 {
        hi *= 2.0;
        guard += 1;
        assert!(guard < 64, "root search runaway");
    }
    while hi - lo > 1e-6 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// log2 of the per-level ceiling `L^-t / (1 - 2^-t)`.
pub fn level_ratio_log2(sc: &Scales, t: f64) -> Result<f64, DimError> {
    let l_log2 = sc.l().log2()?;
    Ok(-t * l_log2 - (1.0 - (-t).exp2()).log2())
}
