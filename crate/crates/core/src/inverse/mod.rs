//! Preimage location inside the annuli via argument-principle winding
//! counts, log-polar subdivision, and Newton refinement; preimage trees
//! carrying branch derivatives for the pressure sums.
//!
//! Regions are sectors in (log2 radius, angle) coordinates: the annuli span
//! hundreds of orders of magnitude, so Cartesian boxes are useless, while
//! the argument of an extended-precision value is exponent-free and stable.

use crate::construction::{
    eval_f, eval_f_anchored, eval_f_prime_anchored, region_of, AnchoredPoint, Params, RegionIndex,
    Scales,
};
use crate::xnum::{XComplex, XError, XReal};
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;
use std::io::Write;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum InvError {
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("geometry failure: {0}")]
    Geometry(String),
    #[error("node budget exceeded: tree would hold {needed} nodes, cap is {cap}")]
    Budget { needed: u128, cap: u128 },
    #[error("tree is partial; refusing: {0}")]
    Partial(String),
    #[error(transparent)]
    Num(#[from] XError),
}

/// A sector in log-polar coordinates: radii `[2^log2_r_lo, 2^log2_r_hi]`,
/// angles `[theta_lo, theta_hi]` with span at most a full turn.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SectorRegion {
    pub log2_r_lo: f64,
    pub log2_r_hi: f64,
    pub theta_lo: f64,
    pub theta_hi: f64,
}

impl SectorRegion {
    pub fn new(log2_r_lo: f64, log2_r_hi: f64, theta_lo: f64, theta_hi: f64) -> SectorRegion {
        assert!(log2_r_lo < log2_r_hi, "radial bounds out of order");
        let span = theta_hi - theta_lo;
        assert!(
            span > 0.0 && span <= 2.0 * PI + 1e-12,
            "bad angular span {span}"
        );
        SectorRegion {
            log2_r_lo,
            log2_r_hi,
            theta_lo,
            theta_hi,
        }
    }

    /// The full annulus with index `j`, as a region. The inner disk (j = 0)
    /// gets an inner radius far below both its outer radius and the target
    /// modulus: since the map scales like C z at the origin, no solution
    /// can sit that deep.
    pub fn annulus(sc: &Scales, j: usize, a: &XComplex) -> Result<SectorRegion, InvError> {
        let hi = sc.s(j).log2()?;
        let lo = if j == 0 {
            let a_log2 = if a.is_zero() { hi } else { a.abs()?.log2()? };
            hi.min(a_log2) - 64.0
        } else {
            sc.r(j).log2()?
        };
        Ok(SectorRegion::new(lo, hi, -PI, PI))
    }

    pub fn is_full_circle(&self) -> bool {
        self.theta_hi - self.theta_lo >= 2.0 * PI - 1e-12
    }

    /// Diameter in the log-polar metric (max of the two spans).
    pub fn diam(&self) -> f64 {
        (self.log2_r_hi - self.log2_r_lo).max(self.theta_hi - self.theta_lo)
    }

    fn center(&self) -> Result<XComplex, XError> {
        XComplex::from_polar(
            0.5 * (self.log2_r_lo + self.log2_r_hi),
            0.5 * (self.theta_lo + self.theta_hi),
        )
    }

    /// Splits at `frac` of the given axis (0 = log-radius, 1 = angle).
    ///
    /// An angular split of a full circle rotates both cut lines together
    /// (producing two half circles at `frac`): keeping the original seam
    /// fixed would pin a radial edge there through every retry, so a
    /// solution sitting on the seam could never be avoided.
    fn split(&self, axis: usize, frac: f64) -> (SectorRegion, SectorRegion) {
        let mut a = *self;
        let mut b = *self;
        if axis == 0 {
            let cut = self.log2_r_lo + frac * (self.log2_r_hi - self.log2_r_lo);
            a.log2_r_hi = cut;
            b.log2_r_lo = cut;
        } else if self.is_full_circle() {
            let cut = self.theta_lo + frac * (self.theta_hi - self.theta_lo);
            a.theta_lo = cut;
            a.theta_hi = cut + PI;
            b.theta_lo = cut + PI;
            b.theta_hi = cut + 2.0 * PI;
        } else {
            let cut = self.theta_lo + frac * (self.theta_hi - self.theta_lo);
            a.theta_hi = cut;
            b.theta_lo = cut;
        }
        (a, b)
    }

    fn contains(&self, log2_r: f64, theta: f64, pad: f64) -> bool {
        if log2_r < self.log2_r_lo - pad || log2_r > self.log2_r_hi + pad {
            return false;
        }
        if self.is_full_circle() {
            return true;
        }
        // Sector angles may extend beyond the principal branch after a
        // rotated split; lift the query angle into [theta_lo, theta_lo+2pi).
        let mut t = theta;
        if t < self.theta_lo - pad {
            t += 2.0 * PI;
        }
        t >= self.theta_lo - pad && t <= self.theta_hi + pad
    }
}

/// Evaluates `f(z) - a` with its log2 magnitude and argument.
fn boundary_value(
    p: &Params,
    sc: &Scales,
    a: &XComplex,
    log2_r: f64,
    theta: f64,
) -> Result<(f64, f64), InvError> {
    let z = XComplex::from_polar(log2_r, theta)?;
    let (v, rel) = eval_f(sc, &z).map_err(|e| InvError::Numerical(e.to_string()))?;
    if rel > p.tail_tol {
        return Err(InvError::Numerical(format!(
            "evaluation error bound {rel:.3e} beyond tolerance on the contour"
        )));
    }
    let g = v.sub(a)?;
    if g.is_zero() {
        return Err(InvError::Geometry(
            "exact zero of f - a on a contour".into(),
        ));
    }
    let (mag_log2, arg) = g.polar()?;
    Ok((mag_log2, arg))
}

/// Smallest signed angle congruent to `b - a`.
fn wrap_angle(a: f64, b: f64) -> f64 {
    let mut d = b - a;
    while d > PI {
        d -= 2.0 * PI;
    }
    while d <= -PI {
        d += 2.0 * PI;
    }
    d
}

const MAX_REFINE_DEPTH: usize = 48;

/// Accumulates the continuous argument change of `f - a` along one edge,
/// parametrized by `point(u)` for `u` in `[0, 1]`, by adaptive step-halving
/// until every increment is below pi/2.
fn track_edge(
    p: &Params,
    sc: &Scales,
    a: &XComplex,
    point: &dyn Fn(f64) -> (f64, f64),
    coarse: usize,
) -> Result<f64, InvError> {
    struct Seg {
        u0: f64,
        u1: f64,
        v0: (f64, f64),
        v1: (f64, f64),
        depth: usize,
    }
    let eval = |u: f64| -> Result<(f64, f64), InvError> {
        let (l, t) = point(u);
        boundary_value(p, sc, a, l, t)
    };
    let mut total = 0.0;
    let mut stack: Vec<Seg> = Vec::new();
    let mut prev_u = 0.0;
    let mut prev_v = eval(0.0)?;
    for i in 1..=coarse {
        let u = i as f64 / coarse as f64;
        let v = eval(u)?;
        stack.push(Seg {
            u0: prev_u,
            u1: u,
            v0: prev_v,
            v1: v,
            depth: 0,
        });
        prev_u = u;
        prev_v = v;
    }
    while let Some(seg) = stack.pop() {
        let d = wrap_angle(seg.v0.1, seg.v1.1);
        if d.abs() < PI / 2.0 && seg.depth > 0 {
            total += d;
            continue;
        }
        if d.abs() < PI / 2.0 && seg.depth == 0 {
            // Trust coarse segments only after one refinement pass: split
            // once unconditionally so a fast full twirl between coarse
            // samples cannot masquerade as a small increment.
            let um = 0.5 * (seg.u0 + seg.u1);
            let vm = eval(um)?;
            total += wrap_angle(seg.v0.1, vm.1) + wrap_angle(vm.1, seg.v1.1);
            continue;
        }
        if seg.depth >= MAX_REFINE_DEPTH {
            // A zero of f - a on (or numerically on) the edge never settles.
            let near_zero = seg.v0.0.min(seg.v1.0);
            let scale = seg.v0.0.max(seg.v1.0);
            return if near_zero < scale - 40.0 {
                Err(InvError::Geometry(
                    "argument refinement pinned a boundary zero".into(),
                ))
            } else {
                Err(InvError::Numerical(
                    "argument refinement stalled on an edge".into(),
                ))
            };
        }
        let um = 0.5 * (seg.u0 + seg.u1);
        let vm = eval(um)?;
        let depth = seg.depth + 1;
        stack.push(Seg {
            u0: seg.u0,
            u1: um,
            v0: seg.v0,
            v1: vm,
            depth,
        });
        stack.push(Seg {
            u0: um,
            u1: seg.u1,
            v0: vm,
            v1: seg.v1,
            depth,
        });
    }
    Ok(total)
}

/// Winding of `f - a` along the sector boundary, without jitter retries.
fn winding_raw(
    p: &Params,
    sc: &Scales,
    region: &SectorRegion,
    a: &XComplex,
) -> Result<i64, InvError> {
    let r = *region;
    let arc_pts = ((r.theta_hi - r.theta_lo) / (PI / 16.0)).ceil() as usize + 2;
    let rad_pts = ((r.log2_r_hi - r.log2_r_lo) * 2.0).ceil().max(8.0) as usize;
    let mut total = 0.0;
    // Counterclockwise: outer arc forward, inner arc backward; radial edges
    // only when the sector is not a full circle (they cancel exactly then).
    total += track_edge(
        p,
        sc,
        a,
        &|u| (r.log2_r_hi, r.theta_lo + u * (r.theta_hi - r.theta_lo)),
        arc_pts,
    )?;
    total += track_edge(
        p,
        sc,
        a,
        &|u| (r.log2_r_lo, r.theta_hi - u * (r.theta_hi - r.theta_lo)),
        arc_pts,
    )?;
    if !r.is_full_circle() {
        total += track_edge(
            p,
            sc,
            a,
            &|u| (r.log2_r_lo + u * (r.log2_r_hi - r.log2_r_lo), r.theta_lo),
            rad_pts,
        )?;
        total += track_edge(
            p,
            sc,
            a,
            &|u| (r.log2_r_hi - u * (r.log2_r_hi - r.log2_r_lo), r.theta_hi),
            rad_pts,
        )?;
    }
    let turns = total / (2.0 * PI);
    let w = turns.round();
    if (turns - w).abs() > 1e-3 {
        return Err(InvError::Numerical(format!(
            "winding total {turns:.6} turns is not within 1e-3 of an integer"
        )));
    }
    Ok(w as i64)
}

/// Number of solutions of `f(z) = a` inside the sector, by boundary
/// argument tracking. A zero pinned on the boundary is retried with the
/// radial bounds pushed outward by 1e-6, 2e-6, 4e-6 in log2; growing the
/// sector into the neighboring gaps is safe because gaps contain no
/// solutions (their images land in gaps, while `a` sits in an annulus).
pub fn winding_count(
    p: &Params,
    sc: &Scales,
    region: &SectorRegion,
    a: &XComplex,
) -> Result<i64, InvError> {
    let mut delta = 0.0;
    for attempt in 0..4 {
        let jittered = SectorRegion {
            log2_r_lo: region.log2_r_lo - delta,
            log2_r_hi: region.log2_r_hi + delta,
            ..*region
        };
        match winding_raw(p, sc, &jittered, a) {
            Err(InvError::Geometry(_)) if attempt < 3 => {
                delta = 1e-6 * f64::exp2(attempt as f64);
            }
            other => return other,
        }
    }
    unreachable!("jitter loop returns within four attempts")
}

const NEWTON_STEPS: usize = 64;
const TARGET_REL: f64 = 1e-12;
const ACCEPT_REL: f64 = 1e-10;

/// Newton iteration for `f(z) = a` from `start`; returns the refined point
/// and its final relative residual when it converges.
///
/// The iterate is carried as an anchored point: solutions in the higher
/// annuli hug the ladder zeros at relative distances far below one
/// significand ulp, so the update must act on the offset from the zero —
/// a plain iterate would stall at the representation floor, orders of
/// magnitude short of the residual target.
fn newton(
    sc: &Scales,
    a: &XComplex,
    start: &XComplex,
) -> Result<Option<(AnchoredPoint, f64)>, InvError> {
    let a_log2 = if a.is_zero() {
        None
    } else {
        Some(a.abs()?.log2()?)
    };
    let mut pt = AnchoredPoint::from_value(sc, start)?;
    let mut best: Option<(AnchoredPoint, f64)> = None;
    for _ in 0..NEWTON_STEPS {
        let (v, _) = eval_f_anchored(sc, &pt).map_err(|e| InvError::Numerical(e.to_string()))?;
        let g = v.sub(a)?;
        let d = match eval_f_prime_anchored(sc, &pt) {
            Ok((d, _)) => d,
            Err(e) => return Err(InvError::Numerical(e.to_string())),
        };
        let residual = match (a_log2, g.is_zero()) {
            (_, true) => 0.0,
            (Some(al), false) => f64::exp2(g.abs()?.log2()? - al),
            // Solving f = 0: measure the residual against the local scale
            // of f, which is |z f'(z)| up to a bounded factor.
            (None, false) => {
                let scale = d.abs()?.mul(&pt.value(sc)?.abs()?)?;
                if scale.is_zero() {
                    1.0
                } else {
                    f64::exp2(g.abs()?.log2()? - scale.log2()?)
                }
            }
        };
        if best.as_ref().is_none_or(|(_, r)| residual < *r) {
            best = Some((pt, residual));
        }
        if residual <= TARGET_REL {
            return Ok(best);
        }
        if d.is_zero() {
            return Ok(None);
        }
        let step = g.div(&d)?;
        pt = pt.with_offset(sc, pt.offset.sub(&step)?)?;
    }
    Ok(best.filter(|(_, r)| *r <= ACCEPT_REL))
}

const DIAM_TOL: f64 = 1e-3;
const SPLIT_FRACS: [f64; 3] = [0.5, 0.51, 0.49];
const MIN_DIAM: f64 = 1e-9;

fn solve_rec(
    p: &Params,
    sc: &Scales,
    region: &SectorRegion,
    a: &XComplex,
    w: i64,
    out: &mut Vec<AnchoredPoint>,
) -> Result<(), InvError> {
    if w == 0 {
        return Ok(());
    }
    if w == 1 && region.diam() < DIAM_TOL {
        let center = region.center()?;
        if let Some((b, _)) = newton(sc, a, &center)? {
            let (l, t) = b.value(sc)?.polar()?;
            if region.contains(l, t, 1e-7) {
                out.push(b);
                return Ok(());
            }
        }
        // Newton bounced; fall through to deeper bisection so the center
        // moves closer to the solution.
    }
    if region.diam() < MIN_DIAM {
        return Err(InvError::Numerical(format!(
            "could not isolate a solution in a sector of diameter {:.2e} holding winding {w}",
            region.diam()
        )));
    }
    // Split the wider coordinate, alternating when comparable; nudge the
    // cut line when a solution sits on it (detected as a boundary zero or
    // as children whose counts do not add up).
    let radial_span = region.log2_r_hi - region.log2_r_lo;
    let angular_span = region.theta_hi - region.theta_lo;
    let axis = if radial_span >= angular_span { 0 } else { 1 };
    for frac in SPLIT_FRACS {
        let (ra, rb) = region.split(axis, frac);
        let wa = match winding_count(p, sc, &ra, a) {
            Ok(w) => w,
            Err(InvError::Geometry(_) | InvError::Numerical(_)) => continue,
            Err(e) => return Err(e),
        };
        let wb = match winding_count(p, sc, &rb, a) {
            Ok(w) => w,
            Err(InvError::Geometry(_) | InvError::Numerical(_)) => continue,
            Err(e) => return Err(e),
        };
        if wa + wb != w {
            continue; // a solution straddles the cut; nudge it
        }
        solve_rec(p, sc, &ra, a, wa, out)?;
        solve_rec(p, sc, &rb, a, wb, out)?;
        return Ok(());
    }
    Err(InvError::Geometry(format!(
        "every split line of a sector near diameter {:.2e} hits a solution",
        region.diam()
    )))
}

const DISTINCT_TOL: f64 = 1e-8;

/// Log-polar distance used for distinctness of solutions.
fn log_polar_gap(x: &XComplex, y: &XComplex) -> Result<f64, InvError> {
    let (lx, tx) = x.polar()?;
    let (ly, ty) = y.polar()?;
    Ok((lx - ly).abs().max(wrap_angle(ty, tx).abs()))
}

/// All solutions of `f(z) = a` in the sector, by subdivision down to
/// winding <= 1 and diameter below 1e-3, then Newton refinement. The result
/// is deduplicated, verified against the sector's total winding, and sorted
/// by angle then log-radius.
pub fn solve_in_region(
    p: &Params,
    sc: &Scales,
    region: &SectorRegion,
    a: &XComplex,
) -> Result<Vec<AnchoredPoint>, InvError> {
    let w = winding_count(p, sc, region, a)?;
    let mut found = Vec::new();
    solve_rec(p, sc, region, a, w, &mut found)?;
    let mut distinct: Vec<(XComplex, AnchoredPoint)> = Vec::new();
    for b in found {
        let value = b.value(sc)?;
        let mut dup = false;
        for (seen, _) in &distinct {
            if log_polar_gap(&value, seen)? < DISTINCT_TOL {
                dup = true;
                break;
            }
        }
        if !dup {
            distinct.push((value, b));
        }
    }
    if distinct.len() as i64 != w {
        return Err(InvError::Numerical(format!(
            "found {} distinct solutions where the winding said {w}",
            distinct.len()
        )));
    }
    let mut keyed: Vec<(f64, f64, AnchoredPoint)> = Vec::with_capacity(distinct.len());
    for (value, b) in distinct {
        let (l, t) = value.polar()?;
        keyed.push((t, l, b));
    }
    keyed.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));
    Ok(keyed.into_iter().map(|(_, _, b)| b).collect())
}

/// One located preimage with the data the pressure sums need.
#[derive(Debug, Clone, Serialize)]
pub struct Preimage {
    /// The located point, anchored to its nearest ladder zero when closer
    /// than the significand can resolve.
    pub point: AnchoredPoint,
    /// The point collapsed to a single extended-complex value.
    pub value: XComplex,
    /// Index j of the annulus the point lies in.
    pub region: usize,
    pub f_prime_abs: XReal,
}

/// All preimages of `a` under the restriction of `f` to the bounded annuli,
/// searched annulus by annulus, in canonical order (region, angle,
/// log-radius). The zeros of `f` themselves are dispatched exactly: the
/// inner-disk preimage of 0 is 0, which no annular contour can enclose.
pub fn preimages(p: &Params, sc: &Scales, a: &XComplex) -> Result<Vec<Preimage>, InvError> {
    let mut out = Vec::new();
    for j in 0..=sc.n() {
        if a.is_zero() && j == 0 {
            let origin = AnchoredPoint::plain(XComplex::ZERO);
            let (d, _) = eval_f_prime_anchored(sc, &origin)
                .map_err(|e| InvError::Numerical(e.to_string()))?;
            out.push(Preimage {
                point: origin,
                value: XComplex::ZERO,
                region: 0,
                f_prime_abs: d.abs()?,
            });
            continue;
        }
        let region = SectorRegion::annulus(sc, j, a)?;
        for b in solve_in_region(p, sc, &region, a)? {
            let (d, _) =
                eval_f_prime_anchored(sc, &b).map_err(|e| InvError::Numerical(e.to_string()))?;
            let value = b.value(sc)?;
            let actual = region_of(sc, sc.m(), &value)?;
            if actual != RegionIndex::Annulus(j) {
                return Err(InvError::Numerical(format!(
                    "solution in the annulus-{j} search region classifies as {actual}"
                )));
            }
            out.push(Preimage {
                point: b,
                value,
                region: j,
                f_prime_abs: d.abs()?,
            });
        }
    }
    Ok(out)
}

/// One node of a preimage tree.
#[derive(Debug, Clone, Serialize)]
pub struct TreeNode {
    /// The point collapsed to a single extended-complex value.
    pub point: XComplex,
    /// The full-fidelity anchored form of the point.
    pub anchored: AnchoredPoint,
    /// Index into `nodes` of the parent; the root points to itself.
    pub parent: usize,
    pub depth: usize,
    /// Annulus index of the point.
    pub region: usize,
    /// |f'(point)|; one for the root.
    pub f_prime_abs: XReal,
    /// Product of |f'| along the branch back to the root: the modulus of
    /// the n-step derivative of the composition at this point.
    pub acc: XReal,
}

/// A depth-`n` tree of iterated preimages of `root`.
#[derive(Debug, Clone, Serialize)]
pub struct PreimageTree {
    pub root: XComplex,
    pub depth: usize,
    pub nodes: Vec<TreeNode>,
    /// Index ranges of each level in `nodes` (level 0 is the root).
    pub levels: Vec<(usize, usize)>,
    /// True when some node's preimage solve failed; consumers that need the
    /// full combinatorics must refuse partial trees.
    pub partial: bool,
    pub failures: Vec<String>,
}

impl PreimageTree {
    pub fn leaves(&self) -> &[TreeNode] {
        let (lo, hi) = self.levels[self.depth];
        &self.nodes[lo..hi]
    }
}

pub const NODE_BUDGET: u128 = 1_000_000;

/// Builds the depth-`n` preimage tree of `a` by breadth-first expansion.
/// Levels are expanded in parallel over parents; node order is canonical
/// (parents in order, each parent's children in solver order), so the
/// result is schedule-independent.
pub fn build_tree(
    p: &Params,
    sc: &Scales,
    a: &XComplex,
    n: usize,
) -> Result<PreimageTree, InvError> {
    assert!(n >= 1, "tree depth must be at least 1");
    let fanout = (sc.n() + 1) as u128;
    let needed: u128 = (0..=n as u32).map(|d| fanout.pow(d)).sum();
    if needed > NODE_BUDGET {
        return Err(InvError::Budget {
            needed,
            cap: NODE_BUDGET,
        });
    }
    let root_region = match region_of(sc, sc.m(), a)? {
        RegionIndex::Annulus(k) if k <= sc.n() => k,
        other => {
            return Err(InvError::Geometry(format!(
                "tree root must lie in a bounded annulus, found {other}"
            )))
        }
    };
    let mut nodes = vec![TreeNode {
        point: *a,
        anchored: AnchoredPoint::from_value(sc, a)?,
        parent: 0,
        depth: 0,
        region: root_region,
        f_prime_abs: XReal::ONE,
        acc: XReal::ONE,
    }];
    let mut levels = vec![(0usize, 1usize)];
    let mut partial = false;
    let mut failures = Vec::new();
    for d in 0..n {
        let (lo, hi) = levels[d];
        // Targeting the collapsed parent value is harmless: solutions move
        // by (target error)/|f'|, far below every tolerance in play.
        let solved: Vec<Result<Vec<Preimage>, InvError>> = (lo..hi)
            .into_par_iter()
            .map(|i| preimages(p, sc, &nodes[i].point))
            .collect();
        let start = nodes.len();
        for (offset, res) in solved.into_iter().enumerate() {
            let parent = lo + offset;
            match res {
                Ok(kids) if kids.len() == sc.n() + 1 => {
                    for kid in kids {
                        let acc = kid.f_prime_abs.mul(&nodes[parent].acc)?;
                        nodes.push(TreeNode {
                            point: kid.value,
                            anchored: kid.point,
                            parent,
                            depth: d + 1,
                            region: kid.region,
                            f_prime_abs: kid.f_prime_abs,
                            acc,
                        });
                    }
                }
                Ok(kids) => {
                    partial = true;
                    failures.push(format!(
                        "node {parent} at depth {d} yielded {} preimages instead of {}",
                        kids.len(),
                        sc.n() + 1
                    ));
                }
                Err(e) => {
                    partial = true;
                    failures.push(format!("node {parent} at depth {d}: {e}"));
                }
            }
        }
        levels.push((start, nodes.len()));
    }
    Ok(PreimageTree {
        root: *a,
        depth: n,
        nodes,
        levels,
        partial,
        failures,
    })
}

/// Writes the tree as JSON lines: one object per node with its depth,
/// region, the point in decimal and exact power-of-two form, and the log2
/// of the accumulated branch derivative. The anchor index and the offset
/// from the anchor zero pin down the sub-ulp structure the collapsed point
/// cannot carry (anchor 0 means the offset is the point itself).
pub fn export_jsonl<W: Write>(tree: &PreimageTree, mut w: W) -> std::io::Result<()> {
    for node in &tree.nodes {
        let line = serde_json::json!({
            "depth": node.depth,
            "region": format!("A{}", node.region),
            "re": node.point.re.decimal_string(),
            "im": node.point.im.decimal_string(),
            "re_exact": node.point.re.exact_string(),
            "im_exact": node.point.im.exact_string(),
            "anchor": node.anchored.anchor,
            "offset_re": node.anchored.offset.re.decimal_string(),
            "offset_im": node.anchored.offset.im.decimal_string(),
            "acc_log2": node.acc.log2().unwrap_or(f64::NEG_INFINITY),
        });
        writeln!(w, "{line}")?;
    }
    Ok(())
}
