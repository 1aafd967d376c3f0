//! Numerical laboratory for a family of entire functions
//! `f(z) = C · z · prod_k (1 - z / a_k)` whose zero scales `a_k` grow so fast
//! that the plane splits into closed annuli `A_k` (around each zero) separated
//! by gap rings `B_k` that the function maps strictly outward.
//!
//! The crate builds the scale ladder in overflow-safe extended-exponent
//! arithmetic, machine-checks the inequalities that make the annulus/gap
//! picture work at a concrete parameter pair `(C, N)`, classifies orbits
//! against that picture, inverts `f` on the annuli via argument-principle
//! winding counts plus Newton polishing, and estimates the box dimension of
//! the set of points whose orbits stay below the `N`-th scale, both from
//! finite-depth preimage trees (pressure sums) and from a closed-form
//! derivative-floor bound.
//!
//! Modules:
//!
//! * [`xnum`] — sign/significand/exponent reals and complexes with `i64`
//!   exponents, so quantities like `a_6 ~ 10^643` stay exact-ish.
//! * [`construction`] — parameters, the scale ladder, region classification,
//!   and evaluation of `f`, `f'`, and the log-derivative with truncation-tail
//!   error bounds.
//! * [`verifier`] — the inequality suite with per-check log2 margins.
//! * [`dynamics`] — orbit iteration with certified-escape / bounded-witness
//!   verdicts, and grid classification.
//! * [`inverse`] — winding counts, per-annulus preimage solving, preimage
//!   trees with accumulated derivatives.
//! * [`dimension`] — pressure sums over preimage trees, Bowen-type zero
//!   finding, the closed-form dimension bound, and cover sums.
//! * [`cli`] — the command-line front end (the `repeller` binary is a thin
//!   wrapper around it).

pub mod cli;
pub mod construction;
pub mod dimension;
pub mod dynamics;
pub mod inverse;
pub mod output;
pub mod verifier;
pub mod xnum;
