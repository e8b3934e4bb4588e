//! Lyapunov exponents of monic centred polynomials
//! `P(z) = z^d + A_{d-2} z^{d-2} + ... + A_0` on their Julia sets, with respect
//! to weighted Lyubich measures.
//!
//! * [`polynomial`], [`rootfinder`], [`backward`]: the polynomial family, its
//!   inverse branches and their fixed points.
//! * [`measure`]: sampled and exact finite-stage weighted measures.
//! * [`series`]: coefficient functions of the conjugacy from the circle.
//! * [`analysis`]: closed forms, estimators, expansions and reports.
//! * [`render`]: escape-time images.
//! * [`cli`]: the `lyap` command-line tool.

// index loops mirror the formulas; negated comparisons also reject NaN
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod backward;
pub mod cli;
pub mod error;
pub mod measure;
pub mod polynomial;
pub mod render;
pub mod rootfinder;
pub mod series;

pub use error::{Error, Result};
pub use polynomial::PolynomialSpec;
