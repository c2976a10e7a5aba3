//! Exact-arithmetic star products on phase-space polynomials, the family of
//! operator-ordering quantization maps they induce, and their truncated
//! Fock-space matrix representations.
//!
//! Everything is computed over the field Q(i) of Gaussian rationals (plus a
//! radical extension ring for matrix entries), so every identity checked by
//! the [`verify`] harness is an exact equality, never a floating-point
//! comparison.
//!
//! Module map:
//!
//! - [`scalar`] — Q(i) arithmetic and the radical ring `c * sqrt(r) * hbar^k`.
//! - [`series`] — truncated formal power series, ordering presets, and the
//!   ordering coefficients `g(m, n, s)`.
//! - [`phase`] — commutative polynomials in `(x, p, hbar)`, the Moyal product,
//!   and the generalized star product of each ordering.
//! - [`opalg`] — the noncommutative operator algebra in canonical order, the
//!   quantization map, and the ladder-operator algebra.
//! - [`fock`] — truncated ladder matrices and the matrix quantization map.
//! - [`lang`] — the expression parser and canonical printers.
//! - [`verify`] — seeded property suites exercising the whole stack.

pub mod fock;
pub mod lang;
pub mod opalg;
pub mod phase;
pub mod scalar;
pub mod series;
pub mod verify;

pub use fock::FockMatrix;
pub use lang::parse_phase_poly;
pub use opalg::{AAPoly, OpPoly};
pub use phase::PhasePoly;
pub use scalar::{GaussianRational, RadicalScalar};
pub use series::{FormalSeries, Ordering, Preset};
