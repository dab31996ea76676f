//! Numerical toolkit for radial boundary blow-up ("large") solutions of
//! φ-Laplacian problems `div(φ(|∇u|)∇u) = a(x) f(u)`.
//!
//! The crate is organized around the objects the existence theory consumes:
//!
//! - [`nfunction`]: the operator kernel φ with its N-function `Φ`, the inverse
//!   maps `Φ⁻¹`, `h = φ(t)·t`, `h⁻¹`, the growth indices `(l, m, l₁, m₁)`, and
//!   the power sandwich functions `ξ₁..ξ₄`, `η₁..η₄`.
//! - [`problem`]: the nonlinearity `f` (antiderivative `F`, partial integral
//!   `G`, monotone envelopes, the transform `𝓕(t) = (t/2)·f(t)^{-1/l₁}`) and
//!   radial weight bounds `a̲ ≤ ā` with the averaged mass `𝓐_ρ`.
//! - [`conditions`]: evidence-backed classifiers for the improper-integral
//!   hypotheses (Keller–Osserman, growth of `𝓐_ρ`, the oscillation budgets
//!   `H̄`/`H̃`, and subadditivity of `h⁻¹`).
//! - [`radial`]: the constructive core — radial IVP integration with blow-up
//!   radius detection, Dirichlet ball solves by shooting, the two-sided
//!   trajectory bound check, monotone boundary sweeps, and the entire-space
//!   sandwich construction.
//! - [`fd`]: an independent finite-difference solver (monotone sub/super
//!   iteration) used as a cross-validation oracle for the shooting solver.
//!
//! All spec types are immutable after construction and all operations are
//! pure functions; concurrent use needs no synchronization.

pub mod bracket;
pub mod conditions;
pub mod error;
pub mod fd;
pub mod interp;
pub mod nfunction;
pub mod problem;
pub mod quad;
pub mod radial;

pub use error::{Error, Result};
pub use nfunction::PhiSpec;
pub use problem::{NonlinearitySpec, WeightSpec};
