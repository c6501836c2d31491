//! Rational-order fractional derivatives on the compactified real line.
//!
//! The line is split into `(-∞, a)`, `[a, b]` and `(b, ∞)`. The outer
//! pieces are parametrised by `ξ = |x|^{-1/q}` and carry the rescaled traces
//! `u(x)|x|^{1+α}`, which stay finite at `ξ = 0` (that is, at `x = ±∞`).

mod grid;
mod kernels;
mod operator;

pub use grid::{Domain, DomainPartition, RationalOrder, TriDomainFunction, TriDomainGrid};
pub use operator::{
    apply_operator, assemble_operator, fractional_derivative, prefactor, riesz_difference, riesz_minus,
    riesz_parts, riesz_plus, RieszParts,
};
