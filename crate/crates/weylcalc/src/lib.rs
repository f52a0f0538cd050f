//! Exact symbolic calculus for the filtered algebra of linear differential
//! operators with polynomial coefficients on R^n, its classical limit
//! (polynomial symbols on T*R^n with the canonical Poisson bracket), and the
//! complete automorphism families of the corresponding Lie algebras.
//!
//! Everything is computed over arbitrary-precision rationals; there is no
//! floating point anywhere in this crate.

pub mod autos;
pub mod classical;
pub mod classify;
pub mod ratpoly;
pub mod sample;
pub mod verify;
pub mod weyl;

pub use ratpoly::{MultiIndex, PolyError, Rational, RationalPoly};
pub use weyl::{DiffOp, OpError, VectorField};
pub use classical::{PolySymbol, SymbolError};
pub use autos::{AutoError, AutoSpec, OneForm, PolyDiffeo};
