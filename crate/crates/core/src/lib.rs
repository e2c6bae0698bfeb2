//! Exact computation in algebraic noncommutative tori, the twisted group
//! algebras of `Z^{2g}`, together with a refutation engine showing that a
//! symplectic-invariant state candidate other than the trace is not positive.
//!
//! Layout:
//! - [`lattice`]: integer skew forms, symplectic normal form, SL(2, Z) orbits.
//! - [`algebra`]: Weyl generators, twisted product, involution, `Φ_Θ`.
//! - [`states`]: orbit-parameterized state candidates and Gram matrices.
//! - [`certificate`]: Diophantine parameter search, restriction matrices,
//!   averaging, witnesses, refutation and verification.
//! - [`cli`]: element expression parser and the command-line front end.

pub mod algebra;
pub mod certificate;
pub mod cli;
pub mod cyclotomic;
pub mod error;
pub mod lattice;
pub mod matrix;
pub mod phase;
pub mod scalar;
pub mod states;

pub use error::{Error, Result};
