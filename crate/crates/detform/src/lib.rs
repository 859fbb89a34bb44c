//! Numerical evaluation of the trilinear singular integral form
//!
//! ```text
//! L(f,g,h) = p.v. INT f(x) g(y) h(z) delta(x+y+z) det(1 1 1; x y z)^{-1} dx dy dz
//! ```
//!
//! for functions on the plane, together with an experiment harness that
//! verifies its invariances, its degeneration to bilinear Hilbert transform
//! superpositions, its reduction to the first Calderon commutator, and the
//! dyadic bump construction that breaks the estimate outside `2 < p,q,r < oo`.
//!
//! The form is computed by three independent routes (space side, frequency
//! side, fiberwise bilinear-Hilbert superposition) whose mutual agreement is
//! the primary correctness oracle; see the `acceptance` test suite.

pub mod bht_fiberwise;
pub mod cli;
pub mod commutator;
pub mod error;
pub mod lambda_direct;
pub mod lambda_frequency;
pub mod linalg;
pub mod quadrature;
pub mod schwartz;
pub mod sharpness;
pub mod symmetries;

pub use error::{Error, Result};
pub use quadrature::{EvalResult, QuadratureSpec, Route};
pub use schwartz::{
    ExponentTriple, GaussianAtom1, GaussianAtom2, SchwartzMix1, SchwartzMix2, SpectrumFunction,
};
