//! Simulation, classification and verification of the fifth-order rational
//! difference equation
//!
//! ```text
//! x[n+1] = a·x[n-1] + b·x[n-1]·x[n-4] / (c·x[n-4] + d·x[n-2])
//! ```
//!
//! with positive coefficients and positive seeds.
//!
//! - [`model`]: parameters, discriminants, regime and equilibria.
//! - [`engine`]: orbits in double, wide-float or exact arithmetic, and the
//!   ratio/Möbius/linear sequences derived from them.
//! - [`spectral`]: the critical-case Jacobian and its spectrum.
//! - [`critical`]: the product-form convergent solution at `(1/2, 1, 1, 1)`.
//! - [`verify`]: the self-check suite behind `pentarec verify`.

pub mod critical;
pub mod engine;
pub mod error;
pub mod model;
pub mod number;
pub mod spectral;
pub mod verify;

pub use engine::{simulate, Trajectory};
pub use error::{Error, Result};
pub use model::{
    classify, discriminants, equilibria, DiscriminantReport, Params, PositiveReal, Regime,
    SeedValues,
};
pub use number::{ArithmeticMode, Values};
