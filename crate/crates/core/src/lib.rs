//! Exact computation of infinitesimal holonomy superalgebras of connections
//! on supermanifolds, together with the algebraic side of the theory:
//! algebraic curvature tensors, Berger superalgebras and Cartan prolongations.
//!
//! All symbolic data live over ℚ or ℚ(i) with polynomial coefficient
//! functions, so dimensions are exact rank computations. Floating point is
//! used only to validate holonomy against numerical parallel transport.

pub mod berger;
pub mod geometry;
pub mod holonomy;
pub mod linalg;
pub mod pipeline;
pub mod parity;
pub mod scalar;
pub mod superfunc;
pub mod superlin;
#[doc(hidden)]
pub mod testing;

pub use parity::Parity;
pub use scalar::{Field, Scalar};
pub use superfunc::{ChartSignature, Superfunction};
