//! Best-coapproximation structures in finite-dimensional normed spaces.

pub mod error;
pub mod feasibility;
pub mod gauge;
pub mod halfspace;
pub mod intersect;
pub mod job;
pub mod oracle;
pub mod point;
pub mod sampling;
pub mod spaces;

pub use error::{Error, Result};
pub use gauge::{ConvexBody, HalfSpace};
pub use point::{ComplexPoint, Point};
pub use spaces::{DualFunctional, Exponent, NormSpec};
