//! Exact and numeric tools for invariant laminations of quadratic rational
//! maps with a superattracting 2-cycle, `f_a(z) = a / (z² + 2z)`.

pub mod angle;
pub mod dynamics;
pub mod error;
pub mod lamination;
pub mod measure;
pub mod symbolic;
pub mod verify;

pub use angle::{CircleAngle, DigitStream, OrbitTag, OrbitType, RationalInterval};
pub use error::{Error, Result};
pub use measure::{Arc, AtomicMeasure, BlowupArc};
