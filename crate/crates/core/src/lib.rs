pub mod error;
pub mod harness;
pub mod mesh;
pub mod polybasis;
pub mod reconstruction;
pub mod stokes;
pub mod vem;

pub use error::{Error, Result};

/// A point in the plane.
pub type Point = [f64; 2];
