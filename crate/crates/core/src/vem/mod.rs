//! Local divergence-free virtual element spaces: degrees of freedom, the
//! energy and `L2` projectors computable from them, divergence recovery and
//! the local bilinear forms.

mod layout;
mod local;

pub use layout::{gperp_dim, DofLayout, LocalLayout};
pub use local::{lagrange, LocalSpace};

/// Coefficients of a global or local velocity function.
pub type DofVector = nalgebra::DVector<f64>;
