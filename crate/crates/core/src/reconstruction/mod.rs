//! `H(div)`-conforming reconstruction of virtual element velocities in
//! Raviart-Thomas spaces on the cell subtriangulations.

mod constrained;
mod rt;

pub use constrained::{
    build_constraints, independent_rows, reconstruct, rt_interpolate_polynomial, ConstraintSet, Reconstruction,
    RANK_TOLERANCE,
};
pub use rt::{legendre_unit, RtSpace, RtTriangle};
