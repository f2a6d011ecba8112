// NaN-rejecting guards are written as negated comparisons on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod error;
pub mod estimators;
pub mod exec;
pub mod interlacements;
pub mod lattice;
pub mod potential_kernel;
pub mod potential_theory;
pub mod rng;
pub mod torus;
pub mod verify;
pub mod walks;
