//! Lipschitz equivalence of homogeneous self-similar sets with complete
//! overlaps.
//!
//! The pipeline: validate an IFS against the overlap class
//! ([`ifs::validate_class`]), build the graph-directed partition of its
//! attractor ([`gds::build_partition_graph`]), compare ratio-labelled graph
//! signatures ([`gds::signature`]), and certify the coding map between two
//! attractors as bi-Lipschitz ([`coding`]). [`dimension`] computes the
//! Hausdorff dimension of a certified system and cross-checks it with
//! exact box counting.

pub mod algebra;
pub mod catalog;
pub mod coding;
pub mod dimension;
pub mod gds;
pub mod ifs;

pub use algebra::{parse_expr, Affine, LambdaPoly, Rational};
pub use ifs::{ClassCertificate, ExactBox, HomogeneousIfs};
