#![allow(clippy::int_plus_one)]

//! Cellular DGAs of Legendrian surfaces in 1-jet spaces, computed from
//! transverse square decompositions of the base: exact noncommutative Z/2
//! algebra, the matrix differential formulas (including the swallowtail
//! corrections), stable-tame moves, and desk-scale invariants.

pub mod catalog;
pub mod cellcomplex;
pub mod dgabuild;
pub mod freealg;
pub mod invariants;
pub mod matrix;
pub mod transform;

pub use dgabuild::{build_dga, build_dga_with, build_parallel_dga, BuildOptions, Dga};
