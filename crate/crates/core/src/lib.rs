//! Structure, orbit classification and relative invariants of regular graded
//! Lie algebras of parabolic commutative type over p-adic fields.

pub mod acceptance;
pub mod catalog;
pub mod cli;
pub mod diagram;
pub mod fixtures;
pub mod linalg;
pub mod orbits;
pub mod padic;
pub mod qform;
pub mod realizations;
