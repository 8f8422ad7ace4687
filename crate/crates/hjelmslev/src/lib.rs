//! Projective Hjelmslev planes over Galois rings, arc search by prescribed
//! automorphism groups, and ring-linear code analysis.
//!
//! The pipeline: build GR(q^m, p^m) ([`ring`]), construct the plane PHG(2,R)
//! ([`plane`]), prescribe a subgroup of GL(3,R) and condense the incidence
//! system over its orbits ([`orbits`]), search the condensed Diophantine
//! system for (n,u)-arcs ([`search`]), and turn arcs into codes with
//! homogeneous-weight and Gray-map analysis ([`codes`]). Certificates
//! ([`cert`]) make every reported arc independently re-checkable.
//!
//! Data-parallel pieces (search subtrees, codeword censuses, distance
//! checks) run on rayon under the default `parallel` feature and fall back
//! to sequential loops without it; results are identical either way.

// index loops mirror the coefficient/matrix algebra throughout
#![allow(clippy::needless_range_loop, clippy::manual_is_multiple_of)]

pub mod cert;
pub mod codes;
pub mod error;
pub mod matrix;
pub mod orbits;
pub mod par;
pub mod plane;
pub mod report;
pub mod ring;
pub mod search;

pub use error::{Error, Result};
