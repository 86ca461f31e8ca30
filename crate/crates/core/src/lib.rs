//! Desk-scale verification of finite set-family combinatorics.
//!
//! The crate provides canonical enumeration of subset-tuple cells and
//! families over a finite ground set, explicit injections between sequence
//! and subset spaces, the F/G/H grid operators with their descent machinery,
//! a size-schedule-driven codec between mixed families and coded sets,
//! brute-force product Ramsey search, and the finite kernels of
//! permutation-model arguments (parity orbits, equivalence pigeonholes,
//! support checking).
//!
//! Everything operates on explicit finite data and is written so that the
//! claimed properties can be checked exhaustively, or by seeded sampling, at
//! sizes a test suite can afford.

pub mod encodings;
pub mod error;
pub mod fraenkel;
pub mod grid;
pub mod ground;
pub mod phi;
pub mod ramsey;

pub use error::{Error, Result};
pub use ground::{Atom, CellShape, Family, GroundSet, KSubset, SubsetTuple};
