//! Exact ergodic theory on finite-dimensional Riesz spaces.
//!
//! A system is a coordinate space `Q^n` with the weak order unit `e = (1,..,1)`,
//! a strictly positive conditional expectation `T` (weighted block averaging)
//! and a Riesz homomorphism `S f = f ∘ sigma` with `TS = T`. On such systems the
//! crate decides ergodicity and conditional weak mixing exactly, builds tensor
//! products of systems, and extracts density-zero sequences.

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod generate;
pub mod lattice;
pub mod mixing;
pub mod operators;
pub mod rational;
pub mod schema;
pub mod suite;
pub mod tensor;

pub use error::{Error, Result};
pub use lattice::{Component, Element, SpaceDescriptor};
pub use operators::{validate_ceps, Ceps, ConditionalExpectationOp, RieszHomMap};
pub use rational::Rational;
