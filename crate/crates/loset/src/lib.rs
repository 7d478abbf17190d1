//! A symbolic kernel for local set theories: well-typed terms of a local
//! language, sequent proofs checked against the basic axioms and inference
//! rules, interpretation in the topos of finite sets, S-sets and
//! S-functions, and the preimage-translation and representability
//! constructions as decidable checks over finite models.

pub mod deduction;
pub mod error;
pub mod finset;
pub mod language;
pub mod settheory;
pub mod sexpr;
pub mod sugar;
pub mod syntax;
pub mod translation;
pub mod workspace;

pub use error::{Error, Result};
