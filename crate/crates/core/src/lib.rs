//! Disjoint transitive k-cliques in every feedback arc set of a random
//! k-partite tournament: generators, the absorber + gradual matching
//! pipeline, the star-removal upper-bound witness, and exact oracles for
//! small instances.

pub mod absorber;
pub mod analysis;
pub mod bits;
pub mod campaign;
pub mod constants;
pub mod error;
pub mod matching;
pub mod oracle;
pub mod order;
pub mod packing;
pub mod seed;
pub mod tournament;
pub mod verify;

pub use error::{Error, Result, StageFailure};
