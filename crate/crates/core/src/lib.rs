//! Acyclic edge colouring of high-girth graphs with `⌈(1+ε)Δ⌉` colours.
//!
//! The pipeline reserves colours per vertex, runs a semi-random nibble under a
//! numeric schedule, then completes the colouring from the reserved colours.
//! Every delivered colouring is checked by an unconditional verifier.

pub mod baselines;
pub mod colouring;
pub mod finisher;
pub mod graph;
pub mod nibble;
pub mod numeric;
pub mod pipeline;
pub mod regularizer;
pub mod reservation;
pub mod rng;
pub mod schedule;

pub use colouring::{Colour, PartialEdgeColouring};
pub use graph::{girth, Girth, Graph, GraphError};
