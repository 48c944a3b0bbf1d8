//! Route imitation on road graphs.
//!
//! The pipeline: load a road network, generate shortest routes with A*,
//! train sequence-to-sequence recurrent networks (LSTM, GRU, or a dual
//! stacked encoder, all built from scratch with hand-derived backward
//! passes) to imitate the search, optionally smooth the decoder loss by
//! homotopy continuation over a decreasing-sigma schedule, and score the
//! predictions against the ground truth.

pub mod astar;
pub mod cells;
pub mod diffusion;
pub mod error;
pub mod eval;
pub mod graph;
pub mod ndmath;
pub mod seq2seq;

pub use error::{Error, Result};
