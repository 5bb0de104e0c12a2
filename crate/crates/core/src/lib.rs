//! Reconstructs the hidden hierarchy of scientific teams from author
//! contribution statements and publication metadata.
//!
//! The pipeline ingests line-delimited paper records, parses contribution
//! statements into per-author activity profiles, clusters activity
//! co-occurrence into lead/support roles, computes each paper's L-ratio,
//! extrapolates it with a trained classifier where statements are missing,
//! and relates team hierarchy to novelty, development, productivity, and
//! citation outcomes with controlled and fixed-effects regressions.
//!
//! Heavy per-paper loops (disruption, citation windows, statement parsing,
//! bootstrap replicates) run data-parallel under the default `parallel`
//! feature; every function with a parallel path has a sequential twin that
//! produces identical output.

pub mod activity_graph;
pub mod authors;
mod binio;
pub mod citation;
pub mod corpus;
pub mod error;
pub mod ids;
pub mod lexicon;
pub mod parser;
pub mod roles;
pub mod snapshot;

pub use error::{Error, Result};
