//! Static analysis of cooperating constraint solvers.
//!
//! Solvers are described by rule patterns over a shared context. Each
//! pattern instance is abstracted to a relation on a finite space of context
//! properties; the least feasible set over those relations approximates every
//! context the composite solver can reach, and reverse queries search for
//! initial properties that guarantee a desired outcome.

pub mod abstraction;
pub mod analysis;
pub mod cli;
pub mod dsl;
pub mod fixpoint;
pub mod logic;
pub mod logicalc;
pub mod patterns;
pub mod report;

pub use analysis::{Analysis, AnalysisError};
