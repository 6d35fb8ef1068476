//! Discourse-aware quantum natural language processing.
//!
//! The pipeline runs a modal Lambek calculus parse through truncated-Fock
//! string diagrams into parameterized quantum circuits, which are simulated
//! exactly and trained with SPSA on a pronoun-resolution task.

pub mod logic;
pub mod dataset;
pub mod diagram;
pub mod circuit;
pub mod qsim;
pub mod trainer;
pub mod cli;
