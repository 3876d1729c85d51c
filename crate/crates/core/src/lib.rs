//! Seeded grid-reasoning task generation, exact solvers and an evaluation
//! harness for language models.

pub mod client;
pub mod colors;
pub mod constraints;
pub mod dataset;
pub mod eval;
pub mod generate;
pub mod grid;
pub mod render;
pub mod seed;
pub mod shapes;
pub mod solve;
pub mod taxonomy;
