//! Upper bounds on the interleaving distance between mapper graphs.
//!
//! A mapper graph is stored as a level-annotated multigraph: one vertex per
//! connected component over each vertex cell of a discretized real line, one
//! edge per component over each edge cell. Smoothing a graph by `n` merges
//! components across windows of `2n + 1` levels; an `n`-assignment is a
//! family of eight column-one-hot matrices mapping one graph into the other's
//! smoothings. The loss of an assignment measures how far it is from a true
//! interleaving, and `n + loss` bounds the interleaving distance from above.
//!
//! The crate provides:
//!
//! - [`grid`]: the integer level grid and thickening arithmetic,
//! - [`graph`]: mapper graphs, smoothing, and per-level merge distances,
//! - [`matrix`]: level-partitioned integer block matrices,
//! - [`bundle`]: the constant matrices needed to evaluate a loss,
//! - [`loss`]: assignments and the twelve-term loss function,
//! - [`ilp`]: the 0/1 integer program for the optimal assignment, with
//!   LP-file export and solution import,
//! - [`solve`]: an exact iterative-deepening optimizer over assignments,
//! - [`search`]: the exponential-binary search over the shift `n`,
//! - [`gen`]: synthetic fixtures and a brute-force interleaving oracle,
//! - [`cloud`]: point-cloud ingestion into mapper graphs.
//!
//! The crate is `no_std`-compatible (requires `alloc`); the `std` feature is
//! on by default and only affects dependency configuration.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod bundle;
pub mod cloud;
pub mod gen;
pub mod graph;
pub mod grid;
pub mod ilp;
pub mod loss;
pub mod matrix;
pub mod search;
pub mod solve;
pub mod value;

pub use bundle::{Bundle, MatrixBundle};
pub use graph::{Diagnostics, DistanceTable, MapperGraph, SmoothSystem};
pub use grid::{BasicOpen, CellRef, Grid};
pub use ilp::IlpModel;
pub use loss::{Assignment, LossReport, LossTerm, MapKind};
pub use matrix::{BlockMatrix, Partition, StructureClass};
pub use search::{search_over_n, SearchStep, SearchTrace};
pub use solve::{solve_exact, solve_with_cap, Budget, Solved};
pub use value::Value;
