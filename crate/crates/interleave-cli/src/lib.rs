//! IO, file formats, classification, and fixture generation for the
//! interleaving-bound CLI. The combinatorial core lives in
//! `interleave-core`; this crate adds everything that touches files.

pub mod format;
pub mod img;
pub mod knn;
pub mod letters;
