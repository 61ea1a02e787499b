//! Hyperbolic geometry in the hyperboloid model, finitely generated groups
//! of isometries, and isometric embeddings of the free-group tree.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod audit;
pub mod boundary;
pub mod cli;
pub mod embedding;
pub mod error;
pub mod free_group;
pub mod group;
pub mod minkowski;
pub mod render;
pub mod scenario;
pub mod tolerance;

pub use error::{Error, Result};
