//! Daisy-free set families, hypercube subcube transversals, and exact
//! extremal numbers at desk scale.
//!
//! The library constructs and verifies the explicit extremal families
//! (Fano-plane complement, iterated blow-ups, complete multipartite,
//! parity-constrained, layered cube transversals), computes exact values
//! ex(n, F) and minimum subcube-transversal sizes by branch-and-bound, and
//! emits density evidence tables with exact rational ratios.

pub mod bitmap;
pub mod constructions;
pub mod cube;
pub mod daisy;
pub mod error;
pub mod family;
pub mod io;
pub mod products;
pub mod report;
pub mod solver;

pub mod cli;

pub use error::{Error, Result};
