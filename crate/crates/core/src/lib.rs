//! Exact computations behind the factorization-center calculus for surfaces:
//! finite permutation groups and their G-sets, Gassmann equivalence and
//! Burnside-ring bookkeeping, Picard lattices of rational surfaces with their
//! rational-curve class enumeration, surface models with Galois data, and the
//! Sarkisov-link center calculus with its invariance checks.

mod error;
pub mod gset;
pub mod links;
pub mod nslattice;
pub mod permgrp;
pub mod surface;

pub use error::{Error, Result};
