//! Finite laboratory for colouring diagonalizations.
//!
//! The crate models stage-truncated colourings, tournaments and limit
//! approximations over a finite domain, together with the transformations
//! between rainbow, thin-set, free-set and tournament principles, exact
//! dyadic measure trees, and bushy-tree forcing. Everything is brute-force
//! checkable; the `verify` module bundles the checks the CLI and the
//! acceptance suite share.

pub mod bushy;
pub mod codec;
pub mod coloring;
pub mod dnc;
pub mod error;
pub mod generate;
pub mod instance;
pub mod tree;
pub mod oracles;
pub mod rainbow;
pub mod solvers;
pub mod verify;

pub use error::{Error, Result};
