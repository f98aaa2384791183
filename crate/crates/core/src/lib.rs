//! Weighted sum-rate maximization in MIMO interference networks through the
//! iterative minimax algorithm.
//!
//! The crate is layered bottom-up:
//!
//! * [`matcore`]: Hermitian PSD algebra, pseudo-inverses, the extended
//!   logdet difference and the contragredient block decomposition.
//! * [`netmodel`]: the interference network, achievable rates, constraint
//!   usage, random scenario generation and the network text format.
//! * [`solver`]: the minimax iteration with its dual price search and KKT
//!   diagnostics.
//! * [`duality`]: reciprocal networks and the primal/dual correspondence.
//! * [`experiment`]: configuration-driven batch runs behind the CLI.

pub mod duality;
pub mod error;
pub mod experiment;
pub mod matcore;
pub mod netmodel;
pub mod solver;

pub use error::{Error, Result};
