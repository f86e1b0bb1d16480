//! Exact computations for genus-one moduli spaces and configuration spaces
//! of a punctured elliptic curve.

pub mod cli;
pub mod config;
pub mod graphs;
pub mod linalg;
pub mod reps;
pub mod taut;
pub mod weights;
