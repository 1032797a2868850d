//! Exact genus-0 quantum Riemann–Roch computations on projective spaces.

pub mod gw;
pub mod rational;
pub mod ring;
pub mod series;
pub mod twist;
pub mod mirror;
pub mod fock;
pub mod verify;
pub mod cli;
