//! Exact jet-order engine for germs of holomorphic functions in two
//! variables, and the effective multiplier construction built on it.

pub mod cli;
pub mod error;
pub mod exactalg;
pub mod generic;
pub mod germs;
pub mod invariants;
pub mod jetcontrol;
pub mod kohn;
pub mod membership;
pub mod puiseux;

pub use error::{Error, Result};
