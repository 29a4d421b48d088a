//! Exact achievable rate regions for centralized and distributed index coding
//! under composite coding over deterministic multiple access channels, with a
//! small exhaustive simulator for explicit linear schemes.
//!
//! The pipeline is: [`model`] instance → [`model::enumerate_composites`] →
//! per-receiver decoding and [`mac`] polymatroid constraints
//! ([`composite::assemble_selection_system`]) → Fourier–Motzkin projection in
//! [`polytope`] → a [`polytope::RateRegion`].

pub mod builtin;
pub mod cli;
pub mod composite;
pub mod mac;
pub mod model;
pub mod polytope;
pub mod rational;
pub mod sim;
