//! Pipeline driver for the flood-risk toolkit: plain-text file formats with
//! line-numbered diagnostics, deterministic synthetic data, and the staged
//! end-to-end pipeline behind the `floodrisk` binary.

pub mod diag;
pub mod errors;
pub mod formats;
pub mod pipeline;
pub mod synth;
