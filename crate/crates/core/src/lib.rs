//! Reconstruction of bandlimited periodic signals from leaky integrate-and-fire spike trains.

pub mod error;
pub mod experiment;
pub mod expo;
pub mod kernel;
pub mod lif;
pub mod pocs;
pub mod reconstruct;
pub mod signal;

pub use error::{Error, Result};
