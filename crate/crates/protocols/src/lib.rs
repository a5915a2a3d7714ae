//! Vertical federated learning protocols (linear regression, CAESAR-style
//! logistic regression, split neural networks) run as parties exchanging
//! messages over a simulated network.

pub mod caesar;
pub mod common;
pub mod dataset;
pub mod error;
pub mod exchange;
pub mod linr;
pub mod model;
pub mod netsim;
pub mod nn;
pub mod ss;
pub mod training;

pub use error::{ProtocolError, Result};
