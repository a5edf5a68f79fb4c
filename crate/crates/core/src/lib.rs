//! Two-stage federated transfer learning on a from-scratch LeNet.
//!
//! A stage-one model (Healthy vs Pneumonia) is trained across simulated clients
//! with size-weighted federated averaging, persisted, and used to initialise a
//! stage-two model (Non-Covid vs Covid Pneumonia). Every run is seeded and
//! bit-reproducible.

pub mod cli;
pub mod data;
pub mod error;
pub mod fed;
pub mod lenet;
pub mod metrics;
pub mod tensor;

pub use error::{Error, Result};
