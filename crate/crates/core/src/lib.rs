//! Simulation and numerical verification of transmit antenna selection for
//! spatial multiplexing over i.i.d. Rayleigh fading with zero-forcing and
//! zero-forcing decision-feedback receivers.

pub mod channel;
pub mod linalg;
pub mod outage;
pub mod policy;
pub mod proof;
pub mod rng;
pub mod stats;
