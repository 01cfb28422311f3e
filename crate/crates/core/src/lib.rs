//! Simulation of non-reciprocal cavity polaritons: closed-form transmission
//! and isolation, Zeeman-resolved cooperativities for the cesium D2 line, and
//! Lindblad master-equation dynamics for saturation and photon statistics.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod atomic;
mod branch;
pub mod dynamics;
pub mod harness;
pub mod linear_response;
pub mod numerics;

pub use branch::Branch;
