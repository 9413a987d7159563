//! Simulation and cryptanalysis of quantum string seals.
//!
//! A string seal encodes a classical bit string into a public quantum state so
//! that anyone can read it, but reading is detectable. This crate builds the
//! seal states, the measurements a reader or attacker may apply, the sealer's
//! tamper check, and entropy-based tests of how much a reader can learn.
//!
//! Start with [`seals::SealFamily`], [`strategies`] and
//! [`verifier::joint_success_escape`]; the `examples/` directory has one
//! runnable program per capability.

// `!(x > 0.0)` guards deliberately reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod oracle;
pub mod quantum;
pub mod runner;
pub mod seals;
pub mod strategies;
pub mod verifier;

pub use error::{Result, SealError};
pub use quantum::{MeasurementInstrument, PureState, C64};
pub use seals::{Message, SealFamily, SealScheme};
