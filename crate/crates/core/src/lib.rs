//! Hybrid analog/digital precoding for a downlink mmWave MIMO cognitive
//! radio that shares spectrum with a primary user in underlay mode.
//!
//! The crate covers channel generation ([`channel`]), RF-domain design
//! ([`analog`]), baseband block diagonalization ([`digital`]),
//! interference-constrained power allocation ([`power`]), a runtime
//! registry of precoding schemes ([`scheme`], [`baselines`]) and a seeded
//! Monte-Carlo sweep harness with CSV/SVG output ([`harness`]).

pub mod analog;
pub mod baselines;
pub mod channel;
pub mod config;
pub mod digital;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod power;
pub mod scheme;

pub use config::HybridConfig;
pub use error::{Error, Result};
pub use linalg::ComplexMatrix;
pub use scheme::{Scheme, SchemeRegistry, SchemeResult, TrialContext};
