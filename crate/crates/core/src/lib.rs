//! Exact arithmetic for poly-Bernoulli and multi-poly-Bernoulli numbers,
//! together with a checker for the identities they satisfy.

pub mod engine;
pub mod error;
pub mod identities;
pub mod kernel;
pub mod multipoly;
pub mod polybern;
pub mod series;

pub use engine::{Engine, Fault};
pub use error::{Error, Result};
pub use identities::{verify, verify_all, IdentityId, RangeSpec, VerificationReport};
pub use kernel::Rational;
pub use multipoly::{AlphaVector, IndexVector, PowerExpansion, Route, SignProfile};
