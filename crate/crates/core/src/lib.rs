//! Observability of synchronous Boolean networks: exact decision procedures,
//! observer-count bounds, constructive families and exhaustive class checks.

pub mod bounds;
pub mod claimcheck;
pub mod error;
pub mod families;
pub mod format;
pub mod gf2;
pub mod network;
pub mod observability;
pub mod state_space;

pub use error::{Error, Result};
pub use format::{parse, serialize, NetworkFile};
pub use network::{BooleanFunction, Classification, Literal, Network, ObservationScheme, State};
pub use observability::{check, ObservabilityVerdict};
pub use state_space::{summarize, StateSpaceSummary};
