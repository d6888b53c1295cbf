//! Exact construction and certification of orthogonal product-state sets that
//! are locally distinguishable yet become locally indistinguishable after an
//! orthogonality-preserving local measurement.
//!
//! All states carry coefficients in ℚ(ω), ω = e^{2πi/3}, so orthogonality,
//! measurement outcomes and protocol verification are exact. Only the OPLM
//! nullspace solver and the channel checks in [`density`] use floats.

pub mod certify;
pub mod cyclo;
pub mod density;
pub mod error;
pub mod families;
pub mod io;
pub mod ket;
pub mod measurement;
pub mod par;
pub mod protocols;
pub mod report;
pub mod state;

pub use cyclo::CycloRational;
pub use error::{Error, Result};
pub use families::Family;
pub use ket::{parse_ket, print_ket};
pub use measurement::{JointMeasurement, LocalMeasurement, OutcomeSet};
pub use protocols::{verify_protocol, ProtocolTree};
pub use state::{LocalVector, Party, ProductState, SpaceSpec, StateSet};
