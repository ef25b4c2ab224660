//! Bistability witnesses for fully open sequestration networks.
//!
//! The crate builds the networks, evaluates their mass-action systems in
//! floating point or exact rational arithmetic, constructs the three positive
//! steady states, certifies local stability with Gershgorin-type similarity
//! scalings, and corroborates everything by integration.

pub mod cli;
pub mod error;
pub mod massaction;
pub mod matrix;
pub mod network;
pub mod region;
pub mod scalar;
pub mod sim;
pub mod stability;
pub mod steady;
pub mod witness;

/// Version tag written into every JSON document.
pub const SCHEMA: &str = "seqnet/1";

pub use error::{Error, Result};
pub use massaction::{FrontRates, ModelParams, RateMode, RateVector};
pub use matrix::Matrix;
pub use network::{
    build_sequestration, format_network, fully_open_extension, open_sequestration,
    parse_network, ReactionNetwork,
};
pub use region::{RateChoice, RegionCheck};
pub use scalar::Rational;
pub use stability::{StabilityReport, Verdict};
pub use steady::{Branch, SteadyState};
pub use witness::{find_witness, verify_witness, RateSource, WitnessOptions, WitnessResult};
