//! Bit-exact model of a two-hop interference network in which sources
//! overhear the relays' second-hop transmissions as feedback.
//!
//! * [`channel`]: GF(2) shift-matrix model of both hops.
//! * [`rates`]: closed-form outer bounds, achievable rates and reference curves.
//! * [`schemes`]: packet-pipelined coding schemes run over the channel, with
//!   trace verification.
//! * [`sweep`]: grid sweeps that check the formulas and schemes against each other.

pub mod channel;
pub mod error;
pub mod rates;
pub mod schemes;
pub mod sweep;

pub use channel::{first_hop, second_hop, shift, ChannelParams, GfVec};
pub use error::{Error, Result};
pub use rates::{rate_bundle, RateBundle, Regime, Regimes};
pub use schemes::{run_scheme, verify_trace, Scheme, SimulationTrace};
