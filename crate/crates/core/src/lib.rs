//! Decay of positive waves for genuinely nonlinear systems of conservation
//! laws in one space dimension.
//!
//! The crate tracks piecewise-constant approximate solutions, measures their
//! waves family by family, rearranges the positive waves into odd concave
//! profiles and compares them against an explicit solution of Burgers'
//! equation driven by the decrease of the interaction potential.

pub mod burgers;
pub mod error;
pub mod measure;
pub mod pcfn;
pub mod profile;
pub mod rearrange;
pub mod scenario;
pub mod system;
pub mod tracking;
pub mod verify;
pub mod waves;

pub use burgers::{apply_impulse, burgers_evolve, profile_from_measure, solve_impulsive, solve_impulsive_series};
pub use error::{Error, Result};
pub use measure::{Atom, DensityPiece, Interval, IntervalSet, LineMeasure};
pub use pcfn::PiecewiseConstantFn;
pub use profile::OddConcaveProfile;
pub use rearrange::{odd_rearrangement, precedes, profile_leq, shift_profile, symmetric_rearrange, Comparison};
pub use system::{HyperbolicSystem, Model, Region, State, WaveKind};
pub use tracking::{evolve, init_approx, EventLog, EventRecord, FrontState, TrackingConfig, Trajectory};
pub use verify::{oleinik_check, verify_decay, DecayReport, VerifyConfig};
pub use waves::{glimm_q, glimm_upsilon, glimm_v, wave_measures, WaveDecomposition};
