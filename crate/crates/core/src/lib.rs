//! Coherence dynamics of a V-type three-level atom coupled to a detuned,
//! dissipative single-mode cavity, with an optional weak measurement before
//! the evolution and a measurement reversal after it.
//!
//! The crate is organised bottom-up:
//!
//! * [`dynamics`] evaluates the closed-form amplitude propagators.
//! * [`state`] builds the reduced 3×3 density matrix and its ℓ1 coherence.
//! * [`measurement`] applies the weak measurement / reversal protocol.
//! * [`oracle`] integrates the memory-kernel equations directly, as an
//!   independent check on the closed forms.
//! * [`scenario`], [`events`], [`figures`] and [`sweep`] drive time series,
//!   detect coherence sudden death and birth, and write CSV output.

// NaN must fail range checks, so `!(x <= tol)` is used on purpose
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
pub mod events;
pub mod figures;
pub mod measurement;
pub mod oracle;
pub mod output;
pub mod scenario;
pub mod state;
pub mod sweep;

pub use dynamics::{
    asymptotic_amplitudes, channel_propagator, complex_rate, evolve_amplitudes, memory_kernel,
    propagator, AmplitudeVector, Branch, KernelValue, PropagatorPair, SystemParams,
};
pub use error::{Error, Result};
pub use events::{detect_events, locate_maximum, Birth, Death, EventReport};
pub use measurement::{
    apply_reversal, apply_weak_measurement, normalization_factor, protocol_state,
    MeasurementStrengths,
};
pub use oracle::{
    compare_closed_form, oracle_integrate, verification_grid, AmplitudeSeries, ComparisonReport,
    OracleConfig, OracleMethod, VerificationCase,
};
pub use scenario::{run_scenario, CoherenceSeries, InitialState, Scenario, SeriesPoint, TimeGrid};
pub use state::{density_from_amplitudes, l1_coherence, DensityMatrix3};
pub use sweep::{sweep, SweepAxis, SweepRow, SweepSpec};

pub use num_complex::Complex64 as C64;
