//! Link-level Monte Carlo simulator for a full-duplex multi-user MIMO system.
//!
//! A base station with `N_b` antennas serves `K` single-antenna full-duplex
//! users while continuously receiving their uplink pilots on the same
//! time-frequency resource. Self-interference at the base station is
//! suppressed by a limited-tap analog canceller (quantized attenuator/phase
//! lines) plus digital cancellation, and the downlink precoder is designed
//! jointly with the canceller so that no receive chain saturates.
//!
//! Modules mirror the processing pipeline:
//!
//! * [`numerics`] — complex linear algebra helpers and scalar utilities
//! * [`channel`] — Rayleigh/Rician block-fading generation and slot evolution
//! * [`cancellation`] — analog tap selection/quantization and digital cancellers
//! * [`estimation`] — uplink pilot reception and MMSE channel estimation
//! * [`precoder`] — joint precoder/canceller design under saturation limits
//! * [`link`] — per-slot protocol orchestration and achievable-rate evaluation
//! * [`harness`] — Monte Carlo sweeps, config parsing, CSV export
//! * [`selftest`] — quick self-checks of documented example values

pub mod cancellation;
pub mod channel;
pub mod estimation;
pub mod harness;
pub mod link;
pub mod numerics;
pub mod precoder;
pub mod selftest;

pub use cancellation::{CancellerState, QuantizerSpec, TapPlacement};
pub use channel::{ChannelParams, ChannelSet};
pub use estimation::{EstimateReport, TrainingBlock};
pub use harness::{ScenarioConfig, SchemeSpec, SweepResult, SweepRow, SweepVariable};
pub use link::{Scheme, SchemeParams, SlotOutcome};
pub use numerics::{CMat, C64};
pub use precoder::PrecoderDesign;

/// Unified error type for every fallible operation in the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A linear system was too ill-conditioned to solve reliably.
    #[error("matrix is ill-conditioned (condition number {cond:.3e})")]
    IllConditioned { cond: f64 },
    /// A matrix that must be Hermitian positive definite was not.
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    /// Parameters reduce an estimator or formula to 0/0.
    #[error("degenerate configuration: {0}")]
    DegenerateConfiguration(String),
    /// Training sequence cannot carry the requested number of pilots.
    #[error("training block of {symbols} symbols cannot sound {users} users")]
    PilotTooShort { symbols: usize, users: usize },
    /// Configuration text or values rejected during validation.
    #[error("config error: {0}")]
    Config(String),
    /// A Monte Carlo trial aborted its sweep point.
    #[error("trial {index} under master seed {seed:#018x} failed: {message}")]
    Trial {
        index: usize,
        seed: u64,
        message: String,
    },
    /// Filesystem failure while writing results.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
