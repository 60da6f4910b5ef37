//! Link-level simulator for line-of-sight MIMO between two parallel uniform
//! circular arrays (UCAs).
//!
//! The transmit and receive arrays are parallel but in general non-coaxial.
//! A first-order expansion of the inter-antenna distances splits each channel
//! phase into a receive-only term, a transmit-only term, and a term that
//! depends only on the antenna index difference. Compensating the first two
//! with diagonal phase beamformers leaves a circulant matrix, which the
//! DFT diagonalizes; detection then decouples into per-subchannel
//! nearest-point decisions instead of an exhaustive joint search.
//!
//! Modules follow the processing chain:
//!
//! - [`geometry`]: antenna placement, exact and first-order path lengths
//! - [`channel`]: exact channel matrix, circulant model, compensation
//!   beamformers, and approximation-quality metrics
//! - [`modem`]: constellations, DFT spreading, receive transform, fast
//!   symbol-wise ML and exhaustive joint ML detectors
//! - [`simulate`]: reproducible Monte Carlo BER sweeps, theoretical BPSK
//!   BER, detection-complexity accounting, and the antenna-spacing search
//!
//! Monte Carlo trials draw from counter-based per-trial random streams, so
//! sweep results are bit-identical regardless of worker count. The `parallel`
//! feature (default) runs trials on a rayon pool; without it the same sweep
//! runs sequentially.

pub mod channel;
pub mod geometry;
pub mod linalg;
pub mod modem;
pub mod simulate;

use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A configuration field failed validation.
    #[error("invalid config: {field}: {reason}")]
    InvalidConfig { field: &'static str, reason: String },
    /// 1-based antenna index outside the link dimensions.
    #[error("antenna index ({m}, {n}) out of range for a {n_rx}x{n_tx} link")]
    IndexOutOfRange {
        m: usize,
        n: usize,
        n_rx: usize,
        n_tx: usize,
    },
    /// Vector or matrix dimensions do not agree.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    /// Operation requires equally sized transmit and receive arrays.
    #[error("operation requires n_tx == n_rx, got {n_tx}x{n_rx}")]
    NonSquareLink { n_tx: usize, n_rx: usize },
    /// Exhaustive detection would enumerate more hypotheses than allowed.
    #[error("hypothesis count {count} exceeds detector cap {cap}")]
    HypothesisCapExceeded { count: u128, cap: u128 },
    /// An operation received an empty input.
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
