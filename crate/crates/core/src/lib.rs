//! Numerical laboratory for one-dimensional quantum scattering through
//! sparse arrays of identical delta barriers.
//!
//! The crate covers four layers:
//!
//! * [`barriers`] — barrier position arrays for power-law, exponential,
//!   combined, and random spacings;
//! * [`transfer`] — log-scaled transfer-matrix products and the scattering
//!   amplitudes `t(k)`, `r(k)` with their growth-bound diagnostics;
//! * [`pruefer`] — the phase-map recursion along the half-line array,
//!   amplitude growth, equidistribution statistics, and the
//!   point-spectrum divergence diagnostics;
//! * [`sweep`] / [`wavepacket`] — the transmission-spectrum experiments
//!   (momentum sweeps, nested zooms, random baselines) and the wave-packet
//!   shredding experiment.
//!
//! Units: `hbar = 2m = 1`, so energy is `k^2` and the coupling `v` carries
//! inverse length.

pub mod barriers;
pub mod error;
pub mod pruefer;
pub mod sweep;
pub mod transfer;
pub mod wavepacket;

pub use barriers::{generate_positions, BarrierArray, SparsenessSpec, SplitMix64};
pub use error::{Error, Result};
pub use pruefer::{
    equidistribution_stats, eggarter_step, initial_theta, iterate, point_spectrum_diagnostic,
    EquidistStats, PointSpectrumDiagnostic, PrueferOrbit, PrueferParams,
};
pub use sweep::{
    compare_random, run_sweep, run_zoom, RandomComparison, SweepRecord, SweepRequest, ZoomLevel,
};
pub use transfer::{
    half_line_chain, log_norm_bound, rate_threshold, scattering, total_transfer, ScatterResult,
    TransferMatrix,
};
pub use wavepacket::{
    gaussian_packet, shredding_metrics, transmit_packet, GridSpec, PacketGrid, ShredMetrics,
};
