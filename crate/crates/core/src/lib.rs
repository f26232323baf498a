//! Identification of dominant low-frequency electromechanical oscillation
//! modes in power-system frequency records.
//!
//! Six estimators share the [`TimeSeries`] / [`Mode`] / [`PowerSpectrum`]
//! vocabulary:
//!
//! | method | module | dominant-mode entry point |
//! |---|---|---|
//! | Gaussian-windowed Fourier spectrum | [`fourier`] | [`fourier::dominant_mode_fft`] |
//! | Least-squares Prony | [`prony`] | [`prony::dominant_mode_prony`] |
//! | Matrix Pencil | [`pencil`] | [`pencil::dominant_mode_mpm`] |
//! | Stockwell transform | [`stransform`] | [`stransform::dominant_mode_st`] |
//! | Global wavelet spectrum | [`wavelet`] | [`wavelet::dominant_mode_gws`] |
//! | Hilbert marginal spectrum | [`hht`] | [`hht::dominant_mode_hms`] |
//!
//! [`harness`] runs any subset of them over a set of channels and builds the
//! cross-method comparison table.

pub mod error;
mod fft;
pub mod fourier;
pub mod harness;
pub mod hht;
mod lstsq;
pub mod peak;
pub mod pencil;
pub mod poles;
pub mod prony;
pub mod series;
pub mod stransform;
pub mod synth;
pub mod tfmap;
pub mod wavelet;

pub use error::{Error, Result};
pub use poles::OrderPolicy;
pub use series::{
    detrend, evaluate_modes, mode_energy, reconstruct, slice_window, validate_series, Band,
    Detrend, Mode, ModeClass, PowerSpectrum, TimeSeries,
};
pub use synth::{generate_ringdown, SynthSpec};
pub use tfmap::TimeFrequencyMap;
