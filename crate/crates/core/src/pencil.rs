//! Matrix Pencil decomposition into exponentially damped sinusoids.
//!
//! A Hankel data matrix is built from the record, its right singular
//! subspace is truncated to the effective rank, and the shift invariance of
//! that subspace yields the signal poles as eigenvalues of a small pencil.
//! Truncating before forming the pencil is what gives the method its noise
//! tolerance relative to plain Prony.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lstsq::lstsq;
use crate::poles::{dominant_index, numerical_rank, OrderPolicy, PoleFit};
use crate::prony::AMPLITUDE_FLOOR;
use crate::series::{evaluate_modes, rms, slice_window, Band, Mode, TimeSeries};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PencilConfig {
    /// Pencil parameter; `None` means `floor(N / 3)`.
    pub pencil_l: Option<usize>,
    pub rank_policy: OrderPolicy,
    /// Sliding analysis window length, s.
    pub window_len_s: f64,
    /// Sliding analysis stride, s.
    pub step_s: f64,
}

impl Default for PencilConfig {
    fn default() -> Self {
        Self {
            pencil_l: None,
            rank_policy: OrderPolicy::SvdAuto(1e-8),
            window_len_s: 20.0,
            step_s: 5.0,
        }
    }
}

impl PencilConfig {
    pub fn with_rank(mut self, policy: OrderPolicy) -> Self {
        self.rank_policy = policy;
        self
    }

    pub fn describe(&self) -> String {
        let l = self
            .pencil_l
            .map_or_else(|| "N/3".to_string(), |l| l.to_string());
        format!("L={l};rank={}", self.rank_policy.describe())
    }
}

/// Dominant mode of one analysis window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominantModeReport {
    pub window_start_s: f64,
    pub window_len_s: f64,
    pub dominant: Mode,
    pub all_modes: Vec<Mode>,
}

/// Poles, residues, modes and the rank the fit settled on.
#[derive(Debug, Clone, PartialEq)]
pub struct PencilFit {
    pub rank: usize,
    pub pencil_l: usize,
    pub poles: PoleFit,
    pub modes: Vec<Mode>,
}

pub fn pencil_fit_detailed(series: &TimeSeries, cfg: &PencilConfig) -> Result<PencilFit> {
    let x = series.samples();
    let n = x.len();
    let l = cfg.pencil_l.unwrap_or(n / 3);
    if l < 1 || l + 1 >= n {
        return Err(Error::BadPencilParameter(format!(
            "L = {l} must satisfy 1 <= L <= N - 2 for N = {n}"
        )));
    }
    let rows = n - l;
    let hankel = DMatrix::from_fn(rows, l + 1, |i, j| x[i + j]);
    let svd = hankel.svd(false, true);
    let v_t = svd.v_t.as_ref().expect("right singular vectors requested");

    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let sigma: Vec<f64> = order.iter().map(|&k| svd.singular_values[k]).collect();
    if sigma.first().map_or(true, |&s| s == 0.0) {
        return Err(Error::RankZero);
    }
    let cap = l.min(rows);
    let rank = match cfg.rank_policy {
        OrderPolicy::Fixed(m) => {
            if m == 0 || m > cap {
                return Err(Error::BadPencilParameter(format!(
                    "rank {m} must lie in 1..={cap} for N = {n}, L = {l}"
                )));
            }
            m
        }
        OrderPolicy::SvdAuto(threshold) => {
            if !(threshold > 0.0 && threshold < 1.0) {
                return Err(Error::InvalidConfig(format!(
                    "svd_auto threshold must lie in (0, 1), got {threshold}"
                )));
            }
            numerical_rank(&sigma, threshold).min(cap)
        }
    };
    if rank == 0 {
        return Err(Error::RankZero);
    }

    // Columns of `basis` span the dominant right singular subspace.
    let basis = DMatrix::from_fn(l + 1, rank, |i, c| v_t[(order[c], i)]);
    let upper = basis.rows(0, l).into_owned();
    let lower = basis.rows(1, l).into_owned();
    let phi = lstsq(upper, &lower)
        .ok_or_else(|| Error::BadPencilParameter("pencil system could not be solved".into()))?;
    let poles_z: Vec<_> = phi.complex_eigenvalues().iter().copied().collect();

    let poles = PoleFit::solve(x, poles_z);
    let floor = AMPLITUDE_FLOOR * series.max_abs();
    let modes = poles.to_modes(series.dt(), series.duration(), floor);
    Ok(PencilFit {
        rank,
        pencil_l: l,
        poles,
        modes,
    })
}

/// Modes of `series` sorted by ascending frequency.
pub fn pencil_fit(series: &TimeSeries, cfg: &PencilConfig) -> Result<Vec<Mode>> {
    Ok(pencil_fit_detailed(series, cfg)?.modes)
}

/// Squared-envelope energy over `[0, duration]`.
pub fn mode_energy(mode: &Mode, duration: f64) -> f64 {
    crate::series::mode_energy(mode, duration)
}

/// Highest-energy in-band mode of the whole record, plus all modes.
pub fn dominant_mode_mpm(
    series: &TimeSeries,
    cfg: &PencilConfig,
    band: &Band,
) -> Result<(Mode, Vec<Mode>)> {
    band.check_nyquist(series.dt())?;
    let modes = pencil_fit(series, cfg)?;
    let k = dominant_index(&modes, band).ok_or(Error::NoModeInBand)?;
    Ok((modes[k], modes))
}

/// Window start times `0, step, 2 step, ...` that fit inside the record.
pub fn window_starts(duration: f64, window_len_s: f64, step_s: f64, dt: f64) -> Vec<f64> {
    let n_total = (duration / dt).round() as usize;
    let n_win = (window_len_s / dt).round() as usize;
    let n_step = ((step_s / dt).round() as usize).max(1);
    if n_win > n_total {
        return Vec::new();
    }
    (0..=(n_total - n_win) / n_step)
        .map(|k| (k * n_step) as f64 * dt)
        .collect()
}

/// One report per window position, each solved independently.
pub fn sliding_dominant(
    series: &TimeSeries,
    cfg: &PencilConfig,
    band: &Band,
) -> Result<Vec<DominantModeReport>> {
    band.check_nyquist(series.dt())?;
    if !(cfg.step_s > 0.0) || !(cfg.window_len_s >= 4.0 * series.dt()) {
        return Err(Error::InvalidConfig(format!(
            "window_len_s = {} and step_s = {} are not a valid sliding setup",
            cfg.window_len_s, cfg.step_s
        )));
    }
    let n_win = (cfg.window_len_s / series.dt()).round() as usize;
    if n_win > series.len() {
        return Err(Error::WindowTooLong {
            window_s: cfg.window_len_s,
            duration_s: series.duration(),
        });
    }
    let starts = window_starts(series.duration(), cfg.window_len_s, cfg.step_s, series.dt());
    starts
        .par_iter()
        .map(|&start| {
            let window = slice_window(series, start, cfg.window_len_s)?;
            let (dominant, all_modes) = dominant_mode_mpm(&window, cfg, band)?;
            Ok(DominantModeReport {
                window_start_s: start,
                window_len_s: window.duration(),
                dominant,
                all_modes,
            })
        })
        .collect()
}

/// Fitted record and `RMS(x - fit) / RMS(x)`.
pub fn reconstruct_mpm(series: &TimeSeries, cfg: &PencilConfig) -> Result<(TimeSeries, f64)> {
    let modes = pencil_fit(series, cfg)?;
    let fit = series.with_samples(evaluate_modes(&modes, series.len(), series.dt()))?;
    let residual: Vec<f64> = series
        .samples()
        .iter()
        .zip(fit.samples())
        .map(|(a, b)| a - b)
        .collect();
    let err = rms(&residual) / rms(series.samples());
    Ok((fit.with_label(format!("{} (mpm fit)", series.label())), err))
}
