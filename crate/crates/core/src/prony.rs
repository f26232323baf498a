//! Least-squares Prony analysis.
//!
//! The record is modelled as a sum of damped exponentials. Forward linear
//! prediction coefficients are found in the least-squares sense, the roots
//! of the prediction polynomial give the discrete poles, and a Vandermonde
//! least-squares solve gives the complex residues. Conjugate pairs are then
//! collapsed into real [`Mode`]s.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lstsq::lstsq;
use crate::poles::{dominant_index, energy_spectrum, numerical_rank, OrderPolicy, PoleFit};
use crate::series::{Band, Mode, PowerSpectrum, TimeSeries};

/// Upper bound on the trial order used by [`OrderPolicy::SvdAuto`].
pub const MAX_AUTO_ORDER: usize = 60;

/// Modes below this fraction of `max|x|` are treated as numerical noise.
pub const AMPLITUDE_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PronyConfig {
    pub order_policy: OrderPolicy,
}

impl Default for PronyConfig {
    fn default() -> Self {
        Self {
            order_policy: OrderPolicy::SvdAuto(1e-8),
        }
    }
}

impl PronyConfig {
    pub fn fixed(order: usize) -> Self {
        Self {
            order_policy: OrderPolicy::Fixed(order),
        }
    }

    pub fn svd_auto(threshold: f64) -> Self {
        Self {
            order_policy: OrderPolicy::SvdAuto(threshold),
        }
    }
}

/// Full result of a Prony fit.
#[derive(Debug, Clone, PartialEq)]
pub struct PronyFit {
    /// Model order actually used.
    pub order: usize,
    pub poles: PoleFit,
    pub modes: Vec<Mode>,
}

/// Forward prediction system: row `i` holds `x[p-1+i], ..., x[i]` and the
/// target is `x[p+i]`.
fn prediction_system(x: &[f64], p: usize) -> (DMatrix<f64>, DVector<f64>) {
    let rows = x.len() - p;
    let a = DMatrix::from_fn(rows, p, |i, k| x[p - 1 + i - k]);
    let b = DVector::from_fn(rows, |i, _| x[p + i]);
    (a, b)
}

fn sorted_singular_values(a: &DMatrix<f64>) -> Vec<f64> {
    let mut s: Vec<f64> = a.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Roots of `z^p - c_1 z^(p-1) - ... - c_p` via the companion matrix.
pub fn prediction_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let p = coeffs.len();
    if p == 0 {
        return Vec::new();
    }
    let mut companion = DMatrix::<f64>::zeros(p, p);
    for (k, c) in coeffs.iter().enumerate() {
        companion[(0, k)] = *c;
    }
    for i in 1..p {
        companion[(i, i - 1)] = 1.0;
    }
    companion.complex_eigenvalues().iter().copied().collect()
}

/// Least-squares prediction coefficients at order `p`.
fn prediction_coefficients(x: &[f64], p: usize, check_rank: bool) -> Result<Vec<f64>> {
    let (a, b) = prediction_system(x, p);
    let svd = a.clone().svd(false, false);
    let smax = svd.singular_values.max();
    if smax == 0.0 {
        return Err(Error::RankZero);
    }
    if check_rank && svd.singular_values.min() <= 1e-12 * smax {
        return Err(Error::IllConditioned);
    }
    let b = DMatrix::from_column_slice(b.len(), 1, b.as_slice());
    let c = lstsq(a, &b).ok_or(Error::IllConditioned)?;
    Ok(c.iter().copied().collect())
}

pub fn prony_fit_detailed(series: &TimeSeries, cfg: &PronyConfig) -> Result<PronyFit> {
    let x = series.samples();
    let n = x.len();
    let order = match cfg.order_policy {
        OrderPolicy::Fixed(p) => {
            if p < 2 || p % 2 != 0 {
                return Err(Error::InvalidOrder { order: p });
            }
            if 2 * p >= n {
                return Err(Error::OrderTooHigh { order: p, len: n });
            }
            p
        }
        OrderPolicy::SvdAuto(threshold) => {
            if !(threshold > 0.0 && threshold < 1.0) {
                return Err(Error::InvalidConfig(format!(
                    "svd_auto threshold must lie in (0, 1), got {threshold}"
                )));
            }
            let trial = (n / 3).clamp(1, MAX_AUTO_ORDER);
            let (a, _) = prediction_system(x, trial);
            numerical_rank(&sorted_singular_values(&a), threshold)
        }
    };
    let empty = |order| PronyFit {
        order,
        poles: PoleFit {
            poles: Vec::new(),
            residues: Vec::new(),
        },
        modes: Vec::new(),
    };
    if order == 0 {
        return Ok(empty(0));
    }
    let coeffs = match prediction_coefficients(x, order, matches!(cfg.order_policy, OrderPolicy::Fixed(_))) {
        Ok(c) => c,
        Err(Error::RankZero) => return Ok(empty(order)),
        Err(e) => return Err(e),
    };
    let poles = PoleFit::solve(x, prediction_roots(&coeffs));
    let floor = AMPLITUDE_FLOOR * series.max_abs();
    let modes = poles.to_modes(series.dt(), series.duration(), floor);
    Ok(PronyFit { order, poles, modes })
}

/// Modes of `series` sorted by ascending frequency. A zero record yields
/// no modes.
pub fn prony_fit(series: &TimeSeries, cfg: &PronyConfig) -> Result<Vec<Mode>> {
    Ok(prony_fit_detailed(series, cfg)?.modes)
}

/// One point per mode at its frequency, valued by the squared-envelope
/// energy over `duration`.
pub fn prony_energy_spectrum(modes: &[Mode], duration: f64) -> PowerSpectrum {
    energy_spectrum(modes, duration)
}

/// Highest-energy in-band mode and the full energy spectrum.
pub fn dominant_mode_prony(
    series: &TimeSeries,
    cfg: &PronyConfig,
    band: &Band,
) -> Result<(Mode, PowerSpectrum)> {
    band.check_nyquist(series.dt())?;
    let modes = prony_fit(series, cfg)?;
    let spectrum = prony_energy_spectrum(&modes, series.duration());
    let k = dominant_index(&modes, band).ok_or(Error::NoModeInBand)?;
    Ok((modes[k], spectrum))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{evaluate_modes, rms};

    fn series(modes: &[Mode], n: usize, dt: f64) -> TimeSeries {
        TimeSeries::new(evaluate_modes(modes, n, dt), dt, 0.0, "p").unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(0.1)
    }

    #[test]
    fn single_damped_cosine_fixed_order_two() {
        let truth = Mode::new(0.2, -0.1, 1.0, 0.0);
        let s = series(&[truth], 600, 0.1);
        let modes = prony_fit(&s, &PronyConfig::fixed(2)).unwrap();
        assert_eq!(modes.len(), 1);
        let m = modes[0];
        assert!(rel(m.f, 0.2) < 1e-6);
        assert!(rel(m.alpha, -0.1) < 1e-6);
        assert!(rel(m.amplitude, 1.0) < 1e-6);
        assert!(m.phase.abs() < 1e-6);
    }

    #[test]
    fn zero_series_has_no_modes() {
        let s = TimeSeries::new(vec![0.0; 100], 0.1, 0.0, "z").unwrap();
        assert!(prony_fit(&s, &PronyConfig::default()).unwrap().is_empty());
        assert!(prony_fit(&s, &PronyConfig::fixed(4)).unwrap().is_empty());
    }

    #[test]
    fn order_errors() {
        let s = series(&[Mode::new(0.2, 0.0, 1.0, 0.0)], 20, 0.1);
        assert!(matches!(prony_fit(&s, &PronyConfig::fixed(10)), Err(Error::OrderTooHigh { .. })));
        assert!(matches!(prony_fit(&s, &PronyConfig::fixed(3)), Err(Error::InvalidOrder { .. })));
        // a single tone is rank 2, order 6 leaves the prediction matrix singular
        let s = series(&[Mode::new(0.2, 0.0, 1.0, 0.0)], 200, 0.1);
        assert_eq!(prony_fit(&s, &PronyConfig::fixed(6)), Err(Error::IllConditioned));
    }

    #[test]
    fn energy_spectrum_closed_forms() {
        let spec = prony_energy_spectrum(&[Mode::new(0.2, 0.0, 1.0, 0.0)], 60.0);
        assert_eq!(spec.freqs(), &[0.2]);
        assert!((spec.power()[0] - 60.0).abs() < 1e-12);
        // (1 - e^-12) / 0.2, frozen from adaptive quadrature of e^{-0.2 t} on [0, 60]
        let spec = prony_energy_spectrum(&[Mode::new(0.2, -0.1, 1.0, 0.0)], 60.0);
        assert!((spec.power()[0] - 4.999_969_278_938_233).abs() < 1e-12);
        assert!(prony_energy_spectrum(&[], 60.0).is_empty());
    }

    #[test]
    fn damped_energy_matches_simpson_quadrature() {
        let (alpha, d) = (-0.1_f64, 60.0_f64);
        let n = 20_000;
        let h = d / n as f64;
        let g = |t: f64| (2.0 * alpha * t).exp();
        let mut s = g(0.0) + g(d);
        for i in 1..n {
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * g(i as f64 * h);
        }
        let quad = s * h / 3.0;
        let e = prony_energy_spectrum(&[Mode::new(0.2, alpha, 1.0, 0.0)], d).power()[0];
        assert!((e - quad).abs() < 1e-9, "{e} vs {quad}");
    }

    #[test]
    fn dominant_picks_highest_energy() {
        let s = series(
            &[Mode::new(0.2, 0.0, 1.0, 0.0), Mode::new(0.8, 0.0, 0.5, 0.0)],
            600,
            0.1,
        );
        let (m, spec) = dominant_mode_prony(&s, &PronyConfig::default(), &Band::default()).unwrap();
        assert!((m.f - 0.2).abs() < 1e-6);
        assert_eq!(spec.len(), 2);
        assert_eq!(
            dominant_mode_prony(&s, &PronyConfig::default(), &Band::new(1.0, 5.0).unwrap()),
            Err(Error::NoModeInBand)
        );
        let single = series(&[Mode::new(0.2, -0.05, 1.0, 0.3)], 600, 0.1);
        let (m, _) = dominant_mode_prony(&single, &PronyConfig::default(), &Band::default()).unwrap();
        assert!((m.f - 0.2).abs() < 1e-6);
    }

    #[test]
    fn reconstruction_residual_on_exact_model() {
        let truth = [Mode::new(0.35, -0.08, 0.7, 1.0), Mode::new(1.1, -0.02, 0.3, -2.0)];
        let s = series(&truth, 500, 0.1);
        let fit = prony_fit_detailed(&s, &PronyConfig::default()).unwrap();
        assert_eq!(fit.order, 4);
        let r = evaluate_modes(&fit.modes, s.len(), s.dt());
        let err: Vec<f64> = s.samples().iter().zip(&r).map(|(a, b)| a - b).collect();
        assert!(rms(&err) / rms(s.samples()) < 1e-8);
        let im = fit.poles.complex_reconstruction(s.len()).iter().map(|c| c.im.abs()).fold(0.0, f64::max);
        assert!(im < 1e-10);
    }

    #[test]
    fn unstable_mode_is_kept() {
        let s = series(&[Mode::new(0.4, 0.03, 0.5, 0.0)], 400, 0.1);
        let modes = prony_fit(&s, &PronyConfig::default()).unwrap();
        assert_eq!(modes.len(), 1);
        assert!(modes[0].is_unstable());
        assert!(rel(modes[0].alpha, 0.03) < 1e-6);
    }
}
