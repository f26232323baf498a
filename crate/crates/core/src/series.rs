//! Shared domain types: uniformly sampled records, damped-sinusoid modes,
//! analysis bands and power spectra, plus the preprocessing every method
//! runs before estimation.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A uniformly sampled, finite, real-valued record.
///
/// The start time is kept as an origin plus an integer sample offset so that
/// repeated slicing composes exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    samples: Vec<f64>,
    dt: f64,
    origin: f64,
    offset: u64,
    label: String,
}

impl TimeSeries {
    pub const MIN_LEN: usize = 4;

    /// Builds a validated series.
    pub fn new(samples: Vec<f64>, dt: f64, t0: f64, label: impl Into<String>) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::BadDt { dt });
        }
        if samples.len() < Self::MIN_LEN {
            return Err(Error::TooShort { len: samples.len() });
        }
        if let Some(index) = samples.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self {
            samples,
            dt,
            origin: t0,
            offset: 0,
            label: label.into(),
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Time of the first sample in seconds.
    pub fn t0(&self) -> f64 {
        self.origin + self.offset as f64 * self.dt
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Record length `N * dt` in seconds.
    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 * self.dt
    }

    pub fn nyquist(&self) -> f64 {
        0.5 / self.dt
    }

    /// Local time of sample `k`, with the first sample at zero.
    pub fn local_time(&self, k: usize) -> f64 {
        k as f64 * self.dt
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    /// Same timing and label, new sample values.
    pub fn with_samples(&self, samples: Vec<f64>) -> Result<Self> {
        let mut out = Self::new(samples, self.dt, self.origin, self.label.clone())?;
        out.offset = self.offset;
        Ok(out)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        self.with_samples(self.samples.iter().map(|x| x * factor).collect())
    }
}

/// Alias kept for symmetry with the other operations.
pub fn validate_series(samples: Vec<f64>, dt: f64, t0: f64, label: &str) -> Result<TimeSeries> {
    TimeSeries::new(samples, dt, t0, label)
}

/// One real damped sinusoid `amplitude * exp(alpha t) * cos(2 pi f t + phase)`.
///
/// `amplitude` is the full real-cosine amplitude: a conjugate pole pair with
/// complex residue `h` collapses to `amplitude = 2|h|`, `phase = arg h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    /// Hz, non-negative.
    pub f: f64,
    /// 1/s, negative means decaying.
    pub alpha: f64,
    pub amplitude: f64,
    /// rad, in (-pi, pi].
    pub phase: f64,
    /// Envelope energy over the analysed record, see [`mode_energy`].
    #[serde(default)]
    pub energy: f64,
}

impl Mode {
    pub fn new(f: f64, alpha: f64, amplitude: f64, phase: f64) -> Self {
        Self {
            f,
            alpha,
            amplitude,
            phase: normalize_phase(phase),
            energy: 0.0,
        }
    }

    /// Growing envelope. Kept in results, flagged for the caller.
    pub fn is_unstable(&self) -> bool {
        self.alpha > 0.0
    }

    pub fn with_energy(mut self, duration: f64) -> Self {
        self.energy = mode_energy(&self, duration);
        self
    }

    /// Damping ratio `-alpha / |s|` of the continuous-time pole.
    pub fn damping_ratio(&self) -> f64 {
        let omega = 2.0 * PI * self.f;
        let mag = (self.alpha * self.alpha + omega * omega).sqrt();
        if mag == 0.0 {
            0.0
        } else {
            -self.alpha / mag
        }
    }
}

/// Maps an angle into (-pi, pi].
pub fn normalize_phase(phase: f64) -> f64 {
    let mut p = phase % (2.0 * PI);
    if p <= -PI {
        p += 2.0 * PI;
    } else if p > PI {
        p -= 2.0 * PI;
    }
    p
}

/// Closed-form energy of the squared modal envelope over `[0, duration]`:
/// `A^2 * (exp(2 alpha D) - 1) / (2 alpha)`, or `A^2 D` when undamped.
pub fn mode_energy(mode: &Mode, duration: f64) -> f64 {
    let a2 = mode.amplitude * mode.amplitude;
    if a2 == 0.0 {
        return 0.0;
    }
    let x = 2.0 * mode.alpha;
    if x == 0.0 {
        a2 * duration
    } else {
        a2 * (x * duration).exp_m1() / x
    }
}

/// Frequency band in Hz, closed at both ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub f_lo: f64,
    pub f_hi: f64,
}

impl Default for Band {
    fn default() -> Self {
        Self { f_lo: 0.05, f_hi: 5.0 }
    }
}

impl Band {
    pub fn new(f_lo: f64, f_hi: f64) -> Result<Self> {
        if !(f_lo.is_finite() && f_hi.is_finite() && f_lo >= 0.0 && f_hi > f_lo) {
            return Err(Error::InvalidBand { f_lo, f_hi });
        }
        Ok(Self { f_lo, f_hi })
    }

    pub fn contains(&self, f: f64) -> bool {
        f >= self.f_lo && f <= self.f_hi
    }

    /// The band may reach, but not pass, the Nyquist frequency. An edge
    /// within 1e-9 relative of Nyquist counts as reaching it, so an interval
    /// recovered from printed timestamps does not reject the default band.
    pub fn check_nyquist(&self, dt: f64) -> Result<()> {
        let nyquist = 0.5 / dt;
        if self.f_hi > nyquist * (1.0 + 1e-9) {
            return Err(Error::BandAboveNyquist {
                f_hi: self.f_hi,
                nyquist,
            });
        }
        Ok(())
    }

    pub fn width(&self) -> f64 {
        self.f_hi - self.f_lo
    }
}

impl std::str::FromStr for Band {
    type Err = Error;

    /// Parses `lo:hi`.
    fn from_str(s: &str) -> Result<Self> {
        let (lo, hi) = s
            .split_once(':')
            .ok_or_else(|| Error::InvalidConfig(format!("band `{s}` is not of the form lo:hi")))?;
        let parse = |v: &str| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidConfig(format!("band edge `{v}` is not a number")))
        };
        Band::new(parse(lo)?, parse(hi)?)
    }
}

/// Electromechanical mode families by frequency range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ModeClass {
    /// 0.05 - 0.2 Hz
    Global,
    /// 0.25 - 1 Hz
    InterArea,
    /// 1 - 2 Hz
    LocalArea,
    /// 1.5 - 2.5 Hz
    IntraPlant,
}

impl ModeClass {
    pub const ALL: [ModeClass; 4] = [
        ModeClass::Global,
        ModeClass::InterArea,
        ModeClass::LocalArea,
        ModeClass::IntraPlant,
    ];

    pub fn range(self) -> (f64, f64) {
        match self {
            ModeClass::Global => (0.05, 0.2),
            ModeClass::InterArea => (0.25, 1.0),
            ModeClass::LocalArea => (1.0, 2.0),
            ModeClass::IntraPlant => (1.5, 2.5),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ModeClass::Global => "global",
            ModeClass::InterArea => "inter-area",
            ModeClass::LocalArea => "local-area",
            ModeClass::IntraPlant => "intra-plant",
        }
    }

    /// Every family whose range contains `f`. The ranges overlap and leave
    /// gaps, so the result may hold several entries or none.
    pub fn classify(f: f64) -> Vec<ModeClass> {
        Self::ALL
            .into_iter()
            .filter(|c| {
                let (lo, hi) = c.range();
                f >= lo && f <= hi
            })
            .collect()
    }
}

/// Non-negative power (or energy) on a strictly ascending frequency axis.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PowerSpectrum {
    freqs: Vec<f64>,
    power: Vec<f64>,
}

impl PowerSpectrum {
    pub fn new(freqs: Vec<f64>, power: Vec<f64>) -> Result<Self> {
        if freqs.len() != power.len() {
            return Err(Error::InvalidConfig(format!(
                "spectrum has {} frequencies but {} power values",
                freqs.len(),
                power.len()
            )));
        }
        if freqs.windows(2).any(|w| !(w[1] > w[0])) || freqs.iter().any(|f| !f.is_finite()) {
            return Err(Error::InvalidConfig(
                "spectrum frequencies must be finite and strictly ascending".into(),
            ));
        }
        if power.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return Err(Error::InvalidConfig(
                "spectrum power must be finite and non-negative".into(),
            ));
        }
        Ok(Self { freqs, power })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn freqs(&self) -> &[f64] {
        &self.freqs
    }

    pub fn power(&self) -> &[f64] {
        &self.power
    }

    pub fn len(&self) -> usize {
        self.freqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freqs.is_empty()
    }

    /// Indices of the bins inside `band`.
    pub fn band_indices(&self, band: &Band) -> std::ops::Range<usize> {
        let lo = self.freqs.partition_point(|&f| f < band.f_lo);
        let hi = self.freqs.partition_point(|&f| f <= band.f_hi);
        lo..hi.max(lo)
    }

    /// Sub-spectrum inside `band`.
    pub fn restrict(&self, band: &Band) -> Self {
        let r = self.band_indices(band);
        Self {
            freqs: self.freqs[r.clone()].to_vec(),
            power: self.power[r].to_vec(),
        }
    }

    pub fn total(&self) -> f64 {
        self.power.iter().sum()
    }
}

/// Detrending policy applied before every estimator.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Detrend {
    Mean,
    #[default]
    Linear,
    Offset(f64),
}

pub fn detrend(series: &TimeSeries, policy: Detrend) -> TimeSeries {
    let x = series.samples();
    let out: Vec<f64> = match policy {
        Detrend::Mean => {
            let mean = x.iter().sum::<f64>() / x.len() as f64;
            x.iter().map(|v| v - mean).collect()
        }
        Detrend::Offset(f0) => x.iter().map(|v| v - f0).collect(),
        Detrend::Linear => {
            // Least-squares line over centred sample indices.
            let n = x.len() as f64;
            let c = (n - 1.0) / 2.0;
            let mean = x.iter().sum::<f64>() / n;
            let (mut sxy, mut sxx) = (0.0, 0.0);
            for (i, v) in x.iter().enumerate() {
                let u = i as f64 - c;
                sxy += u * (v - mean);
                sxx += u * u;
            }
            let slope = sxy / sxx;
            x.iter()
                .enumerate()
                .map(|(i, v)| v - mean - slope * (i as f64 - c))
                .collect()
        }
    };
    series
        .with_samples(out)
        .expect("detrending preserves length and finiteness")
}

/// Contiguous sub-series covering `[start_s, start_s + len_s)` in local time.
///
/// Boundaries are rounded to the nearest sample.
pub fn slice_window(series: &TimeSeries, start_s: f64, len_s: f64) -> Result<TimeSeries> {
    let span = series.duration();
    let out_of_range = || Error::OutOfRange {
        start_s,
        end_s: start_s + len_s,
        span_s: span,
    };
    if !(start_s.is_finite() && len_s.is_finite()) || start_s < 0.0 || len_s <= 0.0 {
        return Err(out_of_range());
    }
    let start = (start_s / series.dt).round() as usize;
    let len = (len_s / series.dt).round() as usize;
    if start + len > series.len() {
        return Err(out_of_range());
    }
    if len < TimeSeries::MIN_LEN {
        return Err(Error::TooShort { len });
    }
    Ok(TimeSeries {
        samples: series.samples[start..start + len].to_vec(),
        dt: series.dt,
        origin: series.origin,
        offset: series.offset + start as u64,
        label: series.label.clone(),
    })
}

/// Evaluates the mode sum at local times `k * dt`, `k = 0..n`.
pub fn evaluate_modes(modes: &[Mode], n_samples: usize, dt: f64) -> Vec<f64> {
    (0..n_samples)
        .map(|k| {
            let t = k as f64 * dt;
            modes
                .iter()
                .map(|m| {
                    m.amplitude * (m.alpha * t).exp() * (2.0 * PI * m.f * t + m.phase).cos()
                })
                .sum()
        })
        .collect()
}

/// Sum of damped sinusoids as a series starting at time zero.
pub fn reconstruct(modes: &[Mode], n_samples: usize, dt: f64) -> Result<TimeSeries> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::BadDt { dt });
    }
    TimeSeries::new(evaluate_modes(modes, n_samples, dt), dt, 0.0, "reconstruction")
}

/// Root-mean-square of a slice.
pub fn rms(x: &[f64]) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    (x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn series(n: usize, dt: f64) -> TimeSeries {
        TimeSeries::new((0..n).map(|i| (i as f64 * 0.37).sin()).collect(), dt, 0.0, "x").unwrap()
    }

    #[test]
    fn validate_accepts_and_reports_duration() {
        let s = series(600, 0.1);
        assert_eq!(s.len(), 600);
        assert!((s.duration() - 60.0).abs() < 1e-12);
    }

    #[test]
    fn validate_rejects_bad_inputs() {
        assert_eq!(
            TimeSeries::new(vec![1.0; 3], 0.1, 0.0, "x"),
            Err(Error::TooShort { len: 3 })
        );
        let mut v = vec![0.0; 10];
        v[4] = f64::NAN;
        assert_eq!(
            TimeSeries::new(v, 0.1, 0.0, "x"),
            Err(Error::NonFinite { index: 4 })
        );
        assert!(matches!(
            TimeSeries::new(vec![0.0; 10], 0.0, 0.0, "x"),
            Err(Error::BadDt { .. })
        ));
        assert!(matches!(
            TimeSeries::new(vec![0.0; 10], -0.1, 0.0, "x"),
            Err(Error::BadDt { .. })
        ));
    }

    #[test]
    fn detrend_mean_of_constant_is_zero() {
        let s = TimeSeries::new(vec![60.0; 50], 0.1, 0.0, "x").unwrap();
        let d = detrend(&s, Detrend::Mean);
        assert!(d.samples().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn detrend_linear_removes_ramp() {
        let s = TimeSeries::new((0..10).map(|i| i as f64).collect(), 0.1, 0.0, "x").unwrap();
        let d = detrend(&s, Detrend::Linear);
        assert!(d.max_abs() < 1e-12);
    }

    #[test]
    fn detrend_offset_matches_direct_synthesis() {
        let dt = 0.1;
        let tone = |i: usize| 0.01 * (2.0 * PI * 0.2 * i as f64 * dt).cos();
        let s = TimeSeries::new((0..600).map(|i| 60.0 + tone(i)).collect(), dt, 0.0, "x").unwrap();
        let d = detrend(&s, Detrend::Offset(60.0));
        for (i, v) in d.samples().iter().enumerate() {
            assert!((v - tone(i)).abs() < 1e-13, "sample {i}");
        }
    }

    #[test]
    fn slice_arithmetic_and_identity() {
        let s = series(600, 0.1);
        let w = slice_window(&s, 10.0, 20.0).unwrap();
        assert_eq!(w.len(), 200);
        assert!((w.t0() - 10.0).abs() < 1e-12);
        assert_eq!(w.samples(), &s.samples()[100..300]);
        assert_eq!(slice_window(&s, 0.0, s.duration()).unwrap(), s);
        assert!(matches!(
            slice_window(&s, 55.0, 20.0),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn reconstruct_single_cosine() {
        let m = Mode::new(0.2, 0.0, 1.0, 0.0);
        let r = reconstruct(&[m], 600, 0.1).unwrap();
        for (k, v) in r.samples().iter().enumerate() {
            let t = k as f64 * 0.1;
            assert!((v - (2.0 * PI * 0.2 * t).cos()).abs() <= 1e-15);
        }
        let z = reconstruct(&[], 16, 0.1).unwrap();
        assert!(z.samples().iter().all(|&v| v == 0.0));
    }

    // Independent point-wise evaluator: recurrence on the complex pole
    // instead of direct exp/cos calls.
    fn evaluate_by_recurrence(modes: &[Mode], n: usize, dt: f64) -> Vec<f64> {
        let mut out = vec![0.0; n];
        for m in modes {
            let z = num_complex::Complex64::from_polar((m.alpha * dt).exp(), 2.0 * PI * m.f * dt);
            let mut acc = num_complex::Complex64::from_polar(m.amplitude, m.phase);
            for v in out.iter_mut() {
                *v += acc.re;
                acc *= z;
            }
        }
        out
    }

    #[test]
    fn reconstruct_two_modes_matches_independent_evaluator() {
        let modes = [
            Mode::new(0.2, -0.1, 1.0, 0.0),
            Mode::new(0.8, -0.05, 0.5, PI / 4.0),
        ];
        let r = reconstruct(&modes, 600, 0.1).unwrap();
        let o = evaluate_by_recurrence(&modes, 600, 0.1);
        for (a, b) in r.samples().iter().zip(&o) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn mode_energy_closed_forms() {
        let m = Mode::new(0.3, 0.0, 2.0, 0.0);
        assert!((mode_energy(&m, 10.0) - 40.0).abs() < 1e-12);
        assert_eq!(mode_energy(&Mode::new(0.3, -0.1, 0.0, 0.0), 10.0), 0.0);
    }

    #[test]
    fn band_parsing_and_nyquist() {
        let b: Band = "0.05:5".parse().unwrap();
        assert_eq!(b, Band::default());
        assert!(b.check_nyquist(0.1).is_ok());
        assert!(b.check_nyquist(0.10000000000000142).is_ok());
        assert!(b.check_nyquist(0.1000001).is_err());
        assert!(b.check_nyquist(0.2).is_err());
        assert!("5:1".parse::<Band>().is_err());
        assert!("abc".parse::<Band>().is_err());
    }

    #[test]
    fn mode_classes() {
        assert_eq!(ModeClass::classify(0.1), vec![ModeClass::Global]);
        assert_eq!(ModeClass::classify(0.5), vec![ModeClass::InterArea]);
        assert_eq!(
            ModeClass::classify(1.7),
            vec![ModeClass::LocalArea, ModeClass::IntraPlant]
        );
        assert!(ModeClass::classify(0.22).is_empty());
    }

    #[test]
    fn phase_normalization_range() {
        assert_eq!(normalize_phase(-PI), PI);
        assert!((normalize_phase(3.0 * PI) - PI).abs() < 1e-12);
        assert!((normalize_phase(0.5 - 4.0 * PI) - 0.5).abs() < 1e-12);
    }

    fn arb_mode() -> impl Strategy<Value = Mode> {
        (0.0..4.9f64, -0.5..0.1f64, 0.0..2.0f64, -3.0..3.0f64)
            .prop_map(|(f, a, amp, ph)| Mode::new(f, a, amp, ph))
    }

    proptest! {
        #[test]
        fn reconstruct_is_linear(a in prop::collection::vec(arb_mode(), 0..4),
                                 b in prop::collection::vec(arb_mode(), 0..4)) {
            let n = 200;
            let joined: Vec<Mode> = a.iter().chain(&b).copied().collect();
            let ra = evaluate_modes(&a, n, 0.1);
            let rb = evaluate_modes(&b, n, 0.1);
            let rj = evaluate_modes(&joined, n, 0.1);
            for k in 0..n {
                prop_assert!((rj[k] - ra[k] - rb[k]).abs() < 1e-12);
            }
        }

        #[test]
        fn detrend_mean_is_zero_mean(x in prop::collection::vec(-1e3..1e3f64, 4..300)) {
            let s = TimeSeries::new(x, 0.1, 0.0, "p").unwrap();
            let d = detrend(&s, Detrend::Mean);
            let m = d.samples().iter().sum::<f64>() / d.len() as f64;
            prop_assert!(m.abs() < 1e-12 * s.max_abs().max(f64::MIN_POSITIVE));
        }

        #[test]
        fn slices_compose_exactly(t0 in -1e4..1e4f64, a in 0usize..100, b in 0usize..100,
                                  len in 4usize..100) {
            let s = TimeSeries::new((0..400).map(|i| (i as f64).cos()).collect(), 0.1, t0, "p").unwrap();
            let dt = s.dt();
            let outer_len = (b + len) as f64 * dt;
            let once = slice_window(&slice_window(&s, a as f64 * dt, outer_len).unwrap(),
                                    b as f64 * dt, len as f64 * dt).unwrap();
            let direct = slice_window(&s, (a + b) as f64 * dt, len as f64 * dt).unwrap();
            prop_assert_eq!(once.samples(), direct.samples());
            prop_assert_eq!(once.t0().to_bits(), direct.t0().to_bits());
        }
    }
}
