//! Cross-method comparison: load multi-channel records, run every requested
//! method on every channel, and emit the resulting table.

mod input;
mod report;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::fourier::{dominant_mode_fft, FourierConfig};
use crate::hht::{dominant_mode_hms, HhtConfig};
use crate::peak::quantize_frequency;
use crate::pencil::{dominant_mode_mpm, PencilConfig};
use crate::poles::{energy_spectrum, OrderPolicy};
use crate::prony::{dominant_mode_prony, PronyConfig};
use crate::series::{detrend, Band, Detrend, PowerSpectrum, TimeSeries};
use crate::stransform::{dominant_mode_st_series, EDGE_FRACTION};
use crate::wavelet::{dominant_mode_gws, WaveletConfig};

pub use input::{load_csv, parse_csv, write_channels_csv};
pub use report::{emit_report, write_spectra, write_window_reports, ReportFormat, ReportRow};

/// Reference frequency for the deviation column when none is given, Hz.
pub const DEFAULT_REFERENCE_HZ: f64 = 0.2;

/// Rank threshold used on measured (noisy) records.
pub const NOISY_RANK_THRESHOLD: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HarnessError {
    #[error("parse error on line {line}: {message}")]
    ParseError { line: u64, message: String },
    #[error("non-uniform sampling at line {row}")]
    NonUniformSampling { row: u64 },
    #[error("file holds no samples")]
    EmptyFile,
    #[error("no methods selected")]
    NoMethodsSelected,
    #[error("unknown method `{0}`")]
    UnknownMethod(String),
    #[error("unknown channel `{0}`")]
    UnknownChannel(String),
    #[error("channels differ in length or sampling interval")]
    MismatchedChannels,
    #[error("I/O error: {0}")]
    Io(String),
    #[error(transparent)]
    Analysis(#[from] Error),
}

impl From<std::io::Error> for HarnessError {
    fn from(e: std::io::Error) -> Self {
        HarnessError::Io(e.to_string())
    }
}

impl From<csv::Error> for HarnessError {
    fn from(e: csv::Error) -> Self {
        let line = e.position().map_or(0, |p| p.line());
        match e.into_kind() {
            csv::ErrorKind::Io(io) => HarnessError::Io(io.to_string()),
            kind => HarnessError::ParseError {
                line,
                message: format!("{kind:?}"),
            },
        }
    }
}

/// Channels keyed by label, all with the same length and sampling interval.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    channels: BTreeMap<String, TimeSeries>,
}

impl ChannelSet {
    pub fn new(series: Vec<TimeSeries>) -> Result<Self, HarnessError> {
        let first = series.first().ok_or(HarnessError::EmptyFile)?;
        let (n, dt) = (first.len(), first.dt());
        let mut channels = BTreeMap::new();
        for s in series {
            if s.len() != n || s.dt() != dt {
                return Err(HarnessError::MismatchedChannels);
            }
            let label = s.label().to_string();
            if channels.insert(label.clone(), s).is_some() {
                return Err(HarnessError::ParseError {
                    line: 1,
                    message: format!("duplicate channel `{label}`"),
                });
            }
        }
        Ok(Self { channels })
    }

    pub fn get(&self, label: &str) -> Result<&TimeSeries, HarnessError> {
        self.channels
            .get(label)
            .ok_or_else(|| HarnessError::UnknownChannel(label.to_string()))
    }

    /// Channels in label order.
    pub fn iter(&self) -> impl Iterator<Item = &TimeSeries> {
        self.channels.values()
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.channels.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.channels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.channels.is_empty()
    }

    pub fn dt(&self) -> f64 {
        self.iter().next().expect("non-empty").dt()
    }
}

/// Estimators the harness can run. Declared in name order so that sorted
/// collections follow the report order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Fft,
    Gws,
    Hms,
    Mpm,
    Prony,
    St,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Fft,
        Method::Gws,
        Method::Hms,
        Method::Mpm,
        Method::Prony,
        Method::St,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Fft => "fft",
            Method::Gws => "gws",
            Method::Hms => "hms",
            Method::Mpm => "mpm",
            Method::Prony => "prony",
            Method::St => "st",
        }
    }

    /// Comma-separated list such as `fft,prony,mpm`.
    pub fn parse_list(list: &str) -> Result<BTreeSet<Method>, HarnessError> {
        list.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(str::parse)
            .collect()
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| HarnessError::UnknownMethod(s.to_string()))
    }
}

/// Per-method settings used by [`run_comparison`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MethodConfigs {
    pub detrend: Detrend,
    pub fourier: FourierConfig,
    pub prony: PronyConfig,
    pub pencil: PencilConfig,
    pub wavelet: WaveletConfig,
    pub hht: HhtConfig,
}

impl Default for MethodConfigs {
    fn default() -> Self {
        Self {
            detrend: Detrend::Linear,
            fourier: FourierConfig::default(),
            prony: PronyConfig::svd_auto(NOISY_RANK_THRESHOLD),
            pencil: PencilConfig::default().with_rank(OrderPolicy::SvdAuto(NOISY_RANK_THRESHOLD)),
            wavelet: WaveletConfig::default(),
            hht: HhtConfig::default(),
        }
    }
}

impl MethodConfigs {
    /// Settings that determine one method's result, as `key=value` pairs.
    pub fn digest(&self, method: Method) -> String {
        let detrend = match self.detrend {
            Detrend::Mean => "mean".to_string(),
            Detrend::Linear => "linear".to_string(),
            Detrend::Offset(f0) => format!("offset({f0})"),
        };
        let specific = match method {
            Method::Fft => self.fourier.describe(),
            Method::Prony => format!("order={}", self.prony.order_policy.describe()),
            Method::Mpm => self.pencil.describe(),
            Method::St => format!("edge={EDGE_FRACTION}"),
            Method::Gws => self.wavelet.describe(),
            Method::Hms => self.hht.describe(),
        };
        format!("detrend={detrend};{specific}")
    }
}

/// One (channel, method) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub channel: String,
    pub method: Method,
    pub config: String,
    pub outcome: Result<f64, Error>,
    /// The spectrum the dominant frequency was read from.
    pub spectrum: Option<PowerSpectrum>,
}

impl Cell {
    pub fn f_dom(&self) -> Option<f64> {
        self.outcome.as_ref().ok().copied()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonTable {
    /// Channel-major, then method, both in name order.
    pub cells: Vec<Cell>,
    pub band: Band,
    pub reference_f: Option<f64>,
}

impl ComparisonTable {
    pub fn deviation(&self, cell: &Cell) -> Option<f64> {
        Some(cell.f_dom()? - self.reference_f?)
    }

    pub fn failures(&self) -> usize {
        self.cells.iter().filter(|c| c.outcome.is_err()).count()
    }

    pub fn rows(&self) -> Vec<ReportRow> {
        self.cells
            .iter()
            .map(|c| ReportRow {
                channel: c.channel.clone(),
                method: c.method,
                f_dom_hz: c.f_dom(),
                deviation_hz: self.deviation(c),
                config: c.config.clone(),
                error: c.outcome.as_ref().err().map(ToString::to_string),
            })
            .collect()
    }
}

/// Dominant frequency of one record by one method, after detrending,
/// rounded to [`crate::peak::FREQUENCY_RESOLUTION_HZ`].
pub fn run_method(
    series: &TimeSeries,
    method: Method,
    band: &Band,
    configs: &MethodConfigs,
) -> Result<(f64, PowerSpectrum), Error> {
    let x = detrend(series, configs.detrend);
    match method {
        Method::Fft => dominant_mode_fft(&x, &configs.fourier, band),
        Method::Prony => dominant_mode_prony(&x, &configs.prony, band)
            .map(|(m, s)| (quantize_frequency(m.f), s)),
        Method::Mpm => dominant_mode_mpm(&x, &configs.pencil, band)
            .map(|(m, all)| (quantize_frequency(m.f), energy_spectrum(&all, x.duration()))),
        Method::St => dominant_mode_st_series(&x, band),
        Method::Gws => dominant_mode_gws(&x, &configs.wavelet, band),
        Method::Hms => dominant_mode_hms(&x, &configs.hht, band).map(|(f, m)| (f, m.spectrum)),
    }
}

/// Runs every method on every channel. Cells are computed in parallel and
/// returned in (channel, method) order; a failing cell records its error
/// and leaves the others untouched.
pub fn run_comparison(
    channels: &ChannelSet,
    methods: &BTreeSet<Method>,
    band: &Band,
    configs: &MethodConfigs,
    reference_f: Option<f64>,
) -> Result<ComparisonTable, HarnessError> {
    if methods.is_empty() {
        return Err(HarnessError::NoMethodsSelected);
    }
    band.check_nyquist(channels.dt())?;
    let jobs: Vec<(&TimeSeries, Method)> = channels
        .iter()
        .flat_map(|s| methods.iter().map(move |&m| (s, m)))
        .collect();
    let cells = jobs
        .par_iter()
        .map(|&(series, method)| {
            let result = run_method(series, method, band, configs);
            let (outcome, spectrum) = match result {
                Ok((f, s)) => (Ok(f), Some(s)),
                Err(e) => (Err(e), None),
            };
            Cell {
                channel: series.label().to_string(),
                method,
                config: configs.digest(method),
                outcome,
                spectrum,
            }
        })
        .collect();
    Ok(ComparisonTable {
        cells,
        band: *band,
        reference_f,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{evaluate_modes, Mode};
    use crate::synth::{generate_ringdown, SynthSpec};

    fn tone_set() -> ChannelSet {
        let tone = TimeSeries::new(
            evaluate_modes(&[Mode::new(0.2, 0.0, 1.0, 0.0)], 600, 0.1),
            0.1,
            0.0,
            "tone",
        )
        .unwrap();
        ChannelSet::new(vec![tone]).unwrap()
    }

    #[test]
    fn method_names_round_trip_and_sort() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        let set = Method::parse_list("st,prony,mpm,fft,hms,gws").unwrap();
        let names: Vec<_> = set.iter().map(|m| m.name()).collect();
        let mut sorted = names.clone();
        sorted.sort();
        assert_eq!(names, sorted);
        assert_eq!(
            Method::parse_list("fft,bogus"),
            Err(HarnessError::UnknownMethod("bogus".into()))
        );
    }

    #[test]
    fn single_tone_all_methods() {
        let set = tone_set();
        let methods: BTreeSet<_> = Method::ALL.into_iter().collect();
        let band = Band::default();
        let table = run_comparison(&set, &methods, &band, &MethodConfigs::default(), Some(0.2)).unwrap();
        assert_eq!(table.cells.len(), 6);
        for c in &table.cells {
            let f = c.f_dom().unwrap_or_else(|| panic!("{:?}", c.outcome));
            assert!((f - 0.2).abs() < 0.03, "{} {f}", c.method);
            assert!(band.contains(f));
        }
    }

    #[test]
    fn one_cell_one_row() {
        let methods = Method::parse_list("mpm").unwrap();
        let table = run_comparison(&tone_set(), &methods, &Band::default(), &MethodConfigs::default(), None)
            .unwrap();
        assert_eq!(table.cells.len(), 1);
        assert_eq!(table.deviation(&table.cells[0]), None);
    }

    #[test]
    fn no_methods_is_an_error() {
        assert_eq!(
            run_comparison(&tone_set(), &BTreeSet::new(), &Band::default(), &MethodConfigs::default(), None),
            Err(HarnessError::NoMethodsSelected)
        );
    }

    #[test]
    fn band_checked_against_channel_rate() {
        let methods = Method::parse_list("fft").unwrap();
        let band = Band::new(0.05, 8.0).unwrap();
        assert!(matches!(
            run_comparison(&tone_set(), &methods, &band, &MethodConfigs::default(), None),
            Err(HarnessError::Analysis(Error::BandAboveNyquist { .. }))
        ));
    }

    #[test]
    fn failing_cell_leaves_others_populated() {
        // a flat channel has no spectral peak and no extrema
        let flat = TimeSeries::new(vec![60.0; 600], 0.1, 0.0, "a_flat").unwrap();
        let tone = tone_set().get("tone").unwrap().clone();
        let set = ChannelSet::new(vec![tone, flat]).unwrap();
        let methods = Method::parse_list("hms,fft").unwrap();
        let table = run_comparison(&set, &methods, &Band::default(), &MethodConfigs::default(), None).unwrap();
        let order: Vec<_> = table.cells.iter().map(|c| (c.channel.as_str(), c.method)).collect();
        assert_eq!(
            order,
            [
                ("a_flat", Method::Fft),
                ("a_flat", Method::Hms),
                ("tone", Method::Fft),
                ("tone", Method::Hms)
            ]
        );
        assert_eq!(table.cells[0].outcome, Err(Error::NoModeInBand));
        assert_eq!(table.cells[1].outcome, Err(Error::TooFewExtrema));
        assert!(table.cells[2].f_dom().is_some());
        assert!(table.cells[3].f_dom().is_some());
        assert_eq!(table.failures(), 2);
    }

    #[test]
    fn repeated_runs_agree() {
        let s = generate_ringdown(&SynthSpec::default_scenario()).unwrap();
        let set = ChannelSet::new(vec![s]).unwrap();
        let methods: BTreeSet<_> = Method::ALL.into_iter().collect();
        let run = || {
            run_comparison(&set, &methods, &Band::default(), &MethodConfigs::default(), Some(0.2)).unwrap()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn mismatched_channels_rejected() {
        let a = TimeSeries::new(vec![0.0; 10], 0.1, 0.0, "a").unwrap();
        let b = TimeSeries::new(vec![0.0; 11], 0.1, 0.0, "b").unwrap();
        assert_eq!(ChannelSet::new(vec![a, b]), Err(HarnessError::MismatchedChannels));
    }

    #[test]
    fn digest_names_the_settings() {
        let c = MethodConfigs::default();
        assert!(c.digest(Method::Prony).contains("svd_auto(1e-3)"));
        assert!(c.digest(Method::Fft).starts_with("detrend=linear;"));
    }
}
