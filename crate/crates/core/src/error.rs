use thiserror::Error;

/// Errors raised by the analysis operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("sample {index} is not finite")]
    NonFinite { index: usize },
    #[error("series has {len} samples, at least 4 are required")]
    TooShort { len: usize },
    #[error("sampling interval must be positive and finite, got {dt}")]
    BadDt { dt: f64 },
    #[error("window [{start_s}, {end_s}] s lies outside the series span [0, {span_s}] s")]
    OutOfRange { start_s: f64, end_s: f64, span_s: f64 },
    #[error("invalid band [{f_lo}, {f_hi}] Hz")]
    InvalidBand { f_lo: f64, f_hi: f64 },
    #[error("band upper edge {f_hi} Hz exceeds the Nyquist frequency {nyquist} Hz")]
    BandAboveNyquist { f_hi: f64, nyquist: f64 },
    #[error("mode at {f} Hz is at or above the Nyquist frequency {nyquist} Hz")]
    AliasedMode { f: f64, nyquist: f64 },
    #[error("no spectral bins fall inside the band")]
    EmptyBand,
    #[error("no identified mode falls inside the band")]
    NoModeInBand,
    #[error("linear-prediction matrix is rank deficient")]
    IllConditioned,
    #[error("model order {order} is too high for {len} samples")]
    OrderTooHigh { order: usize, len: usize },
    #[error("model order must be an even integer >= 2, got {order}")]
    InvalidOrder { order: usize },
    #[error("bad pencil parameter: {0}")]
    BadPencilParameter(String),
    #[error("signal is indistinguishable from zero")]
    RankZero,
    #[error("window of {window_s} s is longer than the {duration_s} s series")]
    WindowTooLong { window_s: f64, duration_s: f64 },
    #[error("signal has too few extrema for sifting")]
    TooFewExtrema,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
