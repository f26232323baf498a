//! `modal-kit`: dominant-mode analysis of multi-channel frequency records.
//!
//! Exit status is 0 on success, 1 when the input or configuration cannot be
//! used, and 2 when a report was written but some cells failed.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use modal_kit_core::harness::{
    emit_report, load_csv, run_comparison, write_channels_csv, write_spectra, write_window_reports,
    Method, MethodConfigs, ReportFormat, DEFAULT_REFERENCE_HZ, NOISY_RANK_THRESHOLD,
};
use modal_kit_core::pencil::{sliding_dominant, PencilConfig};
use modal_kit_core::{detrend, generate_ringdown, Band, OrderPolicy, SynthSpec};

#[derive(Parser)]
#[command(name = "modal-kit", version, about = "Dominant oscillation modes of frequency records")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run several estimators on every channel and tabulate the dominant mode.
    Analyze(AnalyzeArgs),
    /// Generate a synthetic ringdown from a TOML or JSON spec.
    Synth(SynthArgs),
    /// Track the Matrix Pencil dominant mode over sliding windows.
    Window(WindowArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// CSV with a `time_s,<label>,...` header.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "fft,prony,mpm,st,gws,hms")]
    methods: String,
    /// Search band `lo:hi` in Hz.
    #[arg(long, default_value = "0.05:5")]
    band: Band,
    #[arg(long)]
    out: PathBuf,
    /// Write JSON instead of CSV.
    #[arg(long)]
    json: bool,
    /// Directory for per-cell `freq_hz,power` spectra.
    #[arg(long)]
    spectra_dir: Option<PathBuf>,
    /// Reference for the deviation column, Hz.
    #[arg(long, default_value_t = DEFAULT_REFERENCE_HZ)]
    reference_hz: f64,
    /// Method settings as TOML or JSON; omitted fields keep their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    spec: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct WindowArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    channel: String,
    /// Window length, s.
    #[arg(long, default_value_t = 20.0)]
    window: f64,
    /// Stride, s.
    #[arg(long, default_value_t = 5.0)]
    step: f64,
    #[arg(long, default_value = "0.05:5")]
    band: Band,
    /// Relative singular-value threshold for the pencil rank.
    #[arg(long, default_value_t = NOISY_RANK_THRESHOLD)]
    rank_threshold: f64,
    #[arg(long)]
    out: PathBuf,
}

type CliResult = Result<ExitCode, String>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analyze(args) => analyze(args),
        Command::Synth(args) => synth(args),
        Command::Window(args) => window(args),
    };
    result.unwrap_or_else(|msg| {
        eprintln!("modal-kit: {msg}");
        ExitCode::from(1)
    })
}

/// TOML or JSON, chosen by extension; anything else is tried as JSON first.
fn read_structured<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
    let parsed = if ext.eq_ignore_ascii_case("toml") {
        toml::from_str(&text).map_err(|e| e.to_string())
    } else {
        serde_json::from_str(&text)
            .map_err(|e| e.to_string())
            .or_else(|json_err| toml::from_str(&text).map_err(|_| json_err))
    };
    parsed.map_err(|e| format!("{}: {e}", path.display()))
}

fn analyze(args: AnalyzeArgs) -> CliResult {
    let methods = Method::parse_list(&args.methods).map_err(|e| e.to_string())?;
    let configs: MethodConfigs = match &args.config {
        Some(p) => read_structured(p)?,
        None => MethodConfigs::default(),
    };
    let channels = load_csv(&args.input).map_err(|e| format!("{}: {e}", args.input.display()))?;
    let table = run_comparison(&channels, &methods, &args.band, &configs, Some(args.reference_hz))
        .map_err(|e| e.to_string())?;
    let format = if args.json { ReportFormat::Json } else { ReportFormat::Csv };
    emit_report(&table, format, &args.out).map_err(|e| format!("{}: {e}", args.out.display()))?;
    if let Some(dir) = &args.spectra_dir {
        write_spectra(&table, dir).map_err(|e| format!("{}: {e}", dir.display()))?;
    }
    let failures = table.failures();
    if failures > 0 {
        for cell in &table.cells {
            if let Err(e) = &cell.outcome {
                eprintln!("modal-kit: {} / {}: {e}", cell.channel, cell.method);
            }
        }
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}

fn synth(args: SynthArgs) -> CliResult {
    let spec: SynthSpec = read_structured(&args.spec)?;
    for (a, b) in spec.unresolvable_pairs() {
        eprintln!("modal-kit: warning: modes at {a} Hz and {b} Hz are closer than the record resolves");
    }
    let series = generate_ringdown(&spec).map_err(|e| e.to_string())?;
    let out = File::create(&args.out).map_err(|e| format!("{}: {e}", args.out.display()))?;
    write_channels_csv(&[&series], BufWriter::new(out)).map_err(|e| e.to_string())?;
    Ok(ExitCode::SUCCESS)
}

fn window(args: WindowArgs) -> CliResult {
    let channels = load_csv(&args.input).map_err(|e| format!("{}: {e}", args.input.display()))?;
    let series = channels.get(&args.channel).map_err(|e| e.to_string())?;
    let configs = MethodConfigs::default();
    let cfg = PencilConfig {
        window_len_s: args.window,
        step_s: args.step,
        ..PencilConfig::default().with_rank(OrderPolicy::SvdAuto(args.rank_threshold))
    };
    let reports = sliding_dominant(&detrend(series, configs.detrend), &cfg, &args.band).map_err(|e| e.to_string())?;
    let out = File::create(&args.out).map_err(|e| format!("{}: {e}", args.out.display()))?;
    write_window_reports(&reports, BufWriter::new(out)).map_err(|e| e.to_string())?;
    Ok(ExitCode::SUCCESS)
}
