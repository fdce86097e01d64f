mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{ConfigError, RunConfig};

/// Row-centric lossless coding of binary Ising images.
#[derive(Parser, Debug)]
#[command(name = "rowcode", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Draw a Gibbs corpus and write it as PBM files.
    Sample(Common),
    /// Fit block parameters on a corpus and write them as CSV.
    Calibrate(Common),
    /// Encode one PBM image.
    Encode(Common),
    /// Decode a stream back to PBM.
    Decode(Common),
    /// Rate sweeps over block heights and context sizes.
    Sweep(Common),
    /// Redundancy estimates and reference comparisons.
    Analyze(Common),
    /// Exact identities and optional corpus orderings.
    Verify(Common),
    /// List the configuration keys with their defaults.
    Keys,
}

#[derive(Args, Debug)]
struct Common {
    /// key=value configuration file.
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Override one key; repeatable.
    #[arg(short, long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(short, long)]
    input: Option<String>,
    #[arg(short, long)]
    out: Option<String>,
    #[arg(long)]
    theta: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    scheme: Option<String>,
    #[arg(long)]
    calibration: Option<String>,
}

impl Common {
    fn load(&self) -> anyhow::Result<RunConfig> {
        let mut overrides = Vec::new();
        for s in &self.set {
            let (k, v) = s.split_once('=').ok_or_else(|| ConfigError(format!("--set expects KEY=VALUE, got {s:?}")))?;
            overrides.push((k.trim().to_string(), v.trim().to_string()));
        }
        let named = [
            ("input", &self.input),
            ("out", &self.out),
            ("theta", &self.theta),
            ("seed", &self.seed),
            ("scheme", &self.scheme),
            ("calibration", &self.calibration),
        ];
        for (k, v) in named {
            if let Some(v) = v {
                overrides.push((k.to_string(), v.clone()));
            }
        }
        RunConfig::load(self.config.as_deref(), &overrides)
    }
}

fn error_kind(e: &anyhow::Error) -> &'static str {
    use rowcode::Error as E;
    if e.downcast_ref::<ConfigError>().is_some() {
        return "config";
    }
    if e.downcast_ref::<commands::VerificationFailed>().is_some() {
        return "verification";
    }
    if let Some(e) = e.downcast_ref::<E>() {
        return match e {
            E::InvalidDims { .. } | E::DimsTooLarge { .. } | E::TooManyRows(_) => "config",
            E::BoundaryLength { .. } | E::ColumnOutOfRange { .. } | E::PrevStateMismatch | E::ZeroProbability { .. } => {
                "internal"
            }
            E::CorruptStream(_) => "corrupt_stream",
            E::Bitstream(_) => "bitstream",
            E::Image(_) => "image",
            E::Scheme(_) => "scheme",
            E::MissingCalibration { .. } => "missing_calibration",
            E::BracketFailure { .. } => "bracket_failure",
            E::InsufficientSamples { .. } => "insufficient_samples",
            E::Table(_) => "table",
            E::Calibration(_) => "calibration",
            E::Io(_) => "io",
        };
    }
    if e.chain().any(|c| c.downcast_ref::<std::io::Error>().is_some()) {
        return "io";
    }
    "other"
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Sample(c) => commands::sample(&c.load()?),
        Command::Calibrate(c) => commands::calibrate(&c.load()?),
        Command::Encode(c) => commands::encode_cmd(&c.load()?),
        Command::Decode(c) => commands::decode_cmd(&c.load()?),
        Command::Sweep(c) => commands::sweep(&c.load()?),
        Command::Analyze(c) => commands::analyze(&c.load()?),
        Command::Verify(c) => commands::verify(&c.load()?),
        Command::Keys => {
            for (k, v, help) in config::KEYS {
                println!("{k}={v}  # {help}");
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: kind={} message={:?}", error_kind(&e), format!("{e:#}"));
            ExitCode::from(2)
        }
    }
}
