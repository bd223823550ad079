//! The `rse` command line.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{exit, Error, Result};
use crate::generate::{generate_dim, Profile};
use crate::mixing::{analyze, kvn_extract, Checkpoint, DensityCertificate, Thresholds};
use crate::schema::{SequenceFile, SystemFile};
use crate::suite::{run_suite, SuiteConfig};
use crate::tensor::tensor_ceps_capped;

pub const DEFAULT_MAX_TENSOR_DIM: usize = 4096;
pub const MAX_TENSOR_DIM_ENV: &str = "RSE_MAX_TENSOR_DIM";

#[derive(Debug, Parser)]
#[command(name = "rse", version, about = "Exact ergodicity and weak mixing for finite Riesz-space systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check that a system file describes a valid conditional-expectation-preserving system.
    Validate { file: PathBuf },
    /// Decide ergodicity and conditional weak mixing.
    Analyze {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Write the tensor product of two systems.
    Tensor {
        a: PathBuf,
        b: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Run the randomized property suite over a seeded corpus.
    Suite {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        count: usize,
        #[arg(long)]
        max_dim: usize,
        #[arg(long, default_value_t = 1000)]
        horizon: usize,
        /// Comma-separated generator profiles.
        #[arg(long, value_delimiter = ',', value_parser = parse_profile)]
        profiles: Option<Vec<Profile>>,
        /// Worker threads (default: all cores).
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Extract a density-zero component sequence from a nonnegative sequence.
    Kvn {
        seq: PathBuf,
        #[arg(long)]
        horizon: usize,
    },
    /// Generate a random valid system.
    Generate {
        #[arg(long)]
        dim: usize,
        #[arg(long, value_parser = parse_profile)]
        profile: Profile,
        #[arg(long)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn parse_profile(s: &str) -> std::result::Result<Profile, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Output of the `kvn` command. `support[i]` lists the indices `k` with `p_k(i) = 1`.
#[derive(Debug, Serialize)]
pub struct KvnReport {
    pub horizon: usize,
    pub dimension: usize,
    pub thresholds: Vec<String>,
    pub switch_points: Vec<Vec<usize>>,
    pub support: Vec<Vec<usize>>,
    pub input_checkpoints: Vec<Checkpoint>,
    pub certificate: DensityCertificate,
}

pub fn run_kvn(file: &SequenceFile, horizon: usize) -> Result<KvnReport> {
    let thresholds = file.thresholds()?;
    let values = file.terms(horizon)?;
    let x = kvn_extract(&values, horizon, &thresholds)?;
    let dimension = values[0].dimension();
    let support = (0..dimension)
        .map(|i| (0..horizon).filter(|&k| x.components[k].contains(i)).collect())
        .collect();
    let thresholds = match &thresholds {
        Thresholds::Harmonic => vec!["1/m".to_owned()],
        Thresholds::Custom(v) => v.iter().map(ToString::to_string).collect(),
    };
    Ok(KvnReport {
        horizon,
        dimension,
        thresholds,
        switch_points: x.switch_points,
        support,
        input_checkpoints: x.input_checkpoints,
        certificate: x.certificate,
    })
}

pub fn max_tensor_dim() -> Result<usize> {
    match std::env::var(MAX_TENSOR_DIM_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::InvalidConfig(format!("{MAX_TENSOR_DIM_ENV}={v:?} is not a dimension"))),
        Err(_) => Ok(DEFAULT_MAX_TENSOR_DIM),
    }
}

fn pretty<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn emit(out: &mut dyn Write, path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return exit::INVALID_INPUT;
            }
            let _ = write!(out, "{}", e.render());
            return exit::OK;
        }
    };
    run(cli, out, err)
}

pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match dispatch(cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "{}", serde_json::json!({ "error": e.to_json() }));
            e.exit_code()
        }
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match cli.command {
        Command::Validate { file } => {
            let parsed = SystemFile::read(&file)?;
            match parsed.to_ceps() {
                Ok(sys) => {
                    writeln!(out, "{}", serde_json::json!({ "valid": true, "dimension": sys.dimension() }))?;
                    Ok(exit::OK)
                }
                Err(e) => {
                    writeln!(out, "{}", serde_json::json!({ "valid": false, "error": e.to_json() }))?;
                    Ok(e.exit_code())
                }
            }
        }
        Command::Analyze { file, format } => {
            let sys = SystemFile::read(&file)?.to_ceps()?;
            let mut report = analyze(&sys)?;
            report.system_id = file.file_stem().map(|s| s.to_string_lossy().into_owned());
            match format {
                Format::Text => write!(out, "{}", report.to_text())?,
                Format::Json => write!(out, "{}", pretty(&report))?,
            }
            if report.has_defect() {
                writeln!(err, "defect: decision routes disagree or weak mixing without ergodicity")?;
                return Ok(exit::DEFECT);
            }
            Ok(exit::OK)
        }
        Command::Tensor { a, b, output } => {
            let (fa, fb) = (SystemFile::read(&a)?, SystemFile::read(&b)?);
            let product = tensor_ceps_capped(&fa.to_ceps()?, &fb.to_ceps()?, max_tensor_dim()?)?;
            SystemFile::tensor(&fa, &fb, &product).write(&output)?;
            writeln!(out, "{}", serde_json::json!({ "output": output, "dimension": product.dimension() }))?;
            Ok(exit::OK)
        }
        Command::Suite {
            seed,
            count,
            max_dim,
            horizon,
            profiles,
            jobs,
            output,
        } => {
            let mut config = SuiteConfig::new(seed, count, max_dim);
            config.horizon = horizon;
            config.jobs = jobs;
            if let Some(p) = profiles {
                config.profiles = p;
            }
            let report = run_suite(&config)?;
            emit(out, output.as_deref(), &report.to_json())?;
            let s = report.strata;
            writeln!(
                err,
                "checks failed: {}; strata: ergodic_only={} weak_mixing={} neither={}",
                report.failures(),
                s.ergodic_only,
                s.weak_mixing,
                s.neither
            )?;
            Ok(if report.failures() == 0 { exit::OK } else { exit::DEFECT })
        }
        Command::Kvn { seq, horizon } => {
            let report = run_kvn(&SequenceFile::read(&seq)?, horizon)?;
            write!(out, "{}", pretty(&report))?;
            Ok(exit::OK)
        }
        Command::Generate {
            dim,
            profile,
            seed,
            output,
        } => {
            let sys = generate_dim(seed, dim, profile)?;
            emit(out, output.as_deref(), &SystemFile::from_ceps(&sys).to_json())?;
            Ok(exit::OK)
        }
    }
}
