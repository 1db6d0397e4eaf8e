//! `solenoid`: validates wrapping rules and reports their invariants as JSON or Markdown.

mod cache;
mod corpus;
mod error;
mod pipeline;
mod render;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::Value;

use cache::StabilizeCache;
use error::{io_error, CliError};
use pipeline::{Group, Input, MatrixSource, Options};

/// Version of the report layout; bumped on any incompatible change.
pub const SCHEMA: u64 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Md,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Md => "md",
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "solenoid", version, about = "Invariants of one-dimensional solenoids given by wrapping rules")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value = "json", global = true)]
    format: Format,
    /// Directory for reports and the stabilization cache.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Largest stabilization power tried.
    #[arg(long, default_value_t = solenoid::building_blocks::DEFAULT_POWER_BOUND, global = true)]
    power_bound: u32,
    /// Bits of precision for Perron eigenvalue enclosures.
    #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u32).range(16..=4096), global = true)]
    precision: u32,
    /// Record wall-clock timings; reports are then no longer byte-stable.
    #[arg(long, global = true)]
    timings: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the axioms and orientation of a rule.
    Validate { file: PathBuf },
    /// Run the whole pipeline on a rule.
    Analyze {
        file: PathBuf,
        /// Cylinder depth for the dihedral checks.
        #[arg(long, default_value_t = 6)]
        depth: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// K-theory of the heteroclinic, inverse and homoclinic algebras.
    Ktheory { file: PathBuf },
    /// Finite-depth checks of the dihedral action.
    Dihedral {
        file: PathBuf,
        #[arg(long, default_value_t = 8)]
        depth: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Decide whether two 2×2 stationary dimension groups are isomorphic.
    ///
    /// Each argument is a rule file or a JSON integer matrix such as `[[2,1],[1,1]]`.
    Compare {
        a: PathBuf,
        b: PathBuf,
        /// Matrix read off rule files.
        #[arg(long, value_enum, default_value = "inverse")]
        group: Group,
    },
    /// Analyze the bundled corpus and diff the reports against the golden files.
    Corpus {
        /// Directory of golden reports.
        #[arg(long, default_value = concat!(env!("CARGO_MANIFEST_DIR"), "/golden"))]
        golden: PathBuf,
        /// Overwrite the golden files with fresh reports.
        #[arg(long)]
        bless: bool,
    },
}

fn read_input(path: &Path) -> Result<Input, CliError> {
    let source = fs::read_to_string(path).map_err(|e| io_error(&path.display().to_string(), e))?;
    Input::parse(&stem(path), source)
}

fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "input".into())
}

/// Sorted keys, two-space indent, trailing newline.
pub fn to_json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

fn render(v: &Value, format: Format) -> String {
    match format {
        Format::Json => to_json_text(v),
        Format::Md => render::markdown(v),
    }
}

fn emit(report: &Value, cli: &Cli, name: &str) -> Result<(), CliError> {
    let text = render(report, cli.format);
    print!("{text}");
    if let Some(out) = &cli.out {
        fs::create_dir_all(out).map_err(|e| io_error(&out.display().to_string(), e))?;
        let command = report["command"].as_str().unwrap_or("report");
        let path = out.join(format!("{name}.{command}.{}", cli.format.extension()));
        fs::write(&path, text).map_err(|e| io_error(&path.display().to_string(), e))?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let (depth, seed) = match &cli.command {
        Command::Analyze { depth, seed, .. } => (*depth, *seed),
        Command::Dihedral { depth, seed, .. } => (*depth, *seed),
        _ => (6, 0),
    };
    let opts = Options {
        power_bound: cli.power_bound,
        precision: cli.precision,
        depth,
        seed,
        timings: cli.timings,
        cache: cli.out.as_deref().map(StabilizeCache::new),
    };
    let (report, name) = match &cli.command {
        Command::Validate { file } => {
            let input = read_input(file)?;
            (pipeline::validate(&input, &opts), input.name)
        }
        Command::Analyze { file, .. } => {
            let input = read_input(file)?;
            (pipeline::analyze(&input, &opts), input.name)
        }
        Command::Ktheory { file } => {
            let input = read_input(file)?;
            (pipeline::ktheory(&input, &opts), input.name)
        }
        Command::Dihedral { file, .. } => {
            let input = read_input(file)?;
            (pipeline::dihedral(&input, &opts), input.name)
        }
        Command::Compare { a, b, group } => {
            let load = |p: &PathBuf| -> Result<MatrixSource, CliError> {
                let text = fs::read_to_string(p).map_err(|e| io_error(&p.display().to_string(), e))?;
                Ok(MatrixSource { name: stem(p), text })
            };
            let (a, b) = (load(a)?, load(b)?);
            let name = format!("{}-vs-{}", a.name, b.name);
            (pipeline::compare(&a, &b, *group, &opts), name)
        }
        Command::Corpus { golden, bless } => {
            let summary = corpus::run(golden, *bless, &opts)?;
            return emit(&summary, cli, "corpus");
        }
    };
    match report {
        Ok(r) => emit(&r, cli, &name),
        Err(CliError::Validation { message, report: Some(r) }) => {
            emit(&r, cli, &name)?;
            Err(CliError::Validation { message, report: None })
        }
        Err(e) => Err(e),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = CliError::Usage(e.render().to_string().trim_end().to_string());
            eprint!("{}", to_json_text(&err.to_json()));
            return ExitCode::from(err.exit_code() as u8);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprint!("{}", to_json_text(&e.to_json()));
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
