//! The `rht` command-line front end: argument parsing, presentation
//! documents, reports and the on-disk cache.
//!
//! Exit codes: 0 on success, 1 when a mathematical check fails (the report
//! carries a witness), 2 on bad input.

pub mod cache;
mod commands;
pub mod doc;
pub mod report;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::cache::Cache;

#[derive(Debug, Parser)]
#[command(name = "rht", version, about = "Exact rational homotopy computations")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Neither read nor write the report cache.
    #[arg(long, global = true)]
    pub no_cache: bool,
    /// Truncation degree for series, Lie algebras and models.
    #[arg(long, global = true, default_value_t = 6)]
    pub max_degree: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sullivan models.
    #[command(subcommand)]
    Model(ModelCommand),
    /// ψ-homotopy of a Sullivan algebra given as a cdga document.
    Psi { file: PathBuf },
    /// Graded Lie algebras.
    #[command(subcommand)]
    Lie(LieCommand),
    /// Chevalley–Eilenberg cdgas and 1-minimal towers.
    #[command(subcommand)]
    Cce(CceCommand),
    /// Magnus expansions of free groups.
    #[command(subcommand)]
    Malcev(MalcevCommand),
    /// Orbit configuration spaces of surfaces.
    #[command(subcommand)]
    Conf(ConfCommand),
    /// Quadratic algebras.
    #[command(subcommand)]
    Koszul(KoszulCommand),
}

#[derive(Debug, Subcommand)]
pub enum ModelCommand {
    /// Minimal model of a formal cohomology table, up to --max-degree.
    Build { file: PathBuf },
    /// Whether a cdga document is a minimal Sullivan algebra.
    CheckMinimal { file: PathBuf },
    /// The three minimality conditions for a relative model (needs `base`).
    RelCriterion { file: PathBuf },
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct LieSource {
    /// A lie document.
    pub file: Option<PathBuf>,
    /// Free Lie algebra on this many generators.
    #[arg(long)]
    pub free: Option<usize>,
    /// Fundamental Lie algebra of the closed surface of this genus.
    #[arg(long)]
    pub surface: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum LieCommand {
    /// Dimension of each degree.
    Dims(LieSource),
    /// Lower central series ranks φ_i.
    Lcs(LieSource),
}

#[derive(Debug, Subcommand)]
pub enum CceCommand {
    /// CCE cdga of a Lie algebra truncated above --max-degree.
    Build(LieSource),
    /// Tower of CCE cdgas of L/Γ_2, ..., L/Γ_stage.
    Tower {
        #[command(flatten)]
        source: LieSource,
        #[arg(long)]
        stage: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum MalcevCommand {
    /// Multiplicativity, group-likeness and filtration ranks of the Magnus
    /// expansions, modulo words longer than --max-degree.
    Verify {
        #[arg(long, default_value_t = 2)]
        arity: usize,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Orientation {
    Preserving,
    Reversing,
}

#[derive(Debug, Args)]
pub struct SpecArgs {
    #[arg(long)]
    pub genus: Option<u32>,
    #[arg(long)]
    pub punctures: Option<u32>,
    /// Order of the acting group (1 or 2 on the sphere).
    #[arg(long)]
    pub group: Option<u32>,
    #[arg(long, value_enum)]
    pub orientation: Option<Orientation>,
    /// A surface-spec document instead of the flags above.
    #[arg(long, conflicts_with_all = ["genus", "punctures", "group", "orientation"])]
    pub spec: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum ConfCommand {
    /// ψ-homotopy of C_n^G(S) in degrees ≥ 2.
    Psi {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long)]
        n: u32,
    },
    /// Whether the model built from the projection C_n -> C_k is minimal.
    Minimality {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        k: u32,
    },
    /// Whether C_{n+1} -> C_n has a cross-section.
    Sections {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long)]
        n: u32,
    },
    /// LCS ranks of π_1 C_n, optionally checked against a Poincaré polynomial.
    Lcs {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        poincare: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum KoszulCommand {
    /// h_A(t)·h_{A^!}(-t) = 1 up to --max-degree.
    Check { file: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

/// Runs one invocation. `args` includes the program name.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.exit_code() == 0 {
                Outcome {
                    stdout: text,
                    stderr: String::new(),
                    code: 0,
                }
            } else {
                Outcome {
                    stdout: String::new(),
                    stderr: text,
                    code: 2,
                }
            };
        }
    };
    let input_error = |message: String| Outcome {
        stdout: String::new(),
        stderr: format!("error: {message}\n"),
        code: 2,
    };
    let (request, compute) = match commands::plan(&cli) {
        Ok(planned) => planned,
        Err(message) => return input_error(message),
    };
    let mut stderr = String::new();
    let cache = if cli.no_cache { None } else { cache::default_dir().map(Cache::new) };
    let key = cache::key(request.subcommand, &request.inputs, request.cap);
    let hit = cache
        .as_ref()
        .and_then(|c| c.lookup(&key, &mut |w| stderr.push_str(&format!("warning: {w}\n"))));
    let report = match hit {
        Some(mut report) => {
            report.command = request.echo;
            report
        }
        None => match compute() {
            Ok(report) => {
                if let Some(c) = &cache {
                    if let Err(e) = c.store(&key, &report) {
                        stderr.push_str(&format!("warning: could not write cache in {}: {e}\n", c.dir().display()));
                    }
                }
                report
            }
            Err(message) => {
                let mut out = input_error(message);
                out.stderr.insert_str(0, &stderr);
                return out;
            }
        },
    };
    Outcome {
        stdout: match cli.format {
            Format::Table => report.to_table(),
            Format::Json => report.to_json(),
        },
        stderr,
        code: report.exit_code(),
    }
}
