mod commands;
mod emit;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use cubicgit_core::algebra::{FieldSpec, GroebnerLimits};
use cubicgit_core::reproduce::Scope;
use cubicgit_core::Error;

use crate::emit::Format;

/// Torus stability, maximal families and singular loci of cubic hypersurfaces.
///
/// Every flag can also be set through an environment variable named
/// `CUBICGIT_<FLAG>` (for example `CUBICGIT_WORKERS=4`); command-line flags
/// take precedence.
#[derive(Debug, Parser)]
#[command(name = "cubicgit", version)]
pub struct Cli {
    /// Projective dimension (forms in n+1 variables). Defaults to 6.
    #[arg(long, global = true, env = "CUBICGIT_N")]
    pub n: Option<usize>,
    /// Degree of the forms. Defaults to 3.
    #[arg(long, global = true, env = "CUBICGIT_D")]
    pub d: Option<u32>,
    /// Random coefficient draws per family for Groebner computations.
    #[arg(long, global = true, env = "CUBICGIT_SEEDS", default_value_t = 3)]
    pub seeds: usize,
    /// Worker threads; 0 picks one per core.
    #[arg(long, global = true, env = "CUBICGIT_WORKERS", default_value_t = 0)]
    pub workers: usize,
    /// Coefficient field: `rational` or `prime:<p>`.
    #[arg(long, global = true, env = "CUBICGIT_FIELD", default_value = "prime:2147483647", value_parser = parse_field)]
    pub field: FieldSpec,
    /// Shorthand for `--format json`.
    #[arg(long, global = true, env = "CUBICGIT_JSON")]
    pub json: bool,
    #[arg(long, global = true, env = "CUBICGIT_FORMAT", value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the report here instead of standard output.
    #[arg(long, global = true, env = "CUBICGIT_OUT")]
    pub out: Option<PathBuf>,
    /// Suppress progress messages on standard error.
    #[arg(long, short, global = true, env = "CUBICGIT_QUIET")]
    pub quiet: bool,
    /// Abort a Groebner computation after this many reduced pairs.
    #[arg(long, global = true, env = "CUBICGIT_MAX_PAIRS")]
    pub max_pairs: Option<usize>,
    /// Abort a Groebner computation once a coefficient needs more bits than
    /// this. Over the rationals it defaults to 16384; prime fields are never
    /// limited unless asked.
    #[arg(long, global = true, env = "CUBICGIT_MAX_COEFFICIENT_BITS")]
    pub max_coefficient_bits: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the degree-d monomials in n+1 variables.
    Simplex,
    /// Enumerate the maximal halfspace supports.
    Enumerate,
    /// Classify a form with respect to the diagonal torus.
    Classify {
        /// Polynomial document (JSON).
        input: PathBuf,
    },
    /// Dimension and degree of singular loci.
    Singular {
        /// Table families to analyse (default: all 22).
        #[arg(long, value_delimiter = ',')]
        family: Vec<usize>,
        /// Analyse this polynomial document instead of the table families.
        #[arg(long, conflicts_with = "family")]
        input: Option<PathBuf>,
    },
    /// Verify inclusion chains and screen the retained families.
    Inclusions {
        /// Chain file to verify instead of the bundled chains.
        #[arg(long)]
        chains: Option<PathBuf>,
    },
    /// Recompute the bundled tables and report every difference.
    Reproduce {
        #[arg(value_enum, default_value_t = ScopeArg::All)]
        scope: ScopeArg,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ScopeArg {
    Enumerate,
    Singular,
    Inclusions,
    All,
}

impl From<ScopeArg> for Scope {
    fn from(s: ScopeArg) -> Scope {
        match s {
            ScopeArg::Enumerate => Scope::Enumerate,
            ScopeArg::Singular => Scope::Singular,
            ScopeArg::Inclusions => Scope::Inclusions,
            ScopeArg::All => Scope::All,
        }
    }
}

fn parse_field(s: &str) -> Result<FieldSpec, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

impl Cli {
    pub fn format(&self) -> Format {
        if self.json {
            Format::Json
        } else {
            self.format
        }
    }

    pub fn limits(&self, field: FieldSpec) -> GroebnerLimits {
        let bits = match (self.max_coefficient_bits, field) {
            (Some(b), _) => Some(b),
            (None, FieldSpec::Rational) => Some(16384),
            (None, FieldSpec::Prime(_)) => None,
        };
        GroebnerLimits { max_pairs: self.max_pairs, max_coefficient_bits: bits }
    }

    pub fn progress(&self, msg: &str) {
        if !self.quiet {
            eprintln!("{msg}");
        }
    }
}

pub mod exit {
    pub const OK: u8 = 0;
    pub const DIFF: u8 = 1;
    pub const USAGE: u8 = 2;
    pub const EXHAUSTED: u8 = 3;
}

fn error_exit(e: &Error) -> u8 {
    match e {
        Error::ResourceExhausted(_) => exit::EXHAUSTED,
        _ => exit::USAGE,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::USAGE } else { exit::OK });
        }
    };
    let (report, status) = match commands::run(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("cubicgit: error [{}]: {e}", e.code());
            return ExitCode::from(error_exit(&e));
        }
    };
    let text = report.render(cli.format());
    let written = match &cli.out {
        Some(path) => std::fs::write(path, text.as_bytes()).map_err(|e| format!("{}: {e}", path.display())),
        None => std::io::stdout().lock().write_all(text.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        eprintln!("cubicgit: error [io]: {e}");
        return ExitCode::from(exit::USAGE);
    }
    ExitCode::from(status)
}
