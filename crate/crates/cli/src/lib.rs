//! The `qfix` command line.
//!
//! Exit codes: 0 on success or a passed check, 1 on a rejected derivation
//! or a failed check, 2 on unreadable or invalid input.

use std::fmt::Display;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

pub mod commands;
pub mod io;
pub mod model;

#[derive(Debug, Parser)]
#[command(name = "qfix", version, about = "Quantitative equational reasoning with fixed points")]
pub struct Cli {
    /// Master seed for every randomized check.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Target accuracy for solves and law checks.
    #[arg(long, global = true)]
    pub eps: Option<f64>,
    /// Machine-readable output.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Pattern calculus on pattern documents.
    Pattern {
        #[command(subcommand)]
        op: PatternOp,
    },
    /// Infers the pattern of a term and its per-slot moduli.
    Analyze(AnalyzeArgs),
    /// Checks a derivation document.
    Prove {
        file: PathBuf,
    },
    /// Certified fixed point of a term in a model; prints JSON.
    Solve(SolveArgs),
    /// Numerical check of a fixed-point law.
    Laws(LawsArgs),
    /// Markov decision processes.
    Mdp {
        #[command(subcommand)]
        op: MdpOp,
    },
}

#[derive(Debug, Subcommand)]
pub enum PatternOp {
    /// Composes the pattern with one inner pattern per slot.
    Compose {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "inner", required = true)]
        inner: Vec<PathBuf>,
    },
    /// Identifies slot `j` with slot `i`.
    Contract {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        i: usize,
        #[arg(long)]
        j: usize,
    },
    /// Binds a slot with the fixed-point operation.
    Mu {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        slot: usize,
    },
    /// Contraction modulus at a slot.
    Modulus {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        slot: usize,
    },
    /// Multiplies every weight by a factor in [0, 1].
    Scale {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        by: f64,
    },
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// File holding the term text.
    #[arg(long)]
    pub term: PathBuf,
    /// Signature document.
    #[arg(long, conflicts_with = "model", required_unless_present = "model")]
    pub signature: Option<PathBuf>,
    /// Model document; its bindings give the signature.
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Context arity; defaults to the largest free variable.
    #[arg(long)]
    pub arity: Option<usize>,
    /// Sample the inferred pattern against the model this many times.
    #[arg(long, requires = "model")]
    pub trials: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Term text, or `{"term": .., "focus": i, "env": [..]}`.
    #[arg(long)]
    pub term: PathBuf,
    /// Element to start the iteration from instead of the model origin.
    #[arg(long)]
    pub seed_value: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LawsArgs {
    /// dinaturality, diagonal or amalgamation.
    #[arg(long)]
    pub law: String,
    #[arg(long)]
    pub spec: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum MdpOp {
    /// Certified value of a policy; prints JSON.
    Eval {
        #[arg(long)]
        mdp: PathBuf,
        /// Policy or policy tree document.
        #[arg(long)]
        policy: PathBuf,
    },
    /// Sampled check of the reward barycentric algebra axioms.
    Axioms {
        #[arg(long)]
        mdp: PathBuf,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{file}: {source}")]
    Io {
        file: String,
        #[source]
        source: std::io::Error,
    },
    /// A document that does not meet its schema; `detail` starts with the
    /// field path when there is one.
    #[error("{file}: {detail}")]
    Document { file: String, detail: String },
    #[error("{0}")]
    Usage(String),
    /// The computation ran but could not certify its result.
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn document(file: &Path, at: &str, message: impl Display) -> Self {
        let detail = if at.is_empty() || at == "." {
            message.to_string()
        } else {
            format!("{at}: {message}")
        };
        CliError::Document {
            file: file.display().to_string(),
            detail,
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Failed(_) => 1,
            _ => 2,
        }
    }
}

/// Text to print and the exit code (0 or 1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub output: String,
    pub code: u8,
}

impl Outcome {
    pub fn ok(output: String) -> Self {
        Outcome { output, code: 0 }
    }

    pub fn verdict(output: String, passed: bool) -> Self {
        Outcome {
            output,
            code: if passed { 0 } else { 1 },
        }
    }
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Pattern { op } => commands::pattern::run(op, cli.json),
        Command::Analyze(args) => commands::analyze::run(args, cli),
        Command::Prove { file } => commands::prove::run(file, cli.json),
        Command::Solve(args) => commands::solve::run(args, required_eps(cli)?),
        Command::Laws(args) => commands::laws::run(args, required_eps(cli)?, cli.json),
        Command::Mdp { op: MdpOp::Eval { mdp, policy } } => commands::mdp::eval(mdp, policy, required_eps(cli)?),
        Command::Mdp { op: MdpOp::Axioms { mdp, trials } } => commands::mdp::axioms(mdp, *trials, cli.seed, cli.json),
    }
}

fn required_eps(cli: &Cli) -> Result<f64, CliError> {
    match cli.eps {
        Some(e) if e > 0.0 && e.is_finite() => Ok(e),
        Some(e) => Err(CliError::Usage(format!("--eps must be positive, got {e}"))),
        None => Err(CliError::Usage("--eps is required for this command".into())),
    }
}
