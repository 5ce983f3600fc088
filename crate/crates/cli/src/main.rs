//! `retrodict`: command-line front end. Every command prints a JSON report and a
//! short human-readable summary.

mod commands;
mod demo;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use report::{Failure, Outcome};
use retrodict::Tolerances;

#[derive(Parser, Debug)]
#[command(
    name = "retrodict",
    version,
    about = "Retrodiction, Petz recovery and tabletop reversibility"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalOpts {
    /// Equality tolerance.
    #[arg(long, global = true, value_name = "TOL")]
    pub tol_eq: Option<f64>,
    /// Rank tolerance for eigenvalues treated as zero.
    #[arg(long, global = true, value_name = "TOL")]
    pub tol_rank: Option<f64>,
    /// Seed for commands that sample.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

impl GlobalOpts {
    fn tolerances(&self) -> Tolerances {
        let mut t = Tolerances::default();
        if let Some(eq) = self.tol_eq {
            t = t.with_equality(eq);
        }
        if let Some(rank) = self.tol_rank {
            t = t.with_rank(rank);
        }
        t
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Bayes inversion of a stochastic matrix.
    RetroClassical {
        #[arg(long)]
        channel: PathBuf,
        #[arg(long)]
        prior: PathBuf,
    },
    /// Classical retrodiction assembled from a dilation.
    RetroViaDilation {
        #[arg(long)]
        dilation: PathBuf,
        #[arg(long)]
        prior: PathBuf,
    },
    /// Petz recovery map of a channel.
    Petz {
        #[arg(long)]
        channel: PathBuf,
        #[arg(long)]
        prior: PathBuf,
    },
    /// Petz recovery computed through a Stinespring dilation.
    PetzDilated {
        #[arg(long)]
        dilation: PathBuf,
        #[arg(long)]
        prior: PathBuf,
    },
    /// Hilbert-Schmidt adjoint of a channel.
    Adjoint {
        #[arg(long)]
        channel: PathBuf,
    },
    /// Gibbs state of a Hamiltonian.
    Gibbs {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Cartan decomposition of a two-qubit unitary.
    Cartan {
        #[arg(long)]
        unitary: PathBuf,
    },
    /// Generalized-thermal classification of a two-qubit unitary.
    ClassifyGg {
        #[arg(long)]
        unitary: PathBuf,
    },
    /// Nullspace test for local-sum conservation, any dimensions.
    GgOracle {
        #[arg(long)]
        unitary: PathBuf,
        #[arg(long, default_value_t = 2)]
        d_a: usize,
        #[arg(long, default_value_t = 2)]
        d_b: usize,
    },
    /// Pure input preserved as a product for a given ancilla ket.
    SolvePpPure {
        #[arg(long)]
        unitary: PathBuf,
        #[arg(long)]
        beta: PathBuf,
    },
    /// Product-preservation check of a tuple.
    CheckPp {
        #[arg(long)]
        unitary: PathBuf,
        #[arg(long)]
        alpha: PathBuf,
        #[arg(long)]
        beta: PathBuf,
    },
    /// Tabletop-reversibility decision.
    CheckTr {
        #[arg(long)]
        dilation: PathBuf,
        #[arg(long)]
        prior: PathBuf,
    },
    /// Composable tabletop reversibility up to a number of steps.
    CheckTrc {
        #[arg(long)]
        dilation: PathBuf,
        #[arg(long)]
        prior: PathBuf,
        #[arg(long, default_value_t = 4)]
        max_l: usize,
    },
    /// Channel cycling through N priors; a seeded qutrit example without `--spec`.
    MakeNsteady {
        #[arg(long)]
        spec: Option<PathBuf>,
    },
    /// Compare the rank-deficient retrodiction conventions on a pure tuple.
    ConventionsCompare {
        #[arg(long)]
        unitary: PathBuf,
        #[arg(long)]
        alpha: PathBuf,
        #[arg(long)]
        beta: PathBuf,
    },
    /// Bundled worked examples.
    Demo {
        #[arg(value_enum)]
        name: DemoName,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum DemoName {
    #[value(name = "theorem4")]
    Theorem4,
    #[value(name = "appendixB-classical")]
    ClassicalCounterexample,
    #[value(name = "appendixB-quantum")]
    QuantumCounterexample,
    Thermal,
    Nsteady,
    Conventions,
}

impl Command {
    fn name(&self) -> String {
        let plain = match self {
            Command::RetroClassical { .. } => "retro-classical",
            Command::RetroViaDilation { .. } => "retro-via-dilation",
            Command::Petz { .. } => "petz",
            Command::PetzDilated { .. } => "petz-dilated",
            Command::Adjoint { .. } => "adjoint",
            Command::Gibbs { .. } => "gibbs",
            Command::Cartan { .. } => "cartan",
            Command::ClassifyGg { .. } => "classify-gg",
            Command::GgOracle { .. } => "gg-oracle",
            Command::SolvePpPure { .. } => "solve-pp-pure",
            Command::CheckPp { .. } => "check-pp",
            Command::CheckTr { .. } => "check-tr",
            Command::CheckTrc { .. } => "check-trc",
            Command::MakeNsteady { .. } => "make-nsteady",
            Command::ConventionsCompare { .. } => "conventions-compare",
            Command::Demo { name } => {
                return format!("demo {}", name.to_possible_value().expect("named variant").get_name());
            }
        };
        plain.to_string()
    }
}

/// Writes a line, treating a closed pipe as success (e.g. `retrodict ... | head`).
fn emit(w: &mut impl Write, text: &str) -> std::io::Result<()> {
    match writeln!(w, "{text}") {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        r => r,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let tol = cli.global.tolerances();
    let name = cli.command.name();
    let outcome: Outcome = match &cli.command {
        Command::Demo { name } => demo::run(*name, &cli.global, &tol),
        cmd => commands::run(cmd, &cli.global, &tol),
    };
    let (json, summary, code) = report::render(&name, &tol, cli.global.seed, outcome);
    let written = match &cli.global.out {
        Some(path) => std::fs::write(path, &json).and_then(|_| emit(&mut std::io::stdout(), &summary)),
        None => emit(&mut std::io::stdout(), &json).and_then(|_| emit(&mut std::io::stderr(), &summary)),
    };
    if let Err(e) = written {
        eprintln!("cannot write report: {e}");
        return ExitCode::from(Failure::USAGE);
    }
    ExitCode::from(code)
}
