mod commands;
mod output;
mod selftest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use orm_core::OracleBudgets;

#[derive(Parser)]
#[command(name = "orm", version, about = "Special one-relator monoids: pieces, units, normal forms, right inverses and equations")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    #[command(flatten)]
    budgets: BudgetArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Args, Clone, Copy)]
pub struct BudgetArgs {
    /// Critical-pair inferences allowed for completion of the units group.
    #[arg(long, global = true)]
    kb_inferences: Option<usize>,
    /// Extra length allowed above the input in the bounded search.
    #[arg(long, global = true)]
    bfs_radius: Option<usize>,
    /// Node limit of the bounded search.
    #[arg(long, global = true)]
    bfs_nodes: Option<usize>,
}

impl BudgetArgs {
    pub fn budgets(&self) -> OracleBudgets {
        let mut b = OracleBudgets::from_env();
        if let Some(n) = self.kb_inferences {
            b.kb_inferences = n;
        }
        if let Some(n) = self.bfs_radius {
            b.bfs_radius = n;
        }
        if let Some(n) = self.bfs_nodes {
            b.bfs_nodes = n;
        }
        b
    }
}

#[derive(Subcommand)]
enum Command {
    /// Pieces, conditions and structure of a presentation.
    Analyze { file: PathBuf },
    /// Decide whether a word is trivial in the group of units.
    Units {
        file: PathBuf,
        /// Word over the units alphabet (uppercase or ^-1 for inverses), or a Δ*-word over A.
        #[arg(long)]
        word: String,
    },
    /// Reduce a word to its normal form.
    Reduce {
        file: PathBuf,
        #[arg(long)]
        word: String,
    },
    /// Reduced representatives of all elements within a radius.
    Ball {
        file: PathBuf,
        #[arg(long)]
        radius: usize,
    },
    /// Right inverses of powers of the witness letter, basis and weights.
    Inverses { file: PathBuf },
    /// Check the embedding of the n-bicyclic monoid.
    Embed {
        file: PathBuf,
        #[arg(long, default_value_t = 4)]
        radius: usize,
    },
    /// Compile word equations with length constraints into equations over the monoid.
    CompileWelc {
        file: PathBuf,
        #[arg(long)]
        system: PathBuf,
    },
    /// Bounded search for a solution of a system of equations.
    Solve {
        file: PathBuf,
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        radius: usize,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Use the unpruned, unmemoized reference search.
        #[arg(long)]
        naive: bool,
    },
    /// Run the built-in corpus checks.
    Selftest,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let budgets = cli.budgets.budgets();
    let result = match cli.command {
        Command::Analyze { file } => commands::analyze(&file, budgets),
        Command::Units { file, word } => commands::units(&file, &word, budgets),
        Command::Reduce { file, word } => commands::reduce(&file, &word, budgets),
        Command::Ball { file, radius } => commands::ball(&file, radius, budgets),
        Command::Inverses { file } => commands::inverses(&file, budgets),
        Command::Embed { file, radius } => commands::embed(&file, radius, budgets),
        Command::CompileWelc { file, system } => commands::compile_welc(&file, &system, budgets),
        Command::Solve { file, system, radius, jobs, naive } => {
            commands::solve(&file, &system, radius, jobs.max(1), naive, budgets)
        }
        Command::Selftest => Ok(selftest::run(budgets)),
    };
    match result {
        Ok(out) => {
            print!("{}", output::render(&out.value, cli.format));
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("error[{}]: {}", e.code, e.message);
            ExitCode::from(1)
        }
    }
}
