use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod cache;
mod commands;
mod output;

use commands::{Outcome, SignArg};

/// Exact verification of the Johnson cokernel top piece against dihedral
/// coinvariants.
#[derive(Parser, Debug)]
#[command(name = "cokernel", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Directory for cached results.
    #[arg(long, global = true, env = "COKERNEL_CACHE_DIR")]
    cache_dir: Option<PathBuf>,

    /// Record wall-clock time in reports (disables the cache).
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Args, Debug, Clone)]
pub struct Params {
    /// Degree.
    #[arg(long, default_value_t = 3)]
    pub d: usize,

    /// Genus, dim V = 2g. Defaults to g = d.
    #[arg(long)]
    pub g: Option<usize>,

    /// Reflection sign ε: 1, -1 or auto.
    #[arg(long, default_value = "auto", allow_hyphen_values = true)]
    pub reflection_sign: SignArg,

    /// Dotted-edge reversal sign σ: 1, -1 or auto.
    #[arg(long, default_value = "auto", allow_hyphen_values = true)]
    pub edge_sign: SignArg,

    /// Shorthand for both signs: `auto` or `SIGMA,EPSILON`.
    #[arg(long, allow_hyphen_values = true)]
    pub signs: Option<String>,

    /// Sampled tripod tuples for the diagram check (d >= 3).
    #[arg(long, default_value_t = 100)]
    pub trials: usize,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Calibrate signs, check the diagram, both cokernel quotients and the top-piece isomorphism.
    Verify(Params),
    /// Multiplicities of GL irreducibles in the dihedral coinvariants.
    Decompose(Params),
    /// Find the unique sign pair making the diagram and loop chain hold.
    Calibrate(Params),
    /// Replay the three graph-chain regressions.
    Figures(Params),
    /// Dimensions of both cokernel quotients, their strata and the dihedral target.
    Dims(Params),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    let (name, params) = match &cli.command {
        Command::Verify(p) => ("verify", p),
        Command::Decompose(p) => ("decompose", p),
        Command::Calibrate(p) => ("calibrate", p),
        Command::Figures(p) => ("figures", p),
        Command::Dims(p) => ("dims", p),
    };
    let cache = if cli.timing { None } else { cli.cache_dir.as_deref().map(|dir| cache::Cache::new(dir, name, params)) };
    if let Some(hit) = cache.as_ref().and_then(|c| c.load()) {
        print!("{}", output::render(&hit, cli.format));
        return ExitCode::from(hit.exit);
    }
    let result = match &cli.command {
        Command::Verify(p) => commands::verify(p, cli.timing),
        Command::Decompose(p) => commands::decompose(p),
        Command::Calibrate(p) => commands::calibrate(p),
        Command::Figures(p) => commands::figures(p),
        Command::Dims(p) => commands::dims(p, cli.timing),
    };
    let outcome: Outcome = match result {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    for line in &outcome.messages {
        eprintln!("{line}");
    }
    if let Some(c) = &cache {
        if let Err(e) = c.store(&outcome) {
            eprintln!("warning: cache write failed: {e}");
        }
    }
    print!("{}", output::render(&outcome, cli.format));
    ExitCode::from(outcome.exit)
}
