mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use linkrt::kb::Format;
use linkrt::measures::Measure;

#[derive(Parser)]
#[command(name = "linkrt", version, about = "Runtime models and cost-based planning for link discovery")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write seeded synthetic source and target tables as TSV.
    Generate(GenerateArgs),
    /// Time sampled joins on the first halves of both tables and fit every model family.
    Train(TrainArgs),
    /// Compare model predictions with measured joins on the second halves.
    Evaluate(EvaluateArgs),
    /// Print the canonical plan and one cost-based plan per family, then execute them.
    Plan(PlanArgs),
    /// Run random specifications with canonical and cost-based plans.
    Bench(BenchArgs),
}

#[derive(Args)]
struct Tables {
    #[arg(long)]
    source: PathBuf,
    #[arg(long)]
    target: PathBuf,
    #[arg(long, default_value_t = Format::Tsv)]
    format: Format,
    /// Key-value file with protocol settings; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, env = "LINKRT_SEED")]
    seed: Option<u64>,
}

#[derive(Args)]
struct Properties {
    #[arg(long, default_value = "title")]
    source_property: String,
    #[arg(long, default_value = "name")]
    target_property: String,
}

#[derive(Args)]
struct GenerateArgs {
    /// `products` or `strings`.
    #[arg(long, default_value = "products")]
    kind: String,
    #[arg(long, default_value_t = 1000)]
    n_source: usize,
    #[arg(long, default_value_t = 1000)]
    n_target: usize,
    #[arg(long, env = "LINKRT_SEED", default_value_t = linkrt::rng::DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value = "data")]
    out: PathBuf,
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    tables: Tables,
    #[command(flatten)]
    properties: Properties,
    /// Measures to train; repeat the flag for several. All five by default.
    #[arg(long)]
    measure: Vec<Measure>,
    #[arg(long)]
    n_source: Option<usize>,
    #[arg(long)]
    n_target: Option<usize>,
    #[arg(long)]
    repetitions: Option<usize>,
    #[arg(long, default_value = "models")]
    out: PathBuf,
}

#[derive(Args)]
struct EvaluateArgs {
    #[command(flatten)]
    tables: Tables,
    #[command(flatten)]
    properties: Properties,
    #[arg(long)]
    measure: Measure,
    #[arg(long, default_value = "models")]
    models: PathBuf,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    repetitions: Option<usize>,
    /// Evaluation CSV; the markdown table goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PlanArgs {
    #[command(flatten)]
    tables: Tables,
    #[arg(long)]
    spec: String,
    #[arg(long, default_value = "models")]
    models: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    tables: Tables,
    #[command(flatten)]
    properties: Properties,
    #[arg(long, default_value = "models")]
    models: PathBuf,
    #[arg(long, default_value_t = 100)]
    specs: usize,
    #[arg(long, default_value_t = 3)]
    depth: usize,
    /// Per-specification runtimes as CSV.
    #[arg(long)]
    plot_data: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(a) => commands::generate(a),
        Command::Train(a) => commands::train(a),
        Command::Evaluate(a) => commands::evaluate(a),
        Command::Plan(a) => commands::plan(a),
        Command::Bench(a) => commands::bench(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
