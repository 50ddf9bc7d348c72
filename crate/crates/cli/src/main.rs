use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hatelex_core::runner::{self, Experiment, RunConfig};
use hatelex_core::{Error, ErrorCategory};

/// Corpus similarity and sarcasm-to-hate transfer experiments.
#[derive(Parser)]
#[command(name = "hatelex", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Bootstrapped Jaccard / JSD between corpus pairs.
    Similarity(Common),
    /// Train once on sarcasm labels, evaluate under sarcasm and hate labels.
    SingleStep(Common),
    /// Staged training with weight transfer between stages.
    Sequential(Common),
    /// Sequential training with and without the pre-training stage.
    Ablation(Common),
    /// Check a config for every experiment it can run, without running anything.
    Validate(Common),
}

#[derive(Args)]
struct Common {
    /// TOML config, or a report JSON whose embedded snapshot is re-run.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides the config).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Global seed (overrides the config).
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for parallel sections.
    #[arg(long)]
    threads: Option<usize>,
}

fn exit_code(e: &Error) -> u8 {
    match e.category() {
        ErrorCategory::Config => 1,
        ErrorCategory::Ingest => 2,
        ErrorCategory::Runtime => 3,
    }
}

fn load(common: &Common) -> Result<RunConfig, Error> {
    let mut config = RunConfig::from_file(&common.config)?;
    if let Some(out) = &common.out {
        config.output_dir = out.clone();
    }
    if let Some(seed) = common.seed {
        config.seed = seed;
    }
    Ok(config)
}

fn validate(config: RunConfig) -> Result<(), Error> {
    let mut ok = Vec::new();
    let mut first_err = None;
    for exp in [
        Experiment::Similarity,
        Experiment::SingleStep,
        Experiment::Sequential,
        Experiment::Ablation,
    ] {
        match runner::prepare(config.clone(), exp) {
            Ok(_) => ok.push(exp.name()),
            Err(e) => {
                eprintln!("{}: {e}", exp.name());
                first_err.get_or_insert(e);
            }
        }
    }
    if ok.is_empty() {
        return Err(first_err.expect("at least one experiment"));
    }
    println!("config valid for: {}", ok.join(", "));
    Ok(())
}

fn execute(cli: Cli) -> Result<(), Error> {
    let (experiment, common) = match &cli.command {
        Command::Similarity(c) => (Some(Experiment::Similarity), c),
        Command::SingleStep(c) => (Some(Experiment::SingleStep), c),
        Command::Sequential(c) => (Some(Experiment::Sequential), c),
        Command::Ablation(c) => (Some(Experiment::Ablation), c),
        Command::Validate(c) => (None, c),
    };
    let config = load(common)?;
    let Some(experiment) = experiment else {
        return validate(config);
    };
    let go = || runner::run(experiment, config);
    let output = match common.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("--threads: {e}")))?
            .install(go)?,
        None => go()?,
    };
    println!("{}", output.report_path.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
