use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use softbayes_core::comparators::{theoretical_bound, Bound, BoundParams};
use softbayes_core::generators::{random_symbols, GeneratorSpec};
use softbayes_core::lemmas::{all_lemma_checks, disjoint_equivalence_gap};
use softbayes_harness::config::{DivergenceMode, ExperimentConfig, GeneratorConfig, LearnerConfig};
use softbayes_harness::io::{write_csv as write_stream_csv, write_jsonl, write_stream};
use softbayes_harness::report::{comparison_table, summary_json, write_artifacts};
use softbayes_harness::run_experiment;

#[derive(Parser)]
#[command(name = "softbayes", version, about = "Prediction with expert advice under log-loss")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write its CSV/JSON artifacts.
    Run(RunArgs),
    /// Run an experiment and print a per-learner table.
    Compare(RunArgs),
    /// Write a generated stream as JSONL (or CSV for a `.csv` path).
    Gen(GenArgs),
    /// Evaluate a regret bound.
    Bound(BoundArgs),
    /// Run the inequality fuzz suites and the disjoint-support equivalence check.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON experiment file; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Stream file (JSONL, or CSV with a header row).
    #[arg(long, conflicts_with = "generator")]
    stream: Option<PathBuf>,
    /// Generator, e.g. theorem2:100, disjoint-dirac:3:1,2,1, random-mixture:5:1000:4.
    #[arg(long)]
    generator: Option<String>,
    /// Learner, e.g. soft-bayes:anytime, eg:fixed=0.5, ml-soft-bayes, meta:rates=1,0.5.
    #[arg(long = "learner")]
    learners: Vec<String>,
    /// fixed-mixture, single-best, or shifting=t2,t3,...
    #[arg(long)]
    comparator: Option<String>,
    /// Bound to check: thm2..thm7, single-expert, or a descriptive name.
    #[arg(long = "bound")]
    bounds: Vec<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out_csv: Option<PathBuf>,
    #[arg(long)]
    out_json: Option<PathBuf>,
    /// halt or continue.
    #[arg(long)]
    on_divergence: Option<String>,
    /// Report losses in bits.
    #[arg(long)]
    bits: bool,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    generator: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write CSV to stdout instead of JSONL.
    #[arg(long)]
    csv: bool,
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long)]
    bound: String,
    #[arg(long = "horizon", short = 'T')]
    horizon: Option<usize>,
    #[arg(long = "experts", short = 'N')]
    experts: Option<usize>,
    #[arg(long)]
    best_set: Option<usize>,
    #[arg(long)]
    segments: Option<usize>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    eta_bar: Option<f64>,
    #[arg(long)]
    c1: Option<f64>,
    #[arg(long)]
    c2: Option<f64>,
    #[arg(long)]
    max_cumulative_sq: Option<f64>,
    #[arg(long)]
    prior_weight: Option<f64>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn experiment_config(args: &RunArgs) -> anyhow::Result<ExperimentConfig> {
    let mut config = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            ExperimentConfig::from_json(&text)?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(path) = &args.stream {
        config.stream = Some(path.clone());
        config.generator = None;
    }
    if let Some(generator) = &args.generator {
        config.generator = Some(GeneratorConfig::Named(generator.clone()));
        config.stream = None;
    }
    if !args.learners.is_empty() {
        config.learners = args.learners.iter().cloned().map(LearnerConfig::Spec).collect();
    }
    if let Some(c) = &args.comparator {
        config.comparator = Some(c.clone());
    }
    if !args.bounds.is_empty() {
        config.bounds = args.bounds.clone();
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(policy) = &args.on_divergence {
        config.on_divergence = policy.parse::<DivergenceMode>()?;
    }
    config.bits |= args.bits;
    if args.out_csv.is_some() {
        config.out_csv = args.out_csv.clone();
    }
    if args.out_json.is_some() {
        config.out_json = args.out_json.clone();
    }
    Ok(config)
}

fn run(args: &RunArgs, table: bool) -> anyhow::Result<bool> {
    let mut config = experiment_config(args)?;
    if table && config.bounds.is_empty() {
        config.bounds = Bound::ALL.iter().map(|b| b.name().to_string()).collect();
    }
    let artifact = run_experiment(&config)?;
    write_artifacts(&artifact, config.out_csv.as_deref(), config.out_json.as_deref())?;
    let mut stdout = std::io::stdout().lock();
    if table {
        stdout.write_all(comparison_table(&artifact).as_bytes())?;
    } else if config.out_json.is_none() {
        stdout.write_all(summary_json(&artifact)?.as_bytes())?;
    }
    Ok(artifact.bounds_hold())
}

fn generate(args: &GenArgs) -> anyhow::Result<()> {
    let spec = args.generator.parse::<GeneratorSpec>()?.with_seed(args.seed);
    let stream = spec.generate()?;
    match &args.out {
        Some(path) => write_stream(&stream, path)?,
        None if args.csv => write_stream_csv(&stream, std::io::stdout().lock())?,
        None => write_jsonl(&stream, std::io::stdout().lock())?,
    }
    Ok(())
}

fn bound(args: &BoundArgs) -> anyhow::Result<()> {
    let which: Bound = args.bound.parse()?;
    let params = BoundParams {
        horizon: args.horizon,
        experts: args.experts,
        best_set: args.best_set,
        segments: args.segments,
        eta: args.eta,
        eta_bar: args.eta_bar,
        c1: args.c1,
        c2: args.c2,
        max_cumulative_sq: args.max_cumulative_sq,
        prior_weight: args.prior_weight,
    };
    println!("{which}: {}", theoretical_bound(which, &params)?);
    Ok(())
}

fn verify(args: &VerifyArgs) -> anyhow::Result<bool> {
    let mut ok = true;
    for check in all_lemma_checks(args.samples, args.seed) {
        let status = if check.passed() { "PASS" } else { "FAIL" };
        println!(
            "{status} {:<24} samples={} violations={} max_excess={:e}",
            check.name, check.samples, check.violations, check.max_excess
        );
        ok &= check.passed();
    }
    for n in [2usize, 3, 5] {
        for c in [1.0, n as f64 / 2.0, n as f64] {
            let mut worst: f64 = 0.0;
            for k in 0..20 {
                let symbols = random_symbols(n, 1000, args.seed.wrapping_add(k));
                worst = worst.max(disjoint_equivalence_gap(&symbols, n, c)?);
            }
            let passed = worst <= 1e-12;
            let status = if passed { "PASS" } else { "FAIL" };
            println!("{status} disjoint-equivalence     N={n} c={c} max_gap={worst:e}");
            ok &= passed;
        }
    }
    if args.samples == 0 {
        bail!("--samples must be positive");
    }
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Run(args) => run(args, false),
        Command::Compare(args) => run(args, true),
        Command::Gen(args) => generate(args).map(|_| true),
        Command::Bound(args) => bound(args).map(|_| true),
        Command::Verify(args) => verify(args),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
