use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use vegnav::fewshot::{run_pipeline, write_loss_csv, write_params, PipelineConfig};
use vegnav::harness::{
    archive_from_json, archive_to_json, bundled_scenario, metrics_to_csv, run_batch, ScenarioSpec,
    BUNDLED_SCENARIOS,
};
use vegnav::invariants;
use vegnav::planner::Variant;

#[derive(Parser)]
#[command(name = "vegnav", version, about = "Vegetation-aware navigation trials")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run closed-loop trials and write the raw JSON archive.
    Run {
        /// Scenario TOML file or bundled scenario name; may be repeated.
        #[arg(long, required = true)]
        scenario: Vec<String>,
        /// Planner variant; may be repeated. Defaults to all variants.
        #[arg(long)]
        variant: Vec<Variant>,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Also write the metrics table here.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Summarize an archive written by `run`.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Train the few-shot embedder on synthetic descriptors.
    TrainFewshot {
        #[arg(long, default_value_t = 4)]
        classes: usize,
        #[arg(long, default_value_t = 600)]
        per_class: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file for the trained parameters.
        #[arg(long)]
        out: PathBuf,
        /// Loss curve CSV; defaults to the parameter path with its extension replaced by `loss.csv`.
        #[arg(long)]
        loss: Option<PathBuf>,
    },
    /// Run the runtime property checks.
    CheckInvariants {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

fn load_scenario(arg: &str) -> Result<ScenarioSpec> {
    let path = Path::new(arg);
    if path.exists() {
        return ScenarioSpec::load(path).with_context(|| format!("loading {arg}"));
    }
    if BUNDLED_SCENARIOS.iter().any(|(name, _)| *name == arg) {
        return Ok(bundled_scenario(arg)?);
    }
    let names: Vec<&str> = BUNDLED_SCENARIOS.iter().map(|(n, _)| *n).collect();
    bail!("{arg:?} is neither a file nor a bundled scenario ({})", names.join(", "))
}

fn run(
    scenarios: &[String],
    variants: &[Variant],
    trials: usize,
    seed: u64,
    out: &Path,
    csv: Option<&Path>,
) -> Result<()> {
    let specs = scenarios.iter().map(|s| load_scenario(s)).collect::<Result<Vec<_>>>()?;
    let variants = if variants.is_empty() { &Variant::ALL[..] } else { variants };
    let archive = run_batch(&specs, variants, trials, seed)?;
    fs::write(out, archive_to_json(&archive)?).with_context(|| format!("writing {}", out.display()))?;
    let table = metrics_to_csv(&archive.metrics());
    if let Some(path) = csv {
        fs::write(path, &table).with_context(|| format!("writing {}", path.display()))?;
    }
    print!("{table}");
    Ok(())
}

fn report(input: &Path, format: Format) -> Result<()> {
    let text = fs::read_to_string(input).with_context(|| format!("reading {}", input.display()))?;
    let archive = archive_from_json(&text)?;
    let metrics = archive.metrics();
    match format {
        Format::Csv => print!("{}", metrics_to_csv(&metrics)),
        Format::Json => println!("{}", serde_json::to_string_pretty(&metrics)?),
    }
    Ok(())
}

fn train_fewshot(classes: usize, per_class: usize, seed: u64, out: &Path, loss: Option<&Path>) -> Result<()> {
    let cfg = PipelineConfig {
        seed,
        ..PipelineConfig::default()
    };
    let outcome = run_pipeline(classes, per_class, &cfg)?;
    write_params(out, &outcome.training.params)?;
    let loss_path = loss.map_or_else(|| out.with_extension("loss.csv"), Path::to_path_buf);
    write_loss_csv(&loss_path, &outcome.training.loss_curve)?;
    let curve = &outcome.training.loss_curve;
    println!("loss {:.4} -> {:.4}", curve[0], curve[curve.len() - 1]);
    println!("held-out accuracy {:.4}", outcome.accuracy);
    Ok(())
}

fn check_invariants(seed: u64) -> bool {
    let mut ok = true;
    for r in invariants::run_all(seed) {
        match &r.violation {
            None => println!("ok    {} ({} cases)", r.name, r.cases),
            Some(v) => {
                ok = false;
                println!("FAIL  {}: {v}", r.name);
            }
        }
    }
    ok
}

fn main() -> Result<ExitCode> {
    match Cli::parse().command {
        Command::Run {
            scenario,
            variant,
            trials,
            seed,
            out,
            csv,
        } => run(&scenario, &variant, trials, seed, &out, csv.as_deref())?,
        Command::Report { input, format } => report(&input, format)?,
        Command::TrainFewshot {
            classes,
            per_class,
            seed,
            out,
            loss,
        } => train_fewshot(classes, per_class, seed, &out, loss.as_deref())?,
        Command::CheckInvariants { seed } => {
            if !check_invariants(seed) {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
