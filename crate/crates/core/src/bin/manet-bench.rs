use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use manet_core::error::{Error, Result};
use manet_core::exec::default_workers;
use manet_core::harness::reference::{self, Source};
use manet_core::harness::{
    compare_samples, compare_summaries, parse_finals, parse_grades, parse_id_list, Algorithm, CampaignConfig,
    DEFAULT_BUDGET_MULTIPLIER, DEFAULT_INSTANCE_SEED, DEFAULT_RUNS,
};

/// Runs MaNet or jSO on the benchmark suite and writes summary tables.
#[derive(Debug, Parser)]
#[command(name = "manet-bench", version)]
struct Cli {
    /// Optimizer to run: manet or jso.
    #[arg(long, default_value = "manet")]
    algo: String,
    /// Function ids, e.g. 1,3-10.
    #[arg(long, default_value = "1,3-10")]
    funcs: String,
    /// Problem dimensions, e.g. 30,50.
    #[arg(long, default_value = "30,50")]
    dims: String,
    /// Independent runs per function.
    #[arg(long, default_value_t = DEFAULT_RUNS)]
    runs: usize,
    /// Base seed; run r uses seed + r.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Seed of the shifted/rotated problem instances.
    #[arg(long, default_value_t = DEFAULT_INSTANCE_SEED)]
    instance_seed: u64,
    /// Evaluation budget per run is this multiplier times D.
    #[arg(long, default_value_t = DEFAULT_BUDGET_MULTIPLIER)]
    budget_multiplier: u64,
    /// Output directory.
    #[arg(long, default_value = "results")]
    out: PathBuf,
    /// Worker threads for independent trials.
    #[arg(long)]
    workers: Option<usize>,
    /// Adam learning rate (MaNet).
    #[arg(long)]
    lr: Option<f64>,
    /// Epochs without improvement before a restart (MaNet).
    #[arg(long)]
    patience: Option<u32>,
    /// Compare the results with the published jSO statistics.
    #[arg(long)]
    compare_ref: bool,
    /// Compare the results with the finals of a jso campaign under this directory.
    #[arg(long, value_name = "DIR")]
    compare_local: Option<PathBuf>,
    /// Skip running; compare an existing grades.csv with the published jSO statistics.
    #[arg(long, value_name = "FILE")]
    grades: Option<PathBuf>,
}

fn read(path: &PathBuf) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn compare_file(path: &PathBuf) -> Result<()> {
    let rows = parse_grades(&read(path)?)?;
    let mut dims: Vec<usize> = rows.iter().map(|r| r.dimension).collect();
    dims.dedup();
    for d in dims {
        let reference =
            reference::rows(Source::Jso, d).ok_or_else(|| Error::Config(format!("no reference for D={d}")))?;
        let cmp = compare_summaries(&rows, &reference)?;
        print!("{}", cmp.render(&format!("{} vs published jSO, D={d}", path.display())));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    if let Some(path) = &cli.grades {
        return compare_file(path);
    }
    let algorithm: Algorithm = cli.algo.parse()?;
    let mut cfg = CampaignConfig::new(algorithm, &cli.out);
    cfg.functions = parse_id_list(&cli.funcs)?;
    cfg.dimensions = parse_id_list(&cli.dims)?;
    cfg.runs = cli.runs;
    cfg.base_seed = cli.seed;
    cfg.instance_seed = cli.instance_seed;
    cfg.budget_multiplier = cli.budget_multiplier;
    cfg.learning_rate = cli.lr;
    cfg.patience = cli.patience;
    cfg.workers = cli.workers.unwrap_or_else(default_workers);

    let output = manet_core::harness::run_campaign(&cfg)?;
    for (d, dir, rows) in &output.dimensions {
        println!("{} D={d}: {} rows -> {}", algorithm, rows.len(), dir.join("grades.csv").display());
        if cli.compare_ref {
            let reference = reference::rows(Source::Jso, *d).expect("supported dimension");
            let report = compare_summaries(rows, &reference)?.render(&format!("{algorithm} vs published jSO, D={d}"));
            fs::write(dir.join("compare_ref.txt"), &report).map_err(|e| Error::Io(e.to_string()))?;
            print!("{report}");
        }
        if let Some(other_root) = &cli.compare_local {
            let other = other_root.join("jso").join(format!("D{d}")).join("finals.csv");
            let local = parse_finals(&read(&dir.join("finals.csv"))?)?;
            let theirs = parse_finals(&read(&other)?)?;
            let report = compare_samples(&local, &theirs, *d)?.render(&format!("{algorithm} vs local jSO, D={d}"));
            fs::write(dir.join("compare_local.txt"), &report).map_err(|e| Error::Io(e.to_string()))?;
            print!("{report}");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
