//! Experiment campaigns: runs trials, writes traces and summary tables, and
//! compares results against the published reference tables.

mod compare;
pub mod reference;

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use crate::bench_suite::{EvalBudget, Function, Objective};
use crate::error::{Error, Result};
use crate::exec;
use crate::jso::{jso_run, JsoParams};
use crate::manet::{optimize, ManetConfig};
use crate::record::RunRecord;
use crate::stats::{summarize, Summary};

pub use compare::{compare_samples, compare_summaries, Comparison, ComparisonRow, SYNTHETIC_RUNS};

pub const GRADES_HEADER: &str = "function,dimension,best,worst,mean,median,std";
pub const SUPPORTED_DIMENSIONS: [usize; 2] = [30, 50];
pub const DEFAULT_RUNS: usize = 51;
pub const DEFAULT_BUDGET_MULTIPLIER: u64 = 10_000;
/// Seed of the shift/rotation instances; shared by every run and algorithm
/// so that campaigns stay comparable.
pub const DEFAULT_INSTANCE_SEED: u64 = 2017;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Manet,
    Jso,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Manet => "manet",
            Algorithm::Jso => "jso",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "manet" => Ok(Algorithm::Manet),
            "jso" => Ok(Algorithm::Jso),
            other => Err(Error::Config(format!("unknown algorithm {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignConfig {
    pub algorithm: Algorithm,
    pub functions: Vec<usize>,
    pub dimensions: Vec<usize>,
    pub runs: usize,
    /// Run `r` uses seed `base_seed + r`.
    pub base_seed: u64,
    pub instance_seed: u64,
    pub budget_multiplier: u64,
    pub out_dir: PathBuf,
    pub learning_rate: Option<f64>,
    pub patience: Option<u32>,
    pub workers: usize,
}

impl CampaignConfig {
    /// Full protocol defaults: every function, both dimensions, 51 runs.
    pub fn new(algorithm: Algorithm, out_dir: impl Into<PathBuf>) -> Self {
        Self {
            algorithm,
            functions: Function::ALL.iter().map(|f| f.id()).collect(),
            dimensions: SUPPORTED_DIMENSIONS.to_vec(),
            runs: DEFAULT_RUNS,
            base_seed: 0,
            instance_seed: DEFAULT_INSTANCE_SEED,
            budget_multiplier: DEFAULT_BUDGET_MULTIPLIER,
            out_dir: out_dir.into(),
            learning_rate: None,
            patience: None,
            workers: exec::default_workers(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(Error::Config("runs must be at least 1".into()));
        }
        if self.functions.is_empty() || self.dimensions.is_empty() {
            return Err(Error::Config("no functions or dimensions selected".into()));
        }
        for &f in &self.functions {
            Function::from_id(f)?;
        }
        for &d in &self.dimensions {
            if !SUPPORTED_DIMENSIONS.contains(&d) {
                return Err(Error::Config(format!("dimension {d} is not one of 30, 50")));
            }
        }
        if self.budget_multiplier == 0 {
            return Err(Error::Config("budget multiplier must be positive".into()));
        }
        if self.workers == 0 {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        for d in &self.dimensions {
            self.manet_config(*d).validate()?;
        }
        Ok(())
    }

    pub fn max_fes(&self, dimension: usize) -> u64 {
        self.budget_multiplier * dimension as u64
    }

    pub fn manet_config(&self, dimension: usize) -> ManetConfig {
        let mut cfg = ManetConfig::for_dimension(dimension);
        cfg.max_fes = self.max_fes(dimension);
        if let Some(lr) = self.learning_rate {
            cfg.learning_rate = lr;
        }
        if let Some(p) = self.patience {
            cfg.patience = p;
        }
        cfg
    }

    /// Directory holding the outputs for one dimension.
    pub fn dimension_dir(&self, dimension: usize) -> PathBuf {
        self.out_dir.join(self.algorithm.name()).join(format!("D{dimension}"))
    }
}

/// Parses a function list such as `1,3-10`.
pub fn parse_id_list(list: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for part in list.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let num = |s: &str| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad number {s:?} in list {list:?}")))
        };
        match part.split_once('-') {
            Some((lo, hi)) => {
                let (lo, hi) = (num(lo)?, num(hi)?);
                if lo > hi {
                    return Err(Error::Parse(format!("empty range {part:?}")));
                }
                out.extend(lo..=hi);
            }
            None => out.push(num(part)?),
        }
    }
    if out.is_empty() {
        return Err(Error::Parse(format!("empty list {list:?}")));
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// One finished trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub function: usize,
    pub dimension: usize,
    pub run: usize,
    pub seed: u64,
    pub record: RunRecord,
}

/// Runs a single trial of the configured algorithm.
pub fn run_trial(cfg: &CampaignConfig, objective: &Objective, run: usize) -> Result<TrialResult> {
    let dimension = objective.dimension();
    let seed = cfg.base_seed + run as u64;
    let record = match cfg.algorithm {
        Algorithm::Manet => optimize(objective, &cfg.manet_config(dimension), seed)?,
        Algorithm::Jso => jso_run(objective, EvalBudget::new(cfg.max_fes(dimension)), seed)?,
    };
    Ok(TrialResult {
        function: objective.id(),
        dimension,
        run,
        seed,
        record,
    })
}

/// Runs every (function, run) pair for one dimension, in deterministic order.
pub fn run_dimension(cfg: &CampaignConfig, dimension: usize) -> Result<Vec<TrialResult>> {
    let objectives: BTreeMap<usize, Objective> = cfg
        .functions
        .iter()
        .map(|&f| Ok((f, Objective::new(Function::from_id(f)?, dimension, cfg.instance_seed)?)))
        .collect::<Result<_>>()?;
    let jobs: Vec<(usize, usize)> = cfg
        .functions
        .iter()
        .flat_map(|&f| (0..cfg.runs).map(move |r| (f, r)))
        .collect();
    exec::map_trials(&jobs, cfg.workers, |&(f, r)| run_trial(cfg, &objectives[&f], r))
}

/// Summary row of `grades.csv`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradeRow {
    pub function: usize,
    pub dimension: usize,
    pub summary: Summary,
}

/// Output of a finished campaign.
#[derive(Debug, Clone, PartialEq)]
pub struct CampaignOutput {
    /// `(dimension, directory, summary rows)` per dimension.
    pub dimensions: Vec<(usize, PathBuf, Vec<GradeRow>)>,
}

/// Runs the campaign and writes, per dimension, `grades.csv`, `finals.csv`,
/// `meta.json` and one trace file per trial.
pub fn run_campaign(cfg: &CampaignConfig) -> Result<CampaignOutput> {
    cfg.validate()?;
    let mut dimensions = Vec::new();
    for &d in &cfg.dimensions {
        let dir = cfg.dimension_dir(d);
        fs::create_dir_all(&dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
        let trials = run_dimension(cfg, d)?;
        let rows = grade_rows(&trials)?;
        for t in &trials {
            write(&dir.join(trace_file_name(t.function, t.dimension, t.run)), &t.record.trace_csv())?;
        }
        write(&dir.join("finals.csv"), &finals_csv(&trials))?;
        write(&dir.join("grades.csv"), &grades_csv(&rows))?;
        write(&dir.join("meta.json"), &meta_json(cfg, d, &trials)?)?;
        dimensions.push((d, dir, rows));
    }
    Ok(CampaignOutput { dimensions })
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn trace_file_name(function: usize, dimension: usize, run: usize) -> String {
    format!("trace_F{function}_D{dimension}_run{run}.csv")
}

/// Per-function summaries, in order of first appearance.
pub fn grade_rows(trials: &[TrialResult]) -> Result<Vec<GradeRow>> {
    let mut order = Vec::new();
    let mut finals: BTreeMap<(usize, usize), Vec<f64>> = BTreeMap::new();
    for t in trials {
        let key = (t.function, t.dimension);
        if !finals.contains_key(&key) {
            order.push(key);
        }
        finals.entry(key).or_default().push(t.record.best_f);
    }
    order
        .into_iter()
        .map(|key| {
            Ok(GradeRow {
                function: key.0,
                dimension: key.1,
                summary: summarize(&finals[&key])?,
            })
        })
        .collect()
}

/// Lower-case scientific notation with two fractional digits and an
/// exponent of at least two digits, e.g. `5.85e-01`.
pub fn format_sci(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    let v = if v == 0.0 { 0.0 } else { v };
    let s = format!("{v:.2e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

pub fn grades_csv(rows: &[GradeRow]) -> String {
    let mut out = format!("{GRADES_HEADER}\n");
    for r in rows {
        let s = &r.summary;
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.function,
            r.dimension,
            format_sci(s.best),
            format_sci(s.worst),
            format_sci(s.mean),
            format_sci(s.median),
            format_sci(s.std)
        ));
    }
    out
}

/// Parses a `grades.csv` table. Columns are located by name; a missing
/// column is reported by name.
pub fn parse_grades(text: &str) -> Result<Vec<GradeRow>> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = reader.headers()?.clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Parse(format!("missing column \"{name}\"")))
    };
    let idx: Vec<usize> = GRADES_HEADER.split(',').map(column).collect::<Result<_>>()?;
    let names: Vec<&str> = GRADES_HEADER.split(',').collect();
    let mut rows = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        let field = |k: usize| -> Result<&str> {
            record
                .get(idx[k])
                .ok_or_else(|| Error::Parse(format!("row {}: missing value for \"{}\"", line + 1, names[k])))
        };
        let int = |k: usize| -> Result<usize> {
            let raw = field(k)?;
            raw.trim_start_matches(['F', 'f'])
                .parse()
                .map_err(|_| Error::Parse(format!("row {}: bad \"{}\" value {raw:?}", line + 1, names[k])))
        };
        let real = |k: usize| -> Result<f64> {
            let raw = field(k)?;
            raw.parse()
                .map_err(|_| Error::Parse(format!("row {}: bad \"{}\" value {raw:?}", line + 1, names[k])))
        };
        rows.push(GradeRow {
            function: int(0)?,
            dimension: int(1)?,
            summary: Summary {
                best: real(2)?,
                worst: real(3)?,
                mean: real(4)?,
                median: real(5)?,
                std: real(6)?,
            },
        });
    }
    Ok(rows)
}

pub const FINALS_HEADER: &str = "function,dimension,run,seed,best_f,fes_total,restarts";

/// Raw final costs at full precision, one line per trial.
pub fn finals_csv(trials: &[TrialResult]) -> String {
    let mut out = format!("{FINALS_HEADER}\n");
    for t in trials {
        out.push_str(&format!(
            "{},{},{},{},{:e},{},{}\n",
            t.function, t.dimension, t.run, t.seed, t.record.best_f, t.record.fes_total, t.record.restarts
        ));
    }
    out
}

/// Final costs per function from a `finals.csv` table.
pub fn parse_finals(text: &str) -> Result<BTreeMap<usize, Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = reader.headers()?.clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Parse(format!("missing column \"{name}\"")))
    };
    let (fi, vi) = (column("function")?, column("best_f")?);
    let mut out: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for record in reader.records() {
        let record = record?;
        let f = record
            .get(fi)
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Parse("bad \"function\" value".into()))?;
        let v = record
            .get(vi)
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Parse("bad \"best_f\" value".into()))?;
        out.entry(f).or_default().push(v);
    }
    Ok(out)
}

#[derive(Serialize)]
struct Meta<'a> {
    algorithm: Algorithm,
    dimension: usize,
    runs: usize,
    base_seed: u64,
    instance_seed: u64,
    budget_multiplier: u64,
    max_fes: u64,
    functions: &'a [usize],
    settings: BTreeMap<&'static str, String>,
    objectives: Vec<BTreeMap<&'static str, String>>,
    trials: Vec<TrialMeta<'a>>,
}

#[derive(Serialize)]
struct TrialMeta<'a> {
    function: usize,
    run: usize,
    seed: u64,
    best_f: f64,
    fes_total: u64,
    restarts: u32,
    metadata: &'a BTreeMap<String, String>,
}

fn meta_json(cfg: &CampaignConfig, dimension: usize, trials: &[TrialResult]) -> Result<String> {
    let mut settings = BTreeMap::new();
    match cfg.algorithm {
        Algorithm::Manet => {
            let m = cfg.manet_config(dimension);
            settings.insert("learning_rate", format!("{:e}", m.learning_rate));
            settings.insert("patience", m.patience.to_string());
            settings.insert("improvement_tol", format!("{:e}", m.improvement_tol));
            settings.insert("population_size", m.population_size.to_string());
            settings.insert("genotype_bound", format!("{:e}", m.genotype_bound));
            settings.insert("batch_sizes", "1,64".into());
            settings.insert("adam", "beta1=0.9 beta2=0.999 eps=1e-8".into());
        }
        Algorithm::Jso => {
            let p = JsoParams::for_dimension(dimension);
            settings.insert("np_init", p.np_init.to_string());
            settings.insert("np_min", p.np_min.to_string());
            settings.insert("memory_size", p.memory_size.to_string());
            settings.insert("memory_init", format!("F={} CR={}", p.memory_f_init, p.memory_cr_init));
            settings.insert("p_range", format!("{}..{}", p.p_min, p.p_max));
        }
    }
    let objectives = cfg
        .functions
        .iter()
        .map(|&f| {
            let obj = Objective::new(Function::from_id(f)?, dimension, cfg.instance_seed)?;
            let mut m = BTreeMap::new();
            m.insert("function", f.to_string());
            m.insert("name", obj.function().name().to_string());
            m.insert("scale", format!("{:e}", obj.function().scale()));
            m.insert(
                "transform_seed",
                obj.transform().seed.map_or_else(|| "none".into(), |s| s.to_string()),
            );
            Ok(m)
        })
        .collect::<Result<_>>()?;
    let meta = Meta {
        algorithm: cfg.algorithm,
        dimension,
        runs: cfg.runs,
        base_seed: cfg.base_seed,
        instance_seed: cfg.instance_seed,
        budget_multiplier: cfg.budget_multiplier,
        max_fes: cfg.max_fes(dimension),
        functions: &cfg.functions,
        settings,
        objectives,
        trials: trials
            .iter()
            .map(|t| TrialMeta {
                function: t.function,
                run: t.run,
                seed: t.seed,
                best_f: t.record.best_f,
                fes_total: t.record.fes_total,
                restarts: t.record.restarts,
                metadata: &t.record.metadata,
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&meta).map_err(|e| Error::Io(e.to_string()))?;
    text.push('\n');
    Ok(text)
}
