//! MaNet: a convolutional network whose filters are trained by gradient
//! descent so that it maps a fixed random population of 8×8 genotypes to
//! low-cost candidate solutions.
//!
//! Two copies of the network ("arms") are trained with batch sizes 1 and 64.
//! While the global best keeps improving the arms alternate epoch by epoch.
//! After `patience` epochs without improvement both arms are reinitialised
//! and only the arm with the better historical best is trained until it
//! stagnates in turn, at which point both arms are reset again and
//! alternation resumes.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::autodiff::{init_model, AdamConfig, AdamState, Array, Model, Tape, INPUT_SIDE};
use crate::bench_suite::{EvalBudget, Objective, LOWER_BOUND, UPPER_BOUND};
use crate::error::{Error, Result};
use crate::record::{RunRecord, Tracker};
use crate::seed;

pub const POPULATION_SIZE: usize = 5000;
pub const SAMPLE_LEN: usize = INPUT_SIDE * INPUT_SIDE;
pub const BATCH_SIZES: [usize; 2] = [1, 64];

/// Fixed genotype population. Never modified after creation.
#[derive(Debug, Clone, PartialEq)]
pub struct Population {
    samples: Vec<Array>,
    seed: u64,
}

impl Population {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn sample(&self, idx: usize) -> &Array {
        &self.samples[idx]
    }

    pub fn samples(&self) -> &[Array] {
        &self.samples
    }

    /// Little-endian bytes of every entry, for integrity checks.
    pub fn to_bytes(&self) -> Vec<u8> {
        self.samples
            .iter()
            .flat_map(|s| s.data().iter().flat_map(|v| v.to_le_bytes()))
            .collect()
    }
}

/// `POPULATION_SIZE` samples with entries uniform in `[-1, 1]`.
pub fn init_population(seed: u64) -> Population {
    init_population_sized(POPULATION_SIZE, 1.0, seed)
}

/// `size` samples with entries uniform in `[-bound, bound]`.
pub fn init_population_sized(size: usize, bound: f64, seed: u64) -> Population {
    let mut rng = seed::rng(seed::derive(seed, seed::stream::POPULATION));
    let samples = (0..size)
        .map(|_| {
            let data = (0..SAMPLE_LEN).map(|_| rng.random_range(-bound..=bound)).collect();
            Array::new(vec![INPUT_SIDE, INPUT_SIDE, 1], data).expect("fixed geometry")
        })
        .collect();
    Population { samples, seed }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ManetConfig {
    pub learning_rate: f64,
    /// Epochs without improvement of the global best before a restart.
    pub patience: u32,
    /// Minimum decrease of the global best that counts as improvement.
    pub improvement_tol: f64,
    pub population_size: usize,
    /// Genotype entries are drawn from `[-genotype_bound, genotype_bound]`.
    pub genotype_bound: f64,
    pub max_fes: u64,
}

impl ManetConfig {
    /// Defaults with the standard `10_000 × D` budget.
    pub fn for_dimension(dimension: usize) -> Self {
        Self {
            learning_rate: 1e-3,
            patience: 10,
            improvement_tol: 1e-10,
            population_size: POPULATION_SIZE,
            genotype_bound: 1.0,
            max_fes: EvalBudget::standard(dimension).max_fes(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.patience == 0 {
            return Err(Error::Config("patience must be at least 1".into()));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(Error::Config("learning rate must be positive".into()));
        }
        if self.population_size < BATCH_SIZES[1] {
            return Err(Error::Config(format!(
                "population must hold at least {} samples",
                BATCH_SIZES[1]
            )));
        }
        Ok(())
    }
}

/// Forward pass clamped to the search box, plus the straight-through mask
/// (1 where the raw output was inside the box, 0 where it was clipped).
pub fn decode(model: &Model, sample: &Array, tape: &mut Tape) -> Result<(Vec<f64>, Vec<f64>)> {
    let raw = model.forward(sample, tape)?;
    if raw.iter().any(|v| !v.is_finite()) {
        return Err(Error::DecodeOverflow);
    }
    let mask = raw
        .iter()
        .map(|v| if (LOWER_BOUND..=UPPER_BOUND).contains(v) { 1.0 } else { 0.0 })
        .collect();
    let x = raw.iter().map(|v| v.clamp(LOWER_BOUND, UPPER_BOUND)).collect();
    Ok((x, mask))
}

/// One network with its optimizer state.
#[derive(Debug, Clone)]
pub struct Arm {
    pub model: Model,
    pub adam: AdamState,
    pub batch_size: usize,
    /// Best cost found by this arm over the whole run.
    pub historical_best: f64,
    order: Vec<usize>,
    cursor: usize,
}

impl Arm {
    pub fn new(dimension: usize, batch_size: usize, adam: AdamConfig, seed: u64) -> Self {
        let model = init_model(dimension, seed);
        let adam = AdamState::new(&model, adam);
        Self {
            model,
            adam,
            batch_size,
            historical_best: f64::INFINITY,
            order: Vec::new(),
            cursor: 0,
        }
    }

    fn reinitialize(&mut self, seed: u64) {
        self.model = init_model(self.model.output_dim(), seed);
        self.adam = AdamState::new(&self.model, self.adam.config);
    }

    /// Reshuffles the visiting order for a new epoch.
    pub fn begin_epoch(&mut self, population: usize, seed: u64) {
        self.order = (0..population).collect();
        self.order.shuffle(&mut seed::rng(seed));
        self.cursor = 0;
    }

    /// Steps in one epoch over a population of `population` samples.
    pub fn steps_per_epoch(&self, population: usize) -> usize {
        population / self.batch_size
    }

    fn next_index(&mut self, population: usize) -> usize {
        if self.order.len() != population {
            self.order = (0..population).collect();
            self.cursor = 0;
        }
        let idx = self.order[self.cursor % self.order.len()];
        self.cursor += 1;
        idx
    }
}

/// How a training step ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepOutcome {
    /// Full batch evaluated and one Adam step applied.
    Updated,
    /// Budget ran out inside the batch; no update applied.
    Truncated,
}

/// Evaluates the next batch, records every candidate in `tracker` and applies
/// one Adam step on the mean batch cost.
pub fn train_step(
    arm: &mut Arm,
    population: &Population,
    objective: &Objective,
    budget: &mut EvalBudget,
    tracker: &mut Tracker,
) -> Result<StepOutcome> {
    if budget.is_exhausted() {
        return Err(Error::BudgetExhausted {
            max_fes: budget.max_fes(),
        });
    }
    let batch = arm.batch_size;
    let inv = 1.0 / batch as f64;
    let mut grads = arm.model.zeros_like();
    let mut tape = Tape::new();
    for _ in 0..batch {
        if budget.is_exhausted() {
            return Ok(StepOutcome::Truncated);
        }
        let idx = arm.next_index(population.len());
        let (x, mask) = decode(&arm.model, population.sample(idx), &mut tape)?;
        let (f, g) = objective.evaluate_with_gradient(&x, budget)?;
        tracker.observe(&x, f, budget.used());
        if f < arm.historical_best {
            arm.historical_best = f;
        }
        let upstream: Vec<f64> = g.iter().zip(&mask).map(|(gi, m)| gi * m * inv).collect();
        tape.backward_into(&arm.model, &upstream, &mut grads)?;
    }
    arm.adam.step(&mut arm.model, &grads)?;
    Ok(StepOutcome::Updated)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Schedule {
    Alternate { next: usize },
    Solo(usize),
}

/// Runs MaNet on `objective` until the evaluation budget is spent.
pub fn optimize(objective: &Objective, cfg: &ManetConfig, seed: u64) -> Result<RunRecord> {
    cfg.validate()?;
    let population = init_population_sized(cfg.population_size, cfg.genotype_bound, seed);
    optimize_with_population(objective, cfg, &population, seed)
}

/// [`optimize`] on a caller-supplied genotype population.
pub fn optimize_with_population(
    objective: &Objective,
    cfg: &ManetConfig,
    population: &Population,
    seed: u64,
) -> Result<RunRecord> {
    cfg.validate()?;
    if population.len() < BATCH_SIZES[1] {
        return Err(Error::Config(format!(
            "population must hold at least {} samples",
            BATCH_SIZES[1]
        )));
    }
    let dimension = objective.dimension();
    let adam = AdamConfig::with_learning_rate(cfg.learning_rate);
    let model_seed = |restart: u64, arm: usize| seed::derive(seed::derive(seed, restart), arm as u64 + 1);
    let mut arms = [
        Arm::new(dimension, BATCH_SIZES[0], adam, model_seed(0, 0)),
        Arm::new(dimension, BATCH_SIZES[1], adam, model_seed(0, 1)),
    ];
    let mut budget = EvalBudget::new(cfg.max_fes);
    let mut tracker = Tracker::new(dimension);
    let mut schedule = Schedule::Alternate { next: 0 };
    let mut reference_best = f64::INFINITY;
    let mut stalled = 0u32;
    let mut restarts = 0u32;
    let mut epoch = 0u64;

    while !budget.is_exhausted() {
        let active = match schedule {
            Schedule::Alternate { next } => next,
            Schedule::Solo(a) => a,
        };
        let arm = &mut arms[active];
        arm.begin_epoch(population.len(), seed::derive(seed::derive(seed, seed::stream::SHUFFLE), epoch));
        epoch += 1;
        let mut diverged = false;
        for _ in 0..arm.steps_per_epoch(population.len()) {
            if budget.is_exhausted() {
                break;
            }
            match train_step(arm, population, objective, &mut budget, &mut tracker) {
                Ok(StepOutcome::Updated) => {}
                Ok(StepOutcome::Truncated) => break,
                Err(Error::DecodeOverflow | Error::NonFiniteGradient) => {
                    diverged = true;
                    break;
                }
                Err(e) => return Err(e),
            }
        }

        if tracker.best_f() < reference_best - cfg.improvement_tol {
            reference_best = tracker.best_f();
            stalled = 0;
        } else {
            stalled += 1;
        }

        if diverged || stalled >= cfg.patience {
            restarts += 1;
            for (i, arm) in arms.iter_mut().enumerate() {
                arm.reinitialize(model_seed(restarts as u64, i));
            }
            schedule = match schedule {
                Schedule::Alternate { .. } => {
                    let better = if arms[1].historical_best < arms[0].historical_best { 1 } else { 0 };
                    Schedule::Solo(better)
                }
                Schedule::Solo(_) => Schedule::Alternate { next: 0 },
            };
            stalled = 0;
        } else if let Schedule::Alternate { next } = schedule {
            schedule = Schedule::Alternate { next: 1 - next };
        }
    }

    let mut metadata = BTreeMap::new();
    metadata.insert("algorithm".into(), "manet".into());
    metadata.insert("seed".into(), seed.to_string());
    metadata.insert("population_seed".into(), population.seed().to_string());
    metadata.insert("population_size".into(), population.len().to_string());
    metadata.insert("genotype_bound".into(), format!("{:e}", cfg.genotype_bound));
    metadata.insert("learning_rate".into(), format!("{:e}", cfg.learning_rate));
    metadata.insert("patience".into(), cfg.patience.to_string());
    metadata.insert("improvement_tol".into(), format!("{:e}", cfg.improvement_tol));
    metadata.insert("batch_sizes".into(), "1,64".into());
    metadata.insert("parameter_count".into(), arms[0].model.parameter_count().to_string());
    metadata.insert("epochs".into(), epoch.to_string());
    Ok(tracker.finish(budget.used(), restarts, metadata))
}
