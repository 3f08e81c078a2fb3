//! jSO: success-history adaptive differential evolution with linear
//! population size reduction and weighted current-to-pBest/1 mutation.
//!
//! Per generation every target `x_i` produces a trial
//!
//! ```text
//! v = x_i + F_w·(x_pbest − x_i) + F·(x_r1 − x̃_r2)
//! ```
//!
//! with `x̃_r2` drawn from the population plus the archive of replaced
//! parents, followed by binomial crossover and midpoint bound repair.
//! `(F, CR)` come from an `H`-cell success memory updated with weighted
//! Lehmer means; the last cell is pinned to `(0.9, 0.9)`.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Cauchy, Distribution, Normal};

use crate::bench_suite::{EvalBudget, Problem, LOWER_BOUND, UPPER_BOUND};
use crate::error::{Error, Result};
use crate::record::{RunRecord, Tracker};
use crate::seed;

/// Algorithm constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JsoParams {
    pub np_init: usize,
    pub np_min: usize,
    pub memory_size: usize,
    pub memory_f_init: f64,
    pub memory_cr_init: f64,
    pub p_min: f64,
    pub p_max: f64,
}

impl JsoParams {
    pub fn for_dimension(dimension: usize) -> Self {
        let d = dimension as f64;
        Self {
            np_init: (25.0 * d.sqrt() * d.ln()).round().max(4.0) as usize,
            np_min: 4,
            memory_size: 5,
            memory_f_init: 0.3,
            memory_cr_init: 0.8,
            p_min: 0.125,
            p_max: 0.25,
        }
    }
}

/// Scale applied to `F` on the pBest difference, by fraction of budget spent.
pub fn mutation_weight(f: f64, fes_ratio: f64) -> f64 {
    if fes_ratio < 0.2 {
        0.7 * f
    } else if fes_ratio < 0.4 {
        0.8 * f
    } else {
        1.2 * f
    }
}

/// Linear population size reduction: target size after `fes` evaluations.
pub fn population_size(np_init: usize, np_min: usize, fes: u64, max_fes: u64) -> usize {
    if max_fes == 0 {
        return np_min;
    }
    let ratio = (fes as f64 / max_fes as f64).min(1.0);
    let np = np_init as f64 + (np_min as f64 - np_init as f64) * ratio;
    (np.round() as usize).clamp(np_min, np_init)
}

/// Historical memory of successful control parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct SuccessMemory {
    f: Vec<f64>,
    /// `None` is the terminal marker: that cell yields `CR = 0` forever.
    cr: Vec<Option<f64>>,
    next: usize,
}

const PINNED: f64 = 0.9;

impl SuccessMemory {
    pub fn new(size: usize, f_init: f64, cr_init: f64) -> Self {
        assert!(size >= 2, "memory needs a free cell besides the pinned one");
        let mut f = vec![f_init; size];
        let mut cr = vec![Some(cr_init); size];
        f[size - 1] = PINNED;
        cr[size - 1] = Some(PINNED);
        Self { f, cr, next: 0 }
    }

    pub fn f(&self) -> &[f64] {
        &self.f
    }

    pub fn cr(&self) -> &[Option<f64>] {
        &self.cr
    }

    /// Raw `(μF, μCR)` of a random cell.
    fn pick(&self, rng: &mut ChaCha8Rng) -> (f64, Option<f64>) {
        let r = rng.random_range(0..self.f.len());
        (self.f[r], self.cr[r])
    }

    /// Writes the weighted Lehmer means of a generation's successes into the
    /// current cell, averaged with its old content, and advances the cursor
    /// over the non-pinned cells.
    pub fn update(&mut self, s_f: &[f64], s_cr: &[f64], gains: &[f64]) {
        if s_f.is_empty() {
            return;
        }
        let total: f64 = gains.iter().sum();
        if total <= 0.0 {
            return;
        }
        let k = self.next;
        let lehmer = |s: &[f64]| {
            let num: f64 = s.iter().zip(gains).map(|(v, g)| g / total * v * v).sum();
            let den: f64 = s.iter().zip(gains).map(|(v, g)| g / total * v).sum();
            if den > 0.0 {
                Some(num / den)
            } else {
                None
            }
        };
        if let Some(mf) = lehmer(s_f) {
            self.f[k] = ((mf + self.f[k]) / 2.0).clamp(0.0, 1.0);
        }
        self.cr[k] = match self.cr[k] {
            None => None,
            Some(old) => {
                let max_cr = s_cr.iter().cloned().fold(0.0, f64::max);
                if max_cr == 0.0 {
                    None
                } else {
                    lehmer(s_cr).map(|m| ((m + old) / 2.0).clamp(0.0, 1.0))
                }
            }
        };
        self.next = (self.next + 1) % (self.f.len() - 1);
    }
}

/// `(F, CR)` for one trial, including the stage-dependent clamps.
fn sample_controls(memory: &SuccessMemory, fes_ratio: f64, rng: &mut ChaCha8Rng) -> (f64, f64) {
    let (mu_f, mu_cr) = memory.pick(rng);
    let mut cr = match mu_cr {
        None => 0.0,
        Some(m) => Normal::new(m, 0.1)
            .expect("positive spread")
            .sample(rng)
            .clamp(0.0, 1.0),
    };
    if fes_ratio < 0.25 {
        cr = cr.max(0.7);
    } else if fes_ratio < 0.5 {
        cr = cr.max(0.6);
    }
    let cauchy = Cauchy::new(mu_f, 0.1).expect("positive scale");
    let mut f = cauchy.sample(rng);
    while f <= 0.0 {
        f = cauchy.sample(rng);
    }
    f = f.min(1.0);
    if fes_ratio < 0.6 {
        f = f.min(0.7);
    }
    (f, cr)
}

#[derive(Debug, Clone)]
struct Individual {
    x: Vec<f64>,
    cost: f64,
}

/// Runs jSO on `objective` until `budget` is spent.
pub fn jso_run<P: Problem + ?Sized>(objective: &P, mut budget: EvalBudget, seed: u64) -> Result<RunRecord> {
    let d = objective.dimension();
    let params = JsoParams::for_dimension(d);
    jso_run_with(objective, &mut budget, &params, seed)
}

pub fn jso_run_with<P: Problem + ?Sized>(
    objective: &P,
    budget: &mut EvalBudget,
    params: &JsoParams,
    seed: u64,
) -> Result<RunRecord> {
    let d = objective.dimension();
    let max_fes = budget.max_fes();
    let mut rng = seed::rng(seed::derive(seed, seed::stream::JSO));
    let mut tracker = Tracker::new(d);
    let mut memory = SuccessMemory::new(params.memory_size, params.memory_f_init, params.memory_cr_init);

    let mut pop: Vec<Individual> = Vec::with_capacity(params.np_init);
    for _ in 0..params.np_init {
        if budget.is_exhausted() {
            break;
        }
        let x: Vec<f64> = (0..d)
            .map(|_| rng.random_range(LOWER_BOUND..=UPPER_BOUND))
            .collect();
        let cost = objective.evaluate(&x, budget)?;
        tracker.observe(&x, cost, budget.used());
        pop.push(Individual { x, cost });
    }
    let mut archive: Vec<Vec<f64>> = Vec::new();
    let mut generations = 0u64;

    while !budget.is_exhausted() && pop.len() >= 4 {
        generations += 1;
        let np = pop.len();
        let ratio = budget.progress();
        let mut ranked: Vec<usize> = (0..np).collect();
        ranked.sort_by(|&a, &b| pop[a].cost.total_cmp(&pop[b].cost));
        let p = params.p_min + (params.p_max - params.p_min) * ratio;
        let n_best = ((p * np as f64).round() as usize).clamp(2, np);

        let mut trials: Vec<(Vec<f64>, f64, f64)> = Vec::with_capacity(np);
        for i in 0..np {
            let (f, cr) = sample_controls(&memory, ratio, &mut rng);
            let fw = mutation_weight(f, ratio);
            let pbest = ranked[rng.random_range(0..n_best)];
            let r1 = loop {
                let r = rng.random_range(0..np);
                if r != i {
                    break r;
                }
            };
            let r2 = loop {
                let r = rng.random_range(0..np + archive.len());
                if r != i && r != r1 {
                    break r;
                }
            };
            let xi = &pop[i].x;
            let xp = &pop[pbest].x;
            let x1 = &pop[r1].x;
            let x2 = if r2 < np { &pop[r2].x } else { &archive[r2 - np] };
            let j_rand = rng.random_range(0..d);
            let mut u = xi.clone();
            for j in 0..d {
                if j == j_rand || rng.random::<f64>() < cr {
                    let mut v = xi[j] + fw * (xp[j] - xi[j]) + f * (x1[j] - x2[j]);
                    if v < LOWER_BOUND {
                        v = (LOWER_BOUND + xi[j]) / 2.0;
                    } else if v > UPPER_BOUND {
                        v = (UPPER_BOUND + xi[j]) / 2.0;
                    }
                    u[j] = v;
                }
            }
            trials.push((u, f, cr));
        }

        let mut s_f = Vec::new();
        let mut s_cr = Vec::new();
        let mut gains = Vec::new();
        for (i, (u, f, cr)) in trials.into_iter().enumerate() {
            if budget.is_exhausted() {
                break;
            }
            let cost = objective.evaluate(&u, budget)?;
            tracker.observe(&u, cost, budget.used());
            if cost < pop[i].cost {
                s_f.push(f);
                s_cr.push(cr);
                gains.push(pop[i].cost - cost);
                let old = std::mem::replace(&mut pop[i], Individual { x: u, cost });
                archive.push(old.x);
            } else if cost == pop[i].cost {
                pop[i] = Individual { x: u, cost };
            }
        }
        memory.update(&s_f, &s_cr, &gains);

        let target = population_size(params.np_init, params.np_min, budget.used(), max_fes);
        if target < pop.len() {
            pop.sort_by(|a, b| a.cost.total_cmp(&b.cost));
            pop.truncate(target);
        }
        while archive.len() > pop.len() {
            let idx = rng.random_range(0..archive.len());
            archive.swap_remove(idx);
        }
    }

    if budget.used() == 0 {
        return Err(Error::Config("budget allows no evaluations".into()));
    }
    let mut metadata = BTreeMap::new();
    metadata.insert("algorithm".into(), "jso".into());
    metadata.insert("seed".into(), seed.to_string());
    metadata.insert("np_init".into(), params.np_init.to_string());
    metadata.insert("np_min".into(), params.np_min.to_string());
    metadata.insert("memory_size".into(), params.memory_size.to_string());
    metadata.insert("memory_f_init".into(), params.memory_f_init.to_string());
    metadata.insert("memory_cr_init".into(), params.memory_cr_init.to_string());
    metadata.insert("p_range".into(), format!("{}..{}", params.p_min, params.p_max));
    metadata.insert("generations".into(), generations.to_string());
    Ok(tracker.finish(budget.used(), 0, metadata))
}
