mod common;

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use manet_core::autodiff::{init_model, AdamConfig, Model, Tape};
use manet_core::bench_suite::{EvalBudget, Function, Objective};
use manet_core::manet::{
    decode, init_population, init_population_sized, optimize, optimize_with_population, train_step, Arm,
    ManetConfig, StepOutcome, POPULATION_SIZE,
};
use manet_core::record::Tracker;

fn digest(bytes: &[u8]) -> u64 {
    let mut h = DefaultHasher::new();
    bytes.hash(&mut h);
    h.finish()
}

fn toy_config(dim: usize, max_fes: u64) -> ManetConfig {
    let mut cfg = ManetConfig::for_dimension(dim);
    cfg.max_fes = max_fes;
    cfg
}

#[test]
fn population_is_deterministic_and_unit_bounded() {
    let a = init_population(17);
    assert_eq!(a, init_population(17));
    assert_ne!(a, init_population(18));
    assert_eq!(a.len(), POPULATION_SIZE);
    for seed in [0, 17, 123_456] {
        let p = init_population(seed);
        let all: Vec<f64> = p.samples().iter().flat_map(|s| s.data().iter().copied()).collect();
        assert_eq!(all.len(), 320_000);
        assert!(all.iter().all(|v| (-1.0..=1.0).contains(v)));
        let mean = all.iter().sum::<f64>() / all.len() as f64;
        assert!(mean.abs() <= 0.01, "seed {seed}: mean {mean}");
        assert!(p.samples().iter().all(|s| s.shape() == [8, 8, 1]));
    }
}

#[test]
fn zero_model_decodes_to_origin() {
    let model = Model::zeros(30);
    let pop = init_population(1);
    let (x, mask) = decode(&model, pop.sample(0), &mut Tape::new()).unwrap();
    assert_eq!(x, vec![0.0; 30]);
    assert_eq!(mask, vec![1.0; 30]);
}

#[test]
fn out_of_box_outputs_are_clamped() {
    let mut model = Model::zeros(3);
    model.dense.bias_mut().copy_from_slice(&[150.0, -20.0, -250.0]);
    let pop = init_population(1);
    let (x, mask) = decode(&model, pop.sample(3), &mut Tape::new()).unwrap();
    assert_eq!(x, vec![100.0, -20.0, -100.0]);
    assert_eq!(mask, vec![0.0, 1.0, 0.0]);
}

#[test]
fn non_finite_output_is_an_overflow() {
    let mut model = Model::zeros(2);
    model.dense.bias_mut()[1] = f64::INFINITY;
    let pop = init_population(1);
    let err = decode(&model, pop.sample(0), &mut Tape::new()).unwrap_err();
    assert_eq!(err, manet_core::error::Error::DecodeOverflow);
}

#[test]
fn decoded_vectors_stay_in_the_box() {
    let pop = init_population_sized(100, 1.0, 5);
    let mut rng = manet_core::seed::rng(8);
    let mut tape = Tape::new();
    for k in 0..10_000u64 {
        let mut model = init_model(10, k);
        let blow_up = 10f64.powf(common::uniform(&mut rng, 1, 0.0, 4.0)[0]);
        model.scale(blow_up);
        let (x, _) = decode(&model, pop.sample((k % 100) as usize), &mut tape).unwrap();
        assert!(x.iter().all(|v| (-100.0..=100.0).contains(v)));
    }
}

#[test]
fn batch_sizes_consume_matching_evaluations() {
    let obj = Objective::new(Function::Rastrigin, 30, 0).unwrap();
    let pop = init_population_sized(128, 1.0, 0);
    for bs in [1, 64] {
        let mut arm = Arm::new(30, bs, AdamConfig::default(), 4);
        arm.begin_epoch(pop.len(), 9);
        let mut budget = EvalBudget::new(10_000);
        let mut tracker = Tracker::new(30);
        for step in 1..=2u64 {
            let before = tracker.best_f();
            let outcome = train_step(&mut arm, &pop, &obj, &mut budget, &mut tracker).unwrap();
            assert_eq!(outcome, StepOutcome::Updated);
            assert_eq!(budget.used(), step * bs as u64);
            assert!(tracker.best_f() <= before);
        }
        assert_eq!(arm.adam.step_count(), 2);
    }
}

#[test]
fn truncated_batch_skips_the_update() {
    let obj = Objective::new(Function::Levy, 30, 0).unwrap();
    let pop = init_population_sized(128, 1.0, 0);
    let mut arm = Arm::new(30, 64, AdamConfig::default(), 4);
    let before = arm.model.clone();
    let mut budget = EvalBudget::new(10);
    let mut tracker = Tracker::new(30);
    let outcome = train_step(&mut arm, &pop, &obj, &mut budget, &mut tracker).unwrap();
    assert_eq!(outcome, StepOutcome::Truncated);
    assert_eq!(budget.used(), 10);
    assert_eq!(arm.model, before);
    assert_eq!(arm.adam.step_count(), 0);
}

#[test]
fn toy_budget_is_used_exactly() {
    let obj = Objective::new(Function::SchafferF7, 30, 2).unwrap();
    let rec = optimize(&obj, &toy_config(30, 100), 7).unwrap();
    assert_eq!(rec.fes_total, 100);
    assert_eq!(rec.trace.last().unwrap().0, 100);
    assert_eq!(rec.trace.last().unwrap().1, rec.best_f);
    assert_eq!(obj.value(&rec.best_x).unwrap(), rec.best_f);
    for key in ["seed", "learning_rate", "parameter_count", "population_seed"] {
        assert!(rec.metadata.contains_key(key), "{key}");
    }
    assert_eq!(rec.metadata["parameter_count"], "1470");
}

#[test]
fn runs_are_reproducible_and_leave_the_population_alone() {
    let obj = Objective::new(Function::Rosenbrock, 30, 2).unwrap();
    let cfg = toy_config(30, 12_000);
    let pop = init_population(3);
    let hash = digest(&pop.to_bytes());
    let a = optimize_with_population(&obj, &cfg, &pop, 3).unwrap();
    assert_eq!(digest(&pop.to_bytes()), hash);
    let b = optimize_with_population(&obj, &cfg, &pop, 3).unwrap();
    assert_eq!(a, b);
    assert_eq!(a, optimize(&obj, &cfg, 3).unwrap());
    assert!(a.trace.windows(2).all(|w| w[0].0 < w[1].0 && w[0].1 >= w[1].1));
    assert!(a.best_x.iter().all(|v| (-100.0..=100.0).contains(v)));
}

#[test]
fn tiny_patience_forces_restarts() {
    let obj = Objective::new(Function::Schwefel, 30, 2).unwrap();
    let mut cfg = toy_config(30, 30_000);
    cfg.patience = 1;
    let rec = optimize(&obj, &cfg, 1).unwrap();
    assert!(rec.restarts >= 1);
    assert_eq!(rec.fes_total, 30_000);
}

#[test]
fn invalid_configs_are_rejected() {
    let obj = Objective::new(Function::Levy, 30, 0).unwrap();
    let mut cfg = toy_config(30, 100);
    cfg.patience = 0;
    assert!(optimize(&obj, &cfg, 0).is_err());
    let mut cfg = toy_config(30, 100);
    cfg.learning_rate = -1.0;
    assert!(optimize(&obj, &cfg, 0).is_err());
    let small = init_population_sized(10, 1.0, 0);
    assert!(optimize_with_population(&obj, &toy_config(30, 100), &small, 0).is_err());
}
