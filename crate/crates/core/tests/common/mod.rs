//! Independent numerical oracles shared by the integration tests.
#![allow(dead_code)]

use manet_core::autodiff::{Array, Model, INPUT_SIDE};
use manet_core::bench_suite::{Function, Objective};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Central difference of `f` along coordinate `i` with step `h`.
pub fn central<F: Fn(&[f64]) -> f64>(f: &F, x: &[f64], i: usize, h: f64) -> f64 {
    let mut p = x.to_vec();
    let mut m = x.to_vec();
    p[i] += h;
    m[i] -= h;
    (f(&p) - f(&m)) / (2.0 * h)
}

/// Finite-difference gradient of an objective, or `None` when a kink lies
/// within the stencil of some coordinate. Central differences at `h` and
/// `h/2` agree to O(h²) on smooth pieces and disagree across a kink.
pub fn fd_gradient(obj: &Objective, x: &[f64], h: f64) -> Option<Vec<f64>> {
    let f = |p: &[f64]| obj.value(p).unwrap();
    let mut g = Vec::with_capacity(x.len());
    let mut gap: f64 = 0.0;
    for i in 0..x.len() {
        let c = central(&f, x, i, h);
        gap = gap.max((c - central(&f, x, i, h / 2.0)).abs());
        g.push(c);
    }
    let scale = g.iter().map(|v| v.abs()).fold(0.0, f64::max);
    (gap <= 1e-6 * scale.max(1e-12)).then_some(g)
}

/// `max |a - b| / max(max |b|, tiny)`.
pub fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let num = a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let den = b.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1e-12);
    num / den
}

pub fn uniform(rng: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(lo..hi)).collect()
}

/// A random point where the non-smooth functions are differentiable in the
/// ordinary sense. For the non-continuous Rastrigin that means every inner
/// coordinate stays inside the unrounded band `|z| < 0.5`.
pub fn sample_point(obj: &Objective, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let d = obj.dimension();
    if obj.function() != Function::NonContinuousRastrigin {
        return uniform(rng, d, -100.0, 100.0);
    }
    let z = uniform(rng, d, -0.499, 0.499);
    let mut y = vec![0.0; d];
    obj.transform().rotation.apply_transpose(&z, &mut y);
    let scale = obj.function().scale();
    y.iter().zip(obj.shift()).map(|(yi, oi)| oi + yi / scale).collect()
}

/// Central-difference step used by the gradient checks.
pub const FD_STEP: f64 = 1e-5;

/// `(points compared, points within tol, worst relative error)` over
/// `points` samples; points with a kink inside the stencil are skipped.
pub fn gradient_agreement(obj: &Objective, points: usize, seed: u64, tol: f64) -> (usize, usize, f64) {
    let mut rng = manet_core::seed::rng(seed);
    let (mut compared, mut ok, mut worst) = (0, 0, 0.0f64);
    for _ in 0..points {
        let x = sample_point(obj, &mut rng);
        let Some(fd) = fd_gradient(obj, &x, FD_STEP) else { continue };
        let g = obj.gradient(&x).unwrap();
        let e = rel_err(&g, &fd);
        compared += 1;
        worst = worst.max(e);
        if e <= tol {
            ok += 1;
        }
    }
    (compared, ok, worst)
}

pub fn random_sample(rng: &mut ChaCha8Rng) -> Array {
    Array::new(vec![INPUT_SIDE, INPUT_SIDE, 1], uniform(rng, INPUT_SIDE * INPUT_SIDE, -1.0, 1.0)).unwrap()
}

/// Finite-difference gradient of `upstream · model(sample)` over every
/// parameter, in `Model::tensors` order.
pub fn fd_model_gradient(model: &Model, sample: &Array, upstream: &[f64]) -> Vec<f64> {
    let loss = |m: &Model| -> f64 { m.predict(sample).unwrap().iter().zip(upstream).map(|(a, b)| a * b).sum() };
    let mut out = Vec::with_capacity(model.parameter_count());
    let sizes: Vec<usize> = model.tensors().iter().map(|t| t.len()).collect();
    let mut probe = model.clone();
    for (t, &len) in sizes.iter().enumerate() {
        for k in 0..len {
            let orig = probe.tensors()[t][k];
            let h = 1e-5 * orig.abs().max(1.0);
            probe.tensors_mut()[t][k] = orig + h;
            let lp = loss(&probe);
            probe.tensors_mut()[t][k] = orig - h;
            let lm = loss(&probe);
            probe.tensors_mut()[t][k] = orig;
            out.push((lp - lm) / (2.0 * h));
        }
    }
    out
}

pub fn flatten(model: &Model) -> Vec<f64> {
    model.tensors().iter().flat_map(|t| t.iter().copied()).collect()
}

/// Mid-ranks by counting: rank = #smaller + (#equal + 1) / 2.
pub fn oracle_ranks(v: &[f64]) -> Vec<f64> {
    v.iter()
        .map(|x| {
            let less = v.iter().filter(|y| *y < x).count() as f64;
            let equal = v.iter().filter(|y| *y == x).count() as f64;
            less + (equal + 1.0) / 2.0
        })
        .collect()
}

/// Two-sided exact p by enumerating every subset of the pooled sample.
pub fn oracle_p(a: &[f64], b: &[f64]) -> f64 {
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let ranks = oracle_ranks(&pooled);
    let n = pooled.len();
    let n1 = a.len();
    let mean = n1 as f64 * (n as f64 + 1.0) / 2.0;
    let observed: f64 = ranks[..n1].iter().sum();
    let dev = (observed - mean).abs();
    let (mut hits, mut total) = (0u64, 0u64);
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != n1 {
            continue;
        }
        let w: f64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| ranks[i]).sum();
        total += 1;
        if (w - mean).abs() >= dev - 1e-9 {
            hits += 1;
        }
    }
    hits as f64 / total as f64
}

pub fn random_instance(rng: &mut impl Rng) -> (Vec<f64>, Vec<f64>) {
    let tied = rng.random_bool(0.5);
    instance(rng, tied)
}

pub fn instance(rng: &mut impl Rng, tied: bool) -> (Vec<f64>, Vec<f64>) {
    let n1 = rng.random_range(1..=8);
    let n2 = rng.random_range(1..=8);
    let shift = rng.random_range(0.0..3.0);
    let mut draw = |offset: f64| {
        let v: f64 = rng.random_range(0.0..4.0) + offset;
        if tied {
            v.round()
        } else {
            v
        }
    };
    let a = (0..n1).map(|_| draw(0.0)).collect();
    let b = (0..n2).map(|_| draw(shift)).collect();
    (a, b)
}
