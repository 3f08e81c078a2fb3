//! Descriptive statistics and the two-sample Wilcoxon rank-sum test.

use std::fmt;

use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Default significance level.
pub const ALPHA: f64 = 0.05;

/// Largest per-side sample size handled by exact enumeration.
pub const EXACT_MAX: usize = 8;

/// Best, worst, mean, median and sample standard deviation of final costs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub best: f64,
    pub worst: f64,
    pub mean: f64,
    pub median: f64,
    pub std: f64,
}

pub fn summarize(values: &[f64]) -> Result<Summary> {
    if values.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let mean = sorted.iter().sum::<f64>() / n as f64;
    let std = if n > 1 {
        let ss: f64 = sorted.iter().map(|v| (v - mean).powi(2)).sum();
        (ss / (n - 1) as f64).sqrt()
    } else {
        0.0
    };
    Ok(Summary {
        best: sorted[0],
        worst: sorted[n - 1],
        mean,
        median: median_sorted(&sorted),
        std,
    })
}

fn median_sorted(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    median_sorted(&sorted)
}

/// Outcome of comparing sample `a` against sample `b` under minimization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    /// `a` is significantly better (lower).
    Better,
    Equal,
    /// `a` is significantly worse.
    Worse,
}

impl Sign {
    pub fn symbol(self) -> char {
        match self {
            Sign::Better => '+',
            Sign::Equal => '=',
            Sign::Worse => '-',
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Sign::Better => Sign::Worse,
            Sign::Equal => Sign::Equal,
            Sign::Worse => Sign::Better,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Exact,
    Normal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WilcoxonResult {
    /// Rank sum of the first sample.
    pub statistic: f64,
    /// Two-sided p-value.
    pub p_value: f64,
    pub sign: Sign,
    pub method: Method,
}

/// Ranks of `values` in the pooled ordering, ties sharing their mean rank.
pub fn mid_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // positions start..end hold ranks start+1..=end
        let rank = (start + 1 + end) as f64 / 2.0;
        for &k in &order[start..end] {
            ranks[k] = rank;
        }
        start = end;
    }
    ranks
}

fn check_samples(a: &[f64], b: &[f64]) -> Result<()> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySample);
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(Error::Parse("samples must be finite".into()));
    }
    Ok(())
}

fn pooled_ranks(a: &[f64], b: &[f64]) -> Vec<f64> {
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    mid_ranks(&pooled)
}

/// Exact two-sided test: enumerates the null distribution of the rank sum
/// of `a` over every way of assigning the pooled mid-ranks to `a`.
/// Returns `(rank sum of a, p)`.
pub fn rank_sum_exact(a: &[f64], b: &[f64]) -> Result<(f64, f64)> {
    check_samples(a, b)?;
    let ranks = pooled_ranks(a, b);
    let n1 = a.len();
    let n = ranks.len();
    // doubled mid-ranks are integers
    let doubled: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
    let observed: usize = doubled[..n1].iter().sum();
    let max_sum: usize = doubled.iter().sum();
    // ways[k][s]: subsets of size k with doubled rank sum s
    let mut ways = vec![vec![0u128; max_sum + 1]; n1 + 1];
    ways[0][0] = 1;
    for &r in &doubled {
        for k in (1..=n1).rev() {
            for s in (r..=max_sum).rev() {
                let add = ways[k - 1][s - r];
                ways[k][s] += add;
            }
        }
    }
    let center = n1 * (n + 1); // twice the null mean
    let dev = observed.abs_diff(center);
    let (mut extreme, mut total) = (0u128, 0u128);
    for (s, &count) in ways[n1].iter().enumerate() {
        total += count;
        if s.abs_diff(center) >= dev {
            extreme += count;
        }
    }
    Ok((observed as f64 / 2.0, (extreme as f64 / total as f64).min(1.0)))
}

/// Normal approximation with tie-corrected variance and continuity
/// correction. Returns `(rank sum of a, p)`.
pub fn rank_sum_normal(a: &[f64], b: &[f64]) -> Result<(f64, f64)> {
    check_samples(a, b)?;
    let ranks = pooled_ranks(a, b);
    let (n1, n2) = (a.len() as f64, b.len() as f64);
    let n = n1 + n2;
    let w: f64 = ranks[..a.len()].iter().sum();
    let mean = n1 * (n + 1.0) / 2.0;

    let mut sorted = ranks.clone();
    sorted.sort_by(f64::total_cmp);
    let mut ties = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i + 1;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        let t = (j - i) as f64;
        ties += t * t * t - t;
        i = j;
    }
    let var = n1 * n2 / 12.0 * ((n + 1.0) - ties / (n * (n - 1.0)));
    if var <= 0.0 {
        return Ok((w, 1.0));
    }
    let z = (((w - mean).abs() - 0.5) / var.sqrt()).max(0.0);
    let std_normal = Normal::new(0.0, 1.0).expect("unit normal");
    let p = (2.0 * (1.0 - std_normal.cdf(z))).min(1.0);
    Ok((w, p))
}

/// Two-sided rank-sum test of `a` against `b` at level `alpha`.
///
/// Uses exact enumeration when both samples have at most [`EXACT_MAX`]
/// entries and the normal approximation otherwise. The direction of a
/// significant result comes from the medians, or from the mean ranks when the
/// medians coincide.
pub fn wilcoxon_rank_sum(a: &[f64], b: &[f64], alpha: f64) -> Result<WilcoxonResult> {
    let method = if a.len() <= EXACT_MAX && b.len() <= EXACT_MAX {
        Method::Exact
    } else {
        Method::Normal
    };
    let (statistic, p_value) = match method {
        Method::Exact => rank_sum_exact(a, b)?,
        Method::Normal => rank_sum_normal(a, b)?,
    };
    let sign = if p_value < alpha {
        direction(a, b, statistic)
    } else {
        Sign::Equal
    };
    Ok(WilcoxonResult {
        statistic,
        p_value,
        sign,
        method,
    })
}

fn direction(a: &[f64], b: &[f64], rank_sum_a: f64) -> Sign {
    let (ma, mb) = (median(a), median(b));
    if ma < mb {
        return Sign::Better;
    }
    if ma > mb {
        return Sign::Worse;
    }
    let n = (a.len() + b.len()) as f64;
    let total = n * (n + 1.0) / 2.0;
    let mean_a = rank_sum_a / a.len() as f64;
    let mean_b = (total - rank_sum_a) / b.len() as f64;
    if mean_a < mean_b {
        Sign::Better
    } else if mean_a > mean_b {
        Sign::Worse
    } else {
        Sign::Equal
    }
}

/// Count of each sign over a set of comparisons.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Tally {
    pub better: usize,
    pub equal: usize,
    pub worse: usize,
}

impl Tally {
    pub fn add(&mut self, sign: Sign) {
        match sign {
            Sign::Better => self.better += 1,
            Sign::Equal => self.equal += 1,
            Sign::Worse => self.worse += 1,
        }
    }
}

impl FromIterator<Sign> for Tally {
    fn from_iter<I: IntoIterator<Item = Sign>>(iter: I) -> Self {
        let mut t = Tally::default();
        iter.into_iter().for_each(|s| t.add(s));
        t
    }
}

impl fmt::Display for Tally {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "+:{} =:{} -:{}", self.better, self.equal, self.worse)
    }
}

/// `n` values whose empirical distribution follows a normal with the given
/// mean and standard deviation, clipped to `[best, worst]`. Used to stand in
/// for raw samples when only summary rows are available.
pub fn synthetic_sample(summary: &Summary, n: usize) -> Vec<f64> {
    if summary.std <= 0.0 {
        return vec![summary.mean.clamp(summary.best, summary.worst); n];
    }
    let dist = Normal::new(summary.mean, summary.std).expect("positive spread");
    (0..n)
        .map(|i| {
            let q = (i as f64 + 0.5) / n as f64;
            dist.inverse_cdf(q).clamp(summary.best, summary.worst)
        })
        .collect()
}
