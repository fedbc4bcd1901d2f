//! Best-of-run statistics and the rank-sum significance test.

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use super::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    #[serde(with = "super::output::fitness_repr")]
    pub avg: f64,
    #[serde(with = "super::output::fitness_repr")]
    pub max: f64,
    /// Sample variance (`n - 1` denominator), 0 for a single value.
    pub var: f64,
    pub n: usize,
}

pub fn summarize(values: &[f64]) -> Result<SummaryStats, HarnessError> {
    if values.is_empty() {
        return Err(HarnessError::EmptySample);
    }
    let n = values.len();
    let avg = values.iter().sum::<f64>() / n as f64;
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let var = if n == 1 {
        0.0
    } else {
        values.iter().map(|v| (v - avg).powi(2)).sum::<f64>() / (n - 1) as f64
    };
    Ok(SummaryStats {
        avg,
        max,
        var: if var.is_nan() { 0.0 } else { var },
        n,
    })
}

/// Average ranks (1-based) of `values`, ties sharing the mean of their span.
pub fn midranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        let rank = (start + end + 1) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    ranks
}

/// Mann–Whitney U statistic of `a` against `b`.
pub fn u_statistic(a: &[f64], b: &[f64]) -> f64 {
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let ranks = midranks(&pooled);
    let na = a.len() as f64;
    ranks[..a.len()].iter().sum::<f64>() - na * (na + 1.0) / 2.0
}

pub const MIN_RANK_SAMPLE: usize = 3;

/// Two-sided Mann–Whitney rank-sum test: normal approximation with
/// tie-corrected variance and a 0.5 continuity correction.
pub fn rank_test(a: &[f64], b: &[f64]) -> Result<f64, HarnessError> {
    if a.len() < MIN_RANK_SAMPLE || b.len() < MIN_RANK_SAMPLE {
        return Err(HarnessError::InsufficientSamples {
            a: a.len(),
            b: b.len(),
        });
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let n = na + nb;
    let u = u_statistic(a, b);
    let mean = na * nb / 2.0;

    let mut pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    pooled.sort_by(f64::total_cmp);
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < pooled.len() {
        let mut j = i + 1;
        while j < pooled.len() && pooled[j] == pooled[i] {
            j += 1;
        }
        let t = (j - i) as f64;
        tie_term += t * t * t - t;
        i = j;
    }
    let var = na * nb / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    if var <= 0.0 {
        return Ok(1.0);
    }
    let z = ((u - mean).abs() - 0.5).max(0.0) / var.sqrt();
    Ok(erfc(z / std::f64::consts::SQRT_2).min(1.0))
}
