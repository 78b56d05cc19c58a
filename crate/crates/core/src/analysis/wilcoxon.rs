//! Two-sided Wilcoxon rank-sum (Mann-Whitney) test.

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

/// Combined sample sizes up to this use the exact permutation distribution.
pub const EXACT_LIMIT: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// `a` has significantly lower (better) values.
    ABetter,
    BBetter,
    NoDifference,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::ABetter => "a_better",
            Verdict::BBetter => "b_better",
            Verdict::NoDifference => "no_difference",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WilcoxonMethod {
    Exact,
    Normal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WilcoxonResult {
    pub p_value: f64,
    pub verdict: Verdict,
    pub method: WilcoxonMethod,
    /// Rank sum of `a` (midranks for ties).
    pub rank_sum_a: f64,
}

/// Midranks of the pooled sample, doubled so that they are integers.
fn doubled_midranks(a: &[f64], b: &[f64]) -> (Vec<u64>, Vec<u64>) {
    let mut pooled: Vec<(f64, usize)> = a.iter().chain(b).copied().zip(0..).collect();
    pooled.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut ranks = vec![0u64; pooled.len()];
    let mut i = 0;
    while i < pooled.len() {
        let mut j = i;
        while j + 1 < pooled.len() && pooled[j + 1].0 == pooled[i].0 {
            j += 1;
        }
        // ranks i+1..=j+1 share (i+1 + j+1)/2, doubled
        let r2 = (i + j + 2) as u64;
        for item in &pooled[i..=j] {
            ranks[item.1] = r2;
        }
        i = j + 1;
    }
    let rb = ranks.split_off(a.len());
    (ranks, rb)
}

/// Exact two-sided p: share of the `C(N, n_a)` relabelings whose rank sum
/// lies at least as far from its mean as the observed one.
fn exact_p(ra: &[u64], rb: &[u64]) -> f64 {
    let na = ra.len();
    let all: Vec<u64> = ra.iter().chain(rb).copied().collect();
    let total: u64 = all.iter().sum();
    // counts[k][s]: subsets of size k with doubled rank sum s
    let mut counts = vec![vec![0f64; total as usize + 1]; na + 1];
    counts[0][0] = 1.0;
    for &r in &all {
        for k in (1..=na).rev() {
            for s in (r as usize..=total as usize).rev() {
                let add = counts[k - 1][s - r as usize];
                if add != 0.0 {
                    counts[k][s] += add;
                }
            }
        }
    }
    let n = all.len() as i64;
    let mean2 = na as i64 * (n + 1); // expected sum of doubled ranks
    let obs = ra.iter().sum::<u64>() as i64;
    let dev = (obs - mean2).abs();
    let (mut extreme, mut all_count) = (0.0, 0.0);
    for (s, &c) in counts[na].iter().enumerate() {
        all_count += c;
        if (s as i64 - mean2).abs() >= dev {
            extreme += c;
        }
    }
    (extreme / all_count).min(1.0)
}

/// Normal approximation with tie and continuity corrections.
fn normal_p(ra: &[u64], rb: &[u64]) -> f64 {
    let (na, nb) = (ra.len() as f64, rb.len() as f64);
    let n = na + nb;
    let w = ra.iter().sum::<u64>() as f64 / 2.0;
    let u = w - na * (na + 1.0) / 2.0;
    let mean = na * nb / 2.0;

    let mut all: Vec<u64> = ra.iter().chain(rb).copied().collect();
    all.sort_unstable();
    let mut tie_term = 0.0;
    for group in all.chunk_by(|x, y| x == y) {
        let t = group.len() as f64;
        tie_term += t * t * t - t;
    }
    let var = na * nb / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    if var <= 0.0 {
        return 1.0;
    }
    let z = ((u - mean).abs() - 0.5).max(0.0) / var.sqrt();
    erfc(z / std::f64::consts::SQRT_2).min(1.0)
}

/// Tests whether `a` and `b` come from the same distribution. Lower values
/// are better, so a significant result favours the sample with the smaller
/// rank sum.
pub fn wilcoxon_rank_sum(a: &[f64], b: &[f64], alpha: f64) -> WilcoxonResult {
    assert!(!a.is_empty() && !b.is_empty(), "both samples must be non-empty");
    assert!(a.iter().chain(b).all(|v| !v.is_nan()), "NaN in sample");
    let (ra, rb) = doubled_midranks(a, b);
    let method = if a.len() + b.len() <= EXACT_LIMIT {
        WilcoxonMethod::Exact
    } else {
        WilcoxonMethod::Normal
    };
    let p_value = match method {
        WilcoxonMethod::Exact => exact_p(&ra, &rb),
        WilcoxonMethod::Normal => normal_p(&ra, &rb),
    };
    let rank_sum_a = ra.iter().sum::<u64>() as f64 / 2.0;
    let expected = a.len() as f64 * (a.len() + b.len() + 1) as f64 / 2.0;
    let verdict = if p_value >= alpha || rank_sum_a == expected {
        Verdict::NoDifference
    } else if rank_sum_a < expected {
        Verdict::ABetter
    } else {
        Verdict::BBetter
    };
    WilcoxonResult { p_value, verdict, method, rank_sum_a }
}
