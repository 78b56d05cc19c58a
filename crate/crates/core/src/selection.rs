//! Selection policies: uniform, pbest, T tournament and the
//! diversity-preserving tournament (DPT).
//!
//! Tournaments draw `n` distinct candidates uniformly from a pool and keep
//! the fittest. Instead of materialising the candidates, the samplers draw the
//! winner's rank directly from its exact distribution
//! `P(rank >= k) = C(m - k, n) / C(m, n)` (0-based ranks over a pool of `m`)
//! and look it up in the fitness order, which costs `O(log m)` per tournament
//! whatever `n` is.

use std::cell::RefCell;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::population::{OrderIndex, PopulationStore};
use crate::rng::RngStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SelectionPolicy {
    #[serde(rename = "uniform")]
    Uniform,
    #[serde(rename = "T")]
    T,
    #[serde(rename = "DPT")]
    Dpt,
}

impl std::fmt::Display for SelectionPolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SelectionPolicy::Uniform => "uniform",
            SelectionPolicy::T => "T",
            SelectionPolicy::Dpt => "DPT",
        })
    }
}

/// Tournament size `max(1, round(pop_size / t))`, half-up rounding.
pub fn tournament_size(pop_size: usize, t: f64) -> usize {
    assert!(t > 0.0, "tournament divisor must be positive");
    ((pop_size as f64 / t).round() as usize).max(1)
}

/// Probability that the individual of 1-based rank `i` wins a tournament of
/// `n` distinct candidates drawn from `big_n`: `C(N-i, n-1) / C(N, n)`.
pub fn tournament_probability(i: usize, n: usize, big_n: usize) -> f64 {
    assert!(1 <= i && i <= big_n, "rank out of range");
    assert!(1 <= n && n <= big_n, "tournament size out of range");
    if i > big_n - n + 1 {
        return 0.0;
    }
    // n/N * prod_{k=0}^{n-2} (N-i-k)/(N-1-k)
    let mut p = n as f64 / big_n as f64;
    for k in 0..n - 1 {
        p *= (big_n - i - k) as f64 / (big_n - 1 - k) as f64;
    }
    p
}

thread_local! {
    static LN_FACTORIAL: RefCell<Vec<f64>> = RefCell::new(vec![0.0]);
}

fn with_ln_factorials<R>(upto: usize, f: impl FnOnce(&[f64]) -> R) -> R {
    LN_FACTORIAL.with(|cell| {
        let mut table = cell.borrow_mut();
        while table.len() <= upto {
            let k = table.len();
            let next = table[k - 1] + (k as f64).ln();
            table.push(next);
        }
        f(&table)
    })
}

/// 0-based rank of the winner of a tournament of `n` distinct candidates
/// drawn uniformly from a pool of `m` ranked members.
pub fn sample_tournament_rank(m: usize, n: usize, rng: &mut RngStream) -> usize {
    assert!(1 <= n && n <= m, "tournament size {n} outside 1..={m}");
    if n == 1 {
        return rng.below(m);
    }
    if n == m {
        return 0;
    }
    let ln_u = rng.uniform().ln();
    with_ln_factorials(m, |lf| {
        // ln C(m-k, n) - ln C(m, n), the n! terms cancel
        let ln_survival = |k: usize| (lf[m - k] - lf[m - k - n]) - (lf[m] - lf[m - n]);
        // largest k with survival(k) > u; survival(0) = 1 and survival(m-n+1) = 0
        let (mut lo, mut hi) = (0usize, m - n + 1);
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if ln_survival(mid) > ln_u {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    })
}

/// Tournament over `pool` minus the entries with 0-based ranks `excluded`
/// (sorted, distinct). Returns the winner's store position.
fn tournament_in(pool: &OrderIndex, n: usize, excluded: &[usize], rng: &mut RngStream) -> Result<usize> {
    let m = pool.len() - excluded.len();
    if m == 0 {
        return Err(Error::EmptySupport("every candidate is excluded".into()));
    }
    let mut rank = sample_tournament_rank(m, n.clamp(1, m), rng);
    for &e in excluded {
        if e <= rank {
            rank += 1;
        }
    }
    Ok(pool.nth(rank).expect("rank within pool").pos)
}

fn excluded_ranks(store: &PopulationStore, exclude: &[usize]) -> Result<Vec<usize>> {
    let mut ranks = exclude
        .iter()
        .map(|&p| store.rank_of(p).map(|r| r - 1))
        .collect::<Result<Vec<_>>>()?;
    ranks.sort_unstable();
    ranks.dedup();
    Ok(ranks)
}

/// Uniform over the store minus `exclude`, by rejection.
pub fn select_uniform(store: &PopulationStore, rng: &mut RngStream, exclude: &[usize]) -> Result<usize> {
    let n = store.len();
    let mut distinct: Vec<usize> = exclude.iter().copied().filter(|&p| p < n).collect();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() >= n {
        return Err(Error::EmptySupport(format!("{} of {n} members excluded", distinct.len())));
    }
    loop {
        let pos = rng.below(n);
        if !exclude.contains(&pos) {
            return Ok(pos);
        }
    }
}

/// Number of pbest candidates: `max(2, round(p * size))`, capped at `size`.
pub fn pbest_count(size: usize, p: f64) -> usize {
    ((p * size as f64).round() as usize).max(2).min(size)
}

/// Uniform over the best `max(2, round(p |P|))` members.
pub fn select_pbest(store: &PopulationStore, p: f64, rng: &mut RngStream) -> usize {
    assert!(store.len() >= 2, "pbest needs at least two members");
    let k = pbest_count(store.len(), p);
    store.order().nth(rng.below(k)).expect("rank within store").pos
}

/// T policy: best of `max(1, round(|P| / T))` distinct candidates drawn from
/// the store minus `exclude`. The size is clamped to the available support.
pub fn select_t(store: &PopulationStore, t: f64, rng: &mut RngStream, exclude: &[usize]) -> Result<usize> {
    let n = tournament_size(store.len(), t);
    let excluded = excluded_ranks(store, exclude)?;
    tournament_in(store.order(), n, &excluded, rng)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DptRole {
    Parent,
    R1,
    R2,
}

/// Diversity-preserving tournament.
///
/// `slot` is the 1-based offspring slot `i` in `1..=gensize`. The parent
/// uses subset `j = i`; `r1` and `r2` draw `j` uniformly from `1..=gensize`
/// avoiding every value in `chosen`. The tournament runs inside
/// `S_j = {x : insertion_index mod gensize == j mod gensize}` with
/// `n = min(|S_j|, max(1, round(|P| / T)))`. Returns `(position, j)`.
pub fn select_dpt(
    store: &PopulationStore,
    gensize: usize,
    slot: usize,
    role: DptRole,
    t: f64,
    rng: &mut RngStream,
    chosen: &[usize],
) -> Result<(usize, usize)> {
    let classes = store
        .residue_classes()
        .filter(|c| c.modulus() == gensize)
        .ok_or_else(|| Error::Config(format!("store is not partitioned modulo {gensize}")))?;
    if !(1..=gensize).contains(&slot) {
        return Err(Error::InvalidInput(format!("offspring slot {slot} outside 1..={gensize}")));
    }
    let j = match role {
        DptRole::Parent => slot,
        DptRole::R1 | DptRole::R2 => {
            let free = (1..=gensize).filter(|j| !chosen.contains(j)).count();
            if free == 0 {
                return Err(Error::EmptySupport("no subset index left for DPT".into()));
            }
            loop {
                let j = 1 + rng.below(gensize);
                if !chosen.contains(&j) {
                    break j;
                }
            }
        }
    };
    let subset = classes.class(j % gensize);
    if subset.is_empty() {
        return Err(Error::EmptySupport(format!("DPT subset {j} is empty")));
    }
    let n = tournament_size(store.len(), t).min(subset.len());
    Ok((tournament_in(subset, n, &[], rng)?, j))
}
