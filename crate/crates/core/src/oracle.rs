//! Ground truth by definition: exhaustive word enumeration, trajectory
//! simulation and Monte Carlo sampling.
//!
//! Enumeration splits the index range `0..N^L` into fixed-size chunks that
//! are counted independently, so the result never depends on how rayon
//! schedules them. Monte Carlo draws sample `i` from its own ChaCha stream
//! keyed by `(seed, i)`.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::avoidance::{gpk_operation, StatefulOperation};
use crate::counting::GpkDecomposition;
use crate::error::{Error, Result};

pub const DEFAULT_BUDGET: u64 = 10_000_000;

const CHUNK: u64 = 1 << 15;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrajectoryStats {
    /// `states[0]` is the initial state, `states[k]` the state after `k` symbols.
    pub states: Vec<usize>,
    /// Positions `k >= 1` with state 1.
    pub nu: usize,
    /// Symbols acting as the constant map to 1 (binary operations only).
    pub gcount: usize,
    /// Identity symbols that received state 1 (binary operations only).
    pub pstar: usize,
}

pub fn simulate_trajectory(op: &StatefulOperation, word: &[usize]) -> Result<TrajectoryStats> {
    let binary = op.states() == 2;
    let mut states = Vec::with_capacity(word.len() + 1);
    let mut state = op.initial();
    states.push(state);
    let (mut nu, mut gcount, mut pstar) = (0, 0, 0);
    for (position, &symbol) in word.iter().enumerate() {
        if symbol >= op.alphabet() {
            return Err(Error::SymbolOutOfRange {
                position,
                symbol,
                alphabet: op.alphabet(),
            });
        }
        if binary {
            match op.transitions()[symbol].as_slice() {
                [1, 1] => gcount += 1,
                [0, 1] if state == 1 => pstar += 1,
                _ => {}
            }
        }
        state = op.step(symbol, state);
        if state == 1 {
            nu += 1;
        }
        states.push(state);
    }
    Ok(TrajectoryStats {
        states,
        nu,
        gcount,
        pstar,
    })
}

fn word_count(alphabet: u64, len: usize, budget: u64) -> Result<u64> {
    let total = num_traits::pow(BigUint::from(alphabet), len);
    match u64::try_from(&total) {
        Ok(n) if n <= budget => Ok(n),
        _ => Err(Error::BudgetExceeded {
            words: total.to_string(),
            budget,
        }),
    }
}

/// Counts words of length `len` over `0..alphabet` satisfying `accept`,
/// visiting them in lexicographic order within each chunk.
fn count_words<F>(alphabet: usize, len: usize, budget: u64, accept: F) -> Result<BigUint>
where
    F: Fn(&[usize]) -> bool + Sync,
{
    let total = word_count(alphabet as u64, len, budget)?;
    let chunks = total.div_ceil(CHUNK);
    let count: u64 = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * CHUNK;
            let end = (start + CHUNK).min(total);
            let mut word = vec![0usize; len];
            let mut rest = start;
            for slot in word.iter_mut().rev() {
                *slot = (rest % alphabet as u64) as usize;
                rest /= alphabet as u64;
            }
            let mut hits = 0u64;
            for _ in start..end {
                if accept(&word) {
                    hits += 1;
                }
                for slot in word.iter_mut().rev() {
                    *slot += 1;
                    if *slot < alphabet {
                        break;
                    }
                    *slot = 0;
                }
            }
            hits
        })
        .sum();
    Ok(BigUint::from(count))
}

/// Cascade-free words by definition: no PROP symbol receives state 1.
pub fn brute_count_cascade_free(gpk: &GpkDecomposition, len: usize, budget: u64) -> Result<BigUint> {
    let op = gpk_operation(gpk);
    count_words(op.alphabet(), len, budget, |w| {
        simulate_trajectory(&op, w).map(|s| s.pstar == 0).unwrap_or(false)
    })
}

/// Cascade-free words by the adjacency criterion: no GEN immediately
/// followed by PROP.
pub fn brute_count_adjacency(gpk: &GpkDecomposition, len: usize, budget: u64) -> Result<BigUint> {
    let g = gpk.g() as usize;
    let gt = g + gpk.t() as usize;
    count_words(gpk.alphabet() as usize, len, budget, |w| {
        !w.windows(2).any(|p| p[0] < g && (g..gt).contains(&p[1]))
    })
}

/// Words whose trajectory never enters the forbidden state.
pub fn brute_count_avoiding(op: &StatefulOperation, len: usize, budget: u64) -> Result<BigUint> {
    let forbidden = op.forbidden();
    count_words(op.alphabet(), len, budget, |w| {
        let mut state = op.initial();
        for &x in w {
            state = op.step(x, state);
            if state == forbidden {
                return false;
            }
        }
        true
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloEstimate {
    pub samples: u64,
    pub mean: f64,
    /// Unbiased sample variance.
    pub variance: f64,
    pub dispersion: f64,
    pub se_mean: f64,
    pub se_variance: f64,
    pub se_dispersion: f64,
}

/// Samples `nu` from uniform random words of length `len` starting in
/// state 0 and estimates its mean, variance and dispersion index with
/// jackknife standard errors.
pub fn monte_carlo_dispersion(
    gpk: &GpkDecomposition,
    len: usize,
    samples: u64,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    if samples < 2 {
        return Err(Error::InvalidArgument("need at least 2 samples".into()));
    }
    let op = gpk_operation(gpk);
    let alphabet = op.alphabet();
    let nus: Vec<u64> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i);
            let word: Vec<usize> = (0..len).map(|_| rng.random_range(0..alphabet)).collect();
            simulate_trajectory(&op, &word).expect("symbols drawn in range").nu as u64
        })
        .collect();

    let mut histogram: BTreeMap<u64, u64> = BTreeMap::new();
    for &v in &nus {
        *histogram.entry(v).or_default() += 1;
    }
    let zeros = histogram.get(&0).copied().unwrap_or(0);
    if samples - zeros < 2 {
        return Err(Error::DegenerateDistribution(
            "fewer than two sampled words have a nonzero state count".into(),
        ));
    }

    let s1: u128 = nus.iter().map(|&v| v as u128).sum();
    let s2: u128 = nus.iter().map(|&v| (v as u128) * (v as u128)).sum();
    let moments = |s1: f64, s2: f64, n: f64| {
        let mean = s1 / n;
        let var = (s2 - s1 * s1 / n) / (n - 1.0);
        (mean, var, var / mean)
    };
    let n = samples as f64;
    let (mean, variance, dispersion) = moments(s1 as f64, s2 as f64, n);

    // leave-one-out estimates depend only on the left-out value
    let loo: Vec<((f64, f64, f64), u64)> = histogram
        .iter()
        .map(|(&v, &count)| {
            let v = v as f64;
            (moments(s1 as f64 - v, s2 as f64 - v * v, n - 1.0), count)
        })
        .collect();
    let jackknife = |pick: fn(&(f64, f64, f64)) -> f64| {
        let avg = loo.iter().map(|(m, c)| pick(m) * *c as f64).sum::<f64>() / n;
        let ss = loo
            .iter()
            .map(|(m, c)| (pick(m) - avg).powi(2) * *c as f64)
            .sum::<f64>();
        ((n - 1.0) / n * ss).sqrt()
    };

    Ok(MonteCarloEstimate {
        samples,
        mean,
        variance,
        dispersion,
        se_mean: jackknife(|m| m.0),
        se_variance: jackknife(|m| m.1),
        se_dispersion: jackknife(|m| m.2),
    })
}
