//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// `v_p(n!)` by Legendre's formula.
fn factorial_valuation(mut n: u128, p: u128) -> u128 {
    let mut v = 0;
    while n > 0 {
        n /= p;
        v += n;
    }
    v
}

/// `v_p(C(m + n, m))` from factorial valuations.
pub fn legendre_binomial_valuation(m: u64, n: u64, p: u64) -> u32 {
    let (m, n, p) = (m as u128, n as u128, p as u128);
    (factorial_valuation(m + n, p) - factorial_valuation(m, p) - factorial_valuation(n, p)) as u32
}

/// Cascade-free count by walking every class word and weighting it by the
/// class sizes. Classes: 0 = GEN, 1 = PROP, 2 = KILL.
pub fn class_walk_count(g: u64, t: u64, k: u64, len: usize) -> BigUint {
    let sizes = [g, t, k];
    let mut total = BigUint::zero();
    let mut word = vec![0usize; len];
    loop {
        let mut carry = false;
        let mut ok = true;
        let mut weight = BigUint::one();
        for &c in &word {
            weight *= sizes[c];
            match c {
                0 => carry = true,
                1 if carry => {
                    ok = false;
                    break;
                }
                1 => {}
                _ => carry = false,
            }
        }
        if ok {
            total += weight;
        }
        let mut i = 0;
        while i < len && word[i] == 2 {
            word[i] = 0;
            i += 1;
        }
        if i == len {
            return total;
        }
        word[i] += 1;
    }
}

/// Transient dispersion index for `L = 1..=lmax` from the two-state chain
/// started in state 0, propagating marginals and `P^n(1 | 1)` step by step
/// and summing every covariance pair. Probabilities after `i` steps are
/// kept as integers scaled by `N^i`.
pub fn direct_transient_dispersion(g: u64, t: u64, k: u64, lmax: usize) -> Vec<BigRational> {
    let n = BigInt::from(g + t + k);
    let (stay, rise) = (BigInt::from(g + t), BigInt::from(g));
    let next = |x: &BigInt, scale: &BigInt| x * &stay + (scale - x) * &rise;

    // pw[i] = N^i, p[i] = N^i P(state_i = 1), r[i] = N^i P(state_{j+i} = 1 | state_j = 1)
    let mut pw = vec![BigInt::one()];
    let mut p = vec![BigInt::zero()];
    let mut r = vec![BigInt::one()];
    for i in 1..=lmax {
        p.push(next(&p[i - 1], &pw[i - 1]));
        r.push(next(&r[i - 1], &pw[i - 1]));
        pw.push(&pw[i - 1] * &n);
    }
    let mut out = Vec::with_capacity(lmax);
    // mean N^l and variance N^(2l)
    let mut mean = BigInt::zero();
    let mut var = BigInt::zero();
    let n2 = &n * &n;
    for l in 1..=lmax {
        mean = &mean * &n + &p[l];
        var = &var * &n2 + &p[l] * (&pw[l] - &p[l]);
        let mut cov = BigInt::zero();
        for j in 1..l {
            // N^(2l) (p_j r_(l-j) - p_j p_l)
            cov += &p[j] * (&r[l - j] * &pw[l] - &p[l] * &pw[l - j]);
        }
        var += cov * 2;
        out.push(BigRational::new(var.clone(), mean.clone() * &pw[l]));
    }
    out
}

/// All decompositions with `1 <= N <= nmax`.
pub fn triples(nmax: u64) -> Vec<(u64, u64, u64)> {
    let mut v = Vec::new();
    for n in 1..=nmax {
        for g in 0..=n {
            for t in 0..=n - g {
                v.push((g, t, n - g - t));
            }
        }
    }
    v
}
