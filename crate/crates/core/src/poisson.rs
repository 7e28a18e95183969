//! Symmetric chains (`g = k`) started at `sigma_0 = 0`: the dispersion index
//! as a function of `(L, mu)`, the point `mu*(L)` where it crosses 1, and
//! exact checks of its monotonicity.
//!
//! For symmetric chains `D(L, mu) = D_inf(mu) * S2 / S1` with
//! `S1 = sum (1 - mu^k)`, `S2 = sum (1 - mu^k)^2` over `k = 1..=L` and
//! `D_inf(mu) = (1 + mu) / (2 (1 - mu))`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::counting::GpkDecomposition;
use crate::error::{Error, Result};

pub const DEFAULT_ROOT_TOL: f64 = 1e-12;
/// Lower end of the root bracket, just above the asymptotic point 1/3.
pub const BRACKET_LO: f64 = 1.0 / 3.0 + 1e-15;
pub const BRACKET_HI: f64 = 1.0 - 1e-9;

fn check_mu(mu: &BigRational) -> Result<()> {
    if mu.is_positive() && mu < &BigRational::one() {
        Ok(())
    } else {
        Err(Error::InvalidMu(mu.to_string()))
    }
}

fn int(n: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `(1 + mu) / (2 (1 - mu))`.
pub fn symmetric_asymptotic_dispersion(mu: &BigRational) -> Result<BigRational> {
    check_mu(mu)?;
    let one = BigRational::one();
    Ok((&one + mu) / (int(2) * (&one - mu)))
}

/// Dispersion contributed by position `k`: `D_inf(mu) (1 - mu^k)`.
pub fn marginal_dispersion(mu: &BigRational, k: usize) -> Result<BigRational> {
    if k == 0 {
        return Err(Error::InvalidArgument("position must be at least 1".into()));
    }
    let d_inf = symmetric_asymptotic_dispersion(mu)?;
    Ok(d_inf * (BigRational::one() - num_traits::pow(mu.clone(), k)))
}

/// The unfactored form `(1 + mu^k)/2 + mu (1 - mu^(k-1)) / (1 - mu)`.
pub fn marginal_dispersion_closed_form(mu: &BigRational, k: usize) -> Result<BigRational> {
    check_mu(mu)?;
    if k == 0 {
        return Err(Error::InvalidArgument("position must be at least 1".into()));
    }
    let one = BigRational::one();
    let half = BigRational::new(1.into(), 2.into());
    Ok(half * (&one + num_traits::pow(mu.clone(), k))
        + mu * (&one - num_traits::pow(mu.clone(), k - 1)) / (&one - mu))
}

/// Exact `D(L, mu)`.
///
/// With `mu = a/b` the sums are carried as integers:
/// `S1 b^L = sum b^(L-k) (b^k - a^k)` and
/// `S2 b^(2L) = sum b^(2(L-k)) (b^k - a^k)^2`.
pub fn symmetric_dispersion(mu: &BigRational, len: usize) -> Result<BigRational> {
    check_mu(mu)?;
    if len == 0 {
        return Err(Error::InvalidArgument("length must be positive".into()));
    }
    let a = mu.numer().clone();
    let b = mu.denom().clone();
    let mut a_pow = BigInt::one();
    let mut b_pow = BigInt::one();
    let mut s1 = BigInt::zero();
    let mut s2 = BigInt::zero();
    let b2 = &b * &b;
    // Horner in b: after step k, s1 = sum_{j<=k} b^(k-j) (b^j - a^j)
    for _ in 0..len {
        a_pow *= &a;
        b_pow *= &b;
        let diff = &b_pow - &a_pow;
        s1 = s1 * &b + &diff;
        s2 = s2 * &b2 + &diff * &diff;
    }
    // S2/S1 = (s2 / b^(2L)) / (s1 / b^L) = s2 / (s1 b^L)
    let ratio = BigRational::new(s2, s1 * b_pow);
    let factor = BigRational::new(&b + &a, BigInt::from(2) * (&b - &a));
    Ok(factor * ratio)
}

/// Binary64 evaluation of `D(L, mu)` for root-finding probes.
pub fn symmetric_dispersion_f64(mu: f64, len: usize) -> f64 {
    let (mut s1, mut s2, mut p) = (0.0f64, 0.0f64, 1.0f64);
    for _ in 0..len {
        p *= mu;
        let w = 1.0 - p;
        s1 += w;
        s2 += w * w;
    }
    (1.0 + mu) / (2.0 * (1.0 - mu)) * s2 / s1
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoissonRoot {
    pub len: usize,
    pub mu_star: f64,
    pub tol: f64,
    /// `|D(L, mu*) - 1|` evaluated exactly at the rational value of `mu_star`.
    pub residual: f64,
}

impl PoissonRoot {
    /// `L (mu* - 1/3)`, which tends to 1/6.
    pub fn rate(&self) -> f64 {
        self.len as f64 * (self.mu_star - 1.0 / 3.0)
    }
}

fn exact_residual(mu: f64, len: usize) -> Result<f64> {
    let q = BigRational::from_float(mu).ok_or_else(|| Error::InvalidMu(mu.to_string()))?;
    let d = symmetric_dispersion(&q, len)?;
    Ok((d - BigRational::one()).abs().to_f64().unwrap_or(f64::INFINITY))
}

/// Solves `D(L, mu) = 1` by bisection on `(1/3, 1)`.
pub fn poisson_root(len: usize, tol: f64) -> Result<PoissonRoot> {
    if len == 0 {
        return Err(Error::InvalidArgument("length must be positive".into()));
    }
    if len == 1 {
        return Err(Error::NoInteriorRoot(
            "D(1, mu) = (1 + mu)/2 reaches 1 only at mu = 1".into(),
        ));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let f = |mu: f64| symmetric_dispersion_f64(mu, len) - 1.0;
    let (mut lo, mut hi) = (BRACKET_LO, BRACKET_HI);
    if f(lo) >= 0.0 || f(hi) <= 0.0 {
        return Err(Error::NoInteriorRoot(format!(
            "D(L, mu) - 1 does not change sign on [{lo}, {hi}] for L = {len}"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (r_lo, r_hi) = (exact_residual(lo, len)?, exact_residual(hi, len)?);
    let (mu_star, residual) = if r_lo <= r_hi { (lo, r_lo) } else { (hi, r_hi) };
    if residual > tol {
        return Err(Error::ToleranceNotMet { residual, tol });
    }
    Ok(PoissonRoot {
        len,
        mu_star,
        tol,
        residual,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionCheck {
    pub len: usize,
    pub exact: BigRational,
    /// `D_inf(mu) [1 - mu / (L (1 - mu)(1 + mu))]`.
    pub first_order: BigRational,
    pub residual: BigRational,
    /// `L^2 |residual|`, bounded when the residual is `O(1/L^2)`.
    pub scaled_residual: f64,
}

pub fn asymptotic_expansion_check(mu: &BigRational, len: usize) -> Result<ExpansionCheck> {
    let exact = symmetric_dispersion(mu, len)?;
    let one = BigRational::one();
    let d_inf = symmetric_asymptotic_dispersion(mu)?;
    let first_order = &d_inf * (&one - mu / (int(len) * (&one - mu) * (&one + mu)));
    let residual = &exact - &first_order;
    let scaled_residual = (int(len * len) * residual.abs()).to_f64().unwrap_or(f64::INFINITY);
    Ok(ExpansionCheck {
        len,
        exact,
        first_order,
        residual,
        scaled_residual,
    })
}

/// `mu / ((1 - mu)(1 + mu))`, the first-order coefficient.
pub fn expansion_coefficient(mu: &BigRational) -> Result<BigRational> {
    check_mu(mu)?;
    let one = BigRational::one();
    Ok(mu / ((&one - mu) * (&one + mu)))
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct MonotonicityReport {
    pub checks: usize,
    pub failures: Vec<String>,
    pub roots: Vec<PoissonRoot>,
}

impl MonotonicityReport {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(what());
        }
    }
}

/// Exact monotonicity checks on a grid of `mu` values, plus the decrease
/// of `mu*(L)` for `2 <= L <= lmax`.
pub fn monotonicity_scan(grid: &[BigRational], lmax: usize) -> Result<MonotonicityReport> {
    if lmax == 0 {
        return Err(Error::InvalidArgument("lmax must be positive".into()));
    }
    let mut sorted = grid.to_vec();
    sorted.sort();
    sorted.dedup();
    let mut report = MonotonicityReport::default();

    // table[i][l - 1] = D(l, grid_i)
    let mut table = Vec::with_capacity(sorted.len());
    for mu in &sorted {
        check_mu(mu)?;
        let row = (1..=lmax)
            .map(|l| symmetric_dispersion(mu, l))
            .collect::<Result<Vec<_>>>()?;
        table.push(row);
    }

    let one = BigRational::one();
    for (mu, row) in sorted.iter().zip(&table) {
        for l in 1..=lmax {
            let d = &row[l - 1];
            let next_marginal = marginal_dispersion(mu, l + 1)?;
            report.check(
                next_marginal == marginal_dispersion_closed_form(mu, l + 1)?,
                || format!("factorised and closed marginal forms differ at mu={mu}, k={}", l + 1),
            );
            report.check(d < &next_marginal, || {
                format!("D({l}) >= d_{} at mu={mu}", l + 1)
            });
            let gap = marginal_dispersion(mu, l + 2)? - &next_marginal;
            let expect = num_traits::pow(mu.clone(), l + 1) * (&one + mu) / int(2);
            report.check(gap == expect, || {
                format!("d_{} - d_{} != mu^{}(1+mu)/2 at mu={mu}", l + 2, l + 1, l + 1)
            });
            if l < lmax {
                report.check(d < &row[l], || {
                    format!("D({l}) >= D({}) at mu={mu}", l + 1)
                });
            }
        }
    }
    for pair in sorted.windows(2).zip(table.windows(2)) {
        let ([mu1, mu2], [lo, hi]) = pair else { unreachable!() };
        for l in 1..=lmax {
            report.check(lo[l - 1] < hi[l - 1], || {
                format!("D({l}, {mu1}) >= D({l}, {mu2})")
            });
        }
    }

    for l in 2..=lmax {
        report.roots.push(poisson_root(l, DEFAULT_ROOT_TOL)?);
    }
    let decreasing: Vec<(usize, bool)> = report
        .roots
        .windows(2)
        .map(|w| (w[0].len, w[1].mu_star < w[0].mu_star))
        .collect();
    for (l, ok) in decreasing {
        report.check(ok, || format!("mu*({}) >= mu*({l})", l + 1));
    }
    Ok(report)
}

/// The symmetric decomposition with `mu = 1/3`: `g = t = k = N/3`.
pub fn symmetric_poisson_decomposition(n: u64) -> Result<GpkDecomposition> {
    let (third, rem) = n.div_rem(&3);
    if rem != 0 || third == 0 {
        return Err(Error::InvalidArgument(format!(
            "alphabet size {n} is not a positive multiple of 3"
        )));
    }
    GpkDecomposition::new(third, third, third)
}
