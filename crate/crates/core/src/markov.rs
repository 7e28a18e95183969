//! The state chain under uniformly random symbols and the moments of the
//! state count `nu = sigma_1 + ... + sigma_L`, all in exact rationals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::counting::GpkDecomposition;
use crate::error::{Error, Result};

fn ratio(n: u64, d: u64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Transition data of the binary state chain.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovChain {
    /// Second eigenvalue `t / N`.
    pub mu: BigRational,
    pub pi0: BigRational,
    pub pi1: BigRational,
    /// Row-stochastic transition matrix, rows and columns indexed by state.
    pub transition: [[BigRational; 2]; 2],
    /// Correlation length `1 / ln(N / t)`; 0 when `t = 0`.
    pub xi: f64,
}

impl MarkovChain {
    /// `pi M == pi`, checked exactly.
    pub fn is_stationary(&self) -> bool {
        let m = &self.transition;
        let left0 = &self.pi0 * &m[0][0] + &self.pi1 * &m[1][0];
        let left1 = &self.pi0 * &m[0][1] + &self.pi1 * &m[1][1];
        left0 == self.pi0 && left1 == self.pi1
    }

    /// `P(sigma_n = 1 | sigma_0 = 0) = pi1 (1 - mu^n)`.
    pub fn hit_probability(&self, n: usize) -> BigRational {
        &self.pi1 * (BigRational::one() - num_traits::pow(self.mu.clone(), n))
    }
}

pub fn markov_chain(gpk: &GpkDecomposition) -> Result<MarkovChain> {
    let (g, t, k) = (gpk.g(), gpk.t(), gpk.k());
    if g + k == 0 {
        return Err(Error::DegenerateChain(
            "every symbol is PROP, so the chain is the identity".into(),
        ));
    }
    let n = gpk.alphabet();
    let xi = if t == 0 {
        0.0
    } else {
        1.0 / (n as f64 / t as f64).ln()
    };
    Ok(MarkovChain {
        mu: ratio(t, n),
        pi0: ratio(k, g + k),
        pi1: ratio(g, g + k),
        transition: [
            [ratio(t + k, n), ratio(g, n)],
            [ratio(k, n), ratio(g + t, n)],
        ],
        xi,
    })
}

/// `Corr(sigma_j, sigma_{j+m}) = (t/N)^m` in the stationary chain.
pub fn autocorrelation(gpk: &GpkDecomposition, lag: usize) -> Result<BigRational> {
    let chain = markov_chain(gpk)?;
    Ok(num_traits::pow(chain.mu, lag))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropagationRates {
    /// `E[P*] / L = t g / (N (g + k))`.
    pub per_position: BigRational,
    /// `E[P*] / E[nu] = t / N`.
    pub share: BigRational,
}

pub fn expected_propagation(gpk: &GpkDecomposition) -> Result<PropagationRates> {
    let chain = markov_chain(gpk)?;
    Ok(PropagationRates {
        per_position: &chain.mu * &chain.pi1,
        share: chain.mu,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// `sigma_0` drawn from the stationary distribution.
    Stationary,
    /// `sigma_0 = 0`.
    Transient,
}

impl Regime {
    pub fn name(&self) -> &'static str {
        match self {
            Regime::Stationary => "stationary",
            Regime::Transient => "transient",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentReport {
    pub regime: Regime,
    pub len: usize,
    pub mean: BigRational,
    pub variance: BigRational,
    pub dispersion: BigRational,
}

fn dispersion_of(mean: &BigRational, variance: &BigRational) -> Result<BigRational> {
    if mean.is_zero() {
        return Err(Error::DegenerateDistribution(
            "E[nu] = 0, dispersion index undefined".into(),
        ));
    }
    Ok(variance / mean)
}

/// Moments with `sigma_0` stationary:
/// `Var = pi0 pi1 [L (1+mu)/(1-mu) - 2 mu (1 - mu^L)/(1-mu)^2]`.
pub fn stationary_moments(gpk: &GpkDecomposition, len: usize) -> Result<MomentReport> {
    if len == 0 {
        return Err(Error::InvalidArgument("length must be positive".into()));
    }
    let c = markov_chain(gpk)?;
    let one = BigRational::one();
    let l = BigRational::from_integer(BigInt::from(len));
    let mu = &c.mu;
    let om = &one - mu;
    let mean = &l * &c.pi1;
    let bracket = &l * (&one + mu) / &om
        - BigRational::from_integer(2.into()) * mu * (&one - num_traits::pow(mu.clone(), len))
            / (&om * &om);
    let variance = &c.pi0 * &c.pi1 * bracket;
    let dispersion = dispersion_of(&mean, &variance)?;
    Ok(MomentReport {
        regime: Regime::Stationary,
        len,
        mean,
        variance,
        dispersion,
    })
}

/// `D_inf = pi0 (1 + mu) / (1 - mu) = k (g + k + 2t) / (g + k)^2`.
pub fn asymptotic_dispersion(gpk: &GpkDecomposition) -> Result<BigRational> {
    let c = markov_chain(gpk)?;
    let one = BigRational::one();
    Ok(&c.pi0 * (&one + &c.mu) / (&one - &c.mu))
}

/// Moments with `sigma_0 = 0`.
///
/// Mean from `E[nu] = pi1 [L - mu (1 - mu^L)/(1 - mu)]`; variance as
/// `sum Var(sigma_k) + 2 sum_{j<k} Cov(sigma_j, sigma_k)` with
/// `Cov = pi1 (1 - mu^j) mu^(k-j) (pi0 + pi1 mu^j)`. The inner sum over `k`
/// collapses to `q_m = sum_{i=1}^m t^i N^(m-i)`, and every term is carried
/// over the common denominator `(g+k)^2 N^(2L)`, so the pass is linear in
/// `L` with a single reduction at the end.
pub fn transient_moments(gpk: &GpkDecomposition, len: usize) -> Result<MomentReport> {
    if len == 0 {
        return Err(Error::InvalidArgument("length must be positive".into()));
    }
    markov_chain(gpk)?;
    let big = |v: u64| BigInt::from(v);
    let (g, k, s) = (big(gpk.g()), big(gpk.k()), big(gpk.g() + gpk.k()));
    let (a, b) = (big(gpk.t()), big(gpk.alphabet()));

    let mut pa = Vec::with_capacity(len + 1);
    let mut pb = Vec::with_capacity(len + 1);
    let mut q = Vec::with_capacity(len + 1);
    pa.push(BigInt::one());
    pb.push(BigInt::one());
    q.push(BigInt::zero());
    for i in 1..=len {
        pa.push(&pa[i - 1] * &a);
        pb.push(&pb[i - 1] * &b);
        q.push(&q[i - 1] * &b + &pa[i]);
    }

    // mean (g+k) N^L
    let mean_num = &g * (BigInt::from(len) * &pb[len] - &q[len]);
    // variance (g+k)^2 N^(2L)
    let mut var_num = BigInt::zero();
    let mut cov_num = BigInt::zero();
    for j in 1..=len {
        let gap = &g * (&pb[j] - &pa[j]);
        var_num += &gap * (&s * &pb[j] - &gap) * &pb[len - j] * &pb[len - j];
        if j < len {
            cov_num += &gap * (&k * &pb[j] + &g * &pa[j]) * &q[len - j] * &pb[len - j];
        }
    }
    var_num += cov_num * 2;

    let mean = BigRational::new(mean_num, &s * &pb[len]);
    let variance = BigRational::new(var_num, &s * &s * &pb[len] * &pb[len]);
    let dispersion = dispersion_of(&mean, &variance)?;
    Ok(MomentReport {
        regime: Regime::Transient,
        len,
        mean,
        variance,
        dispersion,
    })
}

pub fn moments(gpk: &GpkDecomposition, len: usize, regime: Regime) -> Result<MomentReport> {
    match regime {
        Regime::Stationary => stationary_moments(gpk, len),
        Regime::Transient => transient_moments(gpk, len),
    }
}

/// `2 k t = g (g + k)`, the integer form of `D_inf = 1`.
pub fn is_poisson(gpk: &GpkDecomposition) -> bool {
    let (g, t, k) = (gpk.g() as u128, gpk.t() as u128, gpk.k() as u128);
    2 * k * t == g * (g + k)
}

/// Sign of `D_inf - 1`: overdispersed, Poisson or underdispersed.
pub fn dispersion_regime(d_inf: &BigRational) -> &'static str {
    let diff = d_inf - BigRational::one();
    if diff.is_positive() {
        "overdispersed"
    } else if diff.is_zero() {
        "Poisson"
    } else {
        "underdispersed"
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::addition_instance;

    fn gpk(g: u64, t: u64, k: u64) -> GpkDecomposition {
        GpkDecomposition::new(g, t, k).unwrap()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn chain_examples() {
        let c = markov_chain(&gpk(3, 3, 3)).unwrap();
        assert_eq!(c.mu, q(1, 3));
        assert_eq!((c.pi0.clone(), c.pi1.clone()), (q(1, 2), q(1, 2)));
        assert!(c.is_stationary());

        assert_eq!(markov_chain(&gpk(1, 2, 1)).unwrap().mu, q(1, 2));

        let c = markov_chain(&gpk(2, 0, 2)).unwrap();
        assert!(c.mu.is_zero());
        assert_eq!(c.xi, 0.0);

        assert!(matches!(markov_chain(&gpk(0, 4, 0)), Err(Error::DegenerateChain(_))));
    }

    #[test]
    fn chain_rows_are_stochastic() {
        for (g, t, k) in [(1, 2, 3), (5, 0, 1), (0, 3, 2), (4, 4, 0)] {
            let c = markov_chain(&gpk(g, t, k)).unwrap();
            for row in &c.transition {
                assert!((&row[0] + &row[1]).is_one());
            }
            assert!(c.is_stationary());
            assert!((&c.pi0 + &c.pi1).is_one());
        }
    }

    #[test]
    fn xi_value() {
        let c = markov_chain(&gpk(3, 3, 3)).unwrap();
        assert!((c.xi - 1.0 / 3f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn autocorrelation_examples() {
        for p in [2u64, 3, 5, 7] {
            let d = addition_instance(p).unwrap();
            for m in 0..6 {
                assert_eq!(
                    autocorrelation(&d, m).unwrap(),
                    BigRational::new(1.into(), num_traits::pow(BigInt::from(p), m))
                );
            }
        }
        assert_eq!(autocorrelation(&gpk(1, 1, 1), 2).unwrap(), q(1, 9));
    }

    #[test]
    fn propagation_examples() {
        let r = expected_propagation(&addition_instance(3).unwrap()).unwrap();
        assert_eq!(r.share, q(1, 3));
        assert!(expected_propagation(&gpk(1, 0, 1)).unwrap().per_position.is_zero());
        let r = expected_propagation(&gpk(1, 1, 1)).unwrap();
        assert_eq!((r.per_position, r.share), (q(1, 6), q(1, 3)));
    }

    #[test]
    fn stationary_examples() {
        let m = stationary_moments(&gpk(1, 1, 1), 1).unwrap();
        assert_eq!((m.mean, m.variance, m.dispersion), (q(1, 2), q(1, 4), q(1, 2)));
        for l in [1, 5, 40] {
            let m = stationary_moments(&gpk(3, 0, 5), l).unwrap();
            assert_eq!(m.dispersion, q(5, 8));
        }
    }

    #[test]
    fn asymptotic_examples() {
        let expect = [(2, q(3, 2)), (3, q(1, 1)), (5, q(3, 4)), (7, q(2, 3))];
        for (p, d) in expect {
            assert_eq!(asymptotic_dispersion(&addition_instance(p).unwrap()).unwrap(), d);
        }
        // closed form k (g + k + 2t) / (g + k)^2
        for (g, t, k) in [(1, 2, 3), (4, 1, 0), (2, 7, 5)] {
            let d = asymptotic_dispersion(&gpk(g, t, k)).unwrap();
            assert_eq!(d, q((k * (g + k + 2 * t)) as i64, ((g + k) * (g + k)) as i64));
        }
    }

    #[test]
    fn transient_examples() {
        let m = transient_moments(&gpk(1, 1, 1), 1).unwrap();
        assert_eq!((m.mean, m.variance, m.dispersion), (q(1, 3), q(2, 9), q(2, 3)));
        for l in [1, 3, 17] {
            let s = stationary_moments(&gpk(2, 0, 3), l).unwrap();
            let t = transient_moments(&gpk(2, 0, 3), l).unwrap();
            assert_eq!(s.dispersion, t.dispersion);
        }
        for (g, t) in [(1u64, 1u64), (2, 5), (3, 1)] {
            let m = transient_moments(&gpk(g, t, g), 1).unwrap();
            let mu = q(t as i64, (2 * g + t) as i64);
            assert_eq!(m.dispersion, (BigRational::one() + mu) / q(2, 1));
        }
    }

    #[test]
    fn transient_zero_mean_is_error() {
        assert!(matches!(
            transient_moments(&gpk(0, 2, 3), 5),
            Err(Error::DegenerateDistribution(_))
        ));
        assert!(transient_moments(&gpk(1, 1, 1), 0).is_err());
    }

    #[test]
    fn poisson_condition_examples() {
        assert!(is_poisson(&gpk(3, 3, 3)));
        assert!(!is_poisson(&gpk(1, 2, 1)));
        assert_eq!(dispersion_regime(&q(3, 2)), "overdispersed");
        assert_eq!(dispersion_regime(&q(1, 1)), "Poisson");
        assert_eq!(dispersion_regime(&q(2, 3)), "underdispersed");
    }
}
