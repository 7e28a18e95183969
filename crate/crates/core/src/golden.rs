//! Reference tables and the suites that check them.
//!
//! Integer tables must match exactly. The convergence table carries four
//! significant digits for `mu*` (tolerance 5e-5) and three for the rate
//! product (tolerance 5e-3). Coupling values are compared with relative
//! tolerance 1e-3.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::ToPrimitive;

use crate::avoidance::{char_poly, count_avoiding, restrict};
use crate::chebyshev::{chebyshev_u, spectral_data};
use crate::counting::count_cascade_free;
use crate::error::{Error, Result};
use crate::instances::{
    addition_instance, binary_four_sum_instance, doubling_instance, fibonacci_bisection,
    sediment_instance, ternary_three_sum_instance,
};
use crate::markov::{asymptotic_dispersion, dispersion_regime};
use crate::oracle::{brute_count_avoiding, DEFAULT_BUDGET};
use crate::poisson::{poisson_root, DEFAULT_ROOT_TOL};

/// Carry/doubling scaling: `(p, L, a_carry(L), a_dbl(L))`.
pub const SCALING_TABLE: [(u64, usize, u64, u64); 15] = [
    (3, 2, 72, 8),
    (3, 3, 567, 21),
    (3, 4, 4_455, 55),
    (5, 2, 575, 23),
    (5, 3, 13_125, 105),
    (5, 4, 299_375, 479),
    (7, 2, 2_254, 46),
    (7, 3, 103_243, 301),
    (7, 4, 4_727_569, 1_969),
    (11, 2, 14_036, 116),
    (11, 3, 1_625_151, 1_221),
    (11, 4, 188_151_491, 12_851),
    (13, 2, 27_547, 163),
    (13, 3, 4_484_077, 2_041),
    (13, 4, 729_876_355, 25_555),
];

/// Base-3 doubling: `(L, a_dbl(L), F(2L+2), U_L(3/2), a_carry(L))`.
pub const FIBONACCI_TABLE: [(usize, u64, u64, u64, u64); 6] = [
    (0, 1, 1, 1, 1),
    (1, 3, 3, 3, 9),
    (2, 8, 8, 8, 72),
    (3, 21, 21, 21, 567),
    (4, 55, 55, 55, 4_455),
    (5, 144, 144, 144, 34_992),
];

/// Base-2 addition counts (OEIS A007070).
pub const A007070_PREFIX: [u64; 6] = [1, 4, 14, 48, 164, 560];

/// Addition in base `p`: `(p, D_inf numerator, D_inf denominator, regime)`.
pub const DISPERSION_TABLE: [(u64, i64, i64, &str); 4] = [
    (2, 3, 2, "overdispersed"),
    (3, 1, 1, "Poisson"),
    (5, 3, 4, "underdispersed"),
    (7, 2, 3, "underdispersed"),
];

/// `(L, mu*(L), mu*(L) - 1/3, L (mu*(L) - 1/3))`.
pub const CONVERGENCE_TABLE: [(usize, f64, f64, f64); 5] = [
    (5, 0.3792, 4.58e-2, 0.229),
    (10, 0.3525, 1.92e-2, 0.192),
    (20, 0.3422, 8.90e-3, 0.178),
    (50, 0.3368, 3.42e-3, 0.171),
    (100, 0.3350, 1.69e-3, 0.169),
];

pub const CONVERGENCE_MU_TOL: f64 = 5e-5;
pub const CONVERGENCE_RATE_TOL: f64 = 5e-3;

/// `(p, Delta_dbl, x)`.
pub const DISCRIMINANT_TABLE: [(u64, u64, f64); 5] = [
    (2, 2, 1.414),
    (3, 5, 1.500),
    (5, 17, 1.768),
    (7, 37, 2.021),
    (13, 145, 2.653),
];

pub const DISCRIMINANT_X_REL_TOL: f64 = 1e-3;

pub const TERNARY_MATRIX: [[u64; 2]; 2] = [[10, 16], [4, 19]];
pub const BINARY4_MATRIX: [[u64; 3]; 3] = [[5, 10, 1], [1, 10, 5], [0, 5, 10]];
pub const BINARY4_CHARPOLY: [i64; 4] = [1, -25, 165, -280];
pub const BINARY4_PREFIX: [u64; 3] = [1, 16, 255];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    Scaling,
    Fibonacci,
    A007070,
    Dispersion,
    Convergence,
    Discriminant,
    Avoidance,
    All,
}

impl Suite {
    pub const EACH: [Suite; 7] = [
        Suite::Scaling,
        Suite::Fibonacci,
        Suite::A007070,
        Suite::Dispersion,
        Suite::Convergence,
        Suite::Discriminant,
        Suite::Avoidance,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Scaling => "scaling",
            Suite::Fibonacci => "fibonacci",
            Suite::A007070 => "a007070",
            Suite::Dispersion => "dispersion",
            Suite::Convergence => "convergence",
            Suite::Discriminant => "discriminant",
            Suite::Avoidance => "avoidance",
            Suite::All => "all",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::EACH
            .into_iter()
            .chain([Suite::All])
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown suite {s:?}")))
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckRow {
    pub suite: &'static str,
    pub label: String,
    pub expected: String,
    pub actual: String,
    pub pass: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SuiteReport {
    pub rows: Vec<CheckRow>,
}

impl SuiteReport {
    pub fn pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRow> {
        self.rows.iter().filter(|r| !r.pass)
    }

    fn exact<T: PartialEq + fmt::Display>(
        &mut self,
        suite: &'static str,
        label: String,
        expected: T,
        actual: T,
    ) {
        self.rows.push(CheckRow {
            suite,
            label,
            pass: expected == actual,
            expected: expected.to_string(),
            actual: actual.to_string(),
        });
    }

    fn close(&mut self, suite: &'static str, label: String, expected: f64, actual: f64, tol: f64) {
        self.rows.push(CheckRow {
            suite,
            label,
            pass: (expected - actual).abs() <= tol,
            expected: format!("{expected} ± {tol:e}"),
            actual: format!("{actual:.8}"),
        });
    }
}

pub fn run_suite(suite: Suite) -> Result<SuiteReport> {
    let mut report = SuiteReport::default();
    match suite {
        Suite::Scaling => scaling(&mut report)?,
        Suite::Fibonacci => fibonacci(&mut report)?,
        Suite::A007070 => a007070(&mut report)?,
        Suite::Dispersion => dispersion(&mut report)?,
        Suite::Convergence => convergence(&mut report)?,
        Suite::Discriminant => discriminant(&mut report)?,
        Suite::Avoidance => avoidance(&mut report)?,
        Suite::All => {
            for s in Suite::EACH {
                report.rows.extend(run_suite(s)?.rows);
            }
        }
    }
    Ok(report)
}

fn scaling(report: &mut SuiteReport) -> Result<()> {
    const S: &str = "scaling";
    for (p, len, carry, dbl) in SCALING_TABLE {
        let a_carry = count_cascade_free(&addition_instance(p)?, len);
        let a_dbl = count_cascade_free(&doubling_instance(p)?, len);
        let a_carry = a_carry.values()[len].clone();
        let a_dbl = a_dbl.values()[len].clone();
        let scaled = BigUint::from(p).pow(len as u32) * &a_dbl;
        report.exact(S, format!("p={p} L={len} a_carry"), BigUint::from(carry), a_carry);
        report.exact(S, format!("p={p} L={len} a_dbl"), BigUint::from(dbl), a_dbl);
        report.exact(S, format!("p={p} L={len} p^L a_dbl"), BigUint::from(carry), scaled);
    }
    Ok(())
}

fn fibonacci(report: &mut SuiteReport) -> Result<()> {
    const S: &str = "fibonacci";
    let dbl = count_cascade_free(&doubling_instance(3)?, 50);
    let carry = count_cascade_free(&addition_instance(3)?, 5);
    for (len, a_dbl, fib, u, a_carry) in FIBONACCI_TABLE {
        report.exact(S, format!("L={len} a_dbl"), BigUint::from(a_dbl), dbl.values()[len].clone());
        report.exact(S, format!("L={len} F(2L+2)"), BigUint::from(fib), fibonacci_bisection(len as u64));
        report.exact(S, format!("L={len} U_L(3/2)"), u as f64, chebyshev_u(len, 1.5).round());
        report.exact(S, format!("L={len} a_carry"), BigUint::from(a_carry), carry.values()[len].clone());
    }
    let first_bad = (0..=50usize).find(|&l| dbl.values()[l] != fibonacci_bisection(l as u64));
    report.exact(
        S,
        "L=0..50 a_dbl = F(2L+2)".into(),
        "all".to_string(),
        first_bad.map_or("all".to_string(), |l| format!("differs at L={l}")),
    );
    Ok(())
}

fn a007070(report: &mut SuiteReport) -> Result<()> {
    let counts = count_cascade_free(&addition_instance(2)?, A007070_PREFIX.len() - 1);
    for (len, want) in A007070_PREFIX.into_iter().enumerate() {
        report.exact("a007070", format!("L={len}"), BigUint::from(want), counts.values()[len].clone());
    }
    Ok(())
}

fn dispersion(report: &mut SuiteReport) -> Result<()> {
    const S: &str = "dispersion";
    for (p, num, den, regime) in DISPERSION_TABLE {
        let d_inf = asymptotic_dispersion(&addition_instance(p)?)?;
        let want = BigRational::new(BigInt::from(num), BigInt::from(den));
        report.exact(S, format!("p={p} regime"), regime, dispersion_regime(&d_inf));
        report.exact(S, format!("p={p} D_inf"), want, d_inf);
    }
    Ok(())
}

fn convergence(report: &mut SuiteReport) -> Result<()> {
    const S: &str = "convergence";
    for (len, mu, diff, rate) in CONVERGENCE_TABLE {
        let root = poisson_root(len, DEFAULT_ROOT_TOL)?;
        report.close(S, format!("L={len} mu*"), mu, root.mu_star, CONVERGENCE_MU_TOL);
        report.close(S, format!("L={len} mu*-1/3"), diff, root.mu_star - 1.0 / 3.0, CONVERGENCE_MU_TOL);
        report.close(S, format!("L={len} L(mu*-1/3)"), rate, root.rate(), CONVERGENCE_RATE_TOL);
    }
    Ok(())
}

/// The doubling discriminant is read as `Delta_carry / p^2 = (p-1)^2 + 1`,
/// which is the discriminant of the doubling matrix itself for odd `p`.
fn discriminant(report: &mut SuiteReport) -> Result<()> {
    const S: &str = "discriminant";
    for (p, delta, x) in DISCRIMINANT_TABLE {
        let carry = spectral_data(&addition_instance(p)?);
        let p2 = BigInt::from(p * p);
        let reduced = &carry.discriminant / &p2;
        report.exact(S, format!("p={p} p^2 divides Delta_carry"), BigInt::from(0), &carry.discriminant % &p2);
        report.exact(S, format!("p={p} Delta_dbl"), BigInt::from(delta), reduced);
        if p % 2 == 1 {
            let dbl = spectral_data(&doubling_instance(p)?);
            report.exact(S, format!("p={p} doubling matrix Delta"), BigInt::from(delta), dbl.discriminant);
        }
        let actual = carry.coupling.value();
        report.rows.push(CheckRow {
            suite: S,
            label: format!("p={p} x"),
            pass: ((actual - x) / x).abs() <= DISCRIMINANT_X_REL_TOL,
            expected: format!("{x} ± {DISCRIMINANT_X_REL_TOL:e} rel"),
            actual: format!("{actual:.6}"),
        });
    }
    Ok(())
}

fn matrix_string<R: AsRef<[u64]>>(rows: &[R]) -> String {
    let rows: Vec<String> = rows
        .iter()
        .map(|r| {
            let cells: Vec<String> = r.as_ref().iter().map(u64::to_string).collect();
            format!("[{}]", cells.join(","))
        })
        .collect();
    format!("[{}]", rows.join(","))
}

fn avoidance(report: &mut SuiteReport) -> Result<()> {
    const S: &str = "avoidance";
    let ternary = ternary_three_sum_instance();
    let binary4 = binary_four_sum_instance();

    report.exact(
        S,
        "ternary3 restricted matrix".into(),
        matrix_string(&TERNARY_MATRIX),
        matrix_string(&restrict(&ternary).entries),
    );
    report.exact(
        S,
        "binary4 restricted matrix".into(),
        matrix_string(&BINARY4_MATRIX),
        matrix_string(&restrict(&binary4).entries),
    );
    let cp = char_poly(&restrict(&binary4))?;
    let want: Vec<BigInt> = BINARY4_CHARPOLY.iter().map(|&c| BigInt::from(c)).collect();
    report.exact(
        S,
        "binary4 characteristic polynomial".into(),
        format!("{want:?}"),
        format!("{:?}", cp.coeffs),
    );
    let counts = count_avoiding(&binary4, 5);
    for (len, want) in BINARY4_PREFIX.into_iter().enumerate() {
        report.exact(S, format!("binary4 a({len})"), BigUint::from(want), counts.values()[len].clone());
    }
    for len in 0..=3 {
        let fast = count_avoiding(&ternary, len).values()[len].clone();
        let brute = brute_count_avoiding(&ternary, len, DEFAULT_BUDGET)?;
        report.exact(S, format!("ternary3 brute L={len}"), brute, fast);
    }
    for len in 0..=5 {
        let brute = brute_count_avoiding(&binary4, len, DEFAULT_BUDGET)?;
        report.exact(S, format!("binary4 brute L={len}"), brute, counts.values()[len].clone());
    }
    let tilde = restrict(&ternary);
    let trace = tilde.trace().to_f64().unwrap_or(f64::NAN);
    let det = char_poly(&tilde)?.coeffs[2].to_f64().unwrap_or(f64::NAN);
    report.exact(S, "ternary3 trace".into(), 29.0, trace);
    report.exact(S, "ternary3 det".into(), 126.0, det);
    for p in [2u64, 3, 5] {
        let op = sediment_instance(p)?;
        let counts = count_avoiding(&op, 4);
        let base = BigUint::from(p * (p - 1));
        for (len, a) in counts.iter().enumerate() {
            report.exact(S, format!("sediment p={p} L={len}"), base.pow(len as u32), a.clone());
        }
    }
    Ok(())
}
