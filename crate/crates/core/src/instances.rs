//! Concrete arithmetic operations: digit-wise addition and doubling in base
//! `p`, multi-operand sums, and the sediment model on `Z/pZ`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::avoidance::StatefulOperation;
use crate::counting::{count_cascade_free, GpkDecomposition};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InstanceKind {
    Addition,
    Doubling,
    TernaryThreeSum,
    BinaryFourSum,
    Sediment,
}

impl InstanceKind {
    pub fn name(&self) -> &'static str {
        match self {
            InstanceKind::Addition => "carry",
            InstanceKind::Doubling => "dbl",
            InstanceKind::TernaryThreeSum => "ternary3",
            InstanceKind::BinaryFourSum => "binary4",
            InstanceKind::Sediment => "sediment",
        }
    }

    /// Base forced by the instance, if any.
    pub fn fixed_base(&self) -> Option<u64> {
        match self {
            InstanceKind::TernaryThreeSum => Some(3),
            InstanceKind::BinaryFourSum => Some(2),
            _ => None,
        }
    }
}

impl FromStr for InstanceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "carry" | "addition" => InstanceKind::Addition,
            "dbl" | "doubling" => InstanceKind::Doubling,
            "ternary3" => InstanceKind::TernaryThreeSum,
            "binary4" => InstanceKind::BinaryFourSum,
            "sediment" => InstanceKind::Sediment,
            other => return Err(Error::InvalidArgument(format!("unknown instance {other:?}"))),
        })
    }
}

impl fmt::Display for InstanceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// What an instance resolves to: a GEN/PROP/KILL decomposition for the
/// binary-carry instances, a general operation for the avoidance ones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Instance {
    Gpk(GpkDecomposition),
    Operation(StatefulOperation),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct InstanceDescriptor {
    kind: InstanceKind,
    base: u64,
}

impl InstanceDescriptor {
    pub fn new(kind: InstanceKind, base: Option<u64>) -> Result<Self> {
        let base = match (kind.fixed_base(), base) {
            (Some(fixed), None) => fixed,
            (Some(fixed), Some(b)) if b == fixed => fixed,
            (Some(fixed), Some(b)) => {
                return Err(Error::InvalidArgument(format!(
                    "{kind} is defined only for base {fixed}, got {b}"
                )))
            }
            (None, Some(b)) if b >= 2 => b,
            (None, Some(b)) => return Err(Error::InvalidBase(b)),
            (None, None) => {
                return Err(Error::InvalidArgument(format!("{kind} needs a base")))
            }
        };
        Ok(InstanceDescriptor { kind, base })
    }

    pub fn kind(&self) -> InstanceKind {
        self.kind
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    pub fn build(&self) -> Result<Instance> {
        Ok(match self.kind {
            InstanceKind::Addition => Instance::Gpk(addition_instance(self.base)?),
            InstanceKind::Doubling => Instance::Gpk(doubling_instance(self.base)?),
            InstanceKind::TernaryThreeSum => Instance::Operation(ternary_three_sum_instance()),
            InstanceKind::BinaryFourSum => Instance::Operation(binary_four_sum_instance()),
            InstanceKind::Sediment => Instance::Operation(sediment_instance(self.base)?),
        })
    }
}

fn check_base(p: u64) -> Result<()> {
    if p < 2 {
        Err(Error::InvalidBase(p))
    } else {
        Ok(())
    }
}

/// Two-operand addition: pairs with `a + b >= p` generate, `a + b = p - 1`
/// propagate, the rest kill.
pub fn addition_instance(p: u64) -> Result<GpkDecomposition> {
    check_base(p)?;
    let half = p * (p - 1) / 2;
    GpkDecomposition::new(half, p, half)
}

/// Doubling: digit `d` generates iff `2d >= p`, propagates iff `2d = p - 1`,
/// kills iff `2d <= p - 2`. Even bases have no propagating digit.
pub fn doubling_instance(p: u64) -> Result<GpkDecomposition> {
    check_base(p)?;
    let g = p / 2;
    let t = p % 2;
    GpkDecomposition::new(g, t, p - g - t)
}

/// Binary-state table for doubling: `T_d(c) = floor((2d + c) / p)`.
pub fn doubling_operation(p: u64) -> Result<StatefulOperation> {
    check_base(p)?;
    let transitions = (0..p)
        .map(|d| (0..2).map(|c| ((2 * d + c) / p) as usize).collect())
        .collect();
    StatefulOperation::new(2, transitions, 1, 0)
}

/// Column addition of `operands` digits in base `p` with carry state.
///
/// Symbols are digit tuples in lexicographic order; the carry never exceeds
/// `operands - 1`, so there are `operands` states. The top carry is
/// forbidden and the initial carry is 0.
pub fn multi_sum_operation(p: u64, operands: u32) -> Result<StatefulOperation> {
    check_base(p)?;
    if operands < 2 {
        return Err(Error::InvalidArgument("need at least two operands".into()));
    }
    let states = operands as usize;
    let symbols = p
        .checked_pow(operands)
        .filter(|&n| n <= 1 << 24)
        .ok_or_else(|| Error::InvalidArgument(format!("{p}^{operands} symbols is too many")))?;
    let transitions = (0..symbols)
        .map(|mut code| {
            let mut digit_sum = 0;
            for _ in 0..operands {
                digit_sum += code % p;
                code /= p;
            }
            (0..states as u64)
                .map(|c| ((digit_sum + c) / p) as usize)
                .collect()
        })
        .collect();
    StatefulOperation::new(states, transitions, states - 1, 0)
}

/// Three ternary digits per column, double carry forbidden.
pub fn ternary_three_sum_instance() -> StatefulOperation {
    multi_sum_operation(3, 3).expect("fixed instance")
}

/// Four binary digits per column, triple carry forbidden.
pub fn binary_four_sum_instance() -> StatefulOperation {
    multi_sum_operation(2, 4).expect("fixed instance")
}

/// `T_(a,b)(s) = s + a + b mod p` on `Z/pZ`, forbidding state `p - 1`.
pub fn sediment_instance(p: u64) -> Result<StatefulOperation> {
    check_base(p)?;
    sediment_with_forbidden(p, p - 1)
}

/// The sediment model with an arbitrary forbidden state. The initial state
/// is 0, or 1 when 0 itself is forbidden.
pub fn sediment_with_forbidden(p: u64, forbidden: u64) -> Result<StatefulOperation> {
    check_base(p)?;
    if p > 4096 {
        return Err(Error::InvalidArgument(format!("sediment base {p} is too large")));
    }
    let transitions = (0..p * p)
        .map(|code| {
            let (a, b) = (code / p, code % p);
            (0..p).map(|s| ((s + a + b) % p) as usize).collect()
        })
        .collect();
    let initial = if forbidden == 0 { 1 } else { 0 };
    StatefulOperation::new(p as usize, transitions, forbidden as usize, initial)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScalingRow {
    pub len: usize,
    pub carry: BigUint,
    pub doubling: BigUint,
    pub scaled: BigUint,
    pub pass: bool,
}

/// Tests `a_carry(L) = p^L a_dbl(L)` for every `L <= lmax`.
pub fn scaling_law_check(p: u64, lmax: usize) -> Result<Vec<ScalingRow>> {
    let carry = count_cascade_free(&addition_instance(p)?, lmax);
    let dbl = count_cascade_free(&doubling_instance(p)?, lmax);
    let base = BigUint::from(p);
    let mut power = BigUint::one();
    let mut rows = Vec::with_capacity(lmax + 1);
    for (len, (c, d)) in carry.into_vec().into_iter().zip(dbl.into_vec()).enumerate() {
        let scaled = &power * &d;
        rows.push(ScalingRow {
            len,
            pass: c == scaled,
            carry: c,
            doubling: d,
            scaled,
        });
        power *= &base;
    }
    Ok(rows)
}

/// `F(2L + 2)` by fast doubling, independent of any transfer matrix.
pub fn fibonacci_bisection(len: u64) -> BigUint {
    fibonacci_pair(2 * len + 2).0
}

/// `(F(n), F(n + 1))`.
fn fibonacci_pair(n: u64) -> (BigUint, BigUint) {
    if n == 0 {
        return (BigUint::zero(), BigUint::one());
    }
    let (a, b) = fibonacci_pair(n / 2);
    // F(2m) = F(m) (2F(m+1) - F(m)), F(2m+1) = F(m)^2 + F(m+1)^2
    let c = &a * (&b + &b - &a);
    let d = &a * &a + &b * &b;
    if n.is_multiple_of(2) {
        (c, d)
    } else {
        let e = &c + &d;
        (d, e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KummerCount {
    pub total: u32,
    /// Positions whose digit sum alone reaches `p`.
    pub generated: u32,
    /// Positions with digit sum `p - 1` that receive a carry.
    pub propagated: u32,
}

/// Carries in the base-`p` addition `m + n`, split into generated and
/// propagated ones. The total is the `p`-adic valuation of `C(m+n, m)`.
pub fn kummer_carry_count(m: u64, n: u64, p: u64) -> Result<KummerCount> {
    if !primal_check::miller_rabin(p) {
        return Err(Error::NotPrime(p));
    }
    let (mut m, mut n) = (m as u128, n as u128);
    let p = p as u128;
    let mut carry = 0u128;
    let (mut generated, mut propagated) = (0, 0);
    while m > 0 || n > 0 {
        let s = m % p + n % p;
        if s >= p {
            generated += 1;
            carry = 1;
        } else if s == p - 1 && carry == 1 {
            propagated += 1;
        } else {
            carry = 0;
        }
        m /= p;
        n /= p;
    }
    Ok(KummerCount {
        total: generated + propagated,
        generated,
        propagated,
    })
}
