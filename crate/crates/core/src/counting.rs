//! GEN/PROP/KILL decompositions and exact cascade-free counting.
//!
//! A binary-state operation without negation is fully described, for
//! counting purposes, by the class sizes `(g, t, k)`. The number of
//! cascade-free words of length `L` obeys `a(L) = N a(L-1) - d a(L-2)`
//! with `N = g + t + k` and `d = g * t`, so two decompositions with the
//! same `(N, d)` produce the same sequence.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Class sizes of a binary stateful operation: `g` GEN symbols (force state
/// 1), `t` PROP symbols (keep state), `k` KILL symbols (reset to 0).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GpkDecomposition {
    g: u64,
    t: u64,
    k: u64,
}

impl GpkDecomposition {
    pub fn new(g: u64, t: u64, k: u64) -> Result<Self> {
        let n = g
            .checked_add(t)
            .and_then(|s| s.checked_add(k))
            .ok_or_else(|| Error::InvalidDecomposition("alphabet size overflows u64".into()))?;
        if n == 0 {
            return Err(Error::InvalidDecomposition(
                "alphabet must contain at least one symbol".into(),
            ));
        }
        if g.checked_mul(t).is_none() {
            return Err(Error::InvalidDecomposition("g * t overflows u64".into()));
        }
        Ok(GpkDecomposition { g, t, k })
    }

    pub fn g(&self) -> u64 {
        self.g
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    /// Alphabet size `N = g + t + k`.
    pub fn alphabet(&self) -> u64 {
        self.g + self.t + self.k
    }

    /// Determinant `d = g * t` of the transfer matrix.
    pub fn det(&self) -> u64 {
        self.g * self.t
    }

    /// `N^2 - 4d`, always nonnegative.
    pub fn discriminant(&self) -> BigInt {
        let n = BigInt::from(self.alphabet());
        &n * &n - BigInt::from(4u8) * BigInt::from(self.det())
    }

    pub fn is_degenerate(&self) -> bool {
        self.discriminant().is_zero()
    }

    pub fn is_symmetric(&self) -> bool {
        self.g == self.k
    }

    pub fn transfer_matrix(&self) -> TransferMatrix2 {
        build_transfer_matrix(self)
    }
}

impl fmt::Display for GpkDecomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.g, self.t, self.k)
    }
}

impl FromStr for GpkDecomposition {
    type Err = Error;

    /// Parses `g:t:k`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::InvalidArgument(format!(
                "expected g:t:k, got {s:?}"
            )));
        }
        let mut vals = [0u64; 3];
        for (slot, part) in vals.iter_mut().zip(&parts) {
            *slot = part.trim().parse().map_err(|_| {
                Error::InvalidArgument(format!("{part:?} is not a nonnegative integer"))
            })?;
        }
        GpkDecomposition::new(vals[0], vals[1], vals[2])
    }
}

/// The 2x2 transfer matrix with rows and columns indexed by
/// (rest, generating): `[[k+t, g], [k, g]]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TransferMatrix2 {
    pub entries: [[u64; 2]; 2],
}

impl TransferMatrix2 {
    pub fn trace(&self) -> u64 {
        self.entries[0][0] + self.entries[1][1]
    }

    pub fn det(&self) -> i128 {
        let e = &self.entries;
        e[0][0] as i128 * e[1][1] as i128 - e[0][1] as i128 * e[1][0] as i128
    }

    /// Counts by explicit matrix-vector products: `a(0) = 1`,
    /// `a(L) = v0^T T^(L-1) 1` with `v0` the first row of `T` read as the
    /// admissible first symbols entering each state.
    pub fn count(&self, len: usize) -> CountSequence {
        let e = self.entries.map(|row| row.map(BigUint::from));
        let mut out = Vec::with_capacity(len + 1);
        out.push(BigUint::one());
        // w = T^(j) 1, so a(j+1) = v0 . w
        let mut w = [BigUint::one(), BigUint::one()];
        for _ in 0..len {
            out.push(&e[0][0] * &w[0] + &e[0][1] * &w[1]);
            w = [
                &e[0][0] * &w[0] + &e[0][1] * &w[1],
                &e[1][0] * &w[0] + &e[1][1] * &w[1],
            ];
        }
        CountSequence(out)
    }
}

/// Exact counts `a(0), ..., a(L)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CountSequence(pub Vec<BigUint>);

impl CountSequence {
    pub fn values(&self) -> &[BigUint] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, index: usize) -> Option<&BigUint> {
        self.0.get(index)
    }

    pub fn last(&self) -> Option<&BigUint> {
        self.0.last()
    }

    pub fn into_vec(self) -> Vec<BigUint> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, BigUint> {
        self.0.iter()
    }
}

impl From<Vec<BigUint>> for CountSequence {
    fn from(values: Vec<BigUint>) -> Self {
        CountSequence(values)
    }
}

pub fn build_transfer_matrix(gpk: &GpkDecomposition) -> TransferMatrix2 {
    let (g, t, k) = (gpk.g, gpk.t, gpk.k);
    TransferMatrix2 {
        entries: [[k + t, g], [k, g]],
    }
}

/// `a(0..=len)` from `a(L) = N a(L-1) - d a(L-2)`, `a(0) = 1`, `a(1) = N`.
pub fn count_cascade_free(gpk: &GpkDecomposition, len: usize) -> CountSequence {
    let n = BigUint::from(gpk.alphabet());
    let d = BigUint::from(gpk.det());
    let mut out: Vec<BigUint> = Vec::with_capacity(len + 1);
    out.push(BigUint::one());
    if len >= 1 {
        out.push(n.clone());
    }
    for l in 2..=len {
        // N a(L-1) >= d a(L-2) because a(L-1) >= (N/2) a(L-2) and d <= N^2/4.
        let next = &n * &out[l - 1] - &d * &out[l - 2];
        out.push(next);
    }
    CountSequence(out)
}

/// First `len + 1` Taylor coefficients of `numerator / denominator`.
///
/// The constant term of `denominator` must be a unit (`+-1`) so that every
/// coefficient stays integral.
pub fn series_divide(numerator: &[BigInt], denominator: &[BigInt], len: usize) -> Result<Vec<BigInt>> {
    let lead = denominator
        .first()
        .ok_or_else(|| Error::InvalidArgument("empty denominator".into()))?;
    if !lead.abs().is_one() {
        return Err(Error::InvalidArgument(
            "denominator constant term must be +1 or -1".into(),
        ));
    }
    let mut q: Vec<BigInt> = Vec::with_capacity(len + 1);
    for n in 0..=len {
        let mut acc = numerator.get(n).cloned().unwrap_or_default();
        for (i, c) in denominator.iter().enumerate().skip(1).take(n) {
            acc -= c * &q[n - i];
        }
        q.push(acc * lead);
    }
    Ok(q)
}

/// Coefficients of `1 / (1 - N z + d z^2)`.
pub fn gf_coefficients(gpk: &GpkDecomposition, len: usize) -> CountSequence {
    let den = [
        BigInt::one(),
        -BigInt::from(gpk.alphabet()),
        BigInt::from(gpk.det()),
    ];
    let coeffs = series_divide(&[BigInt::one()], &den, len).expect("unit constant term");
    CountSequence(
        coeffs
            .into_iter()
            .map(|c| c.to_biguint().expect("cascade-free coefficients are nonnegative"))
            .collect(),
    )
}

/// `a(L) / N^L` in lowest terms.
pub fn cascade_free_density(gpk: &GpkDecomposition, len: usize) -> BigRational {
    let seq = count_cascade_free(gpk, len);
    let a = BigInt::from(seq.0[len].clone());
    let denom = num_traits::pow(BigInt::from(gpk.alphabet()), len);
    BigRational::new(a, denom)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gpk(g: u64, t: u64, k: u64) -> GpkDecomposition {
        GpkDecomposition::new(g, t, k).unwrap()
    }

    fn nums(seq: &CountSequence) -> Vec<u64> {
        seq.iter().map(|v| u64::try_from(v).unwrap()).collect()
    }

    #[test]
    fn rejects_empty_alphabet() {
        assert!(matches!(
            GpkDecomposition::new(0, 0, 0),
            Err(Error::InvalidDecomposition(_))
        ));
    }

    #[test]
    fn transfer_matrix_examples() {
        assert_eq!(gpk(1, 1, 1).transfer_matrix().entries, [[2, 1], [1, 1]]);
        assert_eq!(gpk(0, 0, 1).transfer_matrix().entries, [[1, 0], [1, 0]]);
        assert_eq!(gpk(3, 3, 3).transfer_matrix().entries, [[6, 3], [3, 3]]);
        let t = gpk(2, 5, 4).transfer_matrix();
        assert_eq!(t.trace(), 11);
        assert_eq!(t.det(), 10);
    }

    #[test]
    fn recurrence_examples() {
        assert_eq!(nums(&count_cascade_free(&gpk(1, 1, 1), 5)), [1, 3, 8, 21, 55, 144]);
        assert_eq!(
            nums(&count_cascade_free(&gpk(3, 3, 3), 5)),
            [1, 9, 72, 567, 4455, 34992]
        );
        assert_eq!(nums(&count_cascade_free(&gpk(1, 2, 1), 5)), [1, 4, 14, 48, 164, 560]);
        assert_eq!(nums(&count_cascade_free(&gpk(0, 3, 2), 4)), [1, 5, 25, 125, 625]);
    }

    #[test]
    fn zero_length_is_single_one() {
        assert_eq!(nums(&count_cascade_free(&gpk(4, 1, 0), 0)), [1]);
        assert_eq!(nums(&gf_coefficients(&gpk(4, 1, 0), 0)), [1]);
        assert_eq!(nums(&gpk(4, 1, 0).transfer_matrix().count(0)), [1]);
    }

    #[test]
    fn transfer_route_matches_recurrence() {
        for (g, t, k) in [(1, 1, 1), (3, 3, 3), (2, 2, 0), (0, 4, 1), (5, 2, 7)] {
            let d = gpk(g, t, k);
            assert_eq!(d.transfer_matrix().count(25), count_cascade_free(&d, 25));
        }
    }

    #[test]
    fn gf_examples() {
        assert_eq!(nums(&gf_coefficients(&gpk(1, 1, 1), 3)), [1, 3, 8, 21]);
        assert_eq!(nums(&gf_coefficients(&gpk(0, 0, 5), 3)), [1, 5, 25, 125]);
        assert_eq!(nums(&gf_coefficients(&gpk(1, 2, 1), 4)), [1, 4, 14, 48, 164]);
    }

    #[test]
    fn series_divide_rejects_non_unit() {
        let den = [BigInt::from(2), BigInt::from(1)];
        assert!(series_divide(&[BigInt::one()], &den, 3).is_err());
    }

    #[test]
    fn density_examples() {
        assert_eq!(
            cascade_free_density(&gpk(1, 1, 1), 2),
            BigRational::new(8.into(), 9.into())
        );
        assert_eq!(
            cascade_free_density(&gpk(1, 2, 1), 2),
            BigRational::new(7.into(), 8.into())
        );
        assert!(cascade_free_density(&gpk(0, 3, 4), 9).is_one());
        assert!(cascade_free_density(&gpk(1, 1, 1), 0).is_one());
    }

    #[test]
    fn degenerate_closed_form() {
        for half in 1..6u64 {
            let d = gpk(half, half, 0);
            assert!(d.is_degenerate());
            let seq = count_cascade_free(&d, 30);
            for (l, v) in seq.iter().enumerate() {
                let expect = BigUint::from(l as u64 + 1) * num_traits::pow(BigUint::from(half), l);
                assert_eq!(v, &expect);
            }
        }
    }

    #[test]
    fn parses_gpk_strings() {
        assert_eq!("1:2:3".parse::<GpkDecomposition>().unwrap(), gpk(1, 2, 3));
        assert!("1:2".parse::<GpkDecomposition>().is_err());
        assert!("a:2:3".parse::<GpkDecomposition>().is_err());
        assert!("0:0:0".parse::<GpkDecomposition>().is_err());
        assert_eq!(gpk(1, 2, 3).to_string(), "1:2:3");
    }
}
