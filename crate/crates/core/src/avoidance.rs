//! State avoidance on arbitrary finite state spaces.
//!
//! An operation is a table `T[x][state]` of successor states. Forbidding one
//! state leaves a restricted transfer matrix on the remaining `s - 1` states
//! whose powers count the words whose trajectories never hit the forbidden
//! state.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};

use crate::chebyshev::SpectralData;
use crate::counting::{CountSequence, GpkDecomposition};
use crate::error::{Error, Result};

/// Largest restricted matrix accepted by [`char_poly`].
pub const MAX_CHARPOLY_DIM: usize = 64;

/// A finite alphabet acting on `states` states, with one forbidden state and
/// an initial state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StatefulOperation {
    states: usize,
    transitions: Vec<Vec<usize>>,
    forbidden: usize,
    initial: usize,
}

impl StatefulOperation {
    pub fn new(
        states: usize,
        transitions: Vec<Vec<usize>>,
        forbidden: usize,
        initial: usize,
    ) -> Result<Self> {
        if states < 2 {
            return Err(Error::InvalidOperation(format!(
                "need at least 2 states, got {states}"
            )));
        }
        if transitions.is_empty() {
            return Err(Error::InvalidOperation("alphabet is empty".into()));
        }
        for (x, row) in transitions.iter().enumerate() {
            if row.len() != states {
                return Err(Error::InvalidOperation(format!(
                    "symbol {x} has {} transitions, expected {states}",
                    row.len()
                )));
            }
            if let Some(bad) = row.iter().find(|&&to| to >= states) {
                return Err(Error::InvalidOperation(format!(
                    "symbol {x} maps to state {bad}, outside 0..{states}"
                )));
            }
        }
        if forbidden >= states {
            return Err(Error::InvalidOperation(format!(
                "forbidden state {forbidden} outside 0..{states}"
            )));
        }
        if initial >= states {
            return Err(Error::InvalidOperation(format!(
                "initial state {initial} outside 0..{states}"
            )));
        }
        if initial == forbidden {
            return Err(Error::InvalidOperation(
                "initial state equals the forbidden state".into(),
            ));
        }
        Ok(StatefulOperation {
            states,
            transitions,
            forbidden,
            initial,
        })
    }

    pub fn states(&self) -> usize {
        self.states
    }

    pub fn alphabet(&self) -> usize {
        self.transitions.len()
    }

    pub fn transitions(&self) -> &[Vec<usize>] {
        &self.transitions
    }

    pub fn forbidden(&self) -> usize {
        self.forbidden
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    #[inline]
    pub fn step(&self, symbol: usize, state: usize) -> usize {
        self.transitions[symbol][state]
    }

    /// Same operation with a different forbidden state.
    pub fn with_forbidden(&self, forbidden: usize) -> Result<Self> {
        StatefulOperation::new(self.states, self.transitions.clone(), forbidden, self.initial)
    }

    /// Conjugates by the state relabeling `old -> perm[old]`.
    pub fn relabeled(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.states {
            return Err(Error::InvalidArgument("permutation length differs from state count".into()));
        }
        let mut seen = vec![false; self.states];
        for &p in perm {
            if p >= self.states || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidArgument("not a permutation".into()));
            }
        }
        let transitions = self
            .transitions
            .iter()
            .map(|row| {
                let mut out = vec![0; self.states];
                for (from, &to) in row.iter().enumerate() {
                    out[perm[from]] = perm[to];
                }
                out
            })
            .collect();
        StatefulOperation::new(
            self.states,
            transitions,
            perm[self.forbidden],
            perm[self.initial],
        )
    }
}

/// Binary-state realisation of a decomposition: symbols `[0, g)` are GEN,
/// `[g, g+t)` PROP, `[g+t, N)` KILL; state 1 is forbidden.
pub fn gpk_operation(gpk: &GpkDecomposition) -> StatefulOperation {
    let (g, t) = (gpk.g() as usize, gpk.t() as usize);
    let transitions = (0..gpk.alphabet() as usize)
        .map(|x| {
            if x < g {
                vec![1, 1]
            } else if x < g + t {
                vec![0, 1]
            } else {
                vec![0, 0]
            }
        })
        .collect();
    StatefulOperation::new(2, transitions, 1, 0).expect("valid binary table")
}

/// Three-state lift whose avoidance count is the cascade-free count: state
/// 0 is "no carry", 1 is "carry", and 2 records a PROP symbol that received
/// a carry. The restricted matrix is exactly `[[k+t, g], [k, g]]`.
pub fn cascade_free_lift(gpk: &GpkDecomposition) -> StatefulOperation {
    let (g, t) = (gpk.g() as usize, gpk.t() as usize);
    let transitions = (0..gpk.alphabet() as usize)
        .map(|x| {
            if x < g {
                vec![1, 1, 2]
            } else if x < g + t {
                vec![0, 2, 2]
            } else {
                vec![0, 0, 2]
            }
        })
        .collect();
    StatefulOperation::new(3, transitions, 2, 0).expect("valid lift table")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RestrictedTransferMatrix {
    /// `entries[i][j]` counts symbols taking `states[i]` to `states[j]`.
    pub entries: Vec<Vec<u64>>,
    /// Original state label of each row/column.
    pub states: Vec<usize>,
}

impl RestrictedTransferMatrix {
    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn index_of(&self, state: usize) -> Option<usize> {
        self.states.iter().position(|&s| s == state)
    }

    pub fn row_sums(&self) -> Vec<u64> {
        self.entries.iter().map(|r| r.iter().sum()).collect()
    }

    pub fn trace(&self) -> BigInt {
        (0..self.dim()).map(|i| BigInt::from(self.entries[i][i])).sum()
    }

    fn big(&self) -> Vec<Vec<BigInt>> {
        self.entries
            .iter()
            .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
            .collect()
    }
}

pub fn restrict(op: &StatefulOperation) -> RestrictedTransferMatrix {
    let states: Vec<usize> = (0..op.states()).filter(|&s| s != op.forbidden()).collect();
    let mut index = vec![usize::MAX; op.states()];
    for (i, &s) in states.iter().enumerate() {
        index[s] = i;
    }
    let dim = states.len();
    let mut entries = vec![vec![0u64; dim]; dim];
    for row in op.transitions() {
        for (i, &from) in states.iter().enumerate() {
            let to = row[from];
            if to != op.forbidden() {
                entries[i][index[to]] += 1;
            }
        }
    }
    RestrictedTransferMatrix { entries, states }
}

/// `a(L) = e_init^T T^L 1` for `L = 0..=len`, by iterated row-vector
/// products.
pub fn count_avoiding(op: &StatefulOperation, len: usize) -> CountSequence {
    let m = restrict(op);
    let dim = m.dim();
    let entries: Vec<Vec<BigUint>> = m
        .entries
        .iter()
        .map(|r| r.iter().map(|&v| BigUint::from(v)).collect())
        .collect();
    let start = m.index_of(op.initial()).expect("initial state is not forbidden");
    let mut row = vec![BigUint::zero(); dim];
    row[start] = BigUint::one();
    let mut out = Vec::with_capacity(len + 1);
    out.push(BigUint::one());
    for _ in 0..len {
        let mut next = vec![BigUint::zero(); dim];
        for (i, ri) in row.iter().enumerate() {
            if ri.is_zero() {
                continue;
            }
            for (j, e) in entries[i].iter().enumerate() {
                if !e.is_zero() {
                    next[j] += ri * e;
                }
            }
        }
        row = next;
        out.push(row.iter().sum());
    }
    CountSequence(out)
}

/// Monic characteristic polynomial `lambda^n + c1 lambda^(n-1) + ... + cn`,
/// stored as `[1, c1, ..., cn]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CharPoly {
    pub coeffs: Vec<BigInt>,
}

impl CharPoly {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .fold(BigInt::zero(), |acc, c| acc * x + c)
    }
}

impl fmt::Display for CharPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.degree();
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let pow = n - i;
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c.is_negative() { '-' } else { '+' })?;
            }
            first = false;
            if !mag.is_one() || pow == 0 {
                write!(f, "{mag}")?;
            }
            match pow {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{pow}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Faddeev-LeVerrier over the integers. Every division by `k` is exact
/// because the coefficients of an integer matrix's characteristic
/// polynomial are integers.
pub fn char_poly(m: &RestrictedTransferMatrix) -> Result<CharPoly> {
    let n = m.dim();
    if n > MAX_CHARPOLY_DIM {
        return Err(Error::DimensionTooLarge(n, MAX_CHARPOLY_DIM));
    }
    let a = m.big();
    let mut coeffs = vec![BigInt::zero(); n + 1];
    coeffs[0] = BigInt::one();
    // aux = M_k; start with M_1 = I
    let mut aux: Vec<Vec<BigInt>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect();
    for (k, coeff) in coeffs.iter_mut().enumerate().skip(1) {
        let prod = mat_mul(&a, &aux);
        let tr: BigInt = (0..n).map(|i| prod[i][i].clone()).sum();
        let c = -tr / BigInt::from(k);
        aux = prod;
        for (i, row) in aux.iter_mut().enumerate() {
            row[i] += &c;
        }
        *coeff = c;
    }
    Ok(CharPoly { coeffs })
}

fn mat_mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let n = a.len();
    let mut out = vec![vec![BigInt::zero(); n]; n];
    for i in 0..n {
        for (k, aik) in a[i].iter().enumerate() {
            if aik.is_zero() {
                continue;
            }
            for j in 0..n {
                out[i][j] += aik * &b[k][j];
            }
        }
    }
    out
}

/// Extends `seed` to indices `0..=len` with
/// `a(L) = -c1 a(L-1) - ... - cn a(L-n)`.
pub fn recurrence_from_charpoly(cp: &CharPoly, seed: &CountSequence, len: usize) -> Result<CountSequence> {
    let deg = cp.degree();
    if seed.len() < deg.max(1) {
        return Err(Error::SeedTooShort {
            got: seed.len(),
            need: deg.max(1),
        });
    }
    let mut out: Vec<BigInt> = seed.iter().take(len + 1).map(|v| BigInt::from(v.clone())).collect();
    while out.len() <= len {
        let l = out.len();
        let mut next = BigInt::zero();
        for (i, c) in cp.coeffs.iter().enumerate().skip(1) {
            next -= c * &out[l - i];
        }
        out.push(next);
    }
    out.into_iter()
        .enumerate()
        .map(|(i, v)| v.to_biguint().ok_or(Error::NegativeTerm(i)))
        .collect::<Result<Vec<_>>>()
        .map(CountSequence)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniversalityReport {
    pub charpoly_equal: bool,
    /// Initial terms `a(0..dim-1)` agree.
    pub seeds_equal: bool,
    pub counts_equal: bool,
    pub first_mismatch: Option<usize>,
    pub lmax: usize,
}

impl UniversalityReport {
    /// Matching polynomials plus matching seeds must force matching counts.
    pub fn consistent(&self) -> bool {
        !(self.charpoly_equal && self.seeds_equal) || self.counts_equal
    }

    pub fn equal(&self) -> bool {
        self.charpoly_equal && self.counts_equal
    }
}

pub fn universality_equal(
    a: &StatefulOperation,
    b: &StatefulOperation,
    lmax: usize,
) -> Result<UniversalityReport> {
    if a.states() != b.states() {
        return Err(Error::StateCountMismatch(a.states(), b.states()));
    }
    let cpa = char_poly(&restrict(a))?;
    let cpb = char_poly(&restrict(b))?;
    let dim = cpa.degree();
    let ca = count_avoiding(a, lmax.max(dim));
    let cb = count_avoiding(b, lmax.max(dim));
    let seeds_equal = ca.values()[..dim.max(1)] == cb.values()[..dim.max(1)];
    let first_mismatch = (0..=lmax).find(|&l| ca.values()[l] != cb.values()[l]);
    Ok(UniversalityReport {
        charpoly_equal: cpa == cpb,
        seeds_equal,
        counts_equal: first_mismatch.is_none(),
        first_mismatch,
        lmax,
    })
}

/// Coupling data of the 2x2 restricted matrix of a three-state operation.
pub fn chebyshev3(op: &StatefulOperation) -> Result<SpectralData> {
    if op.states() != 3 {
        return Err(Error::NotApplicable(format!(
            "needs 3 states, operation has {}",
            op.states()
        )));
    }
    let m = restrict(op);
    let e = &m.entries;
    let trace = BigInt::from(e[0][0]) + BigInt::from(e[1][1]);
    let det = BigInt::from(e[0][0]) * BigInt::from(e[1][1]) - BigInt::from(e[0][1]) * BigInt::from(e[1][0]);
    if !det.is_positive() {
        return Err(Error::NotApplicable(format!(
            "restricted determinant is {det}, must be positive"
        )));
    }
    SpectralData::from_trace_det(trace, det)
}

/// Reads off `(g, t, k)` from a binary-state table.
pub fn gpk_classify(op: &StatefulOperation) -> Result<GpkDecomposition> {
    if op.states() != 2 {
        return Err(Error::NotBinaryState(op.states()));
    }
    let (mut g, mut t, mut k) = (0u64, 0u64, 0u64);
    for (x, row) in op.transitions().iter().enumerate() {
        match (row[0], row[1]) {
            (1, 1) => g += 1,
            (0, 1) => t += 1,
            (0, 0) => k += 1,
            _ => return Err(Error::NegationPresent(x)),
        }
    }
    GpkDecomposition::new(g, t, k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::count_cascade_free;
    use crate::instances::{binary_four_sum_instance, sediment_instance, ternary_three_sum_instance};

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn nums(seq: &CountSequence) -> Vec<u64> {
        seq.iter().map(|v| u64::try_from(v).unwrap()).collect()
    }

    fn matrix_op(entries: &[[u64; 2]; 2]) -> StatefulOperation {
        // realise a 2x2 restricted matrix on states {0,1} with forbidden 2
        let mut rows = Vec::new();
        let total = entries.iter().map(|r| r.iter().sum::<u64>()).max().unwrap();
        for x in 0..total {
            let mut row = vec![2, 2, 2];
            for from in 0..2 {
                let [to0, to1] = entries[from];
                row[from] = if x < to0 {
                    0
                } else if x < to0 + to1 {
                    1
                } else {
                    2
                };
            }
            rows.push(row);
        }
        StatefulOperation::new(3, rows, 2, 0).unwrap()
    }

    #[test]
    fn validates_tables() {
        assert!(StatefulOperation::new(1, vec![vec![0]], 0, 0).is_err());
        assert!(StatefulOperation::new(2, vec![], 1, 0).is_err());
        assert!(StatefulOperation::new(2, vec![vec![0, 2]], 1, 0).is_err());
        assert!(StatefulOperation::new(2, vec![vec![0]], 1, 0).is_err());
        assert!(StatefulOperation::new(2, vec![vec![0, 1]], 0, 0).is_err());
        assert!(StatefulOperation::new(2, vec![vec![0, 1]], 2, 0).is_err());
    }

    #[test]
    fn restrict_examples() {
        assert_eq!(restrict(&ternary_three_sum_instance()).entries, [[10, 16], [4, 19]]);
        assert_eq!(
            restrict(&binary_four_sum_instance()).entries,
            [[5, 10, 1], [1, 10, 5], [0, 5, 10]]
        );
        assert_eq!(restrict(&sediment_instance(3).unwrap()).entries, [[3, 3], [3, 3]]);
    }

    #[test]
    fn count_examples() {
        // 25*255 - 165*16 + 280 = 4015
        assert_eq!(nums(&count_avoiding(&binary_four_sum_instance(), 3)), [1, 16, 255, 4015]);
        assert_eq!(nums(&count_avoiding(&ternary_three_sum_instance(), 2)), [1, 26, 628]);
        assert_eq!(nums(&count_avoiding(&sediment_instance(5).unwrap(), 3)), [1, 20, 400, 8000]);
    }

    #[test]
    fn charpoly_examples() {
        let cp = char_poly(&restrict(&binary_four_sum_instance())).unwrap();
        assert_eq!(cp.coeffs, big(&[1, -25, 165, -280]));
        assert_eq!(cp.to_string(), "x^3 - 25x^2 + 165x - 280");
        let cp = char_poly(&restrict(&ternary_three_sum_instance())).unwrap();
        assert_eq!(cp.coeffs, big(&[1, -29, 126]));
        let one = RestrictedTransferMatrix {
            entries: vec![vec![7]],
            states: vec![0],
        };
        assert_eq!(char_poly(&one).unwrap().coeffs, big(&[1, -7]));
    }

    #[test]
    fn charpoly_rejects_large() {
        let n = MAX_CHARPOLY_DIM + 1;
        let m = RestrictedTransferMatrix {
            entries: vec![vec![1; n]; n],
            states: (0..n).collect(),
        };
        assert_eq!(char_poly(&m), Err(Error::DimensionTooLarge(n, MAX_CHARPOLY_DIM)));
    }

    #[test]
    fn recurrence_examples() {
        let cp = CharPoly { coeffs: big(&[1, -25, 165, -280]) };
        let seed = CountSequence(vec![1u32.into(), 16u32.into(), 255u32.into()]);
        assert_eq!(nums(&recurrence_from_charpoly(&cp, &seed, 3).unwrap()), [1, 16, 255, 4015]);

        let cp = CharPoly { coeffs: big(&[1, -29, 126]) };
        let seed = CountSequence(vec![1u32.into(), 26u32.into()]);
        assert_eq!(nums(&recurrence_from_charpoly(&cp, &seed, 2).unwrap()), [1, 26, 628]);

        let cp = CharPoly { coeffs: big(&[1, -5]) };
        let seed = CountSequence(vec![1u32.into()]);
        assert_eq!(nums(&recurrence_from_charpoly(&cp, &seed, 4).unwrap()), [1, 5, 25, 125, 625]);

        let cp = CharPoly { coeffs: big(&[1, -25, 165, -280]) };
        assert_eq!(
            recurrence_from_charpoly(&cp, &CountSequence(vec![1u32.into()]), 5),
            Err(Error::SeedTooShort { got: 1, need: 3 })
        );
    }

    #[test]
    fn recurrence_reports_negative_terms() {
        let cp = CharPoly { coeffs: big(&[1, 0, 1]) };
        let seed = CountSequence(vec![1u32.into(), 0u32.into()]);
        assert_eq!(recurrence_from_charpoly(&cp, &seed, 3), Err(Error::NegativeTerm(2)));
    }

    #[test]
    fn universality_examples() {
        let tern = ternary_three_sum_instance();
        let r = universality_equal(&tern, &tern, 20).unwrap();
        assert!(r.equal() && r.consistent());

        let a = cascade_free_lift(&GpkDecomposition::new(1, 4, 1).unwrap());
        let b = cascade_free_lift(&GpkDecomposition::new(2, 2, 2).unwrap());
        assert_eq!(char_poly(&restrict(&a)).unwrap().coeffs, big(&[1, -6, 4]));
        let r = universality_equal(&a, &b, 30).unwrap();
        assert!(r.charpoly_equal && r.seeds_equal && r.counts_equal);

        assert_eq!(
            universality_equal(&binary_four_sum_instance(), &tern, 5),
            Err(Error::StateCountMismatch(4, 3))
        );
    }

    #[test]
    fn universality_needs_matching_seeds() {
        // same trace/det as the ternary matrix but transposed rows: the
        // polynomials agree, a(1) does not
        let swapped = matrix_op(&[[19, 4], [16, 10]]);
        let r = universality_equal(&ternary_three_sum_instance(), &swapped, 10).unwrap();
        assert!(r.charpoly_equal);
        assert!(!r.seeds_equal);
        assert!(!r.counts_equal);
        assert_eq!(r.first_mismatch, Some(1));
        assert!(r.consistent());
    }

    #[test]
    fn chebyshev3_examples() {
        let s = chebyshev3(&ternary_three_sum_instance()).unwrap();
        assert!((s.coupling.value() - 29.0 / (2.0 * 126f64.sqrt())).abs() < 1e-12);
        assert!((s.coupling.value() - 1.292).abs() < 5e-4);
        assert_eq!(s.discriminant, BigInt::from(337));

        assert!(matches!(
            chebyshev3(&sediment_instance(3).unwrap()),
            Err(Error::NotApplicable(_))
        ));
        let diag = matrix_op(&[[2, 0], [0, 2]]);
        let s = chebyshev3(&diag).unwrap();
        assert!(s.degenerate);
        assert_eq!(s.coupling.value(), 1.0);
        assert!(matches!(chebyshev3(&binary_four_sum_instance()), Err(Error::NotApplicable(_))));
    }

    #[test]
    fn classify_examples() {
        let dbl3 = crate::instances::doubling_operation(3).unwrap();
        assert_eq!(gpk_classify(&dbl3).unwrap(), GpkDecomposition::new(1, 1, 1).unwrap());
        let swap = StatefulOperation::new(2, vec![vec![0, 0], vec![1, 0]], 1, 0).unwrap();
        assert_eq!(gpk_classify(&swap), Err(Error::NegationPresent(1)));
        assert_eq!(gpk_classify(&ternary_three_sum_instance()), Err(Error::NotBinaryState(3)));
    }

    #[test]
    fn classify_inverts_gpk_operation() {
        for (g, t, k) in [(0, 0, 1), (2, 3, 4), (5, 0, 0), (1, 1, 1)] {
            let d = GpkDecomposition::new(g, t, k).unwrap();
            assert_eq!(gpk_classify(&gpk_operation(&d)).unwrap(), d);
        }
    }

    #[test]
    fn lift_counts_cascade_free_words() {
        for (g, t, k) in [(1, 1, 1), (3, 3, 3), (2, 2, 0), (1, 2, 1), (0, 5, 2), (4, 1, 3)] {
            let d = GpkDecomposition::new(g, t, k).unwrap();
            let lift = cascade_free_lift(&d);
            assert_eq!(restrict(&lift).entries, [[k + t, g], [k, g]]);
            assert_eq!(count_avoiding(&lift, 30), count_cascade_free(&d, 30));
        }
    }

    #[test]
    fn pure_avoidance_on_two_states() {
        // from state 0, state 1 is avoided iff no GEN symbol ever appears
        let d = GpkDecomposition::new(2, 3, 4).unwrap();
        let seq = count_avoiding(&gpk_operation(&d), 6);
        assert_eq!(nums(&seq), [1, 7, 49, 343, 2401, 16807, 117649]);
    }

    #[test]
    fn relabel_rejects_bad_permutations() {
        let op = ternary_three_sum_instance();
        assert!(op.relabeled(&[0, 0, 1]).is_err());
        assert!(op.relabeled(&[0, 1]).is_err());
        assert_eq!(op.relabeled(&[0, 1, 2]).unwrap(), op);
    }
}
