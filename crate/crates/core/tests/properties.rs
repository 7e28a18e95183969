mod common;

use cascade_core::avoidance::{
    cascade_free_lift, count_avoiding, gpk_classify, gpk_operation, universality_equal,
    StatefulOperation,
};
use cascade_core::chebyshev::{spectral_data, verify_chebyshev_representation, Coupling};
use cascade_core::counting::{cascade_free_density, count_cascade_free, gf_coefficients, GpkDecomposition};
use cascade_core::instances::{kummer_carry_count, scaling_law_check};
use cascade_core::markov::{
    asymptotic_dispersion, is_poisson, markov_chain, stationary_moments, transient_moments,
};
use cascade_core::oracle::{brute_count_avoiding, monte_carlo_dispersion};
use cascade_core::output::{Format, Table};
use cascade_core::poisson::{
    asymptotic_expansion_check, symmetric_asymptotic_dispersion, symmetric_poisson_decomposition,
};
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use proptest::prelude::*;

use common::{class_walk_count, direct_transient_dispersion, legendre_binomial_valuation, q};

fn gpk_strategy(max: u64) -> impl Strategy<Value = GpkDecomposition> {
    (0..=max, 0..=max, 0..=max)
        .prop_filter("nonempty alphabet", |(g, t, k)| g + t + k > 0)
        .prop_map(|(g, t, k)| GpkDecomposition::new(g, t, k).unwrap())
}

fn operation_strategy() -> impl Strategy<Value = StatefulOperation> {
    (2usize..=4, 1usize..=4)
        .prop_flat_map(|(states, alphabet)| {
            (
                Just(states),
                proptest::collection::vec(proptest::collection::vec(0..states, states), alphabet),
                0..states,
                0..states - 1,
            )
        })
        .prop_map(|(states, transitions, forbidden, init)| {
            let initial = if init >= forbidden { init + 1 } else { init };
            StatefulOperation::new(states, transitions, forbidden, initial).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn three_count_routes_agree(gpk in gpk_strategy(6), len in 0usize..30) {
        let rec = count_cascade_free(&gpk, len);
        prop_assert_eq!(&rec, &gpk.transfer_matrix().count(len));
        prop_assert_eq!(&rec, &gf_coefficients(&gpk, len));
        prop_assert_eq!(&rec, &count_avoiding(&cascade_free_lift(&gpk), len));
    }

    #[test]
    fn class_walk_agrees(gpk in gpk_strategy(4), len in 0usize..7) {
        let rec = count_cascade_free(&gpk, len);
        prop_assert_eq!(&rec.values()[len], &class_walk_count(gpk.g(), gpk.t(), gpk.k(), len));
    }

    #[test]
    fn universality_over_equal_invariants(gpk in gpk_strategy(8)) {
        let (n, d) = (gpk.alphabet(), gpk.det());
        let reference = count_cascade_free(&gpk, 50);
        for g in 0..=n {
            for t in 0..=n - g {
                if g * t != d {
                    continue;
                }
                let other = GpkDecomposition::new(g, t, n - g - t).unwrap();
                prop_assert_eq!(&count_cascade_free(&other, 50), &reference);
                let rep = universality_equal(&cascade_free_lift(&gpk), &cascade_free_lift(&other), 50).unwrap();
                prop_assert!(rep.equal());
            }
        }
    }

    #[test]
    fn universality_report_is_consistent(a in operation_strategy(), b in operation_strategy()) {
        if a.states() == b.states() {
            let rep = universality_equal(&a, &b, 12).unwrap();
            prop_assert!(rep.consistent());
        }
    }

    #[test]
    fn relabeling_preserves_counts(op in operation_strategy(), seed in any::<u64>()) {
        let mut perm: Vec<usize> = (0..op.states()).collect();
        let mut s = seed;
        for i in (1..perm.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        let moved = op.relabeled(&perm).unwrap();
        prop_assert_eq!(count_avoiding(&op, 12), count_avoiding(&moved, 12));
    }

    #[test]
    fn avoidance_matches_enumeration(op in operation_strategy(), len in 0usize..6) {
        let brute = brute_count_avoiding(&op, len, 1 << 20).unwrap();
        let fast = count_avoiding(&op, len);
        prop_assert_eq!(&fast.values()[len], &brute);
    }

    #[test]
    fn classify_inverts_binary_realisation(gpk in gpk_strategy(6)) {
        prop_assert_eq!(gpk_classify(&gpk_operation(&gpk)).unwrap(), gpk);
    }

    #[test]
    fn coupling_at_least_one(gpk in gpk_strategy(20)) {
        let s = spectral_data(&gpk);
        match s.coupling {
            Coupling::Finite(x) => prop_assert!(x >= 1.0 - 1e-12),
            Coupling::Infinite => prop_assert_eq!(gpk.det(), 0),
        }
        prop_assert_eq!(s.degenerate, gpk.alphabet().pow(2) == 4 * gpk.det());
        prop_assert!(s.lambda1 >= s.lambda2);
    }

    #[test]
    fn density_never_increases(gpk in gpk_strategy(6), len in 1usize..40) {
        prop_assert!(cascade_free_density(&gpk, len) <= cascade_free_density(&gpk, len - 1));
    }

    #[test]
    fn kummer_matches_legendre(m in 0u64..1 << 40, n in 0u64..1 << 40, pi in 0usize..6) {
        let p = [2u64, 3, 5, 7, 11, 13][pi];
        let c = kummer_carry_count(m, n, p).unwrap();
        prop_assert_eq!(c.total, legendre_binomial_valuation(m, n, p));
        prop_assert_eq!(c.total, c.generated + c.propagated);
    }

    #[test]
    fn transient_matches_direct_sum(gpk in gpk_strategy(5)) {
        prop_assume!(gpk.g() > 0);
        let direct = direct_transient_dispersion(gpk.g(), gpk.t(), gpk.k(), 40);
        for (l, d) in direct.iter().enumerate() {
            prop_assert_eq!(&transient_moments(&gpk, l + 1).unwrap().dispersion, d);
        }
    }

    #[test]
    fn poisson_criterion_matches_dispersion(gpk in gpk_strategy(12)) {
        prop_assume!(gpk.g() + gpk.k() > 0);
        prop_assert_eq!(is_poisson(&gpk), asymptotic_dispersion(&gpk).unwrap() == BigRational::one());
    }

    #[test]
    fn csv_json_round_trip(
        columns in proptest::collection::vec("[a-zA-Z_][a-zA-Z0-9_ ,\"]{0,6}", 1..4),
        cells in proptest::collection::vec("[ -~é\n]{0,8}", 0..24),
    ) {
        let width = columns.len();
        let mut table = Table::new(columns);
        for row in cells.chunks(width).filter(|r| r.len() == width) {
            table.push(row.iter().cloned());
        }
        for format in [Format::Csv, Format::Json] {
            let text = table.render(format);
            let back = Table::parse(format, &text).unwrap();
            prop_assert_eq!(back.render(format), text);
        }
    }
}

#[test]
fn scaling_law_holds_for_odd_bases() {
    for p in [3u64, 5, 7, 9, 11, 13, 15, 21] {
        assert!(scaling_law_check(p, 30).unwrap().iter().all(|r| r.pass), "p={p}");
    }
}

#[test]
fn scaling_law_breaks_for_base_two() {
    let rows = scaling_law_check(2, 2).unwrap();
    assert!(rows[0].pass && rows[1].pass);
    assert!(!rows[2].pass);
    assert_eq!(rows[2].carry, BigUint::from(14u32));
    assert_eq!(rows[2].scaled, BigUint::from(16u32));
}

#[test]
fn chebyshev_grid() {
    let mut n = 0;
    for g in 1..=5 {
        for t in 1..=4 {
            let gpk = GpkDecomposition::new(g, t, (g + t) % 3).unwrap();
            let rep = verify_chebyshev_representation(&gpk, 20, 1e-9).unwrap();
            assert!(rep.pass, "{gpk}: {rep:?}");
            n += 1;
        }
    }
    assert_eq!(n, 20);
}

#[test]
fn symmetric_poisson_family_has_golden_coupling() {
    for n in [3u64, 6, 9, 12] {
        let gpk = symmetric_poisson_decomposition(n).unwrap();
        assert!(is_poisson(&gpk));
        assert_eq!(spectral_data(&gpk).coupling, Coupling::Finite(1.5));
        assert_eq!(markov_chain(&gpk).unwrap().mu, q(1, 3));
    }
}

/// `L |D(L) - D_inf|` stays bounded, so doubling `L` at least halves the
/// gap (for some chains the `1/L` coefficient vanishes and it shrinks faster).
#[test]
fn dispersion_gap_is_order_one_over_l() {
    for (g, t, k) in [(1u64, 1u64, 1u64), (1, 2, 3), (2, 1, 1), (3, 4, 2)] {
        let gpk = GpkDecomposition::new(g, t, k).unwrap();
        let d_inf = asymptotic_dispersion(&gpk).unwrap();
        for moments in [stationary_moments, transient_moments] {
            let gap = |l: usize| (moments(&gpk, l).unwrap().dispersion - &d_inf).abs().to_f64().unwrap();
            let (g1, g2) = (gap(200), gap(400));
            assert!(200.0 * g1 < 10.0, "({g},{t},{k})");
            let ratio = g2 / g1;
            assert!(ratio <= 0.55, "({g},{t},{k}): ratio {ratio}");
        }
    }
}

/// The first-order expansion leaves an `O(1/L^2)` residual: `L^2 |r|`
/// stays bounded and stabilises.
#[test]
fn expansion_residual_is_order_one_over_l_squared() {
    for mu in [q(1, 10), q(1, 3), q(1, 2), q(9, 10)] {
        let s: Vec<f64> = [100usize, 200, 400]
            .iter()
            .map(|&l| asymptotic_expansion_check(&mu, l).unwrap().scaled_residual)
            .collect();
        assert!(s.iter().all(|v| v.is_finite() && *v < 1e3), "{mu}: {s:?}");
        assert!((s[2] - s[1]).abs() <= 0.1 * s[1].max(1e-12), "{mu}: {s:?}");
        let d_inf = symmetric_asymptotic_dispersion(&mu).unwrap();
        assert!(d_inf > BigRational::from_integer(0.into()));
    }
}

#[test]
fn monte_carlo_is_deterministic_and_calibrated() {
    let gpk = GpkDecomposition::new(3, 3, 3).unwrap();
    let a = monte_carlo_dispersion(&gpk, 50, 100_000, 7).unwrap();
    let b = monte_carlo_dispersion(&gpk, 50, 100_000, 7).unwrap();
    assert_eq!(a, b);
    let exact = transient_moments(&gpk, 50).unwrap().dispersion.to_f64().unwrap();
    assert!((a.dispersion - exact).abs() <= 3.0 * a.se_dispersion, "{a:?} vs {exact}");
}
