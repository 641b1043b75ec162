use proptest::collection::vec;
use proptest::prelude::*;

use eulermean::mc::compare_pmf;
use eulermean::voting::{Candidate, PolarizedScenario, ScenarioBallot};
use eulermean::{
    approved_count_distribution, count_above_mean, expected_gain, optimal_approval_set,
    polarized_scenario_expected_utility, wn_pmf, Sample, UtilityModel,
};

fn indicators(mask: u32, n: usize) -> Vec<bool> {
    (0..n).map(|j| mask >> j & 1 == 1).collect()
}

/// Brute-force mean in rationals of the integer-valued utilities.
fn exact_mean_cmp(u: &[i64], j: usize) -> std::cmp::Ordering {
    let n = u.len() as i64;
    (u[j] * n).cmp(&u.iter().sum::<i64>())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn optimal_set_maximizes_gain(u in vec(-1.0e3f64..1.0e3, 2..=12)) {
        let n = u.len();
        let best = optimal_approval_set(&u).unwrap();
        let g_best = expected_gain(&u, &best, 1.0).unwrap();
        let tol = 1e-9 * (1.0 + g_best.abs());
        let mean = u.iter().sum::<f64>() / n as f64;
        for mask in 0..1u32 << n {
            let ind = indicators(mask, n);
            let g = expected_gain(&u, &ind, 1.0).unwrap();
            prop_assert!(g <= g_best + tol);
            if g >= g_best - tol {
                for j in 0..n {
                    if ind[j] != best[j] {
                        prop_assert!((u[j] - mean).abs() <= tol, "maximizer differs at a non-tied index");
                    }
                }
            }
        }
    }

    #[test]
    fn ties_with_the_mean_are_the_only_freedom(u in vec(-6i64..6, 2..=10)) {
        // Integer utilities: the mean comparison is exact in the oracle.
        let n = u.len();
        let uf: Vec<f64> = u.iter().map(|&x| x as f64).collect();
        let best = optimal_approval_set(&uf).unwrap();
        for j in 0..n {
            prop_assert_eq!(best[j], exact_mean_cmp(&u, j) == std::cmp::Ordering::Greater);
        }
        let g_best = expected_gain(&uf, &best, 1.0).unwrap();
        for mask in 0..1u32 << n {
            let ind = indicators(mask, n);
            let g = expected_gain(&uf, &ind, 1.0).unwrap();
            prop_assert!(g <= g_best + 1e-9);
            if (g - g_best).abs() <= 1e-9 {
                for j in 0..n {
                    if ind[j] != best[j] {
                        prop_assert_eq!(exact_mean_cmp(&u, j), std::cmp::Ordering::Equal);
                    }
                }
            }
        }
    }

    #[test]
    fn set_size_is_above_mean_count(u in vec(-1.0e6f64..1.0e6, 2..=40)) {
        let size = optimal_approval_set(&u).unwrap().iter().filter(|&&a| a).count();
        prop_assert_eq!(size, count_above_mean(&Sample::new(u).unwrap()));
    }

    #[test]
    fn gain_invariances(
        u in vec(-100.0f64..100.0, 2..=12),
        mask in any::<u32>(),
        shift in -50.0f64..50.0,
        p in 0.0f64..1.0,
        scale in 0.1f64..10.0,
    ) {
        let ind = indicators(mask, u.len());
        let base = expected_gain(&u, &ind, 1.0).unwrap();
        let tol = 1e-12 * (1.0 + u.iter().map(|x| x.abs()).fold(0.0, f64::max)) * u.len() as f64 * u.len() as f64;
        let shifted: Vec<f64> = u.iter().map(|x| x + shift).collect();
        prop_assert!((expected_gain(&shifted, &ind, 1.0).unwrap() - base).abs() <= tol * (1.0 + shift.abs()));
        prop_assert!((expected_gain(&u, &ind, p).unwrap() - p * base).abs() <= tol);
        let scaled: Vec<f64> = u.iter().map(|x| x * scale).collect();
        prop_assert!((expected_gain(&scaled, &ind, 1.0).unwrap() - scale * base).abs() <= tol * scale);
    }
}

#[test]
fn gain_examples() {
    let u = [10.0, 6.0, 0.0];
    assert_eq!(optimal_approval_set(&u).unwrap(), vec![true, true, false]);
    assert!((expected_gain(&u, &[true, true, false], 1.0).unwrap() - 16.0).abs() < 1e-12);
    assert_eq!(expected_gain(&u, &[false; 3], 1.0).unwrap(), 0.0);
    assert!(expected_gain(&u, &[true; 3], 1.0).unwrap().abs() < 1e-12);
    assert!(expected_gain(&u, &[true], 1.0).is_err());
}

#[test]
fn approved_count_follows_the_eulerian_law() {
    let emp = approved_count_distribution(UtilityModel::UniformIid, 2, 10_000, 3).unwrap();
    assert_eq!(emp.count(1), 10_000);
    for n in [3, 4, 6] {
        let emp = approved_count_distribution(UtilityModel::UniformIid, n, 1_000_000, 4).unwrap();
        let cmp = compare_pmf(&emp, &wn_pmf(n).unwrap().to_f64()).unwrap();
        assert!(cmp.max_abs_z() <= 4.0, "n = {n}: {:?}", cmp.cells);
    }
}

#[test]
fn polarized_scenario_orders_the_ballots() {
    let s = PolarizedScenario::with_default_utilities(500, 9).unwrap();
    let n = 200_000;
    let ab = polarized_scenario_expected_utility(&s, "AB".parse().unwrap(), n).unwrap();
    let a = polarized_scenario_expected_utility(&s, "A".parse().unwrap(), n).unwrap();
    let gap = a.expected_utility - ab.expected_utility;
    let se = (a.standard_error.powi(2) + ab.standard_error.powi(2)).sqrt();
    assert!((gap - 1.0).abs() <= 4.0 * se + 0.05, "gap {gap}");
    assert_eq!(a.wins.iter().sum::<u64>(), n);
    assert!(a.win_probability(Candidate::B) < 1e-3);
}

#[test]
fn full_and_empty_ballots_agree() {
    // Approving everyone adds one vote to each total and leaves the winner unchanged.
    let s = PolarizedScenario::with_default_utilities(50, 17).unwrap();
    let all = polarized_scenario_expected_utility(&s, ScenarioBallot::new(&Candidate::ALL), 100_000).unwrap();
    let none = polarized_scenario_expected_utility(&s, ScenarioBallot::default(), 100_000).unwrap();
    assert_eq!(all.wins, none.wins);
}

#[test]
fn scenario_validation() {
    assert!(PolarizedScenario::with_default_utilities(0, 1).is_err());
    let s = PolarizedScenario::with_default_utilities(5, 1).unwrap();
    assert!(polarized_scenario_expected_utility(&s, ScenarioBallot::default(), 0).is_err());
}
