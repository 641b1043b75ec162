use std::f64::consts::PI;

use proptest::prelude::*;

use eulermean::heavy_tail::{levy_wn_pmf, normal_w5_endpoint, Provenance, StableSampler};
use eulermean::mc::{binomial_se, simulate_counts, substream};
use eulermean::numeric::adaptive_simpson;
use eulermean::{
    levy_limit_cdf, levy_limit_density, levy_wn_cdf, normal_case_pmf, s_k, sample_stable, sample_wn, stable_wn_cdf_mc,
    Error, UtilityModel,
};

#[test]
fn s_k_values() {
    assert_eq!(s_k(0.5, 0), 0.0);
    assert!((s_k(0.5, 2) - (1.0 + 2f64.sqrt())).abs() < 1e-15);
    assert!((s_k(0.5, 4) - (1.0 + 2f64.sqrt() + 3f64.sqrt() + 2.0)).abs() < 1e-14);
}

#[test]
fn levy_cdf_values() {
    assert!((levy_wn_cdf(3, 1).unwrap() - 0.5).abs() < 1e-15);
    assert!((levy_wn_cdf(4, 1).unwrap() - 0.25).abs() < 1e-12);
    for n in 2..30 {
        assert_eq!(levy_wn_cdf(n, 0).unwrap(), 0.0);
        assert_eq!(levy_wn_cdf(n, n - 1).unwrap(), 1.0);
        let cdf: Vec<f64> = (0..n).map(|k| levy_wn_cdf(n, k).unwrap()).collect();
        assert!(cdf.windows(2).all(|w| w[0] <= w[1]));
    }
    assert!(levy_wn_cdf(4, 4).is_err());
}

proptest! {
    #[test]
    fn levy_cdf_symmetry(n in 2usize..500, k_frac in 0.0f64..1.0) {
        let k = ((n as f64 * k_frac) as usize).min(n - 1);
        let s = levy_wn_cdf(n, k).unwrap() + levy_wn_cdf(n, n - 1 - k).unwrap();
        prop_assert!((s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn limit_cdf_symmetry(x in 0.0f64..=1.0) {
        let s = levy_limit_cdf(x).unwrap() + levy_limit_cdf(1.0 - x).unwrap();
        prop_assert!((s - 1.0).abs() < 1e-12);
    }
}

#[test]
fn limit_law_shape() {
    assert_eq!(levy_limit_cdf(0.0).unwrap(), 0.0);
    assert_eq!(levy_limit_cdf(1.0).unwrap(), 1.0);
    assert!((levy_limit_cdf(0.5).unwrap() - 0.5).abs() < 1e-15);
    assert!((levy_limit_density(0.5).unwrap() - 6.0 / PI).abs() < 1e-14);
    assert!(levy_limit_cdf(1.5).is_err());
    assert!(levy_limit_density(0.0).is_err());
    assert!(levy_limit_density(1.0).is_err());
}

#[test]
fn density_integrates_to_one() {
    let f = |x: f64| levy_limit_density(x).unwrap_or(0.0);
    let total = adaptive_simpson(f, 0.0, 1.0, 1e-13, 50);
    assert!((total - 1.0).abs() < 1e-10, "{total}");
}

#[test]
fn density_is_the_cdf_derivative() {
    let h = 1e-6;
    for i in 1..=99 {
        let x = i as f64 / 100.0;
        let fd = (levy_limit_cdf(x + h).unwrap() - levy_limit_cdf(x - h).unwrap()) / (2.0 * h);
        let f = levy_limit_density(x).unwrap();
        assert!((fd - f).abs() < 1e-5, "x = {x}: {fd} vs {f}");
        assert!((f - levy_limit_density(1.0 - x).unwrap()).abs() < 1e-12);
    }
}

fn frequency(alpha: f64, n_samples: u64, seed: u64, event: impl Fn(f64) -> bool + Sync) -> f64 {
    let sampler = StableSampler::new(alpha).unwrap();
    let counts = simulate_counts(n_samples, seed, 2, || (), |rng, _| usize::from(event(sampler.sample(rng))));
    counts[1] as f64 / n_samples as f64
}

#[test]
fn levy_sampler_quantiles() {
    let n = 1_000_000;
    // Median of Z^-2 is 1/z_{0.75}^2.
    let z75 = 0.674_489_750_196_081_7f64;
    let below_median = frequency(0.5, n, 11, |x| x <= 1.0 / (z75 * z75));
    assert!((below_median - 0.5).abs() <= 4.0 * binomial_se(0.5, n));
    let p = 0.682_689_492_137_085_9;
    let above_one = frequency(0.5, n, 12, |x| x > 1.0);
    assert!((above_one - p).abs() <= 4.0 * binomial_se(p, n));
}

#[test]
fn sampler_laplace_transforms() {
    let n_samples = 400_000u64;
    for (alpha, t) in [(0.3, 1.0), (0.5, 0.7), (0.7, 1.0), (0.9, 2.0)] {
        let sampler = StableSampler::new(alpha).unwrap();
        let mut rng = substream(21, (alpha * 100.0) as u64);
        let mean = (0..n_samples).map(|_| (-t * sampler.sample(&mut rng)).exp()).sum::<f64>() / n_samples as f64;
        // Z^-2 has Laplace transform exp(-sqrt(2t)); Kanter's draw exp(-t^alpha).
        let expected = if alpha == 0.5 { (-(2.0 * t).sqrt()).exp() } else { (-t.powf(alpha)).exp() };
        let se = 0.5 / (n_samples as f64).sqrt();
        assert!((mean - expected).abs() < 4.0 * se, "alpha {alpha}: {mean} vs {expected}");
    }
}

#[test]
fn samples_are_positive() {
    let mut rng = substream(3, 0);
    for alpha in [0.05, 0.3, 0.5, 0.8, 0.99] {
        for _ in 0..20_000 {
            let x = sample_stable(alpha, &mut rng).unwrap();
            assert!(x > 0.0 && x.is_finite());
        }
    }
    assert!(sample_stable(1.0, &mut rng).is_err());
    assert!(sample_stable(0.0, &mut rng).is_err());
}

#[test]
fn ratio_form_simulation() {
    let n = 1_000_000;
    let p = stable_wn_cdf_mc(0.5, 4, 1, n, 5).unwrap();
    assert!((p - 0.25).abs() <= 4.0 * binomial_se(0.25, n), "{p}");
    assert_eq!(stable_wn_cdf_mc(0.7, 6, 0, 1000, 5).unwrap(), 0.0);
    assert_eq!(stable_wn_cdf_mc(0.7, 6, 5, 1000, 5).unwrap(), 1.0);
    assert!(stable_wn_cdf_mc(0.5, 4, 1, 0, 5).is_err());
}

#[test]
fn direct_simulation_matches_ratio_form_for_general_alpha() {
    let n_samples = 400_000;
    for (alpha, n) in [(0.3, 5), (0.7, 7)] {
        let emp = sample_wn(UtilityModel::StableIncrements { alpha }, n, n_samples, 31).unwrap();
        for k in 1..n - 1 {
            let direct = emp.cdf(k as i64);
            let ratio = stable_wn_cdf_mc(alpha, n, k, n_samples, 32).unwrap();
            let se = (2.0 * ratio * (1.0 - ratio) / n_samples as f64).sqrt();
            assert!((direct - ratio).abs() <= 4.0 * se, "alpha {alpha}, n {n}, k {k}: {direct} vs {ratio}");
        }
    }
}

#[test]
fn direct_simulation_matches_levy_closed_form() {
    let n_samples = 400_000;
    let n = 10;
    let emp = sample_wn(UtilityModel::StableIncrements { alpha: 0.5 }, n, n_samples, 41).unwrap();
    let exact = levy_wn_pmf(n).unwrap();
    for k in 0..n {
        let p = levy_wn_cdf(n, k).unwrap();
        assert!((emp.cdf(k as i64) - p).abs() <= 4.0 * binomial_se(p, n_samples) + 1e-15, "k = {k}");
        assert!((exact.cdf(k as i64) - p).abs() < 1e-12);
    }
}

#[test]
fn scaled_count_approaches_limit_law() {
    let (n, n_samples) = (500, 100_000);
    let emp = sample_wn(UtilityModel::StableIncrements { alpha: 0.5 }, n, n_samples, 51).unwrap();
    let sup = (0..=n)
        .map(|k| (emp.cdf(k as i64) - levy_limit_cdf(k as f64 / n as f64).unwrap()).abs())
        .fold(0.0, f64::max);
    assert!(sup < 0.01, "{sup}");
}

#[test]
fn normal_constants() {
    let four = normal_case_pmf(4).unwrap();
    let masses: Vec<f64> = four.masses.iter().map(|m| m.value.unwrap()).collect();
    assert!((masses.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    assert!((masses[0] - (23.0f64 / 27.0).acos() / PI).abs() < 1e-16);
    assert_eq!(format!("{:.9}", masses[0]), "0.175479656");
    assert!(four.masses.iter().all(|m| m.provenance == Provenance::Proved));

    let five = normal_case_pmf(5).unwrap();
    assert_eq!(five.mass(1).unwrap().provenance, Provenance::Conjectured);
    assert_eq!(five.mass(2).unwrap().provenance, Provenance::MonteCarloOnly);
    assert!(five.mass(3).unwrap().value.is_none());
    assert_eq!(format!("{:.11}", normal_w5_endpoint()), "0.04892344186");
    assert!(matches!(normal_case_pmf(6), Err(Error::Unsupported(6))));
}

#[test]
fn normal_simulation_matches_constants() {
    let n_samples = 1_000_000;
    let emp = sample_wn(UtilityModel::NormalIid, 4, n_samples, 61).unwrap();
    for m in normal_case_pmf(4).unwrap().masses {
        let p = m.value.unwrap();
        let f = emp.frequency(m.k as i64);
        assert!((f - p).abs() <= 4.0 * binomial_se(p, n_samples), "k = {}: {f} vs {p}", m.k);
    }
    let emp5 = sample_wn(UtilityModel::NormalIid, 5, n_samples, 62).unwrap();
    let p = normal_w5_endpoint();
    for k in [1, 4] {
        assert!((emp5.frequency(k) - p).abs() <= 4.0 * binomial_se(p, n_samples));
    }
}
