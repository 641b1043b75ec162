//! The verification suite behind `eulermean verify`.

use anyhow::Result;
use num_bigint::BigUint;
use num_rational::BigRational;
use rand::Rng;
use serde_json::Value;

use eulermean::eulerian::{factorial, DESCENT_ORACLE_MAX_N};
use eulermean::heavy_tail::{normal_w5_endpoint, Provenance, W5_ENDPOINT_REFERENCE};
use eulermean::mc::{binomial_se, chi_square_quantile, mc_lp_probability, substream};
use eulermean::numeric::{adaptive_simpson, mean_dd, DoubleDouble};
use eulermean::voting::{PolarizedScenario, ScenarioBallot};
use eulermean::{
    compare_pmf, descent_oracle_row, eulerian_row, expected_gain, floor_sum_pmf, levy_limit_cdf, levy_limit_density,
    levy_wn_cdf, lp_probability, normal_case_pmf, optimal_approval_set, polarized_scenario_expected_utility,
    sample_wn, wn_cdf, wn_cdf_via_lp_exact, wn_pmf, LpInstance, UtilityModel,
};

use crate::output::{Emitter, Obj};
use crate::Ctx;

const QUICK_CAP: u64 = 100_000;

#[derive(Clone, Debug)]
pub enum Num {
    Float(f64),
    Int(u64),
    Text(String),
}

impl Num {
    fn json(&self, e: &Emitter) -> Value {
        match self {
            Num::Float(x) => e.float(*x),
            Num::Int(i) => Value::from(*i),
            Num::Text(s) => Value::String(s.clone()),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Check {
    pub criterion: u8,
    pub name: String,
    pub claim: String,
    pub expected: Num,
    pub observed: Num,
    pub tolerance: Num,
    pub samples: Option<u64>,
    pub pass: bool,
}

#[derive(Clone, Debug, Default)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn to_json(&self, e: &Emitter, seed: u64, quick: bool) -> Value {
        let passed = self.checks.iter().filter(|c| c.pass).count();
        let checks: Vec<Value> = self
            .checks
            .iter()
            .map(|c| {
                Obj::new()
                    .with("criterion", c.criterion)
                    .with("name", c.name.clone())
                    .with("claim", c.claim.clone())
                    .with("expected", c.expected.json(e))
                    .with("observed", c.observed.json(e))
                    .with("tolerance", c.tolerance.json(e))
                    .with("samples", c.samples.map(Value::from).unwrap_or(Value::Null))
                    .with("pass", c.pass)
                    .build()
            })
            .collect();
        Obj::new()
            .with("mode", if quick { "quick" } else { "full" })
            .with("seed", seed)
            .with("checks", checks)
            .with("passed", passed)
            .with("failed", self.checks.len() - passed)
            .with("all_passed", self.all_passed())
            .build()
    }

    fn push(&mut self, check: Check) {
        self.checks.push(check);
    }
}

struct Plan {
    seed: u64,
    quick: bool,
    samples: Option<u64>,
}

impl Plan {
    /// Sample size for a check stated at `full` draws.
    fn size(&self, full: u64) -> u64 {
        match (self.samples, self.quick) {
            (Some(n), _) => n,
            (None, true) => full.min(QUICK_CAP),
            (None, false) => full,
        }
    }

    /// Independent seed for the check labelled `tag`.
    fn seed_for(&self, tag: u64) -> u64 {
        substream(self.seed, (1 << 62) | tag).random()
    }
}

fn exact_check(criterion: u8, name: &str, claim: &str, mismatches: u64) -> Check {
    Check {
        criterion,
        name: name.into(),
        claim: claim.into(),
        expected: Num::Int(0),
        observed: Num::Int(mismatches),
        tolerance: Num::Text("exact".into()),
        samples: None,
        pass: mismatches == 0,
    }
}

fn eulerian_law(report: &mut VerifyReport) -> Result<()> {
    let mut mismatches = 0u64;
    for n in 1..=DESCENT_ORACLE_MAX_N {
        let oracle: Vec<BigUint> = descent_oracle_row(n)?.into_iter().map(BigUint::from).collect();
        mismatches += u64::from(eulerian_row(n) != oracle);
        // P(W_{n+1} = k) = <n, k-1> / n!
        let pmf = wn_pmf(n + 1)?;
        let fact = factorial(n);
        for (i, count) in oracle.iter().enumerate() {
            let expected = BigRational::new(count.clone().into(), fact.clone().into());
            mismatches += u64::from(pmf.prob(i as i64 + 1) != expected);
        }
    }
    report.push(exact_check(
        1,
        "above-mean count has the Eulerian law",
        "P(W_n = k) = <n-1, k-1>/(n-1)! with rows checked against permutation descents, n <= 10",
        mismatches,
    ));
    Ok(())
}

fn shift_identity(report: &mut VerifyReport) -> Result<()> {
    let mut mismatches = 0u64;
    for n in 2..=30 {
        let w = wn_pmf(n)?;
        let f = floor_sum_pmf(n - 1)?.shifted(1);
        mismatches += u64::from(w.support_min() != f.support_min() || w.probs() != f.probs());
    }
    report.push(exact_check(
        2,
        "above-mean count equals one plus a floored uniform sum",
        "law of W_n equals law of 1 + floor(U_1 + ... + U_{n-1}), n = 2..30",
        mismatches,
    ));
    Ok(())
}

fn uniform_chi_square(report: &mut VerifyReport, plan: &Plan) -> Result<()> {
    let n_samples = plan.size(1_000_000);
    for n in 2..=10 {
        let emp = sample_wn(UtilityModel::UniformIid, n, n_samples, plan.seed_for(300 + n as u64))?;
        let cmp = compare_pmf(&emp, &wn_pmf(n)?.to_f64())?;
        let threshold = if cmp.df == 0 { 0.0 } else { chi_square_quantile(cmp.df, 0.999) };
        report.push(Check {
            criterion: 3,
            name: format!("uniform simulation matches the Eulerian law, n = {n}"),
            claim: "Pearson chi-square below its 0.999 quantile".into(),
            expected: Num::Float(threshold),
            observed: Num::Float(cmp.chi_square),
            tolerance: Num::Text(if cmp.df == 0 { "== 0".into() } else { format!("< 0.999 quantile, df = {}", cmp.df) }),
            samples: Some(n_samples),
            pass: cmp.chi_square_below_quantile(0.999),
        });
    }
    Ok(())
}

/// Instance with `1 <= k + l <= 8` and coefficients in `[0.1, 10)`.
fn random_instance<R: Rng>(rng: &mut R) -> LpInstance {
    loop {
        let total = rng.random_range(1..=8usize);
        let k = rng.random_range(0..=total);
        let a: Vec<f64> = (0..k).map(|_| rng.random_range(0.1..10.0)).collect();
        let b: Vec<f64> = (0..total - k).map(|_| rng.random_range(0.1..10.0)).collect();
        if let Ok(inst) = LpInstance::new(a, b) {
            if lp_probability(&inst).is_ok() {
                return inst;
            }
        }
    }
}

fn exponential_formula(report: &mut VerifyReport, plan: &Plan) -> Result<()> {
    let mut mismatches = 0u64;
    for n in 2..=12 {
        for k in 0..n {
            mismatches += u64::from(wn_cdf_via_lp_exact(n, k)? != wn_cdf(n, k)?);
        }
    }
    report.push(exact_check(
        4,
        "exponential residue formula reproduces the Eulerian CDF",
        "exact rational evaluation with a = [1..k], b = [1..n-k-1] equals P(W_n <= k), n <= 12",
        mismatches,
    ));

    let n_samples = plan.size(10_000_000);
    let mut rng = substream(plan.seed_for(400), 0);
    let mut worst: f64 = 0.0;
    for i in 0..100u64 {
        let inst = random_instance(&mut rng);
        let p = lp_probability(&inst)?;
        let mc = mc_lp_probability(&inst, n_samples, plan.seed_for(1000 + i))?;
        let se = binomial_se(p, n_samples);
        let z = if se > 0.0 {
            (mc - p).abs() / se
        } else if mc == p {
            0.0
        } else {
            f64::INFINITY
        };
        worst = worst.max(z);
    }
    report.push(Check {
        criterion: 4,
        name: "residue formula matches simulation on random instances".into(),
        claim: "100 random instances with k + l <= 8; largest |MC - formula| in binomial standard errors".into(),
        expected: Num::Float(0.0),
        observed: Num::Float(worst),
        tolerance: Num::Float(4.0),
        samples: Some(n_samples),
        pass: worst <= 4.0,
    });
    Ok(())
}

fn levy_closed_form(report: &mut VerifyReport, plan: &Plan) -> Result<()> {
    let v = levy_wn_cdf(4, 1)?;
    report.push(Check {
        criterion: 5,
        name: "Levy-gap CDF at n = 4, k = 1".into(),
        claim: "(2/pi) arctan(1/(1 + sqrt 2)) = 1/4".into(),
        expected: Num::Float(0.25),
        observed: Num::Float(v),
        tolerance: Num::Float(1e-12),
        samples: None,
        pass: (v - 0.25).abs() <= 1e-12,
    });

    let n = 10;
    let n_samples = plan.size(1_000_000);
    let emp = sample_wn(UtilityModel::StableIncrements { alpha: 0.5 }, n, n_samples, plan.seed_for(500))?;
    let mut worst: f64 = 0.0;
    for k in 0..n {
        let p = levy_wn_cdf(n, k)?;
        let d = (emp.cdf(k as i64) - p).abs();
        let se = binomial_se(p, n_samples);
        worst = worst.max(if se > 0.0 { d / se } else if d == 0.0 { 0.0 } else { f64::INFINITY });
    }
    report.push(Check {
        criterion: 5,
        name: "Levy-gap simulation matches the arctan CDF, n = 10".into(),
        claim: "largest pointwise CDF deviation in binomial standard errors".into(),
        expected: Num::Float(0.0),
        observed: Num::Float(worst),
        tolerance: Num::Float(4.0),
        samples: Some(n_samples),
        pass: worst <= 4.0,
    });
    Ok(())
}

fn levy_limit(report: &mut VerifyReport, plan: &Plan) -> Result<()> {
    let total = adaptive_simpson(|x| levy_limit_density(x).unwrap_or(0.0), 0.0, 1.0, 1e-13, 50);
    report.push(Check {
        criterion: 6,
        name: "limit density integrates to one".into(),
        claim: "adaptive Simpson quadrature of (3/pi) sqrt(x(1-x))/(x^3 + (1-x)^3) over [0, 1]".into(),
        expected: Num::Float(1.0),
        observed: Num::Float(total),
        tolerance: Num::Float(1e-10),
        samples: None,
        pass: (total - 1.0).abs() <= 1e-10,
    });

    let h = 1e-6;
    let mut worst: f64 = 0.0;
    for i in 1..=99 {
        let x = i as f64 / 100.0;
        let fd = (levy_limit_cdf(x + h)? - levy_limit_cdf(x - h)?) / (2.0 * h);
        worst = worst.max((fd - levy_limit_density(x)?).abs());
    }
    report.push(Check {
        criterion: 6,
        name: "limit density is the derivative of the limit CDF".into(),
        claim: "central differences, h = 1e-6, on x = 0.01..0.99".into(),
        expected: Num::Float(0.0),
        observed: Num::Float(worst),
        tolerance: Num::Float(1e-5),
        samples: None,
        pass: worst <= 1e-5,
    });

    let n = 2000;
    let n_samples = plan.size(1_000_000);
    let emp = sample_wn(UtilityModel::StableIncrements { alpha: 0.5 }, n, n_samples, plan.seed_for(600))?;
    let mut sup: f64 = 0.0;
    for k in 0..=n {
        let f = levy_limit_cdf(k as f64 / n as f64)?;
        // Both one-sided limits of the empirical step function at k/n.
        let left = if k == 0 { 0.0 } else { emp.cdf(k as i64 - 1) };
        sup = sup.max((emp.cdf(k as i64) - f).abs()).max((left - f).abs());
    }
    report.push(Check {
        criterion: 6,
        name: "scaled Levy-gap count approaches the limit law, n = 2000".into(),
        claim: "sup distance between the law of W_n/n and (2/pi) arctan((x/(1-x))^(3/2))".into(),
        expected: Num::Float(0.0),
        observed: Num::Float(sup),
        tolerance: Num::Float(0.01),
        samples: Some(n_samples),
        pass: sup < 0.01,
    });
    Ok(())
}

fn normal_case(report: &mut VerifyReport, plan: &Plan) -> Result<()> {
    let four = normal_case_pmf(4)?;
    let end = four.mass(1).and_then(|m| m.value).expect("n = 4 endpoint");
    report.push(Check {
        criterion: 7,
        name: "normal values: P(W_4 = 1)".into(),
        claim: "arccos(23/27)/pi = 0.175479656 to 9 decimals".into(),
        expected: Num::Float(0.175_479_656),
        observed: Num::Float(end),
        tolerance: Num::Float(5e-10),
        samples: None,
        pass: format!("{end:.9}") == "0.175479656",
    });

    let n_samples = plan.size(10_000_000);
    let emp = sample_wn(UtilityModel::NormalIid, 4, n_samples, plan.seed_for(700))?;
    let worst = four
        .masses
        .iter()
        .map(|m| {
            let p = m.value.expect("n = 4 masses are known");
            (emp.frequency(m.k as i64) - p).abs() / binomial_se(p, n_samples)
        })
        .fold(0.0, f64::max);
    report.push(Check {
        criterion: 7,
        name: "normal simulation matches the n = 4 masses".into(),
        claim: "largest |frequency - mass| over k = 1, 2, 3 in binomial standard errors".into(),
        expected: Num::Float(0.0),
        observed: Num::Float(worst),
        tolerance: Num::Float(4.0),
        samples: Some(n_samples),
        pass: worst <= 4.0,
    });

    let five = normal_case_pmf(5)?;
    let flagged = five.mass(1).map(|m| m.provenance) == Some(Provenance::Conjectured);
    let reference: f64 = W5_ENDPOINT_REFERENCE.parse()?;
    let emp = sample_wn(UtilityModel::NormalIid, 5, n_samples, plan.seed_for(701))?;
    let se = binomial_se(reference, n_samples);
    let worst = [1, 4]
        .iter()
        .map(|&k| (emp.frequency(k) - reference).abs() / se)
        .fold(0.0, f64::max);
    let closed_form_ok = (normal_w5_endpoint() - reference).abs() < 1e-15;
    report.push(Check {
        criterion: 7,
        name: "normal simulation matches the conjectured P(W_5 = 1)".into(),
        claim: "conjectured arccos(61/64)/(2 pi) = 0.04892344186...; endpoints k = 1, 4 in binomial standard errors"
            .into(),
        expected: Num::Float(0.0),
        observed: Num::Float(worst),
        tolerance: Num::Float(4.0),
        samples: Some(n_samples),
        pass: worst <= 4.0 && flagged && closed_form_ok,
    });
    Ok(())
}

/// Whether the optimal set maximizes the gain over all subsets, and every
/// other maximizer differs from it only where a utility equals the mean.
fn argmax_holds(u: &[f64]) -> Result<bool> {
    let n = u.len();
    let best = optimal_approval_set(u)?;
    let g_best = expected_gain(u, &best, 1.0)?;
    let scale = u.iter().map(|x| x.abs()).fold(1.0, f64::max) * (n * n) as f64;
    let tol = 1e-12 * scale;
    let mean = mean_dd(u);
    let mut ind = vec![false; n];
    for mask in 0u32..1 << n {
        for (j, slot) in ind.iter_mut().enumerate() {
            *slot = mask >> j & 1 == 1;
        }
        let g = expected_gain(u, &ind, 1.0)?;
        if g > g_best + tol {
            return Ok(false);
        }
        if g >= g_best - tol {
            let differs_off_tie = (0..n).any(|j| ind[j] != best[j] && (DoubleDouble::from(u[j]) - mean).abs().to_f64() > tol);
            if differs_off_tie {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn voting(report: &mut VerifyReport, plan: &Plan) -> Result<()> {
    let vectors = 10_000u64;
    let mut rng = substream(plan.seed_for(800), 0);
    let mut failures = 0u64;
    for i in 0..vectors {
        let n = rng.random_range(2..=12usize);
        // Every fifth vector uses small integers so ties with the mean occur.
        let u: Vec<f64> = if i % 5 == 0 {
            (0..n).map(|_| rng.random_range(-3i32..=3) as f64).collect()
        } else {
            (0..n).map(|_| rng.random_range(-100.0..100.0)).collect()
        };
        failures += u64::from(!argmax_holds(&u)?);
    }
    report.push(Check {
        criterion: 8,
        name: "above-mean approval set maximizes the expected gain".into(),
        claim: "exhaustive search over all 2^n ballots for 10000 random utility vectors, n <= 12".into(),
        expected: Num::Int(0),
        observed: Num::Int(failures),
        tolerance: Num::Text("exact".into()),
        samples: None,
        pass: failures == 0,
    });

    let n_samples = plan.size(1_000_000);
    let scenario = PolarizedScenario::with_default_utilities(500, plan.seed_for(801))?;
    for (ballot, target) in [("AB", 4.0), ("A", 5.0)] {
        let b: ScenarioBallot = ballot.parse()?;
        let est = polarized_scenario_expected_utility(&scenario, b, n_samples)?;
        report.push(Check {
            criterion: 8,
            name: format!("polarized electorate, m = 500, ballot {{{}}}", ballot.chars().map(String::from).collect::<Vec<_>>().join(",")),
            claim: format!("expected utility of the winner tends to {target} as m grows"),
            expected: Num::Float(target),
            observed: Num::Float(est.expected_utility),
            tolerance: Num::Float(0.05),
            samples: Some(n_samples),
            pass: (est.expected_utility - target).abs() <= 0.05,
        });
    }
    Ok(())
}

pub fn run(ctx: &Ctx, quick: bool) -> Result<VerifyReport> {
    let plan = Plan {
        seed: ctx.seed,
        quick,
        samples: ctx.samples,
    };
    let mut report = VerifyReport::default();
    eulerian_law(&mut report)?;
    shift_identity(&mut report)?;
    uniform_chi_square(&mut report, &plan)?;
    exponential_formula(&mut report, &plan)?;
    levy_closed_form(&mut report, &plan)?;
    levy_limit(&mut report, &plan)?;
    normal_case(&mut report, &plan)?;
    voting(&mut report, &plan)?;
    Ok(report)
}
