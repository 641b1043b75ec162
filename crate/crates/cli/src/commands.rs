use anyhow::{anyhow, bail, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Pow, Zero};
use serde_json::Value;

use eulermean::heavy_tail::{levy_wn_pmf, normal_w5_interior_mc};
use eulermean::lp::{lp_probability_with, LpConfig, SeparationPolicy};
use eulermean::mc::{binomial_se, mc_lp_probability, PmfComparison};
use eulermean::pmf::rational_to_f64;
use eulermean::voting::{Candidate, PolarizedScenario, ScenarioBallot};
use eulermean::{
    compare_pmf, eulerian_number, eulerian_row, expected_gain, floor_sum_pmf, levy_limit_cdf, levy_limit_density,
    levy_wn_cdf, lp_probability_exact, normal_case_pmf, optimal_approval_set, polarized_scenario_expected_utility,
    sample_floor_sum, sample_wn, wn_cdf, wn_cdf_via_lp, wn_cdf_via_lp_exact, wn_pmf, DiscretePmf, EmpiricalPmf,
    LpInstance, UtilityModel,
};

use crate::output::{big_uint, rational, Emitter, Obj};
use crate::{Ctx, Law, Statistic};

const DEFAULT_SAMPLES: u64 = 1_000_000;

pub fn eulerian(n: usize, k: Option<i64>) -> Value {
    match k {
        Some(k) => Obj::new()
            .with("n", n)
            .with("k", k)
            .with("value", big_uint(&eulerian_number(n, k)))
            .build(),
        None => Obj::new()
            .with("n", n)
            .with("row", Value::Array(eulerian_row(n).iter().map(big_uint).collect()))
            .build(),
    }
}

fn exact_pmf_json(e: &Emitter, pmf: &DiscretePmf) -> Value {
    Value::Array(
        pmf.iter()
            .map(|(k, p)| {
                Obj::new()
                    .with("k", k)
                    .with("exact", rational(p))
                    .with("value", e.float(rational_to_f64(p)))
                    .build()
            })
            .collect(),
    )
}

pub fn pmf(ctx: &Ctx, law: Law, n: usize) -> Result<Value> {
    let (name, pmf) = match law {
        Law::Wn => ("wn", wn_pmf(n)?),
        Law::Floorsum => ("floorsum", floor_sum_pmf(n)?),
    };
    Ok(Obj::new()
        .with("law", name)
        .with("n", n)
        .with("label", pmf.label())
        .with("support_min", pmf.support_min())
        .with("pmf", exact_pmf_json(&ctx.emit, &pmf))
        .build())
}

pub fn cdf(ctx: &Ctx, n: usize, k: usize, via_lp: bool) -> Result<Value> {
    let exact = wn_cdf(n, k)?;
    let mut out = Obj::new()
        .with("law", "wn")
        .with("n", n)
        .with("k", k)
        .with("exact", rational(&exact))
        .with("value", ctx.emit.float(rational_to_f64(&exact)));
    if via_lp {
        let lp_exact = wn_cdf_via_lp_exact(n, k)?;
        let lp_float = wn_cdf_via_lp(n, k)?;
        out.push(
            "via_lp",
            Obj::new()
                .with("exact", rational(&lp_exact))
                .with("value", ctx.emit.float(lp_float))
                .with("exact_agrees", lp_exact == exact)
                .with("abs_error", ctx.emit.float((lp_float - rational_to_f64(&exact)).abs())),
        );
    }
    Ok(out.build())
}

/// Integer, `p/q`, or decimal (with optional exponent) text as an exact rational.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let t = text.trim();
    let bad = || anyhow!("cannot parse `{text}` as a rational number");
    if let Some((p, q)) = t.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            bail!("zero denominator in `{text}`");
        }
        return Ok(BigRational::new(p, q));
    }
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i64>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if !frac.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int}{frac}");
    if digits.is_empty() || digits == "-" || digits == "+" {
        return Err(bad());
    }
    let value: BigInt = digits.parse().map_err(|_| bad())?;
    let scale = exp - frac.len() as i64;
    let ten = BigInt::from(10);
    let r = if scale >= 0 {
        BigRational::from_integer(value * Pow::pow(&ten, scale as u64))
    } else {
        BigRational::new(value, Pow::pow(&ten, (-scale) as u64))
    };
    Ok(r)
}

fn parse_floats(name: &str, items: &[String]) -> Result<Vec<f64>> {
    items
        .iter()
        .map(|s| s.trim().parse::<f64>().map_err(|_| anyhow!("cannot parse {name} coefficient `{s}`")))
        .collect()
}

pub fn lp(
    ctx: &Ctx,
    a: &[String],
    b: &[String],
    exact: bool,
    allow_ill_conditioned: bool,
    min_separation: f64,
    simulate: bool,
) -> Result<Value> {
    let mut out = Obj::new()
        .with("a", a.iter().map(|s| Value::String(s.clone())).collect::<Vec<_>>())
        .with("b", b.iter().map(|s| Value::String(s.clone())).collect::<Vec<_>>());
    let inst = if exact {
        let ar = a.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>()?;
        let br = b.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>()?;
        let p = lp_probability_exact(&ar, &br)?;
        out.push("exact", rational(&p));
        out.push("value", ctx.emit.float(rational_to_f64(&p)));
        let to_f = |v: &[BigRational]| v.iter().map(rational_to_f64).collect::<Vec<_>>();
        simulate.then(|| LpInstance::new(to_f(&ar), to_f(&br))).transpose()?
    } else {
        let inst = LpInstance::new(parse_floats("a", a)?, parse_floats("b", b)?)?;
        let cfg = LpConfig {
            min_separation,
            policy: if allow_ill_conditioned {
                SeparationPolicy::Allow
            } else {
                SeparationPolicy::Reject
            },
        };
        let eval = lp_probability_with(&inst, &cfg)?;
        out.push("value", ctx.emit.float(eval.probability));
        out.push("min_separation", ctx.emit.float(eval.min_separation));
        out.push("well_conditioned", eval.well_conditioned);
        Some(inst)
    };
    if let (true, Some(inst)) = (simulate, inst) {
        let n = ctx.samples_or(DEFAULT_SAMPLES)?;
        let p = mc_lp_probability(&inst, n, ctx.seed)?;
        out.push(
            "simulation",
            Obj::new()
                .with("samples", n)
                .with("seed", ctx.seed)
                .with("frequency", ctx.emit.float(p))
                .with("standard_error", ctx.emit.float(binomial_se(p, n))),
        );
    }
    Ok(out.build())
}

pub fn levy_cdf(ctx: &Ctx, n: usize, k: usize) -> Result<Value> {
    Ok(Obj::new()
        .with("n", n)
        .with("k", k)
        .with("value", ctx.emit.float(levy_wn_cdf(n, k)?))
        .build())
}

pub fn levy_limit(ctx: &Ctx, x: f64) -> Result<Value> {
    let mut out = Obj::new()
        .with("x", ctx.emit.float(x))
        .with("cdf", ctx.emit.float(levy_limit_cdf(x)?));
    out.push(
        "density",
        levy_limit_density(x).map(|d| ctx.emit.float(d)).unwrap_or(Value::Null),
    );
    Ok(out.build())
}

pub fn normal_case(ctx: &Ctx, n: usize, simulate: bool) -> Result<Value> {
    let constants = normal_case_pmf(n)?;
    let sim = if simulate {
        let samples = ctx.samples_or(DEFAULT_SAMPLES)?;
        Some((samples, sample_wn(UtilityModel::NormalIid, n, samples, ctx.seed)?))
    } else {
        None
    };
    let masses = constants
        .masses
        .iter()
        .map(|m| {
            let mut o = Obj::new()
                .with("k", m.k)
                .with("value", m.value.map(|v| ctx.emit.float(v)).unwrap_or(Value::Null))
                .with("provenance", m.provenance.as_str())
                .with("formula", m.formula.map(Value::from).unwrap_or(Value::Null));
            if let Some((samples, emp)) = &sim {
                let f = emp.frequency(m.k as i64);
                o.push("frequency", ctx.emit.float(f));
                o.push("standard_error", ctx.emit.float(binomial_se(m.value.unwrap_or(f), *samples)));
            }
            o.build()
        })
        .collect::<Vec<_>>();
    let mut out = Obj::new().with("n", n).with("masses", masses);
    if let Some((samples, _)) = &sim {
        out.push("samples", *samples);
        out.push("seed", ctx.seed);
        if n == 5 {
            let interior = normal_w5_interior_mc(*samples, ctx.seed)?;
            out.push("interior_symmetrized", ctx.emit.float(interior));
        }
    }
    Ok(out.build())
}

fn indicator_indices(ind: &[bool]) -> Vec<usize> {
    ind.iter().enumerate().filter(|(_, &a)| a).map(|(j, _)| j + 1).collect()
}

pub fn vote_optimal(ctx: &Ctx, utilities: &[f64]) -> Result<Value> {
    let set = optimal_approval_set(utilities)?;
    let gain = expected_gain(utilities, &set, 1.0)?;
    let mean = eulermean::numeric::mean_dd(utilities).to_f64();
    Ok(Obj::new()
        .with("utilities", ctx.emit.floats(utilities))
        .with("mean", ctx.emit.float(mean))
        .with("approve", indicator_indices(&set))
        .with("approved_count", set.iter().filter(|&&a| a).count())
        .with("gain_per_unit_p", ctx.emit.float(gain))
        .build())
}

pub fn vote_gain(ctx: &Ctx, utilities: &[f64], approve: &[usize], p: f64) -> Result<Value> {
    let n = utilities.len();
    let mut ind = vec![false; n];
    for &j in approve {
        if j == 0 || j > n {
            bail!("approved index {j} is outside 1..={n}");
        }
        ind[j - 1] = true;
    }
    let gain = expected_gain(utilities, &ind, p)?;
    let best = optimal_approval_set(utilities)?;
    let best_gain = expected_gain(utilities, &best, p)?;
    Ok(Obj::new()
        .with("utilities", ctx.emit.floats(utilities))
        .with("approve", indicator_indices(&ind))
        .with("p", ctx.emit.float(p))
        .with("gain", ctx.emit.float(gain))
        .with("optimal_approve", indicator_indices(&best))
        .with("optimal_gain", ctx.emit.float(best_gain))
        .build())
}

pub fn vote_polarized(ctx: &Ctx, m: u64, ballots: &[ScenarioBallot], utilities: &[f64]) -> Result<Value> {
    let u: [f64; 3] = utilities
        .try_into()
        .map_err(|_| anyhow!("need exactly three utilities"))?;
    let scenario = PolarizedScenario::new(m, u, ctx.seed)?;
    let n = ctx.samples_or(DEFAULT_SAMPLES)?;
    let rows = ballots
        .iter()
        .map(|&ballot| {
            let est = polarized_scenario_expected_utility(&scenario, ballot, n)?;
            let wins: Vec<Value> = Candidate::ALL
                .iter()
                .map(|&c| ctx.emit.float(est.win_probability(c)))
                .collect();
            Ok(Obj::new()
                .with("ballot", ballot.to_string())
                .with("expected_utility", ctx.emit.float(est.expected_utility))
                .with("standard_error", ctx.emit.float(est.standard_error))
                .with("win_probability", wins)
                .build())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Obj::new()
        .with("m", m)
        .with("utilities", ctx.emit.floats(&u))
        .with("samples", n)
        .with("seed", ctx.seed)
        .with("ballots", rows)
        .build())
}

/// Reference law for a simulation, when one is known.
fn reference(model: UtilityModel, n: usize, statistic: Statistic) -> Result<Option<DiscretePmf<f64>>> {
    Ok(match (statistic, model) {
        (Statistic::Floorsum, _) => Some(floor_sum_pmf(n)?.to_f64()),
        (Statistic::Wn, UtilityModel::UniformIid) => Some(wn_pmf(n)?.to_f64()),
        (Statistic::Wn, UtilityModel::StableIncrements { alpha: 0.5 }) => Some(levy_wn_pmf(n)?),
        (Statistic::Wn, UtilityModel::NormalIid) if n == 4 => {
            let probs = normal_case_pmf(4)?
                .masses
                .iter()
                .map(|m| m.value.expect("n = 4 masses are known"))
                .collect();
            Some(DiscretePmf::<f64>::new(1, probs, "W_4 with normal values")?)
        }
        _ => None,
    })
}

pub fn comparison_json(e: &Emitter, label: &str, cmp: &PmfComparison) -> Value {
    Obj::new()
        .with("reference", label)
        .with("chi_square", e.float(cmp.chi_square))
        .with("df", cmp.df)
        .with("p_value", e.float(cmp.p_value))
        .with("max_abs_deviation", e.float(cmp.max_abs_deviation))
        .with("max_abs_z", e.float(cmp.max_abs_z()))
        .build()
}

fn counts_json(e: &Emitter, emp: &EmpiricalPmf) -> Value {
    Value::Array(
        (emp.support_min..emp.support_end())
            .map(|k| {
                Obj::new()
                    .with("k", k)
                    .with("count", emp.count(k))
                    .with("frequency", e.float(emp.frequency(k)))
                    .build()
            })
            .collect(),
    )
}

pub fn sample(ctx: &Ctx, model: UtilityModel, n: usize, statistic: Statistic) -> Result<Value> {
    let samples = ctx.samples_or(DEFAULT_SAMPLES)?;
    let emp = match statistic {
        Statistic::Wn => sample_wn(model, n, samples, ctx.seed)?,
        Statistic::Floorsum => {
            if model != UtilityModel::UniformIid {
                bail!("the floor-sum statistic is defined for uniform values only");
            }
            sample_floor_sum(n, samples, ctx.seed)?
        }
    };
    let mut out = Obj::new()
        .with("model", model.to_string())
        .with(
            "statistic",
            match statistic {
                Statistic::Wn => "wn",
                Statistic::Floorsum => "floorsum",
            },
        )
        .with("n", n)
        .with("samples", samples)
        .with("seed", ctx.seed)
        .with("counts", counts_json(&ctx.emit, &emp));
    if let Some(reference) = reference(model, n, statistic)? {
        let cmp = compare_pmf(&emp, &reference)?;
        out.push("comparison", comparison_json(&ctx.emit, reference.label(), &cmp));
    }
    Ok(out.build())
}
