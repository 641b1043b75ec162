//! Seeded, reproducible Monte Carlo sampling.
//!
//! Work is cut into fixed chunks of [`CHUNK_SIZE`] draws. Chunk `c` always
//! draws from ChaCha8 stream `c` of the master seed, whichever worker runs it,
//! and per-chunk integer counts are merged by addition. Results therefore
//! depend only on `(seed, n_samples)`, not on the thread count.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use rayon::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::gaps::count_above_slice;
use crate::heavy_tail::StableSampler;
use crate::lp::LpInstance;
use crate::pmf::DiscretePmf;

pub const CHUNK_SIZE: u64 = 1 << 16;

/// Generator for substream `index` of `seed`.
pub fn substream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Histogram of `n_samples` draws of `draw`, each returning a bin in `0..bins`.
///
/// `init` builds per-chunk scratch state (buffers, samplers).
pub fn simulate_counts<S, I, F>(n_samples: u64, seed: u64, bins: usize, init: I, draw: F) -> Vec<u64>
where
    I: Fn() -> S + Sync,
    F: Fn(&mut ChaCha8Rng, &mut S) -> usize + Sync,
{
    let chunks = n_samples.div_ceil(CHUNK_SIZE);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = substream(seed, c);
            let mut state = init();
            let len = CHUNK_SIZE.min(n_samples - c * CHUNK_SIZE);
            let mut counts = vec![0u64; bins];
            for _ in 0..len {
                counts[draw(&mut rng, &mut state)] += 1;
            }
            counts
        })
        .reduce(
            || vec![0u64; bins],
            |mut acc, part| {
                acc.iter_mut().zip(part).for_each(|(a, p)| *a += p);
                acc
            },
        )
}

/// How the `n` utilities of one draw are generated.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum UtilityModel {
    UniformIid,
    /// Sorted values built from i.i.d. positive `alpha`-stable gaps starting
    /// at 0, then randomly permuted.
    StableIncrements { alpha: f64 },
    NormalIid,
}

impl UtilityModel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            UtilityModel::StableIncrements { alpha } => StableSampler::new(alpha).map(|_| ()),
            _ => Ok(()),
        }
    }

    /// Fills `buf` with one draw. The model must have been validated.
    pub fn fill<R: Rng + ?Sized>(&self, rng: &mut R, buf: &mut [f64]) {
        match *self {
            UtilityModel::UniformIid => buf.iter_mut().for_each(|u| *u = rng.random()),
            UtilityModel::NormalIid => buf.iter_mut().for_each(|u| *u = rng.sample(StandardNormal)),
            UtilityModel::StableIncrements { alpha } => {
                let sampler = StableSampler::new(alpha).expect("validated model");
                let mut level = 0.0;
                for (i, u) in buf.iter_mut().enumerate() {
                    if i > 0 {
                        level += sampler.sample(rng);
                    }
                    *u = level;
                }
                buf.shuffle(rng);
            }
        }
    }
}

impl fmt::Display for UtilityModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UtilityModel::UniformIid => write!(f, "uniform"),
            UtilityModel::NormalIid => write!(f, "normal"),
            UtilityModel::StableIncrements { alpha } => write!(f, "stable:{alpha}"),
        }
    }
}

impl FromStr for UtilityModel {
    type Err = Error;

    /// `uniform`, `normal`, `stable` (alpha = 1/2) or `stable:<alpha>`.
    fn from_str(s: &str) -> Result<Self> {
        let model = match s.trim().to_ascii_lowercase().as_str() {
            "uniform" => UtilityModel::UniformIid,
            "normal" => UtilityModel::NormalIid,
            "stable" | "levy" => UtilityModel::StableIncrements { alpha: 0.5 },
            other => match other.strip_prefix("stable:") {
                Some(a) => UtilityModel::StableIncrements {
                    alpha: a
                        .parse()
                        .map_err(|_| Error::domain("model", format!("cannot parse alpha from `{a}`")))?,
                },
                None => {
                    return Err(Error::domain(
                        "model",
                        format!("unknown model `{s}` (expected uniform, normal, stable[:alpha])"),
                    ))
                }
            },
        };
        model.validate()?;
        Ok(model)
    }
}

/// Observed counts over the window `support_min .. support_min + counts.len()`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmpiricalPmf {
    pub support_min: i64,
    pub counts: Vec<u64>,
    pub n_samples: u64,
    pub seed: u64,
}

impl EmpiricalPmf {
    pub fn new(support_min: i64, counts: Vec<u64>, seed: u64) -> Self {
        let n_samples = counts.iter().sum();
        EmpiricalPmf {
            support_min,
            counts,
            n_samples,
            seed,
        }
    }

    pub fn support_end(&self) -> i64 {
        self.support_min + self.counts.len() as i64
    }

    pub fn count(&self, k: i64) -> u64 {
        if k < self.support_min || k >= self.support_end() {
            0
        } else {
            self.counts[(k - self.support_min) as usize]
        }
    }

    pub fn frequency(&self, k: i64) -> f64 {
        self.count(k) as f64 / self.n_samples as f64
    }

    /// Empirical `P(X <= k)`.
    pub fn cdf(&self, k: i64) -> f64 {
        let below: u64 = (self.support_min..=k.min(self.support_end() - 1))
            .map(|j| self.count(j))
            .sum();
        below as f64 / self.n_samples as f64
    }

    pub fn shifted(&self, by: i64) -> Self {
        EmpiricalPmf {
            support_min: self.support_min + by,
            ..self.clone()
        }
    }
}

fn check_samples(n_samples: u64) -> Result<()> {
    if n_samples == 0 {
        return Err(Error::domain("n_samples", "need at least one sample"));
    }
    Ok(())
}

/// Empirical law of the above-mean count `W_n` on `0..=n`.
pub fn sample_wn(model: UtilityModel, n: usize, n_samples: u64, seed: u64) -> Result<EmpiricalPmf> {
    sample_wn_by(model, n, n_samples, seed, count_above_slice)
}

/// Like [`sample_wn`] with a caller-supplied statistic in `0..=n`.
pub fn sample_wn_by<F>(model: UtilityModel, n: usize, n_samples: u64, seed: u64, statistic: F) -> Result<EmpiricalPmf>
where
    F: Fn(&[f64]) -> usize + Sync,
{
    if n < 2 {
        return Err(Error::domain("n", format!("need n >= 2, got {n}")));
    }
    check_samples(n_samples)?;
    model.validate()?;
    let counts = simulate_counts(
        n_samples,
        seed,
        n + 1,
        || vec![0.0; n],
        |rng, buf| {
            model.fill(rng, buf);
            statistic(buf)
        },
    );
    Ok(EmpiricalPmf::new(0, counts, seed))
}

/// Empirical law of `floor(U_1 + ... + U_n)` on `0..n`.
pub fn sample_floor_sum(n: usize, n_samples: u64, seed: u64) -> Result<EmpiricalPmf> {
    if n < 1 {
        return Err(Error::domain("n", "need n >= 1"));
    }
    check_samples(n_samples)?;
    let counts = simulate_counts(
        n_samples,
        seed,
        n,
        || (),
        |rng, _| {
            let s: f64 = (0..n).map(|_| rng.random::<f64>()).sum();
            (s.floor() as usize).min(n - 1)
        },
    );
    Ok(EmpiricalPmf::new(0, counts, seed))
}

/// Monte Carlo frequency of `sum a_i ξ_i >= sum b_j η_j` with i.i.d. standard exponentials.
pub fn mc_lp_probability(inst: &LpInstance, n_samples: u64, seed: u64) -> Result<f64> {
    check_samples(n_samples)?;
    let counts = simulate_counts(
        n_samples,
        seed,
        2,
        || (),
        |rng, _| {
            let lhs: f64 = inst.a().iter().map(|a| a * rng.sample::<f64, _>(Exp1)).sum();
            let rhs: f64 = inst.b().iter().map(|b| b * rng.sample::<f64, _>(Exp1)).sum();
            usize::from(lhs >= rhs)
        },
    );
    Ok(counts[1] as f64 / n_samples as f64)
}

/// Binomial standard error `sqrt(p(1-p)/n)`.
pub fn binomial_se(p: f64, n_samples: u64) -> f64 {
    (p * (1.0 - p) / n_samples as f64).max(0.0).sqrt()
}

#[derive(Clone, Debug, PartialEq)]
pub struct CellComparison {
    pub k: i64,
    pub expected: f64,
    pub observed: f64,
    pub z: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PmfComparison {
    pub cells: Vec<CellComparison>,
    pub max_abs_deviation: f64,
    pub chi_square: f64,
    /// Nonzero support size of the reference law minus one.
    pub df: usize,
    pub p_value: f64,
}

impl PmfComparison {
    /// Whether the chi-square statistic lies strictly below the `q` quantile.
    pub fn chi_square_below_quantile(&self, q: f64) -> bool {
        if self.df == 0 {
            return self.chi_square == 0.0;
        }
        self.chi_square < chi_square_quantile(self.df, q)
    }

    pub fn max_abs_z(&self) -> f64 {
        self.cells.iter().map(|c| c.z.abs()).fold(0.0, f64::max)
    }
}

pub fn chi_square_quantile(df: usize, q: f64) -> f64 {
    ChiSquared::new(df as f64)
        .expect("df >= 1")
        .inverse_cdf(q)
}

fn chi_square_sf(stat: f64, df: usize) -> f64 {
    if df == 0 {
        return if stat == 0.0 { 1.0 } else { 0.0 };
    }
    if !stat.is_finite() {
        return 0.0;
    }
    ChiSquared::new(df as f64).expect("df >= 1").sf(stat)
}

/// Compares observed counts with a reference law.
///
/// The reference window must lie inside the empirical window; empirical cells
/// outside it have reference probability zero.
pub fn compare_pmf(emp: &EmpiricalPmf, exact: &DiscretePmf<f64>) -> Result<PmfComparison> {
    if exact.support_min() < emp.support_min || exact.support_end() > emp.support_end() {
        return Err(Error::SupportMismatch(format!(
            "reference window [{}, {}) is not inside empirical window [{}, {})",
            exact.support_min(),
            exact.support_end(),
            emp.support_min,
            emp.support_end()
        )));
    }
    let n = emp.n_samples as f64;
    let mut cells = Vec::with_capacity(emp.counts.len());
    let mut chi_square = 0.0;
    let mut nonzero = 0usize;
    for k in emp.support_min..emp.support_end() {
        let p = exact.prob(k);
        let count = emp.count(k) as f64;
        let observed = count / n;
        let z = if p > 0.0 && p < 1.0 {
            (observed - p) / binomial_se(p, emp.n_samples)
        } else if observed == p {
            0.0
        } else {
            (observed - p).signum() * f64::INFINITY
        };
        if p > 0.0 {
            nonzero += 1;
            let e = n * p;
            chi_square += (count - e) * (count - e) / e;
        } else if count > 0.0 {
            chi_square = f64::INFINITY;
        }
        cells.push(CellComparison {
            k,
            expected: p,
            observed,
            z,
        });
    }
    let max_abs_deviation = cells
        .iter()
        .map(|c| (c.observed - c.expected).abs())
        .fold(0.0, f64::max);
    let df = nonzero.saturating_sub(1);
    Ok(PmfComparison {
        p_value: chi_square_sf(chi_square, df),
        cells,
        max_abs_deviation,
        chi_square,
        df,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoSampleChiSquare {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
}

/// Pearson chi-square homogeneity test between two histograms, aligned on
/// absolute support points; cells empty in both are dropped.
pub fn two_sample_chi_square(x: &EmpiricalPmf, y: &EmpiricalPmf) -> TwoSampleChiSquare {
    let (nx, ny) = (x.n_samples as f64, y.n_samples as f64);
    let (kx, ky) = ((ny / nx).sqrt(), (nx / ny).sqrt());
    let lo = x.support_min.min(y.support_min);
    let hi = x.support_end().max(y.support_end());
    let mut statistic = 0.0;
    let mut cells = 0usize;
    for k in lo..hi {
        let (a, b) = (x.count(k) as f64, y.count(k) as f64);
        if a + b == 0.0 {
            continue;
        }
        cells += 1;
        let d = kx * a - ky * b;
        statistic += d * d / (a + b);
    }
    let df = cells.saturating_sub(1);
    TwoSampleChiSquare {
        statistic,
        df,
        p_value: chi_square_sf(statistic, df),
    }
}
