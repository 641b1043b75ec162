//! Non-uniform utility laws: i.i.d. positive stable gaps and i.i.d. normal values.
//!
//! With i.i.d. positive `alpha`-stable gaps,
//! `P(W_n <= k) = P(Δ_2 / Δ_1 <= (s_k / s_{n-k-1})^(1/alpha))` where
//! `s_k = sum_{j<=k} j^alpha`. For `alpha = 1/2` (the Lévy law, `Δ = Z^-2`)
//! this is `(2/π) arctan(s_k / s_{n-k-1})`, and `W_n / n` has the limit law
//! `F(x) = (2/π) arctan((x/(1-x))^(3/2))`.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::error::{Error, Result};
use crate::mc::{sample_wn, simulate_counts, UtilityModel};
use crate::numeric::DoubleDouble;
use crate::pmf::DiscretePmf;

/// `s_k = 1^alpha + 2^alpha + ... + k^alpha`.
pub fn s_k(alpha: f64, k: usize) -> f64 {
    (1..=k)
        .fold(DoubleDouble::ZERO, |acc, j| acc + DoubleDouble::from((j as f64).powf(alpha)))
        .to_f64()
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::domain("alpha", format!("stability index must lie in (0, 1), got {alpha}")));
    }
    Ok(())
}

fn check_wn_range(n: usize, k: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::domain("n", format!("need n >= 2, got {n}")));
    }
    if k > n - 1 {
        return Err(Error::domain("k", format!("k must lie in 0..={}, got {k}", n - 1)));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StableModel {
    alpha: f64,
    n: usize,
}

impl StableModel {
    pub fn new(alpha: f64, n: usize) -> Result<Self> {
        check_alpha(alpha)?;
        if n < 2 {
            return Err(Error::domain("n", format!("need n >= 2, got {n}")));
        }
        Ok(StableModel { alpha, n })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Threshold `(s_k / s_{n-k-1})^(1/alpha)` for the gap ratio `Δ_2/Δ_1`.
    pub fn ratio_threshold(&self, k: usize) -> Result<f64> {
        check_wn_range(self.n, k)?;
        let num = s_k(self.alpha, k);
        let den = s_k(self.alpha, self.n - 1 - k);
        Ok((num / den).powf(1.0 / self.alpha))
    }
}

/// Sampler for the positive strictly stable law of index `alpha`.
///
/// For `alpha = 1/2` it returns `Z^-2` with `Z` standard normal, the standard
/// Lévy law with Laplace transform `exp(-sqrt(2t))`. Other indices use
/// Kanter's representation, which has Laplace transform `exp(-t^alpha)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StableSampler {
    alpha: f64,
}

impl StableSampler {
    pub fn new(alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(StableSampler { alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if self.alpha == 0.5 {
            loop {
                let z: f64 = rng.sample(StandardNormal);
                if z != 0.0 {
                    return 1.0 / (z * z);
                }
            }
        }
        kanter(self.alpha, rng)
    }
}

/// `sin(αU)/sin(U)^(1/α) * (sin((1-α)U)/E)^((1-α)/α)`, `U ~ U(0,π)`, `E ~ Exp(1)`.
fn kanter<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> f64 {
    loop {
        let u = PI * rng.random::<f64>();
        let e: f64 = rng.sample(Exp1);
        if u == 0.0 || e == 0.0 {
            continue;
        }
        let head = (alpha * u).sin() / u.sin().powf(1.0 / alpha);
        let tail = (((1.0 - alpha) * u).sin() / e).powf((1.0 - alpha) / alpha);
        let x = head * tail;
        if x > 0.0 && x.is_finite() {
            return x;
        }
    }
}

pub fn sample_stable<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> Result<f64> {
    Ok(StableSampler::new(alpha)?.sample(rng))
}

/// `P(W_n <= k) = (2/π) arctan(sum_{j<=k} sqrt j / sum_{j<=n-1-k} sqrt j)`
/// for Lévy gaps.
pub fn levy_wn_cdf(n: usize, k: usize) -> Result<f64> {
    check_wn_range(n, k)?;
    let num = s_k(0.5, k);
    let den = s_k(0.5, n - 1 - k);
    Ok(num.atan2(den) / FRAC_PI_2)
}

/// Point masses of [`levy_wn_cdf`] on `0..=n-1` (mass at 0 is zero).
pub fn levy_wn_pmf(n: usize) -> Result<DiscretePmf<f64>> {
    check_wn_range(n, 0)?;
    let cdf: Vec<f64> = (0..n).map(|k| levy_wn_cdf(n, k)).collect::<Result<_>>()?;
    let probs = std::iter::once(cdf[0])
        .chain(cdf.windows(2).map(|w| w[1] - w[0]))
        .collect();
    DiscretePmf::<f64>::new(0, probs, format!("W_{n} with Levy gaps"))
}

/// Limit CDF of `W_n / n` under Lévy gaps, on `[0, 1]`.
pub fn levy_limit_cdf(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::domain("x", format!("limit CDF is defined on [0, 1], got {x}")));
    }
    Ok(x.powf(1.5).atan2((1.0 - x).powf(1.5)) / FRAC_PI_2)
}

/// Density `(3/π) sqrt(x(1-x)) / (x^3 + (1-x)^3)` of the limit law, on `(0, 1)`.
pub fn levy_limit_density(x: f64) -> Result<f64> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::domain("x", format!("limit density is defined on (0, 1), got {x}")));
    }
    let y = 1.0 - x;
    Ok(3.0 / PI * (x * y).sqrt() / (x * x * x + y * y * y))
}

/// Monte Carlo estimate of `P(W_n <= k)` from the two-gap ratio form.
///
/// Each draw compares `s_k^(1/α) Δ_1` against `s_{n-k-1}^(1/α) Δ_2` in log
/// space, so extreme thresholds cannot overflow.
pub fn stable_wn_cdf_mc(alpha: f64, n: usize, k: usize, n_samples: u64, seed: u64) -> Result<f64> {
    let model = StableModel::new(alpha, n)?;
    check_wn_range(n, k)?;
    if n_samples == 0 {
        return Err(Error::domain("n_samples", "need at least one sample"));
    }
    let sampler = StableSampler::new(model.alpha)?;
    let lhs_scale = s_k(alpha, k).ln() / alpha;
    let rhs_scale = s_k(alpha, n - 1 - k).ln() / alpha;
    let counts = simulate_counts(
        n_samples,
        seed,
        2,
        || (),
        |rng, _| {
            let d1 = sampler.sample(rng);
            let d2 = sampler.sample(rng);
            usize::from(lhs_scale + d1.ln() >= rhs_scale + d2.ln())
        },
    );
    Ok(counts[1] as f64 / n_samples as f64)
}

/// How a tabulated constant is known.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    /// Closed form with a proof.
    Proved,
    /// Closed form matching high-precision numerics, without proof.
    Conjectured,
    /// No closed form; only Monte Carlo estimates are available.
    MonteCarloOnly,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Proved => "proved",
            Provenance::Conjectured => "conjectured",
            Provenance::MonteCarloOnly => "monte-carlo-only",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NormalMass {
    pub k: usize,
    pub value: Option<f64>,
    pub provenance: Provenance,
    /// Closed form, when there is one.
    pub formula: Option<&'static str>,
}

/// `P(W_n = k)` for `n` i.i.d. standard normal values, where known.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalCaseConstants {
    pub n: usize,
    pub masses: Vec<NormalMass>,
}

impl NormalCaseConstants {
    pub fn mass(&self, k: usize) -> Option<&NormalMass> {
        self.masses.iter().find(|m| m.k == k)
    }
}

/// High-precision reference for `P(W_5 = 1)` from the spherical tetrahedron volume.
pub const W5_ENDPOINT_REFERENCE: &str = "0.04892344186208439057262451667";
/// Volume of the spherical tetrahedron with all dihedral angles `arcsec(4)`.
pub const W5_TETRAHEDRON_VOLUME_REFERENCE: &str = "0.19314200684738698696896128783";

/// `P(W_4 = 1) = arccos(23/27)/π`, the area of an equiangular spherical
/// triangle with angles `arcsec 3` over the sphere area, times 4.
pub fn normal_w4_endpoint() -> f64 {
    (23.0f64 / 27.0).acos() / PI
}

/// Conjectured `P(W_5 = 1) = arccos(61/64)/(2π)`.
pub fn normal_w5_endpoint() -> f64 {
    (61.0f64 / 64.0).acos() / (2.0 * PI)
}

pub fn normal_case_pmf(n: usize) -> Result<NormalCaseConstants> {
    let masses = match n {
        4 => {
            let end = normal_w4_endpoint();
            let mid = 1.0 - 2.0 * end;
            vec![
                NormalMass {
                    k: 1,
                    value: Some(end),
                    provenance: Provenance::Proved,
                    formula: Some("arccos(23/27)/pi"),
                },
                NormalMass {
                    k: 2,
                    value: Some(mid),
                    provenance: Provenance::Proved,
                    formula: Some("3 - 6*arcsec(3)/pi"),
                },
                NormalMass {
                    k: 3,
                    value: Some(end),
                    provenance: Provenance::Proved,
                    formula: Some("arccos(23/27)/pi"),
                },
            ]
        }
        5 => {
            let end = normal_w5_endpoint();
            let endpoint = |k| NormalMass {
                k,
                value: Some(end),
                provenance: Provenance::Conjectured,
                formula: Some("arccos(61/64)/(2*pi)"),
            };
            let interior = |k| NormalMass {
                k,
                value: None,
                provenance: Provenance::MonteCarloOnly,
                formula: None,
            };
            vec![endpoint(1), interior(2), interior(3), endpoint(4)]
        }
        other => return Err(Error::Unsupported(other)),
    };
    Ok(NormalCaseConstants { n, masses })
}

/// Symmetrised Monte Carlo estimate of `P(W_5 = 2) = P(W_5 = 3)` for normal values.
pub fn normal_w5_interior_mc(n_samples: u64, seed: u64) -> Result<f64> {
    let emp = sample_wn(UtilityModel::NormalIid, 5, n_samples, seed)?;
    Ok(0.5 * (emp.frequency(2) + emp.frequency(3)))
}
