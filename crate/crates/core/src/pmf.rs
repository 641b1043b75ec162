use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Float PMFs must sum to one within this tolerance.
pub const FLOAT_SUM_TOLERANCE: f64 = 1e-12;

/// A probability vector over the integer window `support_min .. support_min + probs.len()`.
///
/// `P` is [`BigRational`] for the exact Eulerian laws and `f64` for laws
/// derived from models without a rational closed form.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscretePmf<P = BigRational> {
    support_min: i64,
    probs: Vec<P>,
    label: String,
}

impl<P> DiscretePmf<P> {
    pub fn support_min(&self) -> i64 {
        self.support_min
    }

    /// One past the largest support point.
    pub fn support_end(&self) -> i64 {
        self.support_min + self.probs.len() as i64
    }

    pub fn probs(&self) -> &[P] {
        &self.probs
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Iterator over `(k, P(X = k))`.
    pub fn iter(&self) -> impl Iterator<Item = (i64, &P)> {
        let lo = self.support_min;
        self.probs.iter().enumerate().map(move |(i, p)| (lo + i as i64, p))
    }

    /// The law of `X + by`.
    pub fn shifted(&self, by: i64) -> Self
    where
        P: Clone,
    {
        DiscretePmf {
            support_min: self.support_min + by,
            probs: self.probs.clone(),
            label: format!("{} shifted by {by:+}", self.label),
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }
}

impl<P: Clone + Zero> DiscretePmf<P> {
    /// `P(X = k)`, zero outside the window.
    pub fn prob(&self, k: i64) -> P {
        if k < self.support_min || k >= self.support_end() {
            return P::zero();
        }
        self.probs[(k - self.support_min) as usize].clone()
    }
}

impl DiscretePmf<BigRational> {
    pub fn new(support_min: i64, probs: Vec<BigRational>, label: impl Into<String>) -> Result<Self> {
        let zero = BigRational::zero();
        let one = BigRational::one();
        if let Some(bad) = probs.iter().find(|p| **p < zero || **p > one) {
            return Err(Error::domain("probs", format!("entry {bad} outside [0, 1]")));
        }
        let total: BigRational = probs.iter().sum();
        if total != one {
            return Err(Error::domain("probs", format!("entries sum to {total}, not 1")));
        }
        Ok(DiscretePmf {
            support_min,
            probs,
            label: label.into(),
        })
    }

    /// `P(X <= k)` as an exact rational.
    pub fn cdf(&self, k: i64) -> BigRational {
        self.iter()
            .take_while(|(j, _)| *j <= k)
            .map(|(_, p)| p.clone())
            .sum()
    }

    pub fn to_f64(&self) -> DiscretePmf<f64> {
        DiscretePmf {
            support_min: self.support_min,
            probs: self.probs.iter().map(rational_to_f64).collect(),
            label: self.label.clone(),
        }
    }
}

impl DiscretePmf<f64> {
    pub fn new(support_min: i64, probs: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        if let Some(bad) = probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::domain("probs", format!("entry {bad} outside [0, 1]")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > FLOAT_SUM_TOLERANCE {
            return Err(Error::domain("probs", format!("entries sum to {total}, not 1")));
        }
        Ok(DiscretePmf {
            support_min,
            probs,
            label: label.into(),
        })
    }

    pub fn cdf(&self, k: i64) -> f64 {
        self.iter().take_while(|(j, _)| *j <= k).map(|(_, p)| *p).sum()
    }
}

/// Nearest `f64` to an exact rational, robust to numerators and
/// denominators beyond the `f64` range.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    if let Some(v) = r.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // Scale into range by dropping low bits of both parts.
    let numer = r.numer();
    let denom = r.denom();
    let shift = numer.bits().max(denom.bits()).saturating_sub(900);
    let n: BigInt = numer >> shift;
    let d: BigInt = denom >> shift;
    n.to_f64().unwrap_or(f64::NAN) / d.to_f64().unwrap_or(f64::NAN)
}
