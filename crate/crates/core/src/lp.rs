//! `P(sum a_i ξ_i >= sum b_j η_j)` for independent standard exponentials,
//! by the residue formula
//!
//! ```text
//! sum_{m=1}^{k} a_m^(k+l-1) / ( prod_{i≠m} (a_m - a_i) * prod_j (a_m + b_j) )
//! ```
//!
//! The `a_i` must be distinct (simple poles). Terms can be much larger than
//! the result and cancel, so the float path evaluates every term in
//! double-double arithmetic and sums them from the smallest magnitude up.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::eulerian::wn_cdf;
use crate::error::{Error, Result};
use crate::numeric::DoubleDouble;

/// Default lower bound on `min |a_m - a_i|` for the float path.
pub const DEFAULT_MIN_SEPARATION: f64 = 1e-9;

/// What to do when distinct `a` coefficients are closer than the separation threshold.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SeparationPolicy {
    #[default]
    Reject,
    /// Evaluate anyway; [`LpEvaluation::well_conditioned`] reports the breach.
    Allow,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LpConfig {
    pub min_separation: f64,
    pub policy: SeparationPolicy,
}

impl Default for LpConfig {
    fn default() -> Self {
        LpConfig {
            min_separation: DEFAULT_MIN_SEPARATION,
            policy: SeparationPolicy::Reject,
        }
    }
}

/// Coefficients `a` (distinct, positive) and `b` (positive) with `k + l >= 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct LpInstance {
    a: Vec<f64>,
    b: Vec<f64>,
}

impl LpInstance {
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if a.is_empty() && b.is_empty() {
            return Err(Error::domain("a, b", "need k + l >= 1 coefficients"));
        }
        for (name, list) in [("a", &a), ("b", &b)] {
            if let Some(bad) = list.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
                return Err(Error::domain(name, format!("coefficient {bad} is not a finite positive number")));
            }
        }
        for i in 0..a.len() {
            for j in i + 1..a.len() {
                if a[i] == a[j] {
                    return Err(Error::Pole {
                        first: i,
                        second: j,
                        value: a[i].to_string(),
                    });
                }
            }
        }
        Ok(LpInstance { a, b })
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    /// Smallest pairwise distance between `a` coefficients (`inf` when `k < 2`).
    pub fn min_separation(&self) -> f64 {
        let mut sorted = self.a.clone();
        sorted.sort_by(f64::total_cmp);
        sorted
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }

    /// The instance with `a` and `b` exchanged; its probability is the complement.
    pub fn swapped(&self) -> Result<Self> {
        LpInstance::new(self.b.clone(), self.a.clone())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LpEvaluation {
    pub probability: f64,
    pub min_separation: f64,
    pub well_conditioned: bool,
}

/// Float evaluation with the default (rejecting) separation policy.
pub fn lp_probability(inst: &LpInstance) -> Result<f64> {
    lp_probability_with(inst, &LpConfig::default()).map(|e| e.probability)
}

pub fn lp_probability_with(inst: &LpInstance, cfg: &LpConfig) -> Result<LpEvaluation> {
    let separation = inst.min_separation();
    let well_conditioned = separation >= cfg.min_separation;
    if !well_conditioned && cfg.policy == SeparationPolicy::Reject {
        return Err(Error::IllConditioned {
            separation,
            threshold: cfg.min_separation,
        });
    }
    let (a, b) = (&inst.a, &inst.b);
    let exp = (a.len() + b.len() - 1) as u32;
    let terms = a
        .iter()
        .enumerate()
        .map(|(m, &am)| {
            let am = DoubleDouble::from(am);
            let mut denom = DoubleDouble::ONE;
            for (i, &ai) in a.iter().enumerate() {
                if i != m {
                    denom = denom * (am - DoubleDouble::from(ai));
                }
            }
            for &bj in b {
                denom = denom * (am + DoubleDouble::from(bj));
            }
            am.powi(exp) / denom
        })
        .collect();
    let value = DoubleDouble::sum_by_magnitude(terms).to_f64();
    // Rounding of the final sum can step a hair outside [0, 1].
    Ok(LpEvaluation {
        probability: value.clamp(0.0, 1.0),
        min_separation: separation,
        well_conditioned,
    })
}

/// The same formula over exact rationals.
pub fn lp_probability_exact(a: &[BigRational], b: &[BigRational]) -> Result<BigRational> {
    if a.is_empty() && b.is_empty() {
        return Err(Error::domain("a, b", "need k + l >= 1 coefficients"));
    }
    for (name, list) in [("a", a), ("b", b)] {
        if let Some(bad) = list.iter().find(|x| !x.is_positive()) {
            return Err(Error::domain(name, format!("coefficient {bad} is not positive")));
        }
    }
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            if a[i] == a[j] {
                return Err(Error::Pole {
                    first: i,
                    second: j,
                    value: a[i].to_string(),
                });
            }
        }
    }
    let exp = (a.len() + b.len() - 1) as i32;
    let mut total = BigRational::zero();
    for (m, am) in a.iter().enumerate() {
        let mut denom = BigRational::one();
        for (i, ai) in a.iter().enumerate() {
            if i != m {
                denom *= am - ai;
            }
        }
        for bj in b {
            denom *= am + bj;
        }
        total += am.pow(exp) / denom;
    }
    Ok(total)
}

fn check_wn_range(n: usize, k: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::domain("n", format!("the above-mean count needs n >= 2, got {n}")));
    }
    if k > n - 1 {
        return Err(Error::domain("k", format!("k must lie in 0..={}, got {k}", n - 1)));
    }
    Ok(())
}

/// `P(W_n <= k)` for uniform samples via the exponential representation:
/// `a = [1..k]`, `b = [1..n-k-1]`.
pub fn wn_cdf_via_lp(n: usize, k: usize) -> Result<f64> {
    check_wn_range(n, k)?;
    let a = (1..=k).map(|i| i as f64).collect();
    let b = (1..n - k).map(|j| j as f64).collect();
    lp_probability(&LpInstance::new(a, b)?)
}

/// Exact counterpart of [`wn_cdf_via_lp`].
pub fn wn_cdf_via_lp_exact(n: usize, k: usize) -> Result<BigRational> {
    check_wn_range(n, k)?;
    let int = |i: usize| BigRational::from_integer(BigInt::from(i));
    let a: Vec<_> = (1..=k).map(int).collect();
    let b: Vec<_> = (1..n - k).map(int).collect();
    lp_probability_exact(&a, &b)
}

/// Largest absolute difference between [`wn_cdf_via_lp`] and the exact
/// alternating-sum CDF over all `k` for one `n`.
pub fn wn_cdf_via_lp_discrepancy(n: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for k in 0..n {
        let exact = crate::pmf::rational_to_f64(&wn_cdf(n, k)?);
        worst = worst.max((wn_cdf_via_lp(n, k)? - exact).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn ints(v: &[i64]) -> Vec<BigRational> {
        v.iter().map(|&x| q(x, 1)).collect()
    }

    fn lp(a: &[f64], b: &[f64]) -> f64 {
        lp_probability(&LpInstance::new(a.to_vec(), b.to_vec()).unwrap()).unwrap()
    }

    #[test]
    fn float_examples() {
        assert_eq!(lp(&[1.0], &[]), 1.0);
        assert!((lp(&[1.0], &[1.0]) - 0.5).abs() < 1e-15);
        assert!((lp(&[1.0, 2.0], &[1.0]) - 5.0 / 6.0).abs() < 1e-15);
        assert_eq!(lp(&[], &[1.0, 3.0]), 0.0);
    }

    #[test]
    fn exact_examples() {
        assert_eq!(lp_probability_exact(&ints(&[1]), &ints(&[2])).unwrap(), q(1, 3));
        assert_eq!(lp_probability_exact(&ints(&[1, 2]), &ints(&[1])).unwrap(), q(5, 6));
        assert_eq!(lp_probability_exact(&ints(&[1, 2, 3]), &[]).unwrap(), q(1, 1));
        assert_eq!(lp_probability_exact(&[], &ints(&[4])).unwrap(), q(0, 1));
    }

    #[test]
    fn l_zero_cancels_to_one_in_floats() {
        let a: Vec<f64> = (1..=12).map(|i| i as f64).collect();
        assert!((lp(&a, &[]) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn validation_errors() {
        assert!(matches!(LpInstance::new(vec![1.0, 1.0], vec![]), Err(Error::Pole { .. })));
        assert!(matches!(LpInstance::new(vec![1.0, -2.0], vec![]), Err(Error::Domain { .. })));
        assert!(matches!(LpInstance::new(vec![1.0], vec![0.0]), Err(Error::Domain { .. })));
        assert!(LpInstance::new(vec![], vec![]).is_err());
        assert!(matches!(
            lp_probability_exact(&ints(&[2, 2]), &[]),
            Err(Error::Pole { .. })
        ));
        assert!(lp_probability_exact(&ints(&[0]), &[]).is_err());
    }

    #[test]
    fn separation_policy() {
        let inst = LpInstance::new(vec![1.0, 1.0 + 1e-12], vec![1.0]).unwrap();
        assert!(matches!(lp_probability(&inst), Err(Error::IllConditioned { .. })));
        let cfg = LpConfig {
            policy: SeparationPolicy::Allow,
            ..LpConfig::default()
        };
        let eval = lp_probability_with(&inst, &cfg).unwrap();
        assert!(!eval.well_conditioned);
        assert!((0.0..=1.0).contains(&eval.probability));
    }

    #[test]
    fn wn_cdf_examples() {
        assert!((wn_cdf_via_lp(4, 1).unwrap() - 1.0 / 6.0).abs() < 1e-15);
        assert_eq!(wn_cdf_via_lp(6, 0).unwrap(), 0.0);
        assert!((wn_cdf_via_lp(3, 1).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(wn_cdf_via_lp_exact(4, 1).unwrap(), q(1, 6));
        assert!(wn_cdf_via_lp(4, 4).is_err());
    }

    #[test]
    fn float_path_tracks_exact_cdf() {
        for n in 2..=16 {
            assert!(wn_cdf_via_lp_discrepancy(n).unwrap() < 1e-12, "n = {n}");
        }
    }
}
