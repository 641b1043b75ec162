//! Above/below-mean counts of a real sample, computed directly and from the
//! gaps between consecutive order statistics.
//!
//! The gap criterion: with `Δ_j = U(j+1) - U(j)`, the number of values strictly
//! below the mean is the least `k` in `0..n` with
//! `sum_{j<=k} j Δ_j >= sum_{j>k} (n-j) Δ_j`. It holds for every real sample,
//! including samples with ties. Negating a sample reverses the gap vector and
//! swaps the above and below counts.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::numeric::{mean_dd, DoubleDouble};

/// A finite real sample of length at least 2.
#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    values: Vec<f64>,
}

impl Sample {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::domain("values", format!("a sample needs at least 2 values, got {}", values.len())));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::domain("values", format!("non-finite entry {bad}")));
        }
        Ok(Sample { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn negated(&self) -> Sample {
        Sample {
            values: self.values.iter().map(|v| -v).collect(),
        }
    }

    /// Mean in double-double precision.
    pub fn mean(&self) -> DoubleDouble {
        mean_dd(&self.values)
    }
}

/// Gaps `Δ_1..Δ_{n-1}` between consecutive order statistics of an `n`-sample.
#[derive(Clone, Debug, PartialEq)]
pub struct GapVector {
    gaps: Vec<f64>,
}

impl GapVector {
    pub fn new(gaps: Vec<f64>) -> Result<Self> {
        if gaps.is_empty() {
            return Err(Error::domain("gaps", "need at least one gap (n >= 2)"));
        }
        if let Some(bad) = gaps.iter().find(|g| !(g.is_finite() && **g >= 0.0)) {
            return Err(Error::domain("gaps", format!("gap {bad} is not a finite nonnegative number")));
        }
        Ok(GapVector { gaps })
    }

    /// Sample size `n` (one more than the number of gaps).
    pub fn n(&self) -> usize {
        self.gaps.len() + 1
    }

    pub fn gaps(&self) -> &[f64] {
        &self.gaps
    }

    pub fn reversed(&self) -> GapVector {
        GapVector {
            gaps: self.gaps.iter().rev().copied().collect(),
        }
    }

    /// Sorted sample `U(1) = first, U(i) = U(1) + sum_{j<i} Δ_j`.
    pub fn order_statistics(&self, first: f64) -> Vec<f64> {
        std::iter::once(first)
            .chain(self.gaps.iter().scan(first, |acc, g| {
                *acc += g;
                Some(*acc)
            }))
            .collect()
    }
}

fn count_by(values: &[f64], keep: impl Fn(Ordering) -> bool) -> usize {
    let mean = mean_dd(values);
    values
        .iter()
        .filter(|&&v| {
            let ord = DoubleDouble::from(v)
                .partial_cmp(&mean)
                .expect("finite sample has a finite mean");
            keep(ord)
        })
        .count()
}

/// `#{i : U_i > mean}`.
pub fn count_above_mean(s: &Sample) -> usize {
    count_by(&s.values, |o| o == Ordering::Greater)
}

/// `#{i : U_i < mean}`.
pub fn count_below_mean(s: &Sample) -> usize {
    count_by(&s.values, |o| o == Ordering::Less)
}

/// `#{i : U_i >= mean}`; differs from [`count_above_mean`] only when some value equals the mean.
pub fn count_at_or_above_mean(s: &Sample) -> usize {
    count_by(&s.values, |o| o != Ordering::Less)
}

/// Above-mean count of a raw slice; callers guarantee finite entries and `len >= 2`.
pub(crate) fn count_above_slice(values: &[f64]) -> usize {
    count_by(values, |o| o == Ordering::Greater)
}

pub fn gaps(s: &Sample) -> GapVector {
    let mut sorted = s.values.clone();
    sorted.sort_by(f64::total_cmp);
    GapVector {
        gaps: sorted.windows(2).map(|w| w[1] - w[0]).collect(),
    }
}

/// Below-mean count from gaps alone. An exact tie in the criterion counts as
/// satisfied, so it resolves to the smaller `k`.
pub fn w_below_from_gaps(g: &GapVector) -> usize {
    let n = g.n();
    // right[k] = sum_{j=k+1}^{n-1} (n-j) Δ_j, gaps indexed from j = 1.
    let mut right = vec![DoubleDouble::ZERO; n];
    for j in (1..n).rev() {
        let term = DoubleDouble::from((n - j) as f64) * DoubleDouble::from(g.gaps[j - 1]);
        right[j - 1] = right[j] + term;
    }
    let mut left = DoubleDouble::ZERO;
    for (k, r) in right.iter().enumerate() {
        if k > 0 {
            left += DoubleDouble::from(k as f64) * DoubleDouble::from(g.gaps[k - 1]);
        }
        if left >= *r {
            return k;
        }
    }
    unreachable!("k = n-1 always satisfies the criterion")
}

/// Above-mean count from gaps: the below-count of the reversed gap vector.
pub fn w_above_from_gaps(g: &GapVector) -> usize {
    w_below_from_gaps(&g.reversed())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(v: &[f64]) -> Sample {
        Sample::new(v.to_vec()).unwrap()
    }

    #[test]
    fn direct_counts() {
        assert_eq!(count_above_mean(&sample(&[0.0, 1.0])), 1);
        assert_eq!(count_above_mean(&sample(&[1.0, 1.0, 1.0])), 0);
        assert_eq!(count_above_mean(&sample(&[0.1, 0.2, 0.9])), 1);
        assert_eq!(count_below_mean(&sample(&[0.0, 1.0])), 1);
        assert_eq!(count_below_mean(&sample(&[1.0, 1.0, 1.0])), 0);
        assert_eq!(count_below_mean(&sample(&[0.1, 0.2, 0.9])), 2);
    }

    #[test]
    fn gap_extraction() {
        assert_eq!(gaps(&sample(&[0.5, 0.0, 1.0])).gaps(), &[0.5, 0.5]);
        assert_eq!(gaps(&sample(&[3.0, 1.0, 2.0])).gaps(), &[1.0, 1.0]);
        let g = gaps(&sample(&[0.1, 0.2, 0.9]));
        assert!((g.gaps()[0] - 0.1).abs() < 1e-15);
        assert!((g.gaps()[1] - 0.7).abs() < 1e-15);
    }

    #[test]
    fn reconstruction_recovers_sorted_sample() {
        let s = sample(&[3.0, -1.0, 2.5, 0.25]);
        let g = gaps(&s);
        assert_eq!(g.order_statistics(-1.0), vec![-1.0, 0.25, 2.5, 3.0]);
    }

    #[test]
    fn gap_criterion_examples() {
        let two = GapVector::new(vec![1.0]).unwrap();
        assert_eq!(w_below_from_gaps(&two), 1);
        assert_eq!(w_above_from_gaps(&two), 1);

        let g = gaps(&sample(&[0.1, 0.2, 0.9]));
        assert_eq!(w_below_from_gaps(&g), 2);
        assert_eq!(w_above_from_gaps(&g), 1);

        // Sample 1, 2, 3: the criterion holds with equality at k = 1.
        let even = GapVector::new(vec![1.0, 1.0]).unwrap();
        assert_eq!(w_below_from_gaps(&even), 1);
        assert_eq!(w_above_from_gaps(&even), 1);
    }

    #[test]
    fn ties_with_the_mean() {
        // mean 1, the middle value equals it
        let s = sample(&[0.0, 1.0, 2.0]);
        assert_eq!(count_above_mean(&s), 1);
        assert_eq!(count_below_mean(&s), 1);
        assert_eq!(count_at_or_above_mean(&s), 2);
        assert_eq!(w_below_from_gaps(&gaps(&s)), 1);
        assert_eq!(w_above_from_gaps(&gaps(&s)), 1);

        let flat = sample(&[2.0, 2.0, 2.0, 2.0]);
        assert_eq!(w_below_from_gaps(&gaps(&flat)), 0);
        assert_eq!(w_above_from_gaps(&gaps(&flat)), 0);

        let s = sample(&[0.0, 0.0, 1.0]);
        assert_eq!(count_below_mean(&s), 2);
        assert_eq!(w_below_from_gaps(&gaps(&s)), 2);
    }

    #[test]
    fn compensated_mean_keeps_strict_comparison() {
        // Naive f64 summation loses the 1.0 against 1e16.
        let s = sample(&[1e16, 1.0, -1e16, 0.0]);
        // mean = 0.25: only 1e16 and 1.0 exceed it
        assert_eq!(count_above_mean(&s), 2);
        assert_eq!(count_below_mean(&s), 2);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Sample::new(vec![1.0]).is_err());
        assert!(Sample::new(vec![1.0, f64::NAN]).is_err());
        assert!(GapVector::new(vec![]).is_err());
        assert!(GapVector::new(vec![1.0, -0.5]).is_err());
    }
}
