//! Eulerian numbers and the exact laws they describe.
//!
//! Convention: `<n, k>` counts permutations of `{1..n}` with exactly `k`
//! descents, so row `n` is indexed by `k = 0..n-1` (row 0 is `[1]`). Some
//! texts write `A(n, k) = <n, k-1>`; that shifted index is not used here.

use num_bigint::{BigInt, BigUint};
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::pmf::DiscretePmf;

/// Largest `n` for which [`descent_oracle_row`] enumerates `n!` permutations.
pub const DESCENT_ORACLE_MAX_N: usize = 9;

/// Rows `0..=n_max` of the Eulerian triangle, built once by the
/// recurrence `<n,k> = (k+1)<n-1,k> + (n-k)<n-1,k-1>` and read-only afterwards.
#[derive(Clone, Debug)]
pub struct EulerianTable {
    rows: Vec<Vec<BigUint>>,
}

impl EulerianTable {
    pub fn new(n_max: usize) -> Self {
        let mut rows: Vec<Vec<BigUint>> = Vec::with_capacity(n_max + 1);
        rows.push(vec![BigUint::one()]);
        for n in 1..=n_max {
            let prev = &rows[n - 1];
            let at = |k: usize| prev.get(k).cloned().unwrap_or_default();
            let row = (0..n)
                .map(|k| {
                    let stay = at(k) * BigUint::from(k + 1);
                    let rise = if k == 0 {
                        BigUint::zero()
                    } else {
                        at(k - 1) * BigUint::from(n - k)
                    };
                    stay + rise
                })
                .collect();
            rows.push(row);
        }
        EulerianTable { rows }
    }

    pub fn n_max(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn row(&self, n: usize) -> Option<&[BigUint]> {
        self.rows.get(n).map(Vec::as_slice)
    }

    /// `<n, k>`, or `None` when `n` exceeds the table.
    pub fn get(&self, n: usize, k: i64) -> Option<BigUint> {
        let row = self.rows.get(n)?;
        if k < 0 {
            return Some(BigUint::zero());
        }
        Some(row.get(k as usize).cloned().unwrap_or_default())
    }
}

/// `<n, k>`; zero for `k < 0` or `k >= max(n, 1)`.
pub fn eulerian_number(n: usize, k: i64) -> BigUint {
    if k < 0 || k as usize >= n.max(1) {
        return BigUint::zero();
    }
    EulerianTable::new(n).get(n, k).unwrap_or_default()
}

/// Row `<n, 0> .. <n, n-1>`. For `n = 0` this is `[1]` (the single empty permutation).
pub fn eulerian_row(n: usize) -> Vec<BigUint> {
    EulerianTable::new(n).rows.pop().unwrap_or_default()
}

/// `sum_{i=0}^{k-1} (-1)^i C(n,i) (k-i)^(n-1)`, which equals `<n-1, k-1>`
/// for `n >= 1` and `1 <= k <= n-1`. Zero outside that range.
pub fn eulerian_alternating_sum(n: usize, k: usize) -> BigUint {
    if n == 0 || k == 0 || k >= n {
        return BigUint::zero();
    }
    let total = signed_power_sum(n, n, k);
    total.to_biguint().expect("alternating sum is a nonnegative count")
}

/// `sum_{i=0}^{k-1} (-1)^i C(choose_n, i) (k-i)^(n-1)` over the integers.
fn signed_power_sum(choose_n: usize, n: usize, k: usize) -> BigInt {
    let exp = (n - 1) as u32;
    (0..k).fold(BigInt::zero(), |acc, i| {
        let term = BigInt::from(binomial(BigUint::from(choose_n), BigUint::from(i)))
            * BigInt::from(k - i).pow(exp);
        if i % 2 == 0 {
            acc + term
        } else {
            acc - term
        }
    })
}

/// Descent counts over all `n!` permutations of `{1..n}`, by direct enumeration.
///
/// Independent of the recurrence; used as the brute-force reference for
/// every other routine in this module.
pub fn descent_oracle_row(n: usize) -> Result<Vec<u64>> {
    if n == 0 {
        return Err(Error::domain("n", "descent enumeration needs n >= 1"));
    }
    if n > DESCENT_ORACLE_MAX_N {
        return Err(Error::ResourceBound {
            what: "permutation enumeration",
            n,
            max: DESCENT_ORACLE_MAX_N,
        });
    }
    let mut counts = vec![0u64; n];
    let mut perm: Vec<usize> = (1..=n).collect();
    loop {
        let descents = perm.windows(2).filter(|w| w[0] > w[1]).count();
        counts[descents] += 1;
        if !next_permutation(&mut perm) {
            break;
        }
    }
    Ok(counts)
}

/// Advances `perm` to the next permutation in lexicographic order.
fn next_permutation(perm: &mut [usize]) -> bool {
    let Some(i) = perm.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let j = perm.iter().rposition(|&x| x > perm[i]).expect("pivot has a successor");
    perm.swap(i, j);
    perm[i + 1..].reverse();
    true
}

pub fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * BigUint::from(i))
}

fn ratio(numer: &BigUint, denom: &BigUint) -> BigRational {
    BigRational::new(BigInt::from(numer.clone()), BigInt::from(denom.clone()))
}

/// Exact law of the number of `n` i.i.d. uniforms exceeding their mean:
/// `P(W_n = k) = <n-1, k-1> / (n-1)!`, supported on `1..=n-1`.
pub fn wn_pmf(n: usize) -> Result<DiscretePmf> {
    if n < 2 {
        return Err(Error::domain("n", format!("the above-mean count needs n >= 2, got {n}")));
    }
    let fact = factorial(n - 1);
    let probs = eulerian_row(n - 1).iter().map(|e| ratio(e, &fact)).collect();
    DiscretePmf::<BigRational>::new(1, probs, format!("W_{n}"))
}

/// `P(W_n <= k)` from the closed alternating sum
/// `(1/(n-1)!) sum_{i<k} (-1)^i C(n-1,i) (k-i)^(n-1)`.
pub fn wn_cdf(n: usize, k: usize) -> Result<BigRational> {
    if n < 2 {
        return Err(Error::domain("n", format!("the above-mean count needs n >= 2, got {n}")));
    }
    if k > n - 1 {
        return Err(Error::domain("k", format!("k must lie in 0..={}, got {k}", n - 1)));
    }
    if k == 0 {
        return Ok(BigRational::zero());
    }
    let sum = signed_power_sum(n - 1, n, k);
    Ok(BigRational::new(sum, BigInt::from(factorial(n - 1))))
}

/// Exact law of `floor(U_1 + ... + U_n)`: `P = <n, k> / n!` on `0..=n-1`.
pub fn floor_sum_pmf(n: usize) -> Result<DiscretePmf> {
    if n < 1 {
        return Err(Error::domain("n", "the floor of a uniform sum needs n >= 1"));
    }
    let fact = factorial(n);
    let probs = eulerian_row(n).iter().map(|e| ratio(e, &fact)).collect();
    DiscretePmf::<BigRational>::new(0, probs, format!("floor(S_{n})"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: &[u64]) -> Vec<BigUint> {
        v.iter().map(|&x| BigUint::from(x)).collect()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn eulerian_number_examples() {
        assert_eq!(eulerian_number(0, 0), BigUint::one());
        assert_eq!(eulerian_number(3, 1), BigUint::from(4u8));
        assert_eq!(eulerian_number(4, 2), BigUint::from(11u8));
    }

    #[test]
    fn out_of_range_k_is_zero() {
        assert!(eulerian_number(0, 1).is_zero());
        assert!(eulerian_number(0, -1).is_zero());
        assert!(eulerian_number(4, 4).is_zero());
        assert!(eulerian_number(4, -2).is_zero());
        let table = EulerianTable::new(5);
        assert_eq!(table.get(5, 7), Some(BigUint::zero()));
        assert_eq!(table.get(6, 0), None);
    }

    #[test]
    fn rows_match_hand_enumeration() {
        assert_eq!(eulerian_row(0), big(&[1]));
        assert_eq!(eulerian_row(1), big(&[1]));
        assert_eq!(eulerian_row(3), big(&[1, 4, 1]));
        assert_eq!(eulerian_row(4), big(&[1, 11, 11, 1]));
    }

    #[test]
    fn alternating_sum_examples() {
        assert_eq!(eulerian_alternating_sum(4, 2), BigUint::from(4u8));
        assert_eq!(eulerian_alternating_sum(2, 1), BigUint::one());
        assert_eq!(eulerian_alternating_sum(5, 2), BigUint::from(11u8));
        assert!(eulerian_alternating_sum(5, 0).is_zero());
        assert!(eulerian_alternating_sum(5, 5).is_zero());
        assert!(eulerian_alternating_sum(0, 0).is_zero());
    }

    #[test]
    fn oracle_examples() {
        assert_eq!(descent_oracle_row(2).unwrap(), vec![1, 1]);
        assert_eq!(descent_oracle_row(3).unwrap(), vec![1, 4, 1]);
        assert_eq!(descent_oracle_row(5).unwrap(), vec![1, 26, 66, 26, 1]);
        assert!(matches!(descent_oracle_row(10), Err(Error::ResourceBound { .. })));
        assert!(descent_oracle_row(0).is_err());
    }

    #[test]
    fn wn_pmf_examples() {
        assert_eq!(wn_pmf(2).unwrap().probs(), &[q(1, 1)]);
        let p3 = wn_pmf(3).unwrap();
        assert_eq!(p3.support_min(), 1);
        assert_eq!(p3.probs(), &[q(1, 2), q(1, 2)]);
        assert_eq!(wn_pmf(4).unwrap().probs(), &[q(1, 6), q(2, 3), q(1, 6)]);
        assert!(wn_pmf(1).is_err());
        assert!(wn_pmf(0).is_err());
    }

    #[test]
    fn wn_cdf_examples() {
        assert_eq!(wn_cdf(4, 1).unwrap(), q(1, 6));
        assert_eq!(wn_cdf(7, 0).unwrap(), q(0, 1));
        assert_eq!(wn_cdf(4, 3).unwrap(), q(1, 1));
        assert!(wn_cdf(4, 4).is_err());
        assert!(wn_cdf(1, 0).is_err());
    }

    #[test]
    fn floor_sum_examples() {
        assert_eq!(floor_sum_pmf(1).unwrap().probs(), &[q(1, 1)]);
        assert_eq!(floor_sum_pmf(2).unwrap().probs(), &[q(1, 2), q(1, 2)]);
        assert_eq!(floor_sum_pmf(3).unwrap().probs(), &[q(1, 6), q(2, 3), q(1, 6)]);
        assert!(floor_sum_pmf(0).is_err());
    }

    #[test]
    fn wn_is_symmetric_about_half_n() {
        for n in 2..=15 {
            let pmf = wn_pmf(n).unwrap();
            for k in 1..n as i64 {
                assert_eq!(pmf.prob(k), pmf.prob(n as i64 - k));
            }
        }
    }
}
