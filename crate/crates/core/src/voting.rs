//! Single-voter strategy under approval voting.
//!
//! If the other voters are modelled symmetrically and a single swing pair
//! occurs with probability `p` per ordered pair, approving the set `I`
//! changes the expected utility of the winner by `p n sum_j I_j (U_j - mean)`.
//! That gain is maximised by approving exactly the candidates above the mean.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::mc::{sample_wn_by, simulate_counts, EmpiricalPmf, UtilityModel};
use crate::numeric::{mean_dd, DoubleDouble};

fn check_utilities(utilities: &[f64]) -> Result<()> {
    if utilities.len() < 2 {
        return Err(Error::domain("utilities", format!("need at least 2 candidates, got {}", utilities.len())));
    }
    if let Some(bad) = utilities.iter().find(|u| !u.is_finite()) {
        return Err(Error::domain("utilities", format!("non-finite utility {bad}")));
    }
    Ok(())
}

/// One voter's utilities and approval indicators.
#[derive(Clone, Debug, PartialEq)]
pub struct Ballot {
    utilities: Vec<f64>,
    approved: Vec<bool>,
}

impl Ballot {
    pub fn new(utilities: Vec<f64>, approved: Vec<bool>) -> Result<Self> {
        check_utilities(&utilities)?;
        if utilities.len() != approved.len() {
            return Err(Error::domain(
                "approved",
                format!("{} indicators for {} utilities", approved.len(), utilities.len()),
            ));
        }
        Ok(Ballot { utilities, approved })
    }

    /// The ballot approving every candidate strictly above the mean utility.
    pub fn optimal(utilities: Vec<f64>) -> Result<Self> {
        let approved = optimal_approval_set(&utilities)?;
        Ok(Ballot { utilities, approved })
    }

    pub fn utilities(&self) -> &[f64] {
        &self.utilities
    }

    pub fn approved(&self) -> &[bool] {
        &self.approved
    }

    pub fn approved_count(&self) -> usize {
        self.approved.iter().filter(|&&a| a).count()
    }

    pub fn expected_gain(&self, p: f64) -> Result<f64> {
        expected_gain(&self.utilities, &self.approved, p)
    }
}

/// `I_j = [U_j > mean]`, with the mean taken in double-double precision.
pub fn optimal_approval_set(utilities: &[f64]) -> Result<Vec<bool>> {
    check_utilities(utilities)?;
    let mean = mean_dd(utilities);
    Ok(utilities.iter().map(|&u| DoubleDouble::from(u) > mean).collect())
}

/// `p n sum_j I_j (U_j - mean)`.
pub fn expected_gain(utilities: &[f64], indicators: &[bool], p: f64) -> Result<f64> {
    check_utilities(utilities)?;
    if indicators.len() != utilities.len() {
        return Err(Error::domain(
            "indicators",
            format!("{} indicators for {} utilities", indicators.len(), utilities.len()),
        ));
    }
    if !(p >= 0.0 && p.is_finite()) {
        return Err(Error::domain("p", format!("swing probability must be finite and >= 0, got {p}")));
    }
    let mean = mean_dd(utilities);
    let deviation = utilities
        .iter()
        .zip(indicators)
        .filter(|(_, &i)| i)
        .fold(DoubleDouble::ZERO, |acc, (&u, _)| acc + (DoubleDouble::from(u) - mean));
    let n = utilities.len() as f64;
    Ok((deviation * DoubleDouble::from(n) * DoubleDouble::from(p)).to_f64())
}

/// Empirical law of the number of candidates the optimal ballot approves,
/// for utilities drawn from `model`.
pub fn approved_count_distribution(
    model: UtilityModel,
    n: usize,
    n_samples: u64,
    seed: u64,
) -> Result<EmpiricalPmf> {
    sample_wn_by(model, n, n_samples, seed, |u| {
        optimal_approval_set(u)
            .expect("model utilities are finite and n >= 2")
            .into_iter()
            .filter(|&a| a)
            .count()
    })
}

/// The three candidates of the polarized scenario.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Candidate {
    A,
    B,
    C,
}

impl Candidate {
    pub const ALL: [Candidate; 3] = [Candidate::A, Candidate::B, Candidate::C];

    fn index(self) -> usize {
        self as usize
    }
}

/// A ballot over `{A, B, C}`, written as letters: `AB`, `A`, `ABC`, or `-` for none.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ScenarioBallot {
    approve: [bool; 3],
}

impl ScenarioBallot {
    pub fn new(approved: &[Candidate]) -> Self {
        let mut approve = [false; 3];
        for c in approved {
            approve[c.index()] = true;
        }
        ScenarioBallot { approve }
    }

    pub fn approves(&self, c: Candidate) -> bool {
        self.approve[c.index()]
    }
}

impl FromStr for ScenarioBallot {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut approve = [false; 3];
        if s.is_empty() || s == "-" || s.eq_ignore_ascii_case("none") {
            return Ok(ScenarioBallot { approve });
        }
        for ch in s.chars().filter(|c| !matches!(c, ',' | ' ' | '{' | '}')) {
            let idx = match ch.to_ascii_uppercase() {
                'A' => 0,
                'B' => 1,
                'C' => 2,
                other => return Err(Error::domain("ballot", format!("unknown candidate `{other}`"))),
            };
            approve[idx] = true;
        }
        Ok(ScenarioBallot { approve })
    }
}

impl fmt::Display for ScenarioBallot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let letters: String = Candidate::ALL
            .iter()
            .filter(|c| self.approves(**c))
            .map(|c| format!("{c:?}"))
            .collect();
        if letters.is_empty() {
            f.write_str("-")
        } else {
            f.write_str(&letters)
        }
    }
}

/// Three candidates and `2m` other voters: `m` approve A only, `m` approve B
/// only, and each of the `2m` also approves C on a fair coin flip. Ties are
/// broken by an independent uniform `(0, 1)` bonus per candidate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolarizedScenario {
    pub m: u64,
    pub my_utilities: [f64; 3],
    pub seed: u64,
}

impl PolarizedScenario {
    pub fn new(m: u64, my_utilities: [f64; 3], seed: u64) -> Result<Self> {
        if m < 1 {
            return Err(Error::domain("m", "need m >= 1"));
        }
        if let Some(bad) = my_utilities.iter().find(|u| !u.is_finite()) {
            return Err(Error::domain("my_utilities", format!("non-finite utility {bad}")));
        }
        Ok(PolarizedScenario { m, my_utilities, seed })
    }

    /// The scenario with utilities 10, 6, 0.
    pub fn with_default_utilities(m: u64, seed: u64) -> Result<Self> {
        PolarizedScenario::new(m, [10.0, 6.0, 0.0], seed)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioEstimate {
    pub expected_utility: f64,
    pub standard_error: f64,
    /// Wins of A, B, C.
    pub wins: [u64; 3],
    pub n_samples: u64,
}

impl ScenarioEstimate {
    pub fn win_probability(&self, c: Candidate) -> f64 {
        self.wins[c.index()] as f64 / self.n_samples as f64
    }
}

/// Number of heads among `flips` fair coins.
fn coin_heads<R: Rng + ?Sized>(rng: &mut R, flips: u64) -> u64 {
    let full = flips / 64;
    let rest = flips % 64;
    let mut heads: u64 = (0..full).map(|_| u64::from(rng.next_u64().count_ones())).sum();
    if rest > 0 {
        let mask = (1u64 << rest) - 1;
        heads += u64::from((rng.next_u64() & mask).count_ones());
    }
    heads
}

/// Monte Carlo expected utility of the winner, given my ballot, under the polarized scenario.
pub fn polarized_scenario_expected_utility(
    s: &PolarizedScenario,
    ballot: ScenarioBallot,
    n_samples: u64,
) -> Result<ScenarioEstimate> {
    if n_samples == 0 {
        return Err(Error::domain("n_samples", "need at least one sample"));
    }
    let mine = |c: Candidate| if ballot.approves(c) { 1.0 } else { 0.0 };
    let m = s.m as f64;
    let base = [m + mine(Candidate::A), m + mine(Candidate::B), mine(Candidate::C)];
    let flips = 2 * s.m;
    let counts = simulate_counts(
        n_samples,
        s.seed,
        3,
        || (),
        |rng, _| {
            let c_votes = coin_heads(rng, flips) as f64;
            let totals = [
                base[0] + rng.random::<f64>(),
                base[1] + rng.random::<f64>(),
                base[2] + c_votes + rng.random::<f64>(),
            ];
            (0..3)
                .max_by(|&i, &j| totals[i].total_cmp(&totals[j]))
                .expect("three candidates")
        },
    );
    let wins = [counts[0], counts[1], counts[2]];
    let n = n_samples as f64;
    let mean: f64 = (0..3).map(|i| wins[i] as f64 * s.my_utilities[i]).sum::<f64>() / n;
    let second: f64 = (0..3)
        .map(|i| wins[i] as f64 * s.my_utilities[i] * s.my_utilities[i])
        .sum::<f64>()
        / n;
    Ok(ScenarioEstimate {
        expected_utility: mean,
        standard_error: ((second - mean * mean).max(0.0) / n).sqrt(),
        wins,
        n_samples,
    })
}
