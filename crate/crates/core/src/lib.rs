//! Exact and simulated laws for the number of i.i.d. values exceeding their mean.
//!
//! For `n` i.i.d. uniforms the above-mean count `W_n` has the Eulerian law
//! `P(W_n = k) = <n-1, k-1> / (n-1)!`, the same law as `1 + floor(U_1 + ... + U_{n-1})`.
//! This crate computes those laws exactly, evaluates the exponential
//! residue formula that gives the same CDF, covers non-uniform utility models
//! (stable gaps, normal values), the approval-voting strategy the count
//! describes, and a seeded Monte Carlo engine that cross-checks all of it.
//!
//! Modules:
//! - [`eulerian`]: Eulerian numbers, the descent oracle, exact PMFs and CDFs.
//! - [`gaps`]: above/below-mean counts of a real sample, directly and from gaps.
//! - [`lp`]: probability that one weighted exponential sum exceeds another.
//! - [`heavy_tail`]: Lévy/stable gaps and normal utilities.
//! - [`voting`]: optimal approval sets, expected gain, the polarized scenario.
//! - [`mc`]: reproducible parallel sampling and goodness-of-fit statistics.

pub mod error;
pub mod eulerian;
pub mod gaps;
pub mod heavy_tail;
pub mod lp;
pub mod mc;
pub mod numeric;
pub mod pmf;
pub mod voting;

pub use error::{Error, Result};
pub use eulerian::{
    descent_oracle_row, eulerian_alternating_sum, eulerian_number, eulerian_row, floor_sum_pmf, wn_cdf, wn_pmf,
    EulerianTable,
};
pub use gaps::{
    count_above_mean, count_below_mean, gaps, w_above_from_gaps, w_below_from_gaps, GapVector, Sample,
};
pub use heavy_tail::{
    levy_limit_cdf, levy_limit_density, levy_wn_cdf, normal_case_pmf, s_k, sample_stable, stable_wn_cdf_mc,
    NormalCaseConstants, StableModel,
};
pub use lp::{lp_probability, lp_probability_exact, wn_cdf_via_lp, wn_cdf_via_lp_exact, LpInstance};
pub use mc::{compare_pmf, sample_floor_sum, sample_wn, EmpiricalPmf, UtilityModel};
pub use pmf::DiscretePmf;
pub use voting::{
    approved_count_distribution, expected_gain, optimal_approval_set, polarized_scenario_expected_utility,
    Ballot, PolarizedScenario, ScenarioBallot,
};
