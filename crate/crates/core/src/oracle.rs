//! Independent brute-force oracle: exhaustive maximization of the
//! truncated objective over per-period candidate grids, organized as a
//! transition-graph dynamic program so every candidate transition is
//! covered without materializing each trajectory. Used to validate the
//! solver, the closed-form rules, and the certificates.

use crate::problem::LdoLcProblem;
use crate::rational::{rat_int, Rat};
use crate::trajectory::{objective_value, Trajectory};
use num::{Signed, Zero};
#[cfg(feature = "parallel")]
use rayon::prelude::*;
use thiserror::Error;

pub const DEFAULT_BUDGET: u128 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Augmentation {
    /// Pure grid `{0, b/N, ..., b}` at every period.
    None,
    /// Grid plus the clamp image `min{c_t + a_t x, b}` of every previous
    /// candidate, so exact upper endpoints are always representable.
    ClampClosure,
}

#[derive(Debug, Clone)]
pub struct GridSpec {
    /// Truncation horizon `H >= 1`; periods `0..=H` are enumerated.
    pub horizon: usize,
    /// Grid resolution `N >= 1`: candidate states `k * b / N`.
    pub points: usize,
    pub augment: Augmentation,
    /// Maximum number of candidate transitions the enumeration may cover.
    pub budget: u128,
}

impl GridSpec {
    pub fn new(horizon: usize, points: usize) -> Self {
        Self {
            horizon,
            points,
            augment: Augmentation::ClampClosure,
            budget: DEFAULT_BUDGET,
        }
    }
}

#[derive(Debug, Clone)]
pub struct OracleResult {
    pub best_value: Rat,
    pub best_trajectory: Trajectory,
    /// Number of candidate transitions covered by the enumeration.
    pub enumerated_count: u128,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("grid requires horizon >= 1 and points >= 1")]
    InvalidGrid,
    #[error("initial state {x0} outside [0, b]")]
    InvalidStart { x0: Rat },
    #[error("enumeration needs {required} transitions, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u128 },
    #[error("no feasible grid trajectory from the initial state")]
    Infeasible,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundQuality {
    /// Provable one-sided bound on (true truncated optimum - oracle value).
    Guaranteed,
    /// Negative growth coefficients without clamp augmentation: the
    /// rounding argument fails, so the figure is only indicative.
    Heuristic,
}

/// Per-period candidate states: the fixed start at period 0, then the
/// uniform grid, optionally closed under the one-step clamp image of the
/// previous period's candidates. Sorted and deduplicated.
fn candidate_sets(problem: &LdoLcProblem, x0: &Rat, grid: &GridSpec) -> Vec<Vec<Rat>> {
    let b = problem.bound();
    let base: Vec<Rat> = (0..=grid.points)
        .map(|k| rat_int(k as i64) * b / rat_int(grid.points as i64))
        .collect();
    let mut sets: Vec<Vec<Rat>> = Vec::with_capacity(grid.horizon + 1);
    sets.push(vec![x0.clone()]);
    for t in 1..=grid.horizon {
        let mut cand = base.clone();
        if grid.augment == Augmentation::ClampClosure {
            for x in &sets[t - 1] {
                let u = problem.clamp(t - 1, x);
                if !u.is_negative() && u <= *b {
                    cand.push(u);
                }
            }
        }
        cand.sort();
        cand.dedup();
        sets.push(cand);
    }
    sets
}

/// Values-to-go for one level: `w_t(x) = p^(t) x + max{w_{t+1}(y) : y
/// candidate, y <= min{c_t + a_t x, b}}`, computed against the prefix
/// maxima of the (sorted) next level. `None` marks dead states with no
/// feasible successor.
fn level_values(
    problem: &LdoLcProblem,
    t: usize,
    cand: &[Rat],
    next_cand: &[Rat],
    next_prefix: &[Option<Rat>],
    parallel: bool,
) -> Vec<Option<Rat>> {
    let p_t = problem.p().value_at(t);
    let one = |x: &Rat| -> Option<Rat> {
        let thr = problem.clamp(t, x);
        let ub = next_cand.partition_point(|y| *y <= thr);
        if ub == 0 {
            return None;
        }
        next_prefix[ub - 1].as_ref().map(|m| &p_t * x + m)
    };
    #[cfg(feature = "parallel")]
    if parallel {
        return cand.par_iter().map(one).collect();
    }
    let _ = parallel;
    cand.iter().map(one).collect()
}

fn run(
    problem: &LdoLcProblem,
    x0: &Rat,
    grid: &GridSpec,
    parallel: bool,
) -> Result<OracleResult, OracleError> {
    if grid.horizon < 1 || grid.points < 1 {
        return Err(OracleError::InvalidGrid);
    }
    if !problem.in_state_space(x0) {
        return Err(OracleError::InvalidStart { x0: x0.clone() });
    }
    let sets = candidate_sets(problem, x0, grid);
    let required: u128 = (0..grid.horizon)
        .map(|t| sets[t].len() as u128 * sets[t + 1].len() as u128)
        .sum();
    if required > grid.budget {
        return Err(OracleError::BudgetExceeded {
            required,
            budget: grid.budget,
        });
    }

    let h = grid.horizon;
    // w[t][i]: best truncated value from period t in state sets[t][i].
    let mut w: Vec<Vec<Option<Rat>>> = vec![Vec::new(); h + 1];
    let p_h = problem.p().value_at(h);
    w[h] = sets[h].iter().map(|y| Some(&p_h * y)).collect();
    for t in (0..h).rev() {
        let prefix = running_max(&w[t + 1]);
        w[t] = level_values(problem, t, &sets[t], &sets[t + 1], &prefix, parallel);
    }
    let best_value = w[0][0].clone().ok_or(OracleError::Infeasible)?;

    // Forward reconstruction, smallest candidate first: lexicographically
    // smallest optimal head.
    let mut head = vec![x0.clone()];
    for t in 0..h {
        let x_t = head.last().unwrap().clone();
        let target = w[t][sets[t].binary_search(&x_t).expect("state is a candidate")]
            .clone()
            .expect("reachable states are live")
            - problem.p().value_at(t) * &x_t;
        let thr = problem.clamp(t, &x_t);
        let ub = sets[t + 1].partition_point(|y| *y <= thr);
        let j = (0..ub)
            .find(|&j| w[t + 1][j].as_ref() == Some(&target))
            .expect("some feasible successor attains the value-to-go");
        head.push(sets[t + 1][j].clone());
    }
    let best_trajectory = Trajectory::from_period_zero(head);
    debug_assert_eq!(objective_value(problem, &best_trajectory), best_value);
    Ok(OracleResult {
        best_value,
        best_trajectory,
        enumerated_count: required,
    })
}

fn running_max(values: &[Option<Rat>]) -> Vec<Option<Rat>> {
    let mut out = Vec::with_capacity(values.len());
    let mut best: Option<Rat> = None;
    for v in values {
        if let Some(v) = v {
            if best.as_ref().map_or(true, |b| v > b) {
                best = Some(v.clone());
            }
        }
        out.push(best.clone());
    }
    out
}

/// Exhaustive grid maximization; data-parallel across candidate states
/// when the `parallel` feature is enabled.
pub fn brute_force(
    problem: &LdoLcProblem,
    x0: &Rat,
    grid: &GridSpec,
) -> Result<OracleResult, OracleError> {
    run(problem, x0, grid, cfg!(feature = "parallel"))
}

/// Sequential variant, always available; bitwise-identical results.
pub fn brute_force_seq(
    problem: &LdoLcProblem,
    x0: &Rat,
    grid: &GridSpec,
) -> Result<OracleResult, OracleError> {
    run(problem, x0, grid, false)
}

/// One-sided bound on (true truncated optimum - oracle value):
/// `sum_{t <= H} |p^(t)| * (b / N)`, from rounding an optimal trajectory
/// down onto the grid. The rounding argument needs either nonnegative
/// growth coefficients over the horizon or clamp augmentation; otherwise
/// the figure is reported as heuristic.
pub fn oracle_gap_bound(problem: &LdoLcProblem, grid: &GridSpec) -> (Rat, BoundQuality) {
    let mut abs_sum = Rat::zero();
    for t in 0..=grid.horizon {
        abs_sum += problem.p().value_at(t).abs();
    }
    let bound = abs_sum * problem.bound() / rat_int(grid.points as i64);
    let all_a_nonneg = (0..=grid.horizon).all(|t| !problem.a().value_at(t).is_negative());
    let quality = if all_a_nonneg || grid.augment == Augmentation::ClampClosure {
        BoundQuality::Guaranteed
    } else {
        BoundQuality::Heuristic
    };
    (bound, quality)
}
