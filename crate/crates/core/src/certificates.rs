//! Per-period optimality certificates. Each period of an optimal
//! trajectory solves a one-variable LP
//!
//! ```text
//! max p^(t) y   s.t.  y <= c_{t-1} + a_{t-1} y_{t-1},
//!                     -a_t y <= c_t - y_{t+1},
//!                     y <= b,  y >= 0,
//! ```
//!
//! and the multipliers `(lambda_t, mu_t, gamma_t)` of its three upper
//! constraints certify that, with complementary slackness and a
//! transversality-like limit on `(lambda_t - mu_t a_t + gamma_t) y_t`.

use crate::problem::LdoLcProblem;
use crate::rational::Rat;
use crate::trajectory::Trajectory;
use num::{Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodCertificate {
    pub t: usize,
    pub lambda: Rat,
    pub mu: Rat,
    pub gamma: Rat,
}

/// Reduced form with `xi = lambda + gamma`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedCertificate {
    pub t: usize,
    pub xi: Rat,
    pub mu: Rat,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertificateError {
    #[error("period {t} must exceed the trajectory start")]
    BeforeStart { t: usize },
    #[error("state y_{t} is infeasible for its one-variable LP")]
    InfeasibleState { t: usize },
    #[error("state y_{t} does not solve its one-variable LP (expected {expected}, got {actual})")]
    NotOptimal { t: usize, expected: Rat, actual: Rat },
}

/// Feasible range `[lo, hi]` of the one-variable LP at period `t`, given
/// the neighboring states.
fn lp_range(problem: &LdoLcProblem, t: usize, y_prev: &Rat, y_next: &Rat) -> Option<(Rat, Rat)> {
    let (_, c_t, a_t) = problem.coefficient_at(t);
    let mut lo = Rat::zero();
    let mut hi = problem.clamp(t - 1, y_prev); // min{c_{t-1} + a_{t-1} y_prev, b}
    if a_t.is_positive() {
        let l2 = (y_next - &c_t) / &a_t;
        if l2 > lo {
            lo = l2;
        }
    } else if a_t.is_zero() {
        if *y_next > c_t {
            return None;
        }
    } else {
        let u2 = (y_next - &c_t) / &a_t;
        if u2 < hi {
            hi = u2;
        }
    }
    if lo <= hi {
        Some((lo, hi))
    } else {
        None
    }
}

/// Multipliers for period `t > start` by case analysis on the one-variable
/// LP. With `p^(t) > 0` the full weight goes to the first binding upper
/// constraint in the fixed order (previous-period bound, next-period
/// bound, box bound); with `p^(t) < 0` the next-period lower bound takes
/// `mu = -p/a` when it binds away from zero, and no support is needed at
/// zero. Rejects states that do not solve their LP.
pub fn compute_certificate(
    problem: &LdoLcProblem,
    traj: &Trajectory,
    t: usize,
) -> Result<PeriodCertificate, CertificateError> {
    if t <= traj.start() {
        return Err(CertificateError::BeforeStart { t });
    }
    let y_prev = traj.value_at(t - 1);
    let y_t = traj.value_at(t);
    let y_next = traj.value_at(t + 1);
    let (p_t, c_t, a_t) = problem.coefficient_at(t);
    let (lo, hi) = lp_range(problem, t, &y_prev, &y_next)
        .ok_or(CertificateError::InfeasibleState { t })?;
    if y_t < lo || y_t > hi {
        return Err(CertificateError::InfeasibleState { t });
    }

    let zero = Rat::zero();
    let (lambda, mu, gamma) = if p_t.is_zero() {
        (zero.clone(), zero.clone(), zero.clone())
    } else if p_t.is_positive() {
        if y_t != hi {
            return Err(CertificateError::NotOptimal {
                t,
                expected: hi,
                actual: y_t,
            });
        }
        // The previous-period constraint is the unclamped affine bound;
        // the box bound is the separate gamma constraint.
        let u1 = problem.c().value_at(t - 1) + problem.a().value_at(t - 1) * &y_prev;
        if y_t == u1 {
            (p_t.clone(), zero.clone(), zero.clone())
        } else if a_t.is_negative() && &a_t * &y_t == &y_next - &c_t {
            (zero.clone(), -&p_t / &a_t, zero.clone())
        } else {
            // y_t = b strictly below the other bounds.
            (zero.clone(), zero.clone(), p_t.clone())
        }
    } else {
        if y_t != lo {
            return Err(CertificateError::NotOptimal {
                t,
                expected: lo,
                actual: y_t,
            });
        }
        if y_t.is_zero() {
            // 0 >= p^(t) supports itself; no constraint needs weight.
            (zero.clone(), zero.clone(), zero.clone())
        } else {
            // a_t > 0 and the next-period bound binds from below.
            (zero.clone(), -&p_t / &a_t, zero.clone())
        }
    };
    Ok(PeriodCertificate {
        t,
        lambda,
        mu,
        gamma,
    })
}

pub fn reduce_certificate(cert: &PeriodCertificate) -> ReducedCertificate {
    ReducedCertificate {
        t: cert.t,
        xi: &cert.lambda + &cert.gamma,
        mu: cert.mu.clone(),
    }
}

/// Per-period verification findings, all checked in exact arithmetic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodCheck {
    pub t: usize,
    pub nonnegative: bool,
    pub primal_feasible: bool,
    /// lambda_t (c_{t-1} + a_{t-1} y_{t-1} - y_t) = 0
    pub slack_prev: bool,
    /// mu_t (c_t - y_{t+1} + a_t y_t) = 0
    pub slack_next: bool,
    /// gamma_t (b - y_t) = 0
    pub slack_box: bool,
    /// lambda_t - a_t mu_t + gamma_t >= p^(t)
    pub stationarity: bool,
    /// (lambda_t - a_t mu_t + gamma_t) y_t = p^(t) y_t
    pub value_equality: bool,
    /// When some feasible y > y_t exists: lambda_t = gamma_t = 0.
    pub upper_slack_multipliers: Option<bool>,
}

impl PeriodCheck {
    pub fn passed(&self) -> bool {
        self.nonnegative
            && self.primal_feasible
            && self.slack_prev
            && self.slack_next
            && self.slack_box
            && self.stationarity
            && self.value_equality
            && self.upper_slack_multipliers.unwrap_or(true)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LimitCheck {
    /// Zero tail: the transversality sequence is exactly zero beyond the
    /// head, so the limit holds exactly.
    ExactZeroTail,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertificateReport {
    pub periods: Vec<PeriodCheck>,
    pub limit: LimitCheck,
}

impl CertificateReport {
    pub fn passed(&self) -> bool {
        self.periods.iter().all(PeriodCheck::passed)
    }

    pub fn first_failure(&self) -> Option<&PeriodCheck> {
        self.periods.iter().find(|c| !c.passed())
    }
}

/// Verifies certificates against the trajectory: nonnegativity, primal
/// feasibility, the three complementary slackness equalities, stationarity,
/// the value equality, and the vanishing of the upper multipliers at
/// interior states. Certificates must cover `start+1 ..= last head period`.
pub fn verify_certificate(
    problem: &LdoLcProblem,
    traj: &Trajectory,
    certs: &[PeriodCertificate],
) -> CertificateReport {
    let periods = certs
        .iter()
        .map(|cert| {
            let t = cert.t;
            let y_prev = traj.value_at(t - 1);
            let y_t = traj.value_at(t);
            let y_next = traj.value_at(t + 1);
            let (p_t, c_t, a_t) = problem.coefficient_at(t);
            let b = problem.bound();
            let u1 = problem.c().value_at(t - 1) + problem.a().value_at(t - 1) * &y_prev;

            let nonnegative = !cert.lambda.is_negative()
                && !cert.mu.is_negative()
                && !cert.gamma.is_negative();
            let primal_feasible = !y_t.is_negative()
                && y_t <= *b
                && y_t <= u1
                && -&a_t * &y_t <= &c_t - &y_next;
            let slack_prev = (&cert.lambda * (&u1 - &y_t)).is_zero();
            let slack_next = (&cert.mu * (&c_t - &y_next + &a_t * &y_t)).is_zero();
            let slack_box = (&cert.gamma * (b - &y_t)).is_zero();
            let combined = &cert.lambda - &a_t * &cert.mu + &cert.gamma;
            let stationarity = combined >= p_t;
            let value_equality = &combined * &y_t == &p_t * &y_t;
            let upper_slack_multipliers = lp_range(problem, t, &y_prev, &y_next).map(|(_, hi)| {
                if y_t < hi {
                    cert.lambda.is_zero() && cert.gamma.is_zero()
                } else {
                    true
                }
            });
            PeriodCheck {
                t,
                nonnegative,
                primal_feasible,
                slack_prev,
                slack_next,
                slack_box,
                stationarity,
                value_equality,
                upper_slack_multipliers,
            }
        })
        .collect();
    CertificateReport {
        periods,
        limit: LimitCheck::ExactZeroTail,
    }
}

/// Certificates for every head period after the start.
pub fn certify_trajectory(
    problem: &LdoLcProblem,
    traj: &Trajectory,
) -> Result<Vec<PeriodCertificate>, CertificateError> {
    (traj.start() + 1..=traj.last_index())
        .map(|t| compute_certificate(problem, traj, t))
        .collect()
}
