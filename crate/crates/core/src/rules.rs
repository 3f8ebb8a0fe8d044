//! Necessary endpoint conditions for optimal trajectories and closed-form
//! optimal constructions for three special problem classes: strictly
//! alternating weights, eventually conclusive weights, and two-phase
//! weights.

use crate::classify::classify;
use crate::dp::{backward_induction, solve_with_horizon, DpError, TerminalRule};
use crate::problem::LdoLcProblem;
use crate::pwl::PwlConcaveFn;
use crate::rational::{pow_u, Rat};
use crate::sequence::TailedSequence;
use crate::trajectory::{objective_value, Trajectory};
use num::{One, Signed, Zero};
use thiserror::Error;

// ---------------------------------------------------------------------------
// Necessary conditions
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ASign {
    Positive,
    Zero,
    Negative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PSign {
    Positive,
    Negative,
}

/// One failed endpoint condition: at period `t` the trajectory had to sit
/// at `expected` (determined by the signs of `a_t` and `p^(t)`) but holds
/// `actual`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionViolation {
    pub t: usize,
    pub a_sign: ASign,
    pub p_sign: PSign,
    pub expected: Rat,
    pub actual: Rat,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ViolationReport {
    pub violations: Vec<ConditionViolation>,
}

impl ViolationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every head period `t > start`: with `p^(t) > 0` the state must
/// sit at its largest feasible value, with `p^(t) < 0` at its smallest;
/// the concrete endpoint depends on the sign of `a_t`. Periods with
/// `p^(t) = 0` are unconstrained. States beyond the head are the zero
/// tail and are not checked.
pub fn check_necessary_conditions(problem: &LdoLcProblem, traj: &Trajectory) -> ViolationReport {
    let mut violations = Vec::new();
    for t in traj.start() + 1..=traj.last_index() {
        let (p_t, c_t, a_t) = problem.coefficient_at(t);
        if p_t.is_zero() {
            continue;
        }
        let p_sign = if p_t.is_positive() {
            PSign::Positive
        } else {
            PSign::Negative
        };
        let x_prev = traj.value_at(t - 1);
        let x_t = traj.value_at(t);
        let x_next = traj.value_at(t + 1);
        let upper = problem.clamp(t - 1, &x_prev);
        let (a_sign, expected) = if a_t.is_positive() {
            let e = match p_sign {
                PSign::Positive => upper,
                PSign::Negative => {
                    let lo = (&x_next - &c_t) / &a_t;
                    if lo.is_positive() {
                        lo
                    } else {
                        Rat::zero()
                    }
                }
            };
            (ASign::Positive, e)
        } else if a_t.is_zero() {
            let e = match p_sign {
                PSign::Positive => upper,
                PSign::Negative => Rat::zero(),
            };
            (ASign::Zero, e)
        } else {
            let e = match p_sign {
                PSign::Positive => {
                    let next_cap = (&x_next - &c_t) / &a_t;
                    if next_cap < upper {
                        next_cap
                    } else {
                        upper
                    }
                }
                PSign::Negative => Rat::zero(),
            };
            (ASign::Negative, e)
        };
        if x_t != expected {
            violations.push(ConditionViolation {
                t,
                a_sign,
                p_sign,
                expected,
                actual: x_t,
            });
        }
    }
    ViolationReport { violations }
}

// ---------------------------------------------------------------------------
// Shared errors
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("initial state {x0} outside [0, b]")]
    InvalidStart { x0: Rat },
    #[error("eps must be strictly positive")]
    InvalidEps,
    #[error("objective weights are not absolutely summable")]
    NonSummableWeights,
    #[error("weights are not strictly alternating from period 1")]
    NotStrictlyAlternating,
    #[error("positivity margin min{{c_t, c_t + a_t b}} > 0 fails at period {t}")]
    NoPositivityMargin { t: usize },
    #[error("sign hypothesis on a fails at period {t} (expected a_{t} <= 0)")]
    AlternatingSignPattern { t: usize },
    #[error("weights are not eventually conclusive")]
    NotEventuallyConclusive,
    #[error("weights are not two-phase")]
    NotTwoPhase,
    #[error("growth phase requires a_{t} >= 0 before the positive run ends")]
    NegativeGrowthCoefficient { t: usize },
}

impl From<DpError> for RuleError {
    fn from(e: DpError) -> Self {
        match e {
            DpError::InvalidStart { x0 } => RuleError::InvalidStart { x0 },
            DpError::InvalidEps => RuleError::InvalidEps,
            DpError::DivergentObjective => RuleError::NonSummableWeights,
        }
    }
}

// ---------------------------------------------------------------------------
// Strictly alternating problems
// ---------------------------------------------------------------------------

/// Which period-1 sign drives the construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlternatingCase {
    /// `p^(1) > 0`: odd periods sit at their upper bound, even periods at 0.
    PositiveFirst,
    /// `p^(1) < 0`: odd periods sit at 0, even periods at `min{c_{t-1}, b}`.
    NegativeFirst,
}

/// Index convention for the upper-bound value at odd periods `t >= 3` in
/// the positive-first case. The two conventions disagree; `Recursive` is
/// the one consistent with the zero state one period earlier and is the
/// default everywhere. `Shifted` uses the constraint value two periods
/// later and is kept only so the disagreement itself can be tested.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlternatingIndex {
    /// Odd `t >= 3` takes `min{c_{t-1}, b}`.
    Recursive,
    /// Odd `t >= 3` takes `min{c_{t+1}, b}`.
    Shifted,
}

#[derive(Debug, Clone)]
pub struct AlternatingSolution {
    pub case: AlternatingCase,
    pub index: AlternatingIndex,
    /// Head materialization of the closed form; the analytic continuation
    /// keeps alternating between 0 and `min{c_., b}` beyond it.
    pub trajectory: Trajectory,
    /// Exact value of the full infinite closed-form trajectory.
    pub value: Rat,
    /// Bound on the head's truncated objective vs `value`.
    pub truncation_bound: Rat,
}

/// Smallest c-index `m` from which `min{c_j, b}` resolves the same way for
/// every `j >= m`, together with whether it resolves to `c_j` (true) or
/// to `b` (false). Requires a positive geometric tail (guaranteed by the
/// positivity margin).
fn resolved_min_start(c: &TailedSequence, b: &Rat) -> (usize, bool) {
    let l = c.tail_start();
    let (first, ratio) = c.tail_generator_at(l);
    assert!(
        first.is_positive() && ratio.is_positive(),
        "positivity margin forces a positive geometric c tail"
    );
    if ratio == Rat::one() {
        return (l, first <= *b);
    }
    // 0 < ratio < 1: values decrease monotonically toward 0.
    let mut j = l;
    while c.value_at(j) > *b {
        j += 1;
    }
    (j, true)
}

/// Closed-form state at period `t >= 1` (ignoring the period-1 special
/// case of the positive-first construction, handled by the caller).
fn alternating_state(
    problem: &LdoLcProblem,
    case: AlternatingCase,
    delta: i64,
    x0: &Rat,
    t: usize,
) -> Rat {
    let b = problem.bound();
    let active = match case {
        AlternatingCase::PositiveFirst => t % 2 == 1,
        AlternatingCase::NegativeFirst => t % 2 == 0,
    };
    if !active {
        return Rat::zero();
    }
    if t == 1 && case == AlternatingCase::PositiveFirst {
        return problem.clamp(0, x0);
    }
    let cj = problem.c().value_at((t as i64 + delta) as usize);
    if cj < *b {
        cj
    } else {
        b.clone()
    }
}

/// Exact value of the infinite closed-form trajectory: explicit terms up
/// to the index where `p`, `c`, and the min-resolution are all in their
/// geometric regime, then a closed geometric sum over the active parity
/// class (step ratio `(r_p r_c)^2`, which has modulus < 1 whenever `p` is
/// summable).
fn alternating_exact_value(
    problem: &LdoLcProblem,
    x0: &Rat,
    case: AlternatingCase,
    delta: i64,
) -> Rat {
    let p = problem.p();
    let c = problem.c();
    let b = problem.bound();
    let mut total = p.value_at(0) * x0;

    let t0 = match case {
        AlternatingCase::PositiveFirst => {
            total += p.value_at(1) * problem.clamp(0, x0);
            3usize
        }
        AlternatingCase::NegativeFirst => 2usize,
    };
    let (m, use_c) = resolved_min_start(c, b);
    // Regular regime: t in the p tail and t + delta past the resolution
    // point (and past the c tail when the min resolves to c).
    let mut reg = p.tail_start().max(((m as i64) - delta).max(0) as usize);
    if use_c {
        reg = reg.max(((c.tail_start() as i64) - delta).max(0) as usize);
    }
    let mut reg_active = reg.max(t0);
    if reg_active % 2 != t0 % 2 {
        reg_active += 1;
    }
    let mut t = t0;
    while t < reg_active {
        total += p.value_at(t) * alternating_state(problem, case, delta, x0, t);
        t += 2;
    }
    // t is now the first active index in the regular regime.
    let (p0, rp) = p.tail_generator_at(t);
    if use_c {
        let (c0, rc) = c.tail_generator_at((t as i64 + delta) as usize);
        let step = pow_u(&(&rp * &rc), 2);
        total += &p0 * &c0 / (Rat::one() - step);
    } else {
        let step = pow_u(&rp, 2);
        total += &p0 * b / (Rat::one() - step);
    }
    total
}

/// Closed-form optimal trajectory for strictly alternating problems with
/// a strict positivity margin, using the default index convention.
pub fn alternating_optimal(
    problem: &LdoLcProblem,
    x0: &Rat,
    eps: &Rat,
) -> Result<AlternatingSolution, RuleError> {
    alternating_optimal_with_index(problem, x0, eps, AlternatingIndex::Recursive)
}

pub fn alternating_optimal_with_index(
    problem: &LdoLcProblem,
    x0: &Rat,
    eps: &Rat,
    index: AlternatingIndex,
) -> Result<AlternatingSolution, RuleError> {
    if !problem.in_state_space(x0) {
        return Err(RuleError::InvalidStart { x0: x0.clone() });
    }
    if !eps.is_positive() {
        return Err(RuleError::InvalidEps);
    }
    if !problem.p().is_summable() {
        return Err(RuleError::NonSummableWeights);
    }
    let class = classify(problem);
    if !class.strictly_alternating {
        return Err(RuleError::NotStrictlyAlternating);
    }
    if !class.positivity_margin {
        // Locate a concrete failing period for the error message.
        let t = (0..=problem.c().tail_start().max(problem.a().tail_start()) + 1)
            .find(|&t| {
                let c_t = problem.c().value_at(t);
                let combined = &c_t + problem.a().value_at(t) * problem.bound();
                !c_t.is_positive() || !combined.is_positive()
            })
            .unwrap_or(0);
        return Err(RuleError::NoPositivityMargin { t });
    }
    let case = if problem.p().value_at(1).is_positive() {
        AlternatingCase::PositiveFirst
    } else {
        AlternatingCase::NegativeFirst
    };
    // Sign hypothesis on a: the passive-parity periods need a <= 0.
    let (parity, from) = match case {
        AlternatingCase::PositiveFirst => (0usize, 2usize),
        AlternatingCase::NegativeFirst => (1usize, 1usize),
    };
    problem
        .a()
        .all_nonpos_on_parity(parity, from)
        .map_err(|w| RuleError::AlternatingSignPattern { t: w.0 })?;

    let delta = match (case, index) {
        (AlternatingCase::PositiveFirst, AlternatingIndex::Shifted) => 1i64,
        _ => -1i64,
    };

    // Head length: truncation beyond H costs at most b * sum_{t>H} |p|.
    let mut h = 1usize;
    let bound = loop {
        let tail = problem
            .p()
            .abs_tail_sum(h + 1)
            .ok_or(RuleError::NonSummableWeights)?;
        let bound = problem.bound() * tail;
        if bound <= *eps {
            break bound;
        }
        h += 1;
    };
    let mut head = Vec::with_capacity(h + 1);
    head.push(x0.clone());
    for t in 1..=h {
        head.push(alternating_state(problem, case, delta, x0, t));
    }
    let trajectory = Trajectory::from_period_zero(head);
    let value = alternating_exact_value(problem, x0, case, delta);
    Ok(AlternatingSolution {
        case,
        index,
        trajectory,
        value,
        truncation_bound: bound,
    })
}

// ---------------------------------------------------------------------------
// Eventually conclusive problems
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct ConclusiveSolution {
    /// Least period from which the weights stay nonpositive; the
    /// trajectory is zero from here on.
    pub witness: usize,
    pub trajectory: Trajectory,
    /// Exact value of the full infinite trajectory.
    pub value: Rat,
}

/// Optimal trajectory with an exactly zero tail for eventually conclusive
/// problems: zeros from the witness period, and before it the solution of
/// the finite-horizon problem with zero continuation.
pub fn conclusive_optimal(problem: &LdoLcProblem, x0: &Rat) -> Result<ConclusiveSolution, RuleError> {
    if !problem.in_state_space(x0) {
        return Err(RuleError::InvalidStart { x0: x0.clone() });
    }
    let witness = problem
        .p()
        .nonpos_from()
        .ok_or(RuleError::NotEventuallyConclusive)?;
    if witness <= 1 {
        let trajectory = Trajectory::from_period_zero(vec![x0.clone()]);
        let value = objective_value(problem, &trajectory);
        return Ok(ConclusiveSolution {
            witness,
            trajectory,
            value,
        });
    }
    let result = solve_with_horizon(problem, x0, witness - 1)?;
    Ok(ConclusiveSolution {
        witness,
        trajectory: result.trajectory,
        value: result.value,
    })
}

// ---------------------------------------------------------------------------
// Two-phase problems
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct TwoPhaseSolution {
    /// Last period of the strictly positive weight run.
    pub t_plus: usize,
    /// First period of the permanently negative weight run.
    pub t_minus: usize,
    pub trajectory: Trajectory,
    /// Exact value of the full infinite trajectory.
    pub value: Rat,
}

/// Optimal trajectory for two-phase problems with nonnegative `a` during
/// the growth phase: the clamp recursion `y_{t+1} = min{c_t + a_t y_t, b}`
/// through the positive run, zeros from the negative run, and finite DP
/// on any gap periods in between.
pub fn two_phase_optimal(problem: &LdoLcProblem, x0: &Rat) -> Result<TwoPhaseSolution, RuleError> {
    if !problem.in_state_space(x0) {
        return Err(RuleError::InvalidStart { x0: x0.clone() });
    }
    let class = classify(problem);
    let (t_plus, t_minus) = class.two_phase.ok_or(RuleError::NotTwoPhase)?;
    for t in 0..t_plus {
        if problem.a().value_at(t).is_negative() {
            return Err(RuleError::NegativeGrowthCoefficient { t });
        }
    }

    let mut head = Vec::with_capacity(t_minus);
    head.push(x0.clone());
    for t in 0..t_plus {
        let x_t = head.last().unwrap().clone();
        head.push(problem.clamp(t, &x_t));
    }
    // Gap periods t_plus+1 .. t_minus-1: optimal continuation from the
    // fixed entry state by finite DP with zero terminal (zero is optimal
    // from t_minus on).
    if t_minus > t_plus + 1 {
        let terminal = PwlConcaveFn::zero(problem.bound());
        let table = backward_induction(
            problem,
            t_plus,
            t_minus - 1,
            terminal,
            TerminalRule::ConclusiveExact { witness: t_minus },
        );
        for t in t_plus..t_minus - 1 {
            let x_t = head.last().unwrap().clone();
            let u = problem.clamp(t, &x_t);
            let (y_star, _) = table.function_at(t + 1).smallest_maximizer();
            head.push(if y_star < u { y_star } else { u });
        }
    }
    let trajectory = Trajectory::from_period_zero(head);
    let value = objective_value(problem, &trajectory);
    Ok(TwoPhaseSolution {
        t_plus,
        t_minus,
        trajectory,
        value,
    })
}
