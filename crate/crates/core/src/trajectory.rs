//! Trajectories, feasibility, and the feasibility-preserving
//! transformations: zero extension, free disposability, initial-point
//! shifts, and the period-by-period interval characterization.

use crate::problem::LdoLcProblem;
use crate::rational::Rat;
use num::{Signed, Zero};
use thiserror::Error;

/// Closed interval `[lo, hi]`; degenerate intervals are permitted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    pub lo: Rat,
    pub hi: Rat,
}

impl Interval {
    pub fn new(lo: Rat, hi: Rat) -> Self {
        debug_assert!(lo <= hi);
        Self { lo, hi }
    }

    pub fn contains(&self, x: &Rat) -> bool {
        self.lo <= *x && *x <= self.hi
    }

    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }
}

/// A finite head of states with an implicit zero tail. `head[i]` is the
/// state at period `start + i`; states at `t > start + head.len() - 1`
/// are zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trajectory {
    start: usize,
    head: Vec<Rat>,
}

impl Trajectory {
    pub fn new(start: usize, head: Vec<Rat>) -> Self {
        assert!(!head.is_empty(), "trajectory head must be non-empty");
        Self { start, head }
    }

    pub fn from_period_zero(head: Vec<Rat>) -> Self {
        Self::new(0, head)
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn head(&self) -> &[Rat] {
        &self.head
    }

    /// Last period covered by the head.
    pub fn last_index(&self) -> usize {
        self.start + self.head.len() - 1
    }

    /// State at period `t >= start`; zero past the head.
    pub fn value_at(&self, t: usize) -> Rat {
        debug_assert!(t >= self.start);
        if t < self.start || t > self.last_index() {
            Rat::zero()
        } else {
            self.head[t - self.start].clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TrajectoryError {
    #[error("state {x} at period {t} lies outside [0, b]")]
    StateOutOfRange { t: usize, x: Rat },
    #[error("period {t} precedes the trajectory start {start}")]
    BeforeStart { t: usize, start: usize },
    #[error("precondition failed: {0}")]
    Precondition(String),
}

/// How a trajectory first fails feasibility.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FeasibilityViolation {
    /// `x_t` outside `[0, b]`.
    OutOfBox { t: usize },
    /// `x_{t+1} > c_t + a_t x_t`.
    StepExceedsBound { t: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeasibilityReport {
    pub first_violation: Option<FeasibilityViolation>,
}

impl FeasibilityReport {
    pub fn is_feasible(&self) -> bool {
        self.first_violation.is_none()
    }
}

/// The transition set from `x` at period `t`: `[0, min{c_t + a_t x, b}]`.
pub fn transition_set(
    problem: &LdoLcProblem,
    x: &Rat,
    t: usize,
) -> Result<Interval, TrajectoryError> {
    if !problem.in_state_space(x) {
        return Err(TrajectoryError::StateOutOfRange { t, x: x.clone() });
    }
    Ok(Interval::new(Rat::zero(), problem.clamp(t, x)))
}

/// Checks every head step and the attachment of the implicit zero tail.
/// The infinitely many tail steps `0 -> 0` need `c_t >= 0`, which holds
/// for every validated problem, so only the seam is checked.
pub fn is_feasible(problem: &LdoLcProblem, traj: &Trajectory) -> FeasibilityReport {
    for (i, x) in traj.head().iter().enumerate() {
        let t = traj.start() + i;
        if !problem.in_state_space(x) {
            return FeasibilityReport {
                first_violation: Some(FeasibilityViolation::OutOfBox { t }),
            };
        }
    }
    let last = traj.last_index();
    for t in traj.start()..=last {
        let next = traj.value_at(t + 1); // zero at the seam
        let bound = problem.clamp(t, &traj.value_at(t));
        if next > bound {
            return FeasibilityReport {
                first_violation: Some(FeasibilityViolation::StepExceedsBound { t }),
            };
        }
    }
    FeasibilityReport {
        first_violation: None,
    }
}

/// The interval of states admissible at period `t` between fixed neighbor
/// states; `None` marks emptiness (no compatible state exists).
pub fn feasible_interval_at(
    problem: &LdoLcProblem,
    t: usize,
    x_prev: &Rat,
    x_next: &Rat,
) -> Result<Option<Interval>, TrajectoryError> {
    if t == 0 {
        return Err(TrajectoryError::BeforeStart { t, start: 1 });
    }
    for x in [x_prev, x_next] {
        if !problem.in_state_space(x) {
            return Err(TrajectoryError::StateOutOfRange { t, x: x.clone() });
        }
    }
    let (_, c_t, a_t) = problem.coefficient_at(t);
    let upper_in = problem.clamp(t - 1, x_prev); // min{c_{t-1} + a_{t-1} x_prev, b}
    let zero = Rat::zero();
    let interval = if a_t.is_positive() {
        let lower = {
            let v = (x_next - &c_t) / &a_t;
            if v > zero {
                v
            } else {
                zero.clone()
            }
        };
        if lower <= upper_in {
            Some(Interval::new(lower, upper_in))
        } else {
            None
        }
    } else if a_t.is_zero() {
        if *x_next <= c_t {
            Some(Interval::new(zero, upper_in))
        } else {
            None
        }
    } else {
        let from_next = (x_next - &c_t) / &a_t;
        let hi = if from_next < upper_in {
            from_next
        } else {
            upper_in
        };
        if hi >= zero {
            Some(Interval::new(zero, hi))
        } else {
            None
        }
    };
    Ok(interval)
}

/// Truncates the head at period `t0` (inclusive); the zero tail takes over
/// afterwards. Feasibility is preserved.
pub fn zero_extend(traj: &Trajectory, t0: usize) -> Trajectory {
    assert!(t0 >= traj.start(), "truncation before trajectory start");
    let keep = (t0 - traj.start() + 1).min(traj.head().len());
    Trajectory::new(traj.start(), traj.head()[..keep].to_vec())
}

/// Free disposability check: with `a_t <= 0` everywhere, any same-start
/// pointwise-dominated nonnegative trajectory of a feasible trajectory is
/// itself feasible. Returns the feasibility verdict for `y`; precondition
/// failures are errors, not verdicts.
pub fn free_disposal_holds(
    problem: &LdoLcProblem,
    x_traj: &Trajectory,
    y_traj: &Trajectory,
) -> Result<bool, TrajectoryError> {
    let pre = |msg: &str| TrajectoryError::Precondition(msg.to_string());
    for (t, v) in problem.a().prefix().iter().enumerate() {
        if v.is_positive() {
            return Err(pre(&format!("a_{t} > 0")));
        }
    }
    if !problem.a().tail_all_nonpos() {
        return Err(pre("a tail takes positive values"));
    }
    if x_traj.start() != y_traj.start() {
        return Err(pre("trajectories start at different periods"));
    }
    if x_traj.head()[0] != y_traj.head()[0] {
        return Err(pre("trajectories start at different states"));
    }
    if !is_feasible(problem, x_traj).is_feasible() {
        return Err(pre("dominating trajectory is infeasible"));
    }
    let last = x_traj.last_index().max(y_traj.last_index());
    for t in x_traj.start() + 1..=last {
        let y = y_traj.value_at(t);
        if y.is_negative() || y > x_traj.value_at(t) {
            return Err(pre(&format!("y_{t} not dominated by x_{t}")));
        }
    }
    Ok(is_feasible(problem, y_traj).is_feasible())
}

/// Raises the initial state to `y > x_T` (legal when `a_T >= 0`), keeping
/// the remainder; the result is re-verified feasible.
pub fn shift_initial(
    problem: &LdoLcProblem,
    traj: &Trajectory,
    y: Rat,
) -> Result<Trajectory, TrajectoryError> {
    let t0 = traj.start();
    let pre = |msg: String| TrajectoryError::Precondition(msg);
    if problem.a().value_at(t0).is_negative() {
        return Err(pre(format!("a_{t0} < 0")));
    }
    if y <= traj.head()[0] {
        return Err(pre("new start does not exceed the old one".to_string()));
    }
    if !problem.in_state_space(&y) {
        return Err(TrajectoryError::StateOutOfRange { t: t0, x: y });
    }
    if !is_feasible(problem, traj).is_feasible() {
        return Err(pre("input trajectory is infeasible".to_string()));
    }
    let mut head = traj.head().to_vec();
    head[0] = y;
    let shifted = Trajectory::new(t0, head);
    debug_assert!(is_feasible(problem, &shifted).is_feasible());
    Ok(shifted)
}

/// `sum over the head of p^(t) x_t`; the zero tail contributes exactly
/// zero, so the result is exact.
pub fn objective_value(problem: &LdoLcProblem, traj: &Trajectory) -> Rat {
    let mut sum = Rat::zero();
    for (i, x) in traj.head().iter().enumerate() {
        sum += problem.p().value_at(traj.start() + i) * x;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::make_cake_eating;
    use crate::rational::{rat, rat_int};
    use crate::sequence::TailedSequence;

    fn cake(b: i64) -> LdoLcProblem {
        let p = TailedSequence::zero_tailed(vec![rat_int(1), rat(1, 2), rat(1, 4), rat(1, 8)]);
        make_cake_eating(rat_int(b), p).unwrap()
    }

    #[test]
    fn transition_set_examples() {
        let prob = cake(1);
        let omega = transition_set(&prob, &rat(1, 2), 0).unwrap();
        assert_eq!(omega, Interval::new(rat_int(0), rat(1, 2)));
        // c_t = 0, x = 0: degenerate {0}.
        let omega0 = transition_set(&prob, &rat_int(0), 3).unwrap();
        assert!(omega0.is_degenerate());

        let prob = LdoLcProblem::new(
            rat_int(1),
            TailedSequence::zero(),
            TailedSequence::zero_tailed(vec![rat(3, 10)]),
            TailedSequence::zero_tailed(vec![rat(1, 2)]),
        );
        let omega = transition_set(&prob, &rat(1, 5), 0).unwrap();
        assert_eq!(omega.hi, rat(2, 5));

        assert!(transition_set(&cake(1), &rat_int(2), 0).is_err());
    }

    #[test]
    fn cake_b2_transitions_bounded_by_state() {
        let prob = cake(2);
        let omega = transition_set(&prob, &rat_int(2), 5).unwrap();
        assert_eq!(omega, Interval::new(rat_int(0), rat_int(2)));
    }

    #[test]
    fn feasibility_examples() {
        let prob = cake(1);
        let ok = Trajectory::from_period_zero(vec![rat_int(1), rat_int(1), rat(1, 2)]);
        assert!(is_feasible(&prob, &ok).is_feasible());
        let bad = Trajectory::from_period_zero(vec![rat(1, 2), rat(3, 5)]);
        assert_eq!(
            is_feasible(&prob, &bad).first_violation,
            Some(FeasibilityViolation::StepExceedsBound { t: 0 })
        );
        // Constant step bound c_t = 1/4.
        let prob = LdoLcProblem::new(
            rat_int(1),
            TailedSequence::zero(),
            TailedSequence::zero_tailed(vec![rat(1, 4); 4]),
            TailedSequence::zero_tailed(vec![rat_int(0); 4]),
        );
        let traj =
            Trajectory::from_period_zero(vec![rat(9, 10), rat(1, 4), rat(1, 4)]);
        assert!(is_feasible(&prob, &traj).is_feasible());
    }

    #[test]
    fn feasible_interval_cases() {
        // Cake-eating step: a = 1, c = 0 both periods.
        let prob = cake(1);
        let iv = feasible_interval_at(&prob, 1, &rat(4, 5), &rat(3, 10))
            .unwrap()
            .unwrap();
        assert_eq!(iv, Interval::new(rat(3, 10), rat(4, 5)));

        // a_t = 0 with unreachable next state.
        let prob0 = LdoLcProblem::new(
            rat_int(1),
            TailedSequence::zero(),
            TailedSequence::zero_tailed(vec![rat(1, 2), rat(1, 2)]),
            TailedSequence::zero_tailed(vec![rat_int(0), rat_int(0)]),
        );
        assert_eq!(
            feasible_interval_at(&prob0, 1, &rat(1, 2), &rat(7, 10)).unwrap(),
            None
        );

        // a_t = -1/2, c_t = 1/2, x_next = 0: upper is min{1, 1} = 1.
        let probn = LdoLcProblem::new(
            rat_int(1),
            TailedSequence::zero(),
            TailedSequence::zero_tailed(vec![rat_int(1), rat(1, 2)]),
            TailedSequence::zero_tailed(vec![rat_int(0), rat(-1, 2)]),
        );
        let iv = feasible_interval_at(&probn, 1, &rat_int(1), &rat_int(0))
            .unwrap()
            .unwrap();
        assert_eq!(iv, Interval::new(rat_int(0), rat_int(1)));
    }

    #[test]
    fn zero_extend_keeps_feasibility_and_is_idempotent() {
        let prob = cake(1);
        let traj = Trajectory::from_period_zero(vec![rat_int(1), rat_int(1), rat_int(1)]);
        let cut = zero_extend(&traj, 1);
        assert_eq!(cut.head(), &[rat_int(1), rat_int(1)]);
        assert!(is_feasible(&prob, &cut).is_feasible());
        let only_start = zero_extend(&traj, 0);
        assert_eq!(only_start.head().len(), 1);
        assert_eq!(zero_extend(&cut, 5), cut);
    }

    #[test]
    fn free_disposal_on_nonpositive_slopes() {
        let prob = LdoLcProblem::new(
            rat_int(1),
            TailedSequence::zero(),
            TailedSequence::zero_tailed(vec![rat(1, 2); 4]),
            TailedSequence::zero_tailed(vec![rat(-1, 10); 4]),
        );
        let x = Trajectory::from_period_zero(vec![rat(2, 5), rat(2, 5), rat(1, 5)]);
        assert!(is_feasible(&prob, &x).is_feasible());
        let y = Trajectory::from_period_zero(vec![rat(2, 5), rat(1, 5), rat(1, 10)]);
        assert_eq!(free_disposal_holds(&prob, &x, &y), Ok(true));
        assert_eq!(free_disposal_holds(&prob, &x, &x), Ok(true));

        let pos_slope = cake(1);
        let x1 = Trajectory::from_period_zero(vec![rat(1, 2), rat(1, 2)]);
        assert!(matches!(
            free_disposal_holds(&pos_slope, &x1, &x1),
            Err(TrajectoryError::Precondition(_))
        ));
    }

    #[test]
    fn shift_initial_examples() {
        let prob = cake(1);
        let traj = Trajectory::from_period_zero(vec![rat(1, 2), rat(1, 2), rat(1, 4)]);
        let shifted = shift_initial(&prob, &traj, rat(9, 10)).unwrap();
        assert_eq!(shifted.head()[0], rat(9, 10));
        assert!(is_feasible(&prob, &shifted).is_feasible());
        // Top start is least binding.
        assert!(shift_initial(&prob, &traj, rat_int(1)).is_ok());

        let neg = LdoLcProblem::new(
            rat_int(1),
            TailedSequence::zero(),
            TailedSequence::zero_tailed(vec![rat(1, 2)]),
            TailedSequence::zero_tailed(vec![rat(-1, 4)]),
        );
        let t = Trajectory::from_period_zero(vec![rat(1, 4), rat(1, 4)]);
        assert!(matches!(
            shift_initial(&neg, &t, rat(1, 2)),
            Err(TrajectoryError::Precondition(_))
        ));
    }

    #[test]
    fn objective_value_examples() {
        let prob = cake(1);
        let traj =
            Trajectory::from_period_zero(vec![rat_int(1), rat_int(1), rat_int(1), rat_int(1)]);
        assert_eq!(objective_value(&prob, &traj), rat(15, 8));
        let zero = Trajectory::from_period_zero(vec![rat_int(0)]);
        assert_eq!(objective_value(&prob, &zero), rat_int(0));
        // Head shorter than the weight prefix: only the overlap counts.
        let short = Trajectory::from_period_zero(vec![rat_int(1), rat_int(1)]);
        assert_eq!(objective_value(&prob, &short), rat(3, 2));
    }
}
