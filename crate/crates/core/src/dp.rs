//! Exact backward dynamic programming over piecewise-linear concave value
//! functions, with horizon selection that is exact for zero-tail or
//! eventually conclusive objectives and eps-truncated otherwise.

use crate::problem::LdoLcProblem;
use crate::pwl::PwlConcaveFn;
use crate::rational::Rat;
use crate::trajectory::{objective_value, Trajectory};
use num::{Signed, Zero};
use thiserror::Error;

/// Terminal condition used at the truncation horizon.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TerminalRule {
    /// `p` has a zero tail past the horizon: truncation is exact.
    ZeroTailExact,
    /// Weights are nonpositive from the witness period on, so the zero
    /// continuation is optimal and truncation is exact.
    ConclusiveExact { witness: usize },
    /// Generic zero terminal with a one-sided truncation error bound.
    EpsTruncation,
}

/// Value functions `V^t` for `t = start..=horizon`, plus the terminal
/// function standing in for `V^{horizon+1}`.
#[derive(Debug, Clone)]
pub struct ValueTable {
    start: usize,
    functions: Vec<PwlConcaveFn>,
    terminal: PwlConcaveFn,
    pub rule: TerminalRule,
}

impl ValueTable {
    pub fn start(&self) -> usize {
        self.start
    }

    pub fn horizon(&self) -> usize {
        self.start + self.functions.len() - 1
    }

    /// `V^t`; for `t = horizon + 1` the terminal function.
    pub fn function_at(&self, t: usize) -> &PwlConcaveFn {
        if t == self.horizon() + 1 {
            &self.terminal
        } else {
            &self.functions[t - self.start]
        }
    }

    pub fn functions(&self) -> &[PwlConcaveFn] {
        &self.functions
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Exactness {
    Exact,
    EpsApprox,
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub trajectory: Trajectory,
    pub value: Rat,
    /// One-sided truncation bound: value <= optimum <= value + error_bound.
    pub error_bound: Rat,
    pub horizon_used: usize,
    pub exactness: Exactness,
    pub table: ValueTable,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DpError {
    #[error("initial state {x0} outside [0, b]")]
    InvalidStart { x0: Rat },
    #[error("eps must be strictly positive")]
    InvalidEps,
    #[error("objective weights are not absolutely summable")]
    DivergentObjective,
}

/// One Bellman backstep: `V_t(x) = p^(t) x + M(min{c_t + a_t x, b})` with
/// `M` the prefix max of `V_{t+1}`. The composition of the concave
/// nondecreasing `M` with the concave clamp is concave, so the class is
/// closed under the step.
pub fn bellman_backstep(problem: &LdoLcProblem, t: usize, v_next: &PwlConcaveFn) -> PwlConcaveFn {
    let b = problem.bound();
    let (p_t, c_t, a_t) = problem.coefficient_at(t);
    let m = v_next.prefix_max();

    // Candidate x positions where the composed function can kink: the
    // domain ends, the clamp crossover c + a x = b, and preimages of M's
    // breakpoints under x -> c + a x.
    let mut xs: Vec<Rat> = vec![Rat::zero(), b.clone()];
    if !a_t.is_zero() {
        let cross = (b - &c_t) / &a_t;
        if cross.is_positive() && cross < *b {
            xs.push(cross);
        }
        for (u, _) in m.breakpoints() {
            let x = (u - &c_t) / &a_t;
            if x.is_positive() && x < *b {
                xs.push(x);
            }
        }
    }
    xs.sort();
    xs.dedup();

    let points: Vec<(Rat, Rat)> = xs
        .into_iter()
        .map(|x| {
            let inner = problem.clamp(t, &x);
            let v = &p_t * &x
                + m.eval(&inner)
                    .expect("clamp image stays inside [0, b] for valid problems");
            (x, v)
        })
        .collect();
    PwlConcaveFn::new(points).expect("backstep preserves concavity")
}

/// Backward induction from the terminal function (read as `V^{horizon+1}`)
/// down to `V^{start}`.
pub fn backward_induction(
    problem: &LdoLcProblem,
    start: usize,
    horizon: usize,
    terminal: PwlConcaveFn,
    rule: TerminalRule,
) -> ValueTable {
    assert!(start <= horizon);
    let mut functions = vec![PwlConcaveFn::zero(problem.bound()); horizon - start + 1];
    let mut next = terminal.clone();
    for t in (start..=horizon).rev() {
        let v_t = bellman_backstep(problem, t, &next);
        next = v_t.clone();
        functions[t - start] = v_t;
    }
    ValueTable {
        start,
        functions,
        terminal,
        rule,
    }
}

/// Horizon selection. Exact (bound 0) when `p` is eventually conclusive or
/// has a zero tail; otherwise the smallest `H` with
/// `b * sum_{t > H} |p^(t)| <= eps`.
pub fn choose_horizon(
    problem: &LdoLcProblem,
    eps: &Rat,
) -> Result<(usize, TerminalRule, Rat), DpError> {
    let p = problem.p();
    let mut exact: Option<(usize, TerminalRule)> = None;
    if let Some(witness) = p.nonpos_from() {
        exact = Some((witness, TerminalRule::ConclusiveExact { witness }));
    }
    if p.abs_tail_sum(p.tail_start()) == Some(Rat::zero()) {
        // Zero tail (or an all-zero geometric): exact at the last nonzero
        // prefix index.
        let mut h = p.tail_start();
        while h > 0 && p.value_at(h - 1).is_zero() {
            h -= 1;
        }
        let h = h.saturating_sub(1);
        match &exact {
            Some((w, _)) if *w <= h => {}
            _ => exact = Some((h, TerminalRule::ZeroTailExact)),
        }
    }
    if let Some((h, rule)) = exact {
        return Ok((h, rule, Rat::zero()));
    }
    if !eps.is_positive() {
        return Err(DpError::InvalidEps);
    }
    let mut h = 0usize;
    loop {
        let tail = p
            .abs_tail_sum(h + 1)
            .ok_or(DpError::DivergentObjective)?;
        let bound = problem.bound() * tail;
        if bound <= *eps {
            return Ok((h, TerminalRule::EpsTruncation, bound));
        }
        h += 1;
    }
}

/// Solves from `x0` at period 0: horizon selection, backward induction,
/// then forward greedy extraction taking the smallest maximizer at every
/// step. The returned trajectory is feasible with exactly the returned
/// value, and value <= optimum <= value + error_bound.
pub fn solve(problem: &LdoLcProblem, x0: &Rat, eps: &Rat) -> Result<SolveResult, DpError> {
    let (h, rule, bound) = choose_horizon(problem, eps)?;
    solve_at_horizon(problem, x0, h, rule, bound)
}

/// Same as `solve` with the truncation horizon forced; the bound is the
/// generic tail bound for that horizon.
pub fn solve_with_horizon(
    problem: &LdoLcProblem,
    x0: &Rat,
    horizon: usize,
) -> Result<SolveResult, DpError> {
    let tail = problem
        .p()
        .abs_tail_sum(horizon + 1)
        .ok_or(DpError::DivergentObjective)?;
    let bound = problem.bound() * tail;
    solve_at_horizon(problem, x0, horizon, TerminalRule::EpsTruncation, bound)
}

fn solve_at_horizon(
    problem: &LdoLcProblem,
    x0: &Rat,
    horizon: usize,
    rule: TerminalRule,
    bound: Rat,
) -> Result<SolveResult, DpError> {
    if !problem.in_state_space(x0) {
        return Err(DpError::InvalidStart { x0: x0.clone() });
    }
    let terminal = PwlConcaveFn::zero(problem.bound());
    let table = backward_induction(problem, 0, horizon, terminal, rule);

    let mut head = Vec::with_capacity(horizon + 2);
    head.push(x0.clone());
    for t in 0..=horizon {
        let x_t = head.last().unwrap().clone();
        let u = problem.clamp(t, &x_t);
        let (y_star, _) = table.function_at(t + 1).smallest_maximizer();
        let next = if y_star < u { y_star } else { u };
        if t < horizon {
            head.push(next);
        } else {
            debug_assert!(next.is_zero() || matches!(table.rule, TerminalRule::EpsTruncation));
        }
    }
    let trajectory = Trajectory::from_period_zero(head);
    let value = objective_value(problem, &trajectory);
    let exactness = if bound.is_zero() {
        Exactness::Exact
    } else {
        Exactness::EpsApprox
    };
    Ok(SolveResult {
        trajectory,
        value,
        error_bound: bound,
        horizon_used: horizon,
        exactness,
        table,
    })
}

/// Per-period Bellman residuals
/// `V^t(x_t) - p^(t) x_t - V^{t+1}(x_{t+1})` over the table's range; all
/// zero exactly when the trajectory is optimal for the truncated problem.
pub fn bellman_residual(
    problem: &LdoLcProblem,
    table: &ValueTable,
    traj: &Trajectory,
) -> Vec<Rat> {
    assert_eq!(table.start(), traj.start());
    (table.start()..=table.horizon())
        .map(|t| {
            let x_t = traj.value_at(t);
            let x_next = traj.value_at(t + 1);
            let v_t = table.function_at(t).eval(&x_t).expect("state in domain");
            let v_next = table
                .function_at(t + 1)
                .eval(&x_next)
                .expect("state in domain");
            let (p_t, _, _) = problem.coefficient_at(t);
            v_t - p_t * x_t - v_next
        })
        .collect()
}
