//! Classification of problems by the sign structure of the objective
//! weights: strictly alternating, eventually conclusive, strongly
//! eventually conclusive, and two-phase.

use crate::problem::{c_all_positive, combined_nonneg, LdoLcProblem};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProblemClass {
    /// `p^(1) != 0` and signs alternate strictly from index 1 onward.
    pub strictly_alternating: bool,
    /// Least `T` with `p^(t) <= 0` for all `t >= T`.
    pub eventually_conclusive: Option<usize>,
    /// Least `T` with `p^(t) < 0` for all `t >= T`.
    pub strongly_eventually_conclusive: Option<usize>,
    /// `(T_plus, T_minus)`: strictly positive weights through `T_plus`,
    /// strictly negative from `T_minus`, with `T_plus < T_minus`.
    pub two_phase: Option<(usize, usize)>,
    /// `min{c_t, c_t + a_t b} > 0` for all `t`.
    pub positivity_margin: bool,
}

pub fn classify(problem: &LdoLcProblem) -> ProblemClass {
    let p = problem.p();
    let eventually_conclusive = p.nonpos_from();
    let strongly_eventually_conclusive = p.neg_from();
    let two_phase = match (p.positive_run_end(), strongly_eventually_conclusive) {
        (Some(t_plus), Some(t_minus)) if t_plus < t_minus => Some((t_plus, t_minus)),
        _ => None,
    };
    let positivity_margin = c_all_positive(problem.c()).is_ok()
        && combined_nonneg(problem.c(), problem.a(), problem.bound(), true).is_ok();
    ProblemClass {
        strictly_alternating: p.strictly_alternating_from_one(),
        eventually_conclusive,
        strongly_eventually_conclusive,
        two_phase,
        positivity_margin,
    }
}
