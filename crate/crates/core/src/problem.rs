//! LDO-LC problem instances: maximize `sum p^(t) x_t` over state sequences
//! in `[0, b]` with `x_{t+1} <= c_t + a_t x_t`.

use crate::rational::Rat;
use crate::sequence::{geom_pair_sign_ok, Tail, TailedSequence};
use num::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LdoLcProblem {
    b: Rat,
    p: TailedSequence,
    c: TailedSequence,
    a: TailedSequence,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValidationMode {
    /// Enforces absolute summability of all three coefficient sequences.
    Strict,
    /// Waives summability of `c` and `a` only (never of `p`). Needed for
    /// the cake eating family, where `a_t = 1` for all `t`.
    Relaxed,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("b must be strictly positive")]
    NonPositiveBound,
    #[error("c_{t} is negative")]
    NegativeC { t: usize },
    #[error("c_{t} + a_{t}*b is negative")]
    NegativeCombined { t: usize },
    #[error("sequence {name} is not absolutely summable")]
    NonSummable { name: &'static str },
}

/// Outcome of `validate`; collects every violation found rather than
/// aborting at the first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl LdoLcProblem {
    pub fn new(b: Rat, p: TailedSequence, c: TailedSequence, a: TailedSequence) -> Self {
        Self { b, p, c, a }
    }

    pub fn bound(&self) -> &Rat {
        &self.b
    }

    pub fn p(&self) -> &TailedSequence {
        &self.p
    }

    pub fn c(&self) -> &TailedSequence {
        &self.c
    }

    pub fn a(&self) -> &TailedSequence {
        &self.a
    }

    /// `(p^(t), c_t, a_t)` as exact rationals.
    pub fn coefficient_at(&self, t: usize) -> (Rat, Rat, Rat) {
        (self.p.value_at(t), self.c.value_at(t), self.a.value_at(t))
    }

    /// Right endpoint of the transition set: `min{c_t + a_t x, b}`.
    pub fn clamp(&self, t: usize, x: &Rat) -> Rat {
        let v = self.c.value_at(t) + self.a.value_at(t) * x;
        if v < self.b {
            v
        } else {
            self.b.clone()
        }
    }

    pub fn in_state_space(&self, x: &Rat) -> bool {
        !x.is_negative() && *x <= self.b
    }
}

/// Checks every model assumption; prefix indices pointwise, infinite tails
/// analytically via the geometric generators.
pub fn validate(problem: &LdoLcProblem, mode: ValidationMode) -> ValidationReport {
    let mut violations = Vec::new();
    if !problem.b.is_positive() {
        violations.push(Violation::NonPositiveBound);
    }

    // c_t >= 0 for all t.
    for (t, v) in problem.c.prefix().iter().enumerate() {
        if v.is_negative() {
            violations.push(Violation::NegativeC { t });
        }
    }
    if let Some(t) = problem.c.first_tail_negative() {
        violations.push(Violation::NegativeC { t });
    }

    // c_t + a_t b >= 0 for all t.
    if let Err(t) = combined_nonneg(&problem.c, &problem.a, &problem.b, false) {
        violations.push(Violation::NegativeCombined { t });
    }

    if !problem.p.is_summable() {
        violations.push(Violation::NonSummable { name: "p" });
    }
    if mode == ValidationMode::Strict {
        if !problem.c.is_summable() {
            violations.push(Violation::NonSummable { name: "c" });
        }
        if !problem.a.is_summable() {
            violations.push(Violation::NonSummable { name: "a" });
        }
    }
    ValidationReport { violations }
}

/// Decides `c_t + a_t*b {>, >=} 0` for every `t >= 0`, returning the first
/// violating index. The tails may differ in ratio and prefix length; past
/// the longer prefix the combination is a sum of two geometric terms, which
/// `geom_pair_sign_ok` decides exactly.
pub fn combined_nonneg(
    c: &TailedSequence,
    a: &TailedSequence,
    b: &Rat,
    strict: bool,
) -> Result<(), usize> {
    let h0 = c.tail_start().max(a.tail_start());
    for t in 0..h0 {
        let v = c.value_at(t) + a.value_at(t) * b;
        let bad = if strict {
            !v.is_positive()
        } else {
            v.is_negative()
        };
        if bad {
            return Err(t);
        }
    }
    let (ca, cr) = c.tail_generator_at(h0);
    let (aa, ar) = a.tail_generator_at(h0);
    geom_pair_sign_ok(&ca, &cr, &(aa * b), &ar, strict).map_err(|k| h0 + k)
}

/// `c_t > 0` for all `t`, reported with the first failing index.
pub fn c_all_positive(c: &TailedSequence) -> Result<(), usize> {
    for (t, v) in c.prefix().iter().enumerate() {
        if !v.is_positive() {
            return Err(t);
        }
    }
    if c.tail_all_pos() {
        Ok(())
    } else {
        let l = c.tail_start();
        for t in l..l + 2 {
            if !c.value_at(t).is_positive() {
                return Err(t);
            }
        }
        unreachable!("tail sign pattern has period <= 2")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeneratorError {
    #[error("b must be strictly positive")]
    NonPositiveBound,
    #[error("u_{t} is negative")]
    NegativeUtility { t: usize },
    #[error("a_{t} is negative")]
    NegativeSlope { t: usize },
    #[error("sum of u_t * c_t diverges")]
    DivergentUtilityCost,
    #[error("derived objective sequence has no prefix-plus-geometric form")]
    NotRepresentable,
}

/// Example 1: `a_t = 1`, `c_t = 0` for all `t`. The emitted problem passes
/// relaxed validation only (constant `a` is not summable).
pub fn make_cake_eating(b: Rat, p: TailedSequence) -> Result<LdoLcProblem, GeneratorError> {
    if !b.is_positive() {
        return Err(GeneratorError::NonPositiveBound);
    }
    Ok(LdoLcProblem::new(
        b,
        p,
        TailedSequence::zero(),
        TailedSequence::constant(Rat::one()),
    ))
}

/// Example 2: wealth accumulation with utility weights `u_t >= 0` and
/// slopes `a_t >= 0`; the objective is `p_0 = u_0 a_0`,
/// `p_t = u_t a_t - u_{t-1}` for `t >= 1`.
pub fn make_wealth_accumulation(
    b: Rat,
    u: &TailedSequence,
    c: TailedSequence,
    a: TailedSequence,
) -> Result<LdoLcProblem, GeneratorError> {
    if !b.is_positive() {
        return Err(GeneratorError::NonPositiveBound);
    }
    // Pointwise sign preconditions, tails analytically.
    for (t, v) in u.prefix().iter().enumerate() {
        if v.is_negative() {
            return Err(GeneratorError::NegativeUtility { t });
        }
    }
    if !u.tail_all_nonneg() {
        return Err(GeneratorError::NegativeUtility {
            t: u.tail_start(),
        });
    }
    for (t, v) in a.prefix().iter().enumerate() {
        if v.is_negative() {
            return Err(GeneratorError::NegativeSlope { t });
        }
    }
    if !a.tail_all_nonneg() {
        return Err(GeneratorError::NegativeSlope {
            t: a.tail_start(),
        });
    }
    // sum u_t c_t must be finite: the product tail is geometric with ratio
    // r_u * r_c.
    let (uf, ur) = u.tail_generator_at(u.tail_start());
    let (cf, cr) = c.tail_generator_at(c.tail_start());
    let prod_ratio = (&ur * &cr).abs();
    if !(uf.is_zero() || cf.is_zero() || prod_ratio < Rat::one()) {
        return Err(GeneratorError::DivergentUtilityCost);
    }

    // p_t for t past h0 is u_t a_t - u_{t-1}: a geometric with ratio
    // r_u r_a minus a shifted geometric with ratio r_u. Representable as a
    // single tail only when one side vanishes or the ratios coincide.
    let h0 = u.tail_start().max(a.tail_start()).max(1) + 1;
    let mut prefix = Vec::with_capacity(h0);
    prefix.push(u.value_at(0) * a.value_at(0));
    for t in 1..h0 {
        prefix.push(u.value_at(t) * a.value_at(t) - u.value_at(t - 1));
    }
    let (ua_f, ua_r) = {
        let (uf, ur) = u.tail_generator_at(h0);
        let (af, ar) = a.tail_generator_at(h0);
        (uf * af, ur * ar)
    };
    let (lag_f, lag_r) = u.tail_generator_at(h0 - 1);
    let tail = if ua_f.is_zero() && lag_f.is_zero() {
        Tail::Zero
    } else if ua_f.is_zero() {
        Tail::Geometric {
            first: -lag_f,
            ratio: lag_r,
        }
    } else if lag_f.is_zero() {
        Tail::Geometric {
            first: ua_f,
            ratio: ua_r,
        }
    } else if ua_r == lag_r {
        Tail::Geometric {
            first: ua_f - lag_f,
            ratio: ua_r,
        }
    } else {
        return Err(GeneratorError::NotRepresentable);
    };
    let p = TailedSequence::new(prefix, tail).map_err(|_| GeneratorError::NotRepresentable)?;
    Ok(LdoLcProblem::new(b, p, c, a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};

    fn zs(vals: &[Rat]) -> TailedSequence {
        TailedSequence::zero_tailed(vals.to_vec())
    }

    #[test]
    fn cake_eating_coefficients_validate_relaxed_only() {
        let p = zs(&[rat_int(1), rat(1, 2), rat(1, 4), rat(1, 8)]);
        let prob = make_cake_eating(rat_int(1), p).unwrap();
        assert_eq!(prob.coefficient_at(2), (rat(1, 4), rat_int(0), rat_int(1)));
        assert!(validate(&prob, ValidationMode::Relaxed).is_ok());
        let strict = validate(&prob, ValidationMode::Strict);
        assert_eq!(
            strict.violations,
            vec![Violation::NonSummable { name: "a" }]
        );
    }

    #[test]
    fn negative_c_reported_at_index() {
        let prob = LdoLcProblem::new(
            rat_int(1),
            zs(&[rat_int(1)]),
            zs(&[rat(-1, 10)]),
            TailedSequence::zero(),
        );
        let report = validate(&prob, ValidationMode::Strict);
        assert!(report
            .violations
            .contains(&Violation::NegativeC { t: 0 }));
    }

    #[test]
    fn combined_violation_reported_at_index() {
        // c_0 = 1/2, a_0 = -3/10, b = 2: c_0 + a_0 b = -1/10 < 0.
        let prob = LdoLcProblem::new(
            rat_int(2),
            zs(&[rat_int(1)]),
            zs(&[rat(1, 2)]),
            zs(&[rat(-3, 10)]),
        );
        let report = validate(&prob, ValidationMode::Strict);
        assert_eq!(
            report.violations,
            vec![Violation::NegativeCombined { t: 0 }]
        );
    }

    #[test]
    fn combined_tail_violation_found_analytically() {
        // c decays faster than the negative a-tail, so c_t + a_t b
        // eventually goes negative even though it starts positive.
        let c = TailedSequence::geometric(Vec::new(), rat_int(1), rat(1, 4)).unwrap();
        let a = TailedSequence::geometric(Vec::new(), rat(-1, 8), rat(1, 2)).unwrap();
        let prob = LdoLcProblem::new(rat_int(1), TailedSequence::zero(), c, a);
        let report = validate(&prob, ValidationMode::Strict);
        assert!(matches!(
            report.violations.as_slice(),
            [Violation::NegativeCombined { .. }]
        ));
    }

    #[test]
    fn divergent_p_always_rejected() {
        let p = TailedSequence::constant(rat_int(1));
        let prob = LdoLcProblem::new(rat_int(1), p, TailedSequence::zero(), TailedSequence::zero());
        for mode in [ValidationMode::Strict, ValidationMode::Relaxed] {
            assert!(validate(&prob, mode)
                .violations
                .contains(&Violation::NonSummable { name: "p" }));
        }
    }

    #[test]
    fn wealth_accumulation_zero_utility_gives_zero_objective() {
        let prob = make_wealth_accumulation(
            rat_int(1),
            &TailedSequence::zero(),
            zs(&[rat(1, 2)]),
            zs(&[rat(1, 2)]),
        )
        .unwrap();
        for t in 0..6 {
            assert_eq!(prob.p().value_at(t), rat_int(0));
        }
    }

    #[test]
    fn wealth_accumulation_termwise_example() {
        // u = [1, 1], a = [1/2, 1/2], zero tails:
        // p_0 = 1/2, p_1 = -1/2, p_2 = -1, p_3 = 0, ...
        let u = zs(&[rat_int(1), rat_int(1)]);
        let prob = make_wealth_accumulation(
            rat_int(1),
            &u,
            zs(&[rat(1, 4)]),
            zs(&[rat(1, 2), rat(1, 2)]),
        )
        .unwrap();
        assert_eq!(prob.p().value_at(0), rat(1, 2));
        assert_eq!(prob.p().value_at(1), rat(-1, 2));
        assert_eq!(prob.p().value_at(2), rat_int(-1));
        assert_eq!(prob.p().value_at(3), rat_int(0));
    }

    #[test]
    fn wealth_accumulation_geometric_u_zero_a_tail() {
        // With a zero-tailed, the derived tail is -u_{t-1}: still a
        // geometric tail.
        let u = TailedSequence::geometric(Vec::new(), rat(1, 2), rat(1, 2)).unwrap();
        let a = zs(&[rat(1, 2)]);
        let prob =
            make_wealth_accumulation(rat_int(1), &u, zs(&[rat(1, 4)]), a).unwrap();
        for t in 2..8 {
            assert_eq!(prob.p().value_at(t), -u.value_at(t - 1));
        }
    }

    #[test]
    fn wealth_accumulation_rejects_negative_preconditions() {
        let bad_u = zs(&[rat_int(-1)]);
        assert_eq!(
            make_wealth_accumulation(
                rat_int(1),
                &bad_u,
                TailedSequence::zero(),
                TailedSequence::zero()
            ),
            Err(GeneratorError::NegativeUtility { t: 0 })
        );
    }
}
