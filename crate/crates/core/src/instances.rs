//! Named reference instances and seeded random instance families used by
//! tests, benches, and examples. The generators only emit problems that
//! pass strict validation, with small denominators so exact arithmetic
//! stays cheap.

use crate::problem::{make_cake_eating, LdoLcProblem};
use crate::rational::{rat, rat_int, Rat};
use crate::sequence::TailedSequence;
use num::{Signed, Zero};

/// Splitmix-style 64-bit generator: tiny, seedable, and reproducible
/// across platforms, which is all the test corpus needs.
#[derive(Debug, Clone)]
pub struct Rng(u64);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform integer in `[0, n)`.
    pub fn below(&mut self, n: u64) -> u64 {
        self.next_u64() % n
    }

    /// Uniform on the grid `{0, 1/16, ..., hi}` with `hi = n/16`.
    pub fn frac16(&mut self, n: u64) -> Rat {
        rat(self.below(n + 1) as i64, 16)
    }

    /// Uniform on `{1/16, ..., n/16}`.
    pub fn pos_frac16(&mut self, n: u64) -> Rat {
        rat(1 + self.below(n) as i64, 16)
    }

    /// Uniform on `{-n/16, ..., n/16}`.
    pub fn signed_frac16(&mut self, n: u64) -> Rat {
        rat(self.below(2 * n + 1) as i64 - n as i64, 16)
    }
}

// ---------------------------------------------------------------------------
// Named instances
// ---------------------------------------------------------------------------

/// Strictly alternating reference instance, negative-first case:
/// `b = 1`, `p^(t) = (-1/2)^t`, `c_t = 2^{-(t+1)}`, `a_t = -2^{-(t+2)}`.
/// From `x0 = 7/10` the closed-form value is `7/10 + 1/15`.
pub fn p_alt() -> LdoLcProblem {
    LdoLcProblem::new(
        rat_int(1),
        TailedSequence::geometric(Vec::new(), rat_int(1), rat(-1, 2)).unwrap(),
        TailedSequence::geometric(Vec::new(), rat(1, 2), rat(1, 2)).unwrap(),
        TailedSequence::geometric(Vec::new(), rat(-1, 4), rat(1, 2)).unwrap(),
    )
}

/// Positive-first mirror of [`p_alt`]: `p^(t) = (-1)^{t+1} 2^{-t}`, same
/// constraint data.
pub fn p_alt_mirror() -> LdoLcProblem {
    LdoLcProblem::new(
        rat_int(1),
        TailedSequence::geometric(Vec::new(), rat_int(-1), rat(-1, 2)).unwrap(),
        TailedSequence::geometric(Vec::new(), rat(1, 2), rat(1, 2)).unwrap(),
        TailedSequence::geometric(Vec::new(), rat(-1, 4), rat(1, 2)).unwrap(),
    )
}

/// Two-phase reference instance: `b = 1`, `p = [1/2, 1/4]` then
/// `-1/8 * (1/2)^k`, `c_t = 3/10 * (1/2)^t`, `a_t = 1/2 * (1/2)^t`.
/// From `x0 = 1/5`: head `[1/5, 2/5]`, value `1/5`.
pub fn p2() -> LdoLcProblem {
    LdoLcProblem::new(
        rat_int(1),
        TailedSequence::geometric(vec![rat(1, 2), rat(1, 4)], rat(-1, 8), rat(1, 2)).unwrap(),
        TailedSequence::geometric(Vec::new(), rat(3, 10), rat(1, 2)).unwrap(),
        TailedSequence::geometric(Vec::new(), rat(1, 2), rat(1, 2)).unwrap(),
    )
}

/// Four-period cake eating: `b = 1`, `p = [1, 1/2, 1/4, 1/8]` with zero
/// tail, `c = 0`, `a = 1`.
pub fn cake4() -> LdoLcProblem {
    let p = TailedSequence::zero_tailed(vec![rat_int(1), rat(1, 2), rat(1, 4), rat(1, 8)]);
    make_cake_eating(rat_int(1), p).unwrap()
}

/// Positive geometric objective tail: `b = 1`, `p^(t) = (3/4)^t`,
/// `c_t = 1/2 * (1/2)^t`, `a_t = 1/2 * (1/2)^t`. Never conclusive, so
/// solving requires genuine eps-truncation.
pub fn p_geo() -> LdoLcProblem {
    LdoLcProblem::new(
        rat_int(1),
        TailedSequence::geometric(Vec::new(), rat_int(1), rat(3, 4)).unwrap(),
        TailedSequence::geometric(Vec::new(), rat(1, 2), rat(1, 2)).unwrap(),
        TailedSequence::geometric(Vec::new(), rat(1, 2), rat(1, 2)).unwrap(),
    )
}

// ---------------------------------------------------------------------------
// Random constraint data
// ---------------------------------------------------------------------------

/// Constraint pair `(c, a)` that passes strict validation for bound `b`:
/// `c_t >= 0` and `c_t + a_t b >= 0` everywhere, including the geometric
/// tails. With `a_t = m_t min{c_t / b, 1}` for a multiplier `m_t` in
/// `[-1, 1]`, the combined value is `c_t + a_t b >= c_t - min{c_t, b} >=
/// 0`, and `|a_t| <= 1` keeps one-step perturbations non-amplifying
/// (which the oracle's gap bound relies on).
fn random_constraints(rng: &mut Rng, b: &Rat, len: usize) -> (TailedSequence, TailedSequence) {
    let multipliers = [rat_int(-1), rat(-1, 2), Rat::zero(), rat(1, 2), rat_int(1)];
    let a_from = |c_t: &Rat, m: &Rat, b: &Rat| {
        let unit = c_t / b;
        let one = rat_int(1);
        let capped = if unit > one { one } else { unit };
        m * capped
    };
    let mut c_prefix = Vec::with_capacity(len);
    let mut a_prefix = Vec::with_capacity(len);
    for _ in 0..len {
        let c_t = rng.pos_frac16(16);
        let m = &multipliers[rng.below(5) as usize];
        a_prefix.push(a_from(&c_t, m, b));
        c_prefix.push(c_t);
    }
    let c_first = rng.pos_frac16(16);
    let ratio = rat(1 + rng.below(3) as i64, 4); // 1/4, 1/2, 3/4
    let m = &multipliers[rng.below(5) as usize];
    let a_first = a_from(&c_first, m, b);
    let c = TailedSequence::geometric(c_prefix, c_first, ratio.clone()).unwrap();
    let a = TailedSequence::geometric(a_prefix, a_first, ratio).unwrap();
    (c, a)
}

fn random_bound(rng: &mut Rng) -> Rat {
    [rat(1, 2), rat_int(1), rat_int(2)][rng.below(3) as usize].clone()
}

/// Strictly-valid problem with a zero-tailed objective prefix of length
/// at most 6: always eventually conclusive.
pub fn random_eventually_conclusive(rng: &mut Rng) -> LdoLcProblem {
    let b = random_bound(rng);
    let len = 1 + rng.below(6) as usize;
    let p_prefix: Vec<Rat> = (0..len).map(|_| rng.signed_frac16(16)).collect();
    let (c, a) = random_constraints(rng, &b, len);
    LdoLcProblem::new(b, TailedSequence::zero_tailed(p_prefix), c, a)
}

/// Arbitrary-sign prefix followed by a strictly negative geometric tail.
pub fn random_strongly_conclusive(rng: &mut Rng) -> LdoLcProblem {
    let b = random_bound(rng);
    let len = 1 + rng.below(6) as usize;
    let p_prefix: Vec<Rat> = (0..len).map(|_| rng.signed_frac16(16)).collect();
    let first = -rng.pos_frac16(8);
    let ratio = rat(1 + rng.below(3) as i64, 4);
    let p = TailedSequence::geometric(p_prefix, first, ratio).unwrap();
    let (c, a) = random_constraints(rng, &b, len);
    LdoLcProblem::new(b, p, c, a)
}

/// Two-phase problem: strictly positive weights through `T+`, zeros on any
/// gap periods, then a strictly negative geometric tail from `T- = T+ +
/// gap`; growth coefficients are forced nonnegative before `T+`.
pub fn random_two_phase(rng: &mut Rng) -> LdoLcProblem {
    let b = random_bound(rng);
    let t_plus = rng.below(4) as usize;
    let gap = 1 + rng.below(3) as usize;
    let mut p_prefix: Vec<Rat> = (0..=t_plus).map(|_| rng.pos_frac16(16)).collect();
    for _ in 1..gap {
        p_prefix.push(Rat::zero());
    }
    let first = -rng.pos_frac16(8);
    let ratio = rat(1 + rng.below(3) as i64, 4);
    let p = TailedSequence::geometric(p_prefix, first, ratio).unwrap();
    let (c, mut a) = random_constraints(rng, &b, t_plus + gap);
    // Nonnegative growth during the positive run.
    let mut a_prefix = a.prefix().to_vec();
    for v in a_prefix.iter_mut().take(t_plus) {
        if v.is_negative() {
            *v = -v.clone();
        }
    }
    let (af, ar) = a.tail_generator_at(a.tail_start());
    a = TailedSequence::geometric(a_prefix, af, ar).unwrap();
    LdoLcProblem::new(b, p, c, a)
}

/// Strictly alternating negative-first family shaped like [`p_alt`]:
/// `p^(t) = s (-r_p)^t` with `p^(1) < 0`, positive geometric `c`, and a
/// negative geometric `a` sharing `c`'s ratio with `|a_t| b < c_t`, which
/// yields both the positivity margin and the nonpositive-`a` hypothesis.
pub fn random_alternating_negative_first(rng: &mut Rng) -> LdoLcProblem {
    let b = random_bound(rng);
    let s = rng.pos_frac16(16);
    let rp = rat(1 + rng.below(3) as i64, 4);
    let p = TailedSequence::geometric(Vec::new(), s, -rp).unwrap();
    let c_first = rng.pos_frac16(16);
    let rc = rat(1 + rng.below(3) as i64, 4);
    // |a| b strictly below c: margin c_t + a_t b = c_t / 2 > 0.
    let a_first = -&c_first / (rat_int(2) * &b);
    let c = TailedSequence::geometric(Vec::new(), c_first, rc.clone()).unwrap();
    let a = TailedSequence::geometric(Vec::new(), a_first, rc).unwrap();
    LdoLcProblem::new(b, p, c, a)
}

/// Positive-first mirror of [`random_alternating_negative_first`]
/// (`p^(1) > 0`), used to exercise the index-convention comparison.
pub fn random_alternating_positive_first(rng: &mut Rng) -> LdoLcProblem {
    let problem = random_alternating_negative_first(rng);
    let (pf, pr) = problem.p().tail_generator_at(0);
    let p = TailedSequence::geometric(Vec::new(), -pf, pr).unwrap();
    LdoLcProblem::new(
        problem.bound().clone(),
        p,
        problem.c().clone(),
        problem.a().clone(),
    )
}

/// General strictly-valid problem with a summable geometric objective
/// tail of arbitrary sign.
pub fn random_valid(rng: &mut Rng) -> LdoLcProblem {
    let b = random_bound(rng);
    let len = rng.below(5) as usize;
    let p_prefix: Vec<Rat> = (0..len).map(|_| rng.signed_frac16(16)).collect();
    let first = rng.signed_frac16(8);
    let ratio = rat(rng.below(7) as i64 - 3, 4); // -3/4 .. 3/4
    let p = TailedSequence::geometric(p_prefix, first, ratio).unwrap();
    let (c, a) = random_constraints(rng, &b, len);
    LdoLcProblem::new(b, p, c, a)
}

/// Variant of [`random_valid`] with every growth coefficient `<= 0`
/// (free-disposability hypothesis).
pub fn random_a_nonpos(rng: &mut Rng) -> LdoLcProblem {
    let problem = random_valid(rng);
    flip_a_signs(problem, true)
}

/// Variant of [`random_valid`] with every growth coefficient `>= 0`
/// (initial-shift hypothesis).
pub fn random_a_nonneg(rng: &mut Rng) -> LdoLcProblem {
    let problem = random_valid(rng);
    flip_a_signs(problem, false)
}

fn flip_a_signs(problem: LdoLcProblem, nonpos: bool) -> LdoLcProblem {
    let a = problem.a();
    let fix = |v: &Rat| {
        let wrong = if nonpos {
            v.is_positive()
        } else {
            v.is_negative()
        };
        if wrong {
            -v.clone()
        } else {
            v.clone()
        }
    };
    let prefix: Vec<Rat> = a.prefix().iter().map(&fix).collect();
    let (af, ar) = a.tail_generator_at(a.tail_start());
    // Tail ratios drawn by the generators are nonnegative, so fixing the
    // leading coefficient fixes the whole tail.
    let a = TailedSequence::geometric(prefix, fix(&af), ar).unwrap();
    LdoLcProblem::new(
        problem.bound().clone(),
        problem.p().clone(),
        problem.c().clone(),
        a,
    )
}

/// Random state inside `[0, b]` on a 16-point grid.
pub fn random_state(rng: &mut Rng, problem: &LdoLcProblem) -> Rat {
    rng.frac16(16) * problem.bound()
}
