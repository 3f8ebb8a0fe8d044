//! Real sequences given as a finite prefix plus an analytic tail.
//!
//! A `TailedSequence` is total (defined for every `t >= 0`) and supports
//! exact absolute tail sums and exact sign analysis of the whole infinite
//! tail, which is what turns the model's "for all t" assumptions into
//! finitely checkable certificates.

use crate::rational::{pow_u, Rat};
use num::{One, Signed, Zero};
use thiserror::Error;

/// Analytic continuation past the prefix.
///
/// `Geometric { first, ratio }` means the value at index `prefix_len + k`
/// is `first * ratio^k`. A ratio of magnitude 1 is representable (it is
/// needed for constant coefficient sequences such as cake eating's
/// `a_t = 1`) but such a tail is not absolutely summable unless `first`
/// is zero; summability is enforced where the model requires it, not here.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tail {
    Zero,
    Geometric { first: Rat, ratio: Rat },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TailedSequence {
    prefix: Vec<Rat>,
    tail: Tail,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SequenceError {
    #[error("geometric tail ratio has magnitude greater than 1")]
    DivergentRatio,
}

/// Where in a sequence a pointwise condition first fails.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndexWitness(pub usize);

impl TailedSequence {
    pub fn new(prefix: Vec<Rat>, tail: Tail) -> Result<Self, SequenceError> {
        if let Tail::Geometric { ratio, .. } = &tail {
            if ratio.abs() > Rat::one() {
                return Err(SequenceError::DivergentRatio);
            }
        }
        Ok(Self { prefix, tail })
    }

    pub fn zero_tailed(prefix: Vec<Rat>) -> Self {
        Self {
            prefix,
            tail: Tail::Zero,
        }
    }

    pub fn geometric(prefix: Vec<Rat>, first: Rat, ratio: Rat) -> Result<Self, SequenceError> {
        Self::new(prefix, Tail::Geometric { first, ratio })
    }

    /// Constant sequence `value, value, ...` (ratio 1 tail).
    pub fn constant(value: Rat) -> Self {
        Self {
            prefix: Vec::new(),
            tail: Tail::Geometric {
                first: value,
                ratio: Rat::one(),
            },
        }
    }

    pub fn zero() -> Self {
        Self::zero_tailed(Vec::new())
    }

    pub fn prefix(&self) -> &[Rat] {
        &self.prefix
    }

    pub fn tail(&self) -> &Tail {
        &self.tail
    }

    /// First index governed by the tail.
    pub fn tail_start(&self) -> usize {
        self.prefix.len()
    }

    pub fn value_at(&self, t: usize) -> Rat {
        if t < self.prefix.len() {
            return self.prefix[t].clone();
        }
        match &self.tail {
            Tail::Zero => Rat::zero(),
            Tail::Geometric { first, ratio } => first * pow_u(ratio, t - self.prefix.len()),
        }
    }

    /// True when the infinite absolute sum is finite.
    pub fn is_summable(&self) -> bool {
        match &self.tail {
            Tail::Zero => true,
            Tail::Geometric { first, ratio } => first.is_zero() || ratio.abs() < Rat::one(),
        }
    }

    /// Exact `sum_{t >= h} |value_at(t)|`; `None` when the tail diverges.
    pub fn abs_tail_sum(&self, h: usize) -> Option<Rat> {
        let mut sum = Rat::zero();
        for t in h..self.prefix.len() {
            sum += self.prefix[t].abs();
        }
        match &self.tail {
            Tail::Zero => Some(sum),
            Tail::Geometric { first, ratio } => {
                if first.is_zero() {
                    return Some(sum);
                }
                let r = ratio.abs();
                if r >= Rat::one() {
                    return None;
                }
                let k0 = h.saturating_sub(self.prefix.len());
                Some(sum + first.abs() * pow_u(&r, k0) / (Rat::one() - r))
            }
        }
    }

    fn tail_coeffs(&self) -> (Rat, Rat) {
        match &self.tail {
            Tail::Zero => (Rat::zero(), Rat::zero()),
            Tail::Geometric { first, ratio } => (first.clone(), ratio.clone()),
        }
    }

    /// Geometric generator of the tail re-based at index `t >= tail_start`:
    /// value_at(t + k) = coeff * ratio^k.
    pub fn tail_generator_at(&self, t: usize) -> (Rat, Rat) {
        debug_assert!(t >= self.tail_start());
        let (first, ratio) = self.tail_coeffs();
        (first * pow_u(&ratio, t - self.tail_start()), ratio)
    }

    /// True when every tail value satisfies `v >= 0`.
    pub fn tail_all_nonneg(&self) -> bool {
        let (first, ratio) = self.tail_coeffs();
        first.is_zero() || (!first.is_negative() && !ratio.is_negative())
    }

    /// True when every tail value satisfies `v <= 0`.
    pub fn tail_all_nonpos(&self) -> bool {
        let (first, ratio) = self.tail_coeffs();
        first.is_zero() || (!first.is_positive() && !ratio.is_negative())
    }

    /// True when every tail value satisfies `v > 0`.
    pub fn tail_all_pos(&self) -> bool {
        let (first, ratio) = self.tail_coeffs();
        first.is_positive() && ratio.is_positive()
    }

    /// True when every tail value satisfies `v < 0`.
    pub fn tail_all_neg(&self) -> bool {
        let (first, ratio) = self.tail_coeffs();
        first.is_negative() && ratio.is_positive()
    }

    /// Smallest tail index whose value is negative, if any.
    pub fn first_tail_negative(&self) -> Option<usize> {
        let l = self.tail_start();
        // Tail signs have period at most 2, so two samples decide.
        for t in l..l + 2 {
            if self.value_at(t).is_negative() {
                return Some(t);
            }
        }
        if self.tail_all_nonneg() {
            None
        } else {
            // Unreachable for |ratio| <= 1 tails: a sign violation shows
            // up within the first two tail indices.
            unreachable!("tail sign pattern has period <= 2")
        }
    }

    /// Least `T` with `value_at(t) <= 0` for all `t >= T`.
    pub fn nonpos_from(&self) -> Option<usize> {
        if !self.tail_all_nonpos() {
            return None;
        }
        let mut t = self.prefix.len();
        while t > 0 && !self.prefix[t - 1].is_positive() {
            t -= 1;
        }
        Some(t)
    }

    /// Least `T` with `value_at(t) < 0` for all `t >= T`.
    pub fn neg_from(&self) -> Option<usize> {
        if !self.tail_all_neg() {
            return None;
        }
        let mut t = self.prefix.len();
        while t > 0 && self.prefix[t - 1].is_negative() {
            t -= 1;
        }
        Some(t)
    }

    /// Largest `T` with `value_at(t) > 0` for all `t <= T`; `None` when
    /// `value_at(0) <= 0` or when the positive run never ends.
    pub fn positive_run_end(&self) -> Option<usize> {
        if !self.value_at(0).is_positive() {
            return None;
        }
        if self.tail_all_pos() {
            let all_prefix_pos = self.prefix.iter().all(|v| v.is_positive());
            if all_prefix_pos {
                return None; // run is infinite
            }
        }
        let mut t = 0usize;
        // A non-positive value exists; it appears in the prefix or within
        // the first two tail indices.
        loop {
            if !self.value_at(t + 1).is_positive() {
                return Some(t);
            }
            t += 1;
            debug_assert!(t <= self.prefix.len() + 2);
        }
    }

    /// Checks `value_at(t) <= 0` for every `t >= from` with `t % 2 == parity`.
    pub fn all_nonpos_on_parity(&self, parity: usize, from: usize) -> Result<(), IndexWitness> {
        for (t, v) in self.prefix.iter().enumerate() {
            if t >= from && t % 2 == parity && v.is_positive() {
                return Err(IndexWitness(t));
            }
        }
        // Along a fixed parity class the tail scales by ratio^2 >= 0, so
        // its sign is constant; one sample decides.
        let l = self.tail_start();
        let mut t = l.max(from);
        if t % 2 != parity {
            t += 1;
        }
        if self.value_at(t).is_positive() {
            return Err(IndexWitness(t));
        }
        Ok(())
    }

    /// Strict sign alternation with no zeros from index 1 onward.
    pub fn strictly_alternating_from_one(&self) -> bool {
        match &self.tail {
            Tail::Zero => return false,
            Tail::Geometric { first, ratio } => {
                if first.is_zero() || !ratio.is_negative() {
                    return false;
                }
            }
        }
        // Pointwise pairs cover the prefix and the prefix/tail seam; the
        // tail alternates internally because its ratio is negative.
        for t in 1..=self.prefix.len().max(1) {
            let cur = self.value_at(t);
            let next = self.value_at(t + 1);
            if cur.is_zero() || next.is_zero() {
                return false;
            }
            if cur.is_positive() == next.is_positive() {
                return false;
            }
        }
        true
    }
}

/// Decides `A r1^k + B r2^k {>, >=} 0` for every `k >= 0`, returning the
/// smallest violating `k` otherwise. Requires `|r1|, |r2| <= 1`.
pub fn geom_pair_sign_ok(a: &Rat, r1: &Rat, b: &Rat, r2: &Rat, strict: bool) -> Result<(), usize> {
    let ok = |v: &Rat| {
        if strict {
            v.is_positive()
        } else {
            !v.is_negative()
        }
    };
    let value = |k: usize| a * pow_u(r1, k) + b * pow_u(r2, k);
    // The first two points, checked directly; afterwards zero-ratio terms
    // have vanished.
    for k in 0..2 {
        if !ok(&value(k)) {
            return Err(k);
        }
    }
    let a2 = a * r1 * r1;
    let b2 = b * r2 * r2;
    let shifted = geom_pair_sign_ok_nozero(&a2, r1, &b2, r2, strict);
    shifted.map_err(|k| k + 2)
}

// Same decision with the guarantee that zero-ratio terms carry zero
// coefficients.
fn geom_pair_sign_ok_nozero(
    a: &Rat,
    r1: &Rat,
    b: &Rat,
    r2: &Rat,
    strict: bool,
) -> Result<(), usize> {
    let ok = |v: &Rat| {
        if strict {
            v.is_positive()
        } else {
            !v.is_negative()
        }
    };
    let value = |k: usize| a * pow_u(r1, k) + b * pow_u(r2, k);
    if a.is_zero() && b.is_zero() {
        return if strict { Err(0) } else { Ok(()) };
    }
    if a.is_zero() || b.is_zero() {
        let (coef, ratio) = if a.is_zero() { (b, r2) } else { (a, r1) };
        if coef.is_negative() {
            return Err(0);
        }
        if ratio.is_negative() {
            return Err(1); // coef > 0 here, so the sign flips at k = 1
        }
        if strict && (coef.is_zero() || ratio.is_zero()) {
            return Err(if coef.is_zero() { 0 } else { 1 });
        }
        return Ok(());
    }
    if r1.abs() == r2.abs() {
        // g(k+2) = r^2 g(k): the sign pattern has period 2.
        for k in 0..2 {
            if !ok(&value(k)) {
                return Err(k);
            }
        }
        if strict && r1.is_zero() {
            return Err(1);
        }
        return Ok(());
    }
    let (dom, dom_r) = if r1.abs() > r2.abs() { (a, r1) } else { (b, r2) };
    // Walk until the larger-ratio term dominates in magnitude; from there
    // its sign decides everything.
    let mut k = 0usize;
    loop {
        let dom_mag = (dom * pow_u(dom_r, k)).abs();
        let sub_mag = (value(k) - dom * pow_u(dom_r, k)).abs();
        if dom_mag > sub_mag {
            break;
        }
        if !ok(&value(k)) {
            return Err(k);
        }
        k += 1;
        assert!(k <= 100_000, "geometric dominance search did not converge");
    }
    if dom_r.is_negative() {
        // The dominant term alternates in sign.
        let neg_k = if (dom * pow_u(dom_r, k)).is_negative() {
            k
        } else {
            k + 1
        };
        return Err(neg_k);
    }
    if dom.is_negative() {
        return Err(k);
    }
    Ok(())
}
