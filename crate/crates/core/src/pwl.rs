//! Piecewise-linear concave functions on `[0, b]`, represented by their
//! breakpoints. All operations needed by the dynamic program (evaluation,
//! running prefix maximum, affine-clamp composition) are closed over this
//! class and exact.

use crate::rational::Rat;
use num::{Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PwlConcaveFn {
    /// `(x, value)` pairs; x strictly increasing, first at 0, last at b.
    points: Vec<(Rat, Rat)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PwlError {
    #[error("breakpoints must start at 0 and be strictly increasing")]
    BadBreakpoints,
    #[error("segment slopes must be nonincreasing (concavity)")]
    NotConcave,
    #[error("evaluation point {x} outside the domain")]
    OutOfDomain { x: Rat },
}

impl PwlConcaveFn {
    /// Builds from breakpoints, merging collinear segments. Validates
    /// monotone x, domain start at 0, and concavity.
    pub fn new(points: Vec<(Rat, Rat)>) -> Result<Self, PwlError> {
        if points.is_empty() || !points[0].0.is_zero() {
            return Err(PwlError::BadBreakpoints);
        }
        for w in points.windows(2) {
            if w[0].0 >= w[1].0 {
                return Err(PwlError::BadBreakpoints);
            }
        }
        let f = Self { points }.normalized();
        if !f.is_concave() {
            return Err(PwlError::NotConcave);
        }
        Ok(f)
    }

    /// The constant zero function on `[0, b]`.
    pub fn zero(b: &Rat) -> Self {
        Self {
            points: vec![(Rat::zero(), Rat::zero()), (b.clone(), Rat::zero())],
        }
    }

    /// The linear function `x -> slope * x` on `[0, b]`.
    pub fn linear(slope: &Rat, b: &Rat) -> Self {
        Self {
            points: vec![(Rat::zero(), Rat::zero()), (b.clone(), slope * b)],
        }
    }

    pub fn breakpoints(&self) -> &[(Rat, Rat)] {
        &self.points
    }

    pub fn domain_end(&self) -> &Rat {
        &self.points.last().unwrap().0
    }

    fn normalized(mut self) -> Self {
        if self.points.len() < 3 {
            return self;
        }
        let mut out: Vec<(Rat, Rat)> = Vec::with_capacity(self.points.len());
        for pt in self.points.drain(..) {
            while out.len() >= 2 {
                let n = out.len();
                let (x0, y0) = &out[n - 2];
                let (x1, y1) = &out[n - 1];
                // Middle point collinear with its neighbors?
                let lhs = (y1 - y0) * (&pt.0 - x1);
                let rhs = (&pt.1 - y1) * (x1 - x0);
                if lhs == rhs {
                    out.pop();
                } else {
                    break;
                }
            }
            out.push(pt);
        }
        Self { points: out }
    }

    pub fn segment_slopes(&self) -> Vec<Rat> {
        self.points
            .windows(2)
            .map(|w| (&w[1].1 - &w[0].1) / (&w[1].0 - &w[0].0))
            .collect()
    }

    /// Slope monotonicity over the breakpoints — the checkable face of
    /// concavity.
    pub fn is_concave(&self) -> bool {
        let slopes = self.segment_slopes();
        slopes.windows(2).all(|w| w[0] >= w[1])
    }

    /// Linear interpolation on the containing segment.
    pub fn eval(&self, x: &Rat) -> Result<Rat, PwlError> {
        if x.is_negative() || x > self.domain_end() {
            return Err(PwlError::OutOfDomain { x: x.clone() });
        }
        // The x coordinates are sorted; find the segment containing x.
        let idx = match self.points.binary_search_by(|(bx, _)| bx.cmp(x)) {
            Ok(i) => return Ok(self.points[i].1.clone()),
            Err(i) => i - 1, // i >= 1 because points[0].0 = 0 <= x
        };
        let (x0, y0) = &self.points[idx];
        let (x1, y1) = &self.points[idx + 1];
        Ok(y0 + (y1 - y0) * (x - x0) / (x1 - x0))
    }

    /// Smallest maximizer over the whole domain together with the maximum
    /// value. For a concave PWL function this is the breakpoint where the
    /// slope first becomes nonpositive.
    pub fn smallest_maximizer(&self) -> (Rat, Rat) {
        let slopes = self.segment_slopes();
        for (i, s) in slopes.iter().enumerate() {
            if !s.is_positive() {
                return self.points[i].clone();
            }
        }
        self.points.last().unwrap().clone()
    }

    /// The running maximum `M(u) = max_{y in [0, u]} f(y)`: equals `f` up
    /// to the smallest maximizer, then constant. Concave and nondecreasing.
    pub fn prefix_max(&self) -> Self {
        let (x_star, v_star) = self.smallest_maximizer();
        let mut pts: Vec<(Rat, Rat)> = self
            .points
            .iter()
            .take_while(|(x, _)| *x < x_star)
            .cloned()
            .collect();
        pts.push((x_star.clone(), v_star.clone()));
        if x_star < *self.domain_end() {
            pts.push((self.domain_end().clone(), v_star));
        }
        Self { points: pts }.normalized()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};

    fn tent() -> PwlConcaveFn {
        // Peak at (1/2, 1) on [0, 1].
        PwlConcaveFn::new(vec![
            (rat_int(0), rat_int(0)),
            (rat(1, 2), rat_int(1)),
            (rat_int(1), rat_int(0)),
        ])
        .unwrap()
    }

    #[test]
    fn eval_examples() {
        let id = PwlConcaveFn::linear(&rat_int(1), &rat_int(1));
        assert_eq!(id.eval(&rat(1, 4)).unwrap(), rat(1, 4));
        let t = tent();
        assert_eq!(t.eval(&rat(1, 2)).unwrap(), rat_int(1)); // breakpoint hit
        assert_eq!(t.eval(&rat(3, 4)).unwrap(), rat(1, 2));
        let z = PwlConcaveFn::zero(&rat_int(1));
        assert_eq!(z.eval(&rat(2, 3)).unwrap(), rat_int(0));
        assert!(z.eval(&rat_int(2)).is_err());
    }

    #[test]
    fn prefix_max_cases() {
        let id = PwlConcaveFn::linear(&rat_int(1), &rat_int(1));
        assert_eq!(id.prefix_max(), id);

        let down = PwlConcaveFn::linear(&rat_int(-1), &rat_int(1));
        assert_eq!(down.prefix_max(), PwlConcaveFn::zero(&rat_int(1)));

        let m = tent().prefix_max();
        assert_eq!(m.eval(&rat(1, 4)).unwrap(), rat(1, 2));
        assert_eq!(m.eval(&rat(3, 4)).unwrap(), rat_int(1));
        assert_eq!(m.eval(&rat_int(1)).unwrap(), rat_int(1));
        assert!(m.is_concave());
    }

    #[test]
    fn prefix_max_matches_dense_sampling() {
        let f = PwlConcaveFn::new(vec![
            (rat_int(0), rat(-1, 2)),
            (rat(1, 3), rat(1, 4)),
            (rat(2, 3), rat(1, 3)),
            (rat_int(1), rat(-2, 1)),
        ])
        .unwrap();
        let m = f.prefix_max();
        for k in 0..=24 {
            let u = rat(k, 24);
            let mut best = f.eval(&rat_int(0)).unwrap();
            for j in 0..=k {
                let y = rat(j, 24);
                let v = f.eval(&y).unwrap();
                if v > best {
                    best = v;
                }
            }
            assert_eq!(m.eval(&u).unwrap(), best, "at u = {u}");
        }
    }

    #[test]
    fn smallest_maximizer_prefers_left_end_of_flat_top() {
        let f = PwlConcaveFn::new(vec![
            (rat_int(0), rat_int(0)),
            (rat(1, 4), rat_int(1)),
            (rat(3, 4), rat_int(1)),
            (rat_int(1), rat(1, 2)),
        ])
        .unwrap();
        assert_eq!(f.smallest_maximizer(), (rat(1, 4), rat_int(1)));
    }

    #[test]
    fn collinear_breakpoints_merge() {
        let f = PwlConcaveFn::new(vec![
            (rat_int(0), rat_int(0)),
            (rat(1, 2), rat(1, 2)),
            (rat_int(1), rat_int(1)),
        ])
        .unwrap();
        assert_eq!(f.breakpoints().len(), 2);
    }

    #[test]
    fn non_concave_rejected() {
        let r = PwlConcaveFn::new(vec![
            (rat_int(0), rat_int(0)),
            (rat(1, 2), rat(-1, 2)),
            (rat_int(1), rat_int(1)),
        ]);
        assert_eq!(r, Err(PwlError::NotConcave));
    }
}
