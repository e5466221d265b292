//! Continuous piecewise-linear functions through a list of knots, extended
//! linearly beyond the first and last knot.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(f64, f64)>", into = "Vec<(f64, f64)>")]
pub struct PiecewiseLinear {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

const ZERO_TOL: f64 = 1e-12;

impl PiecewiseLinear {
    /// Builds an increasing function with `f(0) = 0` from `(x, y)` knots.
    pub fn new(knots: &[(f64, f64)]) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::InvalidSpec(
                "piecewise-linear function needs at least two knots".into(),
            ));
        }
        if knots.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(Error::InvalidSpec("knots must be finite".into()));
        }
        for w in knots.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::InvalidSpec(
                    "knot abscissae must be strictly increasing".into(),
                ));
            }
            if w[1].1 < w[0].1 {
                return Err(Error::InvalidSpec(
                    "piecewise-linear function must be increasing".into(),
                ));
            }
        }
        let f = PiecewiseLinear {
            xs: knots.iter().map(|k| k.0).collect(),
            ys: knots.iter().map(|k| k.1).collect(),
        };
        let at_zero = f.eval(0.0);
        if at_zero.abs() > ZERO_TOL {
            return Err(Error::InvalidSpec(format!(
                "piecewise-linear function has f(0) = {at_zero}, expected 0"
            )));
        }
        Ok(f)
    }

    pub fn knots(&self) -> Vec<(f64, f64)> {
        self.xs
            .iter()
            .copied()
            .zip(self.ys.iter().copied())
            .collect()
    }

    fn slope(&self, i: usize) -> f64 {
        (self.ys[i + 1] - self.ys[i]) / (self.xs[i + 1] - self.xs[i])
    }

    /// Slopes of the segments, including the two extrapolated tails.
    pub fn slopes(&self) -> Vec<f64> {
        (0..self.xs.len() - 1).map(|i| self.slope(i)).collect()
    }

    pub fn left_slope(&self) -> f64 {
        self.slope(0)
    }

    pub fn right_slope(&self) -> f64 {
        self.slope(self.xs.len() - 2)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let k = self.xs.len();
        if x <= self.xs[0] {
            return self.ys[0] + self.left_slope() * (x - self.xs[0]);
        }
        if x >= self.xs[k - 1] {
            return self.ys[k - 1] + self.right_slope() * (x - self.xs[k - 1]);
        }
        let i = self.xs.partition_point(|&a| a <= x) - 1;
        self.ys[i] + self.slope(i) * (x - self.xs[i])
    }

    /// Slope of the segment on which `x` lies, taking the right segment at
    /// a knot.
    pub fn slope_right_of(&self, x: f64) -> f64 {
        let i = self.xs.partition_point(|&a| a <= x);
        self.slope(i.saturating_sub(1).min(self.xs.len() - 2))
    }

    /// Slope of the segment ending at `x` (left derivative).
    pub fn slope_left_of(&self, x: f64) -> f64 {
        let i = self.xs.partition_point(|&a| a < x);
        self.slope(i.saturating_sub(1).min(self.xs.len() - 2))
    }

    pub fn is_convex(&self) -> bool {
        self.slopes().windows(2).all(|w| w[1] >= w[0] - ZERO_TOL)
    }

    pub fn is_concave(&self) -> bool {
        self.slopes().windows(2).all(|w| w[1] <= w[0] + ZERO_TOL)
    }

    /// Whether `f(x)/x` is nonincreasing on `(0, ∞)`. On a segment starting
    /// at knot `a > 0` the ratio is `s + (f(a) - s a)/x`, monotone with the
    /// sign of the intercept.
    pub fn ratio_nonincreasing_on_positives(&self) -> bool {
        self.xs
            .iter()
            .zip(&self.ys)
            .filter(|(x, _)| **x > 0.0)
            .all(|(&a, &fa)| self.slope_right_of(a) <= fa / a + ZERO_TOL)
    }

    /// Whether `f(x)/x` is nondecreasing on `(0, ∞)`.
    pub fn ratio_nondecreasing_on_positives(&self) -> bool {
        self.xs
            .iter()
            .zip(&self.ys)
            .filter(|(x, _)| **x > 0.0)
            .all(|(&a, &fa)| self.slope_right_of(a) >= fa / a - ZERO_TOL)
    }

    /// Whether `f(x)/x` is nonincreasing on `(-∞, 0)`.
    pub fn ratio_nonincreasing_on_negatives(&self) -> bool {
        self.xs
            .iter()
            .zip(&self.ys)
            .filter(|(x, _)| **x < 0.0)
            .all(|(&b, &fb)| self.slope_left_of(b) >= fb / b - ZERO_TOL)
    }

    /// Whether `f(x)/x` is nondecreasing on `(-∞, 0)`.
    pub fn ratio_nondecreasing_on_negatives(&self) -> bool {
        self.xs
            .iter()
            .zip(&self.ys)
            .filter(|(x, _)| **x < 0.0)
            .all(|(&b, &fb)| self.slope_left_of(b) <= fb / b + ZERO_TOL)
    }

    /// `f(x) >= x` everywhere; checked at the knots and on the tails.
    pub fn dominates_identity(&self) -> bool {
        self.left_slope() <= 1.0 + ZERO_TOL
            && self.right_slope() >= 1.0 - ZERO_TOL
            && self
                .xs
                .iter()
                .zip(&self.ys)
                .all(|(x, y)| *y >= *x - ZERO_TOL)
    }

    /// `f(x) > 0` for every `x > 0`.
    pub fn positive_on_positives(&self) -> bool {
        self.slope_right_of(0.0) > 0.0
    }

    /// `f(x) = 0` for every `x <= 0`.
    pub fn vanishes_on_negatives(&self) -> bool {
        self.left_slope() == 0.0 && self.ys[0].abs() <= ZERO_TOL
    }
}

impl TryFrom<Vec<(f64, f64)>> for PiecewiseLinear {
    type Error = Error;

    fn try_from(knots: Vec<(f64, f64)>) -> Result<Self> {
        PiecewiseLinear::new(&knots)
    }
}

impl From<PiecewiseLinear> for Vec<(f64, f64)> {
    fn from(f: PiecewiseLinear) -> Self {
        f.knots()
    }
}
