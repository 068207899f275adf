//! Compensated (Neumaier) summation.
//!
//! The engine sums thousands of terms spanning ~300 orders of magnitude;
//! a running compensation term keeps the accumulated rounding at the level
//! of one ulp of the final sum regardless of summation length. The pair
//! (sum, compensation) is also halved exactly when the step size halves,
//! which is what makes the level-refinement recurrence reproduce a fresh
//! summation to within a couple of ulps.

/// Kahan–Babuška–Neumaier accumulator.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.compensation += (self.sum - t) + v;
        } else {
            self.compensation += (v - t) + self.sum;
        }
        self.sum = t;
    }

    /// Collapse to a single f64.
    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}
