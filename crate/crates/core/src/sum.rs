//! Compensated summation.

use crate::Real;

/// Kahan–Babuška (Neumaier) accumulator.
///
/// Also tracks Σ|xᵢ|, which divided by |Σxᵢ| is the cancellation ratio of
/// the sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum<F> {
    sum: F,
    compensation: F,
    abs_sum: F,
}

impl<F: Real> NeumaierSum<F> {
    pub fn new() -> Self {
        Self {
            sum: F::zero(),
            compensation: F::zero(),
            abs_sum: F::zero(),
        }
    }

    pub fn with_initial(x: F) -> Self {
        let mut s = Self::new();
        s.add(x);
        s
    }

    pub fn add(&mut self, x: F) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
        self.abs_sum += x.abs();
    }

    pub fn value(&self) -> F {
        self.sum + self.compensation
    }

    /// Σ|xᵢ| over everything added so far.
    pub fn abs_total(&self) -> F {
        self.abs_sum
    }

    /// Σ|xᵢ| / |Σxᵢ|; infinite when the sum is exactly zero.
    pub fn cancellation_ratio(&self) -> F {
        let v = self.value().abs();
        if v == F::zero() {
            F::infinity()
        } else {
            self.abs_sum / v
        }
    }
}

impl<F: Real> Extend<F> for NeumaierSum<F> {
    fn extend<I: IntoIterator<Item = F>>(&mut self, iter: I) {
        for x in iter {
            self.add(x);
        }
    }
}

impl<F: Real> FromIterator<F> for NeumaierSum<F> {
    fn from_iter<I: IntoIterator<Item = F>>(iter: I) -> Self {
        let mut s = Self::new();
        s.extend(iter);
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_small_terms_lost_by_naive_sum() {
        let xs = [1.0f64, 1e100, 1.0, -1e100];
        let naive: f64 = xs.iter().sum();
        let comp: NeumaierSum<f64> = xs.iter().copied().collect();
        assert_eq!(naive, 0.0);
        assert_eq!(comp.value(), 2.0);
    }

    #[test]
    fn cancellation_ratio() {
        let s: NeumaierSum<f64> = [3.0, -2.0].into_iter().collect();
        assert_eq!(s.cancellation_ratio(), 5.0);
        assert_eq!(s.abs_total(), 5.0);
    }
}
