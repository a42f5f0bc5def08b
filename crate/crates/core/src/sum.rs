//! Error-compensated summation of signed term lists.

/// Neumaier-compensated sum of `terms`, accumulated in order of descending
/// magnitude. Also returns Σ|t|, the scale of the rounding error.
pub fn compensated_sum(terms: &mut [f64]) -> (f64, f64) {
    terms.sort_unstable_by(|a, b| b.abs().total_cmp(&a.abs()));
    let mut acc = Neumaier::default();
    let mut abs_sum = 0.0;
    for &t in terms.iter() {
        acc.add(t);
        abs_sum += t.abs();
    }
    (acc.value(), abs_sum)
}

/// Running Neumaier (improved Kahan–Babuška) accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct Neumaier {
    sum: f64,
    carry: f64,
}

impl Neumaier {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}
