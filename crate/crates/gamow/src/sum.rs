//! Compensated summation and the shared series truncation rule.

use crate::dd::Dd;

/// Series truncation parameters used by every infinite sum in the crate:
/// stop once three consecutive terms fall below 1e-16 of the running partial
/// sum in magnitude, with a hard cap of 500 terms.
pub(crate) const EPS_REL: f64 = 1e-16;
pub(crate) const CONSECUTIVE: u32 = 3;
pub(crate) const TERM_CAP: u32 = 500;

/// Tracks the stop condition. Feed it |term| and |partial| after each add.
#[derive(Default)]
pub(crate) struct Truncation {
    small_run: u32,
}

impl Truncation {
    pub fn new() -> Self {
        Truncation { small_run: 0 }
    }

    /// Returns true once the stop condition is met.
    pub fn converged(&mut self, term_mag: f64, partial_mag: f64) -> bool {
        if term_mag < EPS_REL * partial_mag {
            self.small_run += 1;
        } else {
            self.small_run = 0;
        }
        self.small_run >= CONSECUTIVE
    }
}

/// Neumaier variant of Kahan summation; the compensation also captures the
/// case where the incoming term is larger than the running sum.
#[derive(Clone, Copy, Default)]
pub(crate) struct NeumaierSum {
    s: f64,
    c: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        NeumaierSum { s: 0.0, c: 0.0 }
    }

    pub fn add(&mut self, x: f64) {
        let t = self.s + x;
        if self.s.abs() >= x.abs() {
            self.c += (self.s - t) + x;
        } else {
            self.c += (x - t) + self.s;
        }
        self.s = t;
    }

    pub fn value(&self) -> f64 {
        self.s + self.c
    }
}

/// Running magnitude statistics for cancellation diagnostics: the largest
/// |partial sum| seen (terms included as one-term partials) versus the final
/// result magnitude.
#[derive(Clone, Copy)]
pub(crate) struct PartialPeak {
    max: f64,
}

impl PartialPeak {
    pub fn new() -> Self {
        PartialPeak { max: 0.0 }
    }

    pub fn observe(&mut self, mag: f64) {
        if mag > self.max {
            self.max = mag;
        }
    }

    pub fn observe_dd(&mut self, v: Dd) {
        self.observe(v.hi.abs());
    }

    pub fn max(&self) -> f64 {
        self.max
    }
}
