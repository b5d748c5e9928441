//! Small numerical helpers shared across the sectors.

use alloc::vec::Vec;
#[allow(unused_imports)] // float methods when std is absent
use num_traits::Float;

/// Neumaier-compensated running sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

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

pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut acc = CompensatedSum::new();
    for v in values {
        acc.add(v);
    }
    acc.value()
}

/// Table of `ln k!` for `k = 0..=n`.
#[derive(Clone, Debug)]
pub struct LnFactorials(Vec<f64>);

impl LnFactorials {
    pub fn up_to(n: usize) -> Self {
        let mut table = Vec::with_capacity(n + 1);
        let mut acc = CompensatedSum::new();
        table.push(0.0);
        for k in 1..=n {
            acc.add((k as f64).ln());
            table.push(acc.value());
        }
        Self(table)
    }

    pub fn ln_factorial(&self, k: usize) -> f64 {
        self.0[k]
    }

    /// `ln C(n, k)`; `-inf` outside `0 <= k <= n`.
    pub fn ln_binomial(&self, n: usize, k: usize) -> f64 {
        if k > n {
            return f64::NEG_INFINITY;
        }
        self.0[n] - self.0[k] - self.0[n - k]
    }
}

/// Smallest eigenvalue of the symmetric matrix `[[a, b], [b, c]]`.
pub fn min_eigenvalue_2x2(a: f64, b: f64, c: f64) -> f64 {
    let half_trace = 0.5 * (a + c);
    let radius = (0.25 * (a - c) * (a - c) + b * b).sqrt();
    let upper = half_trace + radius;
    let det = a * c - b * b;
    // det / upper avoids the cancellation in half_trace - radius when the
    // matrix is strongly squeezed.
    if upper > 0.0 && half_trace > 0.0 {
        det / upper
    } else {
        half_trace - radius
    }
}

const BERNOULLI_EVEN: [f64; 9] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
];

/// Hurwitz zeta `ζ(s, a) = Σ_{k≥0} (a + k)^{-s}` for `s > 1`, `a > 0`, by
/// Euler–Maclaurin summation.
pub fn hurwitz_zeta(s: f64, a: f64) -> f64 {
    debug_assert!(s > 1.0 && a > 0.0);
    const HEAD: usize = 16;
    let mut acc = CompensatedSum::new();
    for k in 0..HEAD {
        acc.add((a + k as f64).powf(-s));
    }
    let x = a + HEAD as f64;
    acc.add(x.powf(1.0 - s) / (s - 1.0));
    acc.add(0.5 * x.powf(-s));
    // rising factorial s (s+1) ... (s + 2j - 2) over (2j)!
    let mut rising = s;
    let mut factorial = 2.0;
    let mut power = x.powf(-s - 1.0);
    for (j, b) in BERNOULLI_EVEN.iter().enumerate() {
        acc.add(b / factorial * rising * power);
        let order = 2.0 * (j + 1) as f64;
        rising *= (s + order - 1.0) * (s + order);
        factorial *= (order + 1.0) * (order + 2.0);
        power /= x * x;
    }
    acc.value()
}

/// Composite Simpson rule on `[a, b]` with `intervals` (rounded up to even)
/// sub-intervals.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, intervals: usize) -> f64 {
    let n = intervals.max(2) + intervals % 2;
    let h = (b - a) / n as f64;
    let mut acc = CompensatedSum::new();
    acc.add(f(a));
    acc.add(f(b));
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc.add(w * f(a + h * k as f64));
    }
    acc.value() * h / 3.0
}
