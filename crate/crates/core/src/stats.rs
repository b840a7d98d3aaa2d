//! Confidence intervals and order-independent accumulation.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Two-sided 97.5% standard normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Wilson score interval at 95% for `successes` out of `trials`.
pub fn confidence_interval(successes: u64, trials: u64) -> Result<Interval> {
    if trials == 0 {
        return domain("confidence interval needs at least one trial");
    }
    if successes > trials {
        return domain(format!("{successes} successes out of {trials} trials"));
    }
    let n = trials as f64;
    let phat = successes as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let center = (phat + z2 / (2.0 * n)) / denom;
    let half = Z95 / denom * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt();
    Ok(Interval {
        lo: (center - half).max(0.0),
        hi: (center + half).min(1.0),
    })
}

/// Sample mean with a normal-approximation 95% interval.
pub fn mean_ci(samples: &[f64]) -> Result<(f64, Interval)> {
    if samples.is_empty() {
        return domain("mean of zero samples");
    }
    let n = samples.len() as f64;
    let mean = NeumaierSum::of(samples.iter().copied()) / n;
    let half = if samples.len() > 1 {
        let ss = NeumaierSum::of(samples.iter().map(|x| (x - mean) * (x - mean)));
        Z95 * (ss / (n - 1.0) / n).sqrt()
    } else {
        0.0
    };
    Ok((
        mean,
        Interval {
            lo: mean - half,
            hi: mean + half,
        },
    ))
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }

    pub fn of(xs: impl IntoIterator<Item = f64>) -> f64 {
        let mut s = NeumaierSum::default();
        xs.into_iter().for_each(|x| s.add(x));
        s.value()
    }
}
