//! Simple random samples and l-cycle MinRSSU samples.
//!
//! A one-cycle MinRSSU sample of size `m` draws `m` independent sets of sizes
//! `1, 2, ..., m` and keeps only the minimum of each set (ranking is assumed
//! perfect). Repeating the cycle `l` times yields `n = m·l` recorded values.
//!
//! Stream consumption is fixed: cycles in order, set sizes ascending within a
//! cycle, and the `i` draws of a set consecutively. One cycle therefore
//! consumes `m(m+1)/2` uniforms, and a seed fully determines the sample.

use alloc::vec::Vec;
use core::ops::Deref;

use rand_core::RngCore;

use crate::distributions::ParametricDistribution;
use crate::error::{parameter, Error, Result};

/// Values sorted in ascending order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct OrderStatistics(Vec<f64>);

impl OrderStatistics {
    /// Sorts `values`; NaNs are rejected.
    pub fn from_unsorted(mut values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::Domain("sample contains NaN".into()));
        }
        values.sort_unstable_by(f64::total_cmp);
        Ok(Self(values))
    }

    /// Wraps values that are already ascending.
    pub fn from_sorted(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::Domain("sample contains NaN".into()));
        }
        if values.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Domain("values are not in ascending order".into()));
        }
        Ok(Self(values))
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

impl Deref for OrderStatistics {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// An l-cycle MinRSSU sample.
///
/// Entry `(cycle j, set size i)` is the minimum of `i` fresh draws; its
/// survival function is `F̄ⁱ`.
#[derive(Debug, Clone, PartialEq)]
pub struct MinRssuSample {
    m: usize,
    l: usize,
    // cycle-major: values[(j - 1) * m + (i - 1)]
    values: Vec<f64>,
}

impl MinRssuSample {
    /// Builds a sample from cycle-major values (`m` per cycle).
    pub fn from_values(m: usize, l: usize, values: Vec<f64>) -> Result<Self> {
        if m == 0 || l == 0 {
            return Err(parameter!("MinRSSU needs m >= 1 and l >= 1, got m={m}, l={l}"));
        }
        if values.len() != m * l {
            return Err(parameter!("expected m·l = {} values, got {}", m * l, values.len()));
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::Domain("sample contains NaN".into()));
        }
        Ok(Self { m, l, values })
    }

    /// Sets per cycle.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Number of cycles.
    pub fn l(&self) -> usize {
        self.l
    }

    /// Total number of recorded values, `m·l`.
    pub fn n(&self) -> usize {
        self.values.len()
    }

    /// Value for 1-based `cycle` and `set_size`.
    pub fn get(&self, cycle: usize, set_size: usize) -> Option<f64> {
        if cycle == 0 || cycle > self.l || set_size == 0 || set_size > self.m {
            return None;
        }
        Some(self.values[(cycle - 1) * self.m + (set_size - 1)])
    }

    /// Cycle-major raw values.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `(cycle, set_size, value)` triples in storage order, 1-based.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(k, &v)| (k / self.m + 1, k % self.m + 1, v))
    }

    /// All minima recorded for one set size, across cycles.
    pub fn set_minima(&self, set_size: usize) -> impl Iterator<Item = f64> + '_ {
        self.values
            .iter()
            .skip(set_size.wrapping_sub(1))
            .step_by(self.m)
            .take(if (1..=self.m).contains(&set_size) { self.l } else { 0 })
            .copied()
    }

    /// Pooled values `Y_(1) ≤ ... ≤ Y_(n)`.
    pub fn pooled_order_statistics(&self) -> OrderStatistics {
        let mut v = self.values.clone();
        v.sort_unstable_by(f64::total_cmp);
        OrderStatistics(v)
    }
}

/// `n` i.i.d. inverse-transform draws.
pub fn draw_srs<R: RngCore + ?Sized>(d: &ParametricDistribution, n: usize, rng: &mut R) -> Vec<f64> {
    d.sample(rng, n)
}

/// Draws an l-cycle MinRSSU sample, consuming exactly `l·m(m+1)/2` uniforms.
pub fn draw_minrssu<R: RngCore + ?Sized>(
    d: &ParametricDistribution,
    m: usize,
    l: usize,
    rng: &mut R,
) -> Result<MinRssuSample> {
    if m == 0 || l == 0 {
        return Err(parameter!("MinRSSU needs m >= 1 and l >= 1, got m={m}, l={l}"));
    }
    let mut values = Vec::with_capacity(m * l);
    for _cycle in 0..l {
        for set_size in 1..=m {
            let min = (0..set_size).map(|_| d.draw(rng)).fold(f64::INFINITY, f64::min);
            values.push(min);
        }
    }
    Ok(MinRssuSample { m, l, values })
}

/// `pooled_order_statistics` as a free function.
pub fn pooled_order_statistics(s: &MinRssuSample) -> OrderStatistics {
    s.pooled_order_statistics()
}
