//! Otsu threshold selection on an 8-bit histogram and heat-map extraction.

use num_bigint::BigUint;

use crate::{Error, PlaneF32, Result};

const RANGE_SLACK: f32 = 1e-6;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Histogram256 {
    counts: [u64; 256],
    total: u64,
}

impl Histogram256 {
    pub fn from_counts(counts: [u64; 256]) -> Self {
        let total = counts.iter().sum();
        Self { counts, total }
    }

    pub fn counts(&self) -> &[u64; 256] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// Combines histograms of disjoint shards.
    pub fn merge(&mut self, other: &Histogram256) {
        for (a, b) in self.counts.iter_mut().zip(other.counts.iter()) {
            *a += b;
        }
        self.total += other.total;
    }
}

/// Bins a `[0, 255]` plane: `bin = floor(v)`, with 255 landing in bin 255.
pub fn histogram256(plane: &PlaneF32) -> Result<Histogram256> {
    let mut counts = [0u64; 256];
    for (index, &v) in plane.data().iter().enumerate() {
        if !(-RANGE_SLACK..=255.0 + RANGE_SLACK).contains(&v) {
            return Err(Error::Range {
                index,
                value: v,
                min: 0.0,
                max: 255.0,
            });
        }
        counts[v.clamp(0.0, 255.0).floor() as usize] += 1;
    }
    Ok(Histogram256::from_counts(counts))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OtsuResult {
    /// Last bin of the background class (bins `<= threshold`).
    pub threshold: u8,
    pub between_class_variance: f64,
}

/// One candidate split, kept in exact integer form.
///
/// With `n0` pixels and intensity sum `s0` at or below the split, `N` and `S`
/// totals, the between-class variance is
/// `(s0·N − S·n0)² / (N² · n0 · n1)`.
struct Split {
    t: u8,
    numer: u128,
    denom: u128,
}

impl Split {
    fn approx(&self) -> f64 {
        (self.numer as f64) * (self.numer as f64) / self.denom as f64
    }

    /// Exact `self > other` on `numer²/denom`.
    fn exceeds(&self, other: &Split) -> bool {
        let (a, b) = (self.approx(), other.approx());
        let scale = a.max(b);
        if (a - b).abs() > scale * 1e-9 {
            return a > b;
        }
        let lhs = BigUint::from(self.numer).pow(2) * BigUint::from(other.denom);
        let rhs = BigUint::from(other.numer).pow(2) * BigUint::from(self.denom);
        lhs > rhs
    }
}

/// Otsu's method: the bin `t` maximizing `w0·w1·(μ0 − μ1)²` where class 0 is
/// bins `<= t`. Splits leaving a class empty are skipped and ties resolve to
/// the smallest `t`. Candidates are compared exactly, so scaled histograms
/// and symmetric ties behave deterministically.
pub fn otsu_threshold(hist: &Histogram256) -> Result<OtsuResult> {
    let total = hist.total as u128;
    let sum: u128 = hist
        .counts
        .iter()
        .enumerate()
        .map(|(i, &c)| i as u128 * c as u128)
        .sum();

    let mut best: Option<Split> = None;
    let (mut n0, mut s0) = (0u128, 0u128);
    for t in 0..255usize {
        n0 += hist.counts[t] as u128;
        s0 += t as u128 * hist.counts[t] as u128;
        let n1 = total - n0;
        if n0 == 0 || n1 == 0 {
            continue;
        }
        let candidate = Split {
            t: t as u8,
            numer: (s0 * total).abs_diff(sum * n0),
            denom: n0 * n1,
        };
        if best.as_ref().is_none_or(|b| candidate.exceeds(b)) {
            best = Some(candidate);
        }
    }

    let best = best.ok_or(Error::DegenerateHistogram)?;
    let n = total as f64;
    Ok(OtsuResult {
        threshold: best.t,
        between_class_variance: best.approx() / (n * n),
    })
}

/// `max(v − t, 0)` pointwise.
pub fn subtract_clamp(plane: &PlaneF32, t: f32) -> PlaneF32 {
    let data = plane.data().iter().map(|&v| (v - t).max(0.0)).collect();
    PlaneF32::from_parts(plane.width(), plane.height(), data)
}
