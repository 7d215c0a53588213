//! Dice similarity coefficient and intersection-over-union for binary masks.

use crate::{BinaryMask, Error, PlaneF32, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub fp: u64,
    pub fn_: u64,
    pub tn: u64,
}

impl ConfusionCounts {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn
    }
}

impl std::ops::Add for ConfusionCounts {
    type Output = ConfusionCounts;

    fn add(self, o: Self) -> Self {
        ConfusionCounts {
            tp: self.tp + o.tp,
            fp: self.fp + o.fp,
            fn_: self.fn_ + o.fn_,
            tn: self.tn + o.tn,
        }
    }
}

impl std::iter::Sum for ConfusionCounts {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::default(), |a, b| a + b)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricReport {
    pub dsc: f64,
    pub iou: f64,
    pub counts: ConfusionCounts,
}

impl MetricReport {
    pub fn from_counts(counts: ConfusionCounts) -> Self {
        Self {
            dsc: dsc(&counts),
            iou: iou(&counts),
            counts,
        }
    }
}

pub fn confusion(pred: &BinaryMask, truth: &BinaryMask) -> Result<ConfusionCounts> {
    if pred.dims() != truth.dims() {
        return Err(Error::mismatch(pred.dims(), truth.dims()));
    }
    let mut c = ConfusionCounts::default();
    for (&p, &t) in pred.data().iter().zip(truth.data()) {
        match (p, t) {
            (true, true) => c.tp += 1,
            (true, false) => c.fp += 1,
            (false, true) => c.fn_ += 1,
            (false, false) => c.tn += 1,
        }
    }
    Ok(c)
}

/// `2·tp / (2·tp + fp + fn)`; 1.0 when both masks are empty.
pub fn dsc(c: &ConfusionCounts) -> f64 {
    let denom = 2 * c.tp + c.fp + c.fn_;
    if denom == 0 {
        1.0
    } else {
        (2 * c.tp) as f64 / denom as f64
    }
}

/// `tp / (tp + fp + fn)`; 1.0 when both masks are empty.
pub fn iou(c: &ConfusionCounts) -> f64 {
    let denom = c.tp + c.fp + c.fn_;
    if denom == 0 {
        1.0
    } else {
        c.tp as f64 / denom as f64
    }
}

/// `plane > thr` pointwise.
pub fn binarize(plane: &PlaneF32, thr: f32) -> BinaryMask {
    let data = plane.data().iter().map(|&v| v > thr).collect();
    BinaryMask::new(plane.width(), plane.height(), data).expect("same dimensions as plane")
}

pub fn evaluate(pred: &BinaryMask, truth: &BinaryMask) -> Result<MetricReport> {
    confusion(pred, truth).map(MetricReport::from_counts)
}

/// One report per threshold, in the given order.
pub fn sweep(
    plane: &PlaneF32,
    truth: &BinaryMask,
    thresholds: &[f32],
) -> Result<Vec<(f32, MetricReport)>> {
    if plane.dims() != truth.dims() {
        return Err(Error::mismatch(plane.dims(), truth.dims()));
    }
    thresholds
        .iter()
        .map(|&t| Ok((t, evaluate(&binarize(plane, t), truth)?)))
        .collect()
}

/// Mean of per-item DSC and IoU.
pub fn macro_average(reports: &[MetricReport]) -> Option<(f64, f64)> {
    if reports.is_empty() {
        return None;
    }
    let n = reports.len() as f64;
    Some((
        reports.iter().map(|r| r.dsc).sum::<f64>() / n,
        reports.iter().map(|r| r.iou).sum::<f64>() / n,
    ))
}

/// DSC and IoU of the pooled confusion counts.
pub fn micro_average(reports: &[MetricReport]) -> MetricReport {
    MetricReport::from_counts(reports.iter().map(|r| r.counts).sum())
}
