//! Grayscale erosion, dilation, opening and closing with a square
//! structuring element and replicate borders.
//!
//! With replicate borders the min/max over the clamped window equals the
//! min/max over the window restricted to the image, so erosion and dilation
//! stay an adjunction on the finite grid and opening/closing keep their
//! lattice properties (idempotent, anti-extensive/extensive) at the edges.

use rayon::prelude::*;

use crate::border::replicate;
use crate::{Error, PlaneF32, Result};

/// Full `size × size` square neighborhood.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StructuringElement {
    size: usize,
}

impl StructuringElement {
    pub fn square(size: usize) -> Result<Self> {
        if size == 0 || size.is_multiple_of(2) {
            return Err(Error::InvalidKernelSize(size));
        }
        Ok(Self { size })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    fn radius(&self) -> isize {
        (self.size / 2) as isize
    }
}

impl Default for StructuringElement {
    fn default() -> Self {
        Self { size: 3 }
    }
}

/// Square min/max filters are separable: a row pass then a column pass.
fn rank_filter(plane: &PlaneF32, se: &StructuringElement, pick: fn(f32, f32) -> f32) -> PlaneF32 {
    let (w, h) = plane.dims();
    let r = se.radius();
    if r == 0 {
        return plane.clone();
    }
    let src = plane.data();

    let mut rows = vec![0.0f32; w * h];
    rows.par_chunks_mut(w).enumerate().for_each(|(y, out)| {
        let line = &src[y * w..(y + 1) * w];
        for (x, o) in out.iter_mut().enumerate() {
            let mut acc = line[x];
            for d in -r..=r {
                acc = pick(acc, line[replicate(x as isize + d, w)]);
            }
            *o = acc;
        }
    });

    let mut out = vec![0.0f32; w * h];
    out.par_chunks_mut(w).enumerate().for_each(|(y, line)| {
        for (x, o) in line.iter_mut().enumerate() {
            let mut acc = rows[y * w + x];
            for d in -r..=r {
                acc = pick(acc, rows[replicate(y as isize + d, h) * w + x]);
            }
            *o = acc;
        }
    });
    PlaneF32::from_parts(w, h, out)
}

pub fn erode(plane: &PlaneF32, se: &StructuringElement) -> PlaneF32 {
    rank_filter(plane, se, f32::min)
}

pub fn dilate(plane: &PlaneF32, se: &StructuringElement) -> PlaneF32 {
    rank_filter(plane, se, f32::max)
}

/// Erosion followed by dilation; removes bright features smaller than `se`.
pub fn open(plane: &PlaneF32, se: &StructuringElement) -> PlaneF32 {
    dilate(&erode(plane, se), se)
}

/// Dilation followed by erosion; fills dark holes smaller than `se`.
pub fn close(plane: &PlaneF32, se: &StructuringElement) -> PlaneF32 {
    erode(&dilate(plane, se), se)
}
