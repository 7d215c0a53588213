//! Separable Gaussian smoothing of 8-bit RGB images.

use rayon::prelude::*;

use crate::border::reflect101;
use crate::{Error, Result, RgbImage};

/// Kernel size and standard deviation. `sigma == 0` derives sigma from the
/// kernel size.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianSpec {
    kernel_size: usize,
    sigma: f64,
}

impl GaussianSpec {
    pub fn new(kernel_size: usize, sigma: f64) -> Result<Self> {
        if kernel_size == 0 || kernel_size.is_multiple_of(2) {
            return Err(Error::InvalidKernelSize(kernel_size));
        }
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sigma must be finite and non-negative, got {sigma}"
            )));
        }
        Ok(Self { kernel_size, sigma })
    }

    pub fn kernel_size(&self) -> usize {
        self.kernel_size
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// The sigma actually used to sample the kernel.
    pub fn effective_sigma(&self) -> f64 {
        if self.sigma > 0.0 {
            self.sigma
        } else {
            0.3 * ((self.kernel_size as f64 - 1.0) / 2.0 - 1.0) + 0.8
        }
    }
}

impl Default for GaussianSpec {
    fn default() -> Self {
        Self {
            kernel_size: 3,
            sigma: 0.0,
        }
    }
}

/// Normalized 1-D Gaussian kernel.
///
/// `(3, 0)` is the fixed binomial kernel `[0.25, 0.5, 0.25]`.
pub fn gaussian_kernel(spec: &GaussianSpec) -> Vec<f64> {
    let k = spec.kernel_size;
    if k == 1 {
        return vec![1.0];
    }
    if k == 3 && spec.sigma == 0.0 {
        return vec![0.25, 0.5, 0.25];
    }
    let sigma = spec.effective_sigma();
    let radius = (k / 2) as isize;
    let raw: Vec<f64> = (-radius..=radius)
        .map(|i| (-((i * i) as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    let sum: f64 = raw.iter().sum();
    raw.into_iter().map(|g| g / sum).collect()
}

fn round_to_u8(v: f64) -> u8 {
    v.round().clamp(0.0, 255.0) as u8
}

/// Blurs each channel horizontally then vertically with reflect-101 borders,
/// accumulating in `f64` and rounding half away from zero back to bytes.
///
/// Rows are processed in parallel; the per-pixel arithmetic is fixed so the
/// result does not depend on the thread count.
pub fn gaussian_blur_rgb(img: &RgbImage, spec: &GaussianSpec) -> RgbImage {
    if spec.kernel_size() == 1 {
        return img.clone();
    }
    let kernel = gaussian_kernel(spec);
    let radius = (kernel.len() / 2) as isize;
    let (w, h) = img.dims();
    let src = img.as_raw();

    let mut horizontal = vec![0.0f64; 3 * w * h];
    horizontal
        .par_chunks_mut(3 * w)
        .enumerate()
        .for_each(|(y, row)| {
            let line = &src[3 * w * y..3 * w * (y + 1)];
            for x in 0..w {
                let mut acc = [0.0f64; 3];
                for (j, kv) in kernel.iter().enumerate() {
                    let sx = reflect101(x as isize + j as isize - radius, w);
                    for c in 0..3 {
                        acc[c] += kv * line[3 * sx + c] as f64;
                    }
                }
                row[3 * x..3 * x + 3].copy_from_slice(&acc);
            }
        });

    let mut out = vec![0u8; 3 * w * h];
    out.par_chunks_mut(3 * w).enumerate().for_each(|(y, row)| {
        for (i, dst) in row.iter_mut().enumerate() {
            let mut acc = 0.0f64;
            for (j, kv) in kernel.iter().enumerate() {
                let sy = reflect101(y as isize + j as isize - radius, h);
                acc += kv * horizontal[3 * w * sy + i];
            }
            *dst = round_to_u8(acc);
        }
    });
    RgbImage::new(w, h, out).expect("dimensions preserved")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn spec(k: usize, sigma: f64) -> GaussianSpec {
        GaussianSpec::new(k, sigma).unwrap()
    }

    #[test]
    fn rejects_even_and_zero_kernels() {
        assert!(matches!(
            GaussianSpec::new(4, 0.0),
            Err(Error::InvalidKernelSize(4))
        ));
        assert!(matches!(
            GaussianSpec::new(0, 1.0),
            Err(Error::InvalidKernelSize(0))
        ));
        assert!(GaussianSpec::new(3, -1.0).is_err());
        assert!(GaussianSpec::new(3, f64::NAN).is_err());
    }

    #[test]
    fn pinned_kernels() {
        assert_eq!(gaussian_kernel(&spec(3, 0.0)), vec![0.25, 0.5, 0.25]);
        assert_eq!(gaussian_kernel(&spec(1, 0.0)), vec![1.0]);
    }

    #[test]
    fn five_tap_unit_sigma() {
        // exp(-i²/2) for i = -2..2, normalized
        let raw = [
            (-2.0f64).exp(),
            (-0.5f64).exp(),
            1.0,
            (-0.5f64).exp(),
            (-2.0f64).exp(),
        ];
        let sum: f64 = raw.iter().sum();
        let k = gaussian_kernel(&spec(5, 1.0));
        for (got, r) in k.iter().zip(raw) {
            assert!((got - r / sum).abs() < 1e-12);
        }
        for (got, want) in k.iter().zip([0.0545, 0.2442, 0.4026, 0.2442, 0.0545]) {
            assert!((got - want).abs() < 1e-3);
        }
    }

    #[test]
    fn derived_sigma() {
        assert!((spec(5, 0.0).effective_sigma() - 1.1).abs() < 1e-12);
        assert!((spec(7, 0.0).effective_sigma() - 1.4).abs() < 1e-12);
    }

    #[test]
    fn constant_images_unchanged() {
        let img = RgbImage::filled(7, 5, [100, 100, 100]).unwrap();
        assert_eq!(gaussian_blur_rgb(&img, &spec(3, 0.0)), img);
        assert_eq!(gaussian_blur_rgb(&img, &spec(9, 2.5)), img);
    }

    #[test]
    fn identity_kernel() {
        let img = RgbImage::from_fn(4, 3, |x, y| [x as u8 * 60, y as u8 * 90, 17]).unwrap();
        assert_eq!(gaussian_blur_rgb(&img, &spec(1, 0.0)), img);
    }

    #[test]
    fn impulse_in_open_field() {
        // 5x5 so that reflect-101 never mirrors the impulse into its own ring
        let img = RgbImage::from_fn(
            5,
            5,
            |x, y| {
                if (x, y) == (2, 2) {
                    [255; 3]
                } else {
                    [0; 3]
                }
            },
        )
        .unwrap();
        let out = gaussian_blur_rgb(&img, &spec(3, 0.0));
        assert_eq!(out.pixel(2, 2), [64; 3]); // 255·0.25 = 63.75
        assert_eq!(out.pixel(1, 2), [32; 3]); // 255·0.125 = 31.875
        assert_eq!(out.pixel(2, 3), [32; 3]);
        assert_eq!(out.pixel(1, 1), [16; 3]); // 255·0.0625 = 15.9375
        assert_eq!(out.pixel(0, 0), [0; 3]);
    }

    #[test]
    fn impulse_in_three_by_three() {
        // With reflect-101 the centre is its own mirror image on every side,
        // so each row/column sees it twice at weight 0.25 or once at 0.5.
        let img = RgbImage::from_fn(
            3,
            3,
            |x, y| {
                if (x, y) == (1, 1) {
                    [255; 3]
                } else {
                    [0; 3]
                }
            },
        )
        .unwrap();
        let out = gaussian_blur_rgb(&img, &spec(3, 0.0));
        assert!(out.pixels().all(|p| p == [64; 3]));
    }

    proptest! {
        #[test]
        fn kernel_symmetric_and_normalized(half in 0usize..8, sigma in 0.0f64..5.0) {
            let k = gaussian_kernel(&spec(2 * half + 1, sigma));
            prop_assert!((k.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            for i in 0..k.len() {
                prop_assert_eq!(k[i], k[k.len() - 1 - i]);
            }
        }

        #[test]
        fn constant_preserved(c in any::<u8>(), w in 1usize..9, h in 1usize..9) {
            let img = RgbImage::filled(w, h, [c, c / 2, 255 - c]).unwrap();
            prop_assert_eq!(gaussian_blur_rgb(&img, &spec(5, 1.3)), img);
        }
    }
}
