//! Seeded synthetic phantoms: red ellipses ("vessels") on a pink background
//! with Gaussian pixel noise, plus the exact ground-truth mask.
//!
//! Reproducibility: all randomness comes from one `ChaCha8Rng` seeded with
//! `seed_from_u64(spec.seed)`. Blob geometry is drawn first, blob by blob
//! (radii, angle, then centre per attempt). Noise is drawn afterwards from
//! `Normal(0, noise_sigma)` in row-major pixel order, R then G then B; no
//! noise samples are drawn when `noise_sigma == 0`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::{BinaryMask, Error, Result, RgbImage};

pub const MAX_PLACEMENT_ATTEMPTS: usize = 1000;
/// Minimum free space between the bounding circles of two blobs.
const BLOB_GAP: f64 = 2.0;

#[derive(Clone, Debug, PartialEq)]
pub struct PhantomSpec {
    pub width: usize,
    pub height: usize,
    pub n_blobs: usize,
    /// Inclusive semi-axis range in pixels.
    pub blob_radius_range: (usize, usize),
    pub blob_color: [u8; 3],
    pub background_color: [u8; 3],
    pub noise_sigma: f64,
    pub seed: u64,
}

impl Default for PhantomSpec {
    fn default() -> Self {
        Self {
            width: 512,
            height: 512,
            n_blobs: 6,
            blob_radius_range: (12, 40),
            blob_color: [180, 30, 40],
            background_color: [235, 200, 220],
            noise_sigma: 5.0,
            seed: 0,
        }
    }
}

impl PhantomSpec {
    pub fn validate(&self) -> Result<()> {
        let (rmin, rmax) = self.blob_radius_range;
        if self.width == 0 || self.height == 0 {
            return Err(Error::InvalidDimensions {
                width: self.width,
                height: self.height,
            });
        }
        if rmin < 1 || rmin > rmax {
            return Err(Error::InvalidParameter(format!(
                "blob radius range ({rmin}, {rmax}) must satisfy 1 <= min <= max"
            )));
        }
        if self.n_blobs > 0 && 2 * rmax + 1 > self.width.min(self.height) {
            return Err(Error::InvalidParameter(format!(
                "blob radius {rmax} does not fit in {}x{}",
                self.width, self.height
            )));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "noise sigma must be finite and non-negative, got {}",
                self.noise_sigma
            )));
        }
        Ok(())
    }
}

/// Rotated filled ellipse.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ellipse {
    pub cx: f64,
    pub cy: f64,
    pub rx: f64,
    pub ry: f64,
    pub angle: f64,
}

impl Ellipse {
    fn bounding_radius(&self) -> f64 {
        self.rx.max(self.ry)
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        let (s, c) = self.angle.sin_cos();
        let (dx, dy) = (x - self.cx, y - self.cy);
        let u = (dx * c + dy * s) / self.rx;
        let v = (-dx * s + dy * c) / self.ry;
        u * u + v * v <= 1.0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Phantom {
    pub image: RgbImage,
    pub mask: BinaryMask,
    pub blobs: Vec<Ellipse>,
}

fn place_blobs(spec: &PhantomSpec, rng: &mut ChaCha8Rng) -> Result<Vec<Ellipse>> {
    let (rmin, rmax) = spec.blob_radius_range;
    let mut blobs: Vec<Ellipse> = Vec::with_capacity(spec.n_blobs);
    for blob in 0..spec.n_blobs {
        let rx = rng.random_range(rmin..=rmax) as f64;
        let ry = rng.random_range(rmin..=rmax) as f64;
        let angle = rng.random_range(0.0..std::f64::consts::PI);
        let r = rx.max(ry);
        let mut placed = None;
        for _ in 0..MAX_PLACEMENT_ATTEMPTS {
            let cx = rng.random_range(r..=spec.width as f64 - 1.0 - r);
            let cy = rng.random_range(r..=spec.height as f64 - 1.0 - r);
            let candidate = Ellipse {
                cx,
                cy,
                rx,
                ry,
                angle,
            };
            let clear = blobs.iter().all(|b| {
                let d = (b.cx - cx).hypot(b.cy - cy);
                d > b.bounding_radius() + r + BLOB_GAP
            });
            if clear {
                placed = Some(candidate);
                break;
            }
        }
        blobs.push(placed.ok_or(Error::PlacementFailure {
            blob,
            attempts: MAX_PLACEMENT_ATTEMPTS,
        })?);
    }
    Ok(blobs)
}

/// Renders the phantom described by `spec`. Output is a pure function of
/// the spec.
pub fn generate_phantom(spec: &PhantomSpec) -> Result<Phantom> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let blobs = place_blobs(spec, &mut rng)?;

    let (w, h) = (spec.width, spec.height);
    let mut mask = BinaryMask::filled(w, h, false)?;
    for b in &blobs {
        let r = b.bounding_radius().ceil() as isize;
        let (cx, cy) = (b.cx.round() as isize, b.cy.round() as isize);
        for y in (cy - r).max(0)..=(cy + r).min(h as isize - 1) {
            for x in (cx - r).max(0)..=(cx + r).min(w as isize - 1) {
                if b.contains(x as f64, y as f64) {
                    mask.set(x as usize, y as usize, true);
                }
            }
        }
    }

    let noise = (spec.noise_sigma > 0.0)
        .then(|| Normal::new(0.0, spec.noise_sigma).expect("validated sigma"));
    let mut data = Vec::with_capacity(3 * w * h);
    for &inside in mask.data() {
        let base = if inside {
            spec.blob_color
        } else {
            spec.background_color
        };
        for c in base {
            let v = match &noise {
                Some(n) => (c as f64 + n.sample(&mut rng)).round().clamp(0.0, 255.0) as u8,
                None => c,
            };
            data.push(v);
        }
    }
    Ok(Phantom {
        image: RgbImage::new(w, h, data)?,
        mask,
        blobs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_blobs_is_uniform_background() {
        let spec = PhantomSpec {
            n_blobs: 0,
            noise_sigma: 0.0,
            width: 32,
            height: 16,
            ..Default::default()
        };
        let p = generate_phantom(&spec).unwrap();
        assert!(p.image.pixels().all(|px| px == spec.background_color));
        assert_eq!(p.mask.count(), 0);
    }

    #[test]
    fn circle_area_matches_pi_r_squared() {
        let spec = PhantomSpec {
            n_blobs: 1,
            blob_radius_range: (10, 10),
            noise_sigma: 0.0,
            width: 64,
            height: 64,
            seed: 3,
            ..Default::default()
        };
        let p = generate_phantom(&spec).unwrap();
        let area = p.mask.count() as f64;
        let ideal = std::f64::consts::PI * 100.0;
        assert!(area >= 0.9 * ideal && area <= 1.1 * ideal, "{area}");
        // mask pixels carry exactly the blob colour without noise
        for (px, &m) in p.image.pixels().zip(p.mask.data()) {
            assert_eq!(
                px,
                if m {
                    spec.blob_color
                } else {
                    spec.background_color
                }
            );
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let spec = PhantomSpec {
            width: 128,
            height: 128,
            blob_radius_range: (5, 15),
            seed: 7,
            ..Default::default()
        };
        let a = generate_phantom(&spec).unwrap();
        assert_eq!(a, generate_phantom(&spec).unwrap());
        let b = generate_phantom(&PhantomSpec { seed: 8, ..spec }).unwrap();
        assert_ne!(a.image, b.image);
    }

    #[test]
    fn blobs_do_not_touch() {
        let p = generate_phantom(&PhantomSpec::default()).unwrap();
        assert_eq!(p.blobs.len(), 6);
        for (i, a) in p.blobs.iter().enumerate() {
            for b in &p.blobs[i + 1..] {
                let d = (a.cx - b.cx).hypot(a.cy - b.cy);
                assert!(d > a.bounding_radius() + b.bounding_radius());
            }
        }
    }

    #[test]
    fn crowded_spec_fails_placement() {
        let spec = PhantomSpec {
            width: 30,
            height: 30,
            n_blobs: 5,
            blob_radius_range: (10, 10),
            ..Default::default()
        };
        assert!(matches!(
            generate_phantom(&spec),
            Err(Error::PlacementFailure { blob: 1, .. })
        ));
    }

    #[test]
    fn invalid_specs() {
        let base = PhantomSpec::default();
        for spec in [
            PhantomSpec {
                blob_radius_range: (0, 3),
                ..base.clone()
            },
            PhantomSpec {
                blob_radius_range: (5, 3),
                ..base.clone()
            },
            PhantomSpec {
                width: 20,
                blob_radius_range: (5, 10),
                ..base.clone()
            },
            PhantomSpec {
                noise_sigma: -1.0,
                ..base.clone()
            },
            PhantomSpec {
                width: 0,
                ..base.clone()
            },
        ] {
            assert!(generate_phantom(&spec).is_err(), "{spec:?}");
        }
    }
}
