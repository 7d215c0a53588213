//! End-to-end guide-map generation.
//!
//! 1. Gaussian blur of the RGB patch.
//! 2. CIELAB and HSV conversion of the blurred patch.
//! 3. Otsu threshold `t` on the A channel; `x_a' = max(A − t, 0)`.
//! 4. `x_a'' = x_a' · L / l_divisor`.
//! 5. Opening then closing of `x_a''`.
//! 6. `x_a''' = x_a'' · V · v_gain`.
//! 7. Min-max normalization into `[0, 1]`.
//!
//! The L and V scale factors only change the map by a uniform positive
//! factor before normalization, so they do not affect the guide.

use crate::color::{rgb_to_hsv, rgb_to_lab, HsvImage, LabImage};
use crate::filters::{gaussian_blur_rgb, GaussianSpec};
use crate::morphology::{close, open, StructuringElement};
use crate::threshold::{histogram256, otsu_threshold, subtract_clamp};
use crate::{Error, PlaneF32, Result, RgbImage};

/// Sentinel threshold recorded when Otsu finds no valid split.
pub const DEGENERATE_THRESHOLD: i32 = -1;

/// Scale factors applied to L and V before they multiply the heat-map.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntensityScaling {
    l_divisor: f32,
    v_gain: f32,
}

impl IntensityScaling {
    pub fn new(l_divisor: f32, v_gain: f32) -> Result<Self> {
        for (name, v) in [("l_divisor", l_divisor), ("v_gain", v_gain)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be finite and positive, got {v}"
                )));
            }
        }
        Ok(Self { l_divisor, v_gain })
    }

    /// L in `[0, 255]` and V in `[0, 255]`.
    pub fn raw() -> Self {
        Self {
            l_divisor: 1.0,
            v_gain: 255.0,
        }
    }

    pub fn l_divisor(&self) -> f32 {
        self.l_divisor
    }

    pub fn v_gain(&self) -> f32 {
        self.v_gain
    }
}

/// L divided by 255 and V kept in `[0, 1]`.
impl Default for IntensityScaling {
    fn default() -> Self {
        Self {
            l_divisor: 255.0,
            v_gain: 1.0,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct PipelineConfig {
    pub blur: GaussianSpec,
    pub morph: StructuringElement,
    /// Fixed threshold used instead of Otsu when set.
    pub threshold_override: Option<u8>,
    pub emit_stages: bool,
    pub scaling: IntensityScaling,
}

/// Every intermediate of one pipeline run.
#[derive(Clone, Debug, PartialEq)]
pub struct PipelineStages {
    pub x_rgb_blurred: RgbImage,
    pub x_lab: LabImage,
    pub x_hsv: HsvImage,
    pub x_a: PlaneF32,
    pub t: i32,
    pub x_a_prime: PlaneF32,
    pub x_a_dprime_pre_morph: PlaneF32,
    pub x_a_dprime: PlaneF32,
    pub x_a_tprime: PlaneF32,
    pub guide: PlaneF32,
}

/// Heat-map stages computed from the L, A and V planes.
#[derive(Clone, Debug, PartialEq)]
pub struct HeatmapStages {
    pub x_a_prime: PlaneF32,
    pub x_a_dprime_pre_morph: PlaneF32,
    pub x_a_dprime: PlaneF32,
    pub x_a_tprime: PlaneF32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GuideMap {
    pub guide: PlaneF32,
    /// Threshold applied to the A channel, or `-1` for a degenerate histogram.
    pub threshold: i32,
    pub stages: Option<PipelineStages>,
}

/// The RGB patch paired with its guide as a fourth channel.
#[derive(Clone, Debug, PartialEq)]
pub struct GuidedPatch {
    rgb: RgbImage,
    guide: PlaneF32,
}

impl GuidedPatch {
    pub fn rgb(&self) -> &RgbImage {
        &self.rgb
    }

    pub fn guide(&self) -> &PlaneF32 {
        &self.guide
    }

    pub fn dims(&self) -> (usize, usize) {
        self.rgb.dims()
    }

    /// Channels-last `H × W × 4` tensor with RGB scaled to `[0, 1]`.
    pub fn to_hwc_f32(&self) -> Vec<f32> {
        let mut out = Vec::with_capacity(4 * self.guide.data().len());
        for (px, &g) in self.rgb.pixels().zip(self.guide.data()) {
            out.extend(px.iter().map(|&c| c as f32 / 255.0));
            out.push(g);
        }
        out
    }
}

/// `(v − min) / (max − min)`; a constant plane maps to all zeros.
pub fn min_max_normalize(plane: &PlaneF32) -> PlaneF32 {
    let (lo, hi) = plane.min_max();
    let (w, h) = plane.dims();
    if hi <= lo {
        return PlaneF32::from_parts(w, h, vec![0.0; w * h]);
    }
    let (lo, span) = (lo as f64, hi as f64 - lo as f64);
    let data = plane
        .data()
        .iter()
        .map(|&v| ((v as f64 - lo) / span) as f32)
        .collect();
    PlaneF32::from_parts(w, h, data)
}

pub fn multiply_planes(a: &PlaneF32, b: &PlaneF32) -> Result<PlaneF32> {
    if a.dims() != b.dims() {
        return Err(Error::mismatch(a.dims(), b.dims()));
    }
    let data = a.data().iter().zip(b.data()).map(|(x, y)| x * y).collect();
    PlaneF32::new(a.width(), a.height(), data)
}

fn scaled(plane: &PlaneF32, factor: f32) -> Result<PlaneF32> {
    plane.map(|v| v * factor)
}

/// Steps 3–6 on already converted planes: subtract-clamp `a` by `t`, scale
/// by `l`, open then close, scale by `v`.
pub fn build_heatmap(
    l: &PlaneF32,
    a: &PlaneF32,
    v: &PlaneF32,
    t: f32,
    morph: &StructuringElement,
    scaling: &IntensityScaling,
) -> Result<HeatmapStages> {
    for other in [l, v] {
        if other.dims() != a.dims() {
            return Err(Error::mismatch(a.dims(), other.dims()));
        }
    }
    let x_a_prime = subtract_clamp(a, t);
    let lightness = if scaling.l_divisor == 1.0 {
        l.clone()
    } else {
        scaled(l, 1.0 / scaling.l_divisor)?
    };
    let x_a_dprime_pre_morph = multiply_planes(&x_a_prime, &lightness)?;
    let x_a_dprime = close(&open(&x_a_dprime_pre_morph, morph), morph);
    let value = if scaling.v_gain == 1.0 {
        v.clone()
    } else {
        scaled(v, scaling.v_gain)?
    };
    let x_a_tprime = multiply_planes(&x_a_dprime, &value)?;
    Ok(HeatmapStages {
        x_a_prime,
        x_a_dprime_pre_morph,
        x_a_dprime,
        x_a_tprime,
    })
}

/// Runs the full pipeline on one RGB patch.
///
/// A chroma-constant A channel (single-bin histogram) yields an all-zero
/// guide with threshold `-1` instead of an error.
pub fn generate_guide_map(img: &RgbImage, cfg: &PipelineConfig) -> GuideMap {
    let blurred = gaussian_blur_rgb(img, &cfg.blur);
    let lab = rgb_to_lab(&blurred);
    let hsv = rgb_to_hsv(&blurred);
    let (w, h) = img.dims();

    let threshold = match cfg.threshold_override {
        Some(t) => i32::from(t),
        None => {
            let hist = histogram256(&lab.a).expect("A channel is clamped to [0, 255]");
            match otsu_threshold(&hist) {
                Ok(r) => i32::from(r.threshold),
                Err(_) => DEGENERATE_THRESHOLD,
            }
        }
    };

    let heat = if threshold == DEGENERATE_THRESHOLD {
        let zeros = PlaneF32::from_parts(w, h, vec![0.0; w * h]);
        HeatmapStages {
            x_a_prime: zeros.clone(),
            x_a_dprime_pre_morph: zeros.clone(),
            x_a_dprime: zeros.clone(),
            x_a_tprime: zeros,
        }
    } else {
        build_heatmap(
            &lab.l,
            &lab.a,
            &hsv.v,
            threshold as f32,
            &cfg.morph,
            &cfg.scaling,
        )
        .expect("planes share dimensions and stay finite")
    };
    let guide = min_max_normalize(&heat.x_a_tprime);

    let stages = cfg.emit_stages.then(|| PipelineStages {
        x_rgb_blurred: blurred,
        x_a: lab.a.clone(),
        x_lab: lab,
        x_hsv: hsv,
        t: threshold,
        x_a_prime: heat.x_a_prime,
        x_a_dprime_pre_morph: heat.x_a_dprime_pre_morph,
        x_a_dprime: heat.x_a_dprime,
        x_a_tprime: heat.x_a_tprime,
        guide: guide.clone(),
    });
    GuideMap {
        guide,
        threshold,
        stages,
    }
}

/// Pairs the original (un-blurred) RGB patch with its guide.
pub fn assemble_guided(img: &RgbImage, guide: &PlaneF32) -> Result<GuidedPatch> {
    if img.dims() != guide.dims() {
        return Err(Error::mismatch(img.dims(), guide.dims()));
    }
    guide.check_range(0.0, 1.0)?;
    Ok(GuidedPatch {
        rgb: img.clone(),
        guide: guide.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn plane(w: usize, data: &[f32]) -> PlaneF32 {
        PlaneF32::new(w, data.len() / w, data.to_vec()).unwrap()
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(
            min_max_normalize(&plane(3, &[2.0, 4.0, 6.0])).data(),
            &[0.0, 0.5, 1.0]
        );
        assert!(min_max_normalize(&plane(2, &[7.0, 7.0]))
            .data()
            .iter()
            .all(|&v| v == 0.0));
    }

    #[test]
    fn multiply_examples() {
        let a = plane(2, &[1.0, 2.0]);
        assert_eq!(multiply_planes(&a, &plane(2, &[1.0, 1.0])).unwrap(), a);
        assert_eq!(
            multiply_planes(&a, &plane(2, &[0.0, 0.0])).unwrap().data(),
            &[0.0, 0.0]
        );
        assert_eq!(
            multiply_planes(&a, &plane(2, &[3.0, 4.0])).unwrap().data(),
            &[3.0, 8.0]
        );
        assert!(matches!(
            multiply_planes(&a, &plane(1, &[1.0, 2.0])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn gray_image_is_degenerate() {
        let img = RgbImage::filled(16, 16, [120, 120, 120]).unwrap();
        let cfg = PipelineConfig {
            emit_stages: true,
            ..Default::default()
        };
        let out = generate_guide_map(&img, &cfg);
        assert_eq!(out.threshold, -1);
        assert!(out.guide.data().iter().all(|&v| v == 0.0));
        assert_eq!(out.stages.unwrap().t, -1);
    }

    #[test]
    fn stages_only_when_requested() {
        let img = RgbImage::from_fn(8, 8, |x, _| {
            if x < 4 {
                [200, 40, 50]
            } else {
                [230, 210, 220]
            }
        })
        .unwrap();
        assert!(generate_guide_map(&img, &PipelineConfig::default())
            .stages
            .is_none());
    }

    #[test]
    fn red_half_lights_up() {
        let img = RgbImage::from_fn(24, 24, |x, _| {
            if x < 12 {
                [180, 30, 40]
            } else {
                [235, 200, 220]
            }
        })
        .unwrap();
        let cfg = PipelineConfig {
            emit_stages: true,
            ..Default::default()
        };
        let out = generate_guide_map(&img, &cfg);
        assert!(out.threshold > 128);
        assert_eq!(out.guide.min_max(), (0.0, 1.0));
        assert!(out.guide.get(2, 5) > 0.9);
        assert_eq!(out.guide.get(20, 5), 0.0);
        let s = out.stages.unwrap();
        assert_eq!(s.guide, out.guide);
        for (heat, a) in s.x_a_prime.data().iter().zip(s.x_a.data()) {
            assert_eq!(*heat > 0.0, *a > s.t as f32);
        }
    }

    #[test]
    fn threshold_override_is_used() {
        let img = RgbImage::from_fn(8, 8, |x, _| {
            if x < 4 {
                [200, 40, 50]
            } else {
                [230, 210, 220]
            }
        })
        .unwrap();
        let cfg = PipelineConfig {
            threshold_override: Some(10),
            ..Default::default()
        };
        assert_eq!(generate_guide_map(&img, &cfg).threshold, 10);
        // the override bypasses the degenerate path too
        let gray = RgbImage::filled(8, 8, [50, 50, 50]).unwrap();
        let cfg = PipelineConfig {
            threshold_override: Some(0),
            ..Default::default()
        };
        let out = generate_guide_map(&gray, &cfg);
        assert_eq!(out.threshold, 0);
        assert!(out.guide.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn assemble_checks() {
        let rgb = RgbImage::filled(4, 4, [1, 2, 3]).unwrap();
        let ok = assemble_guided(&rgb, &PlaneF32::filled(4, 4, 0.25).unwrap()).unwrap();
        assert_eq!(ok.dims(), (4, 4));
        assert_eq!(
            &ok.to_hwc_f32()[..4],
            &[1.0 / 255.0, 2.0 / 255.0, 3.0 / 255.0, 0.25]
        );
        assert!(matches!(
            assemble_guided(&rgb, &PlaneF32::zeros(4, 3).unwrap()),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            assemble_guided(&rgb, &PlaneF32::filled(4, 4, 1.5).unwrap()),
            Err(Error::Range { .. })
        ));
    }

    #[test]
    fn scaling_validation() {
        assert!(IntensityScaling::new(0.0, 1.0).is_err());
        assert!(IntensityScaling::new(1.0, f32::INFINITY).is_err());
        assert!(IntensityScaling::new(3.0, 0.5).is_ok());
    }

    proptest! {
        #[test]
        fn normalize_is_idempotent(values in proptest::collection::vec(-50.0f32..50.0, 2..30)) {
            let p = PlaneF32::new(values.len(), 1, values).unwrap();
            let once = min_max_normalize(&p);
            prop_assert_eq!(min_max_normalize(&once), once.clone());
            let (lo, hi) = once.min_max();
            prop_assert!(lo >= 0.0 && hi <= 1.0);
        }

        #[test]
        fn more_red_never_lowers_the_pixel(
            (w, h, l, a, v) in (1usize..8, 1usize..8).prop_flat_map(|(w, h)| {
                let n = w * h;
                (
                    Just(w),
                    Just(h),
                    proptest::collection::vec(0.0f32..255.0, n),
                    proptest::collection::vec(0.0f32..255.0, n),
                    proptest::collection::vec(0.0f32..1.0, n),
                )
            }),
            pick in any::<prop::sample::Index>(),
            bump in 0.0f32..100.0,
            t in 0u8..255,
        ) {
            let i = pick.index(w * h);
            let l = PlaneF32::new(w, h, l).unwrap();
            let v = PlaneF32::new(w, h, v).unwrap();
            let a0 = PlaneF32::new(w, h, a.clone()).unwrap();
            let mut a1 = a;
            a1[i] += bump;
            let a1 = PlaneF32::new(w, h, a1).unwrap();
            let se = StructuringElement::default();
            let sc = IntensityScaling::default();
            let before = build_heatmap(&l, &a0, &v, t as f32, &se, &sc).unwrap();
            let after = build_heatmap(&l, &a1, &v, t as f32, &se, &sc).unwrap();
            prop_assert!(after.x_a_tprime.data()[i] >= before.x_a_tprime.data()[i]);
        }
    }
}
