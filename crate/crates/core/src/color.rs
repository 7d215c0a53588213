//! sRGB → CIELAB (D65) and sRGB → HSV conversion.
//!
//! LAB planes use the 8-bit offset convention: `l = L*·255/100`,
//! `a = a* + 128`, `b = b* + 128`, all clamped to `[0, 255]`. This keeps the
//! green–red channel on the same scale as the 256-bin Otsu histogram.

use std::fmt;
use std::sync::OnceLock;

use crate::{Error, PlaneF32, Result, RgbImage};

/// D65 reference white.
pub const D65_WHITE: [f64; 3] = [0.95047, 1.0, 1.08883];

/// Linear sRGB → XYZ (D65).
const RGB_TO_XYZ: [[f64; 3]; 3] = [
    [0.4124564, 0.3575761, 0.1804375],
    [0.2126729, 0.7151522, 0.0721750],
    [0.0193339, 0.1191920, 0.9503041],
];

const LAB_EPSILON: f64 = 216.0 / 24389.0; // (6/29)^3 ≈ 0.008856

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Channel {
    L,
    A,
    B,
    H,
    S,
    V,
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Color images whose planes can be pulled out by name.
pub trait ChannelSource {
    fn extract_channel(&self, channel: Channel) -> Result<PlaneF32>;
}

#[derive(Clone, Debug, PartialEq)]
pub struct LabImage {
    pub l: PlaneF32,
    pub a: PlaneF32,
    pub b: PlaneF32,
}

impl LabImage {
    pub fn dims(&self) -> (usize, usize) {
        self.l.dims()
    }
}

impl ChannelSource for LabImage {
    fn extract_channel(&self, channel: Channel) -> Result<PlaneF32> {
        match channel {
            Channel::L => Ok(self.l.clone()),
            Channel::A => Ok(self.a.clone()),
            Channel::B => Ok(self.b.clone()),
            other => Err(Error::ChannelMismatch(other)),
        }
    }
}

/// Hue in degrees `[0, 360)`, saturation and value in `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct HsvImage {
    pub h: PlaneF32,
    pub s: PlaneF32,
    pub v: PlaneF32,
}

impl HsvImage {
    pub fn dims(&self) -> (usize, usize) {
        self.v.dims()
    }
}

impl ChannelSource for HsvImage {
    fn extract_channel(&self, channel: Channel) -> Result<PlaneF32> {
        match channel {
            Channel::H => Ok(self.h.clone()),
            Channel::S => Ok(self.s.clone()),
            Channel::V => Ok(self.v.clone()),
            other => Err(Error::ChannelMismatch(other)),
        }
    }
}

/// Inverse sRGB transfer function for a byte value.
pub fn srgb_to_linear(c: u8) -> f64 {
    let c = c as f64 / 255.0;
    if c <= 0.04045 {
        c / 12.92
    } else {
        ((c + 0.055) / 1.055).powf(2.4)
    }
}

fn linear_lut() -> &'static [f64; 256] {
    static LUT: OnceLock<[f64; 256]> = OnceLock::new();
    LUT.get_or_init(|| std::array::from_fn(|i| srgb_to_linear(i as u8)))
}

fn lab_f(t: f64) -> f64 {
    if t > LAB_EPSILON {
        t.cbrt()
    } else {
        // t / (3·δ²) + 4/29 with δ = 6/29
        t * (841.0 / 108.0) + 4.0 / 29.0
    }
}

/// Unscaled CIE `L*, a*, b*` of one sRGB pixel.
pub fn srgb_to_cielab(rgb: [u8; 3]) -> [f64; 3] {
    let lut = linear_lut();
    let lin = rgb.map(|c| lut[c as usize]);
    let xyz: [f64; 3] = std::array::from_fn(|row| {
        RGB_TO_XYZ[row]
            .iter()
            .zip(&lin)
            .map(|(m, c)| m * c)
            .sum::<f64>()
    });
    let f: [f64; 3] = std::array::from_fn(|i| lab_f(xyz[i] / D65_WHITE[i]));
    [
        116.0 * f[1] - 16.0,
        500.0 * (f[0] - f[1]),
        200.0 * (f[1] - f[2]),
    ]
}

/// One pixel in the 8-bit offset LAB convention.
pub fn lab_scaled(rgb: [u8; 3]) -> [f32; 3] {
    let [l, a, b] = srgb_to_cielab(rgb);
    [
        (l * 255.0 / 100.0).clamp(0.0, 255.0) as f32,
        (a + 128.0).clamp(0.0, 255.0) as f32,
        (b + 128.0).clamp(0.0, 255.0) as f32,
    ]
}

/// One pixel as `(h°, s, v)`.
pub fn hsv(rgb: [u8; 3]) -> [f32; 3] {
    let [r, g, b] = rgb;
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let v = max as f32 / 255.0;
    if max == 0 {
        return [0.0, 0.0, v];
    }
    let delta = (max - min) as f32;
    let s = delta / max as f32;
    if max == min {
        return [0.0, s, v];
    }
    let (r, g, b) = (r as f32, g as f32, b as f32);
    let sector = if max == rgb[0] {
        (g - b) / delta
    } else if max == rgb[1] {
        (b - r) / delta + 2.0
    } else {
        (r - g) / delta + 4.0
    };
    let mut h = 60.0 * sector;
    if h < 0.0 {
        h += 360.0;
    }
    if h >= 360.0 {
        h = 0.0;
    }
    [h, s, v]
}

fn split_planes(img: &RgbImage, f: impl Fn([u8; 3]) -> [f32; 3]) -> [PlaneF32; 3] {
    let n = img.width() * img.height();
    let mut planes = [
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
    ];
    for px in img.pixels() {
        let out = f(px);
        for (plane, v) in planes.iter_mut().zip(out) {
            plane.push(v);
        }
    }
    planes.map(|data| PlaneF32::from_parts(img.width(), img.height(), data))
}

pub fn rgb_to_lab(img: &RgbImage) -> LabImage {
    let [l, a, b] = split_planes(img, lab_scaled);
    LabImage { l, a, b }
}

pub fn rgb_to_hsv(img: &RgbImage) -> HsvImage {
    let [h, s, v] = split_planes(img, hsv);
    HsvImage { h, s, v }
}
