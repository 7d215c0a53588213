//! PNG and baseline TIFF decoding/encoding.

use std::fs::File;
use std::io::{BufWriter, Cursor, Read};
use std::path::Path;

use super::{BinaryMask, PlaneF32, RgbImage};
use crate::{Error, Result};

/// Samples of a decoded raster before any channel policy is applied.
struct Decoded {
    width: usize,
    height: usize,
    /// Color channels excluding alpha (1 or 3).
    colors: usize,
    has_alpha: bool,
    bit_depth: u8,
    samples: Vec<u16>,
}

impl Decoded {
    fn stride(&self) -> usize {
        self.colors + usize::from(self.has_alpha)
    }

    /// Iterates over the color samples of each pixel, alpha removed.
    fn color_pixels(&self) -> impl Iterator<Item = &[u16]> {
        let colors = self.colors;
        self.samples
            .chunks_exact(self.stride())
            .map(move |p| &p[..colors])
    }
}

pub(crate) fn read_file(path: &Path) -> Result<Vec<u8>> {
    let mut file = File::open(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::FileNotFound(path.to_path_buf()),
        _ => Error::Io(e),
    })?;
    let mut bytes = Vec::new();
    file.read_to_end(&mut bytes)?;
    Ok(bytes)
}

fn decode_file(path: &Path) -> Result<Decoded> {
    let bytes = read_file(path)?;
    if bytes.starts_with(b"\x89PNG\r\n\x1a\n") {
        decode_png(&bytes)
    } else if bytes.starts_with(b"II*\0") || bytes.starts_with(b"MM\0*") {
        decode_tiff(&bytes)
    } else {
        Err(Error::UnsupportedFormat(format!(
            "{}: not a PNG or TIFF file",
            path.display()
        )))
    }
}

fn decode_png(bytes: &[u8]) -> Result<Decoded> {
    let corrupt = |e: png::DecodingError| Error::CorruptImage(e.to_string());
    let mut decoder = png::Decoder::new(Cursor::new(bytes));
    decoder.set_transformations(png::Transformations::IDENTITY);
    let mut reader = decoder.read_info().map_err(corrupt)?;
    let (color, depth) = reader.output_color_type();
    let (colors, has_alpha) = match color {
        png::ColorType::Grayscale => (1, false),
        png::ColorType::GrayscaleAlpha => (1, true),
        png::ColorType::Rgb => (3, false),
        png::ColorType::Rgba => (3, true),
        png::ColorType::Indexed => {
            return Err(Error::UnsupportedFormat("palette PNG".into()));
        }
    };
    let bit_depth = match depth {
        png::BitDepth::Eight => 8,
        png::BitDepth::Sixteen => 16,
        other => {
            return Err(Error::UnsupportedFormat(format!(
                "PNG bit depth {}",
                other as u8
            )));
        }
    };
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| Error::CorruptImage("PNG too large".into()))?;
    let mut buf = vec![0u8; size];
    let info = reader.next_frame(&mut buf).map_err(corrupt)?;
    buf.truncate(info.buffer_size());
    let samples = if bit_depth == 8 {
        buf.into_iter().map(u16::from).collect()
    } else {
        buf.chunks_exact(2)
            .map(|b| u16::from_be_bytes([b[0], b[1]]))
            .collect()
    };
    Ok(Decoded {
        width: info.width as usize,
        height: info.height as usize,
        colors,
        has_alpha,
        bit_depth,
        samples,
    })
}

fn decode_tiff(bytes: &[u8]) -> Result<Decoded> {
    use tiff::decoder::DecodingResult;
    use tiff::ColorType;

    let corrupt = |e: tiff::TiffError| match e {
        tiff::TiffError::UnsupportedError(u) => Error::UnsupportedFormat(u.to_string()),
        other => Error::CorruptImage(other.to_string()),
    };
    let mut decoder = tiff::decoder::Decoder::new(Cursor::new(bytes)).map_err(corrupt)?;
    let (width, height) = decoder.dimensions().map_err(corrupt)?;
    let color = decoder.colortype().map_err(corrupt)?;
    let (colors, has_alpha, bit_depth) = match color {
        ColorType::Gray(d) => (1, false, d),
        ColorType::GrayA(d) => (1, true, d),
        ColorType::RGB(d) => (3, false, d),
        ColorType::RGBA(d) => (3, true, d),
        other => {
            return Err(Error::UnsupportedFormat(format!(
                "TIFF color type {other:?}"
            )));
        }
    };
    if bit_depth != 8 && bit_depth != 16 {
        return Err(Error::UnsupportedFormat(format!(
            "TIFF bit depth {bit_depth}"
        )));
    }
    let samples = match decoder.read_image().map_err(corrupt)? {
        DecodingResult::U8(v) => v.into_iter().map(u16::from).collect(),
        DecodingResult::U16(v) => v,
        _ => return Err(Error::UnsupportedFormat("TIFF sample format".into())),
    };
    let decoded = Decoded {
        width: width as usize,
        height: height as usize,
        colors,
        has_alpha,
        bit_depth,
        samples,
    };
    if decoded.samples.len() != decoded.width * decoded.height * decoded.stride() {
        return Err(Error::CorruptImage("TIFF sample count mismatch".into()));
    }
    Ok(decoded)
}

/// Loads an 8-bit RGB image from a PNG or baseline TIFF file.
///
/// Alpha is dropped and grayscale is replicated to three channels. Any bit
/// depth other than 8 and palette images are rejected.
pub fn load_rgb8(path: impl AsRef<Path>) -> Result<RgbImage> {
    let decoded = decode_file(path.as_ref())?;
    if decoded.bit_depth != 8 {
        return Err(Error::UnsupportedFormat(format!(
            "bit depth {} (expected 8)",
            decoded.bit_depth
        )));
    }
    let mut data = Vec::with_capacity(3 * decoded.width * decoded.height);
    for px in decoded.color_pixels() {
        match px {
            [g] => data.extend_from_slice(&[*g as u8; 3]),
            [r, g, b] => data.extend_from_slice(&[*r as u8, *g as u8, *b as u8]),
            _ => unreachable!(),
        }
    }
    RgbImage::new(decoded.width, decoded.height, data)
}

/// Loads a grayscale map as a plane scaled to `[0, 1]` (8-bit by /255,
/// 16-bit by /65535). Alpha is ignored; color images are rejected.
pub fn load_gray_plane(path: impl AsRef<Path>) -> Result<PlaneF32> {
    let decoded = decode_file(path.as_ref())?;
    if decoded.colors != 1 {
        return Err(Error::UnsupportedFormat(
            "expected a single-channel grayscale image".into(),
        ));
    }
    let scale = if decoded.bit_depth == 8 {
        255.0
    } else {
        65535.0
    };
    let data = decoded
        .color_pixels()
        .map(|p| p[0] as f32 / scale)
        .collect();
    PlaneF32::new(decoded.width, decoded.height, data)
}

/// Loads a mask image: a pixel is true when any of its color samples is
/// nonzero.
pub fn load_mask(path: impl AsRef<Path>) -> Result<BinaryMask> {
    let decoded = decode_file(path.as_ref())?;
    let data = decoded
        .color_pixels()
        .map(|p| p.iter().any(|&s| s != 0))
        .collect();
    BinaryMask::new(decoded.width, decoded.height, data)
}

fn write_png(
    path: &Path,
    width: usize,
    height: usize,
    color: png::ColorType,
    depth: png::BitDepth,
    data: &[u8],
) -> Result<()> {
    let encoding = |e: png::EncodingError| match e {
        png::EncodingError::IoError(io) => Error::Io(io),
        other => Error::InvalidParameter(other.to_string()),
    };
    let (w, h) = match (u32::try_from(width), u32::try_from(height)) {
        (Ok(w), Ok(h)) => (w, h),
        _ => return Err(Error::InvalidDimensions { width, height }),
    };
    let file = BufWriter::new(File::create(path)?);
    let mut encoder = png::Encoder::new(file, w, h);
    encoder.set_color(color);
    encoder.set_depth(depth);
    let mut writer = encoder.write_header().map_err(encoding)?;
    writer.write_image_data(data).map_err(encoding)?;
    writer.finish().map_err(encoding)
}

/// Quantizes a `[0, 1]` value onto `levels` with round-half-away-from-zero.
fn quantize_unit(v: f32, levels: f64) -> f64 {
    (v as f64 * levels).round()
}

/// Writes a `[0, 1]` plane as a 16-bit grayscale PNG, `round(v * 65535)`.
pub fn save_png_gray16(plane: &PlaneF32, path: impl AsRef<Path>) -> Result<()> {
    plane.check_range(0.0, 1.0)?;
    let bytes: Vec<u8> = plane
        .data()
        .iter()
        .flat_map(|&v| (quantize_unit(v, 65535.0) as u16).to_be_bytes())
        .collect();
    write_png(
        path.as_ref(),
        plane.width(),
        plane.height(),
        png::ColorType::Grayscale,
        png::BitDepth::Sixteen,
        &bytes,
    )
}

/// Writes the 4-channel preview: RGB plus `alpha = round(guide * 255)`.
pub fn save_rgba_guided(rgb: &RgbImage, guide: &PlaneF32, path: impl AsRef<Path>) -> Result<()> {
    if rgb.dims() != guide.dims() {
        return Err(Error::mismatch(rgb.dims(), guide.dims()));
    }
    guide.check_range(0.0, 1.0)?;
    let mut bytes = Vec::with_capacity(4 * guide.data().len());
    for (px, &g) in rgb.pixels().zip(guide.data()) {
        bytes.extend_from_slice(&px);
        bytes.push(quantize_unit(g, 255.0) as u8);
    }
    write_png(
        path.as_ref(),
        rgb.width(),
        rgb.height(),
        png::ColorType::Rgba,
        png::BitDepth::Eight,
        &bytes,
    )
}

pub fn save_png_rgb8(img: &RgbImage, path: impl AsRef<Path>) -> Result<()> {
    write_png(
        path.as_ref(),
        img.width(),
        img.height(),
        png::ColorType::Rgb,
        png::BitDepth::Eight,
        img.as_raw(),
    )
}

/// Writes a mask as 8-bit grayscale, 255 for true and 0 for false.
pub fn save_mask_png(mask: &BinaryMask, path: impl AsRef<Path>) -> Result<()> {
    let bytes: Vec<u8> = mask
        .data()
        .iter()
        .map(|&b| if b { 255 } else { 0 })
        .collect();
    write_png(
        path.as_ref(),
        mask.width(),
        mask.height(),
        png::ColorType::Grayscale,
        png::BitDepth::Eight,
        &bytes,
    )
}
