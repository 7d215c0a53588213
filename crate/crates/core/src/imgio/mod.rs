//! Raster types, image codecs and the GMAP exchange format.

mod codec;
mod gmap;
mod raster;

pub use codec::{
    load_gray_plane, load_mask, load_rgb8, save_mask_png, save_png_gray16, save_png_rgb8,
    save_rgba_guided,
};
pub use gmap::{
    decode_gmap, encode_gmap, read_gmap, write_gmap, GMAP_HEADER_LEN, GMAP_MAGIC, GMAP_VERSION,
};
pub use raster::{BinaryMask, PlaneF32, RgbImage};
