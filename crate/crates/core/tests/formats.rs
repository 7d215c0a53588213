use std::fs::File;

use tiff::encoder::{colortype, TiffEncoder};
use vesselguide::imgio::{load_gray_plane, load_mask, load_rgb8, save_png_gray16};
use vesselguide::{Error, PlaneF32};

#[test]
fn reads_rgb_tiff() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.tif");
    let data: Vec<u8> = (0..6 * 4 * 3).map(|i| (i * 5) as u8).collect();
    TiffEncoder::new(File::create(&path).unwrap())
        .unwrap()
        .write_image::<colortype::RGB8>(6, 4, &data)
        .unwrap();
    let img = load_rgb8(&path).unwrap();
    assert_eq!(img.dims(), (6, 4));
    assert_eq!(img.as_raw(), &data[..]);
}

#[test]
fn reads_gray16_tiff_as_unit_plane() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.tiff");
    TiffEncoder::new(File::create(&path).unwrap())
        .unwrap()
        .write_image::<colortype::Gray16>(3, 1, &[0, 32768, 65535])
        .unwrap();
    let plane = load_gray_plane(&path).unwrap();
    assert_eq!(plane.data(), &[0.0, 32768.0 / 65535.0, 1.0]);
    assert!(matches!(load_rgb8(&path), Err(Error::UnsupportedFormat(_))));
}

#[test]
fn gray16_png_round_trip_quantizes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.png");
    let plane = PlaneF32::from_fn(257, 1, |x, _| x as f32 / 256.0).unwrap();
    save_png_gray16(&plane, &path).unwrap();
    let back = load_gray_plane(&path).unwrap();
    for (a, b) in plane.data().iter().zip(back.data()) {
        assert!((a - b).abs() <= 0.5 / 65535.0 + 1e-7);
    }
    let mask = load_mask(&path).unwrap();
    assert_eq!(mask.count(), 256);
}

#[test]
fn rejects_garbage_and_missing() {
    let dir = tempfile::tempdir().unwrap();
    let junk = dir.path().join("junk.png");
    std::fs::write(&junk, b"not an image").unwrap();
    assert!(matches!(load_rgb8(&junk), Err(Error::UnsupportedFormat(_))));
    let truncated = dir.path().join("t.png");
    std::fs::write(&truncated, b"\x89PNG\r\n\x1a\n\0\0").unwrap();
    assert!(matches!(load_rgb8(&truncated), Err(Error::CorruptImage(_))));
    assert!(matches!(
        load_rgb8(dir.path().join("nope.png")),
        Err(Error::FileNotFound(_))
    ));
}
