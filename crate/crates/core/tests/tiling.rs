use std::path::PathBuf;

use proptest::prelude::*;
use vesselguide::imgio::{read_gmap, save_png_rgb8};
use vesselguide::tiler::{crop_plane, crop_rgb, render_manifest, Previews};
use vesselguide::{
    generate_guide_map, plan_tiles, run_batch, stitch, PadPolicy, PhantomSpec, PipelineConfig,
    PlaneF32, RgbImage, TileSpec,
};

fn ramp(w: usize, h: usize) -> PlaneF32 {
    PlaneF32::from_fn(w, h, |x, y| (x * 31 + y * 7) as f32 / 100.0).unwrap()
}

proptest! {
    #[test]
    fn crop_then_stitch_is_identity(
        w in 1usize..90,
        h in 1usize..90,
        tile in 8usize..40,
        stride_frac in 0.3f64..=1.0,
    ) {
        let stride = ((tile as f64 * stride_frac) as usize).max(1);
        let spec = TileSpec::new(tile, stride, PadPolicy::ReflectPad).unwrap();
        let plane = ramp(w, h);
        let recs = plan_tiles(w, h, &spec);
        let tiles: Vec<PlaneF32> = recs.iter().map(|r| crop_plane(&plane, r)).collect();
        prop_assert_eq!(stitch(&recs, &tiles, w, h).unwrap(), plane);
    }

    #[test]
    fn reflect_pad_covers_every_pixel(w in 1usize..300, h in 1usize..300, tile in 1usize..64) {
        let spec = TileSpec::new(tile, tile, PadPolicy::ReflectPad).unwrap();
        let recs = plan_tiles(w, h, &spec);
        let last = recs.last().unwrap();
        prop_assert!(last.x + last.w >= w && last.y + last.h >= h);
        let ids: Vec<usize> = recs.iter().map(|r| r.tile_id).collect();
        prop_assert_eq!(ids, (0..recs.len()).collect::<Vec<_>>());
    }
}

#[test]
fn skip_partial_leaves_gap() {
    let spec = TileSpec::new(64, 64, PadPolicy::SkipPartial).unwrap();
    let recs = plan_tiles(100, 100, &spec);
    assert_eq!(recs.len(), 1);
    let tiles = vec![PlaneF32::zeros(64, 64).unwrap()];
    assert!(matches!(
        stitch(&recs, &tiles, 100, 100),
        Err(vesselguide::Error::CoverageGap { x: 64, y: 0 })
    ));
}

#[test]
fn edge_tiles_are_mirrored() {
    let img = RgbImage::from_fn(5, 1, |x, _| [x as u8, 0, 0]).unwrap();
    let spec = TileSpec::new(4, 4, PadPolicy::ReflectPad).unwrap();
    let recs = plan_tiles(5, 1, &spec);
    assert_eq!(recs.len(), 2);
    let edge = crop_rgb(&img, &recs[1]);
    let xs: Vec<u8> = (0..4).map(|x| edge.pixel(x, 0)[0]).collect();
    // columns 4, 5, 6, 7 mirror to 4, 3, 2, 1
    assert_eq!(xs, [4, 3, 2, 1]);
}

#[test]
fn batch_tiles_match_direct_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let phantom = vesselguide::generate_phantom(&PhantomSpec {
        width: 160,
        height: 96,
        n_blobs: 3,
        blob_radius_range: (6, 14),
        seed: 3,
        ..Default::default()
    })
    .unwrap();
    let input: PathBuf = dir.path().join("slide.png");
    save_png_rgb8(&phantom.image, &input).unwrap();

    let spec = TileSpec::new(64, 64, PadPolicy::ReflectPad).unwrap();
    let cfg = PipelineConfig::default();
    let out = dir.path().join("out");
    let previews = Previews {
        png16: true,
        rgba: true,
    };
    let summary = run_batch(&[input], &spec, &cfg, &out, 3, previews).unwrap();
    assert!(summary.failures.is_empty());
    assert_eq!(summary.tiles_processed, 6);
    assert_eq!(summary.rows.len(), 6);

    for (row, rec) in summary.rows.iter().zip(plan_tiles(160, 96, &spec)) {
        assert_eq!((row.x, row.y, row.w, row.h), (rec.x, rec.y, 64, 64));
        let want = generate_guide_map(&crop_rgb(&phantom.image, &rec), &cfg);
        assert_eq!(row.t, want.threshold);
        let got = read_gmap(out.join(&row.gmap_path)).unwrap();
        assert_eq!(got, want.guide);
        assert!(out
            .join(format!("slide_{:06}_guide.png", rec.tile_id))
            .exists());
        assert!(out
            .join(format!("slide_{:06}_rgba.png", rec.tile_id))
            .exists());
    }
    let manifest = std::fs::read_to_string(&summary.manifest).unwrap();
    assert_eq!(manifest, render_manifest(&summary.rows));
    assert_eq!(summary.manifest, out.join("manifest.csv"));
}

#[test]
fn batch_reports_unreadable_input() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.png");
    save_png_rgb8(&RgbImage::filled(32, 32, [200, 40, 60]).unwrap(), &good).unwrap();
    let missing = dir.path().join("missing.png");
    let spec = TileSpec::new(32, 32, PadPolicy::ReflectPad).unwrap();
    let summary = run_batch(
        &[good, missing.clone()],
        &spec,
        &PipelineConfig::default(),
        &dir.path().join("out"),
        1,
        Previews::default(),
    )
    .unwrap();
    assert_eq!(summary.tiles_processed, 1);
    assert_eq!(summary.failures.len(), 1);
    assert_eq!(summary.failures[0].source, missing);
    assert!(run_batch(
        &[],
        &spec,
        &PipelineConfig::default(),
        dir.path(),
        0,
        Previews::default()
    )
    .is_err());
}
