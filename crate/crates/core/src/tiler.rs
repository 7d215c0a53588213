//! Tiled batch processing of large rasters.
//!
//! Tiles are planned on a fixed grid, processed on a bounded rayon pool and
//! written as one GMAP per tile plus a CSV manifest. Every output byte is a
//! function of the inputs and configuration only: tiles never share mutable
//! state and the manifest is assembled in `(input, tile_id)` order after all
//! workers finish.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::border::reflect101;
use crate::guidemap::{generate_guide_map, PipelineConfig};
use crate::imgio::{load_rgb8, save_png_gray16, save_rgba_guided, write_gmap};
use crate::{Error, PlaneF32, Result, RgbImage};

pub const MANIFEST_HEADER: &str = "tile_id,source,x,y,w,h,t,gmap_path";
pub const MANIFEST_NAME: &str = "manifest.csv";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PadPolicy {
    /// Edge tiles are extended to full size with reflect-101 padding.
    ReflectPad,
    /// Tiles that do not fit entirely inside the image are dropped.
    SkipPartial,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TileSpec {
    tile: usize,
    stride: usize,
    pad_policy: PadPolicy,
}

impl TileSpec {
    pub fn new(tile: usize, stride: usize, pad_policy: PadPolicy) -> Result<Self> {
        if tile == 0 || stride == 0 || stride > tile {
            return Err(Error::InvalidParameter(format!(
                "need tile >= 1 and 1 <= stride <= tile, got tile={tile} stride={stride}"
            )));
        }
        Ok(Self {
            tile,
            stride,
            pad_policy,
        })
    }

    pub fn tile(&self) -> usize {
        self.tile
    }

    pub fn stride(&self) -> usize {
        self.stride
    }

    pub fn pad_policy(&self) -> PadPolicy {
        self.pad_policy
    }
}

impl Default for TileSpec {
    fn default() -> Self {
        Self {
            tile: 512,
            stride: 512,
            pad_policy: PadPolicy::ReflectPad,
        }
    }
}

/// A tile rectangle in source coordinates. With [`PadPolicy::ReflectPad`]
/// the rectangle may extend past the right/bottom edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TileRecord {
    pub tile_id: usize,
    pub x: usize,
    pub y: usize,
    pub w: usize,
    pub h: usize,
}

fn axis_positions(len: usize, spec: &TileSpec) -> Vec<usize> {
    match spec.pad_policy {
        PadPolicy::SkipPartial if len < spec.tile => Vec::new(),
        PadPolicy::SkipPartial => (0..=(len - spec.tile) / spec.stride)
            .map(|k| k * spec.stride)
            .collect(),
        PadPolicy::ReflectPad => {
            let extra = len.saturating_sub(spec.tile).div_ceil(spec.stride);
            (0..=extra).map(|k| k * spec.stride).collect()
        }
    }
}

/// Row-major tile grid. ReflectPad adds tiles until the last one reaches the
/// image edge: `1 + ceil(max(0, len − tile) / stride)` per axis. SkipPartial
/// keeps `floor((len − tile) / stride) + 1` per axis, or none.
pub fn plan_tiles(width: usize, height: usize, spec: &TileSpec) -> Vec<TileRecord> {
    let xs = axis_positions(width, spec);
    let ys = axis_positions(height, spec);
    let mut out = Vec::with_capacity(xs.len() * ys.len());
    for &y in &ys {
        for &x in &xs {
            out.push(TileRecord {
                tile_id: out.len(),
                x,
                y,
                w: spec.tile,
                h: spec.tile,
            });
        }
    }
    out
}

/// Cuts a tile out of `img`, mirroring (reflect-101) past the edges.
pub fn crop_rgb(img: &RgbImage, rec: &TileRecord) -> RgbImage {
    let (w, h) = img.dims();
    RgbImage::from_fn(rec.w, rec.h, |tx, ty| {
        img.pixel(
            reflect101((rec.x + tx) as isize, w),
            reflect101((rec.y + ty) as isize, h),
        )
    })
    .expect("tile has non-zero size")
}

pub fn crop_plane(plane: &PlaneF32, rec: &TileRecord) -> PlaneF32 {
    let (w, h) = plane.dims();
    PlaneF32::from_fn(rec.w, rec.h, |tx, ty| {
        plane.get(
            reflect101((rec.x + tx) as isize, w),
            reflect101((rec.y + ty) as isize, h),
        )
    })
    .expect("tile has non-zero size")
}

/// Reassembles tile planes into a `width × height` plane.
///
/// Overlapping contributions are averaged, accumulating in slice order;
/// pixels outside the image (padding) are discarded.
pub fn stitch(
    records: &[TileRecord],
    planes: &[PlaneF32],
    width: usize,
    height: usize,
) -> Result<PlaneF32> {
    if records.len() != planes.len() {
        return Err(Error::InvalidParameter(format!(
            "{} records but {} planes",
            records.len(),
            planes.len()
        )));
    }
    let mut sum = vec![0.0f64; width * height];
    let mut hits = vec![0u32; width * height];
    for (rec, plane) in records.iter().zip(planes) {
        if plane.dims() != (rec.w, rec.h) {
            return Err(Error::mismatch((rec.w, rec.h), plane.dims()));
        }
        for ty in 0..rec.h {
            let y = rec.y + ty;
            if y >= height {
                break;
            }
            for tx in 0..rec.w {
                let x = rec.x + tx;
                if x >= width {
                    break;
                }
                sum[y * width + x] += plane.get(tx, ty) as f64;
                hits[y * width + x] += 1;
            }
        }
    }
    if let Some(i) = hits.iter().position(|&n| n == 0) {
        return Err(Error::CoverageGap {
            x: i % width,
            y: i / width,
        });
    }
    let data = sum
        .iter()
        .zip(&hits)
        .map(|(&s, &n)| (s / n as f64) as f32)
        .collect();
    PlaneF32::new(width, height, data)
}

/// Optional per-tile previews written next to the GMAP files.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Previews {
    pub png16: bool,
    pub rgba: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ManifestRow {
    pub tile_id: usize,
    pub source: PathBuf,
    pub x: usize,
    pub y: usize,
    pub w: usize,
    pub h: usize,
    pub t: i32,
    /// File name relative to the output directory.
    pub gmap_path: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BatchFailure {
    pub source: PathBuf,
    pub tile_id: Option<usize>,
    pub message: String,
}

#[derive(Clone, Debug)]
pub struct BatchSummary {
    pub tiles_processed: usize,
    pub failures: Vec<BatchFailure>,
    pub rows: Vec<ManifestRow>,
    pub manifest: PathBuf,
    pub wall_time: Duration,
}

pub fn gmap_file_name(stem: &str, tile_id: usize) -> String {
    format!("{stem}_{tile_id:06}.gmap")
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Renders the manifest: header plus one LF-terminated row per tile.
pub fn render_manifest(rows: &[ManifestRow]) -> String {
    let mut out = String::from(MANIFEST_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.tile_id,
            csv_field(&r.source.to_string_lossy()),
            r.x,
            r.y,
            r.w,
            r.h,
            r.t,
            csv_field(&r.gmap_path)
        );
    }
    out
}

struct TileJob<'a> {
    source: &'a Path,
    stem: &'a str,
    image: &'a RgbImage,
    rec: TileRecord,
}

fn process_tile(
    job: &TileJob<'_>,
    cfg: &PipelineConfig,
    out_dir: &Path,
    previews: Previews,
) -> Result<ManifestRow> {
    let tile = crop_rgb(job.image, &job.rec);
    let cfg = PipelineConfig {
        emit_stages: false,
        ..cfg.clone()
    };
    let result = generate_guide_map(&tile, &cfg);
    let gmap_path = gmap_file_name(job.stem, job.rec.tile_id);
    write_gmap(&result.guide, out_dir.join(&gmap_path))?;
    let base = format!("{}_{:06}", job.stem, job.rec.tile_id);
    if previews.png16 {
        save_png_gray16(&result.guide, out_dir.join(format!("{base}_guide.png")))?;
    }
    if previews.rgba {
        save_rgba_guided(
            &tile,
            &result.guide,
            out_dir.join(format!("{base}_rgba.png")),
        )?;
    }
    Ok(ManifestRow {
        tile_id: job.rec.tile_id,
        source: job.source.to_path_buf(),
        x: job.rec.x,
        y: job.rec.y,
        w: job.rec.w,
        h: job.rec.h,
        t: result.threshold,
        gmap_path,
    })
}

/// Tiles every input, generates a guide map per tile on `jobs` workers and
/// writes GMAPs, optional previews and `manifest.csv` into `out_dir`.
///
/// Unreadable inputs and failing tiles are recorded in the summary and do
/// not stop the batch. Only setup errors (bad `jobs`, unwritable output
/// directory) are returned as `Err`.
pub fn run_batch(
    inputs: &[PathBuf],
    spec: &TileSpec,
    cfg: &PipelineConfig,
    out_dir: &Path,
    jobs: usize,
    previews: Previews,
) -> Result<BatchSummary> {
    let start = Instant::now();
    if jobs == 0 {
        return Err(Error::InvalidParameter("jobs must be at least 1".into()));
    }
    std::fs::create_dir_all(out_dir)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;

    let mut failures = Vec::new();
    let decoded: Vec<Result<RgbImage>> =
        pool.install(|| inputs.par_iter().map(load_rgb8).collect());

    let mut seen = HashSet::new();
    let mut sources = Vec::new();
    for (path, img) in inputs.iter().zip(decoded) {
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        let fail = |message: String| BatchFailure {
            source: path.clone(),
            tile_id: None,
            message,
        };
        match img {
            Err(e) => failures.push(fail(e.to_string())),
            Ok(_) if stem.is_empty() => failures.push(fail("input has no file stem".into())),
            Ok(_) if !seen.insert(stem.clone()) => {
                failures.push(fail(format!("duplicate output stem {stem:?}")))
            }
            Ok(img) => sources.push((path.as_path(), stem, img)),
        }
    }

    let work: Vec<TileJob<'_>> = sources
        .iter()
        .flat_map(|(source, stem, image)| {
            plan_tiles(image.width(), image.height(), spec)
                .into_iter()
                .map(move |rec| TileJob {
                    source,
                    stem,
                    image,
                    rec,
                })
        })
        .collect();

    let results: Vec<Result<ManifestRow>> = pool.install(|| {
        work.par_iter()
            .map(|job| process_tile(job, cfg, out_dir, previews))
            .collect()
    });

    let mut rows = Vec::with_capacity(results.len());
    for (job, res) in work.iter().zip(results) {
        match res {
            Ok(row) => rows.push(row),
            Err(e) => failures.push(BatchFailure {
                source: job.source.to_path_buf(),
                tile_id: Some(job.rec.tile_id),
                message: e.to_string(),
            }),
        }
    }

    let manifest = out_dir.join(MANIFEST_NAME);
    std::fs::write(&manifest, render_manifest(&rows))?;
    Ok(BatchSummary {
        tiles_processed: rows.len(),
        failures,
        rows,
        manifest,
        wall_time: start.elapsed(),
    })
}
