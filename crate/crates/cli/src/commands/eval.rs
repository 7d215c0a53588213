use std::path::{Path, PathBuf};
use std::process::ExitCode;

use vesselguide::imgio::{decode_gmap, load_gray_plane, load_mask, GMAP_MAGIC};
use vesselguide::metrics::{macro_average, micro_average, sweep, MetricReport};
use vesselguide::{BinaryMask, Error, PlaneF32, Result};

use super::{file_stem, list_files, IMAGE_EXTENSIONS};
use crate::args::EvalArgs;

const PRED_EXTENSIONS: &[&str] = &["gmap", "png", "tif", "tiff"];

/// Parses `START:END:STEP` into an inclusive list of thresholds.
pub fn parse_sweep(s: &str) -> Result<Vec<f32>> {
    let bad = || Error::InvalidParameter(format!("invalid sweep {s:?}, expected START:END:STEP"));
    let parts: Vec<f64> = s
        .split(':')
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| bad())?;
    let [start, end, step] = parts[..] else {
        return Err(bad());
    };
    if !parts.iter().all(|p| p.is_finite()) || step <= 0.0 || end < start {
        return Err(bad());
    }
    let count = ((end - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count)
        .map(|i| (start + i as f64 * step) as f32)
        .collect())
}

/// Loads a prediction: GMAP by magic, otherwise a grayscale image scaled to
/// `[0, 1]`, otherwise any image read as a 0/1 mask.
fn load_prediction(path: &Path) -> Result<PlaneF32> {
    let bytes = std::fs::read(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::FileNotFound(path.to_path_buf()),
        _ => Error::Io(e),
    })?;
    if bytes.starts_with(&GMAP_MAGIC) {
        return decode_gmap(&bytes);
    }
    match load_gray_plane(path) {
        Err(Error::UnsupportedFormat(_)) => {
            let mask = load_mask(path)?;
            let data = mask
                .data()
                .iter()
                .map(|&b| if b { 1.0 } else { 0.0 })
                .collect();
            PlaneF32::new(mask.width(), mask.height(), data)
        }
        other => other,
    }
}

fn pairs(pred: &Path, truth: &Path) -> Result<Vec<(PathBuf, PathBuf)>> {
    let truths = list_files(truth, IMAGE_EXTENSIONS)?;
    let mut out = Vec::new();
    for p in list_files(pred, PRED_EXTENSIONS)? {
        let stem = file_stem(&p);
        let t = truths
            .iter()
            .find(|t| file_stem(t) == stem)
            .ok_or_else(|| {
                Error::InvalidParameter(format!("no ground truth for {}", p.display()))
            })?;
        out.push((p, t.clone()));
    }
    if out.is_empty() {
        return Err(Error::InvalidParameter(format!(
            "no predictions in {}",
            pred.display()
        )));
    }
    Ok(out)
}

fn score(pred: &PlaneF32, truth: &BinaryMask, thresholds: &[f32]) -> Result<Vec<MetricReport>> {
    Ok(sweep(pred, truth, thresholds)?
        .into_iter()
        .map(|(_, r)| r)
        .collect())
}

pub fn run(args: &EvalArgs) -> Result<ExitCode> {
    let thresholds = match &args.sweep {
        Some(s) => parse_sweep(s)?,
        None => vec![args.threshold],
    };
    let prefix = |t: f32| match args.sweep {
        Some(_) => format!("threshold={t:.4} "),
        None => String::new(),
    };

    if args.pred.is_dir() {
        // per_item[i][k]: item i at threshold k
        let mut per_item = Vec::new();
        for (p, t) in pairs(&args.pred, &args.truth)? {
            per_item.push(score(&load_prediction(&p)?, &load_mask(&t)?, &thresholds)?);
        }
        for (k, &thr) in thresholds.iter().enumerate() {
            let reports: Vec<MetricReport> = per_item.iter().map(|r| r[k]).collect();
            let micro = micro_average(&reports);
            let (macro_dsc, macro_iou) = macro_average(&reports).expect("at least one pair");
            let prefix = prefix(thr);
            println!(
                "{prefix}average=micro dsc={:.4} iou={:.4}",
                micro.dsc, micro.iou
            );
            println!("{prefix}average=macro dsc={macro_dsc:.4} iou={macro_iou:.4}");
        }
    } else {
        let pred = load_prediction(&args.pred)?;
        let truth = load_mask(&args.truth)?;
        for (thr, r) in thresholds.iter().zip(score(&pred, &truth, &thresholds)?) {
            println!("{}dsc={:.4} iou={:.4}", prefix(*thr), r.dsc, r.iou);
        }
    }
    Ok(ExitCode::SUCCESS)
}
