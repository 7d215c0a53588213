use std::path::Path;
use std::process::ExitCode;

use vesselguide::imgio::{load_rgb8, save_png_gray16, save_png_rgb8, save_rgba_guided, write_gmap};
use vesselguide::{generate_guide_map, PipelineStages, PlaneF32, Result};

use super::file_stem;
use crate::args::GuideArgs;

/// Stage dump file names, in pipeline order.
pub const STAGE_FILES: [&str; 7] = [
    "01_blur.png",
    "02_a_channel.png",
    "03_heatmap.png",
    "04_luminosity.png",
    "05_morphology.png",
    "06_brightness.png",
    "07_guide.png",
];

/// Maps a `[0, 255]`-scaled plane onto `[0, 1]` for a 16-bit dump.
fn to_unit(plane: &PlaneF32) -> Result<PlaneF32> {
    plane.map(|v| (v / 255.0).clamp(0.0, 1.0))
}

/// Writes the stage dumps. Planes 02–06 share the fixed scale
/// `stored = round(v / 255 · 65535)` so dumps can be compared numerically;
/// 07 is the guide itself.
fn dump_stages(stages: &PipelineStages, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    save_png_rgb8(&stages.x_rgb_blurred, dir.join(STAGE_FILES[0]))?;
    let planes = [
        &stages.x_a,
        &stages.x_a_prime,
        &stages.x_a_dprime_pre_morph,
        &stages.x_a_dprime,
        &stages.x_a_tprime,
    ];
    for (plane, name) in planes.into_iter().zip(&STAGE_FILES[1..6]) {
        save_png_gray16(&to_unit(plane)?, dir.join(name))?;
    }
    save_png_gray16(&stages.guide, dir.join(STAGE_FILES[6]))
}

pub fn run(args: &GuideArgs) -> Result<ExitCode> {
    let cfg = args.pipeline.to_config(args.dump_stages.is_some())?;
    let img = load_rgb8(&args.input)?;
    let result = generate_guide_map(&img, &cfg);

    std::fs::create_dir_all(&args.out)?;
    let stem = file_stem(&args.input);
    write_gmap(&result.guide, args.out.join(format!("{stem}.gmap")))?;
    if args.png16 {
        save_png_gray16(&result.guide, args.out.join(format!("{stem}_guide.png")))?;
    }
    if args.rgba {
        save_rgba_guided(
            &img,
            &result.guide,
            args.out.join(format!("{stem}_rgba.png")),
        )?;
    }
    if let (Some(dir), Some(stages)) = (&args.dump_stages, &result.stages) {
        dump_stages(stages, dir)?;
    }

    let (lo, hi) = result.guide.min_max();
    println!("t={} min={lo:.4} max={hi:.4}", result.threshold);
    Ok(ExitCode::SUCCESS)
}
