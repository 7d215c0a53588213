use std::process::ExitCode;

use vesselguide::imgio::{save_mask_png, save_png_rgb8};
use vesselguide::{generate_phantom, Result};

use crate::args::SynthArgs;

pub fn run(args: &SynthArgs) -> Result<ExitCode> {
    let phantom = generate_phantom(&args.phantom_spec())?;
    std::fs::create_dir_all(&args.out)?;
    save_png_rgb8(&phantom.image, args.out.join("phantom.png"))?;
    save_mask_png(&phantom.mask, args.out.join("mask.png"))?;
    println!(
        "blobs={} mask_pixels={}",
        phantom.blobs.len(),
        phantom.mask.count()
    );
    Ok(ExitCode::SUCCESS)
}
