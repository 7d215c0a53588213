use std::process::ExitCode;

use vesselguide::tiler::Previews;
use vesselguide::{run_batch, Error, Result};

use super::{list_files, IMAGE_EXTENSIONS};
use crate::args::BatchArgs;

pub fn run(args: &BatchArgs) -> Result<ExitCode> {
    let spec = args.tile_spec()?;
    let cfg = args.pipeline.to_config(false)?;
    let jobs = match args.jobs {
        Some(j) => j,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    let inputs = list_files(&args.dir, IMAGE_EXTENSIONS)?;
    if inputs.is_empty() {
        return Err(Error::InvalidParameter(format!(
            "no PNG or TIFF images in {}",
            args.dir.display()
        )));
    }
    let previews = Previews {
        png16: args.png16,
        rgba: args.rgba,
    };
    let summary = run_batch(&inputs, &spec, &cfg, &args.out, jobs, previews)?;

    for f in &summary.failures {
        match f.tile_id {
            Some(id) => eprintln!("failed: {} tile {id}: {}", f.source.display(), f.message),
            None => eprintln!("failed: {}: {}", f.source.display(), f.message),
        }
    }
    println!(
        "tiles={} failures={} seconds={:.2}",
        summary.tiles_processed,
        summary.failures.len(),
        summary.wall_time.as_secs_f64()
    );
    Ok(if summary.failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(3)
    })
}
