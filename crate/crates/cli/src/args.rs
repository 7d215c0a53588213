use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use vesselguide::{
    GaussianSpec, PadPolicy, PhantomSpec, PipelineConfig, Result, StructuringElement, TileSpec,
};

#[derive(Debug, Parser)]
#[command(
    name = "vesselguide",
    version,
    about = "Blood-vessel guide maps for H&E patches"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate the guide map of one image.
    Guide(GuideArgs),
    /// Tile every image in a directory and generate per-tile guide maps.
    Batch(BatchArgs),
    /// Score a predicted map or mask against a ground-truth mask.
    Eval(EvalArgs),
    /// Write a synthetic phantom and its vessel mask.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
pub struct PipelineFlags {
    /// Gaussian blur kernel size (odd).
    #[arg(long, default_value_t = 3)]
    pub blur_kernel: usize,
    /// Gaussian sigma; 0 derives it from the kernel size.
    #[arg(long, default_value_t = 0.0)]
    pub sigma: f64,
    /// Square structuring element size for opening/closing (odd).
    #[arg(long, default_value_t = 3)]
    pub morph_kernel: usize,
    /// Use this A-channel threshold instead of Otsu.
    #[arg(long, value_name = "T")]
    pub threshold_override: Option<u8>,
}

impl PipelineFlags {
    pub fn to_config(&self, emit_stages: bool) -> Result<PipelineConfig> {
        Ok(PipelineConfig {
            blur: GaussianSpec::new(self.blur_kernel, self.sigma)?,
            morph: StructuringElement::square(self.morph_kernel)?,
            threshold_override: self.threshold_override,
            emit_stages,
            ..Default::default()
        })
    }
}

#[derive(Debug, Args)]
pub struct GuideArgs {
    pub input: PathBuf,
    #[arg(short, long, default_value = ".")]
    pub out: PathBuf,
    #[command(flatten)]
    pub pipeline: PipelineFlags,
    /// Write every intermediate stage as PNG into DIR.
    #[arg(long, value_name = "DIR")]
    pub dump_stages: Option<PathBuf>,
    /// Also write the guide as a 16-bit grayscale PNG.
    #[arg(long)]
    pub png16: bool,
    /// Also write an RGBA preview with the guide in the alpha channel.
    #[arg(long)]
    pub rgba: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum PadArg {
    Reflect,
    Skip,
}

#[derive(Debug, Args)]
pub struct BatchArgs {
    pub dir: PathBuf,
    #[arg(short, long, default_value = "out")]
    pub out: PathBuf,
    #[command(flatten)]
    pub pipeline: PipelineFlags,
    #[arg(long, default_value_t = 512)]
    pub tile: usize,
    /// Defaults to the tile size.
    #[arg(long)]
    pub stride: Option<usize>,
    #[arg(long, value_enum, default_value = "reflect")]
    pub pad: PadArg,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub png16: bool,
    #[arg(long)]
    pub rgba: bool,
}

impl BatchArgs {
    pub fn tile_spec(&self) -> Result<TileSpec> {
        let pad = match self.pad {
            PadArg::Reflect => PadPolicy::ReflectPad,
            PadArg::Skip => PadPolicy::SkipPartial,
        };
        TileSpec::new(self.tile, self.stride.unwrap_or(self.tile), pad)
    }
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Predicted map (GMAP or grayscale PNG/TIFF) or a directory of them.
    #[arg(long)]
    pub pred: PathBuf,
    /// Ground-truth mask (nonzero = vessel) or a directory of masks.
    #[arg(long)]
    pub truth: PathBuf,
    /// Binarization threshold, `pred > T`.
    #[arg(long, default_value_t = 0.5, conflicts_with = "sweep")]
    pub threshold: f32,
    /// Threshold sweep `START:END:STEP`, inclusive of END.
    #[arg(long, value_name = "A:B:STEP")]
    pub sweep: Option<String>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(short, long, default_value = ".")]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 6)]
    pub blobs: usize,
    #[arg(long, default_value_t = 512)]
    pub width: usize,
    #[arg(long, default_value_t = 512)]
    pub height: usize,
    #[arg(long, default_value_t = 12)]
    pub min_radius: usize,
    #[arg(long, default_value_t = 40)]
    pub max_radius: usize,
    /// Standard deviation of the per-channel Gaussian noise.
    #[arg(long, default_value_t = 5.0)]
    pub noise: f64,
}

impl SynthArgs {
    pub fn phantom_spec(&self) -> PhantomSpec {
        PhantomSpec {
            width: self.width,
            height: self.height,
            n_blobs: self.blobs,
            blob_radius_range: (self.min_radius, self.max_radius),
            noise_sigma: self.noise,
            seed: self.seed,
            ..Default::default()
        }
    }
}
