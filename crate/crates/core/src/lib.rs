//! Guide-map generation for blood-vessel emphasis in H&E histology images.
//!
//! The pipeline blurs an 8-bit sRGB patch, converts it to CIELAB and HSV,
//! thresholds the green–red opponent channel with Otsu's method, scales the
//! resulting red heat-map by lightness, cleans it with grayscale opening and
//! closing, scales it by HSV value and finally min-max normalizes it into a
//! `[0, 1]` guide map. The guide is meant to be stacked onto the original RGB
//! channels as a fourth input channel for a segmentation network.
//!
//! Around the core pipeline the crate provides:
//!
//! * [`imgio`]: PNG/TIFF decoding, 16-bit previews and the lossless GMAP format.
//! * [`metrics`]: Dice and IoU against binary ground truth.
//! * [`tiler`]: tiled, parallel and byte-deterministic batch processing.
//! * [`synth`]: seeded phantoms with known vessel masks.

mod border;
pub mod color;
mod error;
pub mod filters;
pub mod guidemap;
pub mod imgio;
pub mod metrics;
pub mod morphology;
pub mod synth;
pub mod threshold;
pub mod tiler;

pub use color::{rgb_to_hsv, rgb_to_lab, Channel, ChannelSource, HsvImage, LabImage};
pub use error::{Error, Result};
pub use filters::{gaussian_blur_rgb, gaussian_kernel, GaussianSpec};
pub use guidemap::{
    assemble_guided, generate_guide_map, min_max_normalize, multiply_planes, GuideMap, GuidedPatch,
    IntensityScaling, PipelineConfig, PipelineStages,
};
pub use imgio::{BinaryMask, PlaneF32, RgbImage};
pub use metrics::{ConfusionCounts, MetricReport};
pub use morphology::StructuringElement;
pub use synth::{generate_phantom, Phantom, PhantomSpec};
pub use threshold::{histogram256, otsu_threshold, subtract_clamp, Histogram256, OtsuResult};
pub use tiler::{plan_tiles, run_batch, stitch, BatchSummary, PadPolicy, TileRecord, TileSpec};
