//! Fixtures shared by the criterion benchmarks in `benches/`.

use dopvel_core::eval::{frame_seed, frame_time, object_count_scene};
use dopvel_core::sim::{cast_frame, SensorConfig};
use dopvel_core::{FrameGrid, Preset, RunConfig};

pub use dopvel_core::eval::ExperimentConfig;

pub fn config() -> ExperimentConfig {
    RunConfig::default().experiment()
}

/// Frame `index` of a preset with the default sensor.
pub fn preset_frame(preset: Preset, index: usize) -> FrameGrid {
    let sensor = SensorConfig::default();
    let scene = preset.scene().at_time(frame_time(&sensor, index));
    cast_frame(&scene, &sensor, frame_seed(0, index))
}

/// A frame holding `k` moving boxes.
pub fn object_count_frame(k: usize) -> FrameGrid {
    cast_frame(&object_count_scene(k), &SensorConfig::default(), frame_seed(0, k))
}
