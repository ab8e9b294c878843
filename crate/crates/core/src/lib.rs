//! Single-scan motion segmentation and velocity estimation for FMCW LiDAR.
//!
//! The pipeline takes an organized frame of Doppler returns, splits it into a
//! static background and moving clusters by region growing on Doppler
//! continuity, estimates the sensor's own velocity from the background, and
//! then each moving cluster's velocity against it. A ray-casting simulator
//! provides frames with ground truth for evaluation.

pub mod clustering;
pub mod config;
pub mod error;
pub mod estimation;
pub mod eval;
pub mod frame_file;
pub mod point;
pub mod runner;
pub mod sim;
pub mod waveform;

pub use clustering::{
    blind_zone, derive_threshold, segment, segment_with, BlindZone, SegmentParams, Segmentation, ThresholdParams,
};
pub use config::RunConfig;
pub use error::{Error, Result};
pub use estimation::{
    estimate_frame, estimate_lidar_velocity, estimate_object_velocity, solve_linear_ls, Conditioning, EstimatorParams,
    VelocityEstimate,
};
pub use eval::{confusion, metrics, run_experiment, ConfusionCounts, EvalReport, ExperimentConfig, Metrics};
pub use frame_file::FrameFile;
pub use point::{DopplerPoint, Vec3};
pub use sim::{cast_frame, scene_preset, CellRecord, FrameGrid, Preset, SceneSpec, SensorConfig};
pub use waveform::{BeatPair, WaveformParams};
