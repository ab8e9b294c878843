//! Run configuration file (`dopvel-run/1`).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::clustering::{derive_threshold, SegmentParams, ThresholdParams};
use crate::error::{Error, Result};
use crate::estimation::EstimatorParams;
use crate::eval::ExperimentConfig;
use crate::sim::{Preset, SceneSpec, SensorConfig};
use crate::waveform::WaveformParams;

pub const RUN_SCHEMA: &str = "dopvel-run/1";

fn default_schema() -> String {
    RUN_SCHEMA.to_owned()
}
fn default_num_th_s() -> usize {
    EstimatorParams::default().num_th_s
}
fn default_num_th_m() -> usize {
    EstimatorParams::default().num_th_m
}
fn default_min_cluster_size() -> usize {
    5
}
fn default_frames() -> usize {
    50
}

/// Everything a CLI run needs. Exactly one of `preset`, `scene` or
/// `frames_dir` names the input. Relative paths resolve against the
/// directory holding the config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_schema")]
    pub schema: String,
    #[serde(default)]
    pub sensor: SensorConfig,
    #[serde(default)]
    pub waveform: WaveformParams,
    #[serde(default)]
    pub threshold: ThresholdParams,
    #[serde(default = "default_num_th_s")]
    pub num_th_s: usize,
    #[serde(default = "default_num_th_m")]
    pub num_th_m: usize,
    #[serde(default = "default_min_cluster_size")]
    pub min_cluster_size: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scene: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frames_dir: Option<PathBuf>,
    #[serde(default = "default_frames")]
    pub frames: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out_dir: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all fields default")
    }
}

/// Where frames come from.
#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Scene { name: String, scene: SceneSpec },
    FramesDir(PathBuf),
}

impl RunConfig {
    pub fn for_preset(preset: Preset) -> Self {
        Self {
            preset: Some(preset.name().to_owned()),
            ..Self::default()
        }
    }

    pub fn from_json(text: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Parses and validates a config file.
    pub fn load(path: &Path) -> Result<Self> {
        let cfg = Self::read(path)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Parses a config file without validating it, so callers can apply
    /// overrides first.
    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_json(&text).map_err(|source| Error::Json {
            path: path.to_owned(),
            source,
        })?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut cfg.scene, &mut cfg.frames_dir, &mut cfg.out_dir]
            .into_iter()
            .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    /// Full validation, including that exactly one input source exists.
    pub fn validate(&self) -> Result<()> {
        self.validate_params()?;
        self.validate_source()
    }

    /// Validates everything except the input source.
    pub fn validate_params(&self) -> Result<()> {
        if self.schema != RUN_SCHEMA {
            return Err(Error::invalid(
                "schema",
                format!("expected `{RUN_SCHEMA}`, got `{}`", self.schema),
            ));
        }
        self.sensor.validate()?;
        self.waveform.validate()?;
        self.threshold.validate()?;
        let res = self.sensor.angular_resolution();
        if (self.threshold.angular_res_theta - res).abs() > 0.05 * res {
            return Err(Error::invalid(
                "threshold.angular_res_theta",
                format!(
                    "{} rad does not match the sensor's {res:.5} rad ray spacing",
                    self.threshold.angular_res_theta
                ),
            ));
        }
        if derive_threshold(&self.threshold) <= 0.0 {
            return Err(Error::invalid("threshold", "derived threshold must be positive"));
        }
        for (name, cap) in [("num_th_s", self.num_th_s), ("num_th_m", self.num_th_m)] {
            if cap < 3 {
                return Err(Error::invalid(name, format!("must be at least 3, got {cap}")));
            }
        }
        if self.min_cluster_size == 0 {
            return Err(Error::invalid("min_cluster_size", "must be at least 1"));
        }
        if self.frames == 0 {
            return Err(Error::invalid("frames", "must be at least 1"));
        }
        Ok(())
    }

    fn validate_source(&self) -> Result<()> {
        let sources = [self.preset.is_some(), self.scene.is_some(), self.frames_dir.is_some()];
        match sources.iter().filter(|&&s| s).count() {
            1 => {}
            0 => {
                return Err(Error::invalid(
                    "preset",
                    "one of preset, scene or frames_dir is required",
                ))
            }
            _ => {
                return Err(Error::invalid(
                    "preset",
                    "preset, scene and frames_dir are mutually exclusive",
                ))
            }
        }
        if let Some(p) = &self.preset {
            p.parse::<Preset>()?;
        }
        if let Some(p) = &self.scene {
            if !p.is_file() {
                return Err(Error::invalid("scene", format!("{} does not exist", p.display())));
            }
        }
        if let Some(p) = &self.frames_dir {
            if !p.is_dir() {
                return Err(Error::invalid(
                    "frames_dir",
                    format!("{} is not a directory", p.display()),
                ));
            }
        }
        Ok(())
    }

    pub fn v_th(&self) -> f64 {
        derive_threshold(&self.threshold)
    }

    pub fn experiment(&self) -> ExperimentConfig {
        ExperimentConfig {
            sensor: self.sensor,
            segment: SegmentParams {
                v_th: self.v_th(),
                min_cluster_size: self.min_cluster_size,
            },
            estimator: EstimatorParams {
                num_th_s: self.num_th_s,
                num_th_m: self.num_th_m,
            },
        }
    }

    pub fn source(&self) -> Result<Source> {
        if let Some(p) = &self.preset {
            let preset: Preset = p.parse()?;
            return Ok(Source::Scene {
                name: preset.name().to_owned(),
                scene: preset.scene(),
            });
        }
        if let Some(p) = &self.scene {
            let name = p
                .file_stem()
                .map_or("scene".into(), |s| s.to_string_lossy().into_owned());
            return Ok(Source::Scene {
                name,
                scene: SceneSpec::load(p)?,
            });
        }
        if let Some(p) = &self.frames_dir {
            return Ok(Source::FramesDir(p.clone()));
        }
        Err(Error::invalid("preset", "no input configured"))
    }
}
