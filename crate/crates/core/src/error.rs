use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("Doppler shift of {shift_hz} Hz exceeds the range beat of {range_beat_hz} Hz")]
    NegativeBeat { range_beat_hz: f64, shift_hz: f64 },

    #[error("unknown scene preset `{0}`")]
    UnknownPreset(String),

    #[error("frame has no valid returns")]
    EmptyFrame,

    #[error("need at least 3 points for a velocity estimate, got {0}")]
    InsufficientPoints(usize),

    #[error("target speed {target_speed} m/s does not exceed threshold {v_th} m/s; every direction is blind")]
    NoBlindZone { target_speed: f64, v_th: f64 },

    #[error("label arrays differ in length: {pred} predicted vs {truth} truth")]
    LengthMismatch { pred: usize, truth: usize },

    #[error("invalid config field `{field}`: {message}")]
    InvalidConfig { field: String, message: String },

    #[error("malformed frame file: {0}")]
    BadFrame(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn invalid(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::InvalidConfig {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by user input rather than by the run itself.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidConfig { .. } | Error::UnknownPreset(_) | Error::Json { .. }
        )
    }

    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NegativeBeat { .. } => "NegativeBeat",
            Error::UnknownPreset(_) => "UnknownPreset",
            Error::EmptyFrame => "EmptyFrame",
            Error::InsufficientPoints(_) => "InsufficientPoints",
            Error::NoBlindZone { .. } => "NoBlindZone",
            Error::LengthMismatch { .. } => "LengthMismatch",
            Error::InvalidConfig { .. } => "InvalidConfig",
            Error::BadFrame(_) => "BadFrame",
            Error::Io { .. } => "IoError",
            Error::Json { .. } => "InvalidConfig",
            Error::Csv(_) => "IoError",
        }
    }
}
