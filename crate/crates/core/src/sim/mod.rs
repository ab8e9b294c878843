//! Native FMCW LiDAR simulator producing organized Doppler frames with truth.

mod cast;
mod grid;
mod presets;
mod scene;
mod sensor;

pub use cast::{cast_frame, doppler_velocity};
pub use grid::{CellRecord, FrameGrid};
pub use presets::{scene_preset, Preset};
pub use scene::{Pose, RigidObject, SceneSpec, SCENE_SCHEMA};
pub use sensor::{ray_direction, SensorConfig};
