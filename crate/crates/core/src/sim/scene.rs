use std::path::Path;

use nalgebra::{Matrix3, Rotation3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::Vec3;

pub const SCENE_SCHEMA: &str = "dopvel-scene/1";

/// Sensor pose: position in the world frame and the world→sensor rotation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub position: Vec3,
    pub rotation: Rotation3<f64>,
}

impl Pose {
    /// Sensor at `position` looking along world heading `yaw` (radians about +z).
    pub fn from_heading(position: Vec3, yaw: f64) -> Self {
        Self {
            position,
            rotation: Rotation3::from_axis_angle(&Vec3::z_axis(), yaw).inverse(),
        }
    }
}

/// Axis-aligned box rotated by `yaw` about world +z, translating at a constant velocity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidObject {
    pub id: u32,
    pub center: Vec3,
    pub half_extents: Vec3,
    pub yaw: f64,
    pub velocity_world: Vec3,
}

impl RigidObject {
    pub fn is_moving(&self) -> bool {
        self.velocity_world.norm() > 0.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SceneSpec {
    pub objects: Vec<RigidObject>,
    /// World z of the ground plane; `None` for a scene without ground.
    pub ground_height: Option<f64>,
    pub sensor_pose: Pose,
    pub sensor_velocity_world: Vec3,
    /// Sensor heading rate about world +z, rad/s. The world velocity turns with it.
    pub sensor_yaw_rate: f64,
}

impl SceneSpec {
    pub fn has_geometry(&self) -> bool {
        !self.objects.is_empty() || self.ground_height.is_some()
    }

    pub fn object(&self, id: u32) -> Option<&RigidObject> {
        self.objects.iter().find(|o| o.id == id)
    }

    /// Sensor velocity expressed in sensor axes.
    pub fn ego_velocity(&self) -> Vec3 {
        self.sensor_pose.rotation * self.sensor_velocity_world
    }

    pub fn validate(&self) -> Result<()> {
        let r = self.sensor_pose.rotation.matrix();
        let ortho = (r * r.transpose() - Matrix3::identity()).abs().max();
        if ortho > 1e-9 || (r.determinant() - 1.0).abs() > 1e-9 {
            return Err(Error::invalid("sensor.rotation", "must be a proper rotation matrix"));
        }
        let mut ids = std::collections::HashSet::new();
        for o in &self.objects {
            if o.id == 0 {
                return Err(Error::invalid("objects.id", "id 0 is reserved for the ground"));
            }
            if !ids.insert(o.id) {
                return Err(Error::invalid("objects.id", format!("duplicate id {}", o.id)));
            }
            if o.half_extents.iter().any(|&h| h.is_nan() || h <= 0.0) {
                return Err(Error::invalid(
                    "objects.half_extents",
                    format!("object {} has a non-positive extent", o.id),
                ));
            }
        }
        Ok(())
    }

    /// Snapshot of the scene `t` seconds later. Objects translate; the sensor
    /// follows a circular arc when it has a yaw rate.
    pub fn at_time(&self, t: f64) -> SceneSpec {
        let mut out = self.clone();
        for o in &mut out.objects {
            o.center += o.velocity_world * t;
        }
        let v0 = self.sensor_velocity_world;
        let w = self.sensor_yaw_rate;
        if w == 0.0 {
            out.sensor_pose.position += v0 * t;
        } else {
            let (s, c) = (w * t).sin_cos();
            let dx = (s * v0.x + (c - 1.0) * v0.y) / w;
            let dy = ((1.0 - c) * v0.x + s * v0.y) / w;
            out.sensor_pose.position += Vec3::new(dx, dy, v0.z * t);
            let turn = Rotation3::from_axis_angle(&Vec3::z_axis(), w * t);
            out.sensor_velocity_world = turn * v0;
            out.sensor_pose.rotation = self.sensor_pose.rotation * turn.inverse();
        }
        out
    }

    pub fn from_json(text: &str) -> std::result::Result<Self, serde_json::Error> {
        let file: SceneFile = serde_json::from_str(text)?;
        file.try_into().map_err(serde::de::Error::custom)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&SceneFile::from(self)).expect("scene serializes")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let scene = Self::from_json(&text).map_err(|source| Error::Json {
            path: path.to_owned(),
            source,
        })?;
        scene.validate()?;
        Ok(scene)
    }
}

// On-disk layout. Vectors are [x, y, z]; the rotation is row-major.

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SceneFile {
    schema: String,
    #[serde(default)]
    ground_height: Option<f64>,
    sensor: SensorFile,
    #[serde(default)]
    objects: Vec<ObjectFile>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SensorFile {
    position: [f64; 3],
    rotation: [[f64; 3]; 3],
    velocity_world: [f64; 3],
    #[serde(default)]
    yaw_rate: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ObjectFile {
    id: u32,
    center: [f64; 3],
    half_extents: [f64; 3],
    #[serde(default)]
    yaw: f64,
    #[serde(default)]
    velocity_world: [f64; 3],
}

impl From<&SceneSpec> for SceneFile {
    fn from(s: &SceneSpec) -> Self {
        let m = s.sensor_pose.rotation.matrix();
        let rotation = [0, 1, 2].map(|i| [m[(i, 0)], m[(i, 1)], m[(i, 2)]]);
        SceneFile {
            schema: SCENE_SCHEMA.to_owned(),
            ground_height: s.ground_height,
            sensor: SensorFile {
                position: s.sensor_pose.position.into(),
                rotation,
                velocity_world: s.sensor_velocity_world.into(),
                yaw_rate: s.sensor_yaw_rate,
            },
            objects: s
                .objects
                .iter()
                .map(|o| ObjectFile {
                    id: o.id,
                    center: o.center.into(),
                    half_extents: o.half_extents.into(),
                    yaw: o.yaw,
                    velocity_world: o.velocity_world.into(),
                })
                .collect(),
        }
    }
}

impl TryFrom<SceneFile> for SceneSpec {
    type Error = String;

    fn try_from(f: SceneFile) -> std::result::Result<Self, String> {
        if f.schema != SCENE_SCHEMA {
            return Err(format!(
                "unsupported scene schema `{}`, expected `{SCENE_SCHEMA}`",
                f.schema
            ));
        }
        let r = f.sensor.rotation;
        let m = Matrix3::new(
            r[0][0], r[0][1], r[0][2], r[1][0], r[1][1], r[1][2], r[2][0], r[2][1], r[2][2],
        );
        Ok(SceneSpec {
            objects: f
                .objects
                .into_iter()
                .map(|o| RigidObject {
                    id: o.id,
                    center: o.center.into(),
                    half_extents: o.half_extents.into(),
                    yaw: o.yaw,
                    velocity_world: o.velocity_world.into(),
                })
                .collect(),
            ground_height: f.ground_height,
            sensor_pose: Pose {
                position: f.sensor.position.into(),
                rotation: Rotation3::from_matrix_unchecked(m),
            },
            sensor_velocity_world: f.sensor.velocity_world.into(),
            sensor_yaw_rate: f.sensor.yaw_rate,
        })
    }
}
