use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

pub type Vec3 = Vector3<f64>;

/// One FMCW return: position in the sensor frame plus radial Doppler speed.
///
/// Doppler is positive when the target recedes along the ray.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DopplerPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub v: f64,
}

impl DopplerPoint {
    pub fn new(x: f64, y: f64, z: f64, v: f64) -> Self {
        Self { x, y, z, v }
    }

    pub fn position(&self) -> Vec3 {
        Vec3::new(self.x, self.y, self.z)
    }

    pub fn range(&self) -> f64 {
        self.position().norm()
    }

    /// Unit vector from the sensor towards the point.
    pub fn direction(&self) -> Vec3 {
        let p = self.position();
        p / p.norm()
    }
}
