use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::Vec3;

/// Scan pattern and noise model of the simulated FMCW LiDAR.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SensorConfig {
    /// Degrees.
    pub azimuth_fov: f64,
    pub elevation_fov: f64,
    pub azimuth_res: f64,
    pub elevation_res: f64,
    /// Meters.
    pub max_range: f64,
    /// Hertz.
    pub frame_rate: f64,
    /// Gaussian σ applied along the ray, meters.
    pub range_noise_sigma: f64,
    /// Gaussian σ added to the Doppler reading, m/s.
    pub velocity_noise_sigma: f64,
}

impl Default for SensorConfig {
    /// Three 40°×30° units merged into one 120°×30° grid at 0.2°.
    fn default() -> Self {
        Self {
            azimuth_fov: 120.0,
            elevation_fov: 30.0,
            azimuth_res: 0.2,
            elevation_res: 0.2,
            max_range: 150.0,
            frame_rate: 10.0,
            range_noise_sigma: 0.025,
            velocity_noise_sigma: 0.031,
        }
    }
}

fn bins(fov: f64, res: f64) -> usize {
    (fov / res).round() as usize
}

impl SensorConfig {
    pub fn noise_free(mut self) -> Self {
        self.range_noise_sigma = 0.0;
        self.velocity_noise_sigma = 0.0;
        self
    }

    /// Elevation bins.
    pub fn rows(&self) -> usize {
        bins(self.elevation_fov, self.elevation_res)
    }

    /// Azimuth bins.
    pub fn cols(&self) -> usize {
        bins(self.azimuth_fov, self.azimuth_res)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("sensor.azimuth_fov", self.azimuth_fov),
            ("sensor.elevation_fov", self.elevation_fov),
            ("sensor.azimuth_res", self.azimuth_res),
            ("sensor.elevation_res", self.elevation_res),
            ("sensor.max_range", self.max_range),
            ("sensor.frame_rate", self.frame_rate),
        ];
        for (name, value) in positive {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::invalid(name, format!("must be positive, got {value}")));
            }
        }
        for (name, value) in [
            ("sensor.range_noise_sigma", self.range_noise_sigma),
            ("sensor.velocity_noise_sigma", self.velocity_noise_sigma),
        ] {
            if !(value.is_finite() && value >= 0.0) {
                return Err(Error::invalid(name, format!("must be non-negative, got {value}")));
            }
        }
        for (name, fov, res) in [
            ("sensor.azimuth_res", self.azimuth_fov, self.azimuth_res),
            ("sensor.elevation_res", self.elevation_fov, self.elevation_res),
        ] {
            let n = fov / res;
            if (n - n.round()).abs() > 1e-6 || n.round() < 1.0 {
                return Err(Error::invalid(
                    name,
                    format!("field of view {fov} is not a whole number of {res} bins"),
                ));
            }
        }
        if self.azimuth_fov >= 360.0 || self.elevation_fov >= 180.0 {
            return Err(Error::invalid("sensor", "field of view must stay below 360°×180°"));
        }
        Ok(())
    }

    /// Azimuth of a column's bin center, radians. Column 0 is the leftmost (+y) bin.
    pub fn azimuth(&self, col: usize) -> f64 {
        (0.5 * self.azimuth_fov - (col as f64 + 0.5) * self.azimuth_res).to_radians()
    }

    /// Elevation of a row's bin center, radians. Row 0 is the top bin.
    pub fn elevation(&self, row: usize) -> f64 {
        (0.5 * self.elevation_fov - (row as f64 + 0.5) * self.elevation_res).to_radians()
    }

    pub fn cell_direction(&self, row: usize, col: usize) -> Vec3 {
        ray_direction(self.azimuth(col), self.elevation(row))
    }

    /// Angular step between neighboring rays, radians.
    pub fn angular_resolution(&self) -> f64 {
        self.azimuth_res.max(self.elevation_res).to_radians()
    }
}

/// Unit ray in the sensor frame: x forward, y left, z up. Azimuth turns toward
/// +y, elevation toward +z.
pub fn ray_direction(azimuth: f64, elevation: f64) -> Vec3 {
    let (sa, ca) = azimuth.sin_cos();
    let (se, ce) = elevation.sin_cos();
    Vec3::new(ce * ca, ce * sa, se)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn default_grid_is_600_by_150() {
        let s = SensorConfig::default();
        s.validate().unwrap();
        assert_eq!((s.rows(), s.cols()), (150, 600));
        assert_eq!(s.rows() * s.cols(), 90_000);
    }

    #[test]
    fn boresight_and_axis_rays() {
        assert_eq!(ray_direction(0.0, 0.0), Vec3::new(1.0, 0.0, 0.0));
        let left = ray_direction(FRAC_PI_2, 0.0);
        assert!((left - Vec3::new(0.0, 1.0, 0.0)).norm() < 1e-15);
        let up = ray_direction(0.0, FRAC_PI_2);
        assert!((up - Vec3::new(0.0, 0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn bin_centers_are_symmetric() {
        let s = SensorConfig::default();
        assert!((s.azimuth(0) + s.azimuth(s.cols() - 1)).abs() < 1e-12);
        assert!((s.elevation(0) + s.elevation(s.rows() - 1)).abs() < 1e-12);
        assert!(s.azimuth(0) > 0.0 && s.elevation(0) > 0.0);
        assert!((s.azimuth(0) - 59.9f64.to_radians()).abs() < 1e-12);
    }

    #[test]
    fn rejects_fractional_grid() {
        let s = SensorConfig {
            azimuth_res: 0.7,
            ..SensorConfig::default()
        };
        assert!(s.validate().is_err());
        let s = SensorConfig {
            max_range: 0.0,
            ..SensorConfig::default()
        };
        assert!(s.validate().is_err());
    }

    proptest! {
        #[test]
        fn rays_are_unit(az in -3.1f64..3.1, el in -1.5f64..1.5) {
            prop_assert!((ray_direction(az, el).norm() - 1.0).abs() < 1e-12);
        }
    }
}
