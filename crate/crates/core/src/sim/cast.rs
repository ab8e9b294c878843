use nalgebra::Rotation3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::grid::{CellRecord, FrameGrid};
use super::scene::{RigidObject, SceneSpec};
use super::sensor::SensorConfig;
use crate::point::{DopplerPoint, Vec3};

/// Radial Doppler speed seen along unit ray `e` (sensor frame) for a point
/// moving at `v_point_world` observed by a sensor moving at `v_lidar_world`.
/// `rotation` maps world to sensor axes.
pub fn doppler_velocity(e: &Vec3, v_point_world: &Vec3, v_lidar_world: &Vec3, rotation: &Rotation3<f64>) -> f64 {
    e.dot(&(rotation * (v_point_world - v_lidar_world)))
}

/// Box in its own frame, with the sensor origin pre-transformed into it.
struct BoxTarget {
    half: Vec3,
    cos_yaw: f64,
    sin_yaw: f64,
    origin: Vec3,
}

impl BoxTarget {
    fn new(obj: &RigidObject, sensor_origin: &Vec3) -> Self {
        let (sin_yaw, cos_yaw) = obj.yaw.sin_cos();
        let mut t = Self {
            half: obj.half_extents,
            cos_yaw,
            sin_yaw,
            origin: Vec3::zeros(),
        };
        t.origin = t.to_local(&(sensor_origin - obj.center));
        t
    }

    fn to_local(&self, v: &Vec3) -> Vec3 {
        Vec3::new(
            self.cos_yaw * v.x + self.sin_yaw * v.y,
            -self.sin_yaw * v.x + self.cos_yaw * v.y,
            v.z,
        )
    }

    /// Entry distance along `dir` (world frame), if the ray enters the box ahead of the origin.
    fn hit(&self, dir: &Vec3) -> Option<f64> {
        let d = self.to_local(dir);
        let mut t_min = f64::NEG_INFINITY;
        let mut t_max = f64::INFINITY;
        for i in 0..3 {
            let (o, di, h) = (self.origin[i], d[i], self.half[i]);
            if di.abs() < 1e-15 {
                if o.abs() > h {
                    return None;
                }
                continue;
            }
            let a = (-h - o) / di;
            let b = (h - o) / di;
            let (a, b) = if a < b { (a, b) } else { (b, a) };
            t_min = t_min.max(a);
            t_max = t_max.min(b);
            if t_min > t_max {
                return None;
            }
        }
        // Origin inside a box: the box is not visible.
        (t_min > 1e-9).then_some(t_min)
    }
}

fn row_rng(seed: u64, row: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(row as u64);
    rng
}

/// Ray-casts one organized frame of the scene.
///
/// Each cell holds the nearest box or ground hit within range. Range noise is
/// applied along the ray and Doppler noise is additive, both zero-mean
/// Gaussian. Noise for row `r` comes from ChaCha8 seeded with `seed` on stream
/// `r`, drawn in column order, so the frame does not depend on how rows are
/// scheduled across threads.
pub fn cast_frame(scene: &SceneSpec, sensor: &SensorConfig, seed: u64) -> FrameGrid {
    let (rows, cols) = (sensor.rows(), sensor.cols());
    if !scene.has_geometry() {
        return FrameGrid::empty(rows, cols);
    }
    let origin = scene.sensor_pose.position;
    let rotation = scene.sensor_pose.rotation;
    let to_world = rotation.inverse();
    let targets: Vec<BoxTarget> = scene.objects.iter().map(|o| BoxTarget::new(o, &origin)).collect();

    let mut cells = vec![None; rows * cols];
    cells.par_chunks_mut(cols).enumerate().for_each(|(row, out)| {
        let mut rng = row_rng(seed, row);
        let elevation = sensor.elevation(row);
        for (col, slot) in out.iter_mut().enumerate() {
            let e = super::ray_direction(sensor.azimuth(col), elevation);
            let dir = to_world * e;

            let mut nearest: Option<(f64, Option<usize>)> = None;
            if let Some(g) = scene.ground_height {
                if dir.z < 0.0 {
                    let t = (g - origin.z) / dir.z;
                    if t > 0.0 {
                        nearest = Some((t, None));
                    }
                }
            }
            for (k, target) in targets.iter().enumerate() {
                if let Some(t) = target.hit(&dir) {
                    if nearest.is_none_or(|(best, _)| t < best) {
                        nearest = Some((t, Some(k)));
                    }
                }
            }
            let Some((t, hit)) = nearest.filter(|&(t, _)| t <= sensor.max_range) else {
                continue;
            };

            let (id, v_world) = match hit {
                Some(k) => (scene.objects[k].id, scene.objects[k].velocity_world),
                None => (0, Vec3::zeros()),
            };
            let truth_doppler = doppler_velocity(&e, &v_world, &scene.sensor_velocity_world, &rotation);
            let n_range: f64 = rng.sample(StandardNormal);
            let n_doppler: f64 = rng.sample(StandardNormal);
            let range = (t + sensor.range_noise_sigma * n_range).clamp(0.0, sensor.max_range);
            let p = e * range;
            *slot = Some(CellRecord {
                point: DopplerPoint::new(p.x, p.y, p.z, truth_doppler + sensor.velocity_noise_sigma * n_doppler),
                truth_object_id: id,
                truth_velocity: rotation * v_world,
                truth_is_moving: v_world.norm() > 0.0,
            });
        }
    });
    FrameGrid::from_cells(rows, cols, cells)
}
