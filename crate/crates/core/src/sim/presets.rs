//! Synthetic stand-ins for the four recorded driving scenarios: two with a
//! parked sensor, two with a moving one. Geometry is invented; only the motion
//! patterns matter. Frames are meant to be sampled over the first 5 s.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use super::scene::{Pose, RigidObject, SceneSpec};
use crate::error::{Error, Result};
use crate::point::Vec3;

const SENSOR_HEIGHT: f64 = 1.8;
const CAR: [f64; 3] = [2.25, 0.9, 0.75];
const TRUCK: [f64; 3] = [4.0, 1.25, 1.6];
const PEDESTRIAN: [f64; 3] = [0.25, 0.25, 0.9];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    Intersection,
    TIntersection,
    StraightRoad,
    TurnStraightRoad,
}

impl Preset {
    pub const ALL: [Preset; 4] = [
        Preset::Intersection,
        Preset::TIntersection,
        Preset::StraightRoad,
        Preset::TurnStraightRoad,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Intersection => "intersection",
            Preset::TIntersection => "t_intersection",
            Preset::StraightRoad => "straight_road",
            Preset::TurnStraightRoad => "turn_straight_road",
        }
    }

    pub fn sensor_moves(self) -> bool {
        matches!(self, Preset::StraightRoad | Preset::TurnStraightRoad)
    }

    pub fn scene(self) -> SceneSpec {
        match self {
            Preset::Intersection => intersection(),
            Preset::TIntersection => t_intersection(),
            Preset::StraightRoad => straight_road(),
            Preset::TurnStraightRoad => turn_straight_road(),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::UnknownPreset(s.to_owned()))
    }
}

pub fn scene_preset(name: &str) -> Result<SceneSpec> {
    Ok(name.parse::<Preset>()?.scene())
}

fn vehicle(id: u32, size: [f64; 3], x: f64, y: f64, yaw: f64, v: [f64; 2]) -> RigidObject {
    RigidObject {
        id,
        center: Vec3::new(x, y, size[2]),
        half_extents: size.into(),
        yaw,
        velocity_world: Vec3::new(v[0], v[1], 0.0),
    }
}

fn building(id: u32, x: f64, y: f64, half: [f64; 3]) -> RigidObject {
    RigidObject {
        id,
        center: Vec3::new(x, y, half[2]),
        half_extents: half.into(),
        yaw: 0.0,
        velocity_world: Vec3::zeros(),
    }
}

fn parked_sensor(objects: Vec<RigidObject>) -> SceneSpec {
    SceneSpec {
        objects,
        ground_height: Some(0.0),
        sensor_pose: Pose::from_heading(Vec3::new(0.0, 0.0, SENSOR_HEIGHT), 0.0),
        sensor_velocity_world: Vec3::zeros(),
        sensor_yaw_rate: 0.0,
    }
}

/// Four-way crossing: oncoming, departing and turning cars plus pedestrians on
/// the sidewalks.
fn intersection() -> SceneSpec {
    let heading = 60f64.to_radians();
    parked_sensor(vec![
        vehicle(1, CAR, 70.0, 2.5, 0.0, [-10.0, 0.0]),
        vehicle(2, CAR, 12.0, -2.5, 0.0, [8.0, 0.0]),
        vehicle(3, CAR, 31.0, -9.0, heading, [5.0 * heading.cos(), 5.0 * heading.sin()]),
        vehicle(4, PEDESTRIAN, 10.0, 8.0, 0.0, [1.4, 0.0]),
        vehicle(5, PEDESTRIAN, 26.0, -8.0, 0.0, [1.3, 0.0]),
        vehicle(6, PEDESTRIAN, 45.0, -8.0, 0.0, [-1.2, 0.0]),
        building(100, 15.0, 17.0, [11.0, 8.0, 6.0]),
        building(101, 15.0, -17.0, [11.0, 8.0, 5.0]),
        building(102, 62.0, 18.0, [16.0, 9.0, 8.0]),
        building(103, 62.0, -18.0, [16.0, 9.0, 7.0]),
    ])
}

/// Sensor parked on the stem of a T, facing the cross road; all traffic moves
/// sideways across the field of view and passes through the boresight.
fn t_intersection() -> SceneSpec {
    let mut objects = vec![
        vehicle(1, CAR, 29.0, -40.0, FRAC_PI_2, [0.0, 10.0]),
        vehicle(2, TRUCK, 29.0, -78.0, FRAC_PI_2, [0.0, 10.0]),
        vehicle(3, CAR, 34.0, 26.0, FRAC_PI_2, [0.0, -8.0]),
        building(100, 0.0, 21.0, [8.0, 7.0, 5.0]),
        building(101, 0.0, -21.0, [8.0, 7.0, 6.0]),
    ];
    for (k, y) in (-80..=80).step_by(20).enumerate() {
        let height = 6.0 + 2.0 * (k % 3) as f64;
        objects.push(building(110 + k as u32, 46.0, y as f64, [6.0, 9.5, height]));
    }
    parked_sensor(objects)
}

fn street_blocks(first_id: u32, x_end: f64) -> Vec<RigidObject> {
    let mut out = Vec::new();
    let mut id = first_id;
    let mut x = 0.0;
    while x < x_end {
        for side in [1.0, -1.0] {
            let height = 5.0 + 3.0 * ((id % 4) as f64);
            out.push(building(id, x, side * 19.0, [10.0, 5.0, height]));
            id += 1;
        }
        x += 25.0;
    }
    out
}

/// Sensor driving straight at 15 m/s with traffic ahead, overtaking and oncoming.
/// Every object moves parallel to the road.
fn straight_road() -> SceneSpec {
    let mut objects = vec![
        vehicle(1, CAR, 35.0, 0.0, 0.0, [13.0, 0.0]),
        vehicle(2, CAR, 18.0, -3.5, 0.0, [18.0, 0.0]),
        vehicle(3, CAR, 150.0, 3.5, 0.0, [-12.0, 0.0]),
        vehicle(4, CAR, 210.0, 3.5, 0.0, [-12.0, 0.0]),
        vehicle(5, TRUCK, 175.0, 7.0, 0.0, [-10.0, 0.0]),
    ];
    objects.extend(street_blocks(100, 330.0));
    SceneSpec {
        objects,
        ground_height: Some(0.0),
        sensor_pose: Pose::from_heading(Vec3::new(0.0, 0.0, SENSOR_HEIGHT), 0.0),
        sensor_velocity_world: Vec3::new(15.0, 0.0, 0.0),
        sensor_yaw_rate: 0.0,
    }
}

/// Sensor on a left-hand curve at 12 m/s with forward, oncoming and crossing traffic.
fn turn_straight_road() -> SceneSpec {
    let objects = vec![
        vehicle(1, CAR, 25.0, 1.5, 0.18, [11.0, 2.0]),
        vehicle(2, CAR, 40.0, -3.0, 0.19, [13.0, 2.5]),
        vehicle(3, CAR, 130.0, 50.0, 0.31 + std::f64::consts::PI, [-11.0, -3.5]),
        vehicle(4, CAR, 70.0, -40.0, FRAC_PI_2, [0.0, 9.0]),
        building(100, 30.0, -18.0, [8.0, 5.0, 6.0]),
        building(101, 60.0, -12.0, [6.0, 4.0, 9.0]),
        building(102, 95.0, 5.0, [8.0, 6.0, 7.0]),
        building(103, 20.0, 25.0, [8.0, 6.0, 5.0]),
        building(104, 50.0, 45.0, [10.0, 6.0, 8.0]),
        building(105, 90.0, 62.0, [12.0, 6.0, 10.0]),
    ];
    SceneSpec {
        objects,
        ground_height: Some(0.0),
        sensor_pose: Pose::from_heading(Vec3::new(0.0, 0.0, SENSOR_HEIGHT), 0.0),
        sensor_velocity_world: Vec3::new(12.0, 0.0, 0.0),
        sensor_yaw_rate: 0.12,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{cast_frame, SensorConfig};

    #[test]
    fn names_round_trip() {
        for p in Preset::ALL {
            assert_eq!(p.name().parse::<Preset>().unwrap(), p);
            p.scene().validate().unwrap();
        }
        assert!(matches!(scene_preset("roundabout"), Err(Error::UnknownPreset(_))));
    }

    #[test]
    fn movement_status_matches_archetype() {
        assert_eq!(
            scene_preset("intersection").unwrap().sensor_velocity_world,
            Vec3::zeros()
        );
        assert_eq!(
            scene_preset("t_intersection").unwrap().sensor_velocity_world,
            Vec3::zeros()
        );
        let straight = scene_preset("straight_road").unwrap();
        assert!(straight.sensor_velocity_world.norm() > 0.0);
        let x = straight.sensor_pose.rotation.inverse() * Vec3::x();
        for o in straight.objects.iter().filter(|o| o.is_moving()) {
            assert!(
                o.velocity_world.cross(&x).norm() < 1e-12,
                "object {} not along the road",
                o.id
            );
        }
        assert!(scene_preset("turn_straight_road").unwrap().sensor_velocity_world.norm() > 0.0);
    }

    #[test]
    fn t_intersection_traffic_is_lateral() {
        let s = scene_preset("t_intersection").unwrap();
        for o in s.objects.iter().filter(|o| o.is_moving()) {
            assert_eq!(o.velocity_world.x, 0.0);
            assert!(o.velocity_world.y.abs() > 0.0);
        }
    }

    #[test]
    fn static_returns_dominate() {
        let sensor = SensorConfig::default();
        for p in Preset::ALL {
            let scene = p.scene();
            for frame_idx in (0..50).step_by(7) {
                let t = frame_idx as f64 / sensor.frame_rate;
                let frame = cast_frame(&scene.at_time(t), &sensor, frame_idx as u64);
                let moving = frame.cells().iter().flatten().filter(|c| c.truth_is_moving).count();
                let fixed = frame.valid_count() - moving;
                assert!(moving > 0, "{p} frame {frame_idx}: nothing moving in view");
                assert!(
                    fixed >= 10 * moving,
                    "{p} frame {frame_idx}: {fixed} static vs {moving} moving"
                );
            }
        }
    }
}
