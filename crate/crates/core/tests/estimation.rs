use dopvel_core::clustering::segment_with;
use dopvel_core::eval::{frame_seed, frame_time};
use dopvel_core::sim::{cast_frame, Pose, RigidObject, SceneSpec};
use dopvel_core::{estimate_lidar_velocity, estimate_object_velocity, DopplerPoint, Preset, RunConfig, Vec3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn ego_errors(samples: usize) -> Vec<Vec3> {
    let cfg = RunConfig::default().experiment();
    let mut out = Vec::new();
    for (p, preset) in [Preset::StraightRoad, Preset::TurnStraightRoad].into_iter().enumerate() {
        let scene = preset.scene();
        for i in 0..50 {
            let snap = scene.at_time(frame_time(&cfg.sensor, i));
            let seed = frame_seed(p as u64, i);
            let grid = cast_frame(&snap, &cfg.sensor, seed);
            let seg = segment_with(&grid, &cfg.segment).unwrap();
            let est = estimate_lidar_velocity(&grid.points(seg.static_cluster()), samples, seed).unwrap();
            out.push(est.velocity - snap.ego_velocity());
        }
    }
    out
}

#[test]
fn ego_error_within_3_cm_s() {
    for (samples, percent) in [(1000, 95), (200, 90)] {
        let errs = ego_errors(samples);
        let within = errs.iter().filter(|e| e.norm() <= 0.03).count();
        assert!(
            within * 100 >= percent * errs.len(),
            "{samples} samples: {within}/{}",
            errs.len()
        );
    }
}

#[test]
fn ego_xy_tighter_than_z() {
    let errs = ego_errors(1000);
    let mean = |f: fn(&Vec3) -> f64| errs.iter().map(f).sum::<f64>() / errs.len() as f64;
    let (x, y, z) = (mean(|e| e.x.abs()), mean(|e| e.y.abs()), mean(|e| e.z.abs()));
    assert!(x <= z && y <= z, "x {x} y {y} z {z}");
}

/// A 4.2 m tall bus broadside to the sensor at 30 m.
#[test]
fn object_at_30_m() {
    let cfg = RunConfig::default().experiment();
    let mut errors = Vec::new();
    for trial in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(trial);
        let bearing = rng.random_range(-40.0f64..40.0).to_radians();
        let heading = bearing + std::f64::consts::FRAC_PI_2 + rng.random_range(-0.5..0.5);
        let speed = rng.random_range(3.0..15.0);
        let half = Vec3::new(5.5, 1.25, 2.1);
        let scene = SceneSpec {
            objects: vec![RigidObject {
                id: 1,
                center: Vec3::new(30.0 * bearing.cos(), 30.0 * bearing.sin(), half.z),
                half_extents: half,
                yaw: heading,
                velocity_world: Vec3::new(speed * heading.cos(), speed * heading.sin(), 0.0),
            }],
            ground_height: Some(0.0),
            sensor_pose: Pose::from_heading(Vec3::new(0.0, 0.0, 1.8), 0.0),
            sensor_velocity_world: Vec3::new(10.0, 0.0, 0.0),
            sensor_yaw_rate: 0.0,
        };
        let grid = cast_frame(&scene, &cfg.sensor, trial);
        let cluster: Vec<DopplerPoint> = grid
            .cells()
            .iter()
            .flatten()
            .filter(|c| c.truth_object_id == 1)
            .map(|c| c.point)
            .collect();
        assert!(cluster.len() >= 200);
        let est = estimate_object_velocity(&cluster, &scene.ego_velocity(), 200, trial).unwrap();
        errors.push((est.velocity - scene.objects[0].velocity_world).norm());
    }
    let within = errors.iter().filter(|&&e| e <= 0.1).count();
    errors.sort_by(f64::total_cmp);
    assert!(within >= 85, "{within}/100 within 0.1 m/s");
    assert!(errors[50] <= 0.05, "median {}", errors[50]);
}

#[test]
fn object_error_falls_with_sample_count() {
    // Returns from a 4.5 x 1.5 m face 15 m ahead, moving at (-6, 4, 0).
    let truth = Vec3::new(-6.0, 4.0, 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let sizes = [10usize, 25, 50, 100, 200];
    let mut mean_err = Vec::new();
    for &n in &sizes {
        let trials = 300;
        let mut total = 0.0;
        for t in 0..trials {
            let pts: Vec<DopplerPoint> = (0..n)
                .map(|_| {
                    let p = Vec3::new(15.0, rng.random_range(-2.25..2.25), rng.random_range(-1.5..0.0));
                    let e = p.normalize();
                    let noise: f64 = rng.sample(StandardNormal);
                    DopplerPoint::new(p.x, p.y, p.z, e.dot(&truth) + 0.031 * noise)
                })
                .collect();
            let est = estimate_object_velocity(&pts, &Vec3::zeros(), 200, t).unwrap();
            total += (est.velocity - truth).norm();
        }
        mean_err.push(total / trials as f64);
    }
    for w in mean_err.windows(2) {
        assert!(w[1] <= w[0] * 1.1, "{mean_err:?}");
    }
    assert!(mean_err[4] < mean_err[0] / 2.5, "{mean_err:?}");
}
