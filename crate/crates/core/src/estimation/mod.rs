//! Ego and object velocity from Doppler returns by linear least squares.
//!
//! For a static point the Doppler reading is `v_i = −e_i · v_self`, so the
//! static cluster gives `v_self` as the solution of `A v_self ≈ −V`. A moving
//! cluster satisfies `v_i = e_i · (v_model − v_self)`, giving `v_model` from
//! `A v_model ≈ V + A v_self` with `v_self` held fixed.

mod lstsq;

pub use lstsq::{solve_linear_ls, Conditioning, LsSolution, RANK_TOLERANCE};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::clustering::Segmentation;
use crate::error::{Error, Result};
use crate::point::{DopplerPoint, Vec3};
use crate::sim::FrameGrid;

/// Sample caps for the two solves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimatorParams {
    /// Static-cluster cap.
    pub num_th_s: usize,
    /// Per-object cap.
    pub num_th_m: usize,
}

impl Default for EstimatorParams {
    fn default() -> Self {
        Self {
            num_th_s: 1000,
            num_th_m: 200,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VelocityEstimate {
    pub velocity: Vec3,
    pub residual_rms: f64,
    pub sample_count: usize,
    pub conditioning: Conditioning,
}

/// Rows of unit ray directions with their Doppler readings.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ObservationSet {
    pub directions: Vec<[f64; 3]>,
    pub dopplers: Vec<f64>,
}

impl ObservationSet {
    /// Points at the sensor origin carry no direction and are dropped.
    pub fn from_points(points: &[DopplerPoint]) -> Self {
        let mut out = Self {
            directions: Vec::with_capacity(points.len()),
            dopplers: Vec::with_capacity(points.len()),
        };
        for p in points {
            let r = p.range();
            if r > 1e-9 {
                out.directions.push([p.x / r, p.y / r, p.z / r]);
                out.dopplers.push(p.v);
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.dopplers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dopplers.is_empty()
    }
}

/// Uniform random subset of `max_n` items without replacement, in input
/// order. Inputs no larger than `max_n` come back unchanged.
pub fn downsample<T: Clone>(items: &[T], max_n: usize, seed: u64) -> Vec<T> {
    assert!(max_n >= 1, "max_n must be at least 1");
    if items.len() <= max_n {
        return items.to_vec();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = rand::seq::index::sample(&mut rng, items.len(), max_n).into_vec();
    picked.sort_unstable();
    picked.into_iter().map(|i| items[i].clone()).collect()
}

/// SplitMix64 finalizer over `(root, stream)`; gives each cluster its own seed.
pub fn stream_seed(root: u64, stream: u64) -> u64 {
    let mut z = root ^ stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn solve(obs: &ObservationSet, rhs: Vec<f64>) -> Result<VelocityEstimate> {
    if obs.len() < 3 {
        return Err(Error::InsufficientPoints(obs.len()));
    }
    let s = solve_linear_ls(&obs.directions, &rhs);
    Ok(VelocityEstimate {
        velocity: s.x,
        residual_rms: s.residual_rms,
        sample_count: obs.len(),
        conditioning: s.conditioning,
    })
}

/// Sensor velocity in sensor axes from points on the static background.
pub fn estimate_lidar_velocity(static_points: &[DopplerPoint], max_n: usize, seed: u64) -> Result<VelocityEstimate> {
    let obs = ObservationSet::from_points(&downsample(static_points, max_n, seed));
    let rhs = obs.dopplers.iter().map(|v| -v).collect();
    solve(&obs, rhs)
}

/// Absolute object velocity in sensor axes, given the sensor's own velocity.
pub fn estimate_object_velocity(
    cluster_points: &[DopplerPoint],
    v_self: &Vec3,
    max_n: usize,
    seed: u64,
) -> Result<VelocityEstimate> {
    let obs = ObservationSet::from_points(&downsample(cluster_points, max_n, seed));
    let rhs = obs
        .directions
        .iter()
        .zip(&obs.dopplers)
        .map(|(e, v)| v + e[0] * v_self.x + e[1] * v_self.y + e[2] * v_self.z)
        .collect();
    solve(&obs, rhs)
}

#[derive(Debug)]
pub struct ObjectEstimate {
    pub cluster_id: u32,
    pub cluster_size: usize,
    pub undersized: bool,
    pub estimate: Result<VelocityEstimate>,
}

#[derive(Debug)]
pub struct FrameEstimate {
    pub ego: VelocityEstimate,
    pub objects: Vec<ObjectEstimate>,
}

/// Ego velocity from the static cluster, then every moving cluster against it.
/// Cluster `k` draws its subsample from `stream_seed(seed, k + 1)`; the ego
/// solve uses stream 0.
pub fn estimate_frame(
    frame: &FrameGrid,
    seg: &Segmentation,
    params: &EstimatorParams,
    seed: u64,
) -> Result<FrameEstimate> {
    // Picking cell indices first selects the same points as downsampling the
    // gathered points, without copying the whole background.
    let ego_seed = stream_seed(seed, 0);
    let ego = estimate_lidar_velocity(
        &frame.points(&downsample(seg.static_cluster(), params.num_th_s, ego_seed)),
        params.num_th_s,
        ego_seed,
    )?;
    let objects = seg
        .moving_clusters()
        .map(|c| ObjectEstimate {
            cluster_id: c.id,
            cluster_size: c.cells.len(),
            undersized: c.undersized,
            estimate: {
                let cluster_seed = stream_seed(seed, c.id as u64 + 1);
                estimate_object_velocity(
                    &frame.points(&downsample(c.cells, params.num_th_m, cluster_seed)),
                    &ego.velocity,
                    params.num_th_m,
                    cluster_seed,
                )
            },
        })
        .collect();
    Ok(FrameEstimate { ego, objects })
}
