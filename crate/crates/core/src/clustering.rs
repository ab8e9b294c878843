//! Region growing on Doppler continuity over an organized frame.
//!
//! Neighboring returns on one rigid object differ in Doppler by at most
//! `(|v_object| + |v_sensor|) * θ_res`, while a moving object next to the
//! static background differs by `|v_object| * |cos φ|`. Growing regions with a
//! threshold between the two separates movers from the background in a single
//! pass over the grid.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::FrameGrid;

/// Inputs to the same-object Doppler bound plus a sensor-noise margin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ThresholdParams {
    /// Largest object speed to keep together, m/s.
    pub max_object_speed: f64,
    pub max_lidar_speed: f64,
    /// Angle between neighboring rays, radians.
    pub angular_res_theta: f64,
    /// Doppler noise σ of a single reading, m/s.
    pub noise_sigma: f64,
    pub noise_k: f64,
}

impl Default for ThresholdParams {
    /// 90 km/h for both object and sensor, 0.2° rays, 3σ of 0.031 m/s noise.
    fn default() -> Self {
        Self {
            max_object_speed: 25.0,
            max_lidar_speed: 25.0,
            angular_res_theta: 0.0034,
            noise_sigma: 0.031,
            noise_k: 3.0,
        }
    }
}

impl ThresholdParams {
    pub fn noise_free(mut self) -> Self {
        self.noise_sigma = 0.0;
        self.noise_k = 0.0;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("threshold.max_object_speed", self.max_object_speed),
            ("threshold.max_lidar_speed", self.max_lidar_speed),
            ("threshold.angular_res_theta", self.angular_res_theta),
            ("threshold.noise_sigma", self.noise_sigma),
            ("threshold.noise_k", self.noise_k),
        ] {
            if !(value.is_finite() && value >= 0.0) {
                return Err(Error::invalid(name, format!("must be non-negative, got {value}")));
            }
        }
        Ok(())
    }
}

/// Same-object Doppler bound plus `k·√2·σ`; the √2 covers the difference of
/// two independent noisy readings.
pub fn derive_threshold(p: &ThresholdParams) -> f64 {
    (p.max_object_speed + p.max_lidar_speed) * p.angular_res_theta
        + p.noise_k * std::f64::consts::SQRT_2 * p.noise_sigma
}

/// Ray directions, measured from the object's direction of travel, in which it
/// is indistinguishable from the static background.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlindZone {
    /// Half-width of each interval around ±90°, degrees.
    pub half_width_deg: f64,
}

impl BlindZone {
    pub fn is_empty(&self) -> bool {
        self.half_width_deg <= 0.0
    }

    /// `[90−δ, 90+δ]` and `[−90−δ, −90+δ]`, degrees.
    pub fn intervals(&self) -> [(f64, f64); 2] {
        let d = self.half_width_deg;
        [(90.0 - d, 90.0 + d), (-90.0 - d, -90.0 + d)]
    }

    pub fn contains(&self, angle_deg: f64) -> bool {
        !self.is_empty()
            && self
                .intervals()
                .iter()
                .any(|&(lo, hi)| angle_deg >= lo && angle_deg <= hi)
    }
}

/// Blind angles for an object moving at `target_speed` when the grower uses `v_th`.
pub fn blind_zone(target_speed: f64, v_th: f64) -> Result<BlindZone> {
    if v_th.is_nan() || v_th < 0.0 || !target_speed.is_finite() {
        return Err(Error::invalid(
            "v_th",
            format!("need a non-negative threshold, got {v_th}"),
        ));
    }
    if v_th >= target_speed {
        return Err(Error::NoBlindZone { target_speed, v_th });
    }
    let delta = 90.0 - (v_th / target_speed).acos().to_degrees();
    Ok(BlindZone { half_width_deg: delta })
}

pub const NO_CLUSTER: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SegmentParams {
    pub v_th: f64,
    /// Moving clusters smaller than this are kept but flagged.
    pub min_cluster_size: usize,
}

impl Default for SegmentParams {
    fn default() -> Self {
        Self {
            v_th: derive_threshold(&ThresholdParams::default()),
            min_cluster_size: 5,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct MovingCluster<'a> {
    pub id: u32,
    pub cells: &'a [usize],
    /// Fewer cells than `min_cluster_size`.
    pub undersized: bool,
}

/// Partition of a frame's valid cells into one static cluster and the moving rest.
///
/// Cluster ids are canonical: ascending by the smallest cell index each
/// cluster contains. Cell lists are sorted.
#[derive(Debug, Clone, PartialEq)]
pub struct Segmentation {
    /// Cluster id per cell, [`NO_CLUSTER`] for empty cells.
    pub labels: Vec<u32>,
    pub clusters: Vec<Vec<usize>>,
    pub static_id: u32,
    pub min_cluster_size: usize,
}

impl Segmentation {
    pub fn static_cluster(&self) -> &[usize] {
        &self.clusters[self.static_id as usize]
    }

    pub fn moving_clusters(&self) -> impl Iterator<Item = MovingCluster<'_>> + '_ {
        self.clusters
            .iter()
            .enumerate()
            .filter(move |(id, _)| *id as u32 != self.static_id)
            .map(move |(id, cells)| MovingCluster {
                id: id as u32,
                cells,
                undersized: cells.len() < self.min_cluster_size,
            })
    }

    pub fn moving_count(&self) -> usize {
        self.clusters.len() - 1
    }

    pub fn is_moving(&self, idx: usize) -> bool {
        let l = self.labels[idx];
        l != NO_CLUSTER && l != self.static_id
    }

    /// Per-cell motion prediction; `None` for empty cells.
    pub fn motion_labels(&self) -> Vec<Option<bool>> {
        self.labels
            .iter()
            .map(|&l| (l != NO_CLUSTER).then_some(l != self.static_id))
            .collect()
    }
}

pub fn segment(frame: &FrameGrid, v_th: f64) -> Result<Segmentation> {
    segment_with(
        frame,
        &SegmentParams {
            v_th,
            ..SegmentParams::default()
        },
    )
}

/// Grows regions over the 8-neighborhood, joining neighbors whose Doppler
/// differs by less than `v_th`. Empty cells stop growth. The largest cluster
/// is static; ties go to the lower id.
pub fn segment_with(frame: &FrameGrid, params: &SegmentParams) -> Result<Segmentation> {
    let v_th = params.v_th;
    if v_th.is_nan() || v_th <= 0.0 {
        return Err(Error::invalid("v_th", format!("must be positive, got {v_th}")));
    }
    let (rows, cols) = (frame.rows() as isize, frame.cols() as isize);
    let doppler: Vec<f64> = frame
        .cells()
        .iter()
        .map(|c| c.map_or(f64::NAN, |c| c.point.v))
        .collect();

    let mut labels = vec![NO_CLUSTER; doppler.len()];
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    let mut stack: Vec<usize> = Vec::new();

    for seed in 0..doppler.len() {
        if labels[seed] != NO_CLUSTER || doppler[seed].is_nan() {
            continue;
        }
        let id = clusters.len() as u32;
        let mut members = vec![seed];
        labels[seed] = id;
        stack.push(seed);
        while let Some(idx) = stack.pop() {
            let v = doppler[idx];
            let (r, c) = ((idx as isize) / cols, (idx as isize) % cols);
            for dr in -1..=1 {
                let nr = r + dr;
                if nr < 0 || nr >= rows {
                    continue;
                }
                for dc in -1..=1 {
                    let nc = c + dc;
                    if (dr == 0 && dc == 0) || nc < 0 || nc >= cols {
                        continue;
                    }
                    let n = (nr * cols + nc) as usize;
                    // NaN compares false, so empty cells never join.
                    if labels[n] == NO_CLUSTER && (doppler[n] - v).abs() < v_th {
                        labels[n] = id;
                        members.push(n);
                        stack.push(n);
                    }
                }
            }
        }
        members.sort_unstable();
        clusters.push(members);
    }

    if clusters.is_empty() {
        return Err(Error::EmptyFrame);
    }
    let mut static_id = 0;
    for (id, c) in clusters.iter().enumerate() {
        if c.len() > clusters[static_id].len() {
            static_id = id;
        }
    }
    Ok(Segmentation {
        labels,
        clusters,
        static_id: static_id as u32,
        min_cluster_size: params.min_cluster_size,
    })
}
