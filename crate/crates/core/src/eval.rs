//! Classification metrics, velocity errors and timing against simulator truth.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::clustering::{segment_with, SegmentParams, Segmentation};
use crate::error::{Error, Result};
use crate::estimation::{estimate_frame, stream_seed, Conditioning, EstimatorParams, FrameEstimate};
use crate::point::Vec3;
use crate::sim::{cast_frame, FrameGrid, Pose, RigidObject, SceneSpec, SensorConfig};

/// Objects slower than this (m/s) count as static in the truth labels.
pub const MOVING_SPEED_THRESHOLD: f64 = 0.05;
/// Leading frames left out of timing statistics.
pub const WARMUP_FRAMES: usize = 3;

/// Motion is the positive class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub tn: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl ConfusionCounts {
    pub fn total(&self) -> u64 {
        self.tp + self.tn + self.fp + self.fn_
    }
}

impl std::ops::AddAssign for ConfusionCounts {
    fn add_assign(&mut self, o: Self) {
        self.tp += o.tp;
        self.tn += o.tn;
        self.fp += o.fp;
        self.fn_ += o.fn_;
    }
}

/// Cells where either side is `None` (no return) are not counted.
pub fn confusion(pred: &[Option<bool>], truth: &[Option<bool>]) -> Result<ConfusionCounts> {
    if pred.len() != truth.len() {
        return Err(Error::LengthMismatch {
            pred: pred.len(),
            truth: truth.len(),
        });
    }
    let mut c = ConfusionCounts::default();
    for (p, t) in pred.iter().zip(truth) {
        match (p, t) {
            (Some(true), Some(true)) => c.tp += 1,
            (Some(false), Some(false)) => c.tn += 1,
            (Some(true), Some(false)) => c.fp += 1,
            (Some(false), Some(true)) => c.fn_ += 1,
            _ => {}
        }
    }
    Ok(c)
}

/// `None` marks a metric whose denominator is zero.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub accuracy: Option<f64>,
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

pub fn metrics(c: &ConfusionCounts) -> Metrics {
    Metrics {
        precision: ratio(c.tp, c.tp + c.fp),
        recall: ratio(c.tp, c.tp + c.fn_),
        accuracy: ratio(c.tp + c.tn, c.total()),
    }
}

pub fn truth_motion_labels(frame: &FrameGrid) -> Vec<Option<bool>> {
    frame
        .cells()
        .iter()
        .map(|c| c.map(|c| c.truth_is_moving && c.truth_velocity.norm() > MOVING_SPEED_THRESHOLD))
        .collect()
}

/// Ids of moving objects with at least one return whose Doppler matches the
/// static background within `v_th`.
///
/// With `ego` (sensor velocity in sensor axes) the test uses the measured
/// Doppler against the static prediction `-e · ego`, so noise that pushes a
/// return into the background is counted. Without it, the noise-free
/// signature `|e · v_object|` is used.
pub fn blind_zone_objects(frame: &FrameGrid, v_th: f64, ego: Option<&Vec3>) -> Vec<u32> {
    let mut blind = std::collections::BTreeSet::new();
    for c in frame.cells().iter().flatten() {
        if c.truth_is_moving && c.truth_velocity.norm() > MOVING_SPEED_THRESHOLD {
            let e = c.point.direction();
            let signature = match ego {
                Some(ego) => c.point.v + e.dot(ego),
                None => e.dot(&c.truth_velocity),
            };
            if signature.abs() < v_th {
                blind.insert(c.truth_object_id);
            }
        }
    }
    blind.into_iter().collect()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub sensor: SensorConfig,
    pub segment: SegmentParams,
    pub estimator: EstimatorParams,
}

/// Per-frame evaluation record. Timings are kept apart from everything else
/// so reports can be compared across runs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrameRow {
    pub frame: usize,
    pub valid_cells: usize,
    pub counts: ConfusionCounts,
    pub metrics: Metrics,
    pub ego_estimate: Option<Vec3>,
    /// Estimate minus truth, sensor axes.
    pub ego_error: Option<Vec3>,
    pub moving_clusters: usize,
    pub truth_moving_objects: usize,
    pub blind_zone_objects: Vec<u32>,
    pub error: Option<String>,
    #[serde(skip)]
    pub cluster_time: Duration,
    #[serde(skip)]
    pub estimate_time: Duration,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObjectRow {
    pub frame: usize,
    pub cluster_id: u32,
    pub cluster_size: usize,
    pub undersized: bool,
    /// Most frequent truth id among the cluster's cells.
    pub truth_object_id: u32,
    /// Share of cells carrying that id.
    pub purity: f64,
    pub sample_count: usize,
    pub conditioning: Option<Conditioning>,
    pub estimate: Option<Vec3>,
    pub truth: Vec3,
    pub error: Option<Vec3>,
    pub failure: Option<String>,
}

impl ObjectRow {
    pub fn error_norm(&self) -> Option<f64> {
        self.error.map(|e| e.norm())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct TimingSummary {
    /// Frames that entered the statistics after warm-up.
    pub timed_frames: usize,
    /// Mean seconds per frame spent in segmentation.
    pub clustering_time: f64,
    /// Mean seconds per frame spent in velocity estimation.
    pub estimation_time: f64,
    pub max_clustering_time: f64,
    /// Valid cells segmented per second.
    pub points_per_second: f64,
    /// Moving clusters estimated per second of estimation time.
    pub objects_per_second: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub scene: String,
    pub frames: usize,
    pub failed_frames: usize,
    pub counts: ConfusionCounts,
    /// Pooled over all frames.
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub accuracy: Option<f64>,
    pub mean_frame_accuracy: Option<f64>,
    /// Root mean square of the ego error per axis.
    pub ego_error_rms: Option<Vec3>,
    pub ego_error_rms_norm: Option<f64>,
    /// (cluster size, error norm) per estimated object.
    pub per_object_errors: Vec<(usize, f64)>,
    pub timing: TimingSummary,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub report: EvalReport,
    pub frames: Vec<FrameRow>,
    pub objects: Vec<ObjectRow>,
}

/// Segments and estimates one frame, scoring the result against the truth
/// carried by the cells. `ego_truth` is the sensor velocity in sensor axes.
pub fn evaluate_frame(
    index: usize,
    frame: &FrameGrid,
    ego_truth: Option<Vec3>,
    cfg: &ExperimentConfig,
    seed: u64,
) -> (FrameRow, Vec<ObjectRow>) {
    let truth = truth_motion_labels(frame);
    let mut row = FrameRow {
        frame: index,
        valid_cells: frame.valid_count(),
        counts: ConfusionCounts::default(),
        metrics: Metrics::default(),
        ego_estimate: None,
        ego_error: None,
        moving_clusters: 0,
        truth_moving_objects: moving_object_ids(frame).len(),
        blind_zone_objects: blind_zone_objects(frame, cfg.segment.v_th, ego_truth.as_ref()),
        error: None,
        cluster_time: Duration::ZERO,
        estimate_time: Duration::ZERO,
    };

    let start = Instant::now();
    let seg = segment_with(frame, &cfg.segment);
    row.cluster_time = start.elapsed();
    let seg = match seg {
        Ok(s) => s,
        Err(e) => {
            row.error = Some(e.to_string());
            return (row, Vec::new());
        }
    };
    row.moving_clusters = seg.moving_count();
    row.counts = confusion(&seg.motion_labels(), &truth).expect("labels align with the grid");
    row.metrics = metrics(&row.counts);

    let start = Instant::now();
    let est = estimate_frame(frame, &seg, &cfg.estimator, seed);
    row.estimate_time = start.elapsed();
    let est = match est {
        Ok(e) => e,
        Err(e) => {
            row.error = Some(e.to_string());
            return (row, Vec::new());
        }
    };
    row.ego_estimate = Some(est.ego.velocity);
    row.ego_error = ego_truth.map(|t| est.ego.velocity - t);
    let objects = object_rows(index, frame, &seg, &est);
    (row, objects)
}

fn moving_object_ids(frame: &FrameGrid) -> std::collections::BTreeSet<u32> {
    frame
        .cells()
        .iter()
        .flatten()
        .filter(|c| c.truth_is_moving && c.truth_velocity.norm() > MOVING_SPEED_THRESHOLD)
        .map(|c| c.truth_object_id)
        .collect()
}

fn object_rows(index: usize, frame: &FrameGrid, seg: &Segmentation, est: &FrameEstimate) -> Vec<ObjectRow> {
    est.objects
        .iter()
        .map(|obj| {
            let cells = &seg.clusters[obj.cluster_id as usize];
            let mut tally: BTreeMap<u32, (usize, Vec3)> = BTreeMap::new();
            for c in cells.iter().filter_map(|&i| frame.cell(i)) {
                let e = tally.entry(c.truth_object_id).or_insert((0, c.truth_velocity));
                e.0 += 1;
            }
            // BTreeMap order makes the lowest id win ties.
            let (&id, &(count, truth)) = tally
                .iter()
                .max_by(|a, b| a.1 .0.cmp(&b.1 .0).then(b.0.cmp(a.0)))
                .expect("clusters are non-empty");
            let (estimate, failure) = match &obj.estimate {
                Ok(v) => (Some(v), None),
                Err(e) => (None, Some(e.to_string())),
            };
            ObjectRow {
                frame: index,
                cluster_id: obj.cluster_id,
                cluster_size: obj.cluster_size,
                undersized: obj.undersized,
                truth_object_id: id,
                purity: count as f64 / cells.len() as f64,
                sample_count: estimate.map_or(0, |e| e.sample_count),
                conditioning: estimate.map(|e| e.conditioning),
                estimate: estimate.map(|e| e.velocity),
                truth,
                error: estimate.map(|e| e.velocity - truth),
                failure,
            }
        })
        .collect()
}

/// Time of frame `index` under the sensor's frame rate.
pub fn frame_time(sensor: &SensorConfig, index: usize) -> f64 {
    index as f64 / sensor.frame_rate
}

/// Seed used to cast frame `index` of a run.
pub fn frame_seed(seed: u64, index: usize) -> u64 {
    stream_seed(seed, index as u64)
}

/// Simulates `frames` frames of `scene` and evaluates each one.
pub fn run_experiment(
    name: &str,
    scene: &SceneSpec,
    frames: usize,
    seed: u64,
    cfg: &ExperimentConfig,
) -> ExperimentOutput {
    let mut rows = Vec::with_capacity(frames);
    let mut objects = Vec::new();
    for i in 0..frames {
        let snap = scene.at_time(frame_time(&cfg.sensor, i));
        let fseed = frame_seed(seed, i);
        let grid = cast_frame(&snap, &cfg.sensor, fseed);
        let (row, objs) = evaluate_frame(i, &grid, Some(snap.ego_velocity()), cfg, fseed);
        rows.push(row);
        objects.extend(objs);
    }
    ExperimentOutput {
        report: summarize(name, &rows, &objects),
        frames: rows,
        objects,
    }
}

pub fn summarize(name: &str, rows: &[FrameRow], objects: &[ObjectRow]) -> EvalReport {
    let mut counts = ConfusionCounts::default();
    let mut acc = Vec::new();
    let mut ego_sq = Vec3::zeros();
    let mut ego_n = 0usize;
    for r in rows {
        counts += r.counts;
        if let Some(a) = r.metrics.accuracy {
            acc.push(a);
        }
        if let Some(e) = r.ego_error {
            ego_sq += e.component_mul(&e);
            ego_n += 1;
        }
    }
    let m = metrics(&counts);
    let ego_rms = (ego_n > 0).then(|| (ego_sq / ego_n as f64).map(f64::sqrt));

    let timed: Vec<&FrameRow> = rows.iter().skip(WARMUP_FRAMES).filter(|r| r.error.is_none()).collect();
    let mut timing = TimingSummary {
        timed_frames: timed.len(),
        ..TimingSummary::default()
    };
    if !timed.is_empty() {
        let cluster: f64 = timed.iter().map(|r| r.cluster_time.as_secs_f64()).sum();
        let estimate: f64 = timed.iter().map(|r| r.estimate_time.as_secs_f64()).sum();
        let cells: usize = timed.iter().map(|r| r.valid_cells).sum();
        let clusters: usize = timed.iter().map(|r| r.moving_clusters).sum();
        timing.clustering_time = cluster / timed.len() as f64;
        timing.estimation_time = estimate / timed.len() as f64;
        timing.max_clustering_time = timed.iter().map(|r| r.cluster_time.as_secs_f64()).fold(0.0, f64::max);
        timing.points_per_second = if cluster > 0.0 { cells as f64 / cluster } else { 0.0 };
        timing.objects_per_second = if estimate > 0.0 {
            clusters as f64 / estimate
        } else {
            0.0
        };
    }

    EvalReport {
        scene: name.to_owned(),
        frames: rows.len(),
        failed_frames: rows.iter().filter(|r| r.error.is_some()).count(),
        counts,
        precision: m.precision,
        recall: m.recall,
        accuracy: m.accuracy,
        mean_frame_accuracy: (!acc.is_empty()).then(|| acc.iter().sum::<f64>() / acc.len() as f64),
        ego_error_rms: ego_rms,
        ego_error_rms_norm: ego_rms.map(|v| v.norm()),
        per_object_errors: objects
            .iter()
            .filter_map(|o| o.error_norm().map(|e| (o.cluster_size, e)))
            .collect(),
        timing,
    }
}

/// Least-squares line through `(x, y)`: `(slope, intercept, r²)`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    (slope, my - slope * mx, r2)
}

/// Scene with `k` moving boxes spread across the field of view at 30 m, each
/// large enough to fill the per-object sample cap.
pub fn object_count_scene(k: usize) -> SceneSpec {
    let objects = (0..k)
        .map(|i| {
            let az = (52.5 - 7.5 * i as f64).to_radians();
            let speed = if i % 2 == 0 { 8.0 } else { -6.0 };
            RigidObject {
                id: i as u32 + 1,
                center: Vec3::new(30.0 * az.cos(), 30.0 * az.sin(), 1.5),
                half_extents: Vec3::new(1.2, 1.2, 1.5),
                yaw: az,
                velocity_world: Vec3::new(speed * az.cos(), speed * az.sin(), 0.0),
            }
        })
        .collect();
    SceneSpec {
        objects,
        ground_height: Some(0.0),
        sensor_pose: Pose::from_heading(Vec3::new(0.0, 0.0, 1.8), 0.0),
        sensor_velocity_world: Vec3::new(10.0, 0.0, 0.0),
        sensor_yaw_rate: 0.0,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingReport {
    /// (moving objects, median seconds for the whole estimation step).
    pub samples: Vec<(usize, f64)>,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Measured with no moving objects: the ego solve alone.
    pub ego_only_time: f64,
}

impl ScalingReport {
    /// Objects that fit in one frame period after the ego solve.
    pub fn objects_per_frame(&self, frame_rate: f64) -> f64 {
        ((1.0 / frame_rate - self.intercept) / self.slope).max(0.0)
    }
}

/// Times the estimation step against the number of moving objects, 0..=`max_objects`,
/// and fits a line over 1..=`max_objects`.
pub fn estimation_scaling(cfg: &ExperimentConfig, max_objects: usize, reps: usize, seed: u64) -> Result<ScalingReport> {
    let mut samples = Vec::new();
    for k in 0..=max_objects {
        let grid = cast_frame(&object_count_scene(k), &cfg.sensor, frame_seed(seed, k));
        let seg = segment_with(&grid, &cfg.segment)?;
        let mut times: Vec<f64> = (0..reps.max(1))
            .map(|_| {
                let start = Instant::now();
                let est = estimate_frame(&grid, &seg, &cfg.estimator, seed);
                let t = start.elapsed().as_secs_f64();
                std::hint::black_box(est).ok();
                t
            })
            .collect();
        times.sort_by(f64::total_cmp);
        samples.push((seg.moving_count(), times[times.len() / 2]));
    }
    let fit: Vec<_> = samples.iter().filter(|s| s.0 >= 1).collect();
    let xs: Vec<f64> = fit.iter().map(|s| s.0 as f64).collect();
    let ys: Vec<f64> = fit.iter().map(|s| s.1).collect();
    let (slope, intercept, r_squared) = linear_fit(&xs, &ys);
    Ok(ScalingReport {
        ego_only_time: samples[0].1,
        samples,
        slope,
        intercept,
        r_squared,
    })
}
