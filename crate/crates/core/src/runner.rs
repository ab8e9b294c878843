//! File-level operations behind the CLI subcommands.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::clustering::segment_with;
use crate::config::{RunConfig, Source};
use crate::error::{Error, Result};
use crate::estimation::{estimate_frame, Conditioning};
use crate::eval::{
    estimation_scaling, evaluate_frame, frame_seed, frame_time, run_experiment, summarize, EvalReport,
    ExperimentOutput, FrameRow, ObjectRow, ScalingReport, WARMUP_FRAMES,
};
use crate::frame_file::FrameFile;
use crate::point::Vec3;
use crate::sim::{cast_frame, FrameGrid};
use crate::waveform::{range_resolution, velocity_resolution};

pub const MANIFEST_SCHEMA: &str = "dopvel-manifest/1";
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub file: String,
    pub index: usize,
    pub time: f64,
    pub seed: u64,
    /// Sensor velocity in sensor axes at this frame.
    pub ego_velocity: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema: String,
    pub scene: String,
    /// Config used, without the output directory.
    pub config: RunConfig,
    pub frames: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn load(dir: &Path) -> Result<Self> {
        let path = dir.join(MANIFEST_FILE);
        let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        let m: Manifest = serde_json::from_str(&text).map_err(|source| Error::Json {
            path: path.clone(),
            source,
        })?;
        if m.schema != MANIFEST_SCHEMA {
            return Err(Error::invalid(
                "manifest.schema",
                format!("expected `{MANIFEST_SCHEMA}`"),
            ));
        }
        Ok(m)
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn scene_source(cfg: &RunConfig) -> Result<(String, crate::sim::SceneSpec)> {
    match cfg.source()? {
        Source::Scene { name, scene } => Ok((name, scene)),
        Source::FramesDir(_) => Err(Error::invalid("frames_dir", "simulate needs a preset or a scene file")),
    }
}

/// Writes `frame_NNNN.fdv` for each frame plus a manifest.
pub fn simulate(cfg: &RunConfig, out: &Path) -> Result<Manifest> {
    let (name, scene) = scene_source(cfg)?;
    create_dir(out)?;
    let mut entries = Vec::with_capacity(cfg.frames);
    for i in 0..cfg.frames {
        let time = frame_time(&cfg.sensor, i);
        let snap = scene.at_time(time);
        let seed = frame_seed(cfg.seed, i);
        let file = format!("frame_{i:04}.fdv");
        FrameFile {
            sensor: cfg.sensor,
            seed,
            grid: cast_frame(&snap, &cfg.sensor, seed),
        }
        .save(&out.join(&file))?;
        entries.push(ManifestEntry {
            file,
            index: i,
            time,
            seed,
            ego_velocity: snap.ego_velocity().into(),
        });
    }
    let manifest = Manifest {
        schema: MANIFEST_SCHEMA.to_owned(),
        scene: name,
        config: RunConfig {
            out_dir: None,
            ..cfg.clone()
        },
        frames: entries,
    };
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    write_text(&out.join(MANIFEST_FILE), &(json + "\n"))?;
    Ok(manifest)
}

fn evaluate_dir(cfg: &RunConfig, dir: &Path) -> Result<ExperimentOutput> {
    let manifest = Manifest::load(dir)?;
    let exp = cfg.experiment();
    let mut rows = Vec::new();
    let mut objects = Vec::new();
    for entry in manifest.frames.iter().take(cfg.frames) {
        let frame = FrameFile::load(&dir.join(&entry.file))?;
        let (row, objs) = evaluate_frame(
            entry.index,
            &frame.grid,
            Some(entry.ego_velocity.into()),
            &exp,
            entry.seed,
        );
        rows.push(row);
        objects.extend(objs);
    }
    Ok(ExperimentOutput {
        report: summarize(&manifest.scene, &rows, &objects),
        frames: rows,
        objects,
    })
}

/// Output of [`pipeline`].
#[derive(Debug, Clone)]
pub struct PipelineRun {
    pub output: ExperimentOutput,
    /// One message per frame that could not be processed.
    pub warnings: Vec<String>,
    pub files: Vec<PathBuf>,
}

/// Segments and estimates every frame, then writes the report, per-frame and
/// per-object CSVs, and plot data for each measured quantity.
pub fn pipeline(cfg: &RunConfig, out: &Path, json: bool) -> Result<PipelineRun> {
    let output = match cfg.source()? {
        Source::Scene { name, scene } => run_experiment(&name, &scene, cfg.frames, cfg.seed, &cfg.experiment()),
        Source::FramesDir(dir) => evaluate_dir(cfg, &dir)?,
    };
    create_dir(out)?;
    let mut files = Vec::new();
    let mut emit = |name: &str, rows: Vec<Vec<String>>| -> Result<()> {
        let path = out.join(name);
        let mut w = csv::Writer::from_path(&path)?;
        for r in rows {
            w.write_record(&r)?;
        }
        w.flush().map_err(|e| Error::io(&path, e))?;
        files.push(path);
        Ok(())
    };
    emit("frames.csv", frames_table(&output.frames))?;
    emit("objects.csv", objects_table(&output.objects))?;
    emit("clustering_metrics.csv", clustering_metrics_table(&output.frames))?;
    emit("clustering_time.csv", clustering_time_table(&output.frames))?;
    emit("ego_error.csv", ego_error_table(&output.frames))?;
    emit("object_error.csv", object_error_table(&output.objects))?;
    emit("estimation_time.csv", estimation_time_table(&output.frames))?;

    let text = report_text(&output.report, cfg);
    let path = out.join("report.txt");
    write_text(&path, &text)?;
    files.push(path);
    if json {
        let path = out.join("report.json");
        write_text(&path, &(report_json(&output.report, cfg) + "\n"))?;
        files.push(path);
    }
    let warnings = output
        .frames
        .iter()
        .filter_map(|r| r.error.as_ref().map(|e| format!("frame {}: {e}", r.frame)))
        .collect();
    Ok(PipelineRun {
        output,
        warnings,
        files,
    })
}

pub fn report_json(report: &EvalReport, cfg: &RunConfig) -> String {
    let value = serde_json::json!({
        "report": report,
        "v_th": cfg.v_th(),
        "range_resolution": range_resolution(&cfg.waveform),
        "velocity_resolution": velocity_resolution(&cfg.waveform),
    });
    serde_json::to_string_pretty(&value).expect("report serializes")
}

fn opt(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn ms(d: std::time::Duration) -> String {
    (d.as_secs_f64() * 1e3).to_string()
}

fn vec_cols(v: Option<Vec3>) -> [String; 3] {
    [0, 1, 2].map(|i| opt(v.map(|v| v[i])))
}

fn header(cols: &[&str]) -> Vec<String> {
    cols.iter().map(|s| s.to_string()).collect()
}

fn frames_table(rows: &[FrameRow]) -> Vec<Vec<String>> {
    let mut out = vec![header(&[
        "frame",
        "tp",
        "tn",
        "fp",
        "fn",
        "precision",
        "recall",
        "accuracy",
        "ego_err_x",
        "ego_err_y",
        "ego_err_z",
        "cluster_ms",
        "estimate_ms",
    ])];
    for r in rows {
        let mut row = vec![
            r.frame.to_string(),
            r.counts.tp.to_string(),
            r.counts.tn.to_string(),
            r.counts.fp.to_string(),
            r.counts.fn_.to_string(),
            opt(r.metrics.precision),
            opt(r.metrics.recall),
            opt(r.metrics.accuracy),
        ];
        row.extend(vec_cols(r.ego_error));
        row.extend([ms(r.cluster_time), ms(r.estimate_time)]);
        out.push(row);
    }
    out
}

fn conditioning_name(c: Option<Conditioning>) -> String {
    match c {
        Some(Conditioning::WellConditioned) => "well_conditioned".into(),
        Some(Conditioning::RankDeficient) => "rank_deficient".into(),
        None => String::new(),
    }
}

fn objects_table(rows: &[ObjectRow]) -> Vec<Vec<String>> {
    let mut out = vec![header(&[
        "frame",
        "cluster_id",
        "cluster_size",
        "undersized",
        "truth_object_id",
        "purity",
        "sample_count",
        "conditioning",
        "est_vx",
        "est_vy",
        "est_vz",
        "truth_vx",
        "truth_vy",
        "truth_vz",
        "err_x",
        "err_y",
        "err_z",
        "err_norm",
        "failure",
    ])];
    for o in rows {
        let mut row = vec![
            o.frame.to_string(),
            o.cluster_id.to_string(),
            o.cluster_size.to_string(),
            o.undersized.to_string(),
            o.truth_object_id.to_string(),
            o.purity.to_string(),
            o.sample_count.to_string(),
            conditioning_name(o.conditioning),
        ];
        row.extend(vec_cols(o.estimate));
        row.extend(vec_cols(Some(o.truth)));
        row.extend(vec_cols(o.error));
        row.push(opt(o.error_norm()));
        row.push(o.failure.clone().unwrap_or_default());
        out.push(row);
    }
    out
}

fn clustering_metrics_table(rows: &[FrameRow]) -> Vec<Vec<String>> {
    let mut out = vec![header(&[
        "frame",
        "precision",
        "recall",
        "accuracy",
        "moving_clusters",
        "truth_moving_objects",
        "blind_zone_objects",
    ])];
    for r in rows {
        let blind: Vec<String> = r.blind_zone_objects.iter().map(|id| id.to_string()).collect();
        out.push(vec![
            r.frame.to_string(),
            opt(r.metrics.precision),
            opt(r.metrics.recall),
            opt(r.metrics.accuracy),
            r.moving_clusters.to_string(),
            r.truth_moving_objects.to_string(),
            blind.join(";"),
        ]);
    }
    out
}

fn clustering_time_table(rows: &[FrameRow]) -> Vec<Vec<String>> {
    let mut out = vec![header(&[
        "frame",
        "warmup",
        "valid_cells",
        "cluster_ms",
        "points_per_second",
    ])];
    for r in rows {
        let secs = r.cluster_time.as_secs_f64();
        let pps = if secs > 0.0 { r.valid_cells as f64 / secs } else { 0.0 };
        out.push(vec![
            r.frame.to_string(),
            ((r.frame < WARMUP_FRAMES) as u8).to_string(),
            r.valid_cells.to_string(),
            ms(r.cluster_time),
            pps.to_string(),
        ]);
    }
    out
}

fn ego_error_table(rows: &[FrameRow]) -> Vec<Vec<String>> {
    let mut out = vec![header(&[
        "frame",
        "ego_err_x",
        "ego_err_y",
        "ego_err_z",
        "ego_err_norm",
    ])];
    for r in rows.iter().filter(|r| r.ego_error.is_some()) {
        let mut row = vec![r.frame.to_string()];
        row.extend(vec_cols(r.ego_error));
        row.push(opt(r.ego_error.map(|e| e.norm())));
        out.push(row);
    }
    out
}

fn object_error_table(rows: &[ObjectRow]) -> Vec<Vec<String>> {
    let mut out = vec![header(&[
        "frame",
        "cluster_size",
        "sample_count",
        "purity",
        "err_norm",
        "err_x",
        "err_y",
        "err_z",
    ])];
    for o in rows.iter().filter(|o| o.error.is_some()) {
        let mut row = vec![
            o.frame.to_string(),
            o.cluster_size.to_string(),
            o.sample_count.to_string(),
            o.purity.to_string(),
            opt(o.error_norm()),
        ];
        row.extend(vec_cols(o.error));
        out.push(row);
    }
    out
}

fn estimation_time_table(rows: &[FrameRow]) -> Vec<Vec<String>> {
    let mut out = vec![header(&["frame", "warmup", "moving_objects", "estimate_ms"])];
    for r in rows.iter().filter(|r| r.error.is_none()) {
        out.push(vec![
            r.frame.to_string(),
            ((r.frame < WARMUP_FRAMES) as u8).to_string(),
            r.moving_clusters.to_string(),
            ms(r.estimate_time),
        ]);
    }
    out
}

fn fmt_opt(v: Option<f64>, digits: usize) -> String {
    v.map_or("undefined".into(), |v| format!("{v:.digits$}"))
}

pub fn report_text(r: &EvalReport, cfg: &RunConfig) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "scene                {}", r.scene);
    let _ = writeln!(s, "frames               {} ({} failed)", r.frames, r.failed_frames);
    let _ = writeln!(s, "threshold v_th       {:.4} m/s", cfg.v_th());
    let _ = writeln!(
        s,
        "resolution           {:.4} m, {:.4} m/s",
        range_resolution(&cfg.waveform),
        velocity_resolution(&cfg.waveform)
    );
    let c = r.counts;
    let _ = writeln!(
        s,
        "confusion            tp={} tn={} fp={} fn={}",
        c.tp, c.tn, c.fp, c.fn_
    );
    let _ = writeln!(s, "precision            {}", fmt_opt(r.precision, 5));
    let _ = writeln!(s, "recall               {}", fmt_opt(r.recall, 5));
    let _ = writeln!(s, "accuracy             {}", fmt_opt(r.accuracy, 5));
    let _ = writeln!(s, "mean frame accuracy  {}", fmt_opt(r.mean_frame_accuracy, 5));
    if let Some(e) = r.ego_error_rms {
        let _ = writeln!(s, "ego error rms        x={:.4} y={:.4} z={:.4} m/s", e.x, e.y, e.z);
    }
    if !r.per_object_errors.is_empty() {
        let mut errs: Vec<f64> = r.per_object_errors.iter().map(|e| e.1).collect();
        errs.sort_by(f64::total_cmp);
        let _ = writeln!(
            s,
            "object error         median={:.4} m/s over {} estimates",
            errs[errs.len() / 2],
            errs.len()
        );
    }
    let t = &r.timing;
    let _ = writeln!(
        s,
        "clustering           {:.3} ms/frame mean, {:.3} ms max, {:.2} M points/s",
        t.clustering_time * 1e3,
        t.max_clustering_time * 1e3,
        t.points_per_second / 1e6
    );
    let _ = writeln!(
        s,
        "estimation           {:.3} ms/frame mean, {:.0} objects/s",
        t.estimation_time * 1e3,
        t.objects_per_second
    );
    s
}

#[derive(Debug, Clone, Serialize)]
pub struct ClusterSummary {
    pub id: u32,
    pub size: usize,
    pub undersized: bool,
    pub mean_doppler: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SegmentSummary {
    pub rows: usize,
    pub cols: usize,
    pub valid_cells: usize,
    pub v_th: f64,
    pub static_size: usize,
    pub moving: Vec<ClusterSummary>,
}

fn load_grid(path: &Path) -> Result<FrameGrid> {
    Ok(FrameFile::load(path)?.grid)
}

/// Segments one frame file. With `labels_out`, writes `row,col,cluster,moving` per valid cell.
pub fn segment_file(cfg: &RunConfig, frame: &Path, labels_out: Option<&Path>) -> Result<SegmentSummary> {
    let grid = load_grid(frame)?;
    let exp = cfg.experiment();
    let seg = segment_with(&grid, &exp.segment)?;
    if let Some(path) = labels_out {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["row", "col", "cluster", "moving"])?;
        for (idx, &label) in seg.labels.iter().enumerate() {
            if label != crate::clustering::NO_CLUSTER {
                let (r, c) = (idx / grid.cols(), idx % grid.cols());
                w.write_record([
                    r.to_string(),
                    c.to_string(),
                    label.to_string(),
                    seg.is_moving(idx).to_string(),
                ])?;
            }
        }
        w.flush().map_err(|e| Error::io(path, e))?;
    }
    Ok(SegmentSummary {
        rows: grid.rows(),
        cols: grid.cols(),
        valid_cells: grid.valid_count(),
        v_th: exp.segment.v_th,
        static_size: seg.static_cluster().len(),
        moving: seg
            .moving_clusters()
            .map(|c| ClusterSummary {
                id: c.id,
                size: c.cells.len(),
                undersized: c.undersized,
                mean_doppler: grid.points(c.cells).iter().map(|p| p.v).sum::<f64>() / c.cells.len() as f64,
            })
            .collect(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ObjectVelocity {
    pub cluster_id: u32,
    pub cluster_size: usize,
    pub undersized: bool,
    pub velocity: Option<[f64; 3]>,
    pub residual_rms: Option<f64>,
    pub sample_count: usize,
    pub conditioning: Option<Conditioning>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EstimateSummary {
    pub ego_velocity: [f64; 3],
    pub ego_residual_rms: f64,
    pub ego_samples: usize,
    pub ego_conditioning: Conditioning,
    pub objects: Vec<ObjectVelocity>,
}

/// Segments one frame file and estimates ego and object velocities.
pub fn estimate_file(cfg: &RunConfig, frame: &Path) -> Result<EstimateSummary> {
    let file = FrameFile::load(frame)?;
    let exp = cfg.experiment();
    let seg = segment_with(&file.grid, &exp.segment)?;
    let est = estimate_frame(&file.grid, &seg, &exp.estimator, file.seed)?;
    Ok(EstimateSummary {
        ego_velocity: est.ego.velocity.into(),
        ego_residual_rms: est.ego.residual_rms,
        ego_samples: est.ego.sample_count,
        ego_conditioning: est.ego.conditioning,
        objects: est
            .objects
            .iter()
            .map(|o| {
                let ok = o.estimate.as_ref().ok();
                ObjectVelocity {
                    cluster_id: o.cluster_id,
                    cluster_size: o.cluster_size,
                    undersized: o.undersized,
                    velocity: ok.map(|e| e.velocity.into()),
                    residual_rms: ok.map(|e| e.residual_rms),
                    sample_count: ok.map_or(0, |e| e.sample_count),
                    conditioning: ok.map(|e| e.conditioning),
                    error: o.estimate.as_ref().err().map(|e| e.to_string()),
                }
            })
            .collect(),
    })
}

/// Lossless text dump of a frame file. Floats use the shortest representation
/// that parses back to the same bits.
pub fn export_csv(frame: &Path, out: &Path) -> Result<usize> {
    let file = FrameFile::load(frame)?;
    let g = &file.grid;
    let mut w = csv::Writer::from_path(out)?;
    w.write_record([
        "row",
        "col",
        "valid",
        "x",
        "y",
        "z",
        "v",
        "object_id",
        "truth_vx",
        "truth_vy",
        "truth_vz",
        "moving",
    ])?;
    for (idx, cell) in g.cells().iter().enumerate() {
        let (r, c) = (idx / g.cols(), idx % g.cols());
        let mut rec = vec![r.to_string(), c.to_string()];
        match cell {
            None => {
                rec.push("0".into());
                rec.extend(std::iter::repeat_n(String::new(), 9));
            }
            Some(cell) => {
                rec.push("1".into());
                let p = cell.point;
                rec.extend([p.x, p.y, p.z, p.v].map(|f| f.to_string()));
                rec.push(cell.truth_object_id.to_string());
                rec.extend(cell.truth_velocity.iter().map(|f| f.to_string()));
                rec.push((cell.truth_is_moving as u8).to_string());
            }
        }
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io(out, e))?;
    Ok(g.len())
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub frames: usize,
    pub cells_per_frame: usize,
    pub mean_valid_cells: f64,
    pub segment_ms_mean: f64,
    pub segment_ms_max: f64,
    /// Valid returns segmented per second.
    pub points_per_second: f64,
    /// Grid cells (valid or not) traversed per second.
    pub cells_per_second: f64,
    pub estimate_ms_mean: f64,
    pub objects_per_second: f64,
    pub scaling: ScalingReport,
    pub realtime_objects_per_scan: f64,
    pub realtime_objects_per_second: f64,
    /// Segment time on a grid with twice the rows, over the base time.
    pub doubling_ratio: f64,
}

/// Two copies of `grid` stacked vertically.
pub fn stack_rows(grid: &FrameGrid) -> FrameGrid {
    let mut cells = grid.cells().to_vec();
    cells.extend_from_slice(grid.cells());
    FrameGrid::from_cells(grid.rows() * 2, grid.cols(), cells)
}

fn median_segment_time(grid: &FrameGrid, cfg: &crate::eval::ExperimentConfig, reps: usize) -> Result<f64> {
    let mut t = Vec::with_capacity(reps);
    for _ in 0..reps {
        let start = Instant::now();
        let seg = segment_with(grid, &cfg.segment)?;
        t.push(start.elapsed().as_secs_f64());
        std::hint::black_box(seg);
    }
    t.sort_by(f64::total_cmp);
    Ok(t[t.len() / 2])
}

/// Throughput of segmentation and estimation over `frames` timed frames
/// (at least 100), after [`WARMUP_FRAMES`] untimed ones.
pub fn bench(cfg: &RunConfig, frames: usize) -> Result<BenchReport> {
    let frames = frames.max(100);
    let exp = cfg.experiment();
    let grids: Vec<(FrameGrid, u64)> = match cfg.source()? {
        Source::Scene { scene, .. } => {
            // A short clip reused cyclically; segmentation cost depends on the grid, not on time.
            let clip = frames.min(20);
            (0..clip)
                .map(|i| {
                    let seed = frame_seed(cfg.seed, i);
                    (
                        cast_frame(&scene.at_time(frame_time(&cfg.sensor, i)), &cfg.sensor, seed),
                        seed,
                    )
                })
                .collect()
        }
        Source::FramesDir(dir) => {
            let manifest = Manifest::load(&dir)?;
            manifest
                .frames
                .iter()
                .map(|e| Ok((load_grid(&dir.join(&e.file))?, e.seed)))
                .collect::<Result<_>>()?
        }
    };
    if grids.is_empty() {
        return Err(Error::invalid("frames", "no frames to benchmark"));
    }

    let mut rows = Vec::new();
    for i in 0..frames + WARMUP_FRAMES {
        let (grid, seed) = &grids[i % grids.len()];
        let (row, _) = evaluate_frame(i, grid, None, &exp, *seed);
        rows.push(row);
    }
    let timed: Vec<&FrameRow> = rows.iter().skip(WARMUP_FRAMES).filter(|r| r.error.is_none()).collect();
    if timed.is_empty() {
        return Err(Error::EmptyFrame);
    }
    let n = timed.len() as f64;
    let seg_total: f64 = timed.iter().map(|r| r.cluster_time.as_secs_f64()).sum();
    let est_total: f64 = timed.iter().map(|r| r.estimate_time.as_secs_f64()).sum();
    let valid: usize = timed.iter().map(|r| r.valid_cells).sum();
    let objects: usize = timed.iter().map(|r| r.moving_clusters).sum();
    let cells_per_frame = grids[0].0.len();

    let scaling = estimation_scaling(&exp, 15, 50, cfg.seed)?;
    let base = &grids[0].0;
    let doubled = stack_rows(base);
    let doubling_ratio = median_segment_time(&doubled, &exp, 21)? / median_segment_time(base, &exp, 21)?;

    Ok(BenchReport {
        frames: timed.len(),
        cells_per_frame,
        mean_valid_cells: valid as f64 / n,
        segment_ms_mean: seg_total / n * 1e3,
        segment_ms_max: timed.iter().map(|r| r.cluster_time.as_secs_f64()).fold(0.0, f64::max) * 1e3,
        points_per_second: valid as f64 / seg_total,
        cells_per_second: cells_per_frame as f64 * n / seg_total,
        estimate_ms_mean: est_total / n * 1e3,
        objects_per_second: if est_total > 0.0 {
            objects as f64 / est_total
        } else {
            0.0
        },
        realtime_objects_per_scan: scaling.objects_per_frame(cfg.sensor.frame_rate),
        realtime_objects_per_second: scaling.objects_per_frame(cfg.sensor.frame_rate) * cfg.sensor.frame_rate,
        scaling,
        doubling_ratio,
    })
}

pub fn bench_text(b: &BenchReport) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "frames timed         {} ({} cells each, {:.0} valid on average)",
        b.frames, b.cells_per_frame, b.mean_valid_cells
    );
    let _ = writeln!(
        s,
        "segment              {:.3} ms/frame mean, {:.3} ms max",
        b.segment_ms_mean, b.segment_ms_max
    );
    let _ = writeln!(
        s,
        "segment throughput   {:.2} M points/s, {:.2} M cells/s",
        b.points_per_second / 1e6,
        b.cells_per_second / 1e6
    );
    let _ = writeln!(
        s,
        "estimate             {:.3} ms/frame mean, {:.0} objects/s",
        b.estimate_ms_mean, b.objects_per_second
    );
    let sc = &b.scaling;
    let _ = writeln!(
        s,
        "estimate vs objects  {:.1} µs + {:.1} µs/object (r² = {:.3}); ego only {:.1} µs",
        sc.intercept * 1e6,
        sc.slope * 1e6,
        sc.r_squared,
        sc.ego_only_time * 1e6
    );
    let _ = writeln!(
        s,
        "real-time budget     {:.0} objects/scan, {:.0} objects/s",
        b.realtime_objects_per_scan, b.realtime_objects_per_second
    );
    let _ = writeln!(s, "2× cells             {:.2}× segment time", b.doubling_ratio);
    s
}
