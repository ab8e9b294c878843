use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use dopvel_core::frame_file::FrameFile;
use dopvel_core::sim::{Pose, SceneSpec};
use dopvel_core::Vec3;
use serde_json::Value;

fn dopvel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dopvel"))
        .args(args)
        .env_remove("DOPVEL_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stderr_json(out: &Output) -> Value {
    let text = String::from_utf8_lossy(&out.stderr);
    let line = text.lines().last().unwrap_or_default();
    serde_json::from_str(line).unwrap_or_else(|_| panic!("stderr is not JSON: {text}"))
}

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().into_string().unwrap(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    v.sort();
    v
}

fn simulate(dir: &Path, preset: &str, frames: usize) {
    let out = dopvel(&[
        "--seed",
        "3",
        "--out",
        path_str(dir),
        "simulate",
        "--preset",
        preset,
        "--frames",
        &frames.to_string(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn simulate_writes_frames_and_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    simulate(tmp.path(), "straight_road", 10);
    let names: Vec<String> = files(tmp.path()).into_iter().map(|f| f.0).collect();
    assert_eq!(names.len(), 11);
    assert!(names.contains(&"manifest.json".to_owned()));
    let frame = FrameFile::load(&tmp.path().join("frame_0009.fdv")).unwrap();
    assert_eq!((frame.grid.rows(), frame.grid.cols()), (150, 600));

    let manifest: Value = serde_json::from_slice(&std::fs::read(tmp.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["frames"].as_array().unwrap().len(), 10);
    assert_eq!(manifest["config"]["seed"], 3);
    assert_eq!(manifest["config"]["preset"], "straight_road");
}

#[test]
fn simulate_is_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    simulate(&a, "turn_straight_road", 4);
    simulate(&b, "turn_straight_road", 4);
    assert_eq!(files(&a), files(&b));
}

fn drop_timing(name: &str, bytes: &[u8]) -> String {
    let text = String::from_utf8_lossy(bytes).into_owned();
    if name.ends_with(".csv") {
        let header: Vec<String> = text.lines().next().unwrap().split(',').map(str::to_owned).collect();
        text.lines()
            .map(|l| {
                l.split(',')
                    .zip(&header)
                    .filter(|(_, h)| !h.ends_with("_ms") && *h != "points_per_second")
                    .map(|(f, _)| f)
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect::<Vec<_>>()
            .join("\n")
    } else if name.ends_with(".json") {
        let mut v: Value = serde_json::from_str(&text).unwrap();
        v["report"].as_object_mut().unwrap().remove("timing");
        v.to_string()
    } else {
        text.lines()
            .filter(|l| !l.starts_with("clustering") && !l.starts_with("estimation"))
            .collect::<Vec<_>>()
            .join("\n")
    }
}

#[test]
fn pipeline_is_deterministic_apart_from_timing() {
    let tmp = tempfile::tempdir().unwrap();
    let sim = tmp.path().join("sim");
    simulate(&sim, "intersection", 4);
    let mut runs = Vec::new();
    for name in ["a", "b"] {
        let dir = tmp.path().join(name);
        let out = dopvel(&[
            "--json",
            "--out",
            path_str(&dir),
            "pipeline",
            "--frames-dir",
            path_str(&sim),
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        runs.push(
            files(&dir)
                .into_iter()
                .map(|(n, b)| {
                    let t = drop_timing(&n, &b);
                    (n, t)
                })
                .collect::<Vec<_>>(),
        );
    }
    assert_eq!(runs[0].len(), 9);
    assert_eq!(runs[0], runs[1]);
}

#[test]
fn pipeline_reports_accuracy_as_json() {
    let tmp = tempfile::tempdir().unwrap();
    let out = dopvel(&[
        "--json",
        "--out",
        path_str(tmp.path()),
        "pipeline",
        "--preset",
        "intersection",
        "--frames",
        "8",
    ]);
    assert!(out.status.success());
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report["report"]["accuracy"].as_f64().unwrap() >= 0.99);
    let on_disk: Value = serde_json::from_slice(&std::fs::read(tmp.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(on_disk["report"]["counts"], report["report"]["counts"]);

    let frames = std::fs::read_to_string(tmp.path().join("frames.csv")).unwrap();
    assert_eq!(
        frames.lines().next().unwrap(),
        "frame,tp,tn,fp,fn,precision,recall,accuracy,ego_err_x,ego_err_y,ego_err_z,cluster_ms,estimate_ms"
    );
    assert_eq!(frames.lines().count(), 9);
}

#[test]
fn pipeline_without_json_skips_report_json() {
    let tmp = tempfile::tempdir().unwrap();
    let out = dopvel(&[
        "--out",
        path_str(tmp.path()),
        "pipeline",
        "--preset",
        "straight_road",
        "--frames",
        "2",
    ]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("accuracy"));
    assert!(tmp.path().join("report.txt").exists());
    assert!(!tmp.path().join("report.json").exists());
}

#[test]
fn empty_scene_warns_and_succeeds() {
    let tmp = tempfile::tempdir().unwrap();
    let scene = SceneSpec {
        objects: vec![],
        ground_height: None,
        sensor_pose: Pose::from_heading(Vec3::new(0.0, 0.0, 1.8), 0.0),
        sensor_velocity_world: Vec3::zeros(),
        sensor_yaw_rate: 0.0,
    };
    let scene_path = tmp.path().join("empty.json");
    std::fs::write(&scene_path, scene.to_json()).unwrap();
    let out = dopvel(&[
        "--json",
        "--out",
        path_str(&tmp.path().join("out")),
        "pipeline",
        "--scene",
        path_str(&scene_path),
        "--frames",
        "3",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert_eq!(stderr.matches("warning: frame").count(), 3, "{stderr}");
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["report"]["failed_frames"], 3);
    assert!(report["report"]["accuracy"].is_null());
}

#[test]
fn config_file_with_relative_paths_and_overrides() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"schema": "dopvel-run/1", "preset": "t_intersection", "frames": 2, "seed": 1, "out_dir": "results"}"#,
    )
    .unwrap();
    let out = dopvel(&["--config", path_str(&cfg), "--seed", "9", "simulate"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let manifest: Value =
        serde_json::from_slice(&std::fs::read(tmp.path().join("results/manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config"]["seed"], 9);
    assert_eq!(manifest["frames"].as_array().unwrap().len(), 2);
}

#[test]
fn out_dir_environment_override() {
    let tmp = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_dopvel"))
        .args(["simulate", "--preset", "intersection", "--frames", "1"])
        .env("DOPVEL_OUT_DIR", tmp.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(tmp.path().join("frame_0000.fdv").exists());
}

#[test]
fn config_errors_exit_1_with_field() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.json");
    std::fs::write(&cfg, r#"{"preset": "intersection", "num_th_m": 2}"#).unwrap();
    let out = dopvel(&["--config", path_str(&cfg), "--out", path_str(tmp.path()), "pipeline"]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr_json(&out);
    assert_eq!(err["error"], "InvalidConfig");
    assert!(err["message"].as_str().unwrap().contains("num_th_m"));

    let out = dopvel(&["--out", path_str(tmp.path()), "simulate", "--preset", "roundabout"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_json(&out)["error"], "UnknownPreset");

    std::fs::write(&cfg, r#"{"preset": "intersection", "typo_field": 1}"#).unwrap();
    let out = dopvel(&["--config", path_str(&cfg), "simulate"]);
    assert_eq!(out.status.code(), Some(1));

    let out = dopvel(&["simulate", "--not-a-flag"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn runtime_errors_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let missing = tmp.path().join("missing.fdv");
    let out = dopvel(&["estimate", path_str(&missing)]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["error"], "IoError");

    let junk = tmp.path().join("junk.fdv");
    std::fs::write(&junk, b"not a frame").unwrap();
    let out = dopvel(&["segment", path_str(&junk)]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["error"], "BadFrame");
}

#[test]
fn segment_and_estimate_one_frame() {
    let tmp = tempfile::tempdir().unwrap();
    simulate(tmp.path(), "straight_road", 2);
    let frame = tmp.path().join("frame_0001.fdv");

    let out = dopvel(&[
        "--json",
        "--out",
        path_str(tmp.path()),
        "segment",
        path_str(&frame),
        "--labels",
    ]);
    assert!(out.status.success());
    let seg: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(!seg["moving"].as_array().unwrap().is_empty());
    let labels = std::fs::read_to_string(tmp.path().join("frame_0001_labels.csv")).unwrap();
    assert_eq!(
        labels.lines().count() - 1,
        seg["valid_cells"].as_u64().unwrap() as usize
    );

    let out = dopvel(&["--json", "estimate", path_str(&frame)]);
    assert!(out.status.success());
    let est: Value = serde_json::from_slice(&out.stdout).unwrap();
    let vx = est["ego_velocity"][0].as_f64().unwrap();
    assert!((vx - 15.0).abs() < 0.05, "{vx}");
}

#[test]
fn export_csv_is_lossless() {
    let tmp = tempfile::tempdir().unwrap();
    simulate(tmp.path(), "intersection", 1);
    let frame_path = tmp.path().join("frame_0000.fdv");
    let csv_path: PathBuf = tmp.path().join("dump.csv");
    let out = dopvel(&["export-csv", path_str(&frame_path), "-o", path_str(&csv_path)]);
    assert!(out.status.success());

    let frame = FrameFile::load(&frame_path).unwrap();
    let text = std::fs::read_to_string(&csv_path).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "row,col,valid,x,y,z,v,object_id,truth_vx,truth_vy,truth_vz,moving"
    );
    let mut rows = 0;
    for (line, cell) in lines.zip(frame.grid.cells()) {
        let f: Vec<&str> = line.split(',').collect();
        match cell {
            None => assert_eq!(f[2], "0"),
            Some(c) => {
                let parsed: Vec<f64> = f[3..7].iter().map(|s| s.parse().unwrap()).collect();
                let p = c.point;
                for (a, b) in parsed.iter().zip([p.x, p.y, p.z, p.v]) {
                    assert_eq!(a.to_bits(), b.to_bits());
                }
                assert_eq!(f[7].parse::<u32>().unwrap(), c.truth_object_id);
            }
        }
        rows += 1;
    }
    assert_eq!(rows, 90_000);
}

#[test]
fn bench_reports_throughput() {
    let out = dopvel(&["--json", "bench", "--preset", "intersection", "--frames", "100"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let b: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(b["frames"], 100);
    assert_eq!(b["cells_per_frame"], 90_000);
    assert!(b["points_per_second"].as_f64().unwrap() > 0.0);
    assert!(b["scaling"]["ego_only_time"].as_f64().unwrap() > 0.0);
    assert!(b["doubling_ratio"].as_f64().unwrap() > 1.0);
}
