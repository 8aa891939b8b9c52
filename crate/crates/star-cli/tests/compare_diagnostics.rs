//! The reversed-clip diagnostic exercised end to end through the CLI:
//! encode a clip and its reversal, compare the float sidecars, and check
//! the channel-swap relation on the tri-segment images.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use star_core::corpus::container;
use star_core::export::{self, SidecarHeader};
use star_core::Matrix;

fn star_bin() -> &'static str {
    env!("CARGO_BIN_EXE_star")
}

fn fixture_clips() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../star-core/tests/fixtures/clips")
}

fn run(args: &[&str]) -> Output {
    Command::new(star_bin())
        .args(args)
        .output()
        .expect("spawn star binary")
}

fn stdout_json(output: &Output) -> serde_json::Value {
    serde_json::from_str(String::from_utf8_lossy(&output.stdout).trim()).unwrap()
}

fn read_planes(path: &Path) -> (SidecarHeader, Vec<Vec<f32>>) {
    let file = std::fs::File::open(path).unwrap();
    export::read_sidecar(std::io::BufReader::new(file)).unwrap()
}

#[test]
fn reversed_clip_diagnostic_through_the_cli() {
    let dir = tempfile::tempdir().unwrap();

    // materialize the reversal of a fixture clip as its own container
    let src = fixture_clips().join("c4_16x16_n25.strv");
    let mut frames = container::read_frames(&src, 1, 25).unwrap();
    frames.reverse();
    let rev_path = dir.path().join("reversed.strv");
    container::write_frames(&rev_path, &frames).unwrap();

    let out = dir.path().join("enc");
    for (source, id) in [(src.as_path(), "fwd"), (rev_path.as_path(), "rev")] {
        let output = run(&[
            "encode",
            source.to_str().unwrap(),
            "--clip-id",
            id,
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(output.status.success());
    }

    // single-matrix cosine stars of clip and reversal are indistinguishable
    for (source, id) in [(src.as_path(), "fwd_gray"), (rev_path.as_path(), "rev_gray")] {
        let output = run(&[
            "encode",
            source.to_str().unwrap(),
            "--legacy",
            "--metric",
            "cosine",
            "--clip-id",
            id,
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(output.status.success());
    }
    let output = run(&[
        "compare",
        out.join("fwd_gray.f32").to_str().unwrap(),
        out.join("rev_gray.f32").to_str().unwrap(),
        "--out",
        dir.path().join("cmp_gray").to_str().unwrap(),
    ]);
    assert!(output.status.success());
    let summary = stdout_json(&output);
    let mean_rel = summary["mean_rel"].as_f64().unwrap();
    assert!(mean_rel <= 1e-6, "gray reversal mean_rel {mean_rel}");

    // tri-segment images differ, but only by the R<->B swap
    let output = run(&[
        "compare",
        out.join("fwd.f32").to_str().unwrap(),
        out.join("rev.f32").to_str().unwrap(),
        "--out",
        dir.path().join("cmp_rgb").to_str().unwrap(),
    ]);
    let summary = stdout_json(&output);
    assert!(
        summary["max_rel"].as_f64().unwrap() > 1e-3,
        "tri-segment images of opposite directions should differ"
    );

    let (header, planes) = read_planes(&out.join("rev.f32"));
    let swapped_path = dir.path().join("rev_swapped.f32");
    let to_matrix = |p: &Vec<f32>| {
        Matrix::from_vec(
            header.width,
            header.height,
            p.iter().map(|v| *v as f64).collect(),
        )
        .unwrap()
    };
    let (r, g, b) = (to_matrix(&planes[0]), to_matrix(&planes[1]), to_matrix(&planes[2]));
    export::write_sidecar(
        std::io::BufWriter::new(std::fs::File::create(&swapped_path).unwrap()),
        &header,
        &[&b, &g, &r],
    )
    .unwrap();

    let output = run(&[
        "compare",
        out.join("fwd.f32").to_str().unwrap(),
        swapped_path.to_str().unwrap(),
        "--out",
        dir.path().join("cmp_swap").to_str().unwrap(),
    ]);
    assert!(output.status.success());
    let summary = stdout_json(&output);
    let max_rel = summary["max_rel"].as_f64().unwrap();
    assert!(max_rel <= 1e-6, "channel-swapped deviation {max_rel}");

    // visualization artifacts landed
    assert!(dir.path().join("cmp_swap/fwd-vs-rev_swapped.png").exists());
    assert!(dir.path().join("cmp_swap/fwd-vs-rev_swapped.f32").exists());
}

#[test]
fn fuse_reproduces_committed_weights_through_the_cli() {
    let dir = tempfile::tempdir().unwrap();
    let fusion_dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../star-core/tests/fixtures/fusion");
    let expected: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(fusion_dir.join("expected_d3.json")).unwrap(),
    )
    .unwrap();

    let mut vector_paths = Vec::new();
    for (idx, map) in expected["maps"].as_array().unwrap().iter().enumerate() {
        let path = dir.path().join(format!("m{idx}.json"));
        std::fs::write(&path, serde_json::to_string(map).unwrap()).unwrap();
        vector_paths.push(path);
    }

    let output = run(&[
        "fuse",
        vector_paths[0].to_str().unwrap(),
        vector_paths[1].to_str().unwrap(),
        vector_paths[2].to_str().unwrap(),
        "--params",
        fusion_dir.join("params_d3.json").to_str().unwrap(),
        "--out",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert!(output.status.success());
    let summary = stdout_json(&output);
    let got: Vec<f64> = summary["weights"]
        .as_array()
        .unwrap()
        .iter()
        .map(|w| w.as_f64().unwrap())
        .collect();
    let want: Vec<f64> = expected["weights"]
        .as_array()
        .unwrap()
        .iter()
        .map(|w| w.as_f64().unwrap())
        .collect();
    for (g, w) in got.iter().zip(&want) {
        assert!((g - w).abs() < 1e-9, "{g} vs {w}");
    }

    // the fused sidecar holds the expected vector (as f32)
    let (_, planes) = read_planes(&dir.path().join("out/fused.f32"));
    for (g, w) in planes[0].iter().zip(expected["fused"].as_array().unwrap()) {
        assert!((*g as f64 - w.as_f64().unwrap()).abs() < 1e-6);
    }
}

#[test]
fn star_log_controls_stderr_verbosity() {
    let dir = tempfile::tempdir().unwrap();
    let clip = fixture_clips().join("c1_2x2_n6.strv");
    let quiet = Command::new(star_bin())
        .args(["encode", clip.to_str().unwrap(), "--out", dir.path().to_str().unwrap()])
        .env_remove("STAR_LOG")
        .output()
        .unwrap();
    assert!(quiet.status.success());
    assert!(String::from_utf8_lossy(&quiet.stderr).is_empty());

    let verbose = Command::new(star_bin())
        .args(["encode", clip.to_str().unwrap(), "--out", dir.path().to_str().unwrap()])
        .env("STAR_LOG", "info")
        .output()
        .unwrap();
    assert!(verbose.status.success());
    let stderr = String::from_utf8_lossy(&verbose.stderr);
    assert!(stderr.contains("encoding"), "stderr: {stderr}");
}

#[test]
fn jobs_zero_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("m.jsonl");
    std::fs::write(&manifest, "").unwrap();
    let output = run(&[
        "batch",
        "--manifest",
        manifest.to_str().unwrap(),
        "--out",
        dir.path().join("out").to_str().unwrap(),
        "--jobs",
        "0",
    ]);
    assert_eq!(output.status.code(), Some(2));
}
