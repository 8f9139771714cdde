//! The `frqi` binary: exit codes, determinism and output formats.

mod common;

use std::path::Path;
use std::process::{Command, Output};

use frqi::experiment::{self, ExperimentConfig};
use frqi::image::{gray_to_angles, load_pgm, EncodingMode};

const PAPER_PGM: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/golden/paper_2x2.pgm");
const GOLDEN_METRICS: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/golden/roundtrip_8192_seed7.json");

fn frqi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_frqi"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn json(bytes: &[u8]) -> serde_json::Value {
    serde_json::from_slice(bytes).expect("valid JSON")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn exit_codes() {
    assert_eq!(code(&frqi(&["roundtrip", "--no-such-flag"])), 1);
    assert_eq!(code(&frqi(&["frobnicate"])), 1);
    assert_eq!(code(&frqi(&["--help"])), 0);
    // exact shots with noise
    assert_eq!(code(&frqi(&["counts", PAPER_PGM, "--p-meas", "0.1"])), 1);
    assert_eq!(code(&frqi(&["counts", PAPER_PGM, "--mitigation", "sometimes"])), 1);
    assert_eq!(code(&frqi(&["sweep-size", "--n-min", "3", "--n-max", "2"])), 1);
    assert_eq!(code(&frqi(&["counts", "/definitely/not/here.pgm"])), 3);

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.pgm");
    std::fs::write(&bad, b"P5\n3 3\n255\n123456789").unwrap();
    assert_eq!(code(&frqi(&["counts", path(&bad)])), 3);

    // 512x512 exceeds the MCRY size limit
    let big = dir.path().join("big.pgm");
    let img = frqi::Image::filled(512, 9).unwrap();
    frqi::image::save_pgm(&img, &big).unwrap();
    let out = frqi(&["counts", path(&big), "--builder", "mcry"]);
    assert_eq!(code(&out), 2, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn exact_roundtrip_reproduces_the_image() {
    let dir = tempfile::tempdir().unwrap();
    let out = frqi(&["roundtrip", PAPER_PGM, "--out", path(dir.path())]);
    assert_eq!(code(&out), 0);
    let metrics = json(&std::fs::read(dir.path().join("metrics.json")).unwrap());
    assert_eq!(metrics["relative_difference"], 0.0);
    assert!(metrics["wall_time_s"].as_f64().is_some());
    for key in ["depth", "gate_counts", "cx_count"] {
        assert!(!metrics[key].is_null(), "{key}");
    }
    assert_eq!(
        load_pgm(dir.path().join("output.pgm")).unwrap(),
        load_pgm(PAPER_PGM).unwrap()
    );
}

#[test]
fn sampled_roundtrip_matches_golden_and_is_repeatable() {
    let runs: Vec<Vec<u8>> = (0..2)
        .map(|_| {
            let dir = tempfile::tempdir().unwrap();
            let args = [
                "roundtrip",
                PAPER_PGM,
                "--shots",
                "8192",
                "--seed",
                "7",
                "--no-timing",
                "--out",
                path(dir.path()),
            ];
            assert_eq!(code(&frqi(&args)), 0);
            std::fs::read(dir.path().join("metrics.json")).unwrap()
        })
        .collect();
    assert_eq!(runs[0], runs[1]);
    assert_eq!(runs[0], std::fs::read(GOLDEN_METRICS).unwrap());
    let diff = json(&runs[0])["relative_difference"].as_f64().unwrap();
    assert!(diff > 0.0 && diff < 2.0, "{diff}");
}

#[test]
fn exact_counts_are_the_squared_amplitudes() {
    let out = frqi(&["counts", PAPER_PGM]);
    assert_eq!(code(&out), 0);
    let v = json(&out.stdout);
    let got: Vec<f64> = v["distribution"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    let img = load_pgm(PAPER_PGM).unwrap();
    let want = common::frqi_reference(1, gray_to_angles(&img, EncodingMode::Linear).thetas());
    assert_eq!(got.len(), want.len());
    for (a, b) in got.iter().zip(&want) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn one_shot_is_one_bitstring() {
    let out = frqi(&["counts", PAPER_PGM, "--shots", "1", "--seed", "4"]);
    assert_eq!(code(&out), 0);
    let counts = json(&out.stdout)["counts"].as_object().unwrap().clone();
    assert_eq!(counts.len(), 1);
    let (label, n) = counts.iter().next().unwrap();
    assert_eq!(label.len(), 3);
    assert_eq!(n.as_u64(), Some(1));
}

#[test]
fn identity_calibration_leaves_counts_alone() {
    let dir = tempfile::tempdir().unwrap();
    let cal = dir.path().join("cal.json");
    assert_eq!(
        code(&frqi(&[
            "calibrate",
            "--qubits",
            "3",
            "--cal-shots",
            "100",
            "--out",
            path(&cal)
        ])),
        0
    );
    let model = format!("model:{}", path(&cal));
    let out = frqi(&[
        "counts",
        PAPER_PGM,
        "--shots",
        "5000",
        "--seed",
        "2",
        "--mitigation",
        &model,
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out.stdout);
    let mitigated: Vec<f64> = v["mitigated"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    for (label, n) in v["counts"].as_object().unwrap() {
        let k = usize::from_str_radix(label, 2).unwrap();
        assert!((mitigated[k] - n.as_f64().unwrap() / 5000.0).abs() < 1e-12);
    }
    // a calibration of the wrong width is a data error
    let small = dir.path().join("small.json");
    assert_eq!(code(&frqi(&["calibrate", "--qubits", "2", "--out", path(&small)])), 0);
    let model = format!("model:{}", path(&small));
    assert_eq!(
        code(&frqi(&["counts", PAPER_PGM, "--shots", "10", "--mitigation", &model])),
        3
    );
}

#[test]
fn calibration_json_is_column_stochastic() {
    let out = frqi(&[
        "calibrate",
        "--qubits",
        "2",
        "--p-meas",
        "0.1",
        "--cal-shots",
        "2000",
        "--seed",
        "1",
    ]);
    assert_eq!(code(&out), 0);
    let cal = frqi::sim::CalibrationMatrix::from_json(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    for col in 0..4 {
        let s: f64 = (0..4).map(|r| cal.get(r, col)).sum();
        assert!((s - 1.0).abs() < 1e-12);
        assert!((cal.get(col, col) - 0.81).abs() < 0.05);
    }
}

#[test]
fn sweep_size_csv_is_deterministic_and_reports_executed_gates() {
    let args = [
        "sweep-size",
        "--n-min",
        "1",
        "--n-max",
        "3",
        "--seed",
        "11",
        "--no-timing",
    ];
    let a = frqi(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, frqi(&args).stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# frqi-csv v1 sweep-size"));
    assert_eq!(
        lines.next(),
        Some("n,variant,qubits,depth,cx_count,total_gates,diff_rel,time_s,status")
    );
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 6);
    for row in &rows {
        let n: u32 = row[0].parse().unwrap();
        let builder = row[1].parse().unwrap();
        let img = experiment::ImageSource::Random { seed: 11 }.image(n).unwrap();
        let cfg = ExperimentConfig {
            builder,
            ..Default::default()
        };
        let (exec, _, _) = experiment::compile(&cfg, &img).unwrap();
        let stats = exec.stats();
        assert_eq!(row[3].parse::<usize>().unwrap(), stats.depth());
        assert_eq!(row[4].parse::<usize>().unwrap(), stats.count(frqi::GateClass::CX));
        assert_eq!(row[5].parse::<usize>().unwrap(), stats.total());
        assert_eq!(row[6].parse::<f64>().unwrap(), 0.0);
        assert_eq!(row[8], "ok");
    }
    // ordered by (n, variant), MARY shallower at every n
    for pair in rows.chunks(2) {
        assert_eq!((pair[0][1], pair[1][1]), ("mcry", "mary"));
        assert!(pair[1][3].parse::<usize>().unwrap() < pair[0][3].parse::<usize>().unwrap());
    }
}

#[test]
fn construct_only_marks_oversized_rows() {
    let out = frqi(&[
        "sweep-size",
        "--n-min",
        "8",
        "--n-max",
        "8",
        "--construct-only",
        "--builder",
        "mcry",
    ]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().nth(2).unwrap().ends_with(",over-budget"), "{text}");
}

#[test]
fn sweep_shots_rows() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("shots.csv");
    let args = [
        "sweep-shots",
        "--n",
        "2",
        "--shots",
        "512,4096",
        "--repeats",
        "3",
        "--seed",
        "5",
        "--out",
        path(&csv),
    ];
    assert_eq!(code(&frqi(&args)), 0);
    let text = std::fs::read_to_string(&csv).unwrap();
    let rows: Vec<&str> = text.lines().skip(2).collect();
    assert_eq!(rows.len(), 6);
    assert!(rows[0].starts_with("2,mary,512,5,"));
    assert!(rows[5].starts_with("2,mary,4096,7,"));
}

#[test]
fn routed_runs_report_swaps() {
    let out = frqi(&[
        "roundtrip",
        PAPER_PGM,
        "--builder",
        "mcry",
        "--coupling-map",
        "line:3",
        "--no-timing",
        "--out",
    ]);
    assert_eq!(code(&out), 1, "--out needs a value");
    let dir = tempfile::tempdir().unwrap();
    let out = frqi(&[
        "roundtrip",
        PAPER_PGM,
        "--builder",
        "mcry",
        "--coupling-map",
        "line:3",
        "--no-timing",
        "--out",
        path(dir.path()),
    ]);
    assert_eq!(code(&out), 0);
    let v = json(&out.stdout);
    assert!(v["swaps"].as_u64().unwrap() > 0);
    assert_eq!(v["relative_difference"], 0.0);
    let out = frqi(&["counts", PAPER_PGM, "--coupling-map", "ibmq_manila"]);
    assert_eq!(code(&out), 0);
    assert_eq!(
        code(&frqi(&["counts", PAPER_PGM, "--coupling-map", "/no/such/map.txt"])),
        3
    );
}
