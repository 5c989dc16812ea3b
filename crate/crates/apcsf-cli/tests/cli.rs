//! End-to-end tests of the binary: flags, outputs and exit codes.

use std::path::Path;
use std::process::{Command, Output};

fn apcsf(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_apcsf"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn assert_code(out: &Output, code: i32) {
    assert_eq!(
        out.status.code(),
        Some(code),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn evolve_writes_diagnostics_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "evolve",
        "--scheme",
        "full",
        "--curve",
        "ellipse:2,1",
        "--n",
        "16",
        "--tau",
        "auto",
        "--t-end",
        "0.25",
    ];
    let out = apcsf(dir.path(), &args);
    assert_code(&out, 0);
    let csv = std::fs::read(dir.path().join("diagnostics.csv")).unwrap();
    let text = String::from_utf8(csv.clone()).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "step,t,perimeter,area,min_edge,min_fan_area,max_speed");
    // tau = 0.5 (2 pi / 16)^2 rounds to 3 steps; header + 4 recorded states
    assert_eq!(text.lines().count(), 5);

    let again = apcsf(dir.path(), &args);
    assert_code(&again, 0);
    let csv2 = std::fs::read(dir.path().join("diagnostics.csv")).unwrap();
    assert_eq!(csv, csv2, "reruns must produce identical bytes");
}

#[test]
fn evolve_semi_scheme_and_svg_frames() {
    let dir = tempfile::tempdir().unwrap();
    let out = apcsf(
        dir.path(),
        &[
            "evolve",
            "--scheme",
            "semi",
            "--curve",
            "circle:1",
            "--n",
            "12",
            "--tau",
            "0.01",
            "--t-end",
            "0.05",
            "--record-every",
            "2",
            "--out-csv",
            "semi.csv",
            "--out-svg",
            "frames",
        ],
    );
    assert_code(&out, 0);
    assert!(dir.path().join("semi.csv").exists());
    // 5 steps recorded at 0, 2, 4, 5 -> 4 frames
    let frames: Vec<_> = std::fs::read_dir(dir.path().join("frames")).unwrap().collect();
    assert_eq!(frames.len(), 4);
    assert!(dir.path().join("frames/frame_000000.svg").exists());
    let svg = std::fs::read_to_string(dir.path().join("frames/frame_000000.svg")).unwrap();
    assert!(svg.contains("<polygon"));
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad_n = apcsf(
        dir.path(),
        &["evolve", "--scheme", "semi", "--curve", "circle:1", "--n", "2", "--t-end", "0.1"],
    );
    assert_code(&bad_n, 2);

    let bad_curve = apcsf(
        dir.path(),
        &["evolve", "--scheme", "semi", "--curve", "blob:1", "--n", "8", "--t-end", "0.1"],
    );
    assert_code(&bad_curve, 2);

    let bad_variant = apcsf(
        dir.path(),
        &[
            "evolve",
            "--scheme",
            "full",
            "--curve",
            "circle:1",
            "--n",
            "8",
            "--t-end",
            "0.1",
            "--no-area-term",
        ],
    );
    assert_code(&bad_variant, 2);

    let nondoubling = apcsf(
        dir.path(),
        &["converge", "--curve", "ellipse:2,1", "--n-list", "16,48", "--t-end", "0.25"],
    );
    assert_code(&nondoubling, 2);

    let unknown_suite = apcsf(dir.path(), &["check", "--suite", "nope"]);
    assert_code(&unknown_suite, 2);
}

#[test]
fn guard_failures_use_distinct_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    // an absurdly large relative edge floor flags the very first velocity
    // evaluation as degenerate
    let degenerate = apcsf(
        dir.path(),
        &[
            "evolve",
            "--scheme",
            "semi",
            "--curve",
            "ellipse:2,1",
            "--n",
            "16",
            "--t-end",
            "0.1",
            "--eps-edge",
            "0.7",
        ],
    );
    assert_code(&degenerate, 3);

    // every diagonal block is a multiple of the identity (Frobenius
    // condition exactly 2), so a cap below 2 rejects the first pivot of
    // the banded elimination (n > 16 so the banded path runs)
    let singular = apcsf(
        dir.path(),
        &[
            "evolve",
            "--scheme",
            "full",
            "--curve",
            "ellipse:2,1",
            "--n",
            "20",
            "--t-end",
            "0.1",
            "--cond-cap",
            "1.5",
        ],
    );
    assert_code(&singular, 4);
}

#[test]
fn converge_writes_report_with_pinned_header() {
    let dir = tempfile::tempdir().unwrap();
    let out = apcsf(
        dir.path(),
        &[
            "converge",
            "--curve",
            "ellipse:2,1",
            "--n-list",
            "8,16",
            "--t-end",
            "0.05",
            "--report",
            "report.csv",
        ],
    );
    assert_code(&out, 0);
    let text = std::fs::read_to_string(dir.path().join("report.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "N,E1,order1,E2,order2,E3,order3");
    assert!(lines.next().unwrap().starts_with("8,"));
    let second = lines.next().unwrap();
    assert!(second.starts_with("16,"));
    // order cells populated on the second level
    assert!(!second.contains(",,"));
}

#[test]
fn single_level_converge_has_empty_order_cells() {
    let dir = tempfile::tempdir().unwrap();
    let out =
        apcsf(dir.path(), &["converge", "--curve", "circle:1", "--n-list", "8", "--t-end", "0.05"]);
    assert_code(&out, 0);
    let text = std::fs::read_to_string(dir.path().join("convergence.csv")).unwrap();
    let row = text.lines().nth(1).unwrap();
    assert!(row.contains(",,"));
    assert!(row.ends_with(','));
}

#[test]
fn area_loss_reports_slope() {
    let dir = tempfile::tempdir().unwrap();
    let out = apcsf(
        dir.path(),
        &["area-loss", "--curve", "ellipse:2,1", "--n-list", "8,16", "--t-end", "0.05"],
    );
    assert_code(&out, 0);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("slope"), "stdout: {stdout}");
    let text = std::fs::read_to_string(dir.path().join("area_loss.csv")).unwrap();
    assert!(text.starts_with("N,area_drift\n"));
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn check_single_suite_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = apcsf(dir.path(), &["check", "--suite", "trig-lemma", "--seed", "7"]);
    assert_code(&out, 0);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("seed 7"));
    assert!(stdout.contains("suite"));
    assert!(stdout.contains("PASS"));
    assert!(!stdout.contains("FAIL"));
}

#[test]
fn polygon_file_curve_runs() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("hex.poly"),
        "# hexagon\n2 0\n1 1.7\n-1 1.7\n-2 0\n-1 -1.7\n1 -1.7\n",
    )
    .unwrap();
    let out = apcsf(
        dir.path(),
        &["evolve", "--scheme", "semi", "--curve", "file:hex.poly", "--n", "6", "--t-end", "0.05"],
    );
    assert_code(&out, 0);
}
