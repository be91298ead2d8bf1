use std::process::{Command, Output};

fn loclet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_loclet"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = loclet(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

const SMALL: &str = "swissroll:200,8";

#[test]
fn load_reports_the_graph() {
    let text = stdout(&["load", "--matrix", SMALL]);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,edges,components,lambda_max_bound,lambda_1"));
    let fields: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(fields[0], "200");
    let bound: f64 = fields[3].parse().unwrap();
    let lambda_1: f64 = fields[4].parse().unwrap();
    assert!(bound >= lambda_1);
}

#[test]
fn same_seed_gives_identical_reports() {
    let bench = [
        "bench",
        "--matrix",
        SMALL,
        "--K",
        "8",
        "--sigma",
        "0.01,0.02",
        "--signal",
        "151-200,81-100",
        "--reps",
        "3",
        "--seed",
        "5",
    ];
    let first = stdout(&bench);
    assert_eq!(first, stdout(&bench));
    assert!(first.starts_with("method,signal,sigma,snr_in,best_snr,mean_snr,t1,t2,support_size"));
    // four methods for each of the four cells
    assert_eq!(first.lines().count(), 1 + 16);

    let signal = [
        "gen-signal",
        "--matrix",
        SMALL,
        "--signal",
        "151-200",
        "--sigma",
        "0.01",
        "--seed",
        "5",
    ];
    assert_eq!(stdout(&signal), stdout(&signal));
    let other = [
        "gen-signal",
        "--matrix",
        SMALL,
        "--signal",
        "151-200",
        "--sigma",
        "0.01",
        "--seed",
        "6",
    ];
    assert_ne!(stdout(&signal), stdout(&other));
}

#[test]
fn noise_and_entropy_reports() {
    let noise = stdout(&[
        "estimate-noise",
        "--matrix",
        SMALL,
        "--signal",
        "151-200",
        "--sigma",
        "0.1",
        "--reps",
        "2",
        "--K-grid",
        "5,10",
        "--r",
        "1,2",
    ]);
    assert_eq!(noise.lines().count(), 1 + 2 * 2 * 2);
    let scan = stdout(&[
        "entropy-scan",
        "--matrix",
        SMALL,
        "--K-grid",
        "2,5,10,20",
        "--probes",
        "20",
    ]);
    assert_eq!(scan.lines().count(), 1 + 4);
    assert_eq!(scan.lines().filter(|l| l.ends_with(",1")).count(), 1);
}

#[test]
fn denoise_writes_one_row_per_vertex() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let out = loclet(&[
        "denoise",
        "--matrix",
        SMALL,
        "--K",
        "8",
        "--signal",
        "151-200",
        "--sigma",
        "0.01",
        "--t2",
        "1",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("SNR_out"));
    let text = std::fs::read_to_string(path).unwrap();
    assert_eq!(text.lines().count(), 201);
}

#[test]
fn errors_exit_nonzero_with_a_diagnostic() {
    let missing = loclet(&["load", "--matrix", "/nonexistent/graph.mtx"]);
    assert!(!missing.status.success());
    assert!(String::from_utf8_lossy(&missing.stderr).starts_with("error:"));

    let capped = loclet(&[
        "bench", "--matrix", SMALL, "--cap", "100", "--signal", "1-10", "--K", "5",
    ]);
    assert!(!capped.status.success());

    let bad_range = loclet(&["gen-signal", "--matrix", SMALL, "--signal", "150-300"]);
    assert!(!bad_range.status.success());
}
