//! Black-box subcommand tests against the compiled binary.

use std::path::Path;
use std::process::Command;

fn sdrlab() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sdrlab"))
}

fn run_ok(args: &[&str]) -> String {
    let out = sdrlab().args(args).output().unwrap();
    assert!(
        out.status.success(),
        "sdrlab {args:?} failed:\n{}{}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn exit_code(args: &[&str]) -> i32 {
    sdrlab().args(args).output().unwrap().status.code().unwrap()
}

fn p(dir: &Path, name: &str) -> String {
    dir.join(name).display().to_string()
}

#[test]
fn stage_chain_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();

    run_ok(&["synth", "--family", "t1", "--n", "300", "--dims", "10",
             "--clusters", "4", "--seed", "7", "--out", &p(d, "data.csv")]);
    run_ok(&["sharpen", "--in", &p(d, "data.csv"), "--seed", "7",
             "--out", &p(d, "sharp.csv")]);
    run_ok(&["project", "--in", &p(d, "sharp.csv"), "--method", "lmds",
             "--dim", "2", "--seed", "7", "--out", &p(d, "proj.csv")]);
    run_ok(&["cluster", "--in", &p(d, "proj.csv"), "--method", "kmeans",
             "--k", "4", "--seed", "7", "--out", &p(d, "labels.csv")]);
    let stdout = run_ok(&["evaluate", "--pred", &p(d, "labels.csv"),
                          "--truth", &p(d, "data.csv"), "--label-col", "label",
                          "--out", &p(d, "report.json")]);
    assert!(stdout.contains("accuracy ="), "unexpected evaluate output: {stdout}");
    run_ok(&["plot", "--in", &p(d, "proj.csv"), "--labels", &p(d, "labels.csv"),
             "--out", &p(d, "scatter.svg")]);

    let report = std::fs::read_to_string(d.join("report.json")).unwrap();
    let json: serde_json::Value = serde_json::from_str(&report).unwrap();
    assert!(json["accuracy"].as_f64().unwrap() > 0.9);

    let svg = std::fs::read_to_string(d.join("scatter.svg")).unwrap();
    assert!(svg.starts_with("<svg") || svg.starts_with("<?xml"));
}

#[test]
fn pipeline_writes_run_directory() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    let out_dir = p(d, "run");
    run_ok(&["pipeline",
             "--set", "input.synth.family=T1",
             "--set", "input.synth.n=200",
             "--set", "input.synth.dims=8",
             "--set", "input.synth.clusters=3",
             "--set", "methods=kmeans",
             "--set", "conditions=slmds",
             "--seed", "3",
             "--out-dir", &out_dir]);
    for f in ["manifest.txt", "projection_slmds.csv", "labels_slmds_kmeans.csv",
              "report_slmds_kmeans.json", "scatter_slmds_kmeans.svg", "summary.csv"] {
        assert!(d.join("run").join(f).exists(), "missing artifact {f}");
    }
}

#[test]
fn exit_codes_match_error_taxonomy() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    // config error: unknown clustering method
    run_ok(&["synth", "--family", "t1", "--n", "50", "--dims", "4",
             "--clusters", "2", "--seed", "1", "--out", &p(d, "x.csv")]);
    assert_eq!(exit_code(&["cluster", "--in", &p(d, "x.csv"), "--method", "bogus",
                           "--out", &p(d, "y.csv")]), 2);
    // data error: missing input file
    assert_eq!(exit_code(&["sharpen", "--in", &p(d, "nope.csv"),
                           "--out", &p(d, "y.csv")]), 3);
    // config error: pipeline without seed
    assert_eq!(exit_code(&["pipeline", "--set", "input.synth.family=T1",
                           "--out-dir", &p(d, "run")]), 2);
}
