use std::path::Path;
use std::process::{Command, Output};

fn vegnav(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vegnav")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn run_then_report_as_csv_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let archive = dir.path().join("runs.json");
    let o = vegnav(&[
        "run", "--scenario", "scenario2", "--variant", "vern", "--variant", "dwa-baseline",
        "--trials", "2", "--seed", "4", "--out", path(&archive),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let csv = vegnav(&["report", "--in", path(&archive), "--format", "csv"]);
    assert!(csv.status.success());
    let text = stdout(&csv);
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("scenario,variant,success_rate,freezing_rate,norm_traj_len,fpr"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].starts_with("scenario2,vern,"));
    assert!(rows[1].starts_with("scenario2,dwa-baseline,"));

    let json = vegnav(&["report", "--in", path(&archive), "--format", "json"]);
    assert!(json.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&json)).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 2);
}

#[test]
fn identical_runs_write_identical_archives() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for out in [&a, &b] {
        let o = vegnav(&[
            "run", "--scenario", "entrapment", "--variant", "vern-no-height", "--trials", "2",
            "--seed", "11", "--out", path(out),
        ]);
        assert!(o.status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn scenario_files_are_accepted_by_path() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = dir.path().join("open.toml");
    std::fs::write(
        &scenario,
        "name = \"open\"\nstart = { x = 1.0, y = 2.0, theta = 0.0 }\ngoal = { x = 3.0, y = 2.0 }\n\n\
         [world]\nwidth = 50\nheight = 40\nresolution = 0.1\n",
    )
    .unwrap();
    let archive = dir.path().join("open.json");
    let csv = dir.path().join("open.csv");
    let o = vegnav(&[
        "run", "--scenario", path(&scenario), "--variant", "vern", "--trials", "1", "--out",
        path(&archive), "--csv", path(&csv),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let table = std::fs::read_to_string(&csv).unwrap();
    assert!(table.lines().nth(1).unwrap().starts_with("open,vern,1.0000,0.0000,"));
}

#[test]
fn unknown_variant_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let o = vegnav(&[
        "run", "--scenario", "scenario1", "--variant", "vern-turbo", "--out",
        path(&dir.path().join("x.json")),
    ]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("vern-turbo"));
}

#[test]
fn train_fewshot_writes_parameters_and_loss_curve() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("embedder.txt");
    let o = vegnav(&["train-fewshot", "--classes", "4", "--per-class", "100", "--out", path(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let params = vegnav::fewshot::read_params(&out).unwrap();
    assert!(params.is_finite());
    let curve = vegnav::fewshot::read_loss_csv(&dir.path().join("embedder.loss.csv")).unwrap();
    assert!(curve.last().unwrap() < curve.first().unwrap());
}

#[test]
fn check_invariants_reports_every_check() {
    let o = vegnav(&["check-invariants", "--seed", "2"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().filter(|l| l.starts_with("ok")).count(), 10, "{text}");
}
