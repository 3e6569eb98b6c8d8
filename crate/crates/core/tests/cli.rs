use std::path::Path;
use std::process::{Command, Output};

fn mrip(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_mrip"));
    cmd.args(args).env_remove("MRIP_MAX_ENUM");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn corpus(dir: &Path) -> String {
    let out = dir.join("corpus");
    let o = mrip(&["gen", "instance", "--seed", "1", "--count", "4", "--out", out.to_str().unwrap()], &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    out.to_str().unwrap().to_string()
}

#[test]
fn verify_passes_on_generated_instances() {
    let dir = tempfile::tempdir().unwrap();
    let c = corpus(dir.path());
    for protocol in ["simple", "scoring", "complement-scoring"] {
        let o = mrip(&["verify", "--protocol", protocol, &c], &[]);
        assert_eq!(o.status.code(), Some(0), "{protocol}: {}", stderr(&o));
        let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
        assert_eq!(report["config"]["protocol"], protocol);
        let rows = report["rows"].as_array().unwrap();
        assert_eq!(rows.len(), 4);
        for row in rows {
            assert_eq!(row["cond1"], true);
            assert_eq!(row["cond2"], true);
            assert!(row["max_utility"].as_str().unwrap().contains('/'));
        }
    }
}

#[test]
fn broken_protocol_exits_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let c = corpus(dir.path());
    let o = mrip(&["verify", "--protocol", "broken-scoring", "--format", "csv", &c], &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).lines().skip(2).all(|l| l.contains(",false,")));
}

#[test]
fn csv_reports_start_with_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let c = corpus(dir.path());
    let out = dir.path().join("gap.csv");
    let o = mrip(&["gap", "--protocol", "scoring", "--out", out.to_str().unwrap(), &c], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(out).unwrap();
    let mut lines = text.lines();
    let config = lines.next().unwrap().strip_prefix("# config: ").expect("config header");
    let config: serde_json::Value = serde_json::from_str(config).unwrap();
    assert_eq!(config["command"], "gap");
    assert_eq!(
        lines.next().unwrap(),
        "instance_id,protocol,best_utility,best_wrong_utility,gap,decision,intervals"
    );
    assert_eq!(lines.count(), 4);
}

#[test]
fn one_interval_sweep_is_ambiguous() {
    let dir = tempfile::tempdir().unwrap();
    let c = corpus(dir.path());
    let o = mrip(&["sweep", "--protocol", "scoring", "--intervals", "1", &c], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.lines().skip(2).all(|l| l.ends_with(",ambiguous,1")), "{text}");
    let o = mrip(&["sweep", "--protocol", "scoring", "--intervals", "4096", &c], &[]);
    assert!(stdout(&o).lines().skip(2).all(|l| !l.contains("ambiguous")));
}

#[test]
fn parse_errors_carry_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\n  \"r\": 0,\n  \"s\": 1,\n  \"clauses\": [\n    [1, 2, 4],\n    [1, 99, 2]\n  ]\n}\n")
        .unwrap();
    let o = mrip(&["verify", "--protocol", "scoring", bad.to_str().unwrap()], &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 6"), "{}", stderr(&o));
}

#[test]
fn enumeration_cap_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let c = corpus(dir.path());
    let o = mrip(&["verify", "--protocol", "scoring", &c], &[("MRIP_MAX_ENUM", "10")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("refused"), "{}", stderr(&o));
}

#[test]
fn wide_oracles_are_refused() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.json");
    let o = mrip(&["gen", "instance", "--s", "5", "--out", out.to_str().unwrap()], &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!out.exists());
}

#[test]
fn circuits_run_once_per_input() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.json");
    let o = mrip(&["gen", "circuit", "--seed", "4", "--n", "2", "--gates", "6", "--out", out.to_str().unwrap()], &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let o = mrip(&["verify", "--protocol", "expmrip", "--format", "csv", out.to_str().unwrap()], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o).lines().skip(2).count(), 4);
}

#[test]
fn run_prints_the_honest_transcript() {
    let dir = tempfile::tempdir().unwrap();
    let c = corpus(dir.path());
    let file = format!("{c}/instance-001.json");
    let o = mrip(&["run", "--protocol", "scoring", "--coins", "0,0,0", &file], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("payment"), "{}", stdout(&o));
}
