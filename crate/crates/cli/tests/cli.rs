use std::process::{Command, Output};

fn hecke(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hecke")).args(args).env_remove("HECKE_CACHE_DIR").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8")
}

fn data_rows(csv: &str) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_reader(csv.as_bytes());
    r.records().map(|rec| rec.expect("record").iter().map(str::to_string).collect()).collect()
}

#[test]
fn theorem1_symbolic_passes() {
    let o = hecke(&[
        "verify",
        "--variant",
        "nondeg",
        "--ell",
        "2",
        "--n",
        "3",
        "--mode",
        "symbolic",
        "--checks",
        "theorem1",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let json: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(json[0]["check"], "theorem1");
    assert_eq!(json[0]["status"], "pass");
}

#[test]
fn theorem2_default_mode_passes() {
    let o = hecke(&["verify", "--variant", "deg", "--ell", "2", "--n", "3", "--checks", "theorem2"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn seminormal_in_symbolic_mode_is_a_usage_error() {
    let o = hecke(&["verify", "--checks", "seminormal", "--mode", "symbolic"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
}

#[test]
fn other_usage_errors() {
    for args in [
        vec!["verify", "--variant", "deg", "--checks", "theorem1"],
        vec!["verify", "--ell", "2", "--n", "4", "--cap", "100"],
        vec!["verify", "--checks", "nonsense"],
        vec!["verify", "--mode", "specialized"],
        vec!["verify", "--mode", "specialized", "--q", "2", "--params", "1,2", "--ell", "2", "--checks", "seminormal"],
        vec!["verify", "--variant", "nondeg", "--ell", "2", "--mode", "specialized", "--q", "1", "--params", "1,64"],
        vec!["verify", "--bogus-flag"],
    ] {
        assert_eq!(hecke(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn table_level_one_rank_two() {
    let o = hecke(&["table", "--ell", "1", "--n", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("lambda,s,t,tau_engine,tau_formula,equal\n"));
    let rows = data_rows(&out);
    assert_eq!(rows.len(), 2);
    for r in &rows {
        assert_eq!(r[3], "1");
        assert_eq!(r[4], "1");
        assert_eq!(r[5], "true");
    }
}

#[test]
fn table_level_two_rank_two_has_a_row_per_pair() {
    for variant in ["nondeg", "deg"] {
        let o = hecke(&["table", "--variant", variant, "--ell", "2", "--n", "2"]);
        assert_eq!(o.status.code(), Some(0));
        let rows = data_rows(&stdout(&o));
        assert_eq!(rows.len(), 8);
        assert!(rows.iter().all(|r| r[5] == "true"));
        let diagonal = rows.iter().filter(|r| r[1] == r[2]).count();
        let off = rows.iter().filter(|r| r[1] != r[2]);
        assert_eq!(diagonal, 6);
        assert!(off.into_iter().all(|r| r[3] == "0"));
    }
}

#[test]
fn empty_check_set_gives_header_only_table() {
    let o = hecke(&["table", "--ell", "2", "--n", "2", "--checks", ""]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "lambda,s,t,tau_engine,tau_formula,equal\n");
}

#[test]
fn reports_are_byte_identical() {
    let args = ["verify", "--ell", "2", "--n", "1..3", "--no-timing", "--seed", "7", "-j", "2"];
    let a = hecke(&args);
    let b = hecke(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(!stdout(&a).contains("elapsed_ms"));
}

#[test]
fn specialized_run_of_all_checks() {
    for args in [
        vec![
            "verify",
            "--variant",
            "nondeg",
            "--ell",
            "2",
            "--n",
            "2",
            "--mode",
            "specialized",
            "--q",
            "2",
            "--params",
            "1,64",
            "--format",
            "csv",
        ],
        vec![
            "verify",
            "--variant",
            "deg",
            "--ell",
            "2",
            "--n",
            "2",
            "--mode",
            "specialized",
            "--params",
            "0,100",
            "--format",
            "csv",
        ],
    ] {
        let o = hecke(&args);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        let rows = data_rows(&stdout(&o));
        let checks: Vec<&str> = rows.iter().map(|r| r[0].as_str()).collect();
        for c in ["relations", "seminormal", "corollaries", "cellular"] {
            assert!(checks.contains(&c), "{c} missing from {checks:?}");
        }
        assert!(rows.iter().all(|r| r[5] == "pass"));
    }
}

#[test]
fn text_and_file_output() {
    let dir = std::env::temp_dir().join(format!("hecke-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.txt");
    let o = hecke(&[
        "verify",
        "--n",
        "3",
        "--checks",
        "relations,mackey",
        "--format",
        "text",
        "-o",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert!(text.lines().all(|l| l.contains("pass")));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn cache_round_trip_gives_same_report() {
    let dir = std::env::temp_dir().join(format!("hecke-cache-{}", std::process::id()));
    let args = ["verify", "--ell", "2", "--n", "3", "--checks", "theorem1,eps-murphy", "--no-timing"];
    let run = || Command::new(env!("CARGO_BIN_EXE_hecke")).args(args).env("HECKE_CACHE_DIR", &dir).output().unwrap();
    let cold = run();
    assert!(std::fs::read_dir(&dir).unwrap().count() > 0);
    let warm = run();
    assert_eq!(cold.status.code(), Some(0));
    assert_eq!(cold.stdout, warm.stdout);
    for entry in std::fs::read_dir(&dir).unwrap() {
        std::fs::write(entry.unwrap().path(), b"HECKEKEY\xff\xff\xff\xff").unwrap();
    }
    let stale = run();
    assert_eq!(stale.status.code(), Some(0));
    assert_eq!(cold.stdout, stale.stdout);
    std::fs::remove_dir_all(dir).unwrap();
}
