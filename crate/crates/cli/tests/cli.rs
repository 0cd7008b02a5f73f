use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_srgswitch")).args(args).env_remove("SRGSWITCH_OUT").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn stats(dir: &Path) -> String {
    fs::read_to_string(dir.join("stats.csv")).unwrap()
}

#[test]
fn seed_reports_parameters_and_group_order() {
    let o = run(&["seed", "sp", "3", "2"]);
    assert!(o.status.success());
    assert!(stderr(&o).contains("SRG(63,30,13,15), aut 1451520"), "{}", stderr(&o));
    assert_eq!(stdout(&o).lines().count(), 1);

    let o = run(&["seed", "appendix", "sts19-srg57"]);
    assert!(stderr(&o).contains("SRG(57,24,11,9)"));
}

#[test]
fn complete_graph_seed_is_refused() {
    let dir = tempfile::tempdir().unwrap();
    let k5 = dir.path().join("k5.g6");
    fs::write(&k5, "D~{\n").unwrap();
    let o = run(&["seed", "--from-file", k5.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("degenerate"));
    let o = run(&["seed", "petersen"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn explore_prints_table_and_writes_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sp62");
    let o = run(&["explore", "--seed", "sp", "3", "2", "--switch", "gm4", "--depth", "2", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("depth,new,total\n0,1,1\n1,2,3\n2,52,55\n"), "{text}");
    let total_row = text.lines().find(|l| l.starts_with("Total")).unwrap();
    assert_eq!(total_row.split_whitespace().collect::<Vec<_>>(), ["Total", "1", "3", "55"]);
    assert_eq!(stats(&out), "depth,new,total\n0,1,1\n1,2,3\n2,52,55\n");

    let m: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["seed"], "sp 3 2");
    assert_eq!(m["totals"], serde_json::json!([1, 3, 55]));
    assert_eq!(m["config_hash"].as_str().unwrap().len(), 16);

    let o = run(&["analyze", "--store", out.to_str().unwrap(), "--report", "aut"]);
    assert!(o.status.success());
    let csv = stdout(&o);
    let counts: u64 = csv.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse::<u64>().unwrap()).sum();
    assert_eq!(counts, 55);
    assert!(csv.contains("\n1451520,1\n"));

    // a second run into the same directory is refused
    let o = run(&["explore", "--seed", "sp", "3", "2", "--switch", "gm4", "--depth", "2", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn identical_runs_give_identical_csv() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for name in ["a", "b"] {
        let out = dir.path().join(name);
        let o = run(&["explore", "--seed", "vno-", "4", "3", "--switch", "wqh3", "--depth", "1", "--out", out.to_str().unwrap()]);
        assert!(o.status.success());
        outputs.push((stdout(&o), stats(&out)));
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0].1, "depth,new,total\n0,1,1\n1,2,3\n");
}

#[test]
fn depth_zero_and_truncation() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("zero");
    let o = run(&["explore", "--seed", "sp", "3", "2", "--switch", "gm4", "--depth", "0", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(stats(&out), "depth,new,total\n0,1,1\n");

    let out = dir.path().join("cut");
    let o = run(&["explore", "--seed", "sp", "3", "2", "--switch", "gm4", "--depth", "2", "--max-graphs", "10", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(stats(&out), "depth,new,total\n0,1,1\n1,2,3\n");
    let o = run(&["resume", "--out", out.to_str().unwrap(), "--max-graphs", "1000"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stats(&out), "depth,new,total\n0,1,1\n1,2,3\n2,52,55\n");
}

#[test]
fn analyze_reports() {
    let dir = tempfile::tempdir().unwrap();
    let k4 = dir.path().join("k4.g6");
    fs::write(&k4, "C~\n").unwrap();
    let o = run(&["analyze", "--store", k4.to_str().unwrap(), "--report", "cliques", "3"]);
    assert_eq!(stdout(&o), "value,count\n4,1\n");

    let seed = run(&["seed", "vno-", "4", "3"]);
    let vls = dir.path().join("vls.g6");
    fs::write(&vls, &seed.stdout).unwrap();
    let o = run(&["analyze", "--store", vls.to_str().unwrap(), "--report", "pg", "5", "5", "2"]);
    assert!(o.status.success());
    let rows: Vec<String> = stdout(&o).lines().skip(1).map(String::from).collect();
    assert_eq!(rows.len(), 1);
    assert!(rows[0].starts_with("0,found,"));
    assert_eq!(rows[0].split(',').nth(2).unwrap().split(';').count(), 81);

    let o = run(&["analyze", "--store", k4.to_str().unwrap(), "--report", "ramsey", "2", "5"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["analyze", "--store", k4.to_str().unwrap(), "--report", "nonsense"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["analyze", "--store", dir.path().join("missing").to_str().unwrap(), "--report", "aut"]);
    assert_eq!(o.status.code(), Some(4));

    fs::write(&k4, "C~\n!!\n").unwrap();
    let o = run(&["analyze", "--store", k4.to_str().unwrap(), "--report", "aut"]);
    assert_ne!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("k4.g6:2"), "{}", stderr(&o));
}
