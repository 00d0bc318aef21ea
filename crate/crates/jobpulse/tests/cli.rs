//! Exit codes, configuration sources and artifacts of the binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use jobpulse::manifest::{parse, sha256_hex};

fn jobpulse() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_jobpulse"));
    c.env_remove("JOBPULSE_CONFIG");
    c
}

fn run(args: &[&str]) -> Output {
    jobpulse().args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn manifest(dir: &Path) -> Vec<(String, String)> {
    parse(&fs::read_to_string(dir.join("manifest.txt")).unwrap())
}

fn value(m: &[(String, String)], key: &str) -> Option<String> {
    m.iter().find(|(k, _)| k == key).map(|(_, v)| v.clone())
}

fn record(id: &str, title: &str, region: &str) -> String {
    format!(
        r#"{{"job_id":"{id}","title":"{title}","job_description":"Join our semiconductor fab.","employer_name":"Acme Inc","employer_description":"","region":"{region}","retrieved_at":"2025-04-01"}}"#
    )
}

fn write_input(dir: &Path, name: &str, lines: &[String]) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, lines.join("\n") + "\n").unwrap();
    p
}

fn synth_fixture(dir: &Path, seed: &str, n: &str) -> Vec<String> {
    let o = run(&["synth", "--seed", seed, "--n-postings", n, "--out", dir.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    ["la", "sb", "sd"].iter().map(|r| dir.join(format!("{r}.jsonl"))).filter(|p| p.exists()).map(|p| p.display().to_string()).collect()
}

#[test]
fn duplicate_keys_exit_2_with_diagnostics() {
    let tmp = tempfile::tempdir().unwrap();
    let input = write_input(
        tmp.path(),
        "in.jsonl",
        &[
            record("1", "Process Engineer", "LA"),
            record("2", "Fab Technician", "LA"),
            record("1", "Process Engineer", "LA"),
            record("3", "Test Engineer", "SD"),
            record("1", "Yield Engineer", "SD"),
        ],
    );
    let out = tmp.path().join("out");
    let o = run(&["ingest", "--input", input.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    let diags = fs::read_to_string(out.join("diagnostics.csv")).unwrap();
    assert_eq!(diags.lines().count(), 2, "{diags}");
    assert!(diags.lines().nth(1).unwrap().contains(",3,1,"), "{diags}");
}

#[test]
fn clean_ingest_and_rejects_exit_0() {
    let tmp = tempfile::tempdir().unwrap();
    let input = write_input(
        tmp.path(),
        "in.jsonl",
        &[record("1", "Process Engineer", "LA"), record("2", "Fab Technician", "XX"), "{not json".to_string()],
    );
    let out = tmp.path().join("out");
    let o = run(&["ingest", "--input", input.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let m = manifest(&out);
    assert_eq!(value(&m, "count.postings").as_deref(), Some("1"));
    assert_eq!(value(&m, "count.rejected").as_deref(), Some("2"));
    assert_eq!(value(&m, "input.1.sha256"), Some(sha256_hex(&fs::read(&input).unwrap())));
}

#[test]
fn bad_configuration_exits_1() {
    let tmp = tempfile::tempdir().unwrap();
    let input = write_input(tmp.path(), "in.jsonl", &[record("1", "Process Engineer", "LA")]);
    let cfg = tmp.path().join("bad.conf");
    fs::write(&cfg, "top_k = 3\nno_such_key = 1\n").unwrap();
    let i = input.to_str().unwrap();

    let o = run(&["report", "--config", cfg.to_str().unwrap(), "--input", i]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("no_such_key"));

    assert_eq!(code(&run(&["report", "--input", tmp.path().join("missing.jsonl").to_str().unwrap()])), 1);
    assert_eq!(code(&run(&["report", "--input", i, "--taxonomy", "/nonexistent/taxonomy.csv"])), 1);
    assert_eq!(code(&run(&["report", "--input", i, "--top-k", "zero"])), 1);
    assert_eq!(code(&run(&["report", "--input", i, "--window-start", "2025-07-01"])), 1);
    assert_eq!(code(&run(&["frobnicate"])), 1);
    assert_eq!(code(&run(&["--help"])), 0);
}

#[test]
fn config_comes_from_environment_when_no_flag() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let cfg = tmp.path().join("jobpulse.conf");
    fs::write(&cfg, "# synth settings\nseed = 5\nn_postings = 60\noutput_dir = out\n").unwrap();
    let o = jobpulse().arg("synth").env("JOBPULSE_CONFIG", &cfg).output().unwrap();
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let m = manifest(&out);
    assert_eq!(value(&m, "count.postings").as_deref(), Some("67"));

    // a flag beats the file
    let o = jobpulse().args(["synth", "--n-postings", "45"]).env("JOBPULSE_CONFIG", &cfg).output().unwrap();
    assert_eq!(code(&o), 0);
    assert_eq!(value(&manifest(&out), "count.postings").as_deref(), Some("52"));
}

#[test]
fn synth_is_deterministic_per_seed() {
    let tmp = tempfile::tempdir().unwrap();
    let hashes = |dir: &str, seed: &str| {
        synth_fixture(&tmp.path().join(dir), seed, "500");
        manifest(&tmp.path().join(dir)).into_iter().filter(|(k, _)| k.starts_with("artifact.")).collect::<Vec<_>>()
    };
    let a = hashes("a", "3");
    assert_eq!(a, hashes("b", "3"));
    assert_ne!(a, hashes("c", "4"));
}

#[test]
fn report_writes_every_artifact_in_both_formats() {
    let tmp = tempfile::tempdir().unwrap();
    let inputs = synth_fixture(&tmp.path().join("fx"), "9", "3000");
    for (format, ext) in [("csv", "csv"), ("text", "txt")] {
        let out = tmp.path().join(format);
        let mut args = vec!["report", "--format", format, "--out", out.to_str().unwrap(), "--input"];
        args.extend(inputs.iter().map(String::as_str));
        let o = run(&args);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        let m = manifest(&out);
        let artifacts: Vec<_> = m.iter().filter_map(|(k, v)| Some((k.strip_prefix("artifact.")?.strip_suffix(".sha256")?, v))).collect();
        for stem in ["funnel", "demand_functions", "demand_regions", "demand_families", "demand_engineer", "ratio", "employer_summary", "employer_ranking"] {
            let name = format!("{stem}.{ext}");
            assert!(artifacts.iter().any(|(a, _)| *a == name), "missing {name}");
        }
        for (name, hash) in artifacts {
            let bytes = fs::read(out.join(name)).unwrap();
            assert!(!bytes.is_empty(), "{name} empty");
            assert_eq!(&sha256_hex(&bytes), hash, "{name}");
        }

        let functions = fs::read_to_string(out.join(format!("demand_functions.{ext}"))).unwrap();
        let engineer = functions.lines().find(|l| l.starts_with("Engineer")).unwrap();
        let share: f64 = if ext == "csv" {
            engineer.split(',').nth(5).unwrap()
        } else {
            engineer.split_whitespace().nth(5).unwrap()
        }
        .trim_end_matches('%')
        .parse()
        .unwrap();
        assert!((share - 66.7).abs() <= 1.0, "{engineer}");
    }
    let ratio = fs::read_to_string(tmp.path().join("text/ratio.txt")).unwrap();
    assert!(ratio.contains("1:3"), "{ratio}");
}

#[test]
fn stage_commands_write_their_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let inputs = synth_fixture(&tmp.path().join("fx"), "1", "300");
    for (cmd, artifact) in
        [("match", "matches.csv"), ("dedup", "ledger.csv"), ("disambiguate", "employers.csv"), ("discover", "discovery.csv")]
    {
        let out = tmp.path().join(cmd);
        let mut args = vec![cmd, "--out", out.to_str().unwrap(), "--input"];
        args.extend(inputs.iter().map(String::as_str));
        let o = run(&args);
        assert_eq!(code(&o), 0, "{cmd}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(out.join(artifact).exists(), "{cmd}");
        assert_eq!(value(&manifest(&out), "command").as_deref(), Some(cmd));
    }
    let header = fs::read_to_string(tmp.path().join("dedup/ledger.csv")).unwrap();
    assert!(header.starts_with("job_id,region,function,family,title,weight_num,weight_den\n"));
}
