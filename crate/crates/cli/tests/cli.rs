use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use scion_core::io::{read_scaling_csv, result_metadata};

fn scion(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scion"))
        .args(args)
        .env_remove("SCION_THREADS")
        .output()
        .expect("binary runs")
}

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
        .display()
        .to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn body(text: &str) -> String {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| format!("{l}\n"))
        .collect()
}

fn meta(text: &str, key: &str) -> String {
    result_metadata(text)
        .into_iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| v)
        .unwrap_or_else(|| panic!("no {key} in\n{text}"))
}

fn generate(dir: &Path, name: &str, args: &[&str]) -> PathBuf {
    let path = dir.join(name);
    let mut full = vec!["gen"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--out", path.to_str().unwrap()]);
    let o = scion(&full);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    path
}

#[test]
fn four_objective_fixture_with_four_threads() {
    let o = scion(&["solve", &fixture("four_objective.txt"), "--threads", "4"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(meta(&text, "nondominated"), "3");
    assert_eq!(meta(&text, "scalarizations_solved"), "11");
    assert_eq!(meta(&text, "threads"), "4");
    assert_eq!(body(&text), "4 3\n4 1 2 1\n2 4 3 2\n1 3 4 3\n");
}

#[test]
fn thread_count_comes_from_the_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_scion"))
        .args(["solve", &fixture("four_objective.txt")])
        .env("SCION_THREADS", "3")
        .output()
        .unwrap();
    assert_eq!(meta(&stdout(&o), "threads"), "3");
}

#[test]
fn result_body_is_identical_across_thread_budgets() {
    let dir = tempfile::tempdir().unwrap();
    let set = generate(
        dir.path(),
        "set.txt",
        &[
            "--kind", "set", "--k", "4", "--n", "300", "--seed", "5", "--shape", "simplex",
        ],
    );
    let kp = generate(
        dir.path(),
        "kp.txt",
        &["--kind", "kp", "--k", "3", "--n", "12", "--seed", "2"],
    );
    for file in [&set, &kp] {
        let file = file.to_str().unwrap();
        let reference = body(&stdout(&scion(&["solve", file, "--threads", "1"])));
        for t in ["2", "4", "8"] {
            assert_eq!(
                body(&stdout(&scion(&["solve", file, "--threads", t]))),
                reference
            );
        }
        let cascade = scion(&["solve", file, "--threads", "4", "--warmstart-cascade"]);
        assert_eq!(body(&stdout(&cascade)), reference);
        let reordered = scion(&["solve", file, "--threads", "2", "--order", "3,1,2"]);
        if reordered.status.success() {
            assert_eq!(body(&stdout(&reordered)), reference);
        }
    }
}

#[test]
fn verify_passes_on_seeded_knapsacks() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for seed in 0..20u64 {
        let k = (2 + seed % 3).to_string();
        let n = (8 + seed % 7).to_string();
        let name = format!("kp{seed}.txt");
        let path = generate(
            dir.path(),
            &name,
            &[
                "--kind",
                "kp",
                "--k",
                &k,
                "--n",
                &n,
                "--seed",
                &seed.to_string(),
            ],
        );
        files.push(path.display().to_string());
    }
    let mut args = vec!["verify", "--threads", "2"];
    args.extend(files.iter().map(String::as_str));
    let o = scion(&args);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(
        stdout(&o).lines().filter(|l| l.contains(": ok ")).count(),
        20
    );
}

#[test]
fn verify_accepts_the_fixtures() {
    let o = scion(&[
        "verify",
        &fixture("four_objective.txt"),
        &fixture("tiny_ilp.txt"),
        &fixture("small_knapsack.txt"),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn scaling_csv_has_one_row_per_budget() {
    let dir = tempfile::tempdir().unwrap();
    let set = generate(
        dir.path(),
        "dense.txt",
        &[
            "--kind", "set", "--k", "4", "--n", "500", "--seed", "9", "--shape", "simplex",
        ],
    );
    let csv = dir.path().join("scale.csv");
    let o = scion(&[
        "scale",
        set.to_str().unwrap(),
        "--max-threads",
        "8",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        "instance,k,n,nondominated,scalarizations,threads,wall_time_seconds,slowdown"
    );
    let records = read_scaling_csv(text.as_bytes()).unwrap();
    assert_eq!(
        records.iter().map(|r| r.threads).collect::<Vec<_>>(),
        vec![1, 2, 4, 8]
    );
    assert!(records.iter().all(|r| r.k == 4 && r.n == 500));
    assert!(records
        .iter()
        .all(|r| r.nondominated == records[0].nondominated));
    assert_eq!(records[0].slowdown, 1.0);
    for r in &records {
        assert_eq!(
            r.slowdown,
            r.wall_time_seconds / records[0].wall_time_seconds
        );
    }
    assert!(records
        .iter()
        .all(|r| r.slowdown.is_finite() && r.slowdown > 0.0));
}

#[test]
fn generator_output_is_reproducible() {
    for kind in ["kp", "set", "ilp"] {
        let a = scion(&[
            "gen", "--kind", kind, "--k", "3", "--n", "7", "--seed", "11",
        ]);
        let b = scion(&[
            "gen", "--kind", kind, "--k", "3", "--n", "7", "--seed", "11",
        ]);
        let c = scion(&[
            "gen", "--kind", kind, "--k", "3", "--n", "7", "--seed", "12",
        ]);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout);
        assert_ne!(a.stdout, c.stdout);
    }
}

#[test]
fn witness_file_lists_one_packing_per_image() {
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path().join("w.txt");
    let o = scion(&[
        "solve",
        &fixture("small_knapsack.txt"),
        "--witnesses",
        w.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let n: usize = meta(&stdout(&o), "nondominated").parse().unwrap();
    let witnesses = std::fs::read_to_string(&w).unwrap();
    assert_eq!(witnesses.lines().count(), n);
    assert!(witnesses.split_whitespace().all(|t| t == "0" || t == "1"));
}

#[test]
fn exit_codes() {
    assert_eq!(scion(&["solve"]).status.code(), Some(2));
    assert_eq!(scion(&["frobnicate"]).status.code(), Some(2));
    let order = scion(&[
        "solve",
        &fixture("four_objective.txt"),
        "--order",
        "1,1,2,3",
    ]);
    assert_eq!(order.status.code(), Some(2));
    assert_eq!(scion(&["solve", "/no/such/file"]).status.code(), Some(3));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "3 2\n1 2 x\n4 5 6\n").unwrap();
    let o = scion(&["solve", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));

    let big = generate(
        dir.path(),
        "big.txt",
        &["--kind", "kp", "--k", "2", "--n", "40", "--seed", "1"],
    );
    assert_eq!(
        scion(&["verify", big.to_str().unwrap()]).status.code(),
        Some(5)
    );
}
