use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use lmtr_bench::emit::{read_bundle_json, read_records_csv, RECORDS_CSV, RECORDS_JSON};
use lmtr_bench::OUT_DIR_ENV;

fn bench(args: &[&str]) -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_bench"));
    cmd.args(args).env_remove(OUT_DIR_ENV);
    cmd
}

fn ok(mut cmd: Command) -> Output {
    let out = cmd.output().unwrap();
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn small_run(dir: &Path) -> Vec<String> {
    let dir = dir.to_str().unwrap().to_string();
    [
        "run",
        "--problems",
        "ext_rosenbrock,testquad,ext_beale",
        "--n",
        "20",
        "--reps",
        "3",
        "--discard",
        "1",
        "--out",
        &dir,
    ]
    .map(String::from)
    .to_vec()
}

fn args(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}

#[test]
fn run_then_profile() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("out");
    ok(bench(&args(&small_run(&dir))));

    let records = read_records_csv(&dir.join(RECORDS_CSV)).unwrap();
    assert_eq!(records.len(), 6);
    assert!(records.iter().all(|r| r.converged() && r.n == 20));
    let bundle = read_bundle_json(&dir.join(RECORDS_JSON)).unwrap();
    assert_eq!(bundle.records, records);
    assert_eq!(bundle.configs.len(), 2);

    let text = fs::read_to_string(dir.join(RECORDS_CSV)).unwrap();
    assert!(!text.contains('\r'));

    ok(bench(&[
        "profile",
        "--metric",
        "iter",
        "--in",
        dir.to_str().unwrap(),
        "--format",
        "tsv-profile",
    ]));
    let tsv = fs::read_to_string(dir.join("profile_iter.tsv")).unwrap();
    let mut lines = tsv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "tau\tdense(c=1,lambda=0.5,everywhere=true)\tconventional"
    );
    assert_eq!(lines.count(), 200);

    // Same records, same bytes.
    ok(bench(&[
        "profile",
        "--metric",
        "iter",
        "--in",
        dir.to_str().unwrap(),
    ]));
    assert_eq!(
        fs::read_to_string(dir.join("profile_iter.tsv")).unwrap(),
        tsv
    );

    ok(bench(&[
        "profile",
        "--metric",
        "time",
        "--in",
        dir.to_str().unwrap(),
        "--format",
        "json",
    ]));
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("profile_time.json")).unwrap()).unwrap();
    assert_eq!(json.as_array().unwrap().len(), 2);
}

#[test]
fn config_file_overrides_flags() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("from-flag");
    let cfg_dir = tmp.path().join("from-file");
    let cfg = tmp.path().join("bench.toml");
    fs::write(
        &cfg,
        format!(
            "n = 12\nsolvers = \"conventional\"\nreps = 1\nout = {:?}\n",
            cfg_dir.to_str().unwrap()
        ),
    )
    .unwrap();
    let mut a = small_run(&dir);
    a.extend(["--config".into(), cfg.to_str().unwrap().into()]);
    ok(bench(&args(&a)));

    assert!(!dir.exists());
    let records = read_records_csv(&cfg_dir.join(RECORDS_CSV)).unwrap();
    assert_eq!(records.len(), 3);
    assert!(records
        .iter()
        .all(|r| r.n == 12 && r.solver_id == "conventional"));
    let bundle = read_bundle_json(&cfg_dir.join(RECORDS_JSON)).unwrap();
    assert_eq!(bundle.suite.reps, 1);
}

#[test]
fn environment_sets_only_the_output_directory() {
    let tmp = tempfile::tempdir().unwrap();
    let env_dir = tmp.path().join("env");
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_bench"));
    cmd.args(["run", "--problems", "ext_beale", "--n", "10", "--reps", "1"])
        .env(OUT_DIR_ENV, &env_dir)
        .current_dir(tmp.path());
    ok(cmd);
    assert_eq!(
        read_records_csv(&env_dir.join(RECORDS_CSV)).unwrap().len(),
        2
    );

    // An explicit flag wins over the environment.
    let flag_dir = tmp.path().join("flag");
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_bench"));
    cmd.args([
        "run",
        "--problems",
        "ext_beale",
        "--n",
        "10",
        "--reps",
        "1",
        "--out",
    ])
    .arg(&flag_dir)
    .env(OUT_DIR_ENV, &env_dir);
    ok(cmd);
    assert!(flag_dir.join(RECORDS_CSV).exists());
}

#[test]
fn bad_inputs_fail_with_a_message() {
    let tmp = tempfile::tempdir().unwrap();
    let out_dir = tmp.path().join("x");
    let out_arg = out_dir.to_str().unwrap();
    for argv in [
        vec!["run", "--solvers", "dense:c=0.5", "--out", out_arg],
        vec!["run", "--solvers", "newton", "--out", out_arg],
        vec!["run", "--problems", "nope", "--out", out_arg],
        vec!["profile", "--metric", "speed", "--in", out_arg],
        vec!["profile", "--in", out_arg],
    ] {
        let out = bench(&argv).output().unwrap();
        assert!(!out.status.success(), "{argv:?}");
        assert!(
            String::from_utf8_lossy(&out.stderr).contains("error"),
            "{argv:?}"
        );
    }
}

#[test]
fn unwritable_output_names_the_path() {
    let tmp = tempfile::tempdir().unwrap();
    let blocker = tmp.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let target = blocker.join("out");
    let out = bench(&args(&small_run(&target))).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains(target.to_str().unwrap()));
}

#[test]
fn blend_without_max_term_matches_conventional_records() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("out");
    let mut a = small_run(&dir);
    a.extend([
        "--solvers".into(),
        "dense:c=1,lambda=0,everywhere=true;conventional".into(),
    ]);
    ok(bench(&args(&a)));
    let records = read_records_csv(&dir.join(RECORDS_CSV)).unwrap();
    for pair in records.chunks(2) {
        let (d, c) = (&pair[0], &pair[1]);
        assert_eq!(c.solver_id, "conventional");
        assert_eq!(
            (
                d.iterations,
                d.total_steps,
                d.status,
                d.f_final,
                d.g_norm_final,
                d.f_evals
            ),
            (
                c.iterations,
                c.total_steps,
                c.status,
                c.f_final,
                c.g_norm_final,
                c.f_evals
            )
        );
    }
}
