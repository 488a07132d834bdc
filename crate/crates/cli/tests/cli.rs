mod common;

use common::{check_golden, exit_matrix, fixture, golden_cases, run};
use serde_json::Value;

fn args(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

fn stdout(list: &[&str]) -> (i32, String) {
    let out = run(&args(list), &[]);
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
    )
}

#[test]
fn exit_codes() {
    for c in exit_matrix() {
        let out = run(&c.args, &[]);
        assert_eq!(
            out.status.code(),
            Some(c.exit),
            "{}: {}",
            c.name,
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn json_reports_match_goldens() {
    let failures: Vec<String> = golden_cases()
        .iter()
        .filter_map(|c| check_golden(c).err())
        .collect();
    assert!(failures.is_empty(), "{failures:#?}");
}

#[test]
fn classical_report_names_minimal_k() {
    let (code, out) = stdout(&["check", &fixture("two_point.json"), "--condition=classical"]);
    assert_eq!(code, 1);
    assert!(out.contains("infeasible, minimal_k = 2"), "{out}");
    assert!(out.contains("(1, 0, 0, 0)"), "{out}");
}

#[test]
fn all_conditions_in_fixed_order() {
    let (_, out) = stdout(&["--format=json", "check", &fixture("two_point.json")]);
    let v: Value = serde_json::from_str(&out).unwrap();
    let names: Vec<&str> = v["reports"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["condition"].as_str().unwrap())
        .collect();
    assert_eq!(
        names,
        ["mixed_monotone", "classical_k", "new_delta", "remark_ratio"]
    );
}

#[test]
fn enumerate_text_listing() {
    let (code, out) = stdout(&["enumerate", &fixture("two_point.json")]);
    assert_eq!(code, 0);
    assert!(out.starts_with("4 coupled fixed point(s)"), "{out}");
    assert!(out.contains("separation minimum 2 "), "{out}");
    assert!(out.contains("≥ 1/4: yes"), "{out}");

    let (code, out) = stdout(&["enumerate", &fixture("constant.json")]);
    assert_eq!(code, 0);
    assert!(out.contains("1 coupled fixed point(s)\n  (0, 0)"), "{out}");
    assert!(out.contains("vacuous"), "{out}");
}

#[test]
fn unmet_start_names_the_inequality() {
    let (code, out) = stdout(&["solve", &fixture("constant.json"), "--x0=1", "--y0=0"]);
    assert_eq!(code, 1);
    assert!(out.contains("x0 <= F(x0,y0) fails"), "{out}");

    let (code, out) = stdout(&[
        "solve",
        &fixture("constant.json"),
        "--x0=1",
        "--y0=0",
        "--allow-unmet-start",
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("limit: (0, 0)"), "{out}");
}

#[test]
fn start_comes_from_file_or_flags() {
    let (code, out) = stdout(&["solve", &fixture("two_point.json")]);
    assert_eq!(code, 0);
    assert!(out.contains("limit: (0, 1)"), "{out}");

    let out = run(&args(&["solve", &fixture("constant.json")]), &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--x0"));

    let (code, _) = stdout(&["solve", &fixture("two_point.json"), "--x0=7", "--y0=1"]);
    assert_eq!(code, 2);
}

#[test]
fn trace_file_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("trace.json");
    let (code, _) = stdout(&[
        "solve",
        &fixture("linear.json"),
        "--trace-out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let trace: opm_fixpoint::TraceRecord =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(trace.points.len(), trace.step_distances.len() + 1);
    assert!(trace.betas.iter().all(|b| (0.0..1.0).contains(b)));
    let opm_fixpoint::solver::VerdictRecord::Converged { iterations, .. } = trace.verdict else {
        panic!("{:?}", trace.verdict)
    };
    assert!(iterations <= 60);
}

#[test]
fn solver_settings_from_file_and_flags() {
    // The file caps iterations at 60; a tighter flag wins.
    let (code, out) = stdout(&["solve", &fixture("linear.json"), "--max-iter=5"]);
    assert_eq!(code, 1);
    assert!(
        out.contains("no convergence within 5 iteration(s)"),
        "{out}"
    );
    let (code, _) = stdout(&["solve", &fixture("linear.json"), "--tol=0"]);
    assert_eq!(code, 2);
}

#[test]
fn real_vector_check_uses_grid_and_bounds() {
    let (code, out) = stdout(&[
        "--format=json",
        "check",
        &fixture("linear.json"),
        "--condition=classical",
        "--grid-points=5",
    ]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["reports"][0]["exhaustive"], Value::Bool(false));
    let k = v["reports"][0]["minimal_k"].as_f64().unwrap();
    assert!((k - 0.5).abs() < 1e-12, "{k}");

    let (code, _) = stdout(&[
        "check",
        &fixture("linear.json"),
        "--condition=classical",
        "--bounds=-0.5:0.5",
    ]);
    assert_eq!(code, 0);
    let (code, _) = stdout(&["check", &fixture("linear.json"), "--bounds=oops"]);
    assert_eq!(code, 2);
    let (code, _) = stdout(&[
        "check",
        &fixture("linear.json"),
        "--bounds=0:1",
        "--bounds=0:1",
    ]);
    assert_eq!(code, 2);
}

#[test]
fn seed_env_var_sets_the_default_seed() {
    let search = args(&["--format=json", "search", "--n=3", "--count=20"]);
    let with_env = run(&search, &[("OPM_FIXPOINT_SEED", "7")]);
    let explicit = run(
        &args(&["--format=json", "search", "--n=3", "--count=20", "--seed=7"]),
        &[],
    );
    let default = run(&search, &[]);
    assert_eq!(with_env.stdout, explicit.stdout);
    assert_ne!(with_env.stdout, default.stdout);
    // A flag beats the environment.
    let flag = run(
        &args(&["--format=json", "search", "--n=3", "--count=20", "--seed=7"]),
        &[("OPM_FIXPOINT_SEED", "8")],
    );
    assert_eq!(flag.stdout, explicit.stdout);
}

#[test]
fn search_is_byte_identical_across_runs() {
    let a = run(&args(&["search", "--n=3", "--count=100", "--seed=7"]), &[]);
    let b = run(&args(&["search", "--n=3", "--count=100", "--seed=7"]), &[]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn search_archive_is_appended() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("failures.jsonl");
    let fine = [
        "search",
        "--n=4",
        "--count=300",
        "--seed=1",
        "--distance-step=0.05",
        "--distance-max=1",
        "--archive",
        path.to_str().unwrap(),
    ];
    assert_eq!(stdout(&fine).0, 1);
    let first = std::fs::read_to_string(&path).unwrap().lines().count();
    assert!(first > 0);
    assert_eq!(stdout(&fine).0, 1);
    let lines: Vec<String> = std::fs::read_to_string(&path)
        .unwrap()
        .lines()
        .map(String::from)
        .collect();
    assert_eq!(lines.len(), 2 * first);

    // Each line rebuilds a loadable instance file that `enumerate` agrees with.
    let entry: opm_fixpoint::oracle::ArchiveEntry = serde_json::from_str(&lines[0]).unwrap();
    let inst = dir.path().join("instance.json");
    std::fs::write(&inst, entry.instance().to_json_pretty()).unwrap();
    let (code, out) = stdout(&["--format=json", "enumerate", inst.to_str().unwrap()]);
    assert_eq!(code, 1);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["separation"]["bound_holds"], Value::Bool(false));
}

#[test]
fn json_errors_are_json() {
    let (code, out) = stdout(&["--format=json", "validate", &fixture("malformed.json")]);
    assert_eq!(code, 2);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["error"]["kind"], "schema");
    assert_eq!(v["exit_code"], 2);

    let (code, _) = stdout(&["validate", &fixture("does-not-exist.json")]);
    assert_eq!(code, 2);
}

#[test]
fn validator_witnesses() {
    let cases = [
        ("triangle.json", "triangle"),
        ("antisymmetry.json", "antisymmetry"),
        ("reflexivity.json", "reflexivity"),
        ("incomplete_map.json", "missing_map_entry"),
    ];
    for (file, axiom) in cases {
        let (code, out) = stdout(&["--format=json", "validate", &fixture(file)]);
        assert_eq!(code, 1, "{file}");
        let v: Value = serde_json::from_str(&out).unwrap();
        let found: Vec<&str> = v["violations"]
            .as_array()
            .unwrap()
            .iter()
            .map(|x| x["axiom"].as_str().unwrap())
            .collect();
        assert!(found.contains(&axiom), "{file}: {found:?}");
    }
    // Refused by the commands that need a valid instance.
    let (code, _) = stdout(&["check", &fixture("triangle.json")]);
    assert_eq!(code, 1);
}
