//! The CLI contract shared by the integration tests and the acceptance run:
//! every command against a passing, a domain-negative and a usage-error input,
//! plus the golden JSON reports.

#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub const BIN: &str = env!("CARGO_BIN_EXE_opm-fixpoint");

pub fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

pub fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

/// Runs the binary with OPM_FIXPOINT_SEED cleared unless `env` sets it.
pub fn run(args: &[String], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(BIN);
    cmd.args(args).env_remove("OPM_FIXPOINT_SEED");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

pub struct Case {
    pub name: &'static str,
    pub args: Vec<String>,
    pub exit: i32,
}

fn case(name: &'static str, exit: i32, args: &[&str]) -> Case {
    let args = args
        .iter()
        .map(|a| match a.strip_prefix('@') {
            Some(f) => fixture(f),
            None => a.to_string(),
        })
        .collect();
    Case { name, args, exit }
}

/// `@name` expands to a fixture path.
pub fn exit_matrix() -> Vec<Case> {
    vec![
        case("validate/pass", 0, &["validate", "@two_point.json"]),
        case("validate/domain", 1, &["validate", "@triangle.json"]),
        case("validate/usage", 2, &["validate", "@empty.json"]),
        case(
            "check/pass",
            0,
            &["check", "@two_point.json", "--condition=new"],
        ),
        case(
            "check/domain",
            1,
            &["check", "@two_point.json", "--condition=classical"],
        ),
        case(
            "check/usage",
            2,
            &["check", "@two_point.json", "--condition=bogus"],
        ),
        case(
            "solve/pass",
            0,
            &["solve", "@two_point.json", "--x0=0", "--y0=1"],
        ),
        case(
            "solve/domain",
            1,
            &["solve", "@constant.json", "--x0=1", "--y0=0"],
        ),
        case(
            "solve/usage",
            2,
            &["solve", "@linear.json", "--x0=abc", "--y0=1"],
        ),
        case("enumerate/pass", 0, &["enumerate", "@two_point.json"]),
        case("enumerate/domain", 1, &["enumerate", "@flip.json"]),
        case("enumerate/usage", 2, &["enumerate", "@linear.json"]),
        case("search/pass", 0, &["search", "--count=0"]),
        case(
            "search/domain",
            1,
            &[
                "search",
                "--n=4",
                "--count=300",
                "--seed=1",
                "--distance-step=0.05",
                "--distance-max=1",
            ],
        ),
        case("search/usage", 2, &["search", "--n=9"]),
    ]
}

/// Cases whose `--format=json` output is pinned byte-for-byte in `tests/golden`.
pub fn golden_cases() -> Vec<Case> {
    vec![
        case("validate_two_point", 0, &["validate", "@two_point.json"]),
        case("validate_triangle", 1, &["validate", "@triangle.json"]),
        case("validate_empty", 2, &["validate", "@empty.json"]),
        case("check_two_point_all", 1, &["check", "@two_point.json"]),
        case(
            "check_two_point_new",
            0,
            &["check", "@two_point.json", "--condition=new"],
        ),
        case(
            "check_one_point_all",
            0,
            &["check", "@one_point.json", "--condition=all"],
        ),
        case(
            "solve_two_point",
            0,
            &["solve", "@two_point.json", "--x0=0", "--y0=1"],
        ),
        case(
            "solve_constant_unmet",
            1,
            &["solve", "@constant.json", "--x0=1", "--y0=0"],
        ),
        case(
            "solve_linear",
            0,
            &["solve", "@linear.json", "--x0=-1", "--y0=1", "--tol=1e-9"],
        ),
        case("enumerate_two_point", 0, &["enumerate", "@two_point.json"]),
        case("enumerate_constant", 0, &["enumerate", "@constant.json"]),
        case("enumerate_linear", 2, &["enumerate", "@linear.json"]),
        case(
            "search_n3_seed7",
            0,
            &["search", "--n=3", "--count=100", "--seed=7"],
        ),
        case(
            "search_fine_grid",
            1,
            &[
                "search",
                "--n=4",
                "--count=300",
                "--seed=1",
                "--distance-step=0.05",
                "--distance-max=1",
            ],
        ),
    ]
}

pub fn json_args(c: &Case) -> Vec<String> {
    let mut args = vec!["--format=json".to_string()];
    args.extend(c.args.iter().cloned());
    args
}

/// Compares a case's JSON output with its golden file. With
/// OPM_UPDATE_GOLDEN set the file is rewritten instead.
pub fn check_golden(c: &Case) -> Result<(), String> {
    let out = run(&json_args(c), &[]);
    let code = out.status.code().unwrap_or(-1);
    if code != c.exit {
        return Err(format!("{}: exit {code}, expected {}", c.name, c.exit));
    }
    let stdout = String::from_utf8(out.stdout).map_err(|e| format!("{}: {e}", c.name))?;
    serde_json::from_str::<serde_json::Value>(&stdout)
        .map_err(|e| format!("{}: output is not JSON: {e}", c.name))?;
    let path = golden_dir().join(format!("{}.json", c.name));
    if std::env::var_os("OPM_UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, &stdout).map_err(|e| e.to_string())?;
        return Ok(());
    }
    let want = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    if want != stdout {
        return Err(format!(
            "{}: output differs from {}",
            c.name,
            path.display()
        ));
    }
    Ok(())
}
