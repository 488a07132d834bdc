use std::fmt::Write as _;
use std::path::Path;

use opm_fixpoint::conditions::{
    check_classical_condition, check_new_condition, check_remark_ratio, is_coupled_fixed_point,
    is_mixed_monotone, FixedPointCheck, MonotoneArgument, DEFAULT_EPS_FP,
};
use opm_fixpoint::oracle::{
    append_archive, distance_grid, enumerate_cfp, separation_bound, stress_theorem,
    FailedConclusion, RandomInstanceSpec, SeparationReport,
};
use opm_fixpoint::solver::{check_start, iterate, ConvergenceMode, SolverOptions, VerdictRecord};
use opm_fixpoint::space::AxiomViolation;
use opm_fixpoint::{
    ConditionName, ConditionReport, CoupledMap, Domain, GridSpec, Instance, InstanceFile,
    OrderedMetricSpace, Point, StressSummary, TraceRecord, Violation,
};
use serde::Serialize;

use crate::report::{CliError, Output, EXIT_NEGATIVE, EXIT_OK};
use crate::{CheckArgs, ConditionArg, SearchArgs, SolveArgs};

fn load(path: &Path) -> Result<InstanceFile, CliError> {
    Ok(InstanceFile::load(path)?)
}

/// Loads, validates and builds an instance. Axiom violations are a negative
/// verdict: the commands that need a valid instance refuse with exit 1.
fn prepare(path: &Path) -> Result<(InstanceFile, Instance), CliError> {
    let doc = load(path)?;
    let report = doc.validate()?;
    if !report.ok {
        let list: Vec<String> = report.violations.iter().map(ToString::to_string).collect();
        return Err(CliError::negative(
            "validation",
            format!("instance fails validation: {}", list.join("; ")),
        ));
    }
    let instance = doc.build()?;
    Ok((doc, instance))
}

// ---------------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct ValidateDoc<'a> {
    command: &'static str,
    ok: bool,
    violations: &'a [AxiomViolation],
}

pub fn validate(path: &Path) -> Result<Output, CliError> {
    let report = load(path)?.validate()?;
    let mut text = String::new();
    if report.ok {
        text.push_str("valid: metric, order and map checks pass\n");
    } else {
        let _ = writeln!(text, "invalid: {} violation(s)", report.violations.len());
        for v in &report.violations {
            let _ = writeln!(text, "  - {v}");
        }
    }
    let doc = ValidateDoc {
        command: "validate",
        ok: report.ok,
        violations: &report.violations,
    };
    Ok(Output::new(
        if report.ok { EXIT_OK } else { EXIT_NEGATIVE },
        text,
        &doc,
    ))
}

// ---------------------------------------------------------------------------
// check
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct CheckDoc<'a> {
    command: &'static str,
    holds: bool,
    reports: &'a [ConditionReport],
}

fn requested(c: ConditionArg) -> Vec<ConditionName> {
    match c {
        ConditionArg::All => vec![
            ConditionName::MixedMonotone,
            ConditionName::ClassicalK,
            ConditionName::NewDelta,
            ConditionName::RemarkRatio,
        ],
        ConditionArg::MixedMonotone => vec![ConditionName::MixedMonotone],
        ConditionArg::Classical => vec![ConditionName::ClassicalK],
        ConditionArg::New => vec![ConditionName::NewDelta],
        ConditionArg::Remark => vec![ConditionName::RemarkRatio],
    }
}

fn run_conditions<S, F>(
    space: &S,
    map: &F,
    domain: &Domain<S::Elem>,
    names: &[ConditionName],
) -> Result<Vec<ConditionReport>, CliError>
where
    S: OrderedMetricSpace + Sync,
    F: CoupledMap<S> + Sync,
{
    names
        .iter()
        .map(|name| {
            Ok(match name {
                ConditionName::MixedMonotone => is_mixed_monotone(space, map, domain)?,
                ConditionName::ClassicalK => check_classical_condition(space, map, domain)?,
                ConditionName::NewDelta => check_new_condition(space, map, domain)?,
                ConditionName::RemarkRatio => check_remark_ratio(space, map, domain)?,
            })
        })
        .collect()
}

fn parse_bounds(raw: &[String], dimension: usize) -> Result<Option<Vec<[f64; 2]>>, CliError> {
    if raw.is_empty() {
        return Ok(None);
    }
    let parsed = raw
        .iter()
        .map(|b| {
            let (lo, hi) = b.split_once(':').ok_or_else(|| {
                CliError::usage(
                    "invalid_bounds",
                    format!("bounds `{b}` are not of the form LO:HI"),
                )
            })?;
            let num = |s: &str| {
                s.trim().parse::<f64>().map_err(|_| {
                    CliError::usage(
                        "invalid_bounds",
                        format!("`{s}` in bounds `{b}` is not a number"),
                    )
                })
            };
            Ok([num(lo)?, num(hi)?])
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    match parsed.len() {
        1 => Ok(Some(vec![parsed[0]; dimension])),
        n if n == dimension => Ok(Some(parsed)),
        n => Err(CliError::usage(
            "invalid_bounds",
            format!("{n} bounds given for dimension {dimension}; give one or {dimension}"),
        )),
    }
}

fn render_condition(r: &ConditionReport) -> String {
    let mut s = String::new();
    let scope = if r.exhaustive {
        "exhaustive"
    } else {
        "sampled"
    };
    let verdict = match (r.condition, r.holds) {
        (ConditionName::ClassicalK, true) => {
            format!("holds, minimal_k = {}", r.minimal_k.unwrap_or(0.0))
        }
        (ConditionName::ClassicalK, false) => match r.minimal_k {
            Some(k) => format!("infeasible, minimal_k = {k}"),
            None => "infeasible, no finite k (distinct images at zero distance)".to_string(),
        },
        (_, true) => "holds".to_string(),
        (_, false) => "fails".to_string(),
    };
    let _ = write!(
        s,
        "{}: {verdict} ({scope}, {} checked",
        r.condition, r.quadruples_checked
    );
    if let Some(d) = r.max_delta {
        let _ = write!(s, ", max delta = {d}");
    }
    if let Some(p) = r.premise_quadruples {
        let _ = write!(s, ", {p} with d(x,u)+d(y,v) < 1/4");
    }
    s.push_str(")\n");
    match &r.worst_violation {
        Some(Violation::Inequality {
            quadruple,
            lhs,
            rhs,
        }) => {
            let [x, y, u, v] = quadruple;
            let _ = writeln!(
                s,
                "  witness (x, y, u, v) = ({x}, {y}, {u}, {v}): lhs {lhs} > rhs {rhs}"
            );
        }
        Some(Violation::Monotonicity {
            argument,
            low,
            high,
            fixed,
            image_low,
            image_high,
        }) => {
            let line = match argument {
                MonotoneArgument::First => format!(
                    "x = {low} <= {high} with y = {fixed}, but F(x,y) = {image_low} is not <= {image_high}"
                ),
                MonotoneArgument::Second => format!(
                    "y = {low} <= {high} with x = {fixed}, but F(x,y) = {image_low} is not >= {image_high}"
                ),
            };
            let _ = writeln!(s, "  witness: {line}");
        }
        None => {}
    }
    s
}

pub fn check(args: &CheckArgs) -> Result<Output, CliError> {
    let (_, instance) = prepare(&args.file)?;
    let names = requested(args.condition);
    let reports = match &instance {
        Instance::Finite { space, map, .. } => {
            run_conditions(space, map, &Domain::finite(space), &names)?
        }
        Instance::RealVector { space, map, .. } => {
            let spec = GridSpec {
                points_per_axis: args.grid_points,
                bounds: parse_bounds(&args.bounds, space.dimension())?,
            };
            let domain = Domain::grid(space, &spec)?;
            run_conditions(space, map, &domain, &names)?
        }
    };
    let holds = reports.iter().all(|r| r.holds);
    let text: String = reports.iter().map(render_condition).collect();
    let doc = CheckDoc {
        command: "check",
        holds,
        reports: &reports,
    };
    Ok(Output::new(
        if holds { EXIT_OK } else { EXIT_NEGATIVE },
        text,
        &doc,
    ))
}

// ---------------------------------------------------------------------------
// solve
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct StartDoc {
    x0: Point,
    y0: Point,
    holds: bool,
    x_side: bool,
    y_side: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    failure: Option<String>,
}

#[derive(Serialize)]
struct SolveDoc {
    command: &'static str,
    start: StartDoc,
    verdict: Option<VerdictRecord>,
    steps: usize,
    last_step: Option<f64>,
    monotone: bool,
    max_beta: Option<f64>,
    fixed_point: Option<FixedPointCheck>,
    hypothesis_unmet: bool,
}

fn parse_point(raw: &str, finite: bool) -> Result<Point, CliError> {
    if finite {
        return Ok(Point::Label(raw.to_string()));
    }
    raw.split(',')
        .map(|c| {
            c.trim().parse::<f64>().map_err(|_| {
                CliError::usage("invalid_point", format!("`{c}` in `{raw}` is not a number"))
            })
        })
        .collect::<Result<Vec<_>, _>>()
        .map(Point::Vector)
}

fn solve_on<S, F>(
    space: &S,
    map: &F,
    start: (S::Elem, S::Elem),
    opts: &SolverOptions,
    trace_out: Option<&Path>,
) -> Result<Output, CliError>
where
    S: OrderedMetricSpace + ConvergenceMode,
    F: CoupledMap<S>,
{
    let (x0, y0) = start;
    let check = check_start(space, map, &x0, &y0)?;
    let failure = check.describe(space, &x0, &y0);
    let start_doc = StartDoc {
        x0: space.point(&x0),
        y0: space.point(&y0),
        holds: check.holds,
        x_side: check.x_side,
        y_side: check.y_side,
        failure: failure.clone(),
    };
    let mut text = String::new();
    let yes = |b: bool| if b { "yes" } else { "no" };
    let _ = writeln!(
        text,
        "start ({}, {}): x0 <= F(x0,y0) {}, y0 >= F(y0,x0) {}",
        start_doc.x0,
        start_doc.y0,
        yes(check.x_side),
        yes(check.y_side)
    );

    if !check.holds && !opts.allow_unmet_start {
        let _ = writeln!(
            text,
            "start condition unmet: {}",
            failure.unwrap_or_default()
        );
        let doc = SolveDoc {
            command: "solve",
            start: start_doc,
            verdict: None,
            steps: 0,
            last_step: None,
            monotone: false,
            max_beta: None,
            fixed_point: None,
            hypothesis_unmet: true,
        };
        return Ok(Output::new(EXIT_NEGATIVE, text, &doc));
    }

    let trace = iterate(space, map, &x0, &y0, opts)?;
    let record = TraceRecord::new(space, &trace);
    if let Some(path) = trace_out {
        let json = serde_json::to_string_pretty(&record).expect("traces serialize");
        std::fs::write(path, json + "\n")
            .map_err(|e| CliError::usage("io", format!("cannot write {}: {e}", path.display())))?;
    }
    let fixed_point = match trace.limit() {
        Some((x, y)) => Some(is_coupled_fixed_point(space, map, x, y, DEFAULT_EPS_FP)?),
        None => None,
    };
    let monotone = trace.monotone_ok.iter().all(|&m| m);
    let max_beta = trace.betas.iter().copied().reduce(f64::max);

    if trace.hypothesis_unmet {
        text.push_str("warning: iterating from a start that fails the start condition\n");
    }
    match &record.verdict {
        VerdictRecord::Converged { limit, iterations } => {
            let _ = writeln!(text, "converged after {iterations} iteration(s)");
            let _ = writeln!(text, "limit: ({}, {})", limit[0], limit[1]);
        }
        VerdictRecord::MaxIterationsExceeded { iterations } => {
            let _ = writeln!(text, "no convergence within {iterations} iteration(s)");
        }
        VerdictRecord::Cycle { period, iterations } => {
            let _ = writeln!(
                text,
                "entered a cycle of period {period} after {iterations} iteration(s)"
            );
        }
    }
    if let Some(d) = trace.step_distances.last() {
        let _ = writeln!(text, "last step: {d}");
    }
    let _ = writeln!(text, "monotone sequences: {}", yes(monotone));
    if let Some(fp) = &fixed_point {
        let _ = writeln!(
            text,
            "coupled fixed point: {} (gap {})",
            yes(fp.is_fixed),
            fp.gap
        );
    }
    let code = if trace.is_converged() {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    };
    let doc = SolveDoc {
        command: "solve",
        start: start_doc,
        verdict: Some(record.verdict),
        steps: trace.step_distances.len(),
        last_step: trace.step_distances.last().copied(),
        monotone,
        max_beta,
        fixed_point,
        hypothesis_unmet: trace.hypothesis_unmet,
    };
    Ok(Output::new(code, text, &doc))
}

pub fn solve(args: &SolveArgs) -> Result<Output, CliError> {
    let (doc, instance) = prepare(&args.file)?;
    let finite = doc.is_finite();
    let from_file = doc.start.as_ref();
    let pick =
        |flag: &Option<String>, file: Option<&Point>, name: &str| -> Result<Point, CliError> {
            match (flag, file) {
                (Some(raw), _) => parse_point(raw, finite),
                (None, Some(p)) => Ok(p.clone()),
                (None, None) => Err(CliError::usage(
                    "missing_start",
                    format!("no {name}: pass --{name} or give `start` in the instance file"),
                )),
            }
        };
    let x0 = pick(&args.x0, from_file.map(|s| &s.x0), "x0")?;
    let y0 = pick(&args.y0, from_file.map(|s| &s.y0), "y0")?;

    let mut opts = doc.solver_options();
    if let Some(tol) = args.tol {
        opts.tol = tol;
    }
    if let Some(max_iter) = args.max_iter {
        opts.max_iter = max_iter;
    }
    opts.allow_unmet_start = args.allow_unmet_start;
    let trace_out = args.trace_out.as_deref();

    match &instance {
        Instance::Finite { space, map, .. } => {
            let start = (space.resolve(&x0)?, space.resolve(&y0)?);
            solve_on(space, map, start, &opts, trace_out)
        }
        Instance::RealVector { space, map, .. } => {
            let start = (space.resolve(&x0)?, space.resolve(&y0)?);
            solve_on(space, map, start, &opts, trace_out)
        }
    }
}

// ---------------------------------------------------------------------------
// enumerate
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct EnumerateDoc {
    command: &'static str,
    count: usize,
    pairs: Vec<[String; 2]>,
    separation: SeparationReport,
}

pub fn enumerate(path: &Path) -> Result<Output, CliError> {
    let doc = load(path)?;
    if !doc.is_finite() {
        return Err(CliError::usage(
            "backend",
            "enumerate requires finite backend",
        ));
    }
    let (_, instance) = prepare(path)?;
    let Instance::Finite { space, map, .. } = instance else {
        unreachable!("finite document builds a finite instance")
    };
    let cfps = enumerate_cfp(&space, &map);
    let sep = separation_bound(&space, &cfps);
    let pairs = cfps.labels(&space);

    let mut text = String::new();
    let _ = writeln!(text, "{} coupled fixed point(s)", pairs.len());
    for [x, y] in &pairs {
        let _ = writeln!(text, "  ({x}, {y})");
    }
    match (&sep.minimum, &sep.achieved_by) {
        (Some(m), Some([a, b])) => {
            let yes = if m >= &0.25 { "yes" } else { "no" };
            let _ = writeln!(
                text,
                "separation minimum {m} between ({}, {}) and ({}, {}); ≥ 1/4: {yes}",
                a[0], a[1], b[0], b[1]
            );
            match sep.comparable_minimum {
                Some(c) => {
                    let _ = writeln!(text, "comparable-pair minimum {c}");
                }
                None => text.push_str("no comparable pair of coupled fixed points\n"),
            }
        }
        _ => text.push_str("separation vacuous: fewer than two coupled fixed points\n"),
    }
    let code = if cfps.is_empty() || sep.bound_holds == Some(false) {
        EXIT_NEGATIVE
    } else {
        EXIT_OK
    };
    let doc = EnumerateDoc {
        command: "enumerate",
        count: pairs.len(),
        pairs,
        separation: sep,
    };
    Ok(Output::new(code, text, &doc))
}

// ---------------------------------------------------------------------------
// search
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct FailureDoc {
    seed: u64,
    failed_conclusion: FailedConclusion,
    details: String,
}

#[derive(Serialize)]
struct SearchDoc<'a> {
    command: &'static str,
    spec: &'a RandomInstanceSpec,
    count: usize,
    summary: &'a StressSummary,
    conclusion_failures: Vec<FailureDoc>,
}

fn summary_lines(s: &StressSummary) -> String {
    let rows: [(&str, usize); 20] = [
        ("instances", s.instances),
        ("generation failures", s.generation_failures),
        ("mixed monotone", s.mixed_monotone),
        ("new condition", s.new_condition),
        ("some valid start", s.valid_start),
        ("hypothesis satisfying", s.hypothesis_satisfying),
        ("  coupled fixed point exists", s.cfp_nonempty),
        ("  traces", s.traces),
        ("  traces converged", s.traces_converged),
        ("  limits in fixed-point set", s.limits_in_cfp_set),
        ("  monotone steps", s.monotone_steps),
        ("  non-monotone steps", s.monotone_step_failures),
        ("  beta values", s.beta_values),
        ("  beta outside [0,1)", s.beta_out_of_range),
        (
            "  traces with nonincreasing beta",
            s.beta_nonincreasing_traces,
        ),
        ("  separation checked", s.separation_checked),
        ("  separation >= 1/4", s.separation_held),
        ("small-gap quadruples", s.remark_premise_quadruples),
        ("small-gap ratio violations", s.remark_violations),
        ("conclusion failures", s.conclusion_failures),
    ];
    rows.iter().map(|(k, v)| format!("{k:<34}{v}\n")).collect()
}

pub fn search(args: &SearchArgs) -> Result<Output, CliError> {
    let spec = RandomInstanceSpec {
        min_elements: args.min_n.unwrap_or(args.n.min(2)),
        max_elements: args.n,
        distance_values: distance_grid(args.distance_step, args.distance_max)?,
        order_density: args.order_density,
        seed: args.seed,
    };
    spec.validate()?;
    let run = stress_theorem(&spec, args.count)?;
    if let Some(path) = &args.archive {
        append_archive(path, &run.failures)
            .map_err(|e| CliError::usage("io", format!("cannot write {}: {e}", path.display())))?;
    }

    let mut text = format!(
        "search: {} instance(s), {}..={} elements, seed {}\n",
        args.count, spec.min_elements, spec.max_elements, spec.seed
    );
    text.push_str(&summary_lines(&run.summary));
    for f in &run.failures {
        let _ = writeln!(
            text,
            "failure seed {}: {:?}: {}",
            f.seed, f.failed_conclusion, f.details
        );
    }
    if let (Some(path), false) = (&args.archive, run.failures.is_empty()) {
        let _ = writeln!(
            text,
            "{} failure(s) appended to {}",
            run.failures.len(),
            path.display()
        );
    }
    let code = if run.failures.is_empty() {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    };
    let doc = SearchDoc {
        command: "search",
        spec: &run.spec,
        count: run.count,
        summary: &run.summary,
        conclusion_failures: run
            .failures
            .iter()
            .map(|f| FailureDoc {
                seed: f.seed,
                failed_conclusion: f.failed_conclusion.clone(),
                details: f.details.clone(),
            })
            .collect(),
    };
    Ok(Output::new(code, text, &doc))
}
