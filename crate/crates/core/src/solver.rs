//! Coupled Picard iteration `x_{n+1} = F(x_n, y_n)`, `y_{n+1} = F(y_n, x_n)`.
//!
//! Alongside the iterates the trace records the step sums
//! `D_n = d(x_n, x_{n+1}) + d(y_n, y_{n+1})`, the per-step monotonicity of the
//! two sequences and the contraction diagnostic
//! `β_n = 2 (D_{n-1} + D_n) / (1 + 2 (D_{n-1} + D_n))`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::map::CoupledMap;
use crate::space::{OrderedMetricSpace, Point};

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_MAX_ITER: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Step-sum threshold for convergence on real vector spaces. Finite
    /// spaces converge on exact repetition instead.
    pub tol: f64,
    pub max_iter: usize,
    /// Iterate even when the start condition fails; the trace is marked.
    pub allow_unmet_start: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            allow_unmet_start: false,
        }
    }
}

/// Result of testing `x0 <= F(x0, y0)` and `y0 >= F(y0, x0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StartCheck<E> {
    pub holds: bool,
    pub x_side: bool,
    pub y_side: bool,
    pub fx: E,
    pub fy: E,
}

impl<E> StartCheck<E> {
    /// Names the failing inequalities, if any.
    pub fn describe<S: OrderedMetricSpace<Elem = E>>(
        &self,
        space: &S,
        x0: &E,
        y0: &E,
    ) -> Option<String> {
        let mut parts = Vec::new();
        if !self.x_side {
            parts.push(format!(
                "x0 <= F(x0,y0) fails: x0 = {}, F(x0,y0) = {}",
                space.point(x0),
                space.point(&self.fx)
            ));
        }
        if !self.y_side {
            parts.push(format!(
                "y0 >= F(y0,x0) fails: y0 = {}, F(y0,x0) = {}",
                space.point(y0),
                space.point(&self.fy)
            ));
        }
        (!parts.is_empty()).then(|| parts.join("; "))
    }
}

pub fn check_start<S, F>(
    space: &S,
    map: &F,
    x0: &S::Elem,
    y0: &S::Elem,
) -> Result<StartCheck<S::Elem>>
where
    S: OrderedMetricSpace,
    F: CoupledMap<S> + ?Sized,
{
    let fx = map.apply(x0, y0)?;
    let fy = map.apply(y0, x0)?;
    let x_side = space.leq(x0, &fx);
    let y_side = space.leq(&fy, y0);
    Ok(StartCheck {
        holds: x_side && y_side,
        x_side,
        y_side,
        fx,
        fy,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict<E> {
    /// `iterations` applications of the map were made; `limit` is the last pair.
    Converged {
        limit: (E, E),
        iterations: usize,
    },
    MaxIterationsExceeded {
        iterations: usize,
    },
    /// Finite spaces only: a non-fixed pair recurred.
    Cycle {
        period: usize,
        iterations: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationTrace<E> {
    pub points: Vec<(E, E)>,
    pub step_distances: Vec<f64>,
    pub betas: Vec<f64>,
    /// Per step: `x_n <= x_{n+1}` and `y_n >= y_{n+1}`.
    pub monotone_ok: Vec<bool>,
    pub verdict: Verdict<E>,
    pub hypothesis_unmet: bool,
}

impl<E> IterationTrace<E> {
    pub fn is_converged(&self) -> bool {
        matches!(self.verdict, Verdict::Converged { .. })
    }

    pub fn limit(&self) -> Option<&(E, E)> {
        match &self.verdict {
            Verdict::Converged { limit, .. } => Some(limit),
            _ => None,
        }
    }
}

/// Whether a space converges on exact repetition rather than a tolerance.
pub trait ConvergenceMode {
    fn discrete(&self) -> bool;
}

impl ConvergenceMode for crate::space::FiniteSpace {
    fn discrete(&self) -> bool {
        true
    }
}

impl ConvergenceMode for crate::space::RealVectorSpace {
    fn discrete(&self) -> bool {
        false
    }
}

pub fn iterate<S, F>(
    space: &S,
    map: &F,
    x0: &S::Elem,
    y0: &S::Elem,
    opts: &SolverOptions,
) -> Result<IterationTrace<S::Elem>>
where
    S: OrderedMetricSpace + ConvergenceMode,
    F: CoupledMap<S> + ?Sized,
{
    if opts.max_iter == 0 {
        return Err(Error::InvalidParameter("max_iter must be positive".into()));
    }
    if opts.tol.is_nan() || opts.tol <= 0.0 {
        return Err(Error::InvalidParameter("tol must be positive".into()));
    }
    let start = check_start(space, map, x0, y0)?;
    if !start.holds && !opts.allow_unmet_start {
        let why = start.describe(space, x0, y0).unwrap_or_default();
        return Err(Error::StartConditionUnmet(why));
    }

    let discrete = space.discrete();
    let mut points = vec![(x0.clone(), y0.clone())];
    let mut steps = Vec::new();
    let mut monotone_ok = Vec::new();
    let mut verdict = None;

    for n in 0..opts.max_iter {
        let (x, y) = &points[n];
        let nx = map.apply(x, y)?;
        let ny = map.apply(y, x)?;
        steps.push(space.dist(x, &nx) + space.dist(y, &ny));
        monotone_ok.push(space.leq(x, &nx) && space.leq(&ny, y));
        let next = (nx, ny);
        let iterations = n + 1;

        if discrete {
            if next == points[n] {
                verdict = Some(Verdict::Converged {
                    limit: next.clone(),
                    iterations,
                });
            } else if let Some(j) = points.iter().position(|p| *p == next) {
                verdict = Some(Verdict::Cycle {
                    period: iterations - j,
                    iterations,
                });
            }
        } else if steps[n] < opts.tol {
            verdict = Some(Verdict::Converged {
                limit: next.clone(),
                iterations,
            });
        }
        points.push(next);
        if verdict.is_some() {
            break;
        }
    }

    let verdict = verdict.unwrap_or(Verdict::MaxIterationsExceeded {
        iterations: opts.max_iter,
    });
    let mut trace = IterationTrace {
        points,
        step_distances: steps,
        betas: Vec::new(),
        monotone_ok,
        verdict,
        hypothesis_unmet: !start.holds,
    };
    if let Ok(b) = beta_sequence(&trace) {
        trace.betas = b.betas;
    }
    Ok(trace)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaReport {
    /// `betas[i]` is β_{i+1}.
    pub betas: Vec<f64>,
    pub nonincreasing: bool,
}

/// `β_n` for every `n >= 1` the trace determines. A converged trace whose
/// last step is exactly zero has reached a stationary pair, so its step sums
/// are extended by one exact zero.
pub fn beta_sequence<E>(trace: &IterationTrace<E>) -> Result<BetaReport> {
    let mut d = trace.step_distances.clone();
    if trace.is_converged() && d.last() == Some(&0.0) {
        d.push(0.0);
    }
    if d.len() < 2 {
        return Err(Error::TraceTooShort(format!(
            "{} step(s) recorded, β_1 needs two",
            trace.step_distances.len()
        )));
    }
    let betas: Vec<f64> = d
        .windows(2)
        .map(|w| {
            let s = w[0] + w[1];
            2.0 * s / (1.0 + 2.0 * s)
        })
        .collect();
    let nonincreasing = betas.windows(2).all(|w| w[1] <= w[0]);
    Ok(BetaReport {
        betas,
        nonincreasing,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CauchyViolation {
    pub n: usize,
    pub m: usize,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CauchyReport {
    pub beta1: f64,
    pub initial_step: f64,
    pub from_index: usize,
    pub pairs_checked: usize,
    pub violation_count: usize,
    /// The first violations found, at most [`MAX_REPORTED_VIOLATIONS`].
    pub violations: Vec<CauchyViolation>,
    pub holds: bool,
}

pub const MAX_REPORTED_VIOLATIONS: usize = 100;

/// Tests `d(x_n, x_m) + d(y_n, y_m) <= β_1^n D_0` for all stored `n < m`
/// with `n >= from_index`. The geometric chain behind the bound only covers
/// `n >= 1`; at `n = 0` the bound is generally false, so pass 0 to see that.
pub fn cauchy_bound_check<S: OrderedMetricSpace>(
    space: &S,
    trace: &IterationTrace<S::Elem>,
    from_index: usize,
) -> Result<CauchyReport> {
    let beta1 = *trace
        .betas
        .first()
        .ok_or_else(|| Error::TraceTooShort("no β_1 recorded".into()))?;
    let d0 = trace.step_distances[0];
    let pts = &trace.points;
    let mut report = CauchyReport {
        beta1,
        initial_step: d0,
        from_index,
        pairs_checked: 0,
        violation_count: 0,
        violations: Vec::new(),
        holds: true,
    };
    let mut factor = beta1.powi(from_index.min(i32::MAX as usize) as i32);
    for n in from_index..pts.len() {
        let rhs = factor * d0;
        for m in (n + 1)..pts.len() {
            report.pairs_checked += 1;
            let lhs = space.dist(&pts[n].0, &pts[m].0) + space.dist(&pts[n].1, &pts[m].1);
            if lhs > rhs {
                report.violation_count += 1;
                if report.violations.len() < MAX_REPORTED_VIOLATIONS {
                    report.violations.push(CauchyViolation { n, m, lhs, rhs });
                }
            }
        }
        factor *= beta1;
    }
    report.holds = report.violation_count == 0;
    Ok(report)
}

// ---------------------------------------------------------------------------
// Report form
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum VerdictRecord {
    Converged {
        limit: [Point; 2],
        iterations: usize,
    },
    MaxIterationsExceeded {
        iterations: usize,
    },
    Cycle {
        period: usize,
        iterations: usize,
    },
}

/// Serializable trace with points in report form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub points: Vec<[Point; 2]>,
    pub step_distances: Vec<f64>,
    pub betas: Vec<f64>,
    pub monotone_ok: Vec<bool>,
    pub verdict: VerdictRecord,
    pub hypothesis_unmet: bool,
}

impl TraceRecord {
    pub fn new<S: OrderedMetricSpace>(space: &S, trace: &IterationTrace<S::Elem>) -> Self {
        let pair = |(x, y): &(S::Elem, S::Elem)| [space.point(x), space.point(y)];
        let verdict = match &trace.verdict {
            Verdict::Converged { limit, iterations } => VerdictRecord::Converged {
                limit: pair(limit),
                iterations: *iterations,
            },
            Verdict::MaxIterationsExceeded { iterations } => VerdictRecord::MaxIterationsExceeded {
                iterations: *iterations,
            },
            Verdict::Cycle { period, iterations } => VerdictRecord::Cycle {
                period: *period,
                iterations: *iterations,
            },
        };
        Self {
            points: trace.points.iter().map(pair).collect(),
            step_distances: trace.step_distances.clone(),
            betas: trace.betas.clone(),
            monotone_ok: trace.monotone_ok.clone(),
            verdict,
            hypothesis_unmet: trace.hypothesis_unmet,
        }
    }

    /// Plain-text table, one row per stored point.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:>6}  {:>24}  {:>24}  {:>12}  {:>10}  mono",
            "n", "x_n", "y_n", "D_n", "beta_n"
        );
        for (n, [x, y]) in self.points.iter().enumerate() {
            let step = self
                .step_distances
                .get(n)
                .map_or(String::new(), |d| format!("{d:.6e}"));
            let beta = match n {
                0 => String::new(),
                _ => self
                    .betas
                    .get(n - 1)
                    .map_or(String::new(), |b| format!("{b:.6}")),
            };
            let mono = self
                .monotone_ok
                .get(n)
                .map_or("", |&ok| if ok { "yes" } else { "no" });
            let _ = writeln!(
                out,
                "{n:>6}  {:>24}  {:>24}  {step:>12}  {beta:>10}  {mono}",
                x.to_string(),
                y.to_string()
            );
        }
        out
    }
}
