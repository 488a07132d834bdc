//! Brute-force ground truth on finite spaces and a seeded stress runner.
//!
//! [`stress_theorem`] draws random finite instances, keeps the ones that
//! satisfy the hypotheses (mixed monotone, δ-ratio condition, a valid start
//! pair) and checks the conclusions: a coupled fixed point exists, every
//! iteration from a valid start converges to one, and distinct coupled fixed
//! points are at least 1/4 apart. Failed conclusions are returned as archive
//! entries carrying everything needed to rebuild the instance.

use std::io::Write as _;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::conditions::{check_new_condition, check_remark_ratio, is_mixed_monotone, Domain};
use crate::error::{Error, Result};
use crate::instance::{FiniteSpaceDoc, InstanceFile};
use crate::map::TableMap;
use crate::solver::{check_start, iterate, SolverOptions, Verdict};
use crate::space::FiniteSpace;

// ---------------------------------------------------------------------------
// Enumeration and separation
// ---------------------------------------------------------------------------

/// Coupled fixed points of a table map, as element index pairs in
/// row-major order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoupledFixedPointSet {
    pub pairs: Vec<(usize, usize)>,
}

impl CoupledFixedPointSet {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, pair: &(usize, usize)) -> bool {
        self.pairs.contains(pair)
    }

    pub fn labels(&self, space: &FiniteSpace) -> Vec<[String; 2]> {
        self.pairs
            .iter()
            .map(|&(x, y)| [space.label(x).to_string(), space.label(y).to_string()])
            .collect()
    }
}

pub fn enumerate_cfp(space: &FiniteSpace, map: &TableMap) -> CoupledFixedPointSet {
    let n = space.len();
    let mut pairs = Vec::new();
    for x in 0..n {
        for y in 0..n {
            if map.get(x, y) == x && map.get(y, x) == y {
                pairs.push((x, y));
            }
        }
    }
    CoupledFixedPointSet { pairs }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparationReport {
    /// Fewer than two coupled fixed points.
    pub vacuous: bool,
    /// Least `d(x,u) + d(y,v)` over unordered pairs of distinct coupled fixed points.
    pub minimum: Option<f64>,
    pub achieved_by: Option<[[String; 2]; 2]>,
    /// `minimum >= 1/4`; absent when vacuous.
    pub bound_holds: Option<bool>,
    /// The same minimum restricted to pairs with `x >= u, y <= v` (or the
    /// reverse), the only pairs the contractive condition speaks about.
    pub comparable_minimum: Option<f64>,
}

pub fn separation_bound(space: &FiniteSpace, cfps: &CoupledFixedPointSet) -> SeparationReport {
    let p = &cfps.pairs;
    let mut best: Option<(f64, usize, usize)> = None;
    let mut comparable: Option<f64> = None;
    for i in 0..p.len() {
        for j in (i + 1)..p.len() {
            let ((x, y), (u, v)) = (p[i], p[j]);
            let s = space.dist_idx(x, u) + space.dist_idx(y, v);
            if best.is_none_or(|(b, _, _)| s < b) {
                best = Some((s, i, j));
            }
            let ordered = (space.leq_idx(u, x) && space.leq_idx(y, v))
                || (space.leq_idx(x, u) && space.leq_idx(v, y));
            if ordered {
                comparable = Some(comparable.map_or(s, |c| c.min(s)));
            }
        }
    }
    let pair = |k: usize| {
        [
            space.label(p[k].0).to_string(),
            space.label(p[k].1).to_string(),
        ]
    };
    SeparationReport {
        vacuous: best.is_none(),
        minimum: best.map(|b| b.0),
        achieved_by: best.map(|(_, i, j)| [pair(i), pair(j)]),
        bound_holds: best.map(|b| b.0 >= 0.25),
        comparable_minimum: comparable,
    }
}

// ---------------------------------------------------------------------------
// Random instances
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomInstanceSpec {
    /// Element count is drawn uniformly from `min_elements..=max_elements`.
    pub min_elements: usize,
    pub max_elements: usize,
    /// Off-diagonal distances are drawn uniformly from these values, then
    /// repaired into a metric by shortest paths.
    pub distance_values: Vec<f64>,
    /// Probability of each edge of the random DAG whose closure is the order.
    pub order_density: f64,
    pub seed: u64,
}

pub const MAX_ELEMENTS: usize = 8;

/// Multiples of `step` up to `max`.
pub fn distance_grid(step: f64, max: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step.is_finite()) || !(max >= step && max.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "distance grid needs 0 < step <= max, got step {step}, max {max}"
        )));
    }
    let count = (max / step + 1e-9).floor() as usize;
    if count > 100_000 {
        return Err(Error::InvalidParameter(format!(
            "distance grid would have {count} values"
        )));
    }
    Ok((1..=count).map(|k| k as f64 * step).collect())
}

impl RandomInstanceSpec {
    /// Instances of exactly `n` elements, distances in `{0.25, 0.5, ..., 4}`,
    /// order density 0.5.
    pub fn new(n: usize, seed: u64) -> Self {
        Self {
            min_elements: n,
            max_elements: n,
            distance_values: distance_grid(0.25, 4.0).expect("valid default grid"),
            order_density: 0.5,
            seed,
        }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self {
            seed,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.min_elements == 0
            || self.min_elements > self.max_elements
            || self.max_elements > MAX_ELEMENTS
        {
            return Err(Error::InvalidParameter(format!(
                "element count range {}..={} must lie in 1..={MAX_ELEMENTS}",
                self.min_elements, self.max_elements
            )));
        }
        if !(0.0..=1.0).contains(&self.order_density) {
            return Err(Error::InvalidParameter(format!(
                "order density {} is outside [0, 1]",
                self.order_density
            )));
        }
        if self.distance_values.is_empty()
            || self
                .distance_values
                .iter()
                .any(|d| !(d.is_finite() && *d >= 0.0))
        {
            return Err(Error::InvalidParameter(
                "distance values must be a nonempty list of finite non-negative numbers".into(),
            ));
        }
        Ok(())
    }
}

const GENERATION_ATTEMPTS: usize = 64;

/// Deterministic in `spec`. The space always passes both validators; the
/// map is a uniform random table and need not be mixed monotone.
pub fn generate_instance(spec: &RandomInstanceSpec) -> Result<(FiniteSpace, TableMap)> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = rng.gen_range(spec.min_elements..=spec.max_elements);

    let distance = (0..GENERATION_ATTEMPTS)
        .find_map(|_| random_metric(&mut rng, n, &spec.distance_values))
        .ok_or_else(|| {
            Error::GenerationFailed(format!(
                "no valid metric after {GENERATION_ATTEMPTS} attempts with values {:?}",
                spec.distance_values
            ))
        })?;

    // random DAG over a random linear extension, then reflexive-transitive closure
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng);
    let mut order = vec![vec![false; n]; n];
    for i in 0..n {
        order[i][i] = true;
        for j in (i + 1)..n {
            if rng.gen_bool(spec.order_density) {
                order[perm[i]][perm[j]] = true;
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            if order[i][k] {
                for j in 0..n {
                    if order[k][j] {
                        order[i][j] = true;
                    }
                }
            }
        }
    }

    let labels = (0..n).map(|i| i.to_string()).collect();
    let space = FiniteSpace::from_matrices(labels, distance, order)?;
    let map = TableMap::from_fn(n, |_, _| rng.gen_range(0..n));
    Ok((space, map))
}

/// Draws a symmetric matrix and closes it under shortest paths. Returns
/// `None` when the repair collapses two distinct elements.
fn random_metric(rng: &mut ChaCha8Rng, n: usize, values: &[f64]) -> Option<Vec<Vec<f64>>> {
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let v = values[rng.gen_range(0..values.len())];
            d[i][j] = v;
            d[j][i] = v;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    let collapsed = (0..n).any(|i| (0..n).any(|j| i != j && d[i][j] <= 0.0));
    (!collapsed).then_some(d)
}

// ---------------------------------------------------------------------------
// Stress runner
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailedConclusion {
    NoCoupledFixedPoint,
    IterationDidNotConverge,
    LimitNotCoupledFixedPoint,
    MonotoneChainBroken,
    SeparationBelowQuarter,
}

/// One line of the failure archive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchiveEntry {
    pub seed: u64,
    pub spec: RandomInstanceSpec,
    pub space: FiniteSpaceDoc,
    pub map: Vec<[String; 3]>,
    pub failed_conclusion: FailedConclusion,
    pub details: String,
}

impl ArchiveEntry {
    /// The archived instance as a loadable instance document.
    pub fn instance(&self) -> InstanceFile {
        InstanceFile {
            space: crate::instance::SpaceDoc::Finite(self.space.clone()),
            map: crate::instance::MapDoc::Table(self.map.clone()),
            start: None,
            solver: None,
        }
    }
}

/// Per-instance tallies; summed by [`StressSummary::absorb`].
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StressSummary {
    pub instances: usize,
    pub generation_failures: usize,
    pub mixed_monotone: usize,
    pub new_condition: usize,
    pub valid_start: usize,
    pub hypothesis_satisfying: usize,
    pub cfp_nonempty: usize,
    pub traces: usize,
    pub traces_converged: usize,
    pub limits_in_cfp_set: usize,
    pub monotone_steps: usize,
    pub monotone_step_failures: usize,
    pub beta_values: usize,
    pub beta_out_of_range: usize,
    pub beta_nonincreasing_traces: usize,
    pub separation_checked: usize,
    pub separation_held: usize,
    pub remark_premise_quadruples: usize,
    pub remark_violations: usize,
    pub conclusion_failures: usize,
}

impl StressSummary {
    pub fn absorb(&mut self, o: &InstanceOutcome) {
        self.instances += 1;
        self.mixed_monotone += o.mixed_monotone as usize;
        self.new_condition += o.new_condition as usize;
        self.valid_start += (o.valid_starts > 0) as usize;
        self.hypothesis_satisfying += o.hypothesis as usize;
        self.remark_premise_quadruples += o.remark_premise_quadruples;
        self.remark_violations += o.remark_violations;
        if o.hypothesis {
            self.cfp_nonempty += (o.cfp_count > 0) as usize;
            self.traces += o.traces;
            self.traces_converged += o.traces_converged;
            self.limits_in_cfp_set += o.limits_in_cfp_set;
            self.monotone_steps += o.monotone_steps;
            self.monotone_step_failures += o.monotone_step_failures;
            self.beta_values += o.beta_values;
            self.beta_out_of_range += o.beta_out_of_range;
            self.beta_nonincreasing_traces += o.beta_nonincreasing_traces;
            if o.cfp_count >= 2 {
                self.separation_checked += 1;
                self.separation_held += o
                    .separation
                    .as_ref()
                    .and_then(|s| s.bound_holds)
                    .unwrap_or(false) as usize;
            }
        }
        self.conclusion_failures += o.failures.len();
    }
}

/// Everything learnt from one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceOutcome {
    pub mixed_monotone: bool,
    pub new_condition: bool,
    pub valid_starts: usize,
    pub hypothesis: bool,
    pub cfp_count: usize,
    pub traces: usize,
    pub traces_converged: usize,
    pub limits_in_cfp_set: usize,
    pub monotone_steps: usize,
    pub monotone_step_failures: usize,
    pub beta_values: usize,
    pub beta_out_of_range: usize,
    pub beta_nonincreasing_traces: usize,
    pub separation: Option<SeparationReport>,
    pub remark_premise_quadruples: usize,
    pub remark_violations: usize,
    pub failures: Vec<(FailedConclusion, String)>,
}

/// Checks hypotheses and, when they hold, the conclusions. Iteration runs
/// from every start pair that satisfies the start condition.
pub fn evaluate_instance(space: &FiniteSpace, map: &TableMap) -> Result<InstanceOutcome> {
    let domain = Domain::finite(space);
    let mixed_monotone = is_mixed_monotone(space, map, &domain)?.holds;
    let new_condition = check_new_condition(space, map, &domain)?.holds;
    let remark = check_remark_ratio(space, map, &domain)?;
    let n = space.len();
    let mut starts = Vec::new();
    for x0 in 0..n {
        for y0 in 0..n {
            if check_start(space, map, &x0, &y0)?.holds {
                starts.push((x0, y0));
            }
        }
    }
    let hypothesis = mixed_monotone && new_condition && !starts.is_empty();
    let cfps = enumerate_cfp(space, map);

    let mut o = InstanceOutcome {
        mixed_monotone,
        new_condition,
        valid_starts: starts.len(),
        hypothesis,
        cfp_count: cfps.len(),
        traces: 0,
        traces_converged: 0,
        limits_in_cfp_set: 0,
        monotone_steps: 0,
        monotone_step_failures: 0,
        beta_values: 0,
        beta_out_of_range: 0,
        beta_nonincreasing_traces: 0,
        separation: None,
        remark_premise_quadruples: remark.premise_quadruples.unwrap_or(0),
        remark_violations: usize::from(!remark.holds),
        failures: Vec::new(),
    };
    if !hypothesis {
        return Ok(o);
    }

    if cfps.is_empty() {
        o.failures.push((
            FailedConclusion::NoCoupledFixedPoint,
            "no pair satisfies F(x,y)=x, F(y,x)=y".into(),
        ));
    }
    let opts = SolverOptions {
        max_iter: n * n + 1,
        ..SolverOptions::default()
    };
    for (x0, y0) in starts {
        let trace = iterate(space, map, &x0, &y0, &opts)?;
        let from = format!("start ({}, {})", space.label(x0), space.label(y0));
        o.traces += 1;
        o.monotone_steps += trace.monotone_ok.len();
        let broken = trace.monotone_ok.iter().filter(|m| !**m).count();
        o.monotone_step_failures += broken;
        if broken > 0 {
            o.failures.push((
                FailedConclusion::MonotoneChainBroken,
                format!("{from}: {broken} non-monotone step(s)"),
            ));
        }
        o.beta_values += trace.betas.len();
        o.beta_out_of_range += trace
            .betas
            .iter()
            .filter(|b| !(0.0..1.0).contains(*b))
            .count();
        o.beta_nonincreasing_traces += usize::from(trace.betas.windows(2).all(|w| w[1] <= w[0]));
        match &trace.verdict {
            Verdict::Converged { limit, .. } => {
                o.traces_converged += 1;
                if cfps.contains(limit) {
                    o.limits_in_cfp_set += 1;
                } else {
                    o.failures.push((
                        FailedConclusion::LimitNotCoupledFixedPoint,
                        format!(
                            "{from}: limit ({}, {})",
                            space.label(limit.0),
                            space.label(limit.1)
                        ),
                    ));
                }
            }
            other => o.failures.push((
                FailedConclusion::IterationDidNotConverge,
                format!("{from}: {other:?}"),
            )),
        }
    }
    if cfps.len() >= 2 {
        let sep = separation_bound(space, &cfps);
        if sep.bound_holds == Some(false) {
            o.failures.push((
                FailedConclusion::SeparationBelowQuarter,
                format!(
                    "minimum {} between {:?}; comparable-pair minimum {:?}",
                    sep.minimum.unwrap_or(f64::NAN),
                    sep.achieved_by,
                    sep.comparable_minimum
                ),
            ));
        }
        o.separation = Some(sep);
    }
    Ok(o)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StressRun {
    pub spec: RandomInstanceSpec,
    pub count: usize,
    pub summary: StressSummary,
    pub failures: Vec<ArchiveEntry>,
}

/// Per-instance seeds drawn from a generator seeded with `seed`.
pub fn instance_seeds(seed: u64, count: usize) -> Vec<u64> {
    let mut master = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| master.next_u64()).collect()
}

type Evaluated = (u64, FiniteSpace, TableMap, InstanceOutcome);

/// Runs `count` instances in parallel; the result does not depend on
/// scheduling.
pub fn stress_theorem(spec: &RandomInstanceSpec, count: usize) -> Result<StressRun> {
    spec.validate()?;
    let seeds = instance_seeds(spec.seed, count);
    let outcomes: Vec<Result<Option<Evaluated>>> = seeds
        .par_iter()
        .map(|&seed| {
            let (space, map) = match generate_instance(&spec.with_seed(seed)) {
                Ok(inst) => inst,
                Err(Error::GenerationFailed(_)) => return Ok(None),
                Err(e) => return Err(e),
            };
            let outcome = evaluate_instance(&space, &map)?;
            Ok(Some((seed, space, map, outcome)))
        })
        .collect();

    let mut summary = StressSummary::default();
    let mut failures = Vec::new();
    for r in outcomes {
        match r? {
            None => summary.generation_failures += 1,
            Some((seed, space, map, outcome)) => {
                summary.absorb(&outcome);
                for (failed_conclusion, details) in &outcome.failures {
                    failures.push(ArchiveEntry {
                        seed,
                        spec: spec.with_seed(seed),
                        space: FiniteSpaceDoc::from_space(&space),
                        map: map.entries(&space),
                        failed_conclusion: failed_conclusion.clone(),
                        details: details.clone(),
                    });
                }
            }
        }
    }
    Ok(StressRun {
        spec: spec.clone(),
        count,
        summary,
        failures,
    })
}

/// Appends entries to a JSON-lines archive, creating it if needed.
pub fn append_archive(path: impl AsRef<Path>, entries: &[ArchiveEntry]) -> std::io::Result<()> {
    let mut file = std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)?;
    for e in entries {
        let line = serde_json::to_string(e).map_err(std::io::Error::other)?;
        writeln!(file, "{line}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{validate_metric, validate_order};

    fn two_point() -> (FiniteSpace, TableMap) {
        let s = FiniteSpace::new(
            vec!["0".into(), "1".into()],
            vec![vec![0.0, 2.0], vec![2.0, 0.0]],
            &[("0", "0"), ("0", "1"), ("1", "1")],
        )
        .unwrap();
        (s, TableMap::from_fn(2, |x, _| x))
    }

    #[test]
    fn two_point_fixed_points_and_separation() {
        let (s, f) = two_point();
        let c = enumerate_cfp(&s, &f);
        assert_eq!(c.pairs, vec![(0, 0), (0, 1), (1, 0), (1, 1)]);
        let r = separation_bound(&s, &c);
        assert_eq!(r.minimum, Some(2.0));
        assert_eq!(r.bound_holds, Some(true));
        assert!(!r.vacuous);
    }

    #[test]
    fn constant_map_single_fixed_point() {
        let (s, _) = two_point();
        let c = enumerate_cfp(&s, &TableMap::from_fn(2, |_, _| 1));
        assert_eq!(c.pairs, vec![(1, 1)]);
        let r = separation_bound(&s, &c);
        assert!(r.vacuous);
        assert_eq!(r.bound_holds, None);
    }

    #[test]
    fn generation_is_deterministic() {
        let spec = RandomInstanceSpec::new(2, 42);
        assert_eq!(
            generate_instance(&spec).unwrap(),
            generate_instance(&spec).unwrap()
        );
        let other = generate_instance(&spec.with_seed(43)).unwrap();
        let _ = other;
    }

    #[test]
    fn single_element_instance() {
        let (s, f) = generate_instance(&RandomInstanceSpec::new(1, 7)).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(f.get(0, 0), 0);
    }

    #[test]
    fn generated_instances_validate() {
        let spec = RandomInstanceSpec {
            min_elements: 1,
            max_elements: 5,
            ..RandomInstanceSpec::new(5, 0)
        };
        for seed in instance_seeds(11, 1000) {
            let (s, _) = generate_instance(&spec.with_seed(seed)).unwrap();
            assert!(validate_metric(&s).ok, "seed {seed}");
            assert!(validate_order(&s).ok, "seed {seed}");
        }
    }

    #[test]
    fn zero_only_distances_exhaust_the_budget() {
        let spec = RandomInstanceSpec {
            distance_values: vec![0.0],
            ..RandomInstanceSpec::new(3, 1)
        };
        assert!(matches!(
            generate_instance(&spec),
            Err(Error::GenerationFailed(_))
        ));
    }

    #[test]
    fn invalid_specs_rejected() {
        assert!(RandomInstanceSpec::new(0, 1).validate().is_err());
        assert!(RandomInstanceSpec::new(9, 1).validate().is_err());
        let mut s = RandomInstanceSpec::new(3, 1);
        s.order_density = 1.5;
        assert!(s.validate().is_err());
        assert!(distance_grid(0.0, 1.0).is_err());
        assert_eq!(
            distance_grid(0.25, 1.0).unwrap(),
            vec![0.25, 0.5, 0.75, 1.0]
        );
    }

    #[test]
    fn two_point_instance_satisfies_hypotheses() {
        let (s, f) = two_point();
        let o = evaluate_instance(&s, &f).unwrap();
        assert!(o.hypothesis);
        assert!(o.failures.is_empty(), "{:?}", o.failures);
        assert_eq!(o.cfp_count, 4);
        let mut summary = StressSummary::default();
        summary.absorb(&o);
        assert_eq!(summary.hypothesis_satisfying, 1);
        assert_eq!(summary.separation_held, 1);
    }

    #[test]
    fn zero_count_run_is_empty() {
        let run = stress_theorem(&RandomInstanceSpec::new(3, 5), 0).unwrap();
        assert_eq!(run.summary, StressSummary::default());
        assert!(run.failures.is_empty());
    }

    #[test]
    fn separation_fails_for_close_incomparable_fixed_points() {
        // antichain: only x = u, y = v quadruples are comparable, so the
        // contractive condition is vacuous while (a,a) and (b,a) are 0.1 apart
        let s = FiniteSpace::new(
            vec!["a".into(), "b".into()],
            vec![vec![0.0, 0.1], vec![0.1, 0.0]],
            &[("a", "a"), ("b", "b")],
        )
        .unwrap();
        let f = TableMap::from_fn(2, |x, _| x);
        let o = evaluate_instance(&s, &f).unwrap();
        assert!(o.hypothesis);
        let sep = o.separation.as_ref().unwrap();
        assert_eq!(sep.bound_holds, Some(false));
        assert_eq!(sep.comparable_minimum, None);
        assert_eq!(o.failures.len(), 1);
        assert_eq!(o.failures[0].0, FailedConclusion::SeparationBelowQuarter);
    }

    #[test]
    fn archive_appends_lines() {
        let dir = std::env::temp_dir().join(format!("opm-archive-{}", std::process::id()));
        let _ = std::fs::remove_file(&dir);
        let (s, f) = two_point();
        let e = ArchiveEntry {
            seed: 9,
            spec: RandomInstanceSpec::new(2, 9),
            space: FiniteSpaceDoc::from_space(&s),
            map: f.entries(&s),
            failed_conclusion: FailedConclusion::SeparationBelowQuarter,
            details: "test".into(),
        };
        append_archive(&dir, std::slice::from_ref(&e)).unwrap();
        append_archive(&dir, std::slice::from_ref(&e)).unwrap();
        let text = std::fs::read_to_string(&dir).unwrap();
        assert_eq!(text.lines().count(), 2);
        let back: ArchiveEntry = serde_json::from_str(text.lines().next().unwrap()).unwrap();
        assert_eq!(back, e);
        assert!(back.instance().validate().unwrap().ok);
        std::fs::remove_file(&dir).unwrap();
    }
}
