//! Checkers for the hypotheses of the coupled fixed point theorems.
//!
//! Every checker runs over a [`Domain`]: all elements of a finite space
//! (exhaustive) or a uniform grid in a real vector space (sampled). The map
//! is evaluated once per ordered pair of domain points and cached.
//!
//! Quadruples `(x, y, u, v)` are *comparable* when `x >= u` and `y <= v`;
//! both contractive conditions quantify over exactly these.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::map::CoupledMap;
use crate::space::{FiniteSpace, OrderedMetricSpace, Point, RealVectorSpace};

/// Points over which a condition is checked.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain<E> {
    pub elems: Vec<E>,
    /// True when `elems` is the whole space.
    pub exhaustive: bool,
}

impl Domain<usize> {
    pub fn finite(space: &FiniteSpace) -> Self {
        Self {
            elems: (0..space.len()).collect(),
            exhaustive: true,
        }
    }
}

pub const DEFAULT_GRID_POINTS: usize = 21;

/// Uniform sampling grid for the real vector backend.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub points_per_axis: usize,
    /// Falls back to the space's domain box when absent.
    pub bounds: Option<Vec<[f64; 2]>>,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            points_per_axis: DEFAULT_GRID_POINTS,
            bounds: None,
        }
    }
}

impl Domain<Vec<f64>> {
    pub fn grid(space: &RealVectorSpace, spec: &GridSpec) -> Result<Self> {
        Ok(Self {
            elems: space.grid(spec.points_per_axis, spec.bounds.as_deref())?,
            exhaustive: false,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionName {
    MixedMonotone,
    ClassicalK,
    NewDelta,
    RemarkRatio,
}

impl std::fmt::Display for ConditionName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ConditionName::MixedMonotone => "mixed-monotone",
            ConditionName::ClassicalK => "classical",
            ConditionName::NewDelta => "new",
            ConditionName::RemarkRatio => "remark",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MonotoneArgument {
    /// `x1 <= x2` but `F(x1, y) <= F(x2, y)` fails.
    First,
    /// `y1 <= y2` but `F(x, y1) >= F(x, y2)` fails.
    Second,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// An inequality `lhs <= rhs` that fails at `quadruple = (x, y, u, v)`.
    Inequality {
        quadruple: [Point; 4],
        lhs: f64,
        rhs: f64,
    },
    Monotonicity {
        argument: MonotoneArgument,
        low: Point,
        high: Point,
        fixed: Point,
        image_low: Point,
        image_high: Point,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub condition: ConditionName,
    /// True iff `worst_violation` is absent.
    pub holds: bool,
    pub exhaustive: bool,
    pub quadruples_checked: usize,
    pub worst_violation: Option<Violation>,
    /// Classical condition only: the least `k` for which it holds on the
    /// checked quadruples. `None` when a quadruple with `x = u`, `y = v`
    /// has distinct images, which no `k` can fix.
    pub minimal_k: Option<f64>,
    /// Largest δ over the constrained quadruples (δ-based conditions only;
    /// for the remark check, only quadruples meeting its premise).
    pub max_delta: Option<f64>,
    /// Remark check only: quadruples with `d(x,u) + d(y,v) < 1/4`.
    pub premise_quadruples: Option<usize>,
}

impl ConditionReport {
    fn new(condition: ConditionName, exhaustive: bool) -> Self {
        Self {
            condition,
            holds: true,
            exhaustive,
            quadruples_checked: 0,
            worst_violation: None,
            minimal_k: None,
            max_delta: None,
            premise_quadruples: None,
        }
    }

    fn finish(mut self, violation: Option<Violation>) -> Self {
        self.holds = violation.is_none();
        self.worst_violation = violation;
        self
    }
}

/// Numerator and denominator of δ(x, y, u, v).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaParts {
    pub numerator: f64,
    pub denominator: f64,
}

impl DeltaParts {
    pub fn value(self) -> f64 {
        self.numerator / self.denominator
    }
}

/// Images of the map over all ordered pairs of domain points.
struct Images<'a, S: OrderedMetricSpace> {
    space: &'a S,
    domain: &'a [S::Elem],
    images: Vec<S::Elem>,
    leq: Vec<bool>,
}

impl<'a, S: OrderedMetricSpace> Images<'a, S> {
    fn build<F: CoupledMap<S> + ?Sized>(
        space: &'a S,
        map: &F,
        domain: &'a Domain<S::Elem>,
    ) -> Result<Self> {
        let d = &domain.elems;
        let n = d.len();
        let mut images = Vec::with_capacity(n * n);
        let mut leq = Vec::with_capacity(n * n);
        for a in d {
            for b in d {
                images.push(map.apply(a, b)?);
                leq.push(space.leq(a, b));
            }
        }
        Ok(Self {
            space,
            domain: d,
            images,
            leq,
        })
    }

    fn n(&self) -> usize {
        self.domain.len()
    }

    #[inline]
    fn img(&self, a: usize, b: usize) -> &S::Elem {
        &self.images[a * self.n() + b]
    }

    #[inline]
    fn leq(&self, a: usize, b: usize) -> bool {
        self.leq[a * self.n() + b]
    }

    #[inline]
    fn d(&self, a: &S::Elem, b: &S::Elem) -> f64 {
        self.space.dist(a, b)
    }

    fn pt(&self, i: usize) -> Point {
        self.space.point(&self.domain[i])
    }

    fn quad(&self, q: [usize; 4]) -> [Point; 4] {
        q.map(|i| self.pt(i))
    }

    fn delta(&self, [x, y, u, v]: [usize; 4]) -> DeltaParts {
        let e = self.domain;
        let numerator = self.d(&e[x], self.img(u, v))
            + self.d(&e[y], self.img(v, u))
            + self.d(&e[u], self.img(x, y))
            + self.d(&e[v], self.img(y, x));
        let denominator = 1.0
            + 2.0
                * (self.d(&e[x], self.img(x, y))
                    + self.d(&e[y], self.img(y, x))
                    + self.d(&e[u], self.img(u, v))
                    + self.d(&e[v], self.img(v, u)));
        DeltaParts {
            numerator,
            denominator,
        }
    }

    /// `d(x, u) + d(y, v)`.
    fn gap(&self, [x, y, u, v]: [usize; 4]) -> f64 {
        let e = self.domain;
        self.d(&e[x], &e[u]) + self.d(&e[y], &e[v])
    }

    /// `d(F(x, y), F(u, v))`.
    fn image_gap(&self, [x, y, u, v]: [usize; 4]) -> f64 {
        self.d(self.img(x, y), self.img(u, v))
    }

    /// Comparable quadruples in lexicographic index order.
    fn for_each_comparable(&self, mut f: impl FnMut([usize; 4])) {
        let n = self.n();
        for x in 0..n {
            for y in 0..n {
                for u in 0..n {
                    if !self.leq(u, x) {
                        continue;
                    }
                    for v in 0..n {
                        if self.leq(y, v) {
                            f([x, y, u, v]);
                        }
                    }
                }
            }
        }
    }
}

/// Comparable quadruples of a domain, in lexicographic index order.
pub fn comparable_quadruples_in<S: OrderedMetricSpace>(
    space: &S,
    domain: &Domain<S::Elem>,
) -> Vec<[usize; 4]> {
    let d = &domain.elems;
    let mut out = Vec::new();
    for x in 0..d.len() {
        for y in 0..d.len() {
            for u in 0..d.len() {
                if !space.leq(&d[u], &d[x]) {
                    continue;
                }
                for v in 0..d.len() {
                    if space.leq(&d[y], &d[v]) {
                        out.push([x, y, u, v]);
                    }
                }
            }
        }
    }
    out
}

/// δ(x, y, u, v) for arbitrary points. The denominator is at least 1.
pub fn delta<S, F>(
    space: &S,
    map: &F,
    x: &S::Elem,
    y: &S::Elem,
    u: &S::Elem,
    v: &S::Elem,
) -> Result<DeltaParts>
where
    S: OrderedMetricSpace,
    F: CoupledMap<S> + ?Sized,
{
    let fxy = map.apply(x, y)?;
    let fyx = map.apply(y, x)?;
    let fuv = map.apply(u, v)?;
    let fvu = map.apply(v, u)?;
    let numerator =
        space.dist(x, &fuv) + space.dist(y, &fvu) + space.dist(u, &fxy) + space.dist(v, &fyx);
    let denominator = 1.0
        + 2.0
            * (space.dist(x, &fxy)
                + space.dist(y, &fyx)
                + space.dist(u, &fuv)
                + space.dist(v, &fvu));
    Ok(DeltaParts {
        numerator,
        denominator,
    })
}

/// Exact on finite spaces; a grid sample on real vector spaces. The first
/// violation in scan order is reported.
pub fn is_mixed_monotone<S, F>(
    space: &S,
    map: &F,
    domain: &Domain<S::Elem>,
) -> Result<ConditionReport>
where
    S: OrderedMetricSpace,
    F: CoupledMap<S> + ?Sized,
{
    let im = Images::build(space, map, domain)?;
    let n = im.n();
    let mut report = ConditionReport::new(ConditionName::MixedMonotone, domain.exhaustive);
    let mut violation = None;

    'first: for y in 0..n {
        for lo in 0..n {
            for hi in 0..n {
                if !im.leq(lo, hi) {
                    continue;
                }
                report.quadruples_checked += 1;
                let (a, b) = (im.img(lo, y), im.img(hi, y));
                if !space.leq(a, b) {
                    violation = Some(Violation::Monotonicity {
                        argument: MonotoneArgument::First,
                        low: im.pt(lo),
                        high: im.pt(hi),
                        fixed: im.pt(y),
                        image_low: space.point(a),
                        image_high: space.point(b),
                    });
                    break 'first;
                }
            }
        }
    }
    if violation.is_none() {
        'second: for x in 0..n {
            for lo in 0..n {
                for hi in 0..n {
                    if !im.leq(lo, hi) {
                        continue;
                    }
                    report.quadruples_checked += 1;
                    let (a, b) = (im.img(x, lo), im.img(x, hi));
                    if !space.leq(b, a) {
                        violation = Some(Violation::Monotonicity {
                            argument: MonotoneArgument::Second,
                            low: im.pt(lo),
                            high: im.pt(hi),
                            fixed: im.pt(x),
                            image_low: space.point(a),
                            image_high: space.point(b),
                        });
                        break 'second;
                    }
                }
            }
        }
    }
    Ok(report.finish(violation))
}

/// `d(F(x,y), F(u,v)) <= δ(x,y,u,v) [d(x,u) + d(y,v)]` over all comparable
/// quadruples. The worst violation is the one with the largest excess
/// `lhs - rhs`, first in scan order on ties.
pub fn check_new_condition<S, F>(
    space: &S,
    map: &F,
    domain: &Domain<S::Elem>,
) -> Result<ConditionReport>
where
    S: OrderedMetricSpace,
    F: CoupledMap<S> + ?Sized,
{
    let im = Images::build(space, map, domain)?;
    let mut report = ConditionReport::new(ConditionName::NewDelta, domain.exhaustive);
    let mut worst: Option<([usize; 4], f64, f64)> = None;
    let mut max_delta: Option<f64> = None;
    im.for_each_comparable(|q| {
        report.quadruples_checked += 1;
        let parts = im.delta(q);
        let delta = parts.value();
        max_delta = Some(max_delta.map_or(delta, |m: f64| m.max(delta)));
        let lhs = im.image_gap(q);
        let gap = im.gap(q);
        // cross-multiplied so the verdict does not depend on rounding the ratio
        if lhs * parts.denominator > parts.numerator * gap {
            let rhs = delta * gap;
            if worst.is_none_or(|(_, l, r)| lhs - rhs > l - r) {
                worst = Some((q, lhs, rhs));
            }
        }
    });
    report.max_delta = max_delta;
    let violation = worst.map(|(q, lhs, rhs)| Violation::Inequality {
        quadruple: im.quad(q),
        lhs,
        rhs,
    });
    Ok(report.finish(violation))
}

/// Computes the least `k` with `d(F(x,y), F(u,v)) <= (k/2) [d(x,u) + d(y,v)]`
/// over all comparable quadruples; the condition holds iff that `k < 1`.
/// On failure the witness is the lexicographically first maximiser, with
/// `rhs` the right side at `k = 1`.
pub fn check_classical_condition<S, F>(
    space: &S,
    map: &F,
    domain: &Domain<S::Elem>,
) -> Result<ConditionReport>
where
    S: OrderedMetricSpace,
    F: CoupledMap<S> + ?Sized,
{
    let im = Images::build(space, map, domain)?;
    let mut report = ConditionReport::new(ConditionName::ClassicalK, domain.exhaustive);
    let mut best: Option<([usize; 4], f64, f64, f64)> = None;
    let mut degenerate: Option<([usize; 4], f64)> = None;
    im.for_each_comparable(|q| {
        report.quadruples_checked += 1;
        let lhs = im.image_gap(q);
        let gap = im.gap(q);
        if gap == 0.0 {
            if lhs > 0.0 && degenerate.is_none() {
                degenerate = Some((q, lhs));
            }
            return;
        }
        let k = 2.0 * lhs / gap;
        if best.is_none_or(|(_, bk, _, _)| k > bk) {
            best = Some((q, k, lhs, gap));
        }
    });

    let violation = if let Some((q, lhs)) = degenerate {
        report.minimal_k = None;
        Some(Violation::Inequality {
            quadruple: im.quad(q),
            lhs,
            rhs: 0.0,
        })
    } else {
        let k = best.map_or(0.0, |(_, k, _, _)| k);
        report.minimal_k = Some(k);
        match best {
            Some((q, k, lhs, gap)) if k >= 1.0 => Some(Violation::Inequality {
                quadruple: im.quad(q),
                lhs,
                rhs: gap / 2.0,
            }),
            _ => None,
        }
    };
    Ok(report.finish(violation))
}

/// Checks the classical inequality for a fixed `k`. A relative slack of
/// `1e-12` absorbs the rounding in `k = 2 lhs / gap` when re-checking a
/// computed minimal `k`.
pub fn check_classical_with_k<S, F>(
    space: &S,
    map: &F,
    domain: &Domain<S::Elem>,
    k: f64,
) -> Result<ConditionReport>
where
    S: OrderedMetricSpace,
    F: CoupledMap<S> + ?Sized,
{
    let im = Images::build(space, map, domain)?;
    let mut report = ConditionReport::new(ConditionName::ClassicalK, domain.exhaustive);
    report.minimal_k = Some(k);
    let mut worst: Option<([usize; 4], f64, f64)> = None;
    im.for_each_comparable(|q| {
        report.quadruples_checked += 1;
        let lhs = im.image_gap(q);
        let rhs = k / 2.0 * im.gap(q);
        if lhs > rhs * (1.0 + 1e-12) && worst.is_none_or(|(_, l, r)| lhs - rhs > l - r) {
            worst = Some((q, lhs, rhs));
        }
    });
    let violation = worst.map(|(q, lhs, rhs)| Violation::Inequality {
        quadruple: im.quad(q),
        lhs,
        rhs,
    });
    Ok(report.finish(violation))
}

/// For every comparable quadruple with `d(x,u) + d(y,v) < 1/4`, checks
/// `δ(x,y,u,v) < 1/2`. The triangle inequality forces this, so a violation
/// indicates a broken metric or a broken δ evaluation.
pub fn check_remark_ratio<S, F>(
    space: &S,
    map: &F,
    domain: &Domain<S::Elem>,
) -> Result<ConditionReport>
where
    S: OrderedMetricSpace,
    F: CoupledMap<S> + ?Sized,
{
    let im = Images::build(space, map, domain)?;
    let mut report = ConditionReport::new(ConditionName::RemarkRatio, domain.exhaustive);
    let mut premise = 0;
    let mut worst: Option<([usize; 4], f64)> = None;
    let mut max_delta: Option<f64> = None;
    im.for_each_comparable(|q| {
        report.quadruples_checked += 1;
        if im.gap(q) >= 0.25 {
            return;
        }
        premise += 1;
        let parts = im.delta(q);
        max_delta = Some(max_delta.map_or(parts.value(), |m: f64| m.max(parts.value())));
        if 2.0 * parts.numerator >= parts.denominator {
            let delta = parts.value();
            if worst.is_none_or(|(_, w)| delta > w) {
                worst = Some((q, delta));
            }
        }
    });
    report.max_delta = max_delta;
    report.premise_quadruples = Some(premise);
    let violation = worst.map(|(q, delta)| Violation::Inequality {
        quadruple: im.quad(q),
        lhs: delta,
        rhs: 0.5,
    });
    Ok(report.finish(violation))
}

/// Default tolerance for coupled fixed point tests on real vector spaces.
pub const DEFAULT_EPS_FP: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedPointCheck {
    pub is_fixed: bool,
    /// `max(d(F(x,y), x), d(F(y,x), y))`.
    pub gap: f64,
    pub eps: f64,
}

/// Tests `F(x,y) = x` and `F(y,x) = y` up to `eps` (use 0 for exact).
pub fn is_coupled_fixed_point<S, F>(
    space: &S,
    map: &F,
    x: &S::Elem,
    y: &S::Elem,
    eps: f64,
) -> Result<FixedPointCheck>
where
    S: OrderedMetricSpace,
    F: CoupledMap<S> + ?Sized,
{
    let gx = space.dist(&map.apply(x, y)?, x);
    let gy = space.dist(&map.apply(y, x)?, y);
    let gap = gx.max(gy);
    Ok(FixedPointCheck {
        is_fixed: gap <= eps,
        gap,
        eps,
    })
}
