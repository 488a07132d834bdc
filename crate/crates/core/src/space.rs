//! Partially ordered metric spaces.
//!
//! Two backends are provided: [`FiniteSpace`], which stores an explicit
//! distance matrix and order relation over labelled elements, and
//! [`RealVectorSpace`], which is `R^n` with one of the standard metrics and
//! the componentwise order. Both implement [`OrderedMetricSpace`], which is
//! what the condition checkers and the solver are generic over.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of either backend, as it appears in reports and instance files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Point {
    Label(String),
    Vector(Vec<f64>),
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Label(l) => f.write_str(l),
            Point::Vector(v) => {
                if v.len() == 1 {
                    return write!(f, "{}", v[0]);
                }
                f.write_str("(")?;
                for (i, c) in v.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{c}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// A set with a metric and a partial order.
pub trait OrderedMetricSpace {
    type Elem: Clone + PartialEq + fmt::Debug + Send + Sync;

    fn leq(&self, a: &Self::Elem, b: &Self::Elem) -> bool;

    fn dist(&self, a: &Self::Elem, b: &Self::Elem) -> f64;

    /// Converts an element to its report form.
    fn point(&self, a: &Self::Elem) -> Point;
}

// ---------------------------------------------------------------------------
// Finite backend
// ---------------------------------------------------------------------------

/// A finite set of labelled elements with a distance matrix and an explicit
/// order relation. Construction only checks shape; the metric and order
/// axioms are checked by [`validate_metric`] and [`validate_order`].
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteSpace {
    labels: Vec<String>,
    distance: Vec<Vec<f64>>,
    // order[a * n + b] <=> a <= b
    order: Vec<bool>,
    index: HashMap<String, usize>,
}

impl FiniteSpace {
    pub fn new<S: AsRef<str>>(
        elements: Vec<String>,
        distance: Vec<Vec<f64>>,
        order_pairs: &[(S, S)],
    ) -> Result<Self> {
        let n = elements.len();
        if n == 0 {
            return Err(Error::EmptySpace);
        }
        let cols = distance.iter().map(Vec::len).find(|&c| c != n);
        if distance.len() != n || cols.is_some() {
            return Err(Error::DimensionMismatch {
                rows: distance.len(),
                cols: cols.unwrap_or(n),
                elements: n,
            });
        }
        let mut index = HashMap::with_capacity(n);
        for (i, l) in elements.iter().enumerate() {
            index.entry(l.clone()).or_insert(i);
        }
        let mut order = vec![false; n * n];
        for (a, b) in order_pairs {
            let (a, b) = (a.as_ref(), b.as_ref());
            let ia = *index
                .get(a)
                .ok_or_else(|| Error::UnknownLabel(a.to_string()))?;
            let ib = *index
                .get(b)
                .ok_or_else(|| Error::UnknownLabel(b.to_string()))?;
            order[ia * n + ib] = true;
        }
        Ok(Self {
            labels: elements,
            distance,
            order,
            index,
        })
    }

    /// Builds a space from an order matrix given row-major as `order[a][b] <=> a <= b`.
    pub fn from_matrices(
        elements: Vec<String>,
        distance: Vec<Vec<f64>>,
        order: Vec<Vec<bool>>,
    ) -> Result<Self> {
        let n = elements.len();
        if order.len() != n || order.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidSpace(
                "order matrix does not match element count".into(),
            ));
        }
        let mut pairs = Vec::new();
        for (i, row) in order.iter().enumerate() {
            for (j, &le) in row.iter().enumerate() {
                if le {
                    pairs.push((elements[i].clone(), elements[j].clone()));
                }
            }
        }
        Self::new(elements, distance, &pairs)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.index
            .get(label)
            .copied()
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn distance_matrix(&self) -> &[Vec<f64>] {
        &self.distance
    }

    #[inline]
    pub fn dist_idx(&self, a: usize, b: usize) -> f64 {
        self.distance[a][b]
    }

    #[inline]
    pub fn leq_idx(&self, a: usize, b: usize) -> bool {
        self.order[a * self.labels.len() + b]
    }

    /// The stored order relation as label pairs, row-major.
    pub fn order_pairs(&self) -> Vec<(String, String)> {
        let n = self.len();
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if self.leq_idx(a, b) {
                    out.push((self.labels[a].clone(), self.labels[b].clone()));
                }
            }
        }
        out
    }

    /// Resolves a report-form point to an element index.
    pub fn resolve(&self, p: &Point) -> Result<usize> {
        match p {
            Point::Label(l) => self.index_of(l),
            Point::Vector(v) => Err(Error::BackendMismatch(format!(
                "vector {v:?} given to a finite space"
            ))),
        }
    }

    /// Relabels and permutes the space: element `i` of the result is element
    /// `perm[i]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let n = self.len();
        assert_eq!(perm.len(), n);
        let labels: Vec<String> = perm.iter().map(|&p| self.labels[p].clone()).collect();
        let distance = perm
            .iter()
            .map(|&a| perm.iter().map(|&b| self.distance[a][b]).collect())
            .collect();
        let order = perm
            .iter()
            .map(|&a| perm.iter().map(|&b| self.leq_idx(a, b)).collect())
            .collect();
        Self::from_matrices(labels, distance, order).expect("permutation preserves shape")
    }
}

impl OrderedMetricSpace for FiniteSpace {
    type Elem = usize;

    fn leq(&self, a: &usize, b: &usize) -> bool {
        self.leq_idx(*a, *b)
    }

    fn dist(&self, a: &usize, b: &usize) -> f64 {
        self.dist_idx(*a, *b)
    }

    fn point(&self, a: &usize) -> Point {
        Point::Label(self.labels[*a].clone())
    }
}

/// One violated axiom together with the labels that witness it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "axiom", rename_all = "snake_case")]
pub enum AxiomViolation {
    DuplicateLabel {
        label: String,
    },
    NonFiniteDistance {
        a: String,
        b: String,
    },
    NonzeroDiagonal {
        a: String,
        value: f64,
    },
    Symmetry {
        a: String,
        b: String,
        ab: f64,
        ba: f64,
    },
    Positivity {
        a: String,
        b: String,
        value: f64,
    },
    Triangle {
        from: String,
        via: String,
        to: String,
        direct: f64,
        detour: f64,
    },
    Reflexivity {
        a: String,
    },
    Antisymmetry {
        a: String,
        b: String,
    },
    Transitivity {
        a: String,
        b: String,
        c: String,
    },
    MissingMapEntry {
        x: String,
        y: String,
    },
    DuplicateMapEntry {
        x: String,
        y: String,
    },
    UnknownMapLabel {
        label: String,
    },
    MapOutOfDomain {
        x: String,
        y: String,
        detail: String,
    },
}

impl fmt::Display for AxiomViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use AxiomViolation::*;
        match self {
            DuplicateLabel { label } => write!(f, "duplicate element label `{label}`"),
            NonFiniteDistance { a, b } => write!(f, "d({a},{b}) is not a finite number"),
            NonzeroDiagonal { a, value } => write!(f, "d({a},{a}) = {value}, expected 0"),
            Symmetry { a, b, ab, ba } => write!(f, "d({a},{b}) = {ab} but d({b},{a}) = {ba}"),
            Positivity { a, b, value } => {
                write!(f, "d({a},{b}) = {value} for distinct elements, expected > 0")
            }
            Triangle { from, via, to, direct, detour } => write!(
                f,
                "triangle inequality fails: d({from},{to}) = {direct} > d({from},{via}) + d({via},{to}) = {detour}"
            ),
            Reflexivity { a } => write!(f, "order is not reflexive at {a}: ({a},{a}) missing"),
            Antisymmetry { a, b } => {
                write!(f, "order is not antisymmetric: {a} <= {b} and {b} <= {a}")
            }
            Transitivity { a, b, c } => write!(
                f,
                "order is not transitive: {a} <= {b} and {b} <= {c} but not {a} <= {c}"
            ),
            MissingMapEntry { x, y } => write!(f, "map table has no entry for F({x},{y})"),
            DuplicateMapEntry { x, y } => write!(f, "map table defines F({x},{y}) more than once"),
            UnknownMapLabel { label } => write!(f, "map table mentions unknown label `{label}`"),
            MapOutOfDomain { x, y, detail } => write!(f, "F({x},{y}) cannot be evaluated on the domain: {detail}"),
        }
    }
}

/// Outcome of a validator: `ok` iff `violations` is empty.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<AxiomViolation>,
}

impl ValidationReport {
    pub fn from_violations(violations: Vec<AxiomViolation>) -> Self {
        Self {
            ok: violations.is_empty(),
            violations,
        }
    }

    pub fn merge(mut self, other: ValidationReport) -> Self {
        self.violations.extend(other.violations);
        self.ok = self.violations.is_empty();
        self
    }
}

/// Checks the metric axioms exhaustively: zero diagonal, symmetry,
/// positivity off the diagonal, and the triangle inequality over all triples.
/// Duplicate labels are reported here as well since they break identity.
pub fn validate_metric(space: &FiniteSpace) -> ValidationReport {
    let n = space.len();
    let l = |i: usize| space.label(i).to_string();
    let d = space.distance_matrix();
    let mut v = Vec::new();

    let mut seen = std::collections::HashSet::new();
    for label in space.labels() {
        if !seen.insert(label.as_str()) {
            v.push(AxiomViolation::DuplicateLabel {
                label: label.clone(),
            });
        }
    }

    let mut finite = true;
    for i in 0..n {
        for j in 0..n {
            if !d[i][j].is_finite() {
                v.push(AxiomViolation::NonFiniteDistance { a: l(i), b: l(j) });
                finite = false;
            }
        }
    }
    if !finite {
        return ValidationReport::from_violations(v);
    }

    for i in 0..n {
        if d[i][i] != 0.0 {
            v.push(AxiomViolation::NonzeroDiagonal {
                a: l(i),
                value: d[i][i],
            });
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if d[i][j] != d[j][i] {
                v.push(AxiomViolation::Symmetry {
                    a: l(i),
                    b: l(j),
                    ab: d[i][j],
                    ba: d[j][i],
                });
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            if i != j && d[i][j] <= 0.0 {
                v.push(AxiomViolation::Positivity {
                    a: l(i),
                    b: l(j),
                    value: d[i][j],
                });
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let detour = d[i][j] + d[j][k];
                if d[i][k] > detour {
                    v.push(AxiomViolation::Triangle {
                        from: l(i),
                        via: l(j),
                        to: l(k),
                        direct: d[i][k],
                        detour,
                    });
                }
            }
        }
    }
    ValidationReport::from_violations(v)
}

/// Checks that the stored relation is a partial order. No closure is taken:
/// a relation that is not transitive is reported, never repaired.
pub fn validate_order(space: &FiniteSpace) -> ValidationReport {
    let n = space.len();
    let l = |i: usize| space.label(i).to_string();
    let mut v = Vec::new();
    for a in 0..n {
        if !space.leq_idx(a, a) {
            v.push(AxiomViolation::Reflexivity { a: l(a) });
        }
    }
    for a in 0..n {
        for b in (a + 1)..n {
            if space.leq_idx(a, b) && space.leq_idx(b, a) {
                v.push(AxiomViolation::Antisymmetry { a: l(a), b: l(b) });
            }
        }
    }
    for a in 0..n {
        for b in 0..n {
            if a == b || !space.leq_idx(a, b) {
                continue;
            }
            for c in 0..n {
                if c != b && space.leq_idx(b, c) && !space.leq_idx(a, c) {
                    v.push(AxiomViolation::Transitivity {
                        a: l(a),
                        b: l(b),
                        c: l(c),
                    });
                }
            }
        }
    }
    ValidationReport::from_violations(v)
}

/// All `(x, y, u, v)` with `x >= u` and `y <= v`, in lexicographic order of
/// element indices.
pub fn comparable_quadruples(space: &FiniteSpace) -> Vec<[usize; 4]> {
    let n = space.len();
    let mut out = Vec::new();
    for x in 0..n {
        for y in 0..n {
            for u in 0..n {
                if !space.leq_idx(u, x) {
                    continue;
                }
                for v in 0..n {
                    if space.leq_idx(y, v) {
                        out.push([x, y, u, v]);
                    }
                }
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Real vector backend
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    #[serde(alias = "L1")]
    L1,
    #[serde(alias = "L2")]
    L2,
    #[serde(alias = "LInf")]
    LInf,
}

impl Metric {
    pub fn distance(self, a: &[f64], b: &[f64]) -> f64 {
        let diffs = a.iter().zip(b).map(|(x, y)| (x - y).abs());
        match self {
            Metric::L1 => diffs.sum(),
            Metric::L2 => diffs.map(|t| t * t).sum::<f64>().sqrt(),
            Metric::LInf => diffs.fold(0.0, f64::max),
        }
    }
}

/// `R^n` with a standard metric and the componentwise order, optionally
/// restricted to a closed box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealVectorSpace {
    dimension: usize,
    metric: Metric,
    domain_box: Option<Vec<[f64; 2]>>,
}

impl RealVectorSpace {
    pub fn new(
        dimension: usize,
        metric: Metric,
        domain_box: Option<Vec<[f64; 2]>>,
    ) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidSpace("dimension must be at least 1".into()));
        }
        if let Some(b) = &domain_box {
            if b.len() != dimension {
                return Err(Error::InvalidSpace(format!(
                    "domain box has {} intervals for dimension {dimension}",
                    b.len()
                )));
            }
            for (i, [lo, hi]) in b.iter().enumerate() {
                if !(lo.is_finite() && hi.is_finite()) || lo > hi {
                    return Err(Error::InvalidSpace(format!(
                        "domain box interval {} is [{lo}, {hi}]",
                        i + 1
                    )));
                }
            }
        }
        Ok(Self {
            dimension,
            metric,
            domain_box,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn domain_box(&self) -> Option<&[[f64; 2]]> {
        self.domain_box.as_deref()
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.len() == self.dimension
            && match &self.domain_box {
                None => p.iter().all(|c| c.is_finite()),
                Some(b) => p.iter().zip(b).all(|(c, [lo, hi])| lo <= c && c <= hi),
            }
    }

    /// Checks length and box membership.
    pub fn check_point(&self, p: &[f64]) -> Result<()> {
        if p.len() != self.dimension {
            return Err(Error::VectorLength {
                expected: self.dimension,
                got: p.len(),
            });
        }
        if !self.contains(p) {
            return Err(Error::OutOfDomain { point: p.to_vec() });
        }
        Ok(())
    }

    pub fn resolve(&self, p: &Point) -> Result<Vec<f64>> {
        match p {
            Point::Vector(v) => {
                self.check_point(v)?;
                Ok(v.clone())
            }
            Point::Label(l) => Err(Error::BackendMismatch(format!(
                "label `{l}` given to a real vector space"
            ))),
        }
    }

    /// Uniform grid with `points_per_axis` points on every axis of the box
    /// (the domain box unless `bounds` overrides it), in lexicographic order.
    pub fn grid(
        &self,
        points_per_axis: usize,
        bounds: Option<&[[f64; 2]]>,
    ) -> Result<Vec<Vec<f64>>> {
        let bounds = bounds.or(self.domain_box.as_deref()).ok_or_else(|| {
            Error::InvalidGrid("no domain box declared and no grid bounds given".into())
        })?;
        if bounds.len() != self.dimension {
            return Err(Error::InvalidGrid(format!(
                "{} bounds for dimension {}",
                bounds.len(),
                self.dimension
            )));
        }
        if points_per_axis == 0 {
            return Err(Error::InvalidGrid(
                "points per axis must be positive".into(),
            ));
        }
        let total = (points_per_axis as f64).powi(self.dimension as i32);
        if total > 1e6 {
            return Err(Error::InvalidGrid(format!(
                "grid would have {total} points"
            )));
        }
        let axes: Vec<Vec<f64>> = bounds
            .iter()
            .map(|&[lo, hi]| {
                if points_per_axis == 1 {
                    vec![lo]
                } else {
                    let step = (hi - lo) / (points_per_axis - 1) as f64;
                    (0..points_per_axis)
                        .map(|i| {
                            if i + 1 == points_per_axis {
                                hi
                            } else {
                                lo + step * i as f64
                            }
                        })
                        .collect()
                }
            })
            .collect();
        let mut out: Vec<Vec<f64>> = vec![Vec::new()];
        for axis in &axes {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    axis.iter().map(move |&c| {
                        let mut p = prefix.clone();
                        p.push(c);
                        p
                    })
                })
                .collect();
        }
        Ok(out)
    }
}

impl OrderedMetricSpace for RealVectorSpace {
    type Elem = Vec<f64>;

    fn leq(&self, a: &Vec<f64>, b: &Vec<f64>) -> bool {
        a.iter().zip(b).all(|(x, y)| x <= y)
    }

    fn dist(&self, a: &Vec<f64>, b: &Vec<f64>) -> f64 {
        self.metric.distance(a, b)
    }

    fn point(&self, a: &Vec<f64>) -> Point {
        Point::Vector(a.clone())
    }
}

// ---------------------------------------------------------------------------
// Backend-erased access
// ---------------------------------------------------------------------------

/// Either backend, for callers that work with [`Point`]s.
#[derive(Debug, Clone, PartialEq)]
pub enum Space {
    Finite(FiniteSpace),
    RealVector(RealVectorSpace),
}

impl Space {
    pub fn leq(&self, a: &Point, b: &Point) -> Result<bool> {
        match self {
            Space::Finite(s) => Ok(s.leq_idx(s.resolve(a)?, s.resolve(b)?)),
            Space::RealVector(s) => Ok(s.leq(&s.resolve(a)?, &s.resolve(b)?)),
        }
    }

    pub fn dist(&self, a: &Point, b: &Point) -> Result<f64> {
        match self {
            Space::Finite(s) => Ok(s.dist_idx(s.resolve(a)?, s.resolve(b)?)),
            Space::RealVector(s) => Ok(s.dist(&s.resolve(a)?, &s.resolve(b)?)),
        }
    }
}
