//! Coupled maps `F: X × X → X`.

use crate::error::{Error, Result};
use crate::expr::{self, Expr};
use crate::space::{
    AxiomViolation, FiniteSpace, OrderedMetricSpace, RealVectorSpace, ValidationReport,
};

pub trait CoupledMap<S: OrderedMetricSpace + ?Sized> {
    fn apply(&self, x: &S::Elem, y: &S::Elem) -> Result<S::Elem>;
}

/// A total lookup table over a finite space, indexed by element position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableMap {
    n: usize,
    table: Vec<usize>,
}

impl TableMap {
    /// Builds a table from a function on indices.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> usize) -> Self {
        let mut table = Vec::with_capacity(n * n);
        for x in 0..n {
            for y in 0..n {
                let out = f(x, y);
                assert!(out < n, "F({x},{y}) = {out} is not an element");
                table.push(out);
            }
        }
        Self { n, table }
    }

    /// Builds a table from `(x, y, F(x,y))` label triples, which must cover
    /// every ordered pair exactly once.
    pub fn from_entries<S: AsRef<str>>(space: &FiniteSpace, entries: &[[S; 3]]) -> Result<Self> {
        let report = validate_table(space, entries);
        if let Some(v) = report.violations.first() {
            return Err(Error::IncompleteMap(v.to_string()));
        }
        let n = space.len();
        let mut table = vec![0; n * n];
        for [x, y, out] in entries {
            let x = space.index_of(x.as_ref())?;
            let y = space.index_of(y.as_ref())?;
            table[x * n + y] = space.index_of(out.as_ref())?;
        }
        Ok(Self { n, table })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> usize {
        self.table[x * self.n + y]
    }

    /// Label triples in row-major order.
    pub fn entries(&self, space: &FiniteSpace) -> Vec<[String; 3]> {
        let mut out = Vec::with_capacity(self.table.len());
        for x in 0..self.n {
            for y in 0..self.n {
                out.push([
                    space.label(x).to_string(),
                    space.label(y).to_string(),
                    space.label(self.get(x, y)).to_string(),
                ]);
            }
        }
        out
    }

    /// The same map on a permuted copy of the space (see [`FiniteSpace::permuted`]).
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut inverse = vec![0; perm.len()];
        for (i, &p) in perm.iter().enumerate() {
            inverse[p] = i;
        }
        Self::from_fn(self.n, |x, y| inverse[self.get(perm[x], perm[y])])
    }
}

impl CoupledMap<FiniteSpace> for TableMap {
    fn apply(&self, x: &usize, y: &usize) -> Result<usize> {
        Ok(self.get(*x, *y))
    }
}

/// Checks that a table covers every ordered pair exactly once with known labels.
pub fn validate_table<S: AsRef<str>>(space: &FiniteSpace, entries: &[[S; 3]]) -> ValidationReport {
    let n = space.len();
    let mut seen = vec![0usize; n * n];
    let mut v = Vec::new();
    let mut unknown = std::collections::BTreeSet::new();
    for [x, y, out] in entries {
        let ids: Vec<Option<usize>> = [x, y, out]
            .iter()
            .map(|l| space.index_of(l.as_ref()).ok())
            .collect();
        for (l, id) in [x, y, out].iter().zip(&ids) {
            if id.is_none() {
                unknown.insert(l.as_ref().to_string());
            }
        }
        if let (Some(a), Some(b)) = (ids[0], ids[1]) {
            seen[a * n + b] += 1;
        }
    }
    v.extend(
        unknown
            .into_iter()
            .map(|label| AxiomViolation::UnknownMapLabel { label }),
    );
    for a in 0..n {
        for b in 0..n {
            let (x, y) = (space.label(a).to_string(), space.label(b).to_string());
            match seen[a * n + b] {
                0 => v.push(AxiomViolation::MissingMapEntry { x, y }),
                1 => {}
                _ => v.push(AxiomViolation::DuplicateMapEntry { x, y }),
            }
        }
    }
    ValidationReport::from_violations(v)
}

/// A map on `R^n` given by one expression per output coordinate. Outputs
/// that leave the space's domain box are errors.
#[derive(Debug, Clone, PartialEq)]
pub struct ExprMap {
    space: RealVectorSpace,
    components: Vec<Expr>,
}

impl ExprMap {
    pub fn new(space: &RealVectorSpace, components: Vec<Expr>) -> Result<Self> {
        if components.len() != space.dimension() {
            return Err(Error::InvalidSpace(format!(
                "{} map components for dimension {}",
                components.len(),
                space.dimension()
            )));
        }
        Ok(Self {
            space: space.clone(),
            components,
        })
    }

    pub fn parse<S: AsRef<str>>(space: &RealVectorSpace, components: &[S]) -> Result<Self> {
        let parsed = components
            .iter()
            .map(|c| expr::parse(c.as_ref(), space.dimension()))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(space, parsed)
    }

    pub fn components(&self) -> &[Expr] {
        &self.components
    }
}

impl CoupledMap<RealVectorSpace> for ExprMap {
    fn apply(&self, x: &Vec<f64>, y: &Vec<f64>) -> Result<Vec<f64>> {
        let out = self
            .components
            .iter()
            .map(|e| e.evaluate(x, y))
            .collect::<Result<Vec<_>, _>>()?;
        self.space.check_point(&out)?;
        Ok(out)
    }
}
