//! The JSON instance document: a space, a coupled map on it, and optional
//! start pair and solver settings.
//!
//! ```json
//! {
//!   "space": { "finite": { "elements": ["0", "1"],
//!                          "distance": [[0, 2], [2, 0]],
//!                          "order_pairs": [["0", "0"], ["0", "1"], ["1", "1"]] } },
//!   "map": { "table": [["0", "0", "0"], ["0", "1", "0"], ["1", "0", "1"], ["1", "1", "1"]] },
//!   "start": { "x0": "0", "y0": "1" }
//! }
//! ```
//!
//! A real vector instance uses `{"real_vector": {"dimension", "metric",
//! "domain_box"}}` for the space and `{"components": [...]}` for the map.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::conditions::{Domain, GridSpec};
use crate::error::{Error, Result};
use crate::map::{validate_table, CoupledMap, ExprMap, TableMap};
use crate::solver::SolverOptions;
use crate::space::{
    validate_metric, validate_order, AxiomViolation, FiniteSpace, Metric, Point, RealVectorSpace,
    ValidationReport,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub space: SpaceDoc,
    pub map: MapDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<StartDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpaceDoc {
    Finite(FiniteSpaceDoc),
    RealVector(RealVectorDoc),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiniteSpaceDoc {
    pub elements: Vec<String>,
    pub distance: Vec<Vec<f64>>,
    pub order_pairs: Vec<[String; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RealVectorDoc {
    pub dimension: usize,
    pub metric: Metric,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain_box: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapDoc {
    Table(Vec<[String; 3]>),
    Components(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StartDoc {
    pub x0: Point,
    pub y0: Point,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<usize>,
}

/// A loaded, fully typed instance.
#[derive(Debug, Clone)]
pub enum Instance {
    Finite {
        space: FiniteSpace,
        map: TableMap,
        start: Option<(usize, usize)>,
    },
    RealVector {
        space: RealVectorSpace,
        map: ExprMap,
        start: Option<(Vec<f64>, Vec<f64>)>,
    },
}

impl FiniteSpaceDoc {
    pub fn build(&self) -> Result<FiniteSpace> {
        let pairs: Vec<(&str, &str)> = self
            .order_pairs
            .iter()
            .map(|[a, b]| (a.as_str(), b.as_str()))
            .collect();
        FiniteSpace::new(self.elements.clone(), self.distance.clone(), &pairs)
    }

    pub fn from_space(space: &FiniteSpace) -> Self {
        Self {
            elements: space.labels().to_vec(),
            distance: space.distance_matrix().to_vec(),
            order_pairs: space
                .order_pairs()
                .into_iter()
                .map(|(a, b)| [a, b])
                .collect(),
        }
    }
}

impl RealVectorDoc {
    pub fn build(&self) -> Result<RealVectorSpace> {
        RealVectorSpace::new(self.dimension, self.metric, self.domain_box.clone())
    }
}

impl InstanceFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Schema(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance documents always serialize")
    }

    pub fn from_finite(space: &FiniteSpace, map: &TableMap) -> Self {
        Self {
            space: SpaceDoc::Finite(FiniteSpaceDoc::from_space(space)),
            map: MapDoc::Table(map.entries(space)),
            start: None,
            solver: None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.space, SpaceDoc::Finite(_))
    }

    fn check_backends(&self) -> Result<()> {
        match (&self.space, &self.map) {
            (SpaceDoc::Finite(_), MapDoc::Table(_))
            | (SpaceDoc::RealVector(_), MapDoc::Components(_)) => Ok(()),
            (SpaceDoc::Finite(_), MapDoc::Components(_)) => Err(Error::Schema(
                "finite space requires a `table` map, got `components`".into(),
            )),
            (SpaceDoc::RealVector(_), MapDoc::Table(_)) => Err(Error::Schema(
                "real_vector space requires a `components` map, got `table`".into(),
            )),
        }
    }

    /// Runs the metric and order validators and the map totality check.
    /// Structural problems (empty space, mismatched shapes, unknown labels
    /// in the order, unparsable expressions) are errors, not violations.
    pub fn validate(&self) -> Result<ValidationReport> {
        self.check_backends()?;
        match (&self.space, &self.map) {
            (SpaceDoc::Finite(doc), MapDoc::Table(entries)) => {
                let space = doc.build()?;
                Ok(validate_metric(&space)
                    .merge(validate_order(&space))
                    .merge(validate_table(&space, entries)))
            }
            (SpaceDoc::RealVector(doc), MapDoc::Components(components)) => {
                let space = doc.build()?;
                let map = ExprMap::parse(&space, components)?;
                let mut violations = Vec::new();
                if space.domain_box().is_some() {
                    let domain = Domain::grid(&space, &GridSpec::default())?;
                    'scan: for x in &domain.elems {
                        for y in &domain.elems {
                            if let Err(e) = map.apply(x, y) {
                                violations.push(AxiomViolation::MapOutOfDomain {
                                    x: Point::Vector(x.clone()).to_string(),
                                    y: Point::Vector(y.clone()).to_string(),
                                    detail: e.to_string(),
                                });
                                break 'scan;
                            }
                        }
                    }
                }
                Ok(ValidationReport::from_violations(violations))
            }
            _ => unreachable!("backends checked above"),
        }
    }

    /// Builds the typed instance. Callers wanting violation lists should run
    /// [`InstanceFile::validate`] first; here an incomplete table is an error.
    pub fn build(&self) -> Result<Instance> {
        self.check_backends()?;
        match (&self.space, &self.map) {
            (SpaceDoc::Finite(doc), MapDoc::Table(entries)) => {
                let space = doc.build()?;
                let map = TableMap::from_entries(&space, entries)?;
                let start = match &self.start {
                    Some(s) => Some((space.resolve(&s.x0)?, space.resolve(&s.y0)?)),
                    None => None,
                };
                Ok(Instance::Finite { space, map, start })
            }
            (SpaceDoc::RealVector(doc), MapDoc::Components(components)) => {
                let space = doc.build()?;
                let map = ExprMap::parse(&space, components)?;
                let start = match &self.start {
                    Some(s) => Some((space.resolve(&s.x0)?, space.resolve(&s.y0)?)),
                    None => None,
                };
                Ok(Instance::RealVector { space, map, start })
            }
            _ => unreachable!("backends checked above"),
        }
    }

    /// Solver options from the document, falling back to the defaults.
    pub fn solver_options(&self) -> SolverOptions {
        let mut opts = SolverOptions::default();
        if let Some(s) = &self.solver {
            if let Some(tol) = s.tol {
                opts.tol = tol;
            }
            if let Some(max_iter) = s.max_iter {
                opts.max_iter = max_iter;
            }
        }
        opts
    }
}
