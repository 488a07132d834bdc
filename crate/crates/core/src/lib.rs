//! Coupled fixed points of mixed monotone maps on partially ordered metric
//! spaces.
//!
//! The crate covers the whole pipeline for a map `F: X × X → X`:
//!
//! - [`space`]: finite and real-vector ordered metric spaces with axiom validators;
//! - [`expr`]: the expression language for maps on `R^n`;
//! - [`map`]: table and expression maps;
//! - [`conditions`]: mixed monotonicity, the classical `k/2` contraction, the
//!   δ-ratio contraction and the small-gap ratio bound;
//! - [`solver`]: the coupled Picard iteration with its diagnostics;
//! - [`oracle`]: brute-force enumeration, the separation bound and a seeded
//!   random stress runner;
//! - [`instance`]: the JSON instance document.

#![allow(clippy::needless_range_loop)]

pub mod conditions;
pub mod error;
pub mod expr;
pub mod instance;
pub mod map;
pub mod oracle;
pub mod solver;
pub mod space;

pub use conditions::{ConditionName, ConditionReport, Domain, GridSpec, Violation};
pub use error::{Error, Result};
pub use expr::{Expr, ExprError};
pub use instance::{Instance, InstanceFile};
pub use map::{CoupledMap, ExprMap, TableMap};
pub use oracle::{
    CoupledFixedPointSet, RandomInstanceSpec, SeparationReport, StressRun, StressSummary,
};
pub use solver::{IterationTrace, SolverOptions, TraceRecord, Verdict};
pub use space::{
    FiniteSpace, Metric, OrderedMetricSpace, Point, RealVectorSpace, ValidationReport,
};
