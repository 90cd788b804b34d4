//! Grid-based copula calculus.
//!
//! A bivariate copula is held as an `n x n` checkerboard mass matrix
//! ([`CopulaGrid`]). Row index is the first coordinate `v`, column index is the
//! conditioning coordinate `t`, so that row `k` of the [`DerivativeField`] is the
//! conditional distribution function `t -> d/dt C(k/n, t)` on the bins of `t`.
//!
//! The upper product transform `T(C) = C v Pi`, the reflection `S`, and the
//! increasing rearrangement act row by row on these conditional profiles. Their
//! outputs are step functions whose breakpoints are no longer on the `1/n`
//! lattice, so the transforms operate on [`ProfileField`], which stores each
//! row exactly. Projecting back to a grid is exact at every grid vertex.
//!
//! Integrals in `v` use a vertex quadrature ([`quadrature::vertex_weights`])
//! that is exact for polynomials up to degree two; integrals in `t` are exact.

pub mod error;
pub mod grid;
pub mod io;
pub mod measures;
pub mod normal;
pub mod order;
pub mod parametric;
pub mod profile;
pub mod quadrature;
pub mod suite;
pub mod transforms;

pub use error::{Axis, CopulaError, Result};
pub use grid::{CopulaGrid, DerivativeField, SampleSet};
pub use measures::{CostSpec, MeasureKind, MeasureReport, Phi, SupermodularFn, XiMethod};
pub use order::{OrderVerdict, Relation, Witness};
pub use parametric::ParametricCopula;
pub use profile::{ProfileField, StepProfile};

pub use suite::{CheckStatus, SuiteCheck, SuiteReport};
pub use transforms::MarginalSpec;
