//! Exact symbolic machinery for the stationary AKNS hierarchy: differential
//! polynomial recursion, Laurent series witnesses for first-order poles,
//! local Frobenius solutions of the spectral problem, and a finite-gap
//! certificate for Schrodinger potentials built from a stationary pair.

pub mod algebra;
pub mod frobenius;
pub mod gapcheck;
pub mod hierarchy;
pub mod poles;
pub mod series;

pub use algebra::{DiffMono, DiffPoly, GaussRat, SymPoly};
pub use frobenius::{
    indicial_exponents, local_solution, meromorphy_verdict, residual_check, FrobeniusError,
    FrobeniusSolution, MeromorphyVerdict, ResidualVerdict,
};
pub use gapcheck::{
    build_potential, finite_gap_check, pipeline, GapError, GapFailure, GapReport, PipelineReport,
    PotentialPoleData, StageResult,
};
pub use hierarchy::{
    compute_fg, propagation_check, solve_constants, stationary_residual, ConstantVector,
    HierarchyError, HierarchyPair, SolveOutcome, StationaryVerdict,
};
pub use poles::{
    classify_pole, fg_pole_probe, fg_pole_probe_symbolic, product_laurent, PoleData, PoleError,
    PoleReport, ProbeResult, ProductReport,
};
pub use series::{Laurent, SeriesError};
