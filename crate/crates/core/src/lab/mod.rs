//! Experiment harness: marginal-bound and contraction verifiers, the
//! boundary-stripping reduction, weak/strong mixing decay measurements, and
//! the theoretical decay envelope with its least-squares counterpart.

pub mod checks;
pub mod envelope;
pub mod experiment;

use thiserror::Error;

use crate::assumption::AssumptionFailure;
use crate::graph::GraphError;
use crate::oracle::OracleError;
use crate::recursion::RecursionError;

pub use checks::{
    bounds_check, contraction_check, single_point_corollary_check, strip_near_boundary,
    tv_scaling_check, BoundKind, BoundViolation, BoundsReport, ContractionReport, CorollaryReport,
    NeighborContraction, StrippedInstance, TvScalingReport, CHECK_TOLERANCE,
};
pub use envelope::{
    fit_decay, theoretical_envelope, DecayFit, Envelope, D0_SEARCH_LIMIT, EPSILON_FLOOR,
};
pub use experiment::{
    render_csv, ssm_experiment, wsm_experiment, DecaySample, ExperimentConfig, ExperimentRun,
};

#[derive(Debug, Error)]
pub enum LabError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Recursion(#[from] RecursionError),
    #[error("instance does not satisfy the list-size hypothesis: {0:?}")]
    AssumptionNotSatisfied(Vec<AssumptionFailure>),
    #[error("no crossover depth below {0} satisfies the envelope inequality")]
    EnvelopeSearchFailed(usize),
    #[error("fit needs at least two samples above the floor at two distinct distances")]
    FitUnderdetermined,
    #[error("vertex {0} must belong to the region")]
    VertexNotInRegion(usize),
    #[error("vertex {0} is not on the region boundary")]
    NotBoundaryVertex(usize),
    #[error("vertex {0} is isolated; the contraction needs at least one neighbor")]
    IsolatedVertex(usize),
    #[error("stripping at distance {1} requires boundary vertex {0} to be assigned")]
    StripNeedsAssignment(usize, usize),
    #[error("stripping changed the marginal at vertex {0}")]
    StripMismatch(usize),
    #[error("vertex {0} is disconnected from the reference set")]
    InfiniteDistance(usize),
    #[error("disagreement set must be a nonempty subset of the region boundary")]
    BadDisagreementSet,
    #[error("no acceptable sample after {0} attempts")]
    SamplingExhausted(usize),
}
