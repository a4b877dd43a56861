//! Exact machinery for studying how boundary conditions influence list
//! colorings of finite triangle-free graphs: a brute-force counting oracle,
//! the marginal ratio/normalization recursions with their list-reduction
//! bookkeeping, marginal bound and contraction verifiers, and an experiment
//! harness that measures the exponential decay of boundary influence
//! (weak and strong spatial mixing) against a theoretical envelope.

pub mod assumption;
pub mod gen;
pub mod graph;
pub mod lab;
pub mod oracle;
pub mod recursion;

pub use assumption::{
    alpha_star, beta_min, check_assumption, contraction_product, epsilon_of, AssumptionError,
    AssumptionFailure, AssumptionReport,
};
pub use gen::{generate, Family, GenError, GeneratorSpec, ListPolicy};
pub use graph::{
    parse_graph, write_graph, ColorSet, Distance, GraphError, GraphListPair, Region, VertexMap,
    MAX_PALETTE,
};
pub use lab::{
    bounds_check, contraction_check, fit_decay, render_csv, single_point_corollary_check,
    ssm_experiment, strip_near_boundary, theoretical_envelope, tv_scaling_check, wsm_experiment,
    BoundsReport, ContractionReport, CorollaryReport, DecayFit, DecaySample, Envelope,
    ExperimentConfig, ExperimentRun, LabError, StrippedInstance, TvScalingReport,
};
pub use oracle::{
    count_colorings, count_joint, is_colorable, marginal, marginal_exact, marginal_vector,
    marginal_vector_exact, tv_distance_restricted, BoundaryCondition, JointCounts, MarginalVector,
    OracleError,
};
pub use recursion::{
    approx_count, error_functional, marginal_recursive, marginal_recursive_grounded,
    marginal_vector_recursive, ratio_exact, ratio_exact_with_order, reduce_pairwise,
    reduce_pairwise_with_order, reduce_single, reduce_single_with_order, ApproxCount, ApproxStep,
    ErrorValue, Grounding, RecursionError, ReducedInstance,
};
