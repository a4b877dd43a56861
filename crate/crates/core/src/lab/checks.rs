//! Hard pass/fail verifiers for the marginal bounds, the per-level
//! contraction of the error functional, the boundary-stripping reduction,
//! and the two total-variation scaling consequences.

use std::fmt;

use num::Zero;

use crate::assumption::{check_assumption, epsilon_of};
use crate::graph::{GraphListPair, Region, VertexMap};
use crate::oracle::{
    self, big_ratio, count_joint, ratio_to_f64, BoundaryCondition, JointCounts, OracleError,
};
use crate::recursion::{error_functional, reduce_pairwise};

use super::LabError;

/// Slack tolerance for every verifier in this module.
pub const CHECK_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundKind {
    /// `P <= 1/beta`.
    SimpleUpper,
    /// `P <= 1 / (m * alpha * exp(-(1 + 1/beta)/alpha))`, degree `m >= 1`.
    DegreeUpper,
    /// `P >= (1 - 1/beta)^Delta / q`.
    Lower,
}

#[derive(Clone, Debug)]
pub struct BoundViolation {
    pub condition_index: usize,
    pub color: u32,
    pub marginal: f64,
    pub bound: f64,
    pub kind: BoundKind,
}

/// Outcome of checking the three marginal bounds at one vertex over a set
/// of boundary conditions.
#[derive(Clone, Debug)]
pub struct BoundsReport {
    pub vertex: usize,
    pub degree: usize,
    pub conditions_checked: usize,
    pub simple_upper: f64,
    pub degree_upper: Option<f64>,
    pub lower: f64,
    /// Worst (smallest) `bound - marginal` seen for each upper bound and
    /// `marginal - bound` for the lower bound.
    pub worst_simple_slack: f64,
    pub worst_degree_slack: Option<f64>,
    pub worst_lower_slack: f64,
    pub violations: Vec<BoundViolation>,
    pub passed: bool,
}

impl fmt::Display for BoundsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "bounds v={} m={} conditions={} : {}",
            self.vertex,
            self.degree,
            self.conditions_checked,
            if self.passed { "pass" } else { "FAIL" }
        )?;
        writeln!(f, "  P <= {} slack {}", self.simple_upper, self.worst_simple_slack)?;
        if let (Some(bound), Some(slack)) = (self.degree_upper, self.worst_degree_slack) {
            writeln!(f, "  P <= {bound} slack {slack}")?;
        }
        writeln!(f, "  P >= {} slack {}", self.lower, self.worst_lower_slack)?;
        for v in &self.violations {
            writeln!(
                f,
                "  violation: condition {} color {} marginal {} vs {:?} bound {}",
                v.condition_index, v.color, v.marginal, v.kind, v.bound
            )?;
        }
        Ok(())
    }
}

/// Checks, for every condition and every color in `L(v)`, the two upper
/// bounds and the positive lower bound on the oracle marginal. The instance
/// must satisfy the list-size hypothesis for the bounds to be claimed.
pub fn bounds_check(
    pair: &GraphListPair,
    v: usize,
    conditions: &[BoundaryCondition],
    alpha: f64,
    beta: f64,
) -> Result<BoundsReport, LabError> {
    pair.check_vertex(v)?;
    let report = check_assumption(pair, alpha, beta);
    if !report.satisfied {
        return Err(LabError::AssumptionNotSatisfied(report.failures));
    }
    let m = pair.degree(v);
    let delta = pair.max_degree();
    let q = pair.palette() as f64;
    let simple_upper = 1.0 / beta;
    let degree_upper = if m >= 1 {
        Some(1.0 / (m as f64 * alpha * (-(1.0 + 1.0 / beta) / alpha).exp()))
    } else {
        None
    };
    let lower = (1.0 - 1.0 / beta).powi(delta as i32) / q;

    let mut worst_simple = f64::INFINITY;
    let mut worst_degree = degree_upper.map(|_| f64::INFINITY);
    let mut worst_lower = f64::INFINITY;
    let mut violations = Vec::new();

    for (idx, cond) in conditions.iter().enumerate() {
        let marginals = oracle::marginal_vector(pair, cond, v)?;
        for (&color, &p) in marginals.colors.iter().zip(&marginals.probs) {
            worst_simple = worst_simple.min(simple_upper - p);
            if p > simple_upper + CHECK_TOLERANCE {
                violations.push(BoundViolation {
                    condition_index: idx,
                    color,
                    marginal: p,
                    bound: simple_upper,
                    kind: BoundKind::SimpleUpper,
                });
            }
            if let Some(bound) = degree_upper {
                let slack = bound - p;
                worst_degree = worst_degree.map(|w| w.min(slack));
                if p > bound + CHECK_TOLERANCE {
                    violations.push(BoundViolation {
                        condition_index: idx,
                        color,
                        marginal: p,
                        bound,
                        kind: BoundKind::DegreeUpper,
                    });
                }
            }
            worst_lower = worst_lower.min(p - lower);
            if p < lower - CHECK_TOLERANCE {
                violations.push(BoundViolation {
                    condition_index: idx,
                    color,
                    marginal: p,
                    bound: lower,
                    kind: BoundKind::Lower,
                });
            }
        }
    }

    let passed = violations.is_empty();
    Ok(BoundsReport {
        vertex: v,
        degree: m,
        conditions_checked: conditions.len(),
        simple_upper,
        degree_upper,
        lower,
        worst_simple_slack: worst_simple,
        worst_degree_slack: worst_degree,
        worst_lower_slack: worst_lower,
        violations,
        passed,
    })
}

#[derive(Clone, Debug)]
pub struct NeighborContraction {
    pub neighbor: usize,
    /// Degree of the neighbor once the pivot is deleted.
    pub residual_degree: usize,
    /// `E(x_i, y_i)`, absent when the residual degree is zero.
    pub error_value: Option<f64>,
}

/// Outcome of checking the one-level contraction inequality at a vertex.
#[derive(Clone, Debug)]
pub struct ContractionReport {
    pub vertex: usize,
    pub epsilon: f64,
    pub error_value: f64,
    pub argmax: u32,
    pub argmin: u32,
    /// `E(x, y) / m`.
    pub lhs: f64,
    /// `(1 - epsilon) * max_i E(x_i, y_i) / m_i`, zero when every residual
    /// degree vanishes.
    pub rhs: f64,
    pub neighbors: Vec<NeighborContraction>,
    pub passed: bool,
}

impl fmt::Display for ContractionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "contraction v={} E={} (argmax {}, argmin {}) lhs={} rhs={} eps={} : {}",
            self.vertex,
            self.error_value,
            self.argmax,
            self.argmin,
            self.lhs,
            self.rhs,
            self.epsilon,
            if self.passed { "pass" } else { "FAIL" }
        )?;
        for n in &self.neighbors {
            writeln!(
                f,
                "  neighbor {} m_i={} E_i={:?}",
                n.neighbor, n.residual_degree, n.error_value
            )?;
        }
        Ok(())
    }
}

/// Verifies `E(x,y)/m <= (1 - epsilon) * max_{i: m_i > 0} E(x_i,y_i)/m_i`
/// where `x, y` are the oracle marginal vectors at `v` under the two
/// conditions, the maximizing/minimizing colors of the error functional
/// select the two-color reductions, and `x_i, y_i` are the oracle vectors
/// at the neighbors of the reduced instances.
pub fn contraction_check(
    pair: &GraphListPair,
    v: usize,
    c1: &BoundaryCondition,
    c2: &BoundaryCondition,
    alpha: f64,
    beta: f64,
) -> Result<ContractionReport, LabError> {
    pair.check_vertex(v)?;
    let report = check_assumption(pair, alpha, beta);
    if !report.satisfied {
        return Err(LabError::AssumptionNotSatisfied(report.failures));
    }
    let epsilon = epsilon_of(alpha, beta).expect("satisfied implies contractive");
    let m = pair.degree(v);
    if m == 0 {
        return Err(LabError::IsolatedVertex(v));
    }

    let x = oracle::marginal_vector(pair, c1, v)?;
    let y = oracle::marginal_vector(pair, c2, v)?;
    let error = error_functional(&x, &y)?;

    let neighbors_of_v = pair.neighbors(v).to_vec();
    let mut neighbors = Vec::with_capacity(m);
    let mut rhs_max: Option<f64> = None;
    for (pos, &vi) in neighbors_of_v.iter().enumerate() {
        let inst = reduce_pairwise(pair, v, error.argmax, error.argmin, pos + 1)?;
        let nv = inst.new_id(vi).expect("neighbor survives");
        let residual_degree = inst.pair().degree(nv);
        if residual_degree == 0 {
            neighbors.push(NeighborContraction {
                neighbor: vi,
                residual_degree,
                error_value: None,
            });
            continue;
        }
        let mc1 = inst.map_condition(c1)?;
        let mc2 = inst.map_condition(c2)?;
        let xi = oracle::marginal_vector(inst.pair(), &mc1, nv)?;
        let yi = oracle::marginal_vector(inst.pair(), &mc2, nv)?;
        let ei = error_functional(&xi, &yi)?;
        let scaled = ei.value / residual_degree as f64;
        rhs_max = Some(rhs_max.map_or(scaled, |r| r.max(scaled)));
        neighbors.push(NeighborContraction {
            neighbor: vi,
            residual_degree,
            error_value: Some(ei.value),
        });
    }

    let lhs = error.value / m as f64;
    let rhs = (1.0 - epsilon) * rhs_max.unwrap_or(0.0);
    Ok(ContractionReport {
        vertex: v,
        epsilon,
        error_value: error.value,
        argmax: error.argmax,
        argmin: error.argmin,
        lhs,
        rhs,
        neighbors,
        passed: lhs <= rhs + CHECK_TOLERANCE,
    })
}

/// Result of deleting the near part of a region's boundary.
#[derive(Clone, Debug)]
pub struct StrippedInstance {
    pub pair: GraphListPair,
    map: VertexMap,
    /// `(deleted boundary vertex, color removed from its neighbors' lists)`.
    pub removed: Vec<(usize, u32)>,
}

impl StrippedInstance {
    pub fn new_id(&self, old: usize) -> Option<usize> {
        self.map.new_id(old)
    }

    pub fn old_id(&self, new: usize) -> usize {
        self.map.old_id(new)
    }

    /// Restricts a condition to the surviving vertices and renumbers it.
    pub fn map_condition(&self, cond: &BoundaryCondition) -> BoundaryCondition {
        cond.remapped(|v| self.new_id(v))
    }
}

/// Deletes every boundary vertex of `psi` at distance less than `d` from
/// `v` and removes its assigned color from its neighbors' lists. Marginals
/// at `v` under conditions agreeing on the deleted vertices are preserved
/// exactly. With `d = 1` (or no boundary vertex that near) this is the
/// identity transform.
pub fn strip_near_boundary(
    pair: &GraphListPair,
    psi: &Region,
    v: usize,
    c_common: &BoundaryCondition,
    d: usize,
) -> Result<StrippedInstance, LabError> {
    pair.check_vertex(v)?;
    if !psi.contains(v) {
        return Err(LabError::VertexNotInRegion(v));
    }
    let boundary = psi.boundary(pair)?;
    let dist = pair.distances_from_set(&[v])?;
    let mut strip: Vec<usize> = boundary
        .into_iter()
        .filter(|&u| dist[u].finite().is_some_and(|x| x < d))
        .collect();
    strip.sort_unstable();
    let mut removed = Vec::with_capacity(strip.len());
    for &u in &strip {
        match c_common.color(u) {
            Some(c) => removed.push((u, c)),
            None => return Err(LabError::StripNeedsAssignment(u, d)),
        }
    }
    let (mut reduced, map) = pair.delete_vertices(&strip)?;
    for &(u, c) in &removed {
        for &w in pair.neighbors(u) {
            if let Some(nw) = map.new_id(w) {
                if reduced.list(nw).contains(c) {
                    reduced.set_list(nw, reduced.list(nw).without(c));
                }
            }
        }
    }
    Ok(StrippedInstance { pair: reduced, map, removed })
}

/// Joint-count table marginalized down to `keep` (indices into the table's
/// target tuple): maps each partial assignment to its summed count, as
/// exact probabilities against the table total.
fn marginal_probability(
    table: &JointCounts,
    keep: &[usize],
    partial: &[u32],
) -> num::BigRational {
    let mut num = num::BigUint::zero();
    for (assignment, count) in table.iter() {
        if keep.iter().zip(partial).all(|(&k, &c)| assignment[k] == c) {
            num += count;
        }
    }
    big_ratio(&num, table.total())
}

#[derive(Clone, Debug)]
pub struct TvScalingReport {
    pub lambda: Vec<usize>,
    pub tv: f64,
    /// Largest single-vertex conditional ratio deviation over the region's
    /// vertices, colors, and pinnings of the other `lambda` vertices.
    /// Infinite when a marginal vanishes under one condition only.
    pub epsilon_one: f64,
    pub bound: f64,
    pub passed: bool,
}

impl fmt::Display for TvScalingReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "tv-scaling |lambda|={} tv={} eps1={} bound={} : {}",
            self.lambda.len(),
            self.tv,
            self.epsilon_one,
            self.bound,
            if self.passed { "pass" } else { "FAIL" }
        )
    }
}

/// Verifies `TV_lambda(c1, c2) <= |lambda| * eps1`. The single-vertex
/// deviation `eps1` maximizes `|P(j | sigma, c1) / P(j | sigma, c2) - 1|`
/// over vertices `v` of `lambda`, colors `j`, and colorings `sigma` of every
/// subset of the remaining `lambda` vertices, mirroring the conditional
/// marginals the telescoping argument walks through.
pub fn tv_scaling_check(
    pair: &GraphListPair,
    psi: &Region,
    lambda: &[usize],
    c1: &BoundaryCondition,
    c2: &BoundaryCondition,
) -> Result<TvScalingReport, LabError> {
    let tv = oracle::tv_distance_restricted(pair, psi, c1, c2, lambda)?;
    if lambda.is_empty() {
        return Ok(TvScalingReport {
            lambda: Vec::new(),
            tv,
            epsilon_one: 0.0,
            bound: 0.0,
            passed: tv <= CHECK_TOLERANCE,
        });
    }

    let t1 = count_joint(pair, c1, lambda)?;
    let t2 = count_joint(pair, c2, lambda)?;
    if t1.total().is_zero() || t2.total().is_zero() {
        return Err(OracleError::UncolorableRegion.into());
    }

    let mut eps1 = 0.0f64;
    let k = lambda.len();
    for target in 0..k {
        let others: Vec<usize> = (0..k).filter(|&i| i != target).collect();
        // every subset of the other lambda vertices, every coloring of it
        for subset_mask in 0..(1usize << others.len()) {
            let subset: Vec<usize> = others
                .iter()
                .enumerate()
                .filter(|&(bit, _)| subset_mask >> bit & 1 == 1)
                .map(|(_, &i)| i)
                .collect();
            let mut sigma = vec![0u32; subset.len()];
            enumerate_colorings(&t1, &subset, 0, &mut sigma, &mut |sigma| {
                let mut keep = subset.to_vec();
                keep.push(target);
                let d1 = marginal_probability(&t1, &subset, sigma);
                let d2 = marginal_probability(&t2, &subset, sigma);
                if d1.is_zero() || d2.is_zero() {
                    return;
                }
                for &j in t1.colors_of(target) {
                    let mut partial = sigma.to_vec();
                    partial.push(j);
                    let n1 = marginal_probability(&t1, &keep, &partial);
                    let n2 = marginal_probability(&t2, &keep, &partial);
                    let p1 = ratio_to_f64(&(n1 / d1.clone()));
                    let p2 = ratio_to_f64(&(n2 / d2.clone()));
                    if p1 == 0.0 && p2 == 0.0 {
                        continue;
                    }
                    if p2 == 0.0 {
                        eps1 = f64::INFINITY;
                    } else {
                        eps1 = eps1.max((p1 / p2 - 1.0).abs());
                    }
                }
            });
        }
    }

    let bound = lambda.len() as f64 * eps1;
    Ok(TvScalingReport {
        lambda: lambda.to_vec(),
        tv,
        epsilon_one: eps1,
        bound,
        passed: tv <= bound + CHECK_TOLERANCE,
    })
}

fn enumerate_colorings(
    table: &JointCounts,
    subset: &[usize],
    pos: usize,
    sigma: &mut Vec<u32>,
    visit: &mut impl FnMut(&[u32]),
) {
    if pos == subset.len() {
        visit(sigma);
        return;
    }
    for &c in table.colors_of(subset[pos]) {
        sigma[pos] = c;
        enumerate_colorings(table, subset, pos + 1, sigma, visit);
    }
}

#[derive(Clone, Debug)]
pub struct CorollaryReport {
    pub boundary_vertex: usize,
    pub j1: u32,
    pub j2: u32,
    pub tv: f64,
    /// Largest deviation of the boundary vertex's marginal under a pinned
    /// `lambda` coloring from its unpinned marginal.
    pub epsilon_f: f64,
    pub bound: f64,
    pub passed: bool,
}

impl fmt::Display for CorollaryReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "single-point f={} j1={} j2={} tv={} eps_f={} bound={} : {}",
            self.boundary_vertex,
            self.j1,
            self.j2,
            self.tv,
            self.epsilon_f,
            self.bound,
            if self.passed { "pass" } else { "FAIL" }
        )
    }
}

/// Verifies `TV_lambda(base + f=j1, base + f=j2) <= 2 * eps_f` where
/// `eps_f = max_{sigma, j} |P(c(f)=j | sigma, base) / P(c(f)=j | base) - 1|`
/// over colorings `sigma` of `lambda`.
pub fn single_point_corollary_check(
    pair: &GraphListPair,
    psi: &Region,
    lambda: &[usize],
    base: &BoundaryCondition,
    f: usize,
    j1: u32,
    j2: u32,
) -> Result<CorollaryReport, LabError> {
    pair.check_vertex(f)?;
    let boundary = psi.boundary(pair)?;
    if !boundary.contains(&f) {
        return Err(LabError::NotBoundaryVertex(f));
    }
    if base.is_assigned(f) {
        return Err(OracleError::VertexAssigned(f).into());
    }
    for j in [j1, j2] {
        if !pair.list(f).contains(j) {
            return Err(OracleError::InvalidAssignment { vertex: f, color: j }.into());
        }
    }

    let c1 = base.with(f, j1);
    let c2 = base.with(f, j2);
    let tv = oracle::tv_distance_restricted(pair, psi, &c1, &c2, lambda)?;

    // joint over lambda plus f, under the base condition with f free
    let mut targets = lambda.to_vec();
    targets.push(f);
    let table = count_joint(pair, base, &targets)?;
    if table.total().is_zero() {
        return Err(OracleError::UncolorableRegion.into());
    }
    let f_idx = targets.len() - 1;
    let lambda_idx: Vec<usize> = (0..lambda.len()).collect();

    let mut eps_f = 0.0f64;
    let mut sigma = vec![0u32; lambda.len()];
    enumerate_colorings(&table, &lambda_idx, 0, &mut sigma, &mut |sigma| {
        let denom = marginal_probability(&table, &lambda_idx, sigma);
        if denom.is_zero() {
            return;
        }
        for &j in table.colors_of(f_idx) {
            let unconditioned = marginal_probability(&table, &[f_idx], &[j]);
            if unconditioned.is_zero() {
                continue;
            }
            let mut keep = lambda_idx.to_vec();
            keep.push(f_idx);
            let mut partial = sigma.to_vec();
            partial.push(j);
            let joint = marginal_probability(&table, &keep, &partial);
            let conditioned = joint / denom.clone();
            let ratio = ratio_to_f64(&(conditioned / unconditioned));
            eps_f = eps_f.max((ratio - 1.0).abs());
        }
    });

    let bound = 2.0 * eps_f;
    Ok(CorollaryReport {
        boundary_vertex: f,
        j1,
        j2,
        tv,
        epsilon_f: eps_f,
        bound,
        passed: tv <= bound + CHECK_TOLERANCE,
    })
}
