//! The two exact marginal recursions with their list-reduction bookkeeping,
//! the log-ratio error functional, a depth-truncated recursive evaluator,
//! and a telescoping approximate counter built on top of it.
//!
//! Both recursions delete the pivot vertex and hand each neighbor a modified
//! list; the intermediate lists depend on the neighbor order (canonically
//! ascending id) but the recursion values do not.

use num::rational::BigRational;
use num::{One, Zero};
use thiserror::Error;

use crate::graph::{GraphError, GraphListPair, VertexMap};
use crate::oracle::{self, BoundaryCondition, MarginalVector, OracleError};

#[derive(Debug, Error)]
pub enum RecursionError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("neighbor index {index} out of range 1..={m}")]
    IndexOutOfRange { index: usize, m: usize },
    #[error("color {color} is not in the list of vertex {vertex}")]
    ColorNotInList { vertex: u32, color: u32 },
    #[error("order is not a permutation of the neighbors of vertex {0}")]
    BadNeighborOrder(usize),
    #[error("condition assigns the deleted vertex {0}")]
    ConditionOnDeleted(usize),
    #[error("denominator factor vanished: neighbor {vertex} takes color {color} with probability 1")]
    DegenerateRatio { vertex: usize, color: u32 },
    #[error("normalization sum vanished at vertex {0}")]
    DegenerateNormalization(usize),
    #[error("marginal vectors disagree on vertex or support")]
    SupportMismatch,
    #[error("non-positive entry {value} for color {color}")]
    NonPositiveEntry { color: u32, value: f64 },
    #[error("approximate counting failed at vertex {vertex} after {} completed steps", trace.len())]
    ApproxCountFailed { vertex: usize, trace: Vec<ApproxStep> },
}

/// A pivot deletion together with its list modifications: the graph with
/// vertex `v` removed, each surviving vertex renumbered, and a provenance
/// record of exactly which color was removed from which original vertex.
#[derive(Clone, Debug)]
pub struct ReducedInstance {
    pair: GraphListPair,
    deleted: usize,
    map: VertexMap,
    removals: Vec<(usize, u32)>,
}

impl ReducedInstance {
    pub fn pair(&self) -> &GraphListPair {
        &self.pair
    }

    pub fn deleted_vertex(&self) -> usize {
        self.deleted
    }

    /// New id of an original vertex; `None` for the deleted one.
    pub fn new_id(&self, old: usize) -> Option<usize> {
        self.map.new_id(old)
    }

    pub fn old_id(&self, new: usize) -> usize {
        self.map.old_id(new)
    }

    /// `(original vertex, color removed from its list)`, in application order.
    pub fn removals(&self) -> &[(usize, u32)] {
        &self.removals
    }

    /// Translates a condition on the original instance to the reduced one.
    pub fn map_condition(
        &self,
        cond: &BoundaryCondition,
    ) -> Result<BoundaryCondition, RecursionError> {
        if cond.is_assigned(self.deleted) {
            return Err(RecursionError::ConditionOnDeleted(self.deleted));
        }
        Ok(cond.remapped(|v| self.new_id(v)))
    }
}

fn check_color(pair: &GraphListPair, v: usize, color: u32) -> Result<(), RecursionError> {
    if pair.list(v).contains(color) {
        Ok(())
    } else {
        Err(RecursionError::ColorNotInList { vertex: v as u32, color })
    }
}

fn check_order(pair: &GraphListPair, v: usize, order: &[usize]) -> Result<(), RecursionError> {
    let mut sorted = order.to_vec();
    sorted.sort_unstable();
    if sorted == pair.neighbors(v) {
        Ok(())
    } else {
        Err(RecursionError::BadNeighborOrder(v))
    }
}

fn build_reduced(
    pair: &GraphListPair,
    v: usize,
    removals_by_old: Vec<(usize, u32)>,
) -> Result<ReducedInstance, RecursionError> {
    let (mut reduced, map) = pair.delete_vertices(&[v])?;
    let mut applied = Vec::new();
    for (old_w, color) in removals_by_old {
        let nw = map.new_id(old_w).expect("removal target survives deletion");
        if reduced.list(nw).contains(color) {
            reduced.set_list(nw, reduced.list(nw).without(color));
            applied.push((old_w, color));
        }
    }
    Ok(ReducedInstance { pair: reduced, deleted: v, map, removals: applied })
}

/// The two-color reduction: deletes `v` and removes `j1` from the lists of
/// neighbors before position `i` and `j2` from those after it (1-based
/// positions in `order`; absent colors are left alone). The `i`-th
/// neighbor's list is untouched.
pub fn reduce_pairwise_with_order(
    pair: &GraphListPair,
    v: usize,
    j1: u32,
    j2: u32,
    i: usize,
    order: &[usize],
) -> Result<ReducedInstance, RecursionError> {
    pair.check_vertex(v)?;
    check_order(pair, v, order)?;
    check_color(pair, v, j1)?;
    check_color(pair, v, j2)?;
    let m = order.len();
    if i == 0 || i > m {
        return Err(RecursionError::IndexOutOfRange { index: i, m });
    }
    let mut removals = Vec::new();
    for (k, &w) in order.iter().enumerate() {
        let pos = k + 1;
        if pos < i {
            removals.push((w, j1));
        } else if pos > i {
            removals.push((w, j2));
        }
    }
    build_reduced(pair, v, removals)
}

pub fn reduce_pairwise(
    pair: &GraphListPair,
    v: usize,
    j1: u32,
    j2: u32,
    i: usize,
) -> Result<ReducedInstance, RecursionError> {
    pair.check_vertex(v)?;
    reduce_pairwise_with_order(pair, v, j1, j2, i, pair.neighbors(v))
}

/// The one-color reduction: deletes `v` and removes `j` from the lists of
/// neighbors before position `i` only.
pub fn reduce_single_with_order(
    pair: &GraphListPair,
    v: usize,
    j: u32,
    i: usize,
    order: &[usize],
) -> Result<ReducedInstance, RecursionError> {
    pair.check_vertex(v)?;
    check_order(pair, v, order)?;
    check_color(pair, v, j)?;
    let m = order.len();
    if i == 0 || i > m {
        return Err(RecursionError::IndexOutOfRange { index: i, m });
    }
    let removals = order[..i - 1].iter().map(|&w| (w, j)).collect();
    build_reduced(pair, v, removals)
}

pub fn reduce_single(
    pair: &GraphListPair,
    v: usize,
    j: u32,
    i: usize,
) -> Result<ReducedInstance, RecursionError> {
    pair.check_vertex(v)?;
    reduce_single_with_order(pair, v, j, i, pair.neighbors(v))
}

/// Probability that a vertex of a reduced instance takes a color, with
/// vertices pinned by the condition contributing their indicator.
fn sub_probability(
    inst: &ReducedInstance,
    cond: &BoundaryCondition,
    old_vertex: usize,
    color: u32,
) -> Result<BigRational, RecursionError> {
    if let Some(assigned) = cond.color(old_vertex) {
        return Ok(if assigned == color { BigRational::one() } else { BigRational::zero() });
    }
    let mapped = inst.map_condition(cond)?;
    let nv = inst.new_id(old_vertex).expect("neighbor survives deletion");
    Ok(oracle::marginal_exact(inst.pair(), &mapped, nv, color)?)
}

/// The telescoping ratio `P(c(v)=j1 | cond) / P(c(v)=j2 | cond)` evaluated
/// through the two-color reductions: the product over neighbor positions of
/// `(1 - t_i(j1)) / (1 - t_i(j2))`, each `t` an exact oracle sub-marginal on
/// the corresponding reduced instance.
pub fn ratio_exact(
    pair: &GraphListPair,
    cond: &BoundaryCondition,
    v: usize,
    j1: u32,
    j2: u32,
) -> Result<f64, RecursionError> {
    pair.check_vertex(v)?;
    ratio_exact_with_order(pair, cond, v, j1, j2, pair.neighbors(v))
}

pub fn ratio_exact_with_order(
    pair: &GraphListPair,
    cond: &BoundaryCondition,
    v: usize,
    j1: u32,
    j2: u32,
    order: &[usize],
) -> Result<f64, RecursionError> {
    pair.check_vertex(v)?;
    check_order(pair, v, order)?;
    check_color(pair, v, j1)?;
    check_color(pair, v, j2)?;
    if cond.is_assigned(v) {
        return Err(OracleError::VertexAssigned(v).into());
    }
    if !oracle::is_colorable(pair, cond)? {
        return Err(OracleError::UncolorableRegion.into());
    }
    let mut ratio = BigRational::one();
    for (k, &vi) in order.iter().enumerate() {
        let inst = reduce_pairwise_with_order(pair, v, j1, j2, k + 1, order)?;
        let t1 = sub_probability(&inst, cond, vi, j1)?;
        let t2 = sub_probability(&inst, cond, vi, j2)?;
        let denominator = BigRational::one() - t2;
        if denominator.is_zero() {
            return Err(RecursionError::DegenerateRatio { vertex: vi, color: j2 });
        }
        ratio *= (BigRational::one() - t1) / denominator;
    }
    Ok(oracle::ratio_to_f64(&ratio))
}

/// What the truncated recursion returns when its depth budget runs out.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Grounding {
    /// Uniform over the current list. The neutral default; the contraction
    /// makes deep values insensitive to it.
    Uniform,
    /// Exact oracle marginal. Turns the evaluator into the one-color
    /// recursion identity, used by the equivalence tests.
    Oracle,
}

/// `P(c(v) = j | cond)` by the normalized product recursion, recursing
/// through one-color reductions to `depth` levels.
///
/// Pinned vertices return their indicator at any depth; isolated vertices
/// are uniform over their list (exactly). At depth 0 an unresolved vertex
/// falls back to the grounding. Values always lie in `[0, 1]` and sum to 1
/// over the list by construction.
pub fn marginal_recursive(
    pair: &GraphListPair,
    cond: &BoundaryCondition,
    v: usize,
    j: u32,
    depth: usize,
) -> Result<f64, RecursionError> {
    marginal_recursive_grounded(pair, cond, v, j, depth, Grounding::Uniform)
}

pub fn marginal_recursive_grounded(
    pair: &GraphListPair,
    cond: &BoundaryCondition,
    v: usize,
    j: u32,
    depth: usize,
    grounding: Grounding,
) -> Result<f64, RecursionError> {
    pair.check_vertex(v)?;
    if let Some(assigned) = cond.color(v) {
        return Ok(if assigned == j { 1.0 } else { 0.0 });
    }
    if !pair.list(v).contains(j) {
        return Ok(0.0);
    }
    if pair.degree(v) == 0 {
        return Ok(1.0 / pair.list_size(v) as f64);
    }
    if depth == 0 {
        return grounded_value(pair, cond, v, j, grounding);
    }
    let weights = unnormalized_weights(pair, cond, v, depth, grounding)?;
    let total: f64 = weights.iter().map(|&(_, w)| w).sum();
    if total <= 0.0 {
        return Err(RecursionError::DegenerateNormalization(v));
    }
    let numerator = weights
        .iter()
        .find(|&&(k, _)| k == j)
        .map(|&(_, w)| w)
        .expect("queried color is in the list");
    Ok(numerator / total)
}

/// All recursive marginals of `v` at once (they share the normalization).
pub fn marginal_vector_recursive(
    pair: &GraphListPair,
    cond: &BoundaryCondition,
    v: usize,
    depth: usize,
    grounding: Grounding,
) -> Result<MarginalVector, RecursionError> {
    pair.check_vertex(v)?;
    if cond.is_assigned(v) {
        return Err(OracleError::VertexAssigned(v).into());
    }
    let colors: Vec<u32> = pair.list(v).to_vec();
    if pair.degree(v) == 0 || depth == 0 {
        let probs = colors
            .iter()
            .map(|&j| marginal_recursive_grounded(pair, cond, v, j, depth, grounding))
            .collect::<Result<Vec<f64>, _>>()?;
        return Ok(MarginalVector { vertex: v, colors, probs });
    }
    let weights = unnormalized_weights(pair, cond, v, depth, grounding)?;
    let total: f64 = weights.iter().map(|&(_, w)| w).sum();
    if total <= 0.0 {
        return Err(RecursionError::DegenerateNormalization(v));
    }
    Ok(MarginalVector {
        vertex: v,
        colors,
        probs: weights.iter().map(|&(_, w)| w / total).collect(),
    })
}

/// Per-color products `prod_i (1 - t_i(k))` over the one-color reductions.
/// Positions are evaluated in ascending order and a vanished factor
/// short-circuits the product, so reductions that would conflict with a
/// pinned neighbor are never entered.
fn unnormalized_weights(
    pair: &GraphListPair,
    cond: &BoundaryCondition,
    v: usize,
    depth: usize,
    grounding: Grounding,
) -> Result<Vec<(u32, f64)>, RecursionError> {
    debug_assert!(depth >= 1);
    let neighbors = pair.neighbors(v).to_vec();
    let mut out = Vec::with_capacity(pair.list_size(v));
    for k in pair.list(v).iter() {
        let mut product = 1.0f64;
        for (pos, &vi) in neighbors.iter().enumerate() {
            let t = if let Some(assigned) = cond.color(vi) {
                if assigned == k {
                    1.0
                } else {
                    0.0
                }
            } else {
                let inst = reduce_single(pair, v, k, pos + 1)?;
                let mapped = inst.map_condition(cond)?;
                let nv = inst.new_id(vi).expect("neighbor survives deletion");
                marginal_recursive_grounded(inst.pair(), &mapped, nv, k, depth - 1, grounding)?
            };
            let factor = 1.0 - t;
            if factor <= 0.0 {
                product = 0.0;
                break;
            }
            product *= factor;
        }
        out.push((k, product));
    }
    Ok(out)
}

fn grounded_value(
    pair: &GraphListPair,
    cond: &BoundaryCondition,
    v: usize,
    j: u32,
    grounding: Grounding,
) -> Result<f64, RecursionError> {
    match grounding {
        Grounding::Uniform => Ok(1.0 / pair.list_size(v) as f64),
        Grounding::Oracle => Ok(oracle::marginal(pair, cond, v, j)?),
    }
}

/// The spread of the per-color log ratios between two marginal vectors:
/// `max_j ln(x_j / y_j) - min_j ln(x_j / y_j)`, with the maximizing and
/// minimizing colors (ties broken by smallest color id).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorValue {
    pub value: f64,
    pub argmax: u32,
    pub argmin: u32,
}

pub fn error_functional(x: &MarginalVector, y: &MarginalVector) -> Result<ErrorValue, RecursionError> {
    if x.vertex != y.vertex || x.colors != y.colors {
        return Err(RecursionError::SupportMismatch);
    }
    for (vec, side) in [(x, "x"), (y, "y")] {
        let _ = side;
        for (&c, &p) in vec.colors.iter().zip(&vec.probs) {
            if p <= 0.0 {
                return Err(RecursionError::NonPositiveEntry { color: c, value: p });
            }
        }
    }
    let mut max = f64::NEG_INFINITY;
    let mut min = f64::INFINITY;
    let mut argmax = 0u32;
    let mut argmin = 0u32;
    for (i, &c) in x.colors.iter().enumerate() {
        let r = (x.probs[i] / y.probs[i]).ln();
        if r > max {
            max = r;
            argmax = c;
        }
        if r < min {
            min = r;
            argmin = c;
        }
    }
    Ok(ErrorValue { value: max - min, argmax, argmin })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ApproxStep {
    pub vertex: usize,
    pub color: u32,
    pub marginal: f64,
}

#[derive(Clone, Debug)]
pub struct ApproxCount {
    pub z_hat: f64,
    pub log_z_hat: f64,
    pub steps: Vec<ApproxStep>,
}

/// Telescoping estimate of the number of colorings: walks vertices in id
/// order, pins each to its largest recursive marginal (ties to the smallest
/// color), and multiplies the inverse marginals. No accuracy guarantee is
/// claimed; with depth at least the vertex count the recursion grounds
/// exactly and the estimate reproduces the count.
pub fn approx_count(pair: &GraphListPair, depth: usize) -> Result<ApproxCount, RecursionError> {
    let mut cond = BoundaryCondition::empty();
    let mut log_z = 0.0f64;
    let mut steps: Vec<ApproxStep> = Vec::with_capacity(pair.vertex_count());
    for v in pair.vertices() {
        let vector = marginal_vector_recursive(pair, &cond, v, depth, Grounding::Uniform)
            .map_err(|_| RecursionError::ApproxCountFailed { vertex: v, trace: steps.clone() })?;
        let mut best_color = 0u32;
        let mut best_prob = f64::NEG_INFINITY;
        for (&c, &p) in vector.colors.iter().zip(&vector.probs) {
            if p > best_prob {
                best_prob = p;
                best_color = c;
            }
        }
        if best_prob <= 0.0 {
            return Err(RecursionError::ApproxCountFailed { vertex: v, trace: steps });
        }
        log_z -= best_prob.ln();
        steps.push(ApproxStep { vertex: v, color: best_color, marginal: best_prob });
        cond.set(v, best_color);
    }
    Ok(ApproxCount { z_hat: log_z.exp(), log_z_hat: log_z, steps })
}
