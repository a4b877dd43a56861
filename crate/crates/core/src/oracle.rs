//! Ground-truth enumeration: exact big-integer counts of proper list
//! colorings, conditional marginals as exact rationals, and restricted total
//! variation distance between conditioned distributions.
//!
//! A condition is a partial coloring; unassigned ("free") vertices are
//! averaged over. Everything here is exact: counts are `BigUint`, marginals
//! are ratios of counts.

use std::collections::BTreeMap;
use std::collections::VecDeque;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{BigUint, One, ToPrimitive, Zero};
use thiserror::Error;

use crate::graph::{ColorSet, GraphError, GraphListPair, Region};

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("no valid coloring is consistent with the boundary condition")]
    UncolorableRegion,
    #[error("vertex {0} is already assigned by the condition")]
    VertexAssigned(usize),
    #[error("condition assigns color {color} to vertex {vertex}, which is not in its list")]
    InvalidAssignment { vertex: usize, color: u32 },
    #[error("condition assigns vertex {0} inside the region under study")]
    ConditionInsideRegion(usize),
    #[error("vertex {0} is outside the region under study")]
    OutsideRegion(usize),
}

/// A partial coloring: assigned vertices map to a color, free vertices are
/// absent. Iteration order is ascending vertex id.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BoundaryCondition {
    assign: BTreeMap<usize, u32>,
}

impl BoundaryCondition {
    pub fn empty() -> BoundaryCondition {
        BoundaryCondition::default()
    }

    /// Builds a condition validating that every color lies in the vertex's
    /// list.
    pub fn checked(
        pair: &GraphListPair,
        assignments: &[(usize, u32)],
    ) -> Result<BoundaryCondition, OracleError> {
        let mut cond = BoundaryCondition::empty();
        for &(v, c) in assignments {
            pair.check_vertex(v)?;
            if !pair.list(v).contains(c) {
                return Err(OracleError::InvalidAssignment { vertex: v, color: c });
            }
            cond.assign.insert(v, c);
        }
        Ok(cond)
    }

    pub fn from_pairs(assignments: &[(usize, u32)]) -> BoundaryCondition {
        BoundaryCondition {
            assign: assignments.iter().copied().collect(),
        }
    }

    pub fn set(&mut self, v: usize, c: u32) {
        self.assign.insert(v, c);
    }

    pub fn with(&self, v: usize, c: u32) -> BoundaryCondition {
        let mut out = self.clone();
        out.set(v, c);
        out
    }

    pub fn unset(&mut self, v: usize) {
        self.assign.remove(&v);
    }

    pub fn color(&self, v: usize) -> Option<u32> {
        self.assign.get(&v).copied()
    }

    pub fn is_assigned(&self, v: usize) -> bool {
        self.assign.contains_key(&v)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.assign.iter().map(|(&v, &c)| (v, c))
    }

    pub fn len(&self) -> usize {
        self.assign.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assign.is_empty()
    }

    /// Keeps only assignments whose vertex satisfies the predicate.
    pub fn filtered(&self, keep: impl Fn(usize) -> bool) -> BoundaryCondition {
        BoundaryCondition {
            assign: self.iter().filter(|&(v, _)| keep(v)).collect(),
        }
    }

    /// Rewrites vertex ids; assignments whose vertex maps to `None` must not
    /// exist (callers delete only vertices they have checked are unassigned
    /// or whose assignment they intend to drop explicitly).
    pub fn remapped(&self, map: impl Fn(usize) -> Option<usize>) -> BoundaryCondition {
        BoundaryCondition {
            assign: self
                .iter()
                .filter_map(|(v, c)| map(v).map(|nv| (nv, c)))
                .collect(),
        }
    }
}

/// Per-color conditional probabilities at one vertex, ordered by color.
#[derive(Clone, Debug, PartialEq)]
pub struct MarginalVector {
    pub vertex: usize,
    pub colors: Vec<u32>,
    pub probs: Vec<f64>,
}

impl MarginalVector {
    pub fn prob(&self, color: u32) -> Option<f64> {
        self.colors.iter().position(|&c| c == color).map(|i| self.probs[i])
    }

    pub fn sum(&self) -> f64 {
        self.probs.iter().sum()
    }
}

// ---------------------------------------------------------------------------
// Counting engine
// ---------------------------------------------------------------------------

struct Search<'a> {
    pair: &'a GraphListPair,
    avail: Vec<ColorSet>,
    pending: Vec<bool>,
}

impl<'a> Search<'a> {
    /// Applies the condition. Returns `None` when the condition itself is
    /// inconsistent (color outside a list, or two adjacent assigned vertices
    /// sharing a color), in which case the count is zero.
    fn prepare(pair: &'a GraphListPair, cond: &BoundaryCondition) -> Option<Search<'a>> {
        let n = pair.vertex_count();
        let mut avail: Vec<ColorSet> = (0..n).map(|v| pair.list(v)).collect();
        let mut pending = vec![true; n];
        for (v, c) in cond.iter() {
            debug_assert!(v < n);
            if !pair.list(v).contains(c) {
                return None;
            }
            pending[v] = false;
        }
        for (v, c) in cond.iter() {
            for &w in pair.neighbors(v) {
                if pending[w] {
                    avail[w].remove(c);
                } else if cond.color(w) == Some(c) {
                    return None;
                }
            }
        }
        Some(Search { pair, avail, pending })
    }

    /// Connected components of the pending subgraph restricted to `verts`.
    fn components(&self, verts: &[usize]) -> Vec<Vec<usize>> {
        let mut seen: Vec<bool> = Vec::new();
        let mut index = vec![usize::MAX; self.pair.vertex_count()];
        for (i, &v) in verts.iter().enumerate() {
            index[v] = i;
            seen.push(false);
        }
        let mut out = Vec::new();
        for &start in verts {
            if seen[index[start]] {
                continue;
            }
            let mut comp = Vec::new();
            let mut queue = VecDeque::from([start]);
            seen[index[start]] = true;
            while let Some(u) = queue.pop_front() {
                comp.push(u);
                for &w in self.pair.neighbors(u) {
                    if self.pending[w] && index[w] != usize::MAX && !seen[index[w]] {
                        seen[index[w]] = true;
                        queue.push_back(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    fn count_pending(&mut self) -> BigUint {
        let verts: Vec<usize> = (0..self.pair.vertex_count())
            .filter(|&v| self.pending[v])
            .collect();
        let mut total = BigUint::one();
        for comp in self.components(&verts) {
            let c = self.count_component(&comp);
            if c.is_zero() {
                return BigUint::zero();
            }
            total *= c;
        }
        total
    }

    /// Picks a branching vertex near the component's center so the two (or
    /// more) remainders after deletion are balanced; branching on an endpoint
    /// of a long path would make the search tree as large as the count
    /// itself.
    fn pick_pivot(&self, comp: &[usize]) -> usize {
        if comp.len() <= 2 {
            return comp[0];
        }
        let mut index = vec![usize::MAX; self.pair.vertex_count()];
        for (i, &v) in comp.iter().enumerate() {
            index[v] = i;
        }
        let mut best = comp[0];
        let mut best_ecc = usize::MAX;
        let mut dist = vec![usize::MAX; comp.len()];
        for &s in comp {
            dist.iter_mut().for_each(|d| *d = usize::MAX);
            dist[index[s]] = 0;
            let mut ecc = 0;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                let du = dist[index[u]];
                ecc = ecc.max(du);
                for &w in self.pair.neighbors(u) {
                    if self.pending[w] && index[w] != usize::MAX && dist[index[w]] == usize::MAX {
                        dist[index[w]] = du + 1;
                        queue.push_back(w);
                    }
                }
            }
            if ecc < best_ecc {
                best_ecc = ecc;
                best = s;
            }
        }
        best
    }

    fn count_component(&mut self, comp: &[usize]) -> BigUint {
        for &v in comp {
            if self.avail[v].is_empty() {
                return BigUint::zero();
            }
        }
        if comp.len() == 1 {
            return BigUint::from(self.avail[comp[0]].len());
        }
        let pivot = self.pick_pivot(comp);
        let rest: Vec<usize> = comp.iter().copied().filter(|&v| v != pivot).collect();
        let mut total = BigUint::zero();
        self.pending[pivot] = false;
        for c in self.avail[pivot].to_vec() {
            let mut changed = Vec::new();
            for &w in self.pair.neighbors(pivot) {
                if self.pending[w] && self.avail[w].contains(c) {
                    self.avail[w].remove(c);
                    changed.push(w);
                }
            }
            let mut product = BigUint::one();
            for sub in self.components(&rest) {
                let sc = self.count_component(&sub);
                if sc.is_zero() {
                    product = BigUint::zero();
                    break;
                }
                product *= sc;
            }
            total += product;
            for w in changed {
                self.avail[w].insert(c);
            }
        }
        self.pending[pivot] = true;
        total
    }
}

/// Exact number of proper list colorings of all unassigned vertices
/// consistent with `cond`. Zero is a valid answer (including for conditions
/// that are themselves inconsistent).
pub fn count_colorings(pair: &GraphListPair, cond: &BoundaryCondition) -> Result<BigUint, OracleError> {
    for (v, _) in cond.iter() {
        pair.check_vertex(v)?;
    }
    match Search::prepare(pair, cond) {
        None => Ok(BigUint::zero()),
        Some(mut search) => Ok(search.count_pending()),
    }
}

pub fn is_colorable(pair: &GraphListPair, cond: &BoundaryCondition) -> Result<bool, OracleError> {
    Ok(!count_colorings(pair, cond)?.is_zero())
}

/// Counts indexed by a joint assignment of `targets`: one table entry per
/// element of the product of the targets' lists. A single search pass
/// produces every entry, which is how marginal vectors and restricted TV
/// sums stay cheap.
pub struct JointCounts {
    targets: Vec<usize>,
    colors: Vec<Vec<u32>>,
    strides: Vec<usize>,
    table: Vec<BigUint>,
    total: BigUint,
}

impl JointCounts {
    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    /// The target's list, ascending; assignment tuples index into these.
    pub fn colors_of(&self, k: usize) -> &[u32] {
        &self.colors[k]
    }

    pub fn total(&self) -> &BigUint {
        &self.total
    }

    pub fn get(&self, assignment: &[u32]) -> BigUint {
        match self.index_of(assignment) {
            Some(i) => self.table[i].clone(),
            None => BigUint::zero(),
        }
    }

    fn index_of(&self, assignment: &[u32]) -> Option<usize> {
        debug_assert_eq!(assignment.len(), self.targets.len());
        let mut idx = 0;
        for (k, &c) in assignment.iter().enumerate() {
            let pos = self.colors[k].iter().position(|&x| x == c)?;
            idx += pos * self.strides[k];
        }
        Some(idx)
    }

    /// Iterates `(assignment, count)` over the whole table in mixed-radix
    /// order (last target varies fastest).
    pub fn iter(&self) -> impl Iterator<Item = (Vec<u32>, &BigUint)> + '_ {
        (0..self.table.len()).map(move |idx| {
            let mut rem = idx;
            let mut assignment = vec![0u32; self.colors.len()];
            for k in (0..self.colors.len()).rev() {
                let radix = self.colors[k].len();
                assignment[k] = self.colors[k][rem % radix];
                rem /= radix;
            }
            (assignment, &self.table[idx])
        })
    }
}

/// One search pass tallying `Z(cond + targets := tuple)` for every tuple in
/// the product of the targets' lists. Targets must be distinct, in range and
/// unassigned.
pub fn count_joint(
    pair: &GraphListPair,
    cond: &BoundaryCondition,
    targets: &[usize],
) -> Result<JointCounts, OracleError> {
    for (v, _) in cond.iter() {
        pair.check_vertex(v)?;
    }
    for (i, &t) in targets.iter().enumerate() {
        pair.check_vertex(t)?;
        if cond.is_assigned(t) {
            return Err(OracleError::VertexAssigned(t));
        }
        if targets[..i].contains(&t) {
            return Err(OracleError::VertexAssigned(t));
        }
    }
    let colors: Vec<Vec<u32>> = targets.iter().map(|&t| pair.list(t).to_vec()).collect();
    let mut strides = vec![1usize; targets.len()];
    for k in (0..targets.len().saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * colors[k + 1].len();
    }
    let size: usize = colors.iter().map(Vec::len).product();
    let mut table = vec![BigUint::zero(); size.max(1)];

    match Search::prepare(pair, cond) {
        None => {}
        Some(mut search) => {
            fn descend(
                search: &mut Search<'_>,
                targets: &[usize],
                colors: &[Vec<u32>],
                strides: &[usize],
                k: usize,
                idx: usize,
                table: &mut [BigUint],
            ) {
                if k == targets.len() {
                    table[idx] = search.count_pending();
                    return;
                }
                let t = targets[k];
                search.pending[t] = false;
                for (pos, &c) in colors[k].iter().enumerate() {
                    if !search.avail[t].contains(c) {
                        continue;
                    }
                    let mut changed = Vec::new();
                    for &w in search.pair.neighbors(t) {
                        if search.pending[w] && search.avail[w].contains(c) {
                            search.avail[w].remove(c);
                            changed.push(w);
                        }
                    }
                    descend(search, targets, colors, strides, k + 1, idx + pos * strides[k], table);
                    for w in changed {
                        search.avail[w].insert(c);
                    }
                }
                search.pending[t] = true;
            }
            descend(&mut search, targets, &colors, &strides, 0, 0, &mut table);
        }
    }

    let mut total = BigUint::zero();
    for entry in &table {
        total += entry;
    }
    Ok(JointCounts { targets: targets.to_vec(), colors, strides, table, total })
}

pub(crate) fn big_ratio(num: &BigUint, den: &BigUint) -> BigRational {
    BigRational::new(BigInt::from(num.clone()), BigInt::from(den.clone()))
}

pub(crate) fn ratio_to_f64(r: &BigRational) -> f64 {
    r.to_f64().expect("ratio of finite counts")
}

/// `P(c(v) = j | cond)` as an exact ratio of counts.
///
/// `v` must be unassigned and the condition colorable; querying a color
/// outside `L(v)` returns zero.
pub fn marginal_exact(
    pair: &GraphListPair,
    cond: &BoundaryCondition,
    v: usize,
    j: u32,
) -> Result<BigRational, OracleError> {
    let joint = count_joint(pair, cond, &[v])?;
    if joint.total().is_zero() {
        return Err(OracleError::UncolorableRegion);
    }
    if !pair.list(v).contains(j) {
        return Ok(BigRational::zero());
    }
    Ok(big_ratio(&joint.get(&[j]), joint.total()))
}

pub fn marginal(
    pair: &GraphListPair,
    cond: &BoundaryCondition,
    v: usize,
    j: u32,
) -> Result<f64, OracleError> {
    Ok(ratio_to_f64(&marginal_exact(pair, cond, v, j)?))
}

pub fn marginal_vector_exact(
    pair: &GraphListPair,
    cond: &BoundaryCondition,
    v: usize,
) -> Result<Vec<(u32, BigRational)>, OracleError> {
    let joint = count_joint(pair, cond, &[v])?;
    if joint.total().is_zero() {
        return Err(OracleError::UncolorableRegion);
    }
    Ok(joint
        .colors_of(0)
        .iter()
        .map(|&c| (c, big_ratio(&joint.get(&[c]), joint.total())))
        .collect())
}

pub fn marginal_vector(
    pair: &GraphListPair,
    cond: &BoundaryCondition,
    v: usize,
) -> Result<MarginalVector, OracleError> {
    let exact = marginal_vector_exact(pair, cond, v)?;
    Ok(MarginalVector {
        vertex: v,
        colors: exact.iter().map(|&(c, _)| c).collect(),
        probs: exact.iter().map(|(_, p)| ratio_to_f64(p)).collect(),
    })
}

/// Total variation distance between the distributions induced on the
/// colorings of `lambda` by two conditions: `sum_sigma |P(sigma|c1) -
/// P(sigma|c2)|`, so the range is `[0, 2]`.
///
/// Both conditions must assign vertices outside `psi` only, and `lambda`
/// must lie inside `psi`.
pub fn tv_distance_restricted(
    pair: &GraphListPair,
    psi: &Region,
    c1: &BoundaryCondition,
    c2: &BoundaryCondition,
    lambda: &[usize],
) -> Result<f64, OracleError> {
    for cond in [c1, c2] {
        for (v, _) in cond.iter() {
            pair.check_vertex(v)?;
            if psi.contains(v) {
                return Err(OracleError::ConditionInsideRegion(v));
            }
        }
    }
    for &v in lambda {
        pair.check_vertex(v)?;
        if !psi.contains(v) {
            return Err(OracleError::OutsideRegion(v));
        }
    }
    if lambda.is_empty() {
        // Both conditions must still be colorable for the distributions to
        // exist; the single empty outcome then has probability 1 under each.
        for cond in [c1, c2] {
            if count_colorings(pair, cond)?.is_zero() {
                return Err(OracleError::UncolorableRegion);
            }
        }
        return Ok(0.0);
    }
    let j1 = count_joint(pair, c1, lambda)?;
    let j2 = count_joint(pair, c2, lambda)?;
    if j1.total().is_zero() || j2.total().is_zero() {
        return Err(OracleError::UncolorableRegion);
    }
    let mut tv = BigRational::zero();
    for (assignment, count1) in j1.iter() {
        let p1 = big_ratio(count1, j1.total());
        let p2 = big_ratio(&j2.get(&assignment), j2.total());
        let diff = p1 - p2;
        if diff < BigRational::zero() {
            tv -= diff;
        } else {
            tv += diff;
        }
    }
    Ok(ratio_to_f64(&tv))
}
