//! The list-size hypothesis and its derived constants: the threshold root
//! `alpha*`, the minimum `beta`, the contraction product, the contraction
//! rate `epsilon`, and the per-instance validator.

use std::fmt;

use thiserror::Error;

use crate::graph::GraphListPair;

/// Tolerance of the `alpha*` root solve.
pub const ALPHA_STAR_TOL: f64 = 1e-12;

/// The unique root of `x * exp(-1/x) = 1`, ~1.7632, found by bisection on
/// `[1, 3]` where the function is monotone increasing.
pub fn alpha_star() -> f64 {
    let f = |x: f64| x * (-1.0 / x).exp() - 1.0;
    let (mut lo, mut hi) = (1.0f64, 3.0f64);
    debug_assert!(f(lo) < 0.0 && f(hi) > 0.0);
    while hi - lo > ALPHA_STAR_TOL / 2.0 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Smallest admissible `beta`: `sqrt(2)/(sqrt(2)-1) = 2 + sqrt(2)`.
pub fn beta_min() -> f64 {
    2.0 + std::f64::consts::SQRT_2
}

/// The contraction product `(1 - 1/beta) * alpha * exp(-(1 + 1/beta)/alpha)`.
/// The hypothesis requires it to exceed 1.
pub fn contraction_product(alpha: f64, beta: f64) -> f64 {
    (1.0 - 1.0 / beta) * alpha * (-(1.0 + 1.0 / beta) / alpha).exp()
}

#[derive(Debug, Error, PartialEq)]
pub enum AssumptionError {
    #[error("contraction product {0} is not greater than 1; epsilon undefined")]
    NotContractive(f64),
}

/// The per-level shrink rate: `epsilon` with
/// `1 - epsilon = 1 / contraction_product(alpha, beta)`.
///
/// Defined only when the product exceeds 1, in which case the result lies
/// strictly in `(0, 1)`.
pub fn epsilon_of(alpha: f64, beta: f64) -> Result<f64, AssumptionError> {
    let p = contraction_product(alpha, beta);
    if p <= 1.0 {
        return Err(AssumptionError::NotContractive(p));
    }
    Ok(1.0 - 1.0 / p)
}

/// A reason the hypothesis fails on a concrete instance.
#[derive(Debug, Clone, PartialEq)]
pub enum AssumptionFailure {
    ContainsTriangle { witness: (usize, usize, usize) },
    AlphaTooSmall { alpha: f64, threshold: f64 },
    BetaTooSmall { beta: f64, threshold: f64 },
    NotContractive { product: f64 },
    ListTooSmall { vertex: usize, size: usize, required: f64 },
}

impl fmt::Display for AssumptionFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AssumptionFailure::ContainsTriangle { witness: (u, v, w) } => {
                write!(f, "graph contains triangle {u}-{v}-{w}")
            }
            AssumptionFailure::AlphaTooSmall { alpha, threshold } => {
                write!(f, "alpha {alpha} <= alpha* {threshold:.6}")
            }
            AssumptionFailure::BetaTooSmall { beta, threshold } => {
                write!(f, "beta {beta} < {threshold:.6}")
            }
            AssumptionFailure::NotContractive { product } => {
                write!(f, "contraction product {product:.6} <= 1")
            }
            AssumptionFailure::ListTooSmall { vertex, size, required } => {
                write!(f, "vertex {vertex}: list size {size} < {required:.3}")
            }
        }
    }
}

/// Validation verdict for the list-size hypothesis on one instance.
#[derive(Debug, Clone)]
pub struct AssumptionReport {
    pub alpha: f64,
    pub beta: f64,
    pub satisfied: bool,
    /// Present iff satisfied; strictly inside `(0, 1)` when present.
    pub epsilon: Option<f64>,
    /// `|L(v)| - (alpha * deg(v) + beta)` per vertex, negative where violated.
    pub slack: Vec<f64>,
    pub failures: Vec<AssumptionFailure>,
}

impl AssumptionReport {
    pub fn worst_slack(&self) -> f64 {
        self.slack.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

impl fmt::Display for AssumptionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "assumption alpha={} beta={}: {}",
            self.alpha,
            self.beta,
            if self.satisfied { "satisfied" } else { "NOT satisfied" }
        )?;
        if let Some(eps) = self.epsilon {
            writeln!(f, "  epsilon = {eps}")?;
        }
        if !self.slack.is_empty() {
            writeln!(f, "  worst list slack = {}", self.worst_slack())?;
        }
        for failure in &self.failures {
            writeln!(f, "  fail: {failure}")?;
        }
        Ok(())
    }
}

/// Checks every clause of the hypothesis on `pair`: triangle-freeness,
/// `alpha > alpha*`, `beta >= 2 + sqrt(2)`, contraction product above 1, and
/// `|L(v)| >= alpha * deg(v) + beta` for every vertex. Failures are reported,
/// never thrown.
pub fn check_assumption(pair: &GraphListPair, alpha: f64, beta: f64) -> AssumptionReport {
    let mut failures = Vec::new();

    if let Some(witness) = pair.triangle_witness() {
        failures.push(AssumptionFailure::ContainsTriangle { witness });
    }
    let threshold = alpha_star();
    if alpha <= threshold {
        failures.push(AssumptionFailure::AlphaTooSmall { alpha, threshold });
    }
    if beta < beta_min() {
        failures.push(AssumptionFailure::BetaTooSmall { beta, threshold: beta_min() });
    }
    let product = contraction_product(alpha, beta);
    if product <= 1.0 {
        failures.push(AssumptionFailure::NotContractive { product });
    }

    let mut slack = Vec::with_capacity(pair.vertex_count());
    for v in pair.vertices() {
        let required = alpha * pair.degree(v) as f64 + beta;
        let s = pair.list_size(v) as f64 - required;
        if s < 0.0 {
            failures.push(AssumptionFailure::ListTooSmall {
                vertex: v,
                size: pair.list_size(v),
                required,
            });
        }
        slack.push(s);
    }

    let satisfied = failures.is_empty();
    let epsilon = if satisfied {
        Some(epsilon_of(alpha, beta).expect("contraction product checked above"))
    } else {
        None
    };
    AssumptionReport { alpha, beta, satisfied, epsilon, slack, failures }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphListPair;

    fn star(leaves: usize, list: &[u32]) -> GraphListPair {
        let edges: Vec<_> = (1..=leaves).map(|i| (0, i)).collect();
        GraphListPair::new(leaves + 1, &edges, vec![list.to_vec(); leaves + 1]).unwrap()
    }

    #[test]
    fn alpha_star_root() {
        let x = alpha_star();
        assert!((x * (-1.0 / x).exp() - 1.0).abs() <= 1e-12);
        assert!((x - 1.7632228343518968).abs() < 1e-9);
        // three decimals, as commonly quoted
        assert_eq!(format!("{:.3}", x), "1.763");
    }

    #[test]
    fn beta_min_value() {
        // sqrt(2)/(sqrt(2)-1) rationalizes to 2 + sqrt(2)
        let direct = 2f64.sqrt() / (2f64.sqrt() - 1.0);
        assert!((beta_min() - direct).abs() < 1e-12);
        assert!((beta_min() - 3.414213562373095).abs() < 1e-12);
    }

    #[test]
    fn epsilon_of_reference_values() {
        // (1 - 1/10) * 2 * exp(-0.55) = 1.038509658...
        assert!((contraction_product(2.0, 10.0) - 1.038509658684876).abs() < 1e-12);
        let eps = epsilon_of(2.0, 10.0).unwrap();
        assert!((eps - 0.03708165674033598).abs() < 1e-12);
        assert!(eps > 0.0 && eps < 1.0);
    }

    #[test]
    fn epsilon_of_domain_error() {
        // (1 - 1/4) * 2 * exp(-0.625) = 0.8028921... < 1
        let p = contraction_product(2.0, 4.0);
        assert!((p - 0.8028921427784854).abs() < 1e-12);
        assert_eq!(epsilon_of(2.0, 4.0), Err(AssumptionError::NotContractive(p)));
    }

    #[test]
    fn epsilon_near_zero_when_product_near_one() {
        // pick beta so the product barely exceeds 1
        let alpha = 1.83;
        let mut beta = beta_min();
        while contraction_product(alpha, beta) <= 1.0 {
            beta += 0.05;
        }
        let eps = epsilon_of(alpha, beta).unwrap();
        assert!(eps > 0.0 && eps < 0.2);
    }

    #[test]
    fn star_satisfied_with_large_lists() {
        let lists: Vec<u32> = (1..=15).collect();
        let g = star(2, &lists);
        let report = check_assumption(&g, 2.0, 10.0);
        assert!(report.satisfied, "{report}");
        assert!((report.epsilon.unwrap() - 0.03708165674033598).abs() < 1e-12);
        // center: 15 - (2*2 + 10) = 1
        assert!((report.slack[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn star_not_satisfied_when_product_below_one() {
        // beta = 4 passes the beta >= 2+sqrt(2) clause but the product is
        // 0.8029 < 1, so the instance is rejected for that reason alone.
        let lists: Vec<u32> = (1..=15).collect();
        let g = star(2, &lists);
        let report = check_assumption(&g, 2.0, 4.0);
        assert!(!report.satisfied);
        assert!(report.epsilon.is_none());
        assert_eq!(report.failures.len(), 1);
        assert!(matches!(report.failures[0], AssumptionFailure::NotContractive { .. }));
    }

    #[test]
    fn triangle_rejected() {
        let g = GraphListPair::new(
            3,
            &[(0, 1), (1, 2), (0, 2)],
            vec![(1..=20).collect::<Vec<u32>>(); 3],
        )
        .unwrap();
        let report = check_assumption(&g, 2.0, 10.0);
        assert!(!report.satisfied);
        assert!(report
            .failures
            .iter()
            .any(|f| matches!(f, AssumptionFailure::ContainsTriangle { .. })));
    }

    #[test]
    fn list_too_small_lists_vertices() {
        let g = star(3, &[1, 2, 3, 4, 5]);
        let report = check_assumption(&g, 2.0, 10.0);
        assert!(!report.satisfied);
        let small: Vec<usize> = report
            .failures
            .iter()
            .filter_map(|f| match f {
                AssumptionFailure::ListTooSmall { vertex, .. } => Some(*vertex),
                _ => None,
            })
            .collect();
        assert_eq!(small, vec![0, 1, 2, 3]);
    }
}
