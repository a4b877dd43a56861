//! The theoretical decay envelope derived from the instance constants, and
//! the least-squares fit of observed decay samples.

use crate::assumption::check_assumption;
use crate::graph::GraphListPair;

use super::experiment::DecaySample;
use super::LabError;

/// Samples at or below this floor are excluded from fits; they are
/// indistinguishable from accumulated rounding.
pub const EPSILON_FLOOR: f64 = 1e-14;

/// Cap on the search for the crossover depth `d0`.
pub const D0_SEARCH_LIMIT: usize = 1_000_000;

/// Theoretical decay envelope `epsilon(d) = B * exp(-gamma * d)` valid for
/// instances satisfying the list-size hypothesis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Envelope {
    pub epsilon: f64,
    /// `F = 2 * Delta * (ln q - Delta * ln(1 - 1/beta))`.
    pub f_const: f64,
    /// `gamma = -ln(1 - epsilon)`.
    pub gamma: f64,
    /// Smallest nonnegative integer with
    /// `exp(F (1-eps)^d0) <= 1 + 2 F (1-eps)^d0`.
    pub d0: usize,
    /// `B = max(exp(F + gamma * d0), 2 F)`.
    pub b_const: f64,
}

impl Envelope {
    pub fn bound(&self, distance: usize) -> f64 {
        self.b_const * (-self.gamma * distance as f64).exp()
    }
}

pub fn theoretical_envelope(
    pair: &GraphListPair,
    alpha: f64,
    beta: f64,
) -> Result<Envelope, LabError> {
    let report = check_assumption(pair, alpha, beta);
    if !report.satisfied {
        return Err(LabError::AssumptionNotSatisfied(report.failures));
    }
    let epsilon = report.epsilon.expect("satisfied implies epsilon");
    let delta = pair.max_degree() as f64;
    let q = pair.palette() as f64;
    let f_const = 2.0 * delta * (q.ln() - delta * (1.0 - 1.0 / beta).ln());
    let gamma = -(1.0 - epsilon).ln();
    let mut d0 = 0usize;
    loop {
        let t = f_const * (1.0 - epsilon).powi(d0 as i32);
        if t.exp() <= 1.0 + 2.0 * t {
            break;
        }
        d0 += 1;
        if d0 > D0_SEARCH_LIMIT {
            return Err(LabError::EnvelopeSearchFailed(D0_SEARCH_LIMIT));
        }
    }
    let b_const = (f_const + gamma * d0 as f64).exp().max(2.0 * f_const);
    Ok(Envelope { epsilon, f_const, gamma, d0, b_const })
}

/// Least-squares exponential envelope fitted to observed samples.
#[derive(Clone, Debug)]
pub struct DecayFit {
    /// Fitted amplitude `B`.
    pub b: f64,
    /// Fitted rate; positive means the observations decay with distance.
    pub gamma: f64,
    /// Root-mean-square residual of `ln(epsilon)` against the fitted line.
    pub residual: f64,
    pub used_samples: usize,
    /// Theoretical counterpart, when the hypothesis holds for the instance.
    pub envelope: Option<Envelope>,
}

impl DecayFit {
    pub fn with_envelope(mut self, envelope: Envelope) -> DecayFit {
        self.envelope = Some(envelope);
        self
    }
}

/// Fits `ln(epsilon) = ln(B) - gamma * d` by least squares over samples
/// above [`EPSILON_FLOOR`]. Needs two such samples at two distinct
/// distances.
pub fn fit_decay(samples: &[DecaySample]) -> Result<DecayFit, LabError> {
    let points: Vec<(f64, f64)> = samples
        .iter()
        .filter(|s| s.epsilon > EPSILON_FLOOR)
        .map(|s| (s.distance as f64, s.epsilon.ln()))
        .collect();
    if points.len() < 2 {
        return Err(LabError::FitUnderdetermined);
    }
    let first = points[0].0;
    if points.iter().all(|&(d, _)| d == first) {
        return Err(LabError::FitUnderdetermined);
    }
    let n = points.len() as f64;
    let mean_x = points.iter().map(|&(x, _)| x).sum::<f64>() / n;
    let mean_y = points.iter().map(|&(_, y)| y).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|&(x, _)| (x - mean_x) * (x - mean_x)).sum();
    let sxy: f64 = points.iter().map(|&(x, y)| (x - mean_x) * (y - mean_y)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let residual = (points
        .iter()
        .map(|&(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(DecayFit {
        b: intercept.exp(),
        gamma: -slope,
        residual,
        used_samples: points.len(),
        envelope: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphListPair;

    fn sample(distance: usize, epsilon: f64) -> DecaySample {
        DecaySample { distance, epsilon, instance: "synthetic".into(), sample_index: 0 }
    }

    #[test]
    fn envelope_reference_values() {
        // path with interior degree 2, lists of size >= 14 from a 15-color
        // palette, alpha = 2, beta = 10
        let n = 5;
        let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
        let lists: Vec<Vec<u32>> = vec![(1..=15).collect(); n];
        let pair = GraphListPair::new(n, &edges, lists).unwrap();
        let env = theoretical_envelope(&pair, 2.0, 10.0).unwrap();
        assert!((env.epsilon - 0.03708165674033598).abs() < 1e-12);
        assert!((env.f_const - 11.675084929671451).abs() < 1e-9);
        assert!((env.gamma - 0.03778666490211901).abs() < 1e-12);
        assert_eq!(env.d0, 59);
        assert!((env.b_const - 1093067.1032291825).abs() < 1e-3);
        assert!(env.bound(1) < env.bound(0));
    }

    #[test]
    fn envelope_requires_the_hypothesis() {
        let pair = GraphListPair::new(2, &[(0, 1)], vec![vec![1, 2], vec![1, 2]]).unwrap();
        assert!(matches!(
            theoretical_envelope(&pair, 2.0, 10.0),
            Err(LabError::AssumptionNotSatisfied(_))
        ));
    }

    #[test]
    fn fit_recovers_exact_exponential() {
        let samples: Vec<DecaySample> =
            (1..=6).map(|d| sample(d, (-(d as f64)).exp())).collect();
        let fit = fit_decay(&samples).unwrap();
        assert!((fit.gamma - 1.0).abs() < 1e-9);
        assert!((fit.b - 1.0).abs() < 1e-9);
        assert!(fit.residual < 1e-12);
    }

    #[test]
    fn fit_constant_samples_has_zero_rate() {
        let samples: Vec<DecaySample> = (1..=4).map(|d| sample(d, 0.25)).collect();
        let fit = fit_decay(&samples).unwrap();
        assert!(fit.gamma.abs() < 1e-12);
        assert!((fit.b - 0.25).abs() < 1e-12);
    }

    #[test]
    fn fit_rejects_underdetermined_input() {
        assert!(matches!(fit_decay(&[]), Err(LabError::FitUnderdetermined)));
        let only_floor = vec![sample(1, 0.0), sample(2, 1e-15)];
        assert!(matches!(fit_decay(&only_floor), Err(LabError::FitUnderdetermined)));
        let one_distance = vec![sample(3, 0.1), sample(3, 0.2)];
        assert!(matches!(fit_decay(&one_distance), Err(LabError::FitUnderdetermined)));
    }
}
