//! Seeded decay-measurement experiments: draw pairs of random boundary
//! conditions, measure the worst per-color marginal ratio deviation at a
//! vertex, and record it against the relevant distance. Weak mixing lets the
//! whole boundary differ; strong mixing pins everything except a chosen
//! disagreement set.

use num::Zero;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graph::{Distance, GraphListPair, Region};
use crate::oracle::{self, marginal_vector_exact, BoundaryCondition};

use super::checks::strip_near_boundary;
use super::envelope::{theoretical_envelope, Envelope};
use super::LabError;

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub alpha: f64,
    pub beta: f64,
    pub samples: usize,
    pub seed: u64,
    /// Probability that a vertex outside the region stays free.
    pub free_probability: f64,
    /// Draw attempts per sample before giving up.
    pub max_attempts: usize,
    /// For strong-mixing runs: route each sample through the
    /// boundary-stripping reduction and require exact marginal equality.
    pub check_strip: bool,
    /// Label recorded in samples and CSV; derived from the instance when
    /// empty.
    pub label: Option<String>,
}

impl Default for ExperimentConfig {
    fn default() -> ExperimentConfig {
        ExperimentConfig {
            alpha: 2.0,
            beta: 10.0,
            samples: 50,
            seed: 0,
            free_probability: 0.2,
            max_attempts: 10_000,
            check_strip: false,
            label: None,
        }
    }
}

/// One observation: the distance the theorem cares about and the worst
/// per-color ratio deviation observed for one pair of conditions.
#[derive(Clone, Debug, PartialEq)]
pub struct DecaySample {
    pub distance: usize,
    pub epsilon: f64,
    pub instance: String,
    pub sample_index: usize,
}

#[derive(Clone, Debug)]
pub struct ExperimentRun {
    pub instance: String,
    pub seed: u64,
    pub distance: usize,
    pub samples: Vec<DecaySample>,
    /// Draws whose conditions admitted no coloring.
    pub rejected_uncolorable: usize,
    /// Draws where some color's marginal vanished under exactly one of the
    /// two conditions, making the two-sided ratio deviation undefined.
    pub rejected_degenerate: usize,
    pub envelope: Envelope,
}

impl ExperimentRun {
    pub fn max_epsilon(&self) -> f64 {
        self.samples.iter().map(|s| s.epsilon).fold(0.0, f64::max)
    }
}

fn draw_condition(
    pair: &GraphListPair,
    vertices: &[usize],
    free_probability: f64,
    rng: &mut ChaCha8Rng,
) -> BoundaryCondition {
    let mut cond = BoundaryCondition::empty();
    for &u in vertices {
        if rng.random_bool(free_probability) {
            continue;
        }
        let colors = pair.list(u).to_vec();
        cond.set(u, colors[rng.random_range(0..colors.len())]);
    }
    cond
}

/// Redraws only the given vertices on top of a base condition.
fn redraw_on(
    pair: &GraphListPair,
    base: &BoundaryCondition,
    vertices: &[usize],
    free_probability: f64,
    rng: &mut ChaCha8Rng,
) -> BoundaryCondition {
    let mut cond = base.clone();
    for &u in vertices {
        cond.unset(u);
        if rng.random_bool(free_probability) {
            continue;
        }
        let colors = pair.list(u).to_vec();
        cond.set(u, colors[rng.random_range(0..colors.len())]);
    }
    cond
}

/// Worst per-color `|x_j / y_j - 1|`. Colors with both marginals zero carry
/// no information and are skipped; a color with exactly one zero marginal
/// has no finite two-sided deviation and rejects the draw.
fn ratio_deviation(xs: &[(u32, num::BigRational)], ys: &[(u32, num::BigRational)]) -> Option<f64> {
    let mut worst = 0.0f64;
    for ((_, x), (_, y)) in xs.iter().zip(ys) {
        match (x.is_zero(), y.is_zero()) {
            (true, true) => continue,
            (true, false) | (false, true) => return None,
            (false, false) => {
                let ratio = oracle::ratio_to_f64(&(x.clone() / y.clone()));
                worst = worst.max((ratio - 1.0).abs());
            }
        }
    }
    Some(worst)
}

fn finite_distance(pair: &GraphListPair, v: usize, set: &[usize]) -> Result<usize, LabError> {
    match pair.distance_sets(&[v], set)? {
        Distance::Finite(d) => Ok(d),
        Distance::Infinite => Err(LabError::InfiniteDistance(v)),
    }
}

/// Weak-mixing measurement: both conditions are drawn independently on all
/// of the region's complement; the distance recorded is `d(v, boundary)`.
/// Deterministic for a given seed: sample `i` uses stream `i` of the seeded
/// generator, independent of evaluation order.
pub fn wsm_experiment(
    pair: &GraphListPair,
    psi: &Region,
    v: usize,
    config: &ExperimentConfig,
) -> Result<ExperimentRun, LabError> {
    pair.check_vertex(v)?;
    if !psi.contains(v) {
        return Err(LabError::VertexNotInRegion(v));
    }
    let envelope = theoretical_envelope(pair, config.alpha, config.beta)?;
    let boundary = psi.boundary(pair)?;
    let distance = finite_distance(pair, v, &boundary)?;
    let outside = psi.complement(pair);
    let instance = config
        .label
        .clone()
        .unwrap_or_else(|| format!("wsm-n{}-v{v}-d{distance}", pair.vertex_count()));

    let mut samples = Vec::with_capacity(config.samples);
    let mut rejected_uncolorable = 0;
    let mut rejected_degenerate = 0;
    for sample_index in 0..config.samples {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(sample_index as u64);
        let mut accepted = false;
        for _ in 0..config.max_attempts {
            let c1 = draw_condition(pair, &outside, config.free_probability, &mut rng);
            let c2 = draw_condition(pair, &outside, config.free_probability, &mut rng);
            if !oracle::is_colorable(pair, &c1)? || !oracle::is_colorable(pair, &c2)? {
                rejected_uncolorable += 1;
                continue;
            }
            let xs = marginal_vector_exact(pair, &c1, v)?;
            let ys = marginal_vector_exact(pair, &c2, v)?;
            match ratio_deviation(&xs, &ys) {
                Some(epsilon) => {
                    samples.push(DecaySample {
                        distance,
                        epsilon,
                        instance: instance.clone(),
                        sample_index,
                    });
                    accepted = true;
                    break;
                }
                None => rejected_degenerate += 1,
            }
        }
        if !accepted {
            return Err(LabError::SamplingExhausted(config.max_attempts));
        }
    }

    Ok(ExperimentRun {
        instance,
        seed: config.seed,
        distance,
        samples,
        rejected_uncolorable,
        rejected_degenerate,
        envelope,
    })
}

/// Strong-mixing measurement: the two conditions agree outside the
/// disagreement set `w` (a subset of the boundary) and differ only on it;
/// the distance recorded is `d(v, w)`. With `check_strip` set, boundary
/// vertices nearer than that distance are always assigned, each sample is
/// routed through the stripping reduction, and the marginal at `v` must
/// survive it exactly.
pub fn ssm_experiment(
    pair: &GraphListPair,
    psi: &Region,
    v: usize,
    w: &[usize],
    config: &ExperimentConfig,
) -> Result<ExperimentRun, LabError> {
    pair.check_vertex(v)?;
    if !psi.contains(v) {
        return Err(LabError::VertexNotInRegion(v));
    }
    let envelope = theoretical_envelope(pair, config.alpha, config.beta)?;
    let boundary = psi.boundary(pair)?;
    if w.is_empty() || !w.iter().all(|u| boundary.contains(u)) {
        return Err(LabError::BadDisagreementSet);
    }
    let distance = finite_distance(pair, v, w)?;
    let outside = psi.complement(pair);
    let (near, far): (Vec<usize>, Vec<usize>) = {
        let dist = pair.distances_from_set(&[v])?;
        outside.iter().partition(|&&u| {
            boundary.binary_search(&u).is_ok()
                && dist[u].finite().is_some_and(|x| x < distance)
        })
    };
    let instance = config
        .label
        .clone()
        .unwrap_or_else(|| format!("ssm-n{}-v{v}-d{distance}", pair.vertex_count()));

    let mut samples = Vec::with_capacity(config.samples);
    let mut rejected_uncolorable = 0;
    let mut rejected_degenerate = 0;
    for sample_index in 0..config.samples {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(sample_index as u64);
        let mut accepted = false;
        for _ in 0..config.max_attempts {
            // the agreeing part: near-boundary vertices must be assigned
            // when each sample is checked against the stripping reduction
            let mut c1 = draw_condition(pair, &far, config.free_probability, &mut rng);
            let near_free = if config.check_strip { 0.0 } else { config.free_probability };
            for (u, c) in draw_condition(pair, &near, near_free, &mut rng).iter() {
                c1.set(u, c);
            }
            let c2 = redraw_on(pair, &c1, w, config.free_probability, &mut rng);
            if !oracle::is_colorable(pair, &c1)? || !oracle::is_colorable(pair, &c2)? {
                rejected_uncolorable += 1;
                continue;
            }
            let xs = marginal_vector_exact(pair, &c1, v)?;
            let ys = marginal_vector_exact(pair, &c2, v)?;
            let Some(epsilon) = ratio_deviation(&xs, &ys) else {
                rejected_degenerate += 1;
                continue;
            };
            if config.check_strip {
                // stripping may drop a color from L(v) itself; the dropped
                // color had probability zero, so compare per color
                let stripped = strip_near_boundary(pair, psi, v, &c1, distance)?;
                let nv = stripped.new_id(v).expect("v survives the strip");
                for (cond, original) in [(&c1, &xs), (&c2, &ys)] {
                    let mapped = stripped.map_condition(cond);
                    let after = marginal_vector_exact(&stripped.pair, &mapped, nv)?;
                    for (color, prob) in original {
                        let stripped_prob = after
                            .iter()
                            .find(|(c, _)| c == color)
                            .map(|(_, p)| p.clone())
                            .unwrap_or_else(num::BigRational::zero);
                        if *prob != stripped_prob {
                            return Err(LabError::StripMismatch(v));
                        }
                    }
                }
            }
            samples.push(DecaySample {
                distance,
                epsilon,
                instance: instance.clone(),
                sample_index,
            });
            accepted = true;
            break;
        }
        if !accepted {
            return Err(LabError::SamplingExhausted(config.max_attempts));
        }
    }

    Ok(ExperimentRun {
        instance,
        seed: config.seed,
        distance,
        samples,
        rejected_uncolorable,
        rejected_degenerate,
        envelope,
    })
}

/// Renders runs as CSV with a fixed header; floats use the shortest exact
/// decimal form, so identical runs serialize byte-identically.
pub fn render_csv(runs: &[ExperimentRun]) -> String {
    let mut out = String::from("distance,epsilon_observed,epsilon_envelope,instance_id,seed\n");
    for run in runs {
        for s in &run.samples {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                s.distance,
                s.epsilon,
                run.envelope.bound(s.distance),
                s.instance,
                run.seed
            ));
        }
    }
    out
}
