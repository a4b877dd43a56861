//! Command-line surface: instance inspection (check/count/marginal/ratio),
//! decay experiments emitting CSV (wsm/ssm), inequality verifiers
//! (bounds/contract/tvscale/corollary), envelope constants, and generators.
//!
//! Exit codes: 0 success or verification pass, 1 verification failure,
//! 2 usage or input errors.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use listmix::{
    bounds_check, check_assumption, contraction_check, count_colorings, generate, is_colorable,
    marginal_recursive, parse_graph, ratio_exact, render_csv, single_point_corollary_check,
    ssm_experiment, theoretical_envelope, tv_scaling_check, wsm_experiment, write_graph,
    BoundaryCondition, Distance, ExperimentConfig, Family, GeneratorSpec, GraphListPair,
    ListPolicy, Region,
};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Parser)]
#[command(
    name = "listmix",
    version,
    about = "List-coloring marginals, contraction checks, and spatial-mixing experiments on triangle-free graphs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Args)]
struct GraphArg {
    /// Instance file in the line-oriented graph text format
    #[arg(long)]
    graph: PathBuf,
}

#[derive(Clone, Args)]
struct HypothesisArgs {
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    beta: f64,
}

#[derive(Clone, Args)]
struct SamplingArgs {
    #[arg(long, default_value_t = 50)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Validate the list-size hypothesis; exit 1 when unsatisfied
    Check {
        #[command(flatten)]
        graph: GraphArg,
        #[command(flatten)]
        hypothesis: HypothesisArgs,
    },
    /// Exact number of proper list colorings
    Count {
        #[command(flatten)]
        graph: GraphArg,
        /// Pin a vertex to a color, e.g. --pin 3=2 (repeatable)
        #[arg(long = "pin", value_parser = parse_pin)]
        pins: Vec<(usize, u32)>,
    },
    /// Conditional marginals at a vertex: exact, or truncated-recursive with --depth
    Marginal {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        vertex: usize,
        /// Report a single color instead of the whole vector
        #[arg(long)]
        color: Option<u32>,
        /// Evaluate by the truncated recursion at this depth
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long = "pin", value_parser = parse_pin)]
        pins: Vec<(usize, u32)>,
    },
    /// Two-color marginal ratio via the telescoping reduction product
    Ratio {
        #[command(flatten)]
        graph: GraphArg,
        #[arg(long)]
        vertex: usize,
        #[arg(long)]
        j1: u32,
        #[arg(long)]
        j2: u32,
        #[arg(long = "pin", value_parser = parse_pin)]
        pins: Vec<(usize, u32)>,
    },
    /// Weak-mixing decay experiment; emits CSV
    Wsm {
        #[command(flatten)]
        graph: GraphArg,
        #[command(flatten)]
        hypothesis: HypothesisArgs,
        #[command(flatten)]
        sampling: SamplingArgs,
        #[arg(long)]
        vertex: usize,
        /// Region is the ball of this radius around the vertex
        #[arg(long)]
        radius: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Strong-mixing decay experiment with a disagreement set; emits CSV
    Ssm {
        #[command(flatten)]
        graph: GraphArg,
        #[command(flatten)]
        hypothesis: HypothesisArgs,
        #[command(flatten)]
        sampling: SamplingArgs,
        #[arg(long)]
        vertex: usize,
        #[arg(long)]
        radius: usize,
        /// Boundary vertices allowed to differ, comma separated
        #[arg(long, value_delimiter = ',', required = true)]
        w: Vec<usize>,
        /// Route every sample through the boundary-stripping reduction
        #[arg(long)]
        strip_check: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Marginal bound verifier over sampled boundary conditions
    Bounds {
        #[command(flatten)]
        graph: GraphArg,
        #[command(flatten)]
        hypothesis: HypothesisArgs,
        #[command(flatten)]
        sampling: SamplingArgs,
        #[arg(long)]
        vertex: usize,
    },
    /// One-level error-functional contraction verifier
    Contract {
        #[command(flatten)]
        graph: GraphArg,
        #[command(flatten)]
        hypothesis: HypothesisArgs,
        #[command(flatten)]
        sampling: SamplingArgs,
        #[arg(long)]
        vertex: usize,
    },
    /// Restricted total-variation scaling verifier
    Tvscale {
        #[command(flatten)]
        graph: GraphArg,
        #[command(flatten)]
        sampling: SamplingArgs,
        #[arg(long, value_delimiter = ',', required = true)]
        psi: Vec<usize>,
        #[arg(long, value_delimiter = ',', required = true)]
        lambda: Vec<usize>,
    },
    /// Single-boundary-vertex total-variation verifier
    Corollary {
        #[command(flatten)]
        graph: GraphArg,
        #[command(flatten)]
        sampling: SamplingArgs,
        #[arg(long, value_delimiter = ',', required = true)]
        psi: Vec<usize>,
        #[arg(long, value_delimiter = ',', required = true)]
        lambda: Vec<usize>,
        #[arg(long)]
        boundary_vertex: usize,
        #[arg(long)]
        j1: u32,
        #[arg(long)]
        j2: u32,
    },
    /// Theoretical decay envelope constants for an instance
    Envelope {
        #[command(flatten)]
        graph: GraphArg,
        #[command(flatten)]
        hypothesis: HypothesisArgs,
    },
    /// Generate a triangle-free instance file
    Gen {
        /// path | cycle | bipartite | tree | grid | random
        #[arg(long)]
        family: String,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        len: Option<usize>,
        #[arg(long)]
        a: Option<usize>,
        #[arg(long)]
        b: Option<usize>,
        #[arg(long)]
        rows: Option<usize>,
        #[arg(long)]
        cols: Option<usize>,
        #[arg(long)]
        proposals: Option<usize>,
        /// Palette size
        #[arg(long, default_value_t = 15)]
        q: u32,
        /// Uniform list size (conflicts with --alpha/--beta)
        #[arg(long)]
        list_size: Option<usize>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_pin(text: &str) -> Result<(usize, u32), String> {
    let (v, c) = text
        .split_once('=')
        .ok_or_else(|| format!("expected vertex=color, got {text:?}"))?;
    let vertex = v.trim().parse().map_err(|_| format!("bad vertex in {text:?}"))?;
    let color = c.trim().parse().map_err(|_| format!("bad color in {text:?}"))?;
    Ok((vertex, color))
}

fn load_graph(arg: &GraphArg) -> Result<GraphListPair> {
    let text = fs::read_to_string(&arg.graph)
        .with_context(|| format!("reading {}", arg.graph.display()))?;
    parse_graph(&text).with_context(|| format!("parsing {}", arg.graph.display()))
}

fn condition_from_pins(pair: &GraphListPair, pins: &[(usize, u32)]) -> Result<BoundaryCondition> {
    BoundaryCondition::checked(pair, pins).map_err(|e| anyhow!("{e}"))
}

fn write_or_print(out: &Option<PathBuf>, content: &str) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, content).with_context(|| format!("writing {}", path.display()))?
        }
        None => print!("{content}"),
    }
    Ok(())
}

/// Vertices at BFS distance at least `k` from `v`.
fn far_vertices(pair: &GraphListPair, v: usize, k: usize) -> Result<Vec<usize>> {
    let dist = pair.distances_from_set(&[v])?;
    Ok(pair
        .vertices()
        .filter(|&u| match dist[u] {
            Distance::Finite(d) => d >= k,
            Distance::Infinite => true,
        })
        .collect())
}

fn sample_colorable_condition(
    pair: &GraphListPair,
    vertices: &[usize],
    assign_probability: f64,
    rng: &mut ChaCha8Rng,
) -> Result<BoundaryCondition> {
    for _ in 0..10_000 {
        let mut cond = BoundaryCondition::empty();
        for &u in vertices {
            if rng.random_bool(assign_probability) {
                let colors = pair.list(u).to_vec();
                cond.set(u, colors[rng.random_range(0..colors.len())]);
            }
        }
        if is_colorable(pair, &cond)? {
            return Ok(cond);
        }
    }
    bail!("could not sample a colorable condition")
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Check { graph, hypothesis } => {
            let pair = load_graph(&graph)?;
            let report = check_assumption(&pair, hypothesis.alpha, hypothesis.beta);
            print!("{report}");
            Ok(report.satisfied)
        }
        Command::Count { graph, pins } => {
            let pair = load_graph(&graph)?;
            let cond = condition_from_pins(&pair, &pins)?;
            println!("{}", count_colorings(&pair, &cond)?);
            Ok(true)
        }
        Command::Marginal { graph, vertex, color, depth, pins } => {
            let pair = load_graph(&graph)?;
            let cond = condition_from_pins(&pair, &pins)?;
            pair.check_vertex(vertex)?;
            let colors: Vec<u32> = match color {
                Some(c) => vec![c],
                None => pair.list(vertex).to_vec(),
            };
            for c in colors {
                let p = match depth {
                    Some(d) => marginal_recursive(&pair, &cond, vertex, c, d)?,
                    None => listmix::marginal(&pair, &cond, vertex, c)?,
                };
                println!("{c} {p}");
            }
            Ok(true)
        }
        Command::Ratio { graph, vertex, j1, j2, pins } => {
            let pair = load_graph(&graph)?;
            let cond = condition_from_pins(&pair, &pins)?;
            println!("{}", ratio_exact(&pair, &cond, vertex, j1, j2)?);
            Ok(true)
        }
        Command::Wsm { graph, hypothesis, sampling, vertex, radius, out } => {
            let pair = load_graph(&graph)?;
            let psi = Region::ball(&pair, vertex, radius)?;
            let config = ExperimentConfig {
                alpha: hypothesis.alpha,
                beta: hypothesis.beta,
                samples: sampling.samples,
                seed: sampling.seed,
                ..ExperimentConfig::default()
            };
            let run = wsm_experiment(&pair, &psi, vertex, &config)?;
            eprintln!(
                "wsm: {} samples at distance {}, rejected {} uncolorable / {} degenerate",
                run.samples.len(),
                run.distance,
                run.rejected_uncolorable,
                run.rejected_degenerate
            );
            write_or_print(&out, &render_csv(&[run]))?;
            Ok(true)
        }
        Command::Ssm { graph, hypothesis, sampling, vertex, radius, w, strip_check, out } => {
            let pair = load_graph(&graph)?;
            let psi = Region::ball(&pair, vertex, radius)?;
            let config = ExperimentConfig {
                alpha: hypothesis.alpha,
                beta: hypothesis.beta,
                samples: sampling.samples,
                seed: sampling.seed,
                check_strip: strip_check,
                ..ExperimentConfig::default()
            };
            let run = ssm_experiment(&pair, &psi, vertex, &w, &config)?;
            eprintln!(
                "ssm: {} samples at distance {}, rejected {} uncolorable / {} degenerate",
                run.samples.len(),
                run.distance,
                run.rejected_uncolorable,
                run.rejected_degenerate
            );
            write_or_print(&out, &render_csv(&[run]))?;
            Ok(true)
        }
        Command::Bounds { graph, hypothesis, sampling, vertex } => {
            let pair = load_graph(&graph)?;
            let far = far_vertices(&pair, vertex, 2)?;
            let mut rng = ChaCha8Rng::seed_from_u64(sampling.seed);
            let mut conditions = Vec::with_capacity(sampling.samples);
            for _ in 0..sampling.samples {
                conditions.push(sample_colorable_condition(&pair, &far, 0.7, &mut rng)?);
            }
            let report =
                bounds_check(&pair, vertex, &conditions, hypothesis.alpha, hypothesis.beta)?;
            print!("{report}");
            Ok(report.passed)
        }
        Command::Contract { graph, hypothesis, sampling, vertex } => {
            let pair = load_graph(&graph)?;
            let far = far_vertices(&pair, vertex, 3)?;
            let mut rng = ChaCha8Rng::seed_from_u64(sampling.seed);
            let mut all_passed = true;
            for _ in 0..sampling.samples {
                let c1 = sample_colorable_condition(&pair, &far, 0.8, &mut rng)?;
                let c2 = sample_colorable_condition(&pair, &far, 0.8, &mut rng)?;
                let report =
                    contraction_check(&pair, vertex, &c1, &c2, hypothesis.alpha, hypothesis.beta)?;
                print!("{report}");
                all_passed &= report.passed;
            }
            Ok(all_passed)
        }
        Command::Tvscale { graph, sampling, psi, lambda } => {
            let pair = load_graph(&graph)?;
            let psi = Region::new(&pair, psi)?;
            let outside = psi.complement(&pair);
            let mut rng = ChaCha8Rng::seed_from_u64(sampling.seed);
            let mut all_passed = true;
            for _ in 0..sampling.samples {
                let c1 = sample_colorable_condition(&pair, &outside, 0.7, &mut rng)?;
                let c2 = sample_colorable_condition(&pair, &outside, 0.7, &mut rng)?;
                let report = tv_scaling_check(&pair, &psi, &lambda, &c1, &c2)?;
                print!("{report}");
                all_passed &= report.passed;
            }
            Ok(all_passed)
        }
        Command::Corollary { graph, sampling, psi, lambda, boundary_vertex, j1, j2 } => {
            let pair = load_graph(&graph)?;
            let psi = Region::new(&pair, psi)?;
            let rest: Vec<usize> = psi
                .complement(&pair)
                .into_iter()
                .filter(|&u| u != boundary_vertex)
                .collect();
            let mut rng = ChaCha8Rng::seed_from_u64(sampling.seed);
            let mut all_passed = true;
            let mut checked = 0;
            for _ in 0..sampling.samples {
                let base = sample_colorable_condition(&pair, &rest, 0.6, &mut rng)?;
                if !is_colorable(&pair, &base.with(boundary_vertex, j1))?
                    || !is_colorable(&pair, &base.with(boundary_vertex, j2))?
                {
                    continue;
                }
                let report = single_point_corollary_check(
                    &pair,
                    &psi,
                    &lambda,
                    &base,
                    boundary_vertex,
                    j1,
                    j2,
                )?;
                print!("{report}");
                all_passed &= report.passed;
                checked += 1;
            }
            if checked == 0 {
                bail!("no colorable configuration for the requested pinnings");
            }
            Ok(all_passed)
        }
        Command::Envelope { graph, hypothesis } => {
            let pair = load_graph(&graph)?;
            let env = theoretical_envelope(&pair, hypothesis.alpha, hypothesis.beta)?;
            println!("epsilon {}", env.epsilon);
            println!("F {}", env.f_const);
            println!("gamma {}", env.gamma);
            println!("d0 {}", env.d0);
            println!("B {}", env.b_const);
            Ok(true)
        }
        Command::Gen {
            family,
            n,
            len,
            a,
            b,
            rows,
            cols,
            proposals,
            q,
            list_size,
            alpha,
            beta,
            seed,
            out,
        } => {
            let need = |name: &str, value: Option<usize>| {
                value.ok_or_else(|| anyhow!("--family {family} requires --{name}"))
            };
            let family = match family.as_str() {
                "path" => Family::Path { n: need("n", n)? },
                "cycle" => Family::Cycle { len: need("len", len)? },
                "bipartite" => Family::CompleteBipartite { a: need("a", a)?, b: need("b", b)? },
                "tree" => Family::RandomTree { n: need("n", n)? },
                "grid" => Family::Grid { rows: need("rows", rows)?, cols: need("cols", cols)? },
                "random" => {
                    let count = need("n", n)?;
                    Family::RandomTriangleFree { n: count, proposals: proposals.unwrap_or(4 * count) }
                }
                other => bail!("unknown family {other:?}"),
            };
            let policy = match (list_size, alpha, beta) {
                (Some(size), None, None) => ListPolicy::Uniform { size },
                (None, Some(alpha), Some(beta)) => ListPolicy::Assumption { alpha, beta },
                _ => bail!("choose either --list-size or both --alpha and --beta"),
            };
            let pair = generate(&GeneratorSpec { family, palette: q, policy, seed })?;
            write_or_print(&out, &write_graph(&pair))?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
