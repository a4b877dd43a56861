//! Deterministic triangle-free instance generators and list policies.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{GraphError, GraphListPair, MAX_PALETTE};

#[derive(Debug, Error, PartialEq)]
pub enum GenError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("family parameter invalid: {0}")]
    BadParameter(String),
    #[error("list policy needs {needed} colors at vertex {vertex} but the palette has {palette}")]
    PaletteTooSmall { vertex: usize, needed: usize, palette: u32 },
}

/// Triangle-free graph families.
#[derive(Clone, Debug, PartialEq)]
pub enum Family {
    Path { n: usize },
    /// Any length >= 4 is triangle-free; even lengths are bipartite.
    Cycle { len: usize },
    CompleteBipartite { a: usize, b: usize },
    RandomTree { n: usize },
    Grid { rows: usize, cols: usize },
    /// Edge proposals rejected whenever they would close a triangle;
    /// approximately uniform only.
    RandomTriangleFree { n: usize, proposals: usize },
}

/// How lists are attached to the generated graph.
#[derive(Clone, Debug, PartialEq)]
pub enum ListPolicy {
    /// Every vertex gets `size` colors drawn without replacement from the
    /// palette.
    Uniform { size: usize },
    /// Vertex `v` gets `ceil(alpha * deg(v) + beta)` colors drawn without
    /// replacement, sized to satisfy the list-size hypothesis.
    Assumption { alpha: f64, beta: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorSpec {
    pub family: Family,
    pub palette: u32,
    pub policy: ListPolicy,
    pub seed: u64,
}

fn family_edges(family: &Family, rng: &mut ChaCha8Rng) -> Result<(usize, Vec<(usize, usize)>), GenError> {
    match *family {
        Family::Path { n } => {
            if n == 0 {
                return Err(GenError::BadParameter("path needs n >= 1".into()));
            }
            Ok((n, (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect()))
        }
        Family::Cycle { len } => {
            if len < 4 {
                return Err(GenError::BadParameter(
                    "cycle length must be at least 4 to stay triangle-free".into(),
                ));
            }
            let mut edges: Vec<_> = (0..len - 1).map(|i| (i, i + 1)).collect();
            edges.push((len - 1, 0));
            Ok((len, edges))
        }
        Family::CompleteBipartite { a, b } => {
            if a == 0 || b == 0 {
                return Err(GenError::BadParameter("bipartite sides must be nonempty".into()));
            }
            let mut edges = Vec::with_capacity(a * b);
            for u in 0..a {
                for v in 0..b {
                    edges.push((u, a + v));
                }
            }
            Ok((a + b, edges))
        }
        Family::RandomTree { n } => {
            if n == 0 {
                return Err(GenError::BadParameter("tree needs n >= 1".into()));
            }
            let mut edges = Vec::with_capacity(n.saturating_sub(1));
            for v in 1..n {
                edges.push((rng.random_range(0..v), v));
            }
            Ok((n, edges))
        }
        Family::Grid { rows, cols } => {
            if rows == 0 || cols == 0 {
                return Err(GenError::BadParameter("grid sides must be nonzero".into()));
            }
            let idx = |r: usize, c: usize| r * cols + c;
            let mut edges = Vec::new();
            for r in 0..rows {
                for c in 0..cols {
                    if c + 1 < cols {
                        edges.push((idx(r, c), idx(r, c + 1)));
                    }
                    if r + 1 < rows {
                        edges.push((idx(r, c), idx(r + 1, c)));
                    }
                }
            }
            Ok((rows * cols, edges))
        }
        Family::RandomTriangleFree { n, proposals } => {
            if n == 0 {
                return Err(GenError::BadParameter("graph needs n >= 1".into()));
            }
            let mut adj = vec![vec![false; n]; n];
            let mut edges = Vec::new();
            for _ in 0..proposals {
                if n < 2 {
                    break;
                }
                let u = rng.random_range(0..n);
                let v = rng.random_range(0..n);
                if u == v || adj[u][v] {
                    continue;
                }
                let closes_triangle = (0..n).any(|w| adj[u][w] && adj[v][w]);
                if closes_triangle {
                    continue;
                }
                adj[u][v] = true;
                adj[v][u] = true;
                edges.push((u.min(v), u.max(v)));
            }
            Ok((n, edges))
        }
    }
}

/// `size` distinct colors from `{1..=palette}` by partial shuffle.
fn draw_list(palette: u32, size: usize, rng: &mut ChaCha8Rng) -> Vec<u32> {
    let mut colors: Vec<u32> = (1..=palette).collect();
    for i in 0..size {
        let j = rng.random_range(i..colors.len());
        colors.swap(i, j);
    }
    colors.truncate(size);
    colors.sort_unstable();
    colors
}

/// Builds the instance for a spec. Deterministic: the same spec and seed
/// always produce the same instance, and the graph is triangle-free by
/// construction.
pub fn generate(spec: &GeneratorSpec) -> Result<GraphListPair, GenError> {
    if spec.palette == 0 || spec.palette > MAX_PALETTE {
        return Err(GenError::BadParameter(format!(
            "palette must be within 1..={MAX_PALETTE}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (n, edges) = family_edges(&spec.family, &mut rng)?;

    let mut degree = vec![0usize; n];
    for &(u, v) in &edges {
        degree[u] += 1;
        degree[v] += 1;
    }

    let mut lists = Vec::with_capacity(n);
    for (v, &deg) in degree.iter().enumerate() {
        let size = match spec.policy {
            ListPolicy::Uniform { size } => size,
            ListPolicy::Assumption { alpha, beta } => (alpha * deg as f64 + beta).ceil() as usize,
        };
        if size == 0 || size > spec.palette as usize {
            return Err(GenError::PaletteTooSmall {
                vertex: v,
                needed: size,
                palette: spec.palette,
            });
        }
        lists.push(draw_list(spec.palette, size, &mut rng));
    }

    Ok(GraphListPair::new(n, &edges, lists)?)
}
