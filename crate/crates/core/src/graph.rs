//! Graph-plus-lists data model: simple undirected graphs with a color list
//! attached to every vertex, regions with derived boundaries, BFS distances,
//! and the line-oriented text format.

use std::collections::VecDeque;
use std::fmt;

use thiserror::Error;

/// Largest supported palette. Colors are `1..=MAX_PALETTE` so a list fits in
/// a `u64` bitmask, which keeps the counting oracle's inner loop cheap.
pub const MAX_PALETTE: u32 = 64;

/// A set of colors out of `{1..=MAX_PALETTE}`, stored as a bitmask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct ColorSet(u64);

impl ColorSet {
    pub const EMPTY: ColorSet = ColorSet(0);

    /// The full palette `{1..=q}`.
    pub fn full(q: u32) -> ColorSet {
        debug_assert!(q <= MAX_PALETTE);
        if q == 0 {
            ColorSet(0)
        } else if q == MAX_PALETTE {
            ColorSet(u64::MAX)
        } else {
            ColorSet((1u64 << q) - 1)
        }
    }

    pub fn from_colors<I: IntoIterator<Item = u32>>(colors: I) -> Result<ColorSet, GraphError> {
        let mut set = ColorSet(0);
        for c in colors {
            if c == 0 || c > MAX_PALETTE {
                return Err(GraphError::UnsupportedColor(c));
            }
            set.0 |= 1u64 << (c - 1);
        }
        Ok(set)
    }

    #[inline]
    pub fn contains(&self, color: u32) -> bool {
        (1..=MAX_PALETTE).contains(&color) && self.0 & (1u64 << (color - 1)) != 0
    }

    #[inline]
    pub fn insert(&mut self, color: u32) {
        debug_assert!((1..=MAX_PALETTE).contains(&color));
        self.0 |= 1u64 << (color - 1);
    }

    #[inline]
    pub fn remove(&mut self, color: u32) {
        debug_assert!((1..=MAX_PALETTE).contains(&color));
        self.0 &= !(1u64 << (color - 1));
    }

    #[inline]
    pub fn without(&self, color: u32) -> ColorSet {
        let mut s = *self;
        s.remove(color);
        s
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    /// Colors in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let c = bits.trailing_zeros() + 1;
                bits &= bits - 1;
                Some(c)
            }
        })
    }

    pub fn to_vec(&self) -> Vec<u32> {
        self.iter().collect()
    }

    pub fn max_color(&self) -> u32 {
        if self.0 == 0 {
            0
        } else {
            64 - self.0.leading_zeros()
        }
    }

    pub fn is_subset_of(&self, other: &ColorSet) -> bool {
        self.0 & !other.0 == 0
    }
}

impl fmt::Debug for ColorSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// BFS distance: either a finite hop count or the disconnected sentinel.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Distance {
    Finite(usize),
    Infinite,
}

impl Distance {
    pub fn is_finite(&self) -> bool {
        matches!(self, Distance::Finite(_))
    }

    pub fn finite(&self) -> Option<usize> {
        match self {
            Distance::Finite(d) => Some(*d),
            Distance::Infinite => None,
        }
    }
}

impl PartialOrd for Distance {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Distance {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        use Distance::*;
        match (self, other) {
            (Finite(a), Finite(b)) => a.cmp(b),
            (Finite(_), Infinite) => std::cmp::Ordering::Less,
            (Infinite, Finite(_)) => std::cmp::Ordering::Greater,
            (Infinite, Infinite) => std::cmp::Ordering::Equal,
        }
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distance::Finite(d) => write!(f, "{d}"),
            Distance::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {0} out of range (graph has {1} vertices)")]
    VertexOutOfRange(usize, usize),
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(usize, usize),
    #[error("vertex {0} has an empty color list")]
    EmptyList(usize),
    #[error("color {0} outside the supported palette 1..={MAX_PALETTE}")]
    UnsupportedColor(u32),
    #[error("empty vertex set where a nonempty one is required")]
    EmptySet,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// An immutable graph with per-vertex color lists: the object `(G, L)`.
///
/// Vertices are dense ids `0..n`. Adjacency is symmetric and kept sorted, so
/// "the neighbors of v in ascending id order" is the canonical neighbor
/// order used by the list-reduction recursions.
#[derive(Clone, PartialEq, Eq)]
pub struct GraphListPair {
    n: usize,
    q: u32,
    adj: Vec<Vec<usize>>,
    lists: Vec<ColorSet>,
}

impl GraphListPair {
    /// Builds a validated instance. Every list must be nonempty; edges must
    /// be simple and in range. The palette size `q` is the largest color
    /// mentioned in any list.
    pub fn new(
        n: usize,
        edges: &[(usize, usize)],
        lists: Vec<Vec<u32>>,
    ) -> Result<GraphListPair, GraphError> {
        if lists.len() != n {
            return Err(GraphError::Parse {
                line: 0,
                msg: format!("expected {n} lists, got {}", lists.len()),
            });
        }
        let mut sets = Vec::with_capacity(n);
        for (v, colors) in lists.into_iter().enumerate() {
            let set = ColorSet::from_colors(colors)?;
            if set.is_empty() {
                return Err(GraphError::EmptyList(v));
            }
            sets.push(set);
        }
        Self::assemble(n, edges, sets)
    }

    fn assemble(
        n: usize,
        edges: &[(usize, usize)],
        lists: Vec<ColorSet>,
    ) -> Result<GraphListPair, GraphError> {
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n {
                return Err(GraphError::VertexOutOfRange(u, n));
            }
            if v >= n {
                return Err(GraphError::VertexOutOfRange(v, n));
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            if adj[u].contains(&v) {
                return Err(GraphError::DuplicateEdge(u.min(v), u.max(v)));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for nbrs in &mut adj {
            nbrs.sort_unstable();
        }
        let q = lists.iter().map(|l| l.max_color()).max().unwrap_or(0);
        Ok(GraphListPair { n, q, adj, lists })
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.n
    }

    /// Palette size: the largest color mentioned at construction time.
    #[inline]
    pub fn palette(&self) -> u32 {
        self.q
    }

    pub fn vertices(&self) -> impl Iterator<Item = usize> {
        0..self.n
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Edges as `(u, v)` with `u < v`, ascending.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for u in 0..self.n {
            for &v in &self.adj[u] {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    #[inline]
    pub fn list(&self, v: usize) -> ColorSet {
        self.lists[v]
    }

    #[inline]
    pub fn list_size(&self, v: usize) -> usize {
        self.lists[v].len()
    }

    pub(crate) fn set_list(&mut self, v: usize, list: ColorSet) {
        self.lists[v] = list;
    }

    pub fn check_vertex(&self, v: usize) -> Result<(), GraphError> {
        if v < self.n {
            Ok(())
        } else {
            Err(GraphError::VertexOutOfRange(v, self.n))
        }
    }

    /// True iff the graph has no 3-cycle, by neighbor-set intersection on
    /// every edge.
    pub fn is_triangle_free(&self) -> bool {
        self.triangle_witness().is_none()
    }

    /// Some triangle `(u, v, w)` with `u < v < w` if one exists.
    pub fn triangle_witness(&self) -> Option<(usize, usize, usize)> {
        for u in 0..self.n {
            for &v in &self.adj[u] {
                if v <= u {
                    continue;
                }
                // sorted-list intersection of N(u) and N(v)
                let (mut i, mut j) = (0, 0);
                let (a, b) = (&self.adj[u], &self.adj[v]);
                while i < a.len() && j < b.len() {
                    match a[i].cmp(&b[j]) {
                        std::cmp::Ordering::Less => i += 1,
                        std::cmp::Ordering::Greater => j += 1,
                        std::cmp::Ordering::Equal => {
                            let w = a[i];
                            if w > v {
                                return Some((u, v, w));
                            }
                            i += 1;
                            j += 1;
                        }
                    }
                }
            }
        }
        None
    }

    /// BFS distances from every vertex of `sources` simultaneously.
    pub fn distances_from_set(&self, sources: &[usize]) -> Result<Vec<Distance>, GraphError> {
        if sources.is_empty() {
            return Err(GraphError::EmptySet);
        }
        let mut dist = vec![Distance::Infinite; self.n];
        let mut queue = VecDeque::new();
        for &s in sources {
            self.check_vertex(s)?;
            if dist[s] == Distance::Infinite {
                dist[s] = Distance::Finite(0);
                queue.push_back(s);
            }
        }
        while let Some(u) = queue.pop_front() {
            let d = match dist[u] {
                Distance::Finite(d) => d,
                Distance::Infinite => unreachable!(),
            };
            for &w in &self.adj[u] {
                if dist[w] == Distance::Infinite {
                    dist[w] = Distance::Finite(d + 1);
                    queue.push_back(w);
                }
            }
        }
        Ok(dist)
    }

    /// Shortest-path distance between two nonempty vertex sets,
    /// `min { d(a, b) : a in A, b in B }`.
    pub fn distance_sets(&self, a: &[usize], b: &[usize]) -> Result<Distance, GraphError> {
        if b.is_empty() {
            return Err(GraphError::EmptySet);
        }
        for &v in b {
            self.check_vertex(v)?;
        }
        let dist = self.distances_from_set(a)?;
        Ok(b.iter().map(|&v| dist[v]).min().unwrap_or(Distance::Infinite))
    }

    pub fn distance(&self, u: usize, v: usize) -> Result<Distance, GraphError> {
        self.distance_sets(&[u], &[v])
    }

    /// Vertices outside `psi` adjacent to some member of `psi`.
    pub fn boundary_of(&self, psi: &[usize]) -> Result<Vec<usize>, GraphError> {
        let mut inside = vec![false; self.n];
        for &v in psi {
            self.check_vertex(v)?;
            inside[v] = true;
        }
        let mut out: Vec<usize> = Vec::new();
        for &v in psi {
            for &w in &self.adj[v] {
                if !inside[w] {
                    out.push(w);
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    /// Deletes a set of vertices, renumbering the survivors densely while
    /// preserving relative order. Lists are carried over unchanged.
    pub fn delete_vertices(&self, remove: &[usize]) -> Result<(GraphListPair, VertexMap), GraphError> {
        let mut gone = vec![false; self.n];
        for &v in remove {
            self.check_vertex(v)?;
            gone[v] = true;
        }
        let mut old_to_new = vec![None; self.n];
        let mut new_to_old = Vec::with_capacity(self.n - remove.len());
        for v in 0..self.n {
            if !gone[v] {
                old_to_new[v] = Some(new_to_old.len());
                new_to_old.push(v);
            }
        }
        let m = new_to_old.len();
        let mut adj = vec![Vec::new(); m];
        let mut lists = Vec::with_capacity(m);
        for (new_id, &old_id) in new_to_old.iter().enumerate() {
            for &w in &self.adj[old_id] {
                if let Some(nw) = old_to_new[w] {
                    adj[new_id].push(nw);
                }
            }
            lists.push(self.lists[old_id]);
        }
        let q = self.q;
        Ok((
            GraphListPair { n: m, q, adj, lists },
            VertexMap { old_to_new, new_to_old },
        ))
    }
}

impl fmt::Debug for GraphListPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GraphListPair")
            .field("n", &self.n)
            .field("q", &self.q)
            .field("edges", &self.edges())
            .field("lists", &self.lists)
            .finish()
    }
}

/// Renumbering produced by [`GraphListPair::delete_vertices`].
#[derive(Clone, Debug)]
pub struct VertexMap {
    old_to_new: Vec<Option<usize>>,
    new_to_old: Vec<usize>,
}

impl VertexMap {
    pub fn new_id(&self, old: usize) -> Option<usize> {
        self.old_to_new.get(old).copied().flatten()
    }

    pub fn old_id(&self, new: usize) -> usize {
        self.new_to_old[new]
    }
}

/// A subset of vertices under study, with its boundary derived on demand.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Region {
    members: Vec<usize>,
}

impl Region {
    pub fn new(pair: &GraphListPair, mut members: Vec<usize>) -> Result<Region, GraphError> {
        for &v in &members {
            pair.check_vertex(v)?;
        }
        members.sort_unstable();
        members.dedup();
        Ok(Region { members })
    }

    /// All vertices within BFS distance `radius` of `center`.
    pub fn ball(pair: &GraphListPair, center: usize, radius: usize) -> Result<Region, GraphError> {
        let dist = pair.distances_from_set(&[center])?;
        let members = (0..pair.vertex_count())
            .filter(|&v| matches!(dist[v], Distance::Finite(d) if d <= radius))
            .collect();
        Ok(Region { members })
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.members.binary_search(&v).is_ok()
    }

    pub fn boundary(&self, pair: &GraphListPair) -> Result<Vec<usize>, GraphError> {
        pair.boundary_of(&self.members)
    }

    /// Vertices of `pair` not in the region, ascending.
    pub fn complement(&self, pair: &GraphListPair) -> Vec<usize> {
        (0..pair.vertex_count()).filter(|&v| !self.contains(v)).collect()
    }
}

// ---------------------------------------------------------------------------
// Text format
// ---------------------------------------------------------------------------
//
//   # comment
//   n 5
//   e 0 1
//   l 0 1 2 3
//
// `n` must appear before any `e` or `l` directive. Every vertex needs exactly
// one `l` line. Duplicate edges, out-of-range ids, and empty lists are
// rejected.

pub fn parse_graph(text: &str) -> Result<GraphListPair, GraphError> {
    let mut n: Option<usize> = None;
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut lists: Vec<Option<Vec<u32>>> = Vec::new();

    let err = |line: usize, msg: String| GraphError::Parse { line, msg };

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let directive = tokens.next().unwrap();
        match directive {
            "n" => {
                if n.is_some() {
                    return Err(err(line_no, "duplicate n directive".into()));
                }
                let count: usize = tokens
                    .next()
                    .ok_or_else(|| err(line_no, "n requires a count".into()))?
                    .parse()
                    .map_err(|_| err(line_no, "invalid vertex count".into()))?;
                if tokens.next().is_some() {
                    return Err(err(line_no, "trailing tokens after n".into()));
                }
                n = Some(count);
                lists = vec![None; count];
            }
            "e" | "l" => {
                let count = n.ok_or_else(|| err(line_no, "n must come first".into()))?;
                let parse_vertex = |tok: Option<&str>| -> Result<usize, GraphError> {
                    let v: usize = tok
                        .ok_or_else(|| err(line_no, format!("{directive} requires arguments")))?
                        .parse()
                        .map_err(|_| err(line_no, "invalid vertex id".into()))?;
                    if v >= count {
                        return Err(GraphError::VertexOutOfRange(v, count));
                    }
                    Ok(v)
                };
                if directive == "e" {
                    let u = parse_vertex(tokens.next())?;
                    let v = parse_vertex(tokens.next())?;
                    if tokens.next().is_some() {
                        return Err(err(line_no, "trailing tokens after edge".into()));
                    }
                    if u == v {
                        return Err(GraphError::SelfLoop(u));
                    }
                    if edges.contains(&(u.min(v), u.max(v))) {
                        return Err(GraphError::DuplicateEdge(u.min(v), u.max(v)));
                    }
                    edges.push((u.min(v), u.max(v)));
                } else {
                    let v = parse_vertex(tokens.next())?;
                    if lists[v].is_some() {
                        return Err(err(line_no, format!("duplicate list for vertex {v}")));
                    }
                    let mut colors = Vec::new();
                    for tok in tokens {
                        let c: u32 = tok
                            .parse()
                            .map_err(|_| err(line_no, "invalid color".into()))?;
                        if c == 0 || c > MAX_PALETTE {
                            return Err(GraphError::UnsupportedColor(c));
                        }
                        if colors.contains(&c) {
                            return Err(err(line_no, format!("duplicate color {c} in list")));
                        }
                        colors.push(c);
                    }
                    if colors.is_empty() {
                        return Err(GraphError::EmptyList(v));
                    }
                    lists[v] = Some(colors);
                }
            }
            other => {
                return Err(err(line_no, format!("unknown directive {other:?}")));
            }
        }
    }

    let n = n.ok_or_else(|| GraphError::Parse {
        line: 0,
        msg: "missing n directive".into(),
    })?;
    let mut resolved = Vec::with_capacity(n);
    for (v, list) in lists.into_iter().enumerate() {
        resolved.push(list.ok_or(GraphError::EmptyList(v))?);
    }
    GraphListPair::new(n, &edges, resolved)
}

pub fn write_graph(pair: &GraphListPair) -> String {
    let mut out = String::new();
    out.push_str(&format!("n {}\n", pair.vertex_count()));
    for (u, v) in pair.edges() {
        out.push_str(&format!("e {u} {v}\n"));
    }
    for v in pair.vertices() {
        out.push_str(&format!("l {v}"));
        for c in pair.list(v).iter() {
            out.push_str(&format!(" {c}"));
        }
        out.push('\n');
    }
    out
}
