//! Simple undirected graphs, complements, joins, and breadth-first distances.
//!
//! Vertices are `0..n`. Neighbour lists are kept sorted and duplicate-free so
//! that equality of two [`Graph`] values is equality of labelled graphs.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// Simple undirected graph on vertices `0..n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    adjacency: Vec<Vec<usize>>,
    edge_count: usize,
}

impl Graph {
    /// Graph on `n` vertices with no edges.
    pub fn empty(n: usize) -> Self {
        Graph {
            n,
            adjacency: vec![Vec::new(); n],
            edge_count: 0,
        }
    }

    /// Complete graph `K_n`.
    pub fn complete(n: usize) -> Self {
        let adjacency = (0..n)
            .map(|v| (0..n).filter(|&w| w != v).collect())
            .collect();
        Graph {
            n,
            adjacency,
            edge_count: n * n.saturating_sub(1) / 2,
        }
    }

    /// Builds a graph from undirected edges. Duplicates (in either orientation)
    /// collapse to a single edge; self-loops and out-of-range ids are errors.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut adjacency = vec![Vec::new(); n];
        for (u, v) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(Error::VertexOutOfRange { vertex: x, n });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        Ok(Self::from_raw_adjacency(adjacency))
    }

    /// Sorts and deduplicates neighbour lists. Callers guarantee symmetry and
    /// the absence of self-loops.
    pub(crate) fn from_raw_adjacency(mut adjacency: Vec<Vec<usize>>) -> Self {
        let mut degree_sum = 0;
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
            degree_sum += list.len();
        }
        Graph {
            n: adjacency.len(),
            adjacency,
            edge_count: degree_sum / 2,
        }
    }

    /// Builds a graph on at most 64 vertices from per-vertex neighbour bitmasks.
    pub fn from_bitmasks(masks: &[u64]) -> Self {
        let adjacency = masks
            .iter()
            .map(|&m| BitIter(m).collect::<Vec<_>>())
            .collect::<Vec<_>>();
        let degree_sum: usize = adjacency.iter().map(Vec::len).sum();
        Graph {
            n: masks.len(),
            adjacency,
            edge_count: degree_sum / 2,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    /// Sorted neighbour list of `v`.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn has_edge(&self, v: usize, w: usize) -> bool {
        v < self.n && self.adjacency[v].binary_search(&w).is_ok()
    }

    /// Minimum degree, `None` on the null graph.
    pub fn min_degree(&self) -> Option<usize> {
        self.adjacency.iter().map(Vec::len).min()
    }

    /// Maximum degree, `None` on the null graph.
    pub fn max_degree(&self) -> Option<usize> {
        self.adjacency.iter().map(Vec::len).max()
    }

    /// First vertex of degree zero, if any.
    pub fn isolated_vertex(&self) -> Option<usize> {
        (0..self.n).find(|&v| self.adjacency[v].is_empty())
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    /// Neighbour sets as bitmasks; requires `n <= 64`.
    pub fn bitmasks(&self) -> Result<Vec<u64>> {
        if self.n > 64 {
            return Err(Error::GuardExceeded {
                what: "n (bitmask)",
                value: self.n,
                limit: 64,
            });
        }
        Ok(self
            .adjacency
            .iter()
            .map(|list| list.iter().fold(0u64, |m, &w| m | (1 << w)))
            .collect())
    }

    pub(crate) fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.n {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange { vertex: v, n: self.n })
        }
    }

    /// The complement: `{v, w}` is an edge iff `v != w` and it is not an edge here.
    pub fn complement(&self) -> Graph {
        let n = self.n;
        let adjacency = (0..n)
            .map(|v| {
                let mut out = Vec::with_capacity(n - 1 - self.degree(v));
                let mut it = self.adjacency[v].iter().peekable();
                for w in 0..n {
                    if it.peek() == Some(&&w) {
                        it.next();
                    } else if w != v {
                        out.push(w);
                    }
                }
                out
            })
            .collect::<Vec<_>>();
        let edge_count = n * n.saturating_sub(1) / 2 - self.edge_count;
        Graph {
            n,
            adjacency,
            edge_count,
        }
    }

    /// Breadth-first distances from `v`; `None` marks unreachable vertices.
    pub fn distances_from(&self, v: usize) -> Result<Vec<Option<usize>>> {
        self.check_vertex(v)?;
        let mut dist = vec![None; self.n];
        dist[v] = Some(0);
        let mut queue = VecDeque::from([v]);
        while let Some(x) = queue.pop_front() {
            let dx = dist[x].unwrap_or(0);
            for &y in &self.adjacency[x] {
                if dist[y].is_none() {
                    dist[y] = Some(dx + 1);
                    queue.push_back(y);
                }
            }
        }
        Ok(dist)
    }

    /// All-pairs distance table, row-major.
    pub fn distance_matrix(&self) -> Vec<Vec<Option<usize>>> {
        (0..self.n)
            .map(|v| self.distances_from(v).expect("vertex in range"))
            .collect()
    }

    pub fn is_connected(&self) -> bool {
        if self.n <= 1 {
            return true;
        }
        self.distances_from(0)
            .expect("n >= 1")
            .iter()
            .all(Option::is_some)
    }

    /// Largest finite distance if connected, `None` (infinite) otherwise.
    pub fn diameter(&self) -> Option<usize> {
        let mut best = 0;
        for v in 0..self.n {
            for d in self.distances_from(v).expect("vertex in range") {
                best = best.max(d?);
            }
        }
        Some(best)
    }

    /// All ordered pairs at distance exactly `i`.
    pub fn distance_class(&self, i: usize) -> DistancePairSet {
        let mut pairs = PairSet::new();
        for v in 0..self.n {
            for (w, d) in self.distances_from(v).expect("vertex in range").into_iter().enumerate() {
                if d == Some(i) {
                    pairs.insert(v, w);
                }
            }
        }
        DistancePairSet { class: i, pairs }
    }

    /// `|N(v) ∩ N(w)|`; equals `deg(v)` when `v == w`.
    pub fn common_neighbor_count(&self, v: usize, w: usize) -> Result<usize> {
        self.check_vertex(v)?;
        self.check_vertex(w)?;
        Ok(self.common_neighbors(v, w).count())
    }

    /// Iterates `N(v) ∩ N(w)` in ascending order by merging the sorted lists.
    pub fn common_neighbors(&self, v: usize, w: usize) -> impl Iterator<Item = usize> + '_ {
        let (a, b) = (&self.adjacency[v], &self.adjacency[w]);
        let (mut i, mut j) = (0, 0);
        std::iter::from_fn(move || {
            while i < a.len() && j < b.len() {
                match a[i].cmp(&b[j]) {
                    std::cmp::Ordering::Less => i += 1,
                    std::cmp::Ordering::Greater => j += 1,
                    std::cmp::Ordering::Equal => {
                        let x = a[i];
                        i += 1;
                        j += 1;
                        return Some(x);
                    }
                }
            }
            None
        })
    }

    /// Disjoint union; `other`'s vertices are shifted by `self.n()`.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let shift = self.n;
        let mut adjacency = self.adjacency.clone();
        adjacency.extend(
            other
                .adjacency
                .iter()
                .map(|list| list.iter().map(|&w| w + shift).collect()),
        );
        Graph {
            n: self.n + other.n,
            adjacency,
            edge_count: self.edge_count + other.edge_count,
        }
    }

    /// Join: disjoint union plus every edge between the two parts. `self`
    /// keeps ids `0..n1`.
    pub fn join(&self, other: &Graph) -> Graph {
        let (n1, n2) = (self.n, other.n);
        let mut adjacency = Vec::with_capacity(n1 + n2);
        for list in &self.adjacency {
            let mut l = list.clone();
            l.extend(n1..n1 + n2);
            adjacency.push(l);
        }
        for list in &other.adjacency {
            let mut l: Vec<usize> = (0..n1).collect();
            l.extend(list.iter().map(|&w| w + n1));
            adjacency.push(l);
        }
        Graph {
            n: n1 + n2,
            adjacency,
            edge_count: self.edge_count + other.edge_count + n1 * n2,
        }
    }

    /// Subgraph induced on `vertices`, relabelled `0..k` in the given order.
    pub fn induced(&self, vertices: &[usize]) -> Result<Graph> {
        let mut index = vec![usize::MAX; self.n];
        for (i, &v) in vertices.iter().enumerate() {
            self.check_vertex(v)?;
            index[v] = i;
        }
        let adjacency = vertices
            .iter()
            .map(|&v| {
                self.adjacency[v]
                    .iter()
                    .filter_map(|&w| (index[w] != usize::MAX).then_some(index[w]))
                    .collect()
            })
            .collect();
        Ok(Self::from_raw_adjacency(adjacency))
    }

    /// Renders the edge-list text format: an `n=` header then sorted edges.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("n={}\n", self.n);
        for (u, v) in self.edges() {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_edge_list())
    }
}

/// Parses the edge-list text format.
///
/// An optional first non-comment line `n=<int>` fixes the vertex count;
/// otherwise it is one more than the largest id seen. Blank lines and lines
/// starting with `#` are skipped.
pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut declared: Option<usize> = None;
    let mut edges = Vec::new();
    let mut seen_content = false;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("n=") {
            if seen_content {
                return Err(Error::Parse {
                    line: line_no,
                    msg: "`n=` header must precede all edges".into(),
                });
            }
            let n = rest.trim().parse::<usize>().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("invalid vertex count `{}`", rest.trim()),
            })?;
            declared = Some(n);
            seen_content = true;
            continue;
        }
        seen_content = true;
        let mut tokens = line.split_whitespace();
        let mut next_id = || -> Result<usize> {
            let tok = tokens.next().ok_or_else(|| Error::Parse {
                line: line_no,
                msg: "expected two vertex ids".into(),
            })?;
            tok.parse::<usize>().map_err(|_| Error::Parse {
                line: line_no,
                msg: format!("non-integer token `{tok}`"),
            })
        };
        let u = next_id()?;
        let v = next_id()?;
        if let Some(extra) = tokens.next() {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("unexpected token `{extra}`"),
            });
        }
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        if let Some(n) = declared {
            if u >= n || v >= n {
                return Err(Error::VertexOutOfRange { vertex: u.max(v), n });
            }
        }
        edges.push((u, v));
    }
    let n = declared.unwrap_or_else(|| {
        edges
            .iter()
            .map(|&(u, v)| u.max(v) + 1)
            .max()
            .unwrap_or(0)
    });
    Graph::from_edges(n, edges)
}

/// Set of ordered vertex pairs.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct PairSet(BTreeSet<(usize, usize)>);

impl PairSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, v: usize, w: usize) -> bool {
        self.0.insert((v, w))
    }

    pub fn contains(&self, v: usize, w: usize) -> bool {
        self.0.contains(&(v, w))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.0.iter().copied()
    }

    pub fn union(&self, other: &PairSet) -> PairSet {
        PairSet(self.0.union(&other.0).copied().collect())
    }

    /// `S × S` for a vertex set `S`.
    pub fn square(vertices: &[usize]) -> PairSet {
        let mut s = PairSet::new();
        for &v in vertices {
            for &w in vertices {
                s.insert(v, w);
            }
        }
        s
    }

    /// True iff `(w, v)` is present whenever `(v, w)` is.
    pub fn is_symmetric(&self) -> bool {
        self.0.iter().all(|&(v, w)| self.0.contains(&(w, v)))
    }
}

impl FromIterator<(usize, usize)> for PairSet {
    fn from_iter<T: IntoIterator<Item = (usize, usize)>>(iter: T) -> Self {
        PairSet(iter.into_iter().collect())
    }
}

/// The pairs at one fixed graph distance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DistancePairSet {
    pub class: usize,
    pub pairs: PairSet,
}

struct BitIter(u64);

impl Iterator for BitIter {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let b = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(b)
    }
}
