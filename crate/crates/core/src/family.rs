//! Deterministic graph families with fixed vertex labelling.
//!
//! Labelling used by each constructor:
//!
//! * `Complete`, `Path`, `Cycle`: `0..k` in order along the path/cycle.
//! * `Star { k }`: centre `0`, leaves `1..=k`.
//! * `Wheel { k }`: hub `0`, rim cycle `1..=k`.
//! * `CompleteBipartite { s1, s2 }`: first side `0..s1`, second side `s1..s1+s2`.
//! * `TwoCliquesSharedVertex { k }`: shared vertex `0`; cliques `{0, 1..k}` and
//!   `{0, k..2k-1}`.
//! * `Lollipop { k, r }`: clique `0..k`, path `k..k+r`, bridge `(k-1, k)`.
//! * `Barbell { k, r }`: clique `0..k`, path `k..k+r`, clique `k+r..2k+r`;
//!   consecutive blocks are bridged by single edges between the last vertex of
//!   one block and the first vertex of the next.
//! * `Grm { r, m }`: clique `K_r` on `0..r`; path `v_1..v_r` on `r..2r` with
//!   `v_k = r + k - 1`; the `K_{m,m}` side containing the attachment vertex `v`
//!   on `2r..2r+m` with `v = 2r`; the other side on `2r+m..2r+2m`. Bridges are
//!   `(r-1, r)` and `(2r-1, 2r)`.
//! * `Join { left, right }`: `left` keeps its ids, `right` is shifted by `|left|`.
//! * `ErdosRenyi { n, p, seed }`: pairs `(u, v)`, `u < v`, visited in
//!   lexicographic order; each draws one `u64` from `rng::rng(seed)` and is an
//!   edge iff its top 53 bits, scaled to `[0, 1)`, fall below `p`.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum GraphFamilySpec {
    Empty { k: usize },
    Complete { k: usize },
    Path { k: usize },
    Cycle { k: usize },
    Star { k: usize },
    Wheel { k: usize },
    CompleteBipartite { s1: usize, s2: usize },
    TwoCliquesSharedVertex { k: usize },
    Lollipop { k: usize, r: usize },
    Barbell { k: usize, r: usize },
    Grm { r: usize, m: usize },
    Join {
        left: Box<GraphFamilySpec>,
        right: Box<GraphFamilySpec>,
    },
    ErdosRenyi { n: usize, p: f64, seed: u64 },
}

impl GraphFamilySpec {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Empty { .. } => "empty",
            Self::Complete { .. } => "complete",
            Self::Path { .. } => "path",
            Self::Cycle { .. } => "cycle",
            Self::Star { .. } => "star",
            Self::Wheel { .. } => "wheel",
            Self::CompleteBipartite { .. } => "complete_bipartite",
            Self::TwoCliquesSharedVertex { .. } => "two_cliques_shared_vertex",
            Self::Lollipop { .. } => "lollipop",
            Self::Barbell { .. } => "barbell",
            Self::Grm { .. } => "g_rm",
            Self::Join { .. } => "join",
            Self::ErdosRenyi { .. } => "erdos_renyi",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameters(msg));
        match *self {
            Self::Complete { k } | Self::Path { k } if k == 0 => {
                bad(format!("{} needs k >= 1", self.name()))
            }
            Self::Cycle { k } if k < 3 => bad("cycle needs k >= 3".into()),
            Self::Wheel { k } if k < 3 => bad("wheel needs a rim of k >= 3".into()),
            Self::Star { k } if k == 0 => bad("star needs k >= 1".into()),
            Self::CompleteBipartite { s1, s2 } if s1 == 0 || s2 == 0 => {
                bad("complete_bipartite needs s1, s2 >= 1".into())
            }
            Self::TwoCliquesSharedVertex { k } if k < 2 => {
                bad("two_cliques_shared_vertex needs k >= 2".into())
            }
            Self::Lollipop { k, .. } | Self::Barbell { k, .. } if k == 0 => {
                bad(format!("{} needs k >= 1", self.name()))
            }
            Self::Grm { r, m } if r == 0 || m == 0 => bad("g_rm needs r >= 1 and m >= 1".into()),
            Self::ErdosRenyi { p, .. } if !(0.0..=1.0).contains(&p) => {
                bad(format!("erdos_renyi needs p in [0, 1], got {p}"))
            }
            Self::Join { left: ref a, right: ref b } => {
                a.validate()?;
                b.validate()
            }
            _ => Ok(()),
        }
    }

    /// Number of vertices of the built graph.
    pub fn vertex_count(&self) -> usize {
        match *self {
            Self::Empty { k }
            | Self::Complete { k }
            | Self::Path { k }
            | Self::Cycle { k } => k,
            Self::Star { k } | Self::Wheel { k } => k + 1,
            Self::CompleteBipartite { s1, s2 } => s1 + s2,
            Self::TwoCliquesSharedVertex { k } => 2 * k - 1,
            Self::Lollipop { k, r } => k + r,
            Self::Barbell { k, r } => 2 * k + r,
            Self::Grm { r, m } => 2 * r + 2 * m,
            Self::Join { left: ref a, right: ref b } => a.vertex_count() + b.vertex_count(),
            Self::ErdosRenyi { n, .. } => n,
        }
    }
}

impl fmt::Display for GraphFamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Empty { k }
            | Self::Complete { k }
            | Self::Path { k }
            | Self::Cycle { k }
            | Self::Star { k }
            | Self::Wheel { k }
            | Self::TwoCliquesSharedVertex { k } => write!(f, "{}(k={k})", self.name()),
            Self::CompleteBipartite { s1, s2 } => write!(f, "{}(s1={s1},s2={s2})", self.name()),
            Self::Lollipop { k, r } | Self::Barbell { k, r } => {
                write!(f, "{}(k={k},r={r})", self.name())
            }
            Self::Grm { r, m } => write!(f, "g_rm(r={r},m={m})", r = r, m = m),
            Self::Join { left: a, right: b } => write!(f, "join({a},{b})"),
            Self::ErdosRenyi { n, p, seed } => write!(f, "erdos_renyi(n={n},p={p},seed={seed})"),
        }
    }
}

fn clique_edges(vertices: std::ops::Range<usize>, out: &mut Vec<(usize, usize)>) {
    for u in vertices.clone() {
        for v in u + 1..vertices.end {
            out.push((u, v));
        }
    }
}

fn path_edges(vertices: std::ops::Range<usize>, out: &mut Vec<(usize, usize)>) {
    for u in vertices.start..vertices.end.saturating_sub(1) {
        out.push((u, u + 1));
    }
}

/// Builds the graph described by `spec`.
pub fn build_family(spec: &GraphFamilySpec) -> Result<Graph> {
    spec.validate()?;
    let n = spec.vertex_count();
    let mut e = Vec::new();
    match *spec {
        GraphFamilySpec::Empty { .. } => {}
        GraphFamilySpec::Complete { k } => return Ok(Graph::complete(k)),
        GraphFamilySpec::Path { k } => path_edges(0..k, &mut e),
        GraphFamilySpec::Cycle { k } => {
            path_edges(0..k, &mut e);
            e.push((0, k - 1));
        }
        GraphFamilySpec::Star { k } => e.extend((1..=k).map(|v| (0, v))),
        GraphFamilySpec::Wheel { k } => {
            e.extend((1..=k).map(|v| (0, v)));
            path_edges(1..k + 1, &mut e);
            e.push((1, k));
        }
        GraphFamilySpec::CompleteBipartite { s1, s2 } => {
            return Ok(Graph::empty(s1).join(&Graph::empty(s2)))
        }
        GraphFamilySpec::TwoCliquesSharedVertex { k } => {
            clique_edges(0..k, &mut e);
            clique_edges(k..2 * k - 1, &mut e);
            e.extend((k..2 * k - 1).map(|v| (0, v)));
        }
        GraphFamilySpec::Lollipop { k, r } => {
            clique_edges(0..k, &mut e);
            path_edges(k..k + r, &mut e);
            if r > 0 {
                e.push((k - 1, k));
            }
        }
        GraphFamilySpec::Barbell { k, r } => {
            clique_edges(0..k, &mut e);
            path_edges(k..k + r, &mut e);
            clique_edges(k + r..2 * k + r, &mut e);
            // bridges: last of block i to first of block i+1
            e.push((k - 1, k));
            if r > 0 {
                e.push((k + r - 1, k + r));
            }
        }
        GraphFamilySpec::Grm { r, m } => {
            clique_edges(0..r, &mut e);
            path_edges(r..2 * r, &mut e);
            e.push((r - 1, r));
            e.push((2 * r - 1, 2 * r));
            let (a, b) = (2 * r, 2 * r + m);
            for x in a..a + m {
                for y in b..b + m {
                    e.push((x, y));
                }
            }
        }
        GraphFamilySpec::Join { left: ref a, right: ref b } => return Ok(build_family(a)?.join(&build_family(b)?)),
        GraphFamilySpec::ErdosRenyi { n, p, seed } => return Ok(erdos_renyi(n, p, seed)),
    }
    Graph::from_edges(n, e)
}

/// `G(n, p)` as a pure function of `(n, p, seed)`; see the module docs.
pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> Graph {
    let mut r = rng::rng(seed);
    let mut adjacency = vec![Vec::new(); n];
    for u in 0..n {
        for v in u + 1..n {
            if rng::unit_f64(&mut r) < p {
                adjacency[u].push(v);
                adjacency[v].push(u);
            }
        }
    }
    Graph::from_raw_adjacency(adjacency)
}

/// A connected `G(n, p)` sample: tries seeds `split_seed(seed, 0)`,
/// `split_seed(seed, 1)`, ... and returns the first connected draw together
/// with the seed that produced it.
pub fn connected_erdos_renyi(n: usize, p: f64, seed: u64, max_tries: u64) -> Result<(Graph, u64)> {
    sample_until(n, p, seed, max_tries, Graph::is_connected)
}

/// Like [`connected_erdos_renyi`] but with an arbitrary acceptance predicate.
pub fn sample_until(
    n: usize,
    p: f64,
    seed: u64,
    max_tries: u64,
    accept: impl Fn(&Graph) -> bool,
) -> Result<(Graph, u64)> {
    GraphFamilySpec::ErdosRenyi { n, p, seed }.validate()?;
    for attempt in 0..max_tries {
        let s = rng::split_seed(seed, attempt);
        let g = erdos_renyi(n, p, s);
        if accept(&g) {
            return Ok((g, s));
        }
    }
    Err(Error::InvalidParameters(format!(
        "no acceptable G({n}, {p}) sample in {max_tries} tries"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grm_counts() {
        let g = build_family(&GraphFamilySpec::Grm { r: 3, m: 6 }).unwrap();
        assert_eq!(g.n(), 18);
        assert_eq!(g.edge_count(), 43);
        // path vertices have degree 2, attachment vertex m + 1
        for v in 3..6 {
            assert_eq!(g.degree(v), 2);
        }
        assert_eq!(g.degree(6), 7);
        assert_eq!(g.degree(2), 3);
        assert!(g.has_edge(6, 12) && !g.has_edge(6, 7));
    }

    #[test]
    fn grm_r1() {
        let g = build_family(&GraphFamilySpec::Grm { r: 1, m: 2 }).unwrap();
        assert_eq!(g.n(), 6);
        assert_eq!(g.edge_count(), 2 + 4);
        assert!(g.is_connected());
    }

    #[test]
    fn two_cliques_counts() {
        let g = build_family(&GraphFamilySpec::TwoCliquesSharedVertex { k: 5 }).unwrap();
        assert_eq!((g.n(), g.edge_count()), (9, 20));
        assert_eq!(g.degree(0), 8);
    }

    #[test]
    fn erdos_renyi_deterministic() {
        let a = erdos_renyi(10, 0.5, 42);
        let b = build_family(&GraphFamilySpec::ErdosRenyi { n: 10, p: 0.5, seed: 42 }).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, erdos_renyi(10, 0.5, 43));
        assert_eq!(erdos_renyi(8, 0.0, 1).edge_count(), 0);
        assert_eq!(erdos_renyi(8, 1.0, 1), Graph::complete(8));
    }

    #[test]
    fn small_families() {
        let b = |s| build_family(&s).unwrap();
        assert_eq!(b(GraphFamilySpec::Cycle { k: 6 }).edge_count(), 6);
        assert_eq!(b(GraphFamilySpec::Star { k: 4 }).degree(0), 4);
        assert_eq!(b(GraphFamilySpec::Wheel { k: 5 }).edge_count(), 10);
        assert_eq!(b(GraphFamilySpec::CompleteBipartite { s1: 2, s2: 3 }).edge_count(), 6);
        assert_eq!(b(GraphFamilySpec::Lollipop { k: 4, r: 4 }).edge_count(), 6 + 3 + 1);
        let bb = b(GraphFamilySpec::Barbell { k: 3, r: 2 });
        assert_eq!((bb.n(), bb.edge_count()), (8, 3 + 1 + 3 + 2));
        assert!(bb.is_connected());
        assert!(b(GraphFamilySpec::Barbell { k: 3, r: 0 }).is_connected());
        let j = b(GraphFamilySpec::Join {
            left: Box::new(GraphFamilySpec::Complete { k: 3 }),
            right: Box::new(GraphFamilySpec::Complete { k: 3 }),
        });
        assert_eq!(j, Graph::complete(6));
    }

    #[test]
    fn invalid_parameters() {
        for s in [
            GraphFamilySpec::Grm { r: 0, m: 3 },
            GraphFamilySpec::Cycle { k: 2 },
            GraphFamilySpec::ErdosRenyi { n: 3, p: 1.5, seed: 0 },
            GraphFamilySpec::TwoCliquesSharedVertex { k: 1 },
        ] {
            assert!(matches!(build_family(&s), Err(Error::InvalidParameters(_))), "{s}");
        }
    }

    #[test]
    fn connected_sampler() {
        let (g, s) = connected_erdos_renyi(12, 0.3, 9, 1000).unwrap();
        assert!(g.is_connected());
        assert_eq!(erdos_renyi(12, 0.3, s), g);
    }
}
