//! Exhaustive enumeration of labelled graphs on a few vertices.
//!
//! Bit `i` of an edge mask selects the `i`-th pair in lexicographic order
//! `(0,1), (0,2), ..., (0,n-1), (1,2), ...`. Graphs are yielded for masks
//! `0, 1, ..., 2^C(n,2) - 1`.

use std::ops::Range;

use crate::error::{Error, Result};
use crate::graph::Graph;

pub const MAX_ENUMERATION_N: usize = 7;

/// Vertex pairs in mask-bit order.
pub fn pair_order(n: usize) -> Vec<(usize, usize)> {
    (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect()
}

/// Range of edge masks for `n` vertices, after the size guard.
pub fn mask_range(n: usize) -> Result<Range<u64>> {
    if n > MAX_ENUMERATION_N {
        return Err(Error::GuardExceeded {
            what: "n (enumeration)",
            value: n,
            limit: MAX_ENUMERATION_N,
        });
    }
    Ok(0..1u64 << (n * n.saturating_sub(1) / 2))
}

/// The graph whose edge set is selected by `mask`.
pub fn graph_from_mask(n: usize, mask: u64) -> Graph {
    let mut adj = vec![0u64; n];
    let mut bit = 0;
    for u in 0..n {
        for v in u + 1..n {
            if mask >> bit & 1 == 1 {
                adj[u] |= 1 << v;
                adj[v] |= 1 << u;
            }
            bit += 1;
        }
    }
    Graph::from_bitmasks(&adj)
}

/// All `2^C(n,2)` labelled graphs on `n <= 7` vertices in mask order.
pub fn enumerate_graphs(n: usize) -> Result<impl Iterator<Item = Graph>> {
    Ok(mask_range(n)?.map(move |m| graph_from_mask(n, m)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        assert_eq!(enumerate_graphs(2).unwrap().count(), 2);
        assert_eq!(enumerate_graphs(3).unwrap().count(), 8);
        assert_eq!(enumerate_graphs(0).unwrap().count(), 1);
        assert!(matches!(
            enumerate_graphs(8).map(|_| ()),
            Err(Error::GuardExceeded { .. })
        ));
    }

    #[test]
    fn connected_on_four_vertices() {
        // connectivity by BFS over all 64 labelled graphs
        let connected = enumerate_graphs(4).unwrap().filter(Graph::is_connected).count();
        assert_eq!(connected, 38);
    }

    #[test]
    fn mask_order() {
        let gs: Vec<Graph> = enumerate_graphs(3).unwrap().collect();
        assert_eq!(gs[0], Graph::empty(3));
        assert_eq!(gs[1].edges().collect::<Vec<_>>(), vec![(0, 1)]);
        assert_eq!(gs[2].edges().collect::<Vec<_>>(), vec![(0, 2)]);
        assert_eq!(gs[4].edges().collect::<Vec<_>>(), vec![(1, 2)]);
        assert_eq!(gs[7], Graph::complete(3));
        assert_eq!(pair_order(3), vec![(0, 1), (0, 2), (1, 2)]);
    }

    #[test]
    fn degree_sum_with_complement() {
        for g in enumerate_graphs(5).unwrap() {
            let c = g.complement();
            for v in 0..5 {
                assert_eq!(g.degree(v) + c.degree(v), 4);
            }
            assert_eq!(c.complement(), g);
        }
    }

    #[test]
    fn diameter_complement_facts() {
        for n in 1..=6 {
            for g in enumerate_graphs(n).unwrap() {
                let dc = g.complement().diameter();
                match g.diameter() {
                    None => {}
                    Some(d) if d >= 4 => assert_eq!(dc, Some(2)),
                    Some(3) => assert!(matches!(dc, Some(d) if d <= 3)),
                    _ => {}
                }
            }
        }
    }

    #[test]
    fn distance_classes_partition() {
        for g in enumerate_graphs(4).unwrap() {
            let n = g.n();
            let total: usize = (0..n).map(|i| g.distance_class(i).pairs.len()).sum();
            let dm = g.distance_matrix();
            let infinite = dm.iter().flatten().filter(|d| d.is_none()).count();
            assert_eq!(total + infinite, n * n);
            assert_eq!(g.distance_class(0).pairs.len(), n);
            for i in 0..n {
                assert!(g.distance_class(i).pairs.is_symmetric());
            }
        }
    }
}
