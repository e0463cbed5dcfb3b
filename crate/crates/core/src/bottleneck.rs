//! Bottleneck ratio `Φ(G) = min |[S, Sᶜ]| / vol(S)` over `0 < vol(S) <= |E|`,
//! and the Cheeger sandwich `Φ²/2 <= 1 − λ_2 <= 2Φ`.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::numfmt;
use crate::report::{BoundReport, TheoremId};
use crate::spectra;

/// Largest `n` for exact subset enumeration.
pub const MAX_EXACT_N: usize = 20;

/// Subset enumerations at or above this size are split across workers.
const PARALLEL_FROM_N: usize = 14;

/// A cut `S` with its boundary size, volume and ratio.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CutCertificate {
    /// Sorted vertex ids.
    pub subset: Vec<usize>,
    pub cut_size: u64,
    pub volume: u64,
    /// The graph is disconnected, so `Φ = 0`.
    pub disconnected: bool,
    /// Obtained by a sweep cut rather than exhaustive search.
    pub upper_bound_only: bool,
}

impl CutCertificate {
    pub fn ratio(&self) -> f64 {
        self.cut_size as f64 / self.volume as f64
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Out<'a> {
            #[serde(flatten)]
            cert: &'a CutCertificate,
            #[serde(serialize_with = "numfmt::serialize")]
            ratio: f64,
        }
        serde_json::to_string(&Out { cert: self, ratio: self.ratio() }).expect("serializes")
    }
}

fn check_subset(g: &Graph, s: &[usize]) -> Result<()> {
    s.iter().try_for_each(|&v| g.check_vertex(v))
}

fn membership(g: &Graph, s: &[usize]) -> Result<Vec<bool>> {
    check_subset(g, s)?;
    let mut inside = vec![false; g.n()];
    for &v in s {
        inside[v] = true;
    }
    Ok(inside)
}

/// `Σ_{v ∈ S} deg(v)`; repeated ids count once.
pub fn volume(g: &Graph, s: &[usize]) -> Result<u64> {
    let inside = membership(g, s)?;
    Ok((0..g.n()).filter(|&v| inside[v]).map(|v| g.degree(v) as u64).sum())
}

/// Number of edges with exactly one endpoint in `S`.
pub fn cut_size(g: &Graph, s: &[usize]) -> Result<u64> {
    let inside = membership(g, s)?;
    Ok(g.edges().filter(|&(u, v)| inside[u] != inside[v]).count() as u64)
}

/// Best `(cut, vol, mask)` so far; ordered by ratio, then mask.
#[derive(Clone, Copy, Debug)]
struct Candidate {
    cut: u64,
    vol: u64,
    mask: u64,
}

impl Candidate {
    fn better_than(&self, other: &Candidate) -> bool {
        match (self.cut * other.vol).cmp(&(other.cut * self.vol)) {
            Ordering::Less => true,
            Ordering::Equal => self.mask < other.mask,
            Ordering::Greater => false,
        }
    }
}

fn best_in_range(adj: &[u64], degrees: &[u64], edges: u64, lo: u64, hi: u64) -> Option<Candidate> {
    let mut best: Option<Candidate> = None;
    for mask in lo.max(1)..hi {
        let mut vol = 0;
        let mut cut = 0;
        let mut rest = mask;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            vol += degrees[v];
            cut += (adj[v] & !mask).count_ones() as u64;
        }
        if vol == 0 || vol > edges {
            continue;
        }
        let c = Candidate { cut, vol, mask };
        if best.is_none_or(|b| c.better_than(&b)) {
            best = Some(c);
        }
    }
    best
}

/// Exact `Φ` by enumerating all `2^n` subsets (`n <= 20`). Ties go to the
/// smallest subset bitmask. Disconnected graphs yield a zero-ratio
/// certificate flagged `disconnected` rather than an error.
pub fn bottleneck_exact(g: &Graph) -> Result<CutCertificate> {
    let n = g.n();
    if n > MAX_EXACT_N {
        return Err(Error::GuardExceeded {
            what: "n (exact bottleneck)",
            value: n,
            limit: MAX_EXACT_N,
        });
    }
    if g.edge_count() == 0 {
        return Err(Error::NoEdges);
    }
    let adj = g.bitmasks()?;
    let degrees: Vec<u64> = g.degrees().into_iter().map(|d| d as u64).collect();
    let edges = g.edge_count() as u64;
    let total = 1u64 << n;
    let best = if n >= PARALLEL_FROM_N {
        let chunk = 1u64 << (n - 6);
        (0..total / chunk)
            .into_par_iter()
            .filter_map(|i| best_in_range(&adj, &degrees, edges, i * chunk, (i + 1) * chunk))
            .reduce_with(|a, b| if b.better_than(&a) { b } else { a })
    } else {
        best_in_range(&adj, &degrees, edges, 0, total)
    };
    let best = best.ok_or(Error::NoEdges)?;
    Ok(CutCertificate {
        subset: (0..n).filter(|&v| best.mask >> v & 1 == 1).collect(),
        cut_size: best.cut,
        volume: best.vol,
        disconnected: !g.is_connected(),
        upper_bound_only: false,
    })
}

/// Same minimisation restricted to subsets inducing a connected subgraph.
pub fn bottleneck_connected_subsets(g: &Graph) -> Result<CutCertificate> {
    let n = g.n();
    if n > MAX_EXACT_N {
        return Err(Error::GuardExceeded {
            what: "n (exact bottleneck)",
            value: n,
            limit: MAX_EXACT_N,
        });
    }
    let adj = g.bitmasks()?;
    let edges = g.edge_count() as u64;
    let mut best: Option<Candidate> = None;
    for mask in 1u64..1 << n {
        // flood fill from the lowest member
        let start = mask.trailing_zeros();
        let mut seen = 1u64 << start;
        let mut frontier = seen;
        while frontier != 0 {
            let v = frontier.trailing_zeros() as usize;
            frontier &= frontier - 1;
            let fresh = adj[v] & mask & !seen;
            seen |= fresh;
            frontier |= fresh;
        }
        if seen != mask {
            continue;
        }
        let members: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
        let vol: u64 = members.iter().map(|&v| g.degree(v) as u64).sum();
        if vol == 0 || vol > edges {
            continue;
        }
        let cut = members.iter().map(|&v| (adj[v] & !mask).count_ones() as u64).sum();
        let c = Candidate { cut, vol, mask };
        if best.is_none_or(|b| c.better_than(&b)) {
            best = Some(c);
        }
    }
    let best = best.ok_or(Error::NoEdges)?;
    Ok(CutCertificate {
        subset: (0..n).filter(|&v| best.mask >> v & 1 == 1).collect(),
        cut_size: best.cut,
        volume: best.vol,
        disconnected: !g.is_connected(),
        upper_bound_only: false,
    })
}

/// Sweep cut along the second eigenfunction: an upper bound on `Φ` for
/// graphs beyond the exact guard.
pub fn bottleneck_sweep(g: &Graph) -> Result<CutCertificate> {
    let n = g.n();
    if n < 2 {
        return Err(Error::NoEdges);
    }
    let f = spectra::second_eigenfunction(g)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| f.0[a].total_cmp(&f.0[b]).then(a.cmp(&b)));
    let edges = g.edge_count() as u64;
    let total_vol = 2 * edges;
    let mut inside = vec![false; n];
    let (mut vol, mut cut) = (0u64, 0i64);
    let mut best: Option<(u64, u64, usize, bool)> = None;
    for (k, &v) in order.iter().enumerate().take(n - 1) {
        inside[v] = true;
        vol += g.degree(v) as u64;
        for &w in g.neighbors(v) {
            cut += if inside[w] { -1 } else { 1 };
        }
        let cut = cut as u64;
        // the prefix or its complement, whichever is feasible
        for (side_vol, complement) in [(vol, false), (total_vol - vol, true)] {
            if side_vol == 0 || side_vol > edges {
                continue;
            }
            let better = best.is_none_or(|(bc, bv, _, _)| cut * bv < bc * side_vol);
            if better {
                best = Some((cut, side_vol, k, complement));
            }
        }
    }
    let (cut_size, volume, k, complement) = best.ok_or(Error::NoEdges)?;
    let prefix: Vec<bool> = {
        let mut p = vec![false; n];
        for &v in &order[..=k] {
            p[v] = true;
        }
        p
    };
    Ok(CutCertificate {
        subset: (0..n).filter(|&v| prefix[v] != complement).collect(),
        cut_size,
        volume,
        disconnected: !g.is_connected(),
        upper_bound_only: true,
    })
}

/// Exact certificate when `n <= 20`, sweep-cut upper bound otherwise.
pub fn bottleneck(g: &Graph) -> Result<CutCertificate> {
    if g.n() <= MAX_EXACT_N {
        bottleneck_exact(g)
    } else {
        bottleneck_sweep(g)
    }
}

/// Checks `Φ²/2 <= Gap <= 2Φ` with exact `Φ` and the eigensolver gap.
/// Disconnected graphs give the degenerate `0 <= 0 <= 0`.
pub fn cheeger_check(g: &Graph) -> Result<BoundReport> {
    let cert = bottleneck_exact(g)?;
    let phi = if cert.disconnected { 0.0 } else { cert.ratio() };
    let gap = spectra::spectral_gap(g)?;
    Ok(
        BoundReport::between(TheoremId::Cheeger, g.n(), true, phi * phi / 2.0, 2.0 * phi, gap)
            .with("phi", phi)
            .with("cut_size", cert.cut_size)
            .with("volume", cert.volume)
            .with("disconnected", cert.disconnected),
    )
}
