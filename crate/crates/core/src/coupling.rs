//! Markovian couplings of two lazy walks on `V × V` that merge through common
//! neighbours.
//!
//! For a pair `(w1, w2)` with `C = |N(w1) ∩ N(w2)| >= 1` and
//! `α = C / (2(n − 1))`, the lazy row `𝔓(w2, ·)` splits as
//! `(1 − α) Q_{w1}(w2, ·) + α U_{w1,w2}` with `U` uniform on the common
//! neighbours. From a pair in `D` off the diagonal both walks jump together to
//! a `U`-sample with probability `α`, and otherwise move independently by the
//! residuals. Pairs outside `D` move independently (type 1) or by letting one
//! uniformly chosen coordinate take a non-lazy step (type 2). Diagonal pairs
//! move together.
//!
//! States are ordered pairs `(x1, x2)` indexed as `x1 * n + x2`.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, PairSet};
use crate::numfmt;
use crate::report::{BoundReport, Sense, TheoremId};
use crate::rng;
use crate::spectra::{transition_matrix, WalkMatrix};

/// Largest `n` for which kernels on `V × V` are built.
pub const MAX_KERNEL_N: usize = 60;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingKind {
    Type1,
    Type2,
}

/// `U`, `Q` and `C` for an ordered pair with a common neighbour.
#[derive(Clone, Debug, PartialEq)]
pub struct Residual {
    /// Uniform law on `N(w1) ∩ N(w2)`.
    pub u: Vec<f64>,
    /// `Q_{w1}(w2, ·)`: what remains of `𝔓(w2, ·)` after removing `α U`.
    pub q: Vec<f64>,
    pub c: usize,
}

impl Residual {
    pub fn alpha(&self) -> f64 {
        let n = self.u.len();
        self.c as f64 / (2.0 * (n as f64 - 1.0))
    }
}

fn require_no_isolated(g: &Graph) -> Result<()> {
    match g.isolated_vertex() {
        Some(v) => Err(Error::IsolatedVertex(v)),
        None => Ok(()),
    }
}

/// Decomposes `𝔓(w2, ·) = (1 − α) Q + α U` for the pair `(w1, w2)`.
pub fn residual_distribution(g: &Graph, w1: usize, w2: usize) -> Result<Residual> {
    g.check_vertex(w1)?;
    g.check_vertex(w2)?;
    require_no_isolated(g)?;
    let n = g.n();
    let common: Vec<usize> = g.common_neighbors(w1, w2).collect();
    let c = common.len();
    if c == 0 {
        return Err(Error::NoCommonNeighbor(w1, w2));
    }
    let denom = 2.0 * (n as f64 - 1.0);
    // c <= n - 1 in a simple graph, so α <= 1/2
    assert!((c as f64) < denom, "merge mass must stay below one");
    let alpha = c as f64 / denom;
    let mut u = vec![0.0; n];
    for &x in &common {
        u[x] = 1.0 / c as f64;
    }
    let step = 1.0 / (2.0 * g.degree(w2) as f64);
    let mut q = vec![0.0; n];
    q[w2] = 0.5;
    for &x in g.neighbors(w2) {
        q[x] = step;
    }
    for &x in &common {
        // α U(x) = 1 / (2(n − 1)) exactly
        q[x] -= 1.0 / denom;
    }
    for x in &mut q {
        *x /= 1.0 - alpha;
    }
    Ok(Residual { u, q, c })
}

/// Ordered pairs at distance two.
pub fn d2(g: &Graph) -> PairSet {
    g.distance_class(2).pairs
}

/// Every ordered pair (diagonal included) with at least one common neighbour.
pub fn common_neighbor_pairs(g: &Graph) -> PairSet {
    let n = g.n();
    (0..n)
        .flat_map(|v| (0..n).map(move |w| (v, w)))
        .filter(|&(v, w)| g.common_neighbors(v, w).next().is_some())
        .collect()
}

/// Transition kernel on `V × V`, stored as sparse rows.
#[derive(Clone, Debug)]
pub struct CouplingKernel {
    n: usize,
    kind: CouplingKind,
    d_set: PairSet,
    base: WalkMatrix,
    rows: Vec<Vec<(usize, f64)>>,
}

impl CouplingKernel {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kind(&self) -> CouplingKind {
        self.kind
    }

    pub fn d_set(&self) -> &PairSet {
        &self.d_set
    }

    /// The lazy walk being coupled.
    pub fn base(&self) -> &WalkMatrix {
        &self.base
    }

    pub fn state(&self, x1: usize, x2: usize) -> usize {
        x1 * self.n + x2
    }

    pub fn pair(&self, state: usize) -> (usize, usize) {
        (state / self.n, state % self.n)
    }

    pub fn state_count(&self) -> usize {
        self.n * self.n
    }

    /// Nonzero entries of the row for `from`, ascending by target state.
    pub fn row(&self, from: (usize, usize)) -> &[(usize, f64)] {
        &self.rows[self.state(from.0, from.1)]
    }

    /// `K(from, to)`.
    pub fn entry(&self, from: (usize, usize), to: (usize, usize)) -> f64 {
        let target = self.state(to.0, to.1);
        let row = self.row(from);
        row.binary_search_by_key(&target, |&(s, _)| s)
            .map(|i| row[i].1)
            .unwrap_or(0.0)
    }

    /// Largest `|row sum − 1|`.
    pub fn row_sum_error(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| (r.iter().map(|&(_, p)| p).sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// One-step probability of landing on the diagonal.
    pub fn meet_probability(&self, from: (usize, usize)) -> f64 {
        self.row(from)
            .iter()
            .filter(|&&(s, _)| {
                let (a, b) = self.pair(s);
                a == b
            })
            .map(|&(_, p)| p)
            .sum()
    }

    /// Dense copy, for small kernels.
    pub fn to_dense(&self) -> DMatrix<f64> {
        let s = self.state_count();
        let mut m = DMatrix::zeros(s, s);
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, p) in row {
                m[(i, j)] = p;
            }
        }
        m
    }
}

fn lazy_row(p: &WalkMatrix, v: usize) -> Vec<(usize, f64)> {
    (0..p.n())
        .filter_map(|w| {
            let x = p.get(v, w);
            (x > 0.0).then_some((w, x))
        })
        .collect()
}

/// Builds the type 1 or type 2 kernel with respect to `d_set`.
pub fn build_kernel(g: &Graph, d_set: &PairSet, kind: CouplingKind) -> Result<CouplingKernel> {
    let n = g.n();
    if n > MAX_KERNEL_N {
        return Err(Error::GuardExceeded {
            what: "n (coupling kernel)",
            value: n,
            limit: MAX_KERNEL_N,
        });
    }
    require_no_isolated(g)?;
    for (v, w) in d_set.iter() {
        g.check_vertex(v)?;
        g.check_vertex(w)?;
        if g.common_neighbors(v, w).next().is_none() {
            return Err(Error::NoCommonNeighbor(v, w));
        }
    }
    let lazy = transition_matrix(g, true)?;
    let walk = transition_matrix(g, false)?;
    let idx = |a: usize, b: usize| a * n + b;
    let mut rows = Vec::with_capacity(n * n);
    for w1 in 0..n {
        for w2 in 0..n {
            let mut row: BTreeMap<usize, f64> = BTreeMap::new();
            let mut add = |s: usize, p: f64| {
                if p != 0.0 {
                    *row.entry(s).or_insert(0.0) += p;
                }
            };
            if w1 == w2 {
                for (v, p) in lazy_row(&lazy, w1) {
                    add(idx(v, v), p);
                }
            } else if d_set.contains(w1, w2) {
                let r2 = residual_distribution(g, w1, w2)?;
                let r1 = residual_distribution(g, w2, w1)?;
                let alpha = r2.alpha();
                for v1 in 0..n {
                    if r1.q[v1] == 0.0 {
                        continue;
                    }
                    for v2 in 0..n {
                        add(idx(v1, v2), (1.0 - alpha) * r1.q[v1] * r2.q[v2]);
                    }
                }
                for v in 0..n {
                    add(idx(v, v), alpha * r2.u[v]);
                }
            } else {
                match kind {
                    CouplingKind::Type1 => {
                        let a = lazy_row(&lazy, w1);
                        let b = lazy_row(&lazy, w2);
                        for &(v1, p1) in &a {
                            for &(v2, p2) in &b {
                                add(idx(v1, v2), p1 * p2);
                            }
                        }
                    }
                    CouplingKind::Type2 => {
                        for &v1 in g.neighbors(w1) {
                            add(idx(v1, w2), 0.5 * walk.get(w1, v1));
                        }
                        for &v2 in g.neighbors(w2) {
                            add(idx(w1, v2), 0.5 * walk.get(w2, v2));
                        }
                    }
                }
            }
            rows.push(row.into_iter().collect());
        }
    }
    Ok(CouplingKernel {
        n,
        kind,
        d_set: d_set.clone(),
        base: lazy,
        rows,
    })
}

/// Largest deviation of either one-step marginal from the lazy walk, over
/// all rows.
pub fn verify_marginals(k: &CouplingKernel) -> f64 {
    let n = k.n;
    let mut worst: f64 = 0.0;
    for x1 in 0..n {
        for x2 in 0..n {
            let mut first = vec![0.0; n];
            let mut second = vec![0.0; n];
            for &(s, p) in k.row((x1, x2)) {
                let (y1, y2) = k.pair(s);
                first[y1] += p;
                second[y2] += p;
            }
            for y in 0..n {
                worst = worst
                    .max((first[y] - k.base.get(x1, y)).abs())
                    .max((second[y] - k.base.get(x2, y)).abs());
            }
        }
    }
    worst
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TailMode {
    Exact,
    MonteCarlo,
}

/// `Pr(τ > t)` for `t = 0..=t_max` from one start pair.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoalescenceTail {
    pub start: (usize, usize),
    #[serde(serialize_with = "numfmt::serialize_vec")]
    pub tail: Vec<f64>,
    /// Binomial standard errors, Monte Carlo mode only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stderr: Option<Vec<f64>>,
    pub mode: TailMode,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl CoalescenceTail {
    /// CSV with columns `t,tail,stderr`; `stderr` is empty in exact mode.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,tail,stderr\n");
        for (t, p) in self.tail.iter().enumerate() {
            let se = self
                .stderr
                .as_ref()
                .map(|s| numfmt::csv_cell(s[t]))
                .unwrap_or_default();
            out.push_str(&format!("{t},{},{se}\n", numfmt::csv_cell(*p)));
        }
        out
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Out<'a> {
            #[serde(flatten)]
            tail: &'a CoalescenceTail,
            #[serde(skip_serializing_if = "Option::is_none", rename = "stderr")]
            se: Option<Vec<Box<serde_json::value::RawValue>>>,
        }
        // stderr needs the same fixed-precision rendering as tail
        let mut plain = self.clone();
        let se = plain.stderr.take().map(|s| s.into_iter().map(numfmt::raw).collect());
        serde_json::to_string(&Out { tail: &plain, se }).expect("serializes")
    }
}

/// `Pr(τ > t | start)` for every start state and `t = 0..=t_max`, by powering
/// the kernel restricted to off-diagonal states. Entry `[t][state]`.
pub fn survival_table(k: &CouplingKernel, t_max: usize) -> Vec<Vec<f64>> {
    let s = k.state_count();
    let off: Vec<bool> = (0..s).map(|i| {
        let (a, b) = k.pair(i);
        a != b
    }).collect();
    let mut h: Vec<f64> = off.iter().map(|&o| if o { 1.0 } else { 0.0 }).collect();
    let mut table = Vec::with_capacity(t_max + 1);
    table.push(h.clone());
    for _ in 0..t_max {
        let next: Vec<f64> = (0..s)
            .map(|i| {
                if !off[i] {
                    return 0.0;
                }
                k.rows[i].iter().map(|&(j, p)| p * h[j]).sum()
            })
            .collect();
        h = next;
        table.push(h.clone());
    }
    table
}

/// Exact coalescence tail from `start`.
pub fn coalescence_tail(k: &CouplingKernel, start: (usize, usize), t_max: usize) -> Result<CoalescenceTail> {
    check_start(k, start)?;
    let state = k.state(start.0, start.1);
    let tail = survival_table(k, t_max).into_iter().map(|h| h[state]).collect();
    Ok(CoalescenceTail {
        start,
        tail,
        stderr: None,
        mode: TailMode::Exact,
        trials: None,
        seed: None,
    })
}

fn check_start(k: &CouplingKernel, start: (usize, usize)) -> Result<()> {
    for v in [start.0, start.1] {
        if v >= k.n {
            return Err(Error::VertexOutOfRange { vertex: v, n: k.n });
        }
    }
    Ok(())
}

/// Smallest probability, over off-diagonal starts, of coalescing within `j`
/// steps.
pub fn meeting_floor(k: &CouplingKernel, j: usize) -> f64 {
    let table = survival_table(k, j);
    let last = &table[j];
    (0..k.state_count())
        .filter(|&i| {
            let (a, b) = k.pair(i);
            a != b
        })
        .map(|i| 1.0 - last[i])
        .fold(1.0, f64::min)
}

/// Monte Carlo estimate of the tail. Trial `i` from start state `s` draws
/// from `rng::rng(split_seed(split_seed(seed, s), i))`, so results do not
/// depend on how trials are scheduled across workers.
pub fn simulate_coupling(
    k: &CouplingKernel,
    start: (usize, usize),
    trials: u64,
    seed: u64,
    t_max: usize,
) -> Result<CoalescenceTail> {
    check_start(k, start)?;
    if trials == 0 {
        return Err(Error::InvalidParameters("trials must be >= 1".into()));
    }
    let cumulative: Vec<Vec<(usize, f64)>> = k
        .rows
        .iter()
        .map(|row| {
            let mut acc = 0.0;
            row.iter()
                .map(|&(s, p)| {
                    acc += p;
                    (s, acc)
                })
                .collect()
        })
        .collect();
    let start_state = k.state(start.0, start.1);
    let stream_seed = rng::split_seed(seed, start_state as u64);
    // survived[t] counts trials with τ > t
    let survived = (0..trials)
        .into_par_iter()
        .fold(
            || vec![0u64; t_max + 1],
            |mut acc, trial| {
                let mut r = rng::rng(rng::split_seed(stream_seed, trial));
                let mut state = start_state;
                for slot in acc.iter_mut() {
                    let (a, b) = k.pair(state);
                    if a == b {
                        break;
                    }
                    *slot += 1;
                    let row = &cumulative[state];
                    let x = rng::unit_f64(&mut r) * row.last().map_or(1.0, |&(_, c)| c);
                    let i = row.partition_point(|&(_, c)| c <= x).min(row.len() - 1);
                    state = row[i].0;
                }
                acc
            },
        )
        .reduce(
            || vec![0u64; t_max + 1],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );
    let total = trials as f64;
    let tail: Vec<f64> = survived.iter().map(|&c| c as f64 / total).collect();
    let stderr = tail.iter().map(|&p| (p * (1.0 - p) / total).sqrt()).collect();
    Ok(CoalescenceTail {
        start,
        tail,
        stderr: Some(stderr),
        mode: TailMode::MonteCarlo,
        trials: Some(trials),
        seed: Some(seed),
    })
}

/// Checks `½ ||δ_x 𝔓^t − δ_y 𝔓^t||₁ <= Pr(τ > t | (x, y))` for every ordered
/// pair and every `t <= t_max`. The report carries the tightest instance.
pub fn coupling_dominates_tv(g: &Graph, k: &CouplingKernel, t_max: usize) -> Result<BoundReport> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    if g.n() != k.n {
        return Err(Error::InvalidParameters("kernel and graph sizes differ".into()));
    }
    let n = k.n;
    let p = &k.base.entries;
    let table = survival_table(k, t_max);
    let mut power = DMatrix::<f64>::identity(n, n);
    // x = y and t = 0 hold with equality by construction; they are still
    // checked but only reported when nothing else is available or they fail
    let mut worst = (f64::INFINITY, 0.0, 0.0, 0, 0, 0);
    let mut worst_trivial = worst;
    for (t, h) in table.iter().enumerate() {
        if t > 0 {
            power = &power * p;
        }
        for x in 0..n {
            for y in 0..n {
                let tv = 0.5 * (0..n).map(|w| (power[(x, w)] - power[(y, w)]).abs()).sum::<f64>();
                let rhs = h[k.state(x, y)];
                let slot = if x == y || t == 0 { &mut worst_trivial } else { &mut worst };
                if rhs - tv < slot.0 {
                    *slot = (rhs - tv, tv, rhs, x, y, t);
                }
            }
        }
    }
    if worst.0.is_infinite() || worst_trivial.0 < worst.0.min(0.0) {
        worst = worst_trivial;
    }
    let (_, tv, rhs, x, y, t) = worst;
    Ok(
        BoundReport::new(TheoremId::CouplingTv, n, Sense::AtLeast, true, tv, rhs)
            .with("kind", match k.kind {
                CouplingKind::Type1 => "type1",
                CouplingKind::Type2 => "type2",
            })
            .with("t_max", t_max)
            .with("worst_x", x)
            .with("worst_y", y)
            .with("worst_t", t),
    )
}
