//! Random-walk matrices on graphs and their spectra.
//!
//! The walk matrix `P = D^{-1} A` is not symmetric, but it is similar to
//! `N = D^{-1/2} A D^{-1/2}`, so all eigenvalues are computed from `N` (or
//! `(I + N) / 2` for the lazy walk) with a dense symmetric eigensolver.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::{build_family, GraphFamilySpec};
use crate::graph::Graph;
use crate::numfmt;

/// Off-diagonal convergence threshold handed to the eigensolver.
pub const EIGEN_EPS: f64 = 1e-12;
/// Sweep cap for the eigensolver; hitting it is reported as an error.
pub const EIGEN_MAX_ITER: usize = 100_000;

/// Dense row-stochastic walk matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct WalkMatrix {
    pub lazy: bool,
    pub entries: DMatrix<f64>,
}

impl WalkMatrix {
    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn get(&self, v: usize, w: usize) -> f64 {
        self.entries[(v, w)]
    }

    pub fn row(&self, v: usize) -> Vec<f64> {
        self.entries.row(v).iter().copied().collect()
    }

    /// Largest `|row sum - 1|`.
    pub fn row_sum_error(&self) -> f64 {
        self.entries
            .row_iter()
            .map(|r| (r.sum() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

/// Eigenvalues of a walk matrix together with its gap and stationary law.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralSummary {
    /// Sorted descending.
    #[serde(serialize_with = "numfmt::serialize_vec")]
    pub eigenvalues: Vec<f64>,
    #[serde(serialize_with = "numfmt::serialize")]
    pub gap: f64,
    #[serde(serialize_with = "numfmt::serialize")]
    pub lambda_star: f64,
    #[serde(serialize_with = "numfmt::serialize_vec")]
    pub stationary: Vec<f64>,
}

impl SpectralSummary {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("summary serializes")
    }
}

/// Real-valued function on the vertex set.
#[derive(Clone, Debug, PartialEq)]
pub struct TestFunction(pub Vec<f64>);

impl TestFunction {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    /// `Σ_v π(v) F(v)`.
    pub fn stationary_mean(&self, pi: &[f64]) -> f64 {
        pi.iter().zip(&self.0).map(|(p, f)| p * f).sum()
    }
}

fn require_no_isolated(g: &Graph) -> Result<()> {
    match g.isolated_vertex() {
        Some(v) => Err(Error::IsolatedVertex(v)),
        None => Ok(()),
    }
}

fn require_connected(g: &Graph) -> Result<()> {
    require_no_isolated(g)?;
    if g.is_connected() {
        Ok(())
    } else {
        Err(Error::Disconnected)
    }
}

/// `P(v, w) = 1/deg(v)` on edges; the lazy form is `(I + P) / 2`.
pub fn transition_matrix(g: &Graph, lazy: bool) -> Result<WalkMatrix> {
    require_no_isolated(g)?;
    let n = g.n();
    let mut entries = DMatrix::zeros(n, n);
    let scale = if lazy { 0.5 } else { 1.0 };
    for v in 0..n {
        let p = scale / g.degree(v) as f64;
        for &w in g.neighbors(v) {
            entries[(v, w)] = p;
        }
        if lazy {
            entries[(v, v)] = 0.5;
        }
    }
    Ok(WalkMatrix { lazy, entries })
}

/// `π(v) = deg(v) / 2|E|` for a connected graph.
pub fn stationary_distribution(g: &Graph) -> Result<Vec<f64>> {
    require_connected(g)?;
    Ok(degree_distribution(g))
}

fn degree_distribution(g: &Graph) -> Vec<f64> {
    let total = 2.0 * g.edge_count() as f64;
    (0..g.n()).map(|v| g.degree(v) as f64 / total).collect()
}

/// `D^{-1/2} A D^{-1/2}`, optionally made lazy as `(I + N) / 2`.
fn symmetric_conjugate(g: &Graph, lazy: bool) -> DMatrix<f64> {
    let n = g.n();
    let inv_sqrt: Vec<f64> = (0..n).map(|v| 1.0 / (g.degree(v) as f64).sqrt()).collect();
    let mut m = DMatrix::zeros(n, n);
    for v in 0..n {
        for &w in g.neighbors(v) {
            m[(v, w)] = inv_sqrt[v] * inv_sqrt[w];
        }
    }
    if lazy {
        m = (m + DMatrix::identity(n, n)) * 0.5;
    }
    m
}

fn eigen(m: DMatrix<f64>) -> Result<SymmetricEigen<f64, nalgebra::Dyn>> {
    SymmetricEigen::try_new(m, EIGEN_EPS, EIGEN_MAX_ITER).ok_or(Error::NoConvergence)
}

/// Walk-matrix eigenvalues, sorted descending.
pub fn eigenvalues(g: &Graph, lazy: bool) -> Result<Vec<f64>> {
    require_no_isolated(g)?;
    if g.n() == 0 {
        return Ok(Vec::new());
    }
    let mut ev: Vec<f64> = eigen(symmetric_conjugate(g, lazy))?.eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    Ok(ev)
}

/// Eigenvalues, gap `1 - λ_2`, `λ* = max(λ_2, |λ_n|)`, and `deg / 2|E|`.
pub fn spectrum(g: &Graph, lazy: bool) -> Result<SpectralSummary> {
    let eigenvalues = eigenvalues(g, lazy)?;
    let (gap, lambda_star) = gap_and_lambda_star(&eigenvalues);
    Ok(SpectralSummary {
        eigenvalues,
        gap,
        lambda_star,
        stationary: degree_distribution(g),
    })
}

fn gap_and_lambda_star(ev: &[f64]) -> (f64, f64) {
    match ev {
        [] | [_] => (f64::NAN, f64::NAN),
        [_, l2, ..] => {
            let ln = *ev.last().expect("non-empty");
            (1.0 - l2, l2.max(ln.abs()))
        }
    }
}

/// `1 - λ_2` of the non-lazy walk. Disconnected graphs (without isolated
/// vertices) give a gap of zero up to rounding.
pub fn spectral_gap(g: &Graph) -> Result<f64> {
    let ev = eigenvalues(g, false)?;
    if ev.len() < 2 {
        return Err(Error::InvalidParameters("spectral gap needs n >= 2".into()));
    }
    Ok(1.0 - ev[1])
}

/// Gap of the non-lazy walk, with graphs that have an isolated vertex (and
/// hence no walk matrix) assigned gap zero.
pub fn gap_or_zero(g: &Graph) -> Result<f64> {
    match spectral_gap(g) {
        Err(Error::IsolatedVertex(_)) => Ok(0.0),
        other => other,
    }
}

/// Right eigenvector of `P` for `λ_2`, pulled back from `N` via `D^{-1/2}`.
pub fn second_eigenfunction(g: &Graph) -> Result<TestFunction> {
    require_no_isolated(g)?;
    if g.n() < 2 {
        return Err(Error::InvalidParameters("needs n >= 2".into()));
    }
    let e = eigen(symmetric_conjugate(g, false))?;
    let mut order: Vec<usize> = (0..g.n()).collect();
    order.sort_by(|&a, &b| e.eigenvalues[b].total_cmp(&e.eigenvalues[a]));
    let col = e.eigenvectors.column(order[1]);
    Ok(TestFunction(
        (0..g.n())
            .map(|v| col[v] / (g.degree(v) as f64).sqrt())
            .collect(),
    ))
}

/// `d(t)` for `t = 0..=t_max`, using exact repeated multiplication `P^{t+1} = P^t P`.
pub fn tv_curve(g: &Graph, t_max: usize, lazy: bool) -> Result<Vec<f64>> {
    require_connected(g)?;
    let p = transition_matrix(g, lazy)?.entries;
    let pi = degree_distribution(g);
    let n = g.n();
    let mut power = DMatrix::<f64>::identity(n, n);
    let mut out = Vec::with_capacity(t_max + 1);
    for t in 0..=t_max {
        if t > 0 {
            power = &power * &p;
        }
        let d = (0..n)
            .map(|v| {
                0.5 * (0..n)
                    .map(|w| (power[(v, w)] - pi[w]).abs())
                    .sum::<f64>()
            })
            .fold(0.0, f64::max);
        out.push(d);
    }
    Ok(out)
}

/// `d(t) = ½ max_v ||δ_v P^t − π||₁`.
pub fn tv_distance(g: &Graph, t: usize, lazy: bool) -> Result<f64> {
    Ok(*tv_curve(g, t, lazy)?.last().expect("t_max + 1 entries"))
}

/// Geometric decay rate of a positive, eventually geometric sequence: uses
/// the last index `t1` whose value exceeds `floor` and `t0 = t1 / 2`, and
/// returns `(x[t1] / x[t0])^(1 / (t1 - t0))`. `None` if fewer than two
/// usable points exist.
pub fn fitted_decay_rate(series: &[f64], floor: f64) -> Option<f64> {
    let t1 = series.iter().rposition(|&x| x > floor)?;
    let t0 = t1 / 2;
    if t1 == t0 || series[t0] <= 0.0 {
        return None;
    }
    Some((series[t1] / series[t0]).powf(1.0 / (t1 - t0) as f64))
}

/// Kemeny's constant `Σ_{i≥2} 1 / (1 − λ_i)` of the non-lazy walk.
pub fn kemeny_constant(g: &Graph) -> Result<f64> {
    require_connected(g)?;
    let ev = eigenvalues(g, false)?;
    Ok(ev.iter().skip(1).map(|l| 1.0 / (1.0 - l)).sum())
}

/// Dirichlet-form quotient
/// `Σ_i Σ_{j≠i} π(i) P(i,j) (F(i) − F(j))² / (2 Σ_i π(i) F(i)²)`,
/// an upper bound on the gap for any π-mean-zero, non-zero `F`.
pub fn rayleigh_upper_bound(g: &Graph, f: &TestFunction) -> Result<f64> {
    require_connected(g)?;
    let n = g.n();
    if f.0.len() != n {
        return Err(Error::InvalidParameters(format!(
            "test function has {} values for {} vertices",
            f.0.len(),
            n
        )));
    }
    let pi = degree_distribution(g);
    let p = transition_matrix(g, false)?;
    let mean = f.stationary_mean(&pi);
    if mean.abs() > 1e-10 {
        return Err(Error::NotMeanZero(mean));
    }
    let denom: f64 = 2.0 * pi.iter().zip(&f.0).map(|(p, x)| p * x * x).sum::<f64>();
    if denom == 0.0 {
        return Err(Error::ZeroFunction);
    }
    let mut num = 0.0;
    for i in 0..n {
        for &j in g.neighbors(i) {
            let d = f.0[i] - f.0[j];
            num += pi[i] * p.get(i, j) * d * d;
        }
    }
    Ok(num / denom)
}

/// `Σ_{{i,j} ∈ E} (F(i) − F(j))²`.
pub fn edge_difference_sum(g: &Graph, f: &TestFunction) -> f64 {
    g.edges()
        .map(|(i, j)| (f.0[i] - f.0[j]).powi(2))
        .sum()
}

/// `Σ_i deg(i) F(i)²`.
pub fn degree_weighted_square_sum(g: &Graph, f: &TestFunction) -> f64 {
    (0..g.n()).map(|i| g.degree(i) as f64 * f.0[i] * f.0[i]).sum()
}

/// The edge-sum quotient `Σ_E (F(i) − F(j))² / (2 Σ deg(i) F(i)²)`. It is
/// exactly half of [`rayleigh_upper_bound`], so it is *not* an upper bound
/// on the gap in general; kept to document the discrepancy.
pub fn edge_form_quotient(g: &Graph, f: &TestFunction) -> f64 {
    edge_difference_sum(g, f) / (2.0 * degree_weighted_square_sum(g, f))
}

/// Mean-zero witness on `G_{r,m}`: `−1` on the clique,
/// `−1 + (b + 1) k / (r + 1)` on path vertex `v_k`, and `b` on `K_{m,m}`,
/// with `b = (r² + 1) / (2m² + r + 1)`. Uses the labelling of
/// [`GraphFamilySpec::Grm`].
pub fn grm_witness(r: usize, m: usize) -> Result<TestFunction> {
    if r == 0 || m == 0 {
        return Err(Error::InvalidParameters("g_rm witness needs r >= 1 and m >= 1".into()));
    }
    let b = grm_witness_b(r, m);
    let (rf, a) = (r as f64, 1.0);
    let mut values = vec![-a; r];
    values.extend((1..=r).map(|k| -a + (b + a) * k as f64 / (rf + 1.0)));
    values.extend(std::iter::repeat_n(b, 2 * m));
    Ok(TestFunction(values))
}

/// `b = (r² + 1) / (2m² + r + 1)`.
pub fn grm_witness_b(r: usize, m: usize) -> f64 {
    let (r, m) = (r as f64, m as f64);
    (r * r + 1.0) / (2.0 * m * m + r + 1.0)
}

/// `G_{r,m}` built with the family labelling the witness expects.
pub fn grm_graph(r: usize, m: usize) -> Result<Graph> {
    build_family(&GraphFamilySpec::Grm { r, m })
}
