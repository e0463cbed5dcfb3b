//! Acceptance suite. Runs every criterion, prints one line per criterion and
//! exits non-zero if any fails.

use std::process::ExitCode;
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Instant;

use rayon::prelude::*;

use gapforge::bottleneck::cheeger_check;
use gapforge::bounds::{self, gamma, sample_degree_window, Instance};
use gapforge::coupling::{
    build_kernel, coalescence_tail, common_neighbor_pairs, coupling_dominates_tv, d2, simulate_coupling,
    verify_marginals, CouplingKind,
};
use gapforge::enumerate::{graph_from_mask, mask_range};
use gapforge::family::connected_erdos_renyi;
use gapforge::rng::split_seed;
use gapforge::spectra::{self, grm_graph};
use gapforge::{build_family, Graph, GraphFamilySpec};

const MASTER_SEED: u64 = 0x5EED;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn for_all_graphs<F>(n_max: usize, f: F)
where
    F: Fn(&Graph) + Sync,
{
    for n in 2..=n_max {
        mask_range(n).unwrap().into_par_iter().for_each(|mask| f(&graph_from_mask(n, mask)));
    }
}

fn random_connected(i: u64, n: usize, p: f64) -> Graph {
    connected_erdos_renyi(n, p, split_seed(MASTER_SEED, i), 100_000).unwrap().0
}

fn complete_graph_gap() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in 2..=50 {
        let gap = spectra::spectral_gap(&Graph::complete(n)).unwrap();
        worst = worst.max((gap - n as f64 / (n as f64 - 1.0)).abs());
    }
    outcome(worst <= 1e-9, format!("n = 2..=50, max |Gap − n/(n−1)| = {worst:.3e}"))
}

fn two_cliques_gap() -> Outcome {
    let mut worst: f64 = 0.0;
    for k in 3..=10 {
        let g = build_family(&GraphFamilySpec::TwoCliquesSharedVertex { k }).unwrap();
        let n = g.n() as f64;
        let gap = spectra::spectral_gap(&g).unwrap();
        worst = worst.max((gap - 2.0 / (n - 1.0)).abs());
    }
    outcome(worst <= 1e-9, format!("k = 3..=10, max |Gap − 2/(n−1)| = {worst:.3e}"))
}

/// Criteria 3 and 4 share one pass over all graphs with `n <= 7`.
fn exhaustive_main1_diam2() -> (Outcome, Outcome) {
    let graphs = AtomicU64::new(0);
    let main1_fail = AtomicU64::new(0);
    let diam2_graphs = AtomicU64::new(0);
    let diam2_fail = AtomicU64::new(0);
    let worst_main1 = std::sync::Mutex::new(f64::INFINITY);
    let worst_diam2 = std::sync::Mutex::new(f64::INFINITY);
    for_all_graphs(7, |g| {
        let inst = Instance::new(g);
        let r = bounds::main1_on(&inst).unwrap();
        graphs.fetch_add(1, Ordering::Relaxed);
        if r.margin < -1e-9 {
            main1_fail.fetch_add(1, Ordering::Relaxed);
        }
        let mut w = worst_main1.lock().unwrap();
        *w = w.min(r.margin);
        drop(w);
        if g.diameter() == Some(2) {
            let r = bounds::diam2_on(&inst).unwrap();
            diam2_graphs.fetch_add(1, Ordering::Relaxed);
            if r.margin < -1e-9 {
                diam2_fail.fetch_add(1, Ordering::Relaxed);
            }
            let mut w = worst_diam2.lock().unwrap();
            *w = w.min(r.margin);
        }
    });
    let (g, f) = (graphs.into_inner(), main1_fail.into_inner());
    let (dg, df) = (diam2_graphs.into_inner(), diam2_fail.into_inner());
    (
        outcome(
            f == 0 && g == (2..=7).map(|n| 1u64 << (n * (n - 1) / 2)).sum::<u64>(),
            format!("{g} graphs, {f} failures, min margin {:.3e}", worst_main1.into_inner().unwrap()),
        ),
        outcome(
            df == 0 && dg > 0,
            format!("{dg} diameter-2 graphs, {df} failures, min margin {:.3e}", worst_diam2.into_inner().unwrap()),
        ),
    )
}

fn cheeger() -> Outcome {
    let checked = AtomicU64::new(0);
    let failed = AtomicU64::new(0);
    for_all_graphs(7, |g| {
        if g.isolated_vertex().is_none() {
            checked.fetch_add(1, Ordering::Relaxed);
            if cheeger_check(g).unwrap().margin < -1e-9 {
                failed.fetch_add(1, Ordering::Relaxed);
            }
        }
    });
    let random_failed = (0..100u64)
        .into_par_iter()
        .filter(|&i| {
            let g = random_connected(i, 2 + i as usize % 13, 0.35);
            cheeger_check(&g).unwrap().margin < -1e-9
        })
        .count();
    let (c, f) = (checked.into_inner(), failed.into_inner());
    outcome(
        f == 0 && random_failed == 0,
        format!("{c} graphs n <= 7 ({f} failures), 100 random n <= 14 ({random_failed} failures)"),
    )
}

fn coupling_marginals() -> Outcome {
    let worst = std::sync::Mutex::new(0.0f64);
    let kernels = AtomicU64::new(0);
    for_all_graphs(6, |g| {
        if !g.is_connected() {
            return;
        }
        for d in [d2(g), common_neighbor_pairs(g)] {
            for kind in [CouplingKind::Type1, CouplingKind::Type2] {
                let err = verify_marginals(&build_kernel(g, &d, kind).unwrap());
                kernels.fetch_add(1, Ordering::Relaxed);
                let mut w = worst.lock().unwrap();
                *w = w.max(err);
            }
        }
    });
    let p3 = build_family(&GraphFamilySpec::Path { k: 3 }).unwrap();
    let k = build_kernel(&p3, &d2(&p3), CouplingKind::Type1).unwrap();
    let entry = k.entry((0, 2), (1, 1));
    let worst = worst.into_inner().unwrap();
    outcome(
        worst <= 1e-12 && (entry - 1.0 / 3.0).abs() <= 1e-14,
        format!(
            "{} kernels, max marginal error {worst:.3e}; P_3 K((0,2),(1,1)) − 1/3 = {:.3e}",
            kernels.into_inner(),
            entry - 1.0 / 3.0
        ),
    )
}

fn coupling_dominates() -> Outcome {
    let margins: Vec<f64> = (0..50u64)
        .into_par_iter()
        .flat_map_iter(|i| {
            let g = random_connected(1000 + i, 2 + i as usize % 9, 0.5);
            let mut out = Vec::new();
            for d in [d2(&g), common_neighbor_pairs(&g)] {
                for kind in [CouplingKind::Type1, CouplingKind::Type2] {
                    let k = build_kernel(&g, &d, kind).unwrap();
                    out.push(coupling_dominates_tv(&g, &k, 50).unwrap().margin);
                }
            }
            out
        })
        .collect();
    let worst = margins.iter().copied().fold(f64::INFINITY, f64::min);
    outcome(
        worst >= -1e-10,
        format!("{} graph/kernel combinations, min slack Pr(τ>t) − TV = {worst:.3e}", margins.len()),
    )
}

fn monte_carlo() -> Outcome {
    let p3 = build_family(&GraphFamilySpec::Path { k: 3 }).unwrap();
    let k4 = Graph::complete(4);
    let cases = [
        ("P_3 type 1", build_kernel(&p3, &d2(&p3), CouplingKind::Type1).unwrap(), (0, 2)),
        ("P_3 type 2", build_kernel(&p3, &d2(&p3), CouplingKind::Type2).unwrap(), (0, 2)),
        ("K_4 type 1", build_kernel(&k4, &common_neighbor_pairs(&k4), CouplingKind::Type1).unwrap(), (0, 1)),
        ("K_4 type 2", build_kernel(&k4, &d2(&k4), CouplingKind::Type2).unwrap(), (0, 1)),
    ];
    let mut pass = true;
    let mut worst_z: f64 = 0.0;
    for (name, k, start) in &cases {
        let exact = coalescence_tail(k, *start, 30).unwrap();
        let mc = simulate_coupling(k, *start, 200_000, MASTER_SEED, 30).unwrap();
        for t in 0..=30 {
            let p = exact.tail[t];
            let se = (p * (1.0 - p) / 200_000.0).sqrt();
            let diff = (mc.tail[t] - p).abs();
            if diff > 4.0 * se + 1e-15 {
                pass = false;
                eprintln!("  {name}: t = {t}, exact {p}, empirical {}", mc.tail[t]);
            }
            if se > 0.0 {
                worst_z = worst_z.max(diff / se);
            }
        }
    }
    outcome(pass, format!("4 kernels, 200000 trials, t <= 30, max |z| = {worst_z:.2}"))
}

fn grm_suite() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (r, m) in [(3, 6), (4, 8), (5, 10), (6, 12)] {
        let rep = bounds::verify_grm(r, m).unwrap();
        let mean = rep.field("witness_mean").unwrap();
        let sum_err = (rep.field("witness_edge_sum").unwrap() - rep.field("witness_edge_sum_expected").unwrap()).abs();
        let witness_ok = mean.abs() <= 1e-10 && sum_err <= 1e-10;
        let quotient_ok = rep.measured_value <= rep.bound_value + 1e-9;
        let complement_ok = rep.field("gap_complement").unwrap() <= rep.field("complement_bound").unwrap() + 1e-9;
        pass &= witness_ok && quotient_ok && complement_ok;
        let r3 = rep.field("r3_check").unwrap() == 1.0;
        parts.push(format!(
            "({r},{m}): Gap·r³ = {:.4} ({} 4/r³)",
            rep.field("gap_times_r3").unwrap(),
            if r3 { "below" } else { "NOT below" }
        ));
    }
    outcome(pass, parts.join("; "))
}

fn counterexample() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for n in [144, 256, 400] {
        let (r, m) = bounds::counterexample_parameters(n).unwrap();
        let g = grm_graph(r, m).unwrap();
        let sum = spectra::spectral_gap(&g).unwrap() + spectra::spectral_gap(&g.complement()).unwrap();
        let limit = 2.0 / (n as f64).sqrt();
        pass &= sum < limit;
        parts.push(format!("n={n} (r={r}, m={m}): {sum:.5} vs {limit:.5}"));
    }
    outcome(pass, parts.join("; "))
}

fn degree_window() -> Outcome {
    let (l, u) = (0.25, 0.75);
    let margins: Vec<f64> = (0..100u64)
        .into_par_iter()
        .map(|i| {
            let n = 30 + i as usize % 31;
            let (g, _) = sample_degree_window(n, 0.5, l, u, split_seed(MASTER_SEED ^ 0xD1, i), 100_000).unwrap();
            let r = bounds::verify_degree_window(&g, l, u).unwrap();
            assert!(r.hypothesis_ok);
            r.margin
        })
        .collect();
    let worst = margins.iter().copied().fold(f64::INFINITY, f64::min);
    outcome(
        worst >= -1e-12,
        format!("100 instances n = 30..=60, Γ = {:.4e}, min margin {worst:.4}", gamma(l, u)),
    )
}

fn kemeny() -> Outcome {
    let checked = AtomicU64::new(0);
    let failed = AtomicU64::new(0);
    for_all_graphs(6, |g| {
        if g.is_connected() {
            checked.fetch_add(1, Ordering::Relaxed);
            if !bounds::verify_kemeny_sandwich(g).unwrap().holds {
                failed.fetch_add(1, Ordering::Relaxed);
            }
        }
    });
    let random_failed = (0..100u64)
        .into_par_iter()
        .filter(|&i| {
            let g = random_connected(2000 + i, 2 + i as usize % 29, 0.3);
            !bounds::verify_kemeny_sandwich(&g).unwrap().holds
        })
        .count();
    let (c, f) = (checked.into_inner(), failed.into_inner());
    outcome(
        f == 0 && random_failed == 0,
        format!("{c} connected graphs n <= 6 ({f} failures), 100 random n <= 30 ({random_failed} failures)"),
    )
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("GAPFORGE_THREADS") {
        if let Ok(t) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
        }
    }
    let mut all = true;
    let mut report = |id: &str, name: &str, start: Instant, o: Outcome| {
        all &= o.pass;
        println!(
            "{id} {name}: {} ({:.1}s) {}",
            if o.pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            o.detail
        );
    };
    let t = Instant::now();
    report("AC1", "complete-graph gap", t, complete_graph_gap());
    let t = Instant::now();
    report("AC2", "two-cliques gap", t, two_cliques_gap());
    let t = Instant::now();
    let (main1, diam2) = exhaustive_main1_diam2();
    report("AC3", "max-gap lower bound, all graphs n <= 7", t, main1);
    report("AC4", "diameter-2 bound, all graphs n <= 7", t, diam2);
    let t = Instant::now();
    report("AC5", "Cheeger sandwich", t, cheeger());
    let t = Instant::now();
    report("AC6", "coupling marginals", t, coupling_marginals());
    let t = Instant::now();
    report("AC7", "coupling dominates TV", t, coupling_dominates());
    let t = Instant::now();
    report("AC8", "Monte Carlo tail consistency", t, monte_carlo());
    let t = Instant::now();
    report("AC9", "G_{r,m} checks", t, grm_suite());
    let t = Instant::now();
    report("AC10", "counterexample gap sum below 2/sqrt(n)", t, counterexample());
    let t = Instant::now();
    report("AC11", "degree-window bound", t, degree_window());
    let t = Instant::now();
    report("AC12", "Kemeny sandwich", t, kemeny());
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
