use proptest::prelude::*;

use gapforge::bottleneck::{bottleneck_exact, cheeger_check};
use gapforge::bounds::verify_main1;
use gapforge::coupling::{build_kernel, common_neighbor_pairs, d2, verify_marginals, CouplingKind};
use gapforge::enumerate::graph_from_mask;
use gapforge::spectra::{self, TestFunction};
use gapforge::{parse_edge_list, Graph};

fn graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (2..=max_n).prop_flat_map(|n| {
        let pairs = n * (n - 1) / 2;
        (0..(1u64 << pairs)).prop_map(move |mask| graph_from_mask(n, mask))
    })
}

fn connected(max_n: usize) -> impl Strategy<Value = Graph> {
    graph(max_n).prop_filter("connected", Graph::is_connected)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn complement_is_an_involution(g in graph(9)) {
        prop_assert_eq!(g.complement().complement(), g.clone());
        let n = g.n();
        prop_assert_eq!(g.edge_count() + g.complement().edge_count(), n * (n - 1) / 2);
    }

    #[test]
    fn edge_list_round_trip(g in graph(9)) {
        prop_assert_eq!(parse_edge_list(&g.to_edge_list()).unwrap(), g);
    }

    #[test]
    fn walk_spectrum_is_well_formed(g in connected(9)) {
        let s = spectra::spectrum(&g, false).unwrap();
        prop_assert!((s.eigenvalues[0] - 1.0).abs() <= 1e-10);
        prop_assert!(s.eigenvalues.iter().all(|&l| (-1.0 - 1e-10..=1.0 + 1e-10).contains(&l)));
        prop_assert!(s.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!((s.stationary.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        let lazy = spectra::spectrum(&g, true).unwrap();
        prop_assert!((lazy.gap - s.gap / 2.0).abs() <= 1e-10);
        prop_assert!(lazy.eigenvalues.iter().all(|&l| l >= -1e-10));
    }

    #[test]
    fn rayleigh_quotient_bounds_gap(g in connected(8), raw in prop::collection::vec(-1.0f64..1.0, 8)) {
        let pi = spectra::stationary_distribution(&g).unwrap();
        let mut f: Vec<f64> = raw[..g.n()].to_vec();
        let mean: f64 = f.iter().zip(&pi).map(|(x, p)| x * p).sum();
        f.iter_mut().for_each(|x| *x -= mean);
        prop_assume!(f.iter().any(|x| x.abs() > 1e-6));
        let q = spectra::rayleigh_upper_bound(&g, &TestFunction(f)).unwrap();
        prop_assert!(spectra::spectral_gap(&g).unwrap() <= q + 1e-9);
    }

    #[test]
    fn cheeger_sandwich(g in graph(9).prop_filter("no isolated vertex", |g| g.isolated_vertex().is_none())) {
        let r = cheeger_check(&g).unwrap();
        prop_assert!(r.holds, "{:?}", r);
        let cert = bottleneck_exact(&g).unwrap();
        prop_assert!(2 * cert.volume <= 2 * g.edge_count() as u64);
    }

    #[test]
    fn max_gap_lower_bound(g in graph(9)) {
        prop_assert!(verify_main1(&g).unwrap().holds);
    }

    #[test]
    fn coupling_marginals_match(g in connected(7), common in any::<bool>(), type2 in any::<bool>()) {
        let d = if common { common_neighbor_pairs(&g) } else { d2(&g) };
        let kind = if type2 { CouplingKind::Type2 } else { CouplingKind::Type1 };
        let k = build_kernel(&g, &d, kind).unwrap();
        prop_assert!(verify_marginals(&k) <= 1e-12);
        prop_assert!(k.row_sum_error() <= 1e-12);
    }
}
