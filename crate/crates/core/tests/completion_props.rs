use aec_core::baselines::repair_colour;
use aec_core::colouring::{find_bicoloured_cycles, is_acyclic, properness_violations};
use aec_core::finisher::{complete_colouring, FinalLists, FinishError};
use aec_core::graph::generate_random_regular;
use aec_core::Graph;
use proptest::prelude::*;
use std::collections::BTreeMap;

fn bounded_graph(n: usize, cap: usize, raw: &[(usize, usize)]) -> Graph {
    let mut deg = vec![0; n];
    let mut edges = Vec::new();
    for &(a, b) in raw {
        let (u, v) = ((a % n).min(b % n), (a % n).max(b % n));
        if u != v && deg[u] < cap && deg[v] < cap && !edges.contains(&(u, v)) {
            edges.push((u, v));
            deg[u] += 1;
            deg[v] += 1;
        }
    }
    Graph::new(n, edges).unwrap()
}

#[test]
fn gaps_refilled_from_single_colour_lists() {
    let g = generate_random_regular(30, 4, 9).unwrap();
    let full = repair_colour(&g, 12, 9, 1_000_000).unwrap().colouring;
    let mut chi = full.clone();
    let mut lists = BTreeMap::new();
    for e in (0..g.m()).step_by(3) {
        lists.insert(e, vec![full.get(e).unwrap()]);
        chi.set(e, None);
    }
    let done = complete_colouring(&g, &chi, &FinalLists { size: 1, lists }, 9, 10).unwrap();
    assert_eq!(done.colouring, full);
    assert_eq!(done.rounds, 0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn completion_extends_within_lists(n in 8usize..40, d in 3usize..6, seed: u64, drop_mask: u64, list_len in 2usize..6) {
        prop_assume!(d < n && n * d % 2 == 0);
        let g = generate_random_regular(n, d, seed).unwrap();
        let k = 4 * d as u32;
        let mut chi = repair_colour(&g, k, seed, 1_000_000).unwrap().colouring;
        let mut lists = BTreeMap::new();
        for e in 0..g.m() {
            if drop_mask >> (e % 64) & 1 == 1 {
                chi.set(e, None);
                let start = (seed as usize).wrapping_add(7 * e) % k as usize;
                let list: Vec<u32> = (0..list_len).map(|j| ((start + 5 * j) % k as usize) as u32).collect();
                lists.insert(e, list);
            }
        }
        let lists = FinalLists { size: list_len, lists };
        match complete_colouring(&g, &chi, &lists, seed, 200) {
            Ok(done) => {
                let out = &done.colouring;
                prop_assert!(out.is_total());
                prop_assert!(properness_violations(&g, out).unwrap().is_empty());
                prop_assert!(is_acyclic(&g, out).unwrap());
                for e in 0..g.m() {
                    match chi.get(e) {
                        Some(c) => prop_assert_eq!(out.get(e), Some(c)),
                        None => prop_assert!(lists.get(e).unwrap().contains(&out.get(e).unwrap())),
                    }
                }
            }
            Err(FinishError::RoundsExhausted { rounds, .. }) => prop_assert_eq!(rounds, 200),
            Err(e) => prop_assert!(false, "unexpected error {}", e),
        }
    }

    #[test]
    fn repair_output_is_verifier_clean(n in 4usize..40, cap in 1usize..6, raw in prop::collection::vec((0usize..40, 0usize..40), 0..120), seed: u64) {
        let g = bounded_graph(n, cap, &raw);
        let k = 4 * g.max_degree().max(1) as u32;
        let out = repair_colour(&g, k, seed, 1_000_000).unwrap();
        let chi = &out.colouring;
        prop_assert!(chi.is_total());
        prop_assert!(chi.colours().iter().flatten().all(|&c| c < k));
        prop_assert!(properness_violations(&g, chi).unwrap().is_empty());
        prop_assert!(find_bicoloured_cycles(&g, chi).unwrap().is_empty());
        prop_assert_eq!(&repair_colour(&g, k, seed, 1_000_000).unwrap().colouring, chi);
    }
}
