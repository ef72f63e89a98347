use aec_core::colouring::properness_violations;
use aec_core::graph::generate_random_regular;
use aec_core::nibble::{build_cycle_registry, init_state_unchecked};
use aec_core::reservation::sample_reserved_sets;
use aec_core::schedule::schedule_with_iterations;
use aec_core::Graph;
use proptest::prelude::*;

fn graph_from_bits(n: usize, bits: u64) -> Graph {
    let pairs = (0..n).flat_map(|j| (0..j).map(move |i| (i, j)));
    Graph::new(n, pairs.enumerate().filter(|(k, _)| bits >> k & 1 == 1).map(|(_, p)| p)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn iterations_preserve_list_and_colour_invariants(n in 10usize..40, d in 3usize..7, eps in 0.3f64..=1.0, seed: u64) {
        prop_assume!(d < n && n * d % 2 == 0);
        let g = generate_random_regular(n, d, seed).unwrap();
        let reserved = sample_reserved_sets(&g, eps, seed);
        let schedule = schedule_with_iterations(eps, d, 3, 4).unwrap();
        let mut st = init_state_unchecked(&g, &reserved, &schedule, None).unwrap();
        for it in 0..4u64 {
            st.truncate_lists();
            let before: Vec<Vec<u32>> = (0..g.m()).map(|e| st.list(e).to_vec()).collect();
            let was: Vec<Option<u32>> = st.colouring().colours().to_vec();
            let mut again = st.clone();
            st.run_iteration(seed ^ it);
            again.run_iteration(seed ^ it);
            prop_assert_eq!(st.colouring(), again.colouring());
            prop_assert!(st.counts_consistent());
            let chi = st.colouring();
            prop_assert!(properness_violations(&g, chi).unwrap().is_empty());
            for e in 0..g.m() {
                let (u, v) = g.edge(e);
                match chi.get(e) {
                    Some(c) => {
                        prop_assert!(!reserved.contains(u, c) && !reserved.contains(v, c));
                        if was[e].is_none() {
                            prop_assert!(before[e].contains(&c), "edge {} took a colour outside its list", e);
                        } else {
                            prop_assert_eq!(was[e], Some(c));
                        }
                        prop_assert!(st.list(e).is_empty());
                    }
                    None => {
                        for &c in st.list(e) {
                            prop_assert!(before[e].contains(&c), "list of {} grew", e);
                            prop_assert!(!reserved.contains(u, c) && !reserved.contains(v, c));
                            let used = g.incident(u).iter().chain(g.incident(v)).any(|&(_, f)| chi.get(f) == Some(c));
                            prop_assert!(!used, "list of {} keeps colour {} used next to it", e, c);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn registry_lists_every_short_cycle(n in 3usize..=8, bits: u64, l_max in 3usize..=8) {
        let g = graph_from_bits(n, bits);
        let registry = build_cycle_registry(&g, l_max).unwrap();
        let mut got: Vec<Vec<usize>> = registry
            .cycles
            .iter()
            .map(|c| {
                let mut e = c.edges.clone();
                e.sort_unstable();
                e
            })
            .collect();
        got.sort();
        let want: Vec<Vec<usize>> =
            aec_oracles::all_cycles(n, g.edges()).into_iter().filter(|c| c.len() <= l_max).collect();
        prop_assert_eq!(got, want);
        for c in &registry.cycles {
            prop_assert_eq!(c.vertices[0], *c.vertices.iter().min().unwrap());
            prop_assert!(c.vertices[1] < *c.vertices.last().unwrap());
        }
    }
}
