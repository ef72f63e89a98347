use super::*;
use crate::graph::{families, generate_random_regular};
use crate::reservation::resample_until_valid;
use crate::schedule::schedule_with_iterations;

fn one_colour_schedule() -> ScheduleParams {
    ScheduleParams::from_sequences(0.5, 1, 3, vec![1.0, 1.0], vec![1.0, 1.0], vec![1.0, 1.0]).unwrap()
}

#[test]
fn probability_formulas() {
    assert_eq!(keep_probability(1000.0, 1, 1), 1.0);
    assert_eq!(keep_probability(1000.0, 900, 800), 0.999f64.powi(1698));
    let l = 5000.0;
    let p = keep_probability(l, 5000, 5000);
    assert!((p - (-2.0f64).exp()).abs() < 1e-3);
    assert_eq!(colour_survival_probability(1000.0, 0), 1.0);
    assert!((colour_survival_probability(1000.0, 1000) - (1.0 - (-2.0f64).exp())).abs() < 1e-15);
    assert!((colour_survival_probability(1000.0, 700) - 0.905_265).abs() < 1e-6);
    assert_eq!(edge_coin_probability(0.1), (0.0, true));
    let (eq, c) = edge_coin_probability(1.0);
    assert!(!c && (eq - (1.0 - (-2.0f64).exp())).abs() < 1e-15);
    let (vq, c) = vertex_coin_probability(1.0);
    assert!(!c && (vq - (-2.0f64).exp()).abs() < 1e-15);
    assert_eq!(vertex_coin_probability(0.5), (0.0, true));
    assert_eq!(vertex_coin_probability(-0.5), (1.0, true));
}

#[test]
fn initial_lists() {
    let g = families::cycle(5);
    let s = schedule_with_iterations(0.5, 2, 5, 1).unwrap();
    let empty = ReservedSets::empty(5, 3, 0.5);
    let st = init_state_unchecked(&g, &empty, &s, None).unwrap();
    assert!((0..5).all(|e| st.list(e) == [0, 1, 2]));
    assert_eq!(st.t(0, 1), 2);
    let res = ReservedSets::from_sets(3, 0.5, vec![vec![0, 2], vec![2], vec![], vec![], vec![]]).unwrap();
    let st = init_state_unchecked(&g, &res, &s, None).unwrap();
    let e01 = g.edge_id(0, 1).unwrap();
    assert_eq!(st.list(e01), [1]);
    assert_eq!(st.r(0, 2), 1); // neighbour 1 reserves 2
    assert_eq!(st.r(1, 0), 1);
    assert!(st.counts_consistent());
    let k4 = families::complete(4);
    let s6 = schedule_with_iterations(0.5, 3, 6, 1).unwrap();
    let res4 = ReservedSets::empty(4, 5, 0.5);
    assert!(matches!(init_state_unchecked(&k4, &res4, &s6, None), Err(NibbleError::GirthTooSmall { .. })));
    assert!(matches!(init_state(&g, &empty, &s, None), Err(NibbleError::ReservationInvalid(_))));
}

#[test]
fn valid_reservation_gives_p0() {
    let g = families::star(2000);
    let res = resample_until_valid(&g, 0.5, 1, 1000).unwrap().sets;
    let s = schedule_with_iterations(0.5, 2000, 3, 2).unwrap();
    let reg = build_cycle_registry(&g, 6).unwrap();
    let st = init_state(&g, &res, &s, Some(&reg)).unwrap();
    for e in 0..g.m() {
        assert!(st.list(e).len() as f64 >= s.l(1));
    }
    let rep = st.check_properties();
    assert!(rep.is_empty(), "{rep:?}");
}

#[test]
fn empty_graph_only_advances() {
    let g = Graph::empty(3);
    let s = one_colour_schedule();
    let res = ReservedSets::empty(3, 3, 0.5);
    let mut st = init_state_unchecked(&g, &res, &s, None).unwrap();
    let stats = st.run_iteration(9);
    assert_eq!(st.iteration(), 2);
    assert_eq!(stats.assigned, 0);
    assert_eq!(st.colouring().coloured_count(), 0);
}

#[test]
fn isolated_edge_retention_is_e_minus_two() {
    let g = families::path(2);
    let s = one_colour_schedule();
    let res = ReservedSets::empty(2, 3, 0.5);
    let base = init_state_unchecked(&g, &res, &s, None).unwrap();
    let trials = 10_000;
    let mut kept = 0;
    for seed in 0..trials {
        let mut st = base.clone();
        st.run_iteration(seed);
        if st.colouring().get(0) == Some(0) {
            assert!(st.list(0).is_empty());
            kept += 1;
        } else {
            assert_eq!(st.list(0), [0]);
        }
    }
    let p = (-2.0f64).exp();
    let sigma = (p * (1.0 - p) / trials as f64).sqrt();
    let f = kept as f64 / trials as f64;
    assert!((f - p).abs() <= 3.0 * sigma, "frequency {f}");
}

#[test]
fn manual_list_emptying_is_a_p1_violation() {
    let g = families::cycle(6);
    let s = schedule_with_iterations(0.5, 2, 6, 1).unwrap();
    let res = ReservedSets::empty(6, 3, 0.5);
    let mut st = init_state_unchecked(&g, &res, &s, None).unwrap();
    assert!(st.check_properties().p1.is_empty());
    st.retain_list(2, |_| false);
    assert_eq!(st.check_properties().p1, vec![(2, 0)]);
    assert!(st.counts_consistent());
}

#[test]
fn iterations_keep_invariants() {
    let g = generate_random_regular(60, 6, 4).unwrap();
    let s = schedule_with_iterations(0.5, 6, 3, 3).unwrap();
    let res = crate::reservation::sample_reserved_sets(&g, 0.5, 4);
    let mut st = init_state_unchecked(&g, &res, &s, None).unwrap();
    for it in 0..3 {
        let before: Vec<Vec<Colour>> = (0..g.m()).map(|e| st.list(e).to_vec()).collect();
        st.run_iteration(100 + it);
        assert!(st.counts_consistent());
        assert!(properness_ok(&g, st.colouring()));
        for (e, prev) in before.iter().enumerate() {
            let (u, v) = g.edge(e);
            assert!(st.list(e).iter().all(|c| prev.contains(c)));
            assert!(st.list(e).iter().all(|&c| !res.contains(u, c) && !res.contains(v, c)));
            if let Some(c) = st.colouring().get(e) {
                assert!(!res.contains(u, c) && !res.contains(v, c));
            }
        }
    }
}

fn properness_ok(g: &Graph, chi: &PartialEdgeColouring) -> bool {
    crate::colouring::properness_violations(g, chi).unwrap().is_empty()
}

#[test]
fn all_free_cycle_meets_lambda_one() {
    let g = families::cycle(8);
    let s = schedule_with_iterations(0.5, 2, 8, 1).unwrap();
    let res = ReservedSets::empty(8, 3, 0.5);
    let st = init_state_unchecked(&g, &res, &s, None).unwrap();
    let reg = build_cycle_registry(&g, 8).unwrap();
    let recs = significant_pairs(&reg.cycles[0], &st, s.psi(1));
    assert_eq!(recs.len(), 3);
    for r in recs {
        assert_eq!(r.free, 8);
        assert!(r.significant);
        assert!(r.free as f64 >= s.lambda(1));
        assert_eq!(r.multiplicity, 1);
    }
}

#[test]
fn coloured_cycles() {
    let g = families::cycle(4);
    let s = schedule_with_iterations(0.5, 2, 4, 1).unwrap();
    let res = ReservedSets::empty(4, 6, 0.5);
    let mut st = init_state_unchecked(&g, &res, &s, None).unwrap();
    let reg = build_cycle_registry(&g, 4).unwrap();
    for (e, c) in [(0, 1), (1, 2), (2, 1), (3, 2)] {
        st.retain_list(e, |_| false);
        st.colouring.set(e, Some(c));
    }
    let recs = significant_pairs(&reg.cycles[0], &st, s.psi(1));
    assert_eq!(recs.len(), 1);
    assert!(recs[0].bicoloured && recs[0].significant && recs[0].free == 0);
    st.colouring.set(3, Some(5));
    assert!(significant_pairs(&reg.cycles[0], &st, s.psi(1)).is_empty());
}
