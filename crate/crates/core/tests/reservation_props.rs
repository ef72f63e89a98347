use aec_core::graph::{families, generate_random_regular};
use aec_core::numeric::palette_size;
use aec_core::reservation::{check_reservation, resample_until_valid, sample_reserved_sets, ReservedSets};
use aec_core::Graph;
use proptest::prelude::*;

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[test]
fn set_sizes_and_intersections_have_binomial_means() {
    let eps = 0.5;
    let g = generate_random_regular(400, 10, 1).unwrap();
    let palette = palette_size(eps, 10) as f64;
    let p = eps / (3.0 * (1.0 + eps).sqrt());
    let (mut sizes, mut meets) = (Vec::new(), Vec::new());
    for seed in 0..60 {
        let s = sample_reserved_sets(&g, eps, seed);
        assert_eq!(s.palette_size() as f64, palette);
        sizes.push((0..g.n()).map(|v| s.size(v) as f64).sum::<f64>() / g.n() as f64);
        meets.push(g.edges().iter().map(|&(u, v)| s.intersection_size(u, v) as f64).sum::<f64>() / g.m() as f64);
    }
    let (m1, se1) = mean_and_se(&sizes);
    assert!((m1 - palette * p).abs() <= 3.0 * se1, "mean |S_v| {m1}, expected {}", palette * p);
    let (m2, se2) = mean_and_se(&meets);
    assert!((m2 - palette * p * p).abs() <= 3.0 * se2, "mean |S_u ∩ S_v| {m2}, expected {}", palette * p * p);
}

#[test]
fn resampling_is_seeded_and_sound() {
    let g = families::star(40);
    for seed in 0..5 {
        let a = resample_until_valid(&g, 1.0, seed, 10_000);
        let b = resample_until_valid(&g, 1.0, seed, 10_000);
        match (a, b) {
            (Ok(a), Ok(b)) => {
                assert_eq!(a.sets, b.sets);
                assert_eq!(a.rounds, b.rounds);
                assert!(check_reservation(&g, &a.sets).is_empty());
            }
            (Err(a), Err(b)) => assert_eq!(a.to_string(), b.to_string()),
            _ => panic!("same seed, different outcome"),
        }
    }
}

/// (A.1)–(A.3) recounted from the sets.
fn recount(g: &Graph, s: &ReservedSets) -> (Vec<usize>, Vec<usize>, Vec<(usize, u32)>) {
    let (eps, d) = (s.epsilon(), g.max_degree() as f64);
    let a = (0..g.n()).filter(|&v| s.colours(v).len() as f64 > 4.0 * eps * d / 9.0).collect();
    let b = (0..g.m())
        .filter(|&e| {
            let (u, v) = g.edge(e);
            let both = s.colours(u).iter().filter(|c| s.colours(v).contains(c)).count();
            (both as f64) < eps * eps * d / 18.0
        })
        .collect();
    let mut c = Vec::new();
    for v in 0..g.n() {
        for col in 0..s.palette_size() {
            let k = g.neighbours(v).filter(|&w| s.colours(w).contains(&col)).count();
            if k as f64 > eps * d / 2.0 {
                c.push((v, col));
            }
        }
    }
    (a, b, c)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn check_matches_recount(n in 6usize..30, d in 2usize..6, eps in 0.2f64..=1.0, seed: u64) {
        prop_assume!(d < n && n * d % 2 == 0);
        let g = generate_random_regular(n, d, seed).unwrap();
        let s = sample_reserved_sets(&g, eps, seed);
        let report = check_reservation(&g, &s);
        let (a, b, c) = recount(&g, &s);
        prop_assert_eq!(report.a.iter().map(|x| x.0).collect::<Vec<_>>(), a);
        prop_assert_eq!(report.b.iter().map(|x| x.0).collect::<Vec<_>>(), b);
        prop_assert_eq!(report.c.iter().map(|x| (x.0, x.1)).collect::<Vec<_>>(), c);
        prop_assert_eq!(ReservedSets::from_json(&s.to_json(), eps).unwrap(), s);
    }
}
