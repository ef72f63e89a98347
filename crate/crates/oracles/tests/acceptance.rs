//! Acceptance criteria 1–10, one PASS/FAIL line each. Exits non-zero when
//! any criterion fails.

use aec_core::baselines::repair_colour;
use aec_core::colouring::{
    brute_force_acyclic_index, find_bicoloured_cycles, properness_violations, AcyclicIndex, ColouringError,
};
use aec_core::graph::{bipartite_girth_six, families, generate_random_regular};
use aec_core::nibble::{cycle_multiplicity, init_state_unchecked, EdgeLabel, Multiplicity, NibblePolicy};
use aec_core::pipeline::{colour_with_nibble, PipelineConfig};
use aec_core::regularizer::{embed_step, host_graph, needed_host_degree};
use aec_core::reservation::{check_reservation, resample_until_valid, ReservedSets};
use aec_core::schedule::{compute_schedule, schedule_with_iterations, verify_schedule_lemmas, ScheduleParams};
use aec_core::{girth, Girth, Graph, PartialEdgeColouring};
use aec_oracles::{self as oracle, Label, PartitionSearch};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::process::ExitCode;
use std::time::{Duration, Instant};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn criterion_1() -> Verdict {
    let start = Instant::now();
    let corpus = oracle::connected_graphs_up_to(7);
    let (mut proper, mut improper, mut cycles_seen) = (0usize, 0usize, 0usize);
    for (gi, (n, edges)) in corpus.iter().enumerate() {
        let g = Graph::new(*n, edges.iter().copied()).unwrap();
        assert_eq!(g.edges(), &edges[..]);
        let cycles = oracle::all_cycles(*n, edges);
        let mut rng = StdRng::seed_from_u64(gi as u64);
        for trial in 0..10_000 {
            let mut colours: Vec<Option<u32>> =
                (0..edges.len()).map(|_| rng.gen_range(0..5u32).checked_sub(1)).collect();
            if trial % 2 == 0 {
                // drop colours clashing with an earlier edge
                for e in 0..edges.len() {
                    let (a, b) = edges[e];
                    let clash = (0..e).any(|f| {
                        let (c, d) = edges[f];
                        (a == c || a == d || b == c || b == d) && colours[f].is_some() && colours[f] == colours[e]
                    });
                    if clash {
                        colours[e] = None;
                    }
                }
            }
            let chi = PartialEdgeColouring::from_colours(4, colours.clone()).unwrap();
            let got = find_bicoloured_cycles(&g, &chi);
            if !oracle::is_proper(edges, &colours) {
                improper += 1;
                if !matches!(got, Err(ColouringError::NotProper { .. })) {
                    return verdict(false, format!("graph {gi} trial {trial}: improper colouring accepted"));
                }
                continue;
            }
            proper += 1;
            let want = oracle::bicoloured_cycles(&cycles, &colours);
            let mut got: Vec<Vec<usize>> = match got {
                Ok(v) => v
                    .into_iter()
                    .map(|c| {
                        let mut e = c.edges;
                        e.sort_unstable();
                        e
                    })
                    .collect(),
                Err(e) => return verdict(false, format!("graph {gi} trial {trial}: {e}")),
            };
            got.sort();
            if got != want {
                return verdict(false, format!("graph {gi} trial {trial}: {got:?} vs oracle {want:?}"));
            }
            cycles_seen += want.len();
        }
    }
    let elapsed = start.elapsed();
    verdict(
        elapsed < Duration::from_secs(120),
        format!(
            "{} graphs, {proper} proper and {improper} improper colourings, {cycles_seen} bicoloured cycles matched, {:.1}s (limit 120s)",
            corpus.len(),
            elapsed.as_secs_f64()
        ),
    )
}

fn criterion_2() -> Verdict {
    let mut bad = Vec::new();
    for n in 3..=9 {
        let got = brute_force_acyclic_index(&families::cycle(n), 6).unwrap();
        if got != AcyclicIndex::Exact(3) {
            bad.push(format!("C{n}: {got:?}"));
        }
    }
    let k4 = families::complete(4);
    let core = brute_force_acyclic_index(&k4, 8).unwrap();
    let reference = oracle::acyclic_index(4, k4.edges(), 8);
    let k4_ok = reference.is_some_and(|k| core == AcyclicIndex::Exact(k));
    verdict(bad.is_empty() && k4_ok, format!("C3..C9 mismatches {bad:?}; K4 core {core:?}, enumerator {reference:?}"))
}

fn criterion_3() -> Verdict {
    let start = Instant::now();
    let delta = 100_000_000;
    let girth = 10;
    let mut pass = true;
    let mut notes = Vec::new();
    for eps in [0.9, 0.5, 0.1, 0.01] {
        let p = match compute_schedule(eps, delta, girth) {
            Ok(p) => p,
            Err(e) => {
                pass = false;
                notes.push(format!("eps {eps}: {e}"));
                continue;
            }
        };
        let mut fails = Vec::new();
        let thr = p.threshold();
        let i = p.i_star;
        if !(i < 1000) {
            fails.push("i* not below guard".to_string());
        }
        if !(p.r(i + 1) < thr && p.r(i) >= thr) {
            fails.push(format!("R_i*={} R_i*+1={} threshold {thr}", p.r(i), p.r(i + 1)));
        }
        let lemmas = verify_schedule_lemmas(&p);
        if let Some(j) = lemmas.first_failure(&lemmas.close_l) {
            fails.push(format!("|L-L'| > L'^(5/6) first at i={j}"));
        }
        if let Some(j) = lemmas.first_failure(&lemmas.ratio) {
            fails.push(format!("L/T > 1+eps/9 first at i={j}"));
        }
        if (1..=i).any(|j| p.psi(j).exponent() != p.psi(j + 1).exponent() + 1) {
            fails.push("Psi_{i+1} != Psi_i/4".to_string());
        }
        if p.lambda(1) != 2.0 * p.k as f64 - 4.0 * p.psi(1).value() {
            fails.push("Lambda_1 != 2k - 4 Psi_1".to_string());
        }
        if !fails.is_empty() {
            pass = false;
        }
        notes.push(format!("eps {eps}: i*={i} {}", if fails.is_empty() { "ok".into() } else { fails.join(", ") }));
    }
    let elapsed = start.elapsed();
    pass &= elapsed < Duration::from_secs(1);
    verdict(pass, format!("{}; {:.3}s (limit 1s)", notes.join("; "), elapsed.as_secs_f64()))
}

/// Double star: centre edge `0–1`, 899 leaves on each centre, so every
/// colour of the truncated lists has `t = 900` at both centres.
fn criterion_4() -> Verdict {
    let leaves = 899;
    let n = 2 + 2 * leaves;
    let mut edges = vec![(0, 1)];
    edges.extend((2..2 + leaves).map(|w| (0, w)));
    edges.extend((2 + leaves..n).map(|w| (1, w)));
    let g = Graph::new(n, edges).unwrap();
    let palette = 1100;
    let reserved_colour = 1050;
    let mut sets = vec![Vec::new(); n];
    for set in sets.iter_mut().skip(2).take(450) {
        set.push(reserved_colour);
    }
    let reserved = ReservedSets::from_sets(palette, 0.1, sets).unwrap();
    let l = vec![1000.0; 2];
    let schedule = ScheduleParams::from_sequences(0.1, 900, 3, l, vec![900.0; 2], vec![450.0; 2]).unwrap();
    let mut base = init_state_unchecked(&g, &reserved, &schedule, None).unwrap();
    base.truncate_lists();
    let setup_ok = base.list_target() == 1000
        && (0..1000).all(|c| base.t(0, c) == 900 && base.t(1, c) == 900)
        && base.r(0, reserved_colour) == 450;
    if !setup_ok {
        return verdict(false, "synthetic state does not have L = 1000, t = 900, r = 450");
    }

    let trials = 100_000u64;
    let kept = (0..trials).filter(|&s| base.draw(s).retained[0].is_some()).count();
    let p = (-2.0f64).exp();
    let sigma = (p * (1.0 - p) / trials as f64).sqrt();
    let freq = kept as f64 / trials as f64;
    let retention_ok = (freq - p).abs() <= 3.0 * sigma;

    let rs: Vec<f64> = (0..1000u64)
        .map(|s| {
            let mut st = base.clone();
            st.run_iteration(1_000_000 + s);
            st.r(0, reserved_colour) as f64
        })
        .collect();
    let (mean, se) = mean_and_se(&rs);
    let target = (1.0 - p) * 450.0;
    let r_ok = (mean - target).abs() <= 3.0 * se;
    verdict(
        retention_ok && r_ok,
        format!(
            "retention {freq:.5} vs {p:.5} (3 sigma {:.5}); mean r {mean:.3} vs {target:.3} (3 SE {:.3})",
            3.0 * sigma,
            3.0 * se
        ),
    )
}

fn criterion_5() -> Verdict {
    let g = bipartite_girth_six(20, 50, 1).unwrap();
    if g.n() != 2000 || !g.is_regular() || g.max_degree() != 20 || !girth(&g).at_least(6) {
        return verdict(false, "instance is not a 20-regular graph on 2000 vertices with girth >= 6");
    }
    let eps = 0.5;
    let reserved = ReservedSets::empty(g.n(), aec_core::numeric::palette_size(eps, 20), eps);
    let schedule = schedule_with_iterations(eps, 20, 6, 1).unwrap();
    let base = init_state_unchecked(&g, &reserved, &schedule, None).unwrap();
    let seeds = 400u64;
    let means: Vec<f64> = (0..seeds)
        .map(|s| {
            let mut st = base.clone();
            st.run_iteration(s);
            let open = st.colouring().uncoloured_edges();
            open.iter().map(|&e| st.list(e).len() as f64).sum::<f64>() / open.len() as f64
        })
        .collect();
    let (mean, se) = mean_and_se(&means);
    let q = 1.0 - (-2.0f64).exp();
    let target = q * q * schedule.l(1);
    verdict(
        (mean - target).abs() <= 3.0 * se,
        format!(
            "mean l_2 {mean:.4} vs (1-e^-2)^2 L_1 = {target:.4} (3 SE {:.4}, {seeds} seeds; with floor(L_1) {:.4})",
            3.0 * se,
            q * q * schedule.l(1).floor()
        ),
    )
}

fn criterion_6() -> Verdict {
    let g = generate_random_regular(500, 100, 6).unwrap();
    let (mut ok, mut failed, mut unsound) = (0, 0, 0);
    let mut tried = 0;
    for seed in 0..100 {
        tried += 1;
        match resample_until_valid(&g, 0.5, seed, 1000) {
            Ok(r) => {
                ok += 1;
                if !check_reservation(&g, &r.sets).is_empty() {
                    unsound += 1;
                }
            }
            Err(_) => failed += 1,
        }
        if failed > 5 {
            break;
        }
    }
    let pass = failed <= 5 && unsound == 0;
    let note =
        if tried < 100 { format!(", stopped after {tried} seeds: 95 successes unreachable") } else { String::new() };
    verdict(pass, format!("{ok} succeeded, {failed} exhausted 1000 rounds, {unsound} unsound{note}"))
}

fn independent_palette(eps: f64, delta: usize) -> usize {
    let x = (1.0 + eps) * delta as f64;
    let r = x.round();
    if (x - r).abs() <= 1e-9 * x.max(1.0) {
        r as usize
    } else {
        x.ceil() as usize
    }
}

fn criterion_7() -> Verdict {
    let mut corpus: Vec<(String, Graph)> = vec![
        ("C30".into(), families::cycle(30)),
        ("P50".into(), families::path(50)),
        ("star300".into(), families::star(300)),
        ("petersen".into(), families::petersen()),
        ("heawood".into(), families::heawood()),
        ("bip6".into(), bipartite_girth_six(6, 13, 1).unwrap()),
    ];
    for s in 0..3 {
        corpus.push((format!("rr(100,4,{s})"), generate_random_regular(100, 4, s).unwrap()));
        corpus.push((format!("rr(200,10,{s})"), generate_random_regular(200, 10, s).unwrap()));
    }
    let strict = PipelineConfig::default();
    let lenient = PipelineConfig {
        eps: 1.0,
        iterations: Some(2),
        l_max: Some(0),
        policy: NibblePolicy { max_restarts: 2, lenient: true },
        ..Default::default()
    };
    let (mut runs, mut successes) = (0, 0);
    let mut problems = Vec::new();
    for (name, g) in &corpus {
        for cfg in [&strict, &lenient] {
            for seed in 0..3 {
                let cfg = PipelineConfig { seed, ..cfg.clone() };
                let out = colour_with_nibble(g, &cfg);
                runs += 1;
                if !out.report.success {
                    continue;
                }
                successes += 1;
                let chi = out.colouring.as_ref().unwrap();
                let nib = out.nibble_colouring.as_ref().unwrap();
                let reserved = out.reserved.as_ref().unwrap();
                let colours = chi.colours();
                let mut issues = Vec::new();
                if !chi.is_total() {
                    issues.push("not total");
                }
                if !properness_violations(g, chi).unwrap().is_empty() || !oracle::is_proper(g.edges(), colours) {
                    issues.push("improper");
                } else if !find_bicoloured_cycles(g, chi).unwrap().is_empty() {
                    issues.push("bicoloured cycle");
                }
                let used: std::collections::BTreeSet<u32> = colours.iter().flatten().copied().collect();
                if used.len() > independent_palette(cfg.eps, g.max_degree())
                    || used.iter().any(|&c| c as usize >= independent_palette(cfg.eps, g.max_degree()))
                {
                    issues.push("too many colours");
                }
                for e in 0..g.m() {
                    let (u, v) = g.edge(e);
                    if let Some(c) = nib.get(e) {
                        if reserved.contains(u, c) || reserved.contains(v, c) || chi.get(e) != Some(c) {
                            issues.push("nibble colour from a reserved set");
                            break;
                        }
                    }
                }
                if !issues.is_empty() {
                    problems.push(format!("{name} seed {seed}: {issues:?}"));
                }
            }
        }
    }
    let note = if successes == 0 { "; no run succeeded, so soundness holds vacuously" } else { "" };
    verdict(
        problems.is_empty(),
        format!("{successes}/{runs} runs reported success, {} unsound {problems:?}{note}", problems.len()),
    )
}

fn criterion_8() -> Verdict {
    let start = Instant::now();
    let mut bad = Vec::new();
    let mut steps = 0;
    for s in 0..50u64 {
        let n = 2 * (4 + (s as usize * 37) % 97);
        let g = generate_random_regular(n, 3, s).unwrap();
        match repair_colour(&g, 4 * 3 - 4, s, 10_000_000) {
            Ok(out) => {
                steps += out.steps;
                let chi = &out.colouring;
                let clean = chi.is_total()
                    && properness_violations(&g, chi).unwrap().is_empty()
                    && oracle::is_proper(g.edges(), chi.colours())
                    && find_bicoloured_cycles(&g, chi).unwrap().is_empty();
                if !clean {
                    bad.push(format!("n={n} seed {s}: verifier found violations"));
                }
            }
            Err(e) => bad.push(format!("n={n} seed {s}: {e}")),
        }
    }
    let elapsed = start.elapsed();
    verdict(
        bad.is_empty() && elapsed < Duration::from_secs(60),
        format!("{}/50 clean, {steps} steps total, {:.2}s (limit 60s) {bad:?}", 50 - bad.len(), elapsed.as_secs_f64()),
    )
}

fn criterion_9() -> Verdict {
    let mut checked = 0usize;
    for l in 3..=10 {
        let search = PartitionSearch::new(l);
        let mut labels = vec![Label::C; l];
        let mut core = vec![EdgeLabel::COnly; l];
        for code in 0..4usize.pow(l as u32) {
            let mut x = code;
            for i in 0..l {
                let (a, b) = match x % 4 {
                    0 => (Label::C, EdgeLabel::COnly),
                    1 => (Label::D, EdgeLabel::DOnly),
                    2 => (Label::Both, EdgeLabel::Both),
                    _ => (Label::Neither, EdgeLabel::None),
                };
                labels[i] = a;
                core[i] = b;
                x /= 4;
            }
            let want = match search.min_arcs(&labels) {
                Some(k) => Multiplicity::Arcs(k),
                None => Multiplicity::Incompatible,
            };
            let got = cycle_multiplicity(&core);
            if got != want {
                return verdict(false, format!("labels {labels:?}: core {got:?}, search {want:?}"));
            }
            checked += 1;
        }
    }
    verdict(true, format!("{checked} label sequences, lengths 3..=10"))
}

fn random_bounded_graph(rng: &mut StdRng) -> Graph {
    loop {
        let n = rng.gen_range(4..=10);
        let cap = rng.gen_range(2..=4);
        let mut deg = vec![0; n];
        let mut edges = Vec::new();
        for _ in 0..3 * n {
            let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
            let (u, v) = (u.min(v), u.max(v));
            if u != v && deg[u] < cap && deg[v] < cap && !edges.contains(&(u, v)) {
                edges.push((u, v));
                deg[u] += 1;
                deg[v] += 1;
            }
        }
        let g = Graph::new(n, edges).unwrap();
        if g.m() > 0 && !g.is_regular() {
            return g;
        }
    }
}

fn criterion_10() -> Verdict {
    let mut rng = StdRng::seed_from_u64(10);
    let mut bad = Vec::new();
    let mut sizes = Vec::new();
    for case in 0..20u64 {
        let g = random_bounded_graph(&mut rng);
        let target = rng.gen_range(3..=6);
        let degree = needed_host_degree(&g, target, case);
        let step = host_graph(degree, target, case).and_then(|h| embed_step(&g, target, &h, case));
        let step = match step {
            Ok(s) => s,
            Err(e) => {
                bad.push(format!("case {case}: {e}"));
                continue;
            }
        };
        let out = &step.graph;
        let want_girth = match girth(&g) {
            Girth::Finite(x) => x.min(target),
            Girth::Unbounded => target,
        };
        let girth_ok = match girth(out) {
            Girth::Finite(x) => x >= want_girth,
            Girth::Unbounded => true,
        };
        if out.max_degree() != g.max_degree() || out.min_degree() != g.min_degree() + 1 || !girth_ok {
            bad.push(format!(
                "case {case}: degrees [{}, {}] -> [{}, {}], girth {} -> {} (target {target})",
                g.min_degree(),
                g.max_degree(),
                out.min_degree(),
                out.max_degree(),
                girth(&g),
                girth(out)
            ));
        }
        sizes.push(out.n());
    }
    verdict(bad.is_empty(), format!("20 cases, output sizes {sizes:?} {bad:?}"))
}

type Criterion = (&'static str, fn() -> Verdict);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("verifier matches the all-cycles oracle", criterion_1),
        ("acyclic index of cycles and K4", criterion_2),
        ("schedule at delta = 1e8", criterion_3),
        ("equalizing calibration", criterion_4),
        ("expectation drift of list sizes", criterion_5),
        ("reservation resampling", criterion_6),
        ("end-to-end soundness", criterion_7),
        ("repair baseline on cubic graphs", criterion_8),
        ("multiplicity against partition search", criterion_9),
        ("regularizer step", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = run();
        failed += !v.pass as usize;
        println!(
            "{} criterion {}: {name}: {} [{:.1}s]",
            if v.pass { "PASS" } else { "FAIL" },
            i + 1,
            v.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
