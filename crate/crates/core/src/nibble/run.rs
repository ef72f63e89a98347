use super::{
    can_become_bicoloured, init_state, init_state_unchecked, CycleRegistry, IterationStats, NibbleError, P4Status,
    PropertyReport,
};
use crate::colouring::{find_bicoloured_cycles, properness_violations, BicolouredCycle, Colour, PartialEdgeColouring};
use crate::graph::Graph;
use crate::reservation::ReservedSets;
use crate::rng::{self, Domain};
use crate::schedule::{stopping_threshold, ScheduleParams};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct NibblePolicy {
    /// Extra attempts per iteration after the first one fails (P.1)–(P.4).
    pub max_restarts: usize,
    /// Record violations instead of failing; the final verifier still decides success.
    pub lenient: bool,
}

impl Default for NibblePolicy {
    fn default() -> Self {
        NibblePolicy { max_restarts: 20, lenient: false }
    }
}

/// (B.1)–(B.3) plus the unconditional checks of the partial colouring.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FinalReport {
    /// Coloured edges `uv` whose colour lies in `S_u ∪ S_v`.
    pub b1: Vec<usize>,
    pub b2_threshold: f64,
    /// `(v, c, count)` with `c ∈ S_v` and more than the threshold uncoloured
    /// neighbours `u` with `c ∈ S_u`.
    pub b2: Vec<(usize, Colour, usize)>,
    /// Registry cycles with at most two uncoloured edges that can become
    /// bicoloured using reserved colours.
    pub b3: Vec<usize>,
    pub b3_status: P4Status,
    pub improper: Vec<(usize, usize)>,
    pub bicoloured: Vec<BicolouredCycle>,
}

impl FinalReport {
    pub fn is_clean(&self) -> bool {
        self.b1.is_empty()
            && self.b2.is_empty()
            && self.b3.is_empty()
            && self.improper.is_empty()
            && self.bicoloured.is_empty()
    }
}

impl std::fmt::Display for FinalReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "B.1 {} / B.2 {} / B.3 {} / improper {} / bicoloured {}",
            self.b1.len(),
            self.b2.len(),
            self.b3.len(),
            self.improper.len(),
            self.bicoloured.len()
        )
    }
}

pub fn check_final(
    g: &Graph,
    reserved: &ReservedSets,
    colouring: &PartialEdgeColouring,
    registry: Option<&CycleRegistry>,
) -> FinalReport {
    let b1 = (0..g.m())
        .filter(|&e| {
            let (u, v) = g.edge(e);
            colouring.get(e).is_some_and(|c| reserved.contains(u, c) || reserved.contains(v, c))
        })
        .collect();
    let b2_threshold = stopping_threshold(reserved.epsilon(), g.max_degree());
    let mut b2 = Vec::new();
    for v in 0..g.n() {
        for c in reserved.set(v).ones() {
            let c = c as Colour;
            let count =
                g.incident(v).iter().filter(|&&(u, e)| colouring.get(e).is_none() && reserved.contains(u, c)).count();
            if count as f64 > b2_threshold {
                b2.push((v, c, count));
            }
        }
    }
    let (b3, b3_status) = match registry {
        None => (Vec::new(), P4Status::NotTracked),
        Some(reg) => {
            let options = |e: usize| {
                let (u, v) = g.edge(e);
                reserved.intersection(u, v)
            };
            let bad = reg
                .cycles
                .iter()
                .enumerate()
                .filter(|(_, c)| c.edges.iter().filter(|&&e| colouring.get(e).is_none()).count() < 3)
                .filter(|(_, c)| can_become_bicoloured(c, colouring, options))
                .map(|(i, _)| i)
                .collect();
            (bad, P4Status::Checked)
        }
    };
    let improper = properness_violations(g, colouring).expect("colouring matches graph");
    let bicoloured = if improper.is_empty() { find_bicoloured_cycles(g, colouring).unwrap() } else { Vec::new() };
    FinalReport { b1, b2_threshold, b2, b3, b3_status, improper, bicoloured }
}

#[derive(Clone, Debug)]
pub struct NibbleOutcome {
    pub colouring: PartialEdgeColouring,
    pub trace: Vec<IterationStats>,
    /// Property report after each accepted iteration.
    pub reports: Vec<PropertyReport>,
    pub final_report: FinalReport,
}

/// Runs `i*` iterations, restarting an iteration with a fresh derived seed
/// while (P.1)–(P.4) fail, then checks (B.1)–(B.3).
///
/// `trace` receives one record per attempted iteration, also on failure.
pub fn run_nibble(
    g: &Graph,
    reserved: &ReservedSets,
    schedule: &ScheduleParams,
    registry: Option<&CycleRegistry>,
    seed: u64,
    policy: NibblePolicy,
    trace: &mut Vec<IterationStats>,
) -> Result<NibbleOutcome, NibbleError> {
    let mut state = if policy.lenient {
        init_state_unchecked(g, reserved, schedule, registry)?
    } else {
        init_state(g, reserved, schedule, registry)?
    };
    let p0 = state.check_properties();
    if !p0.is_empty() && !policy.lenient {
        return Err(NibbleError::InitialPropertiesFailed(Box::new(p0)));
    }
    let start = trace.len();
    let mut reports = Vec::new();
    for i in 1..=schedule.i_star {
        if state.list_target() < 1 {
            return Err(NibbleError::ListTargetBelowOne { iteration: i });
        }
        let mut best: Option<(usize, _, PropertyReport)> = None;
        for attempt in 0..=policy.max_restarts {
            let mut cand = state.clone();
            let s = rng::derive_key(seed, Domain::Restart, &[i as u64, attempt as u64]);
            let mut stats = cand.run_iteration(s);
            let report = cand.check_properties();
            stats.attempt = attempt;
            stats.property_violations = report.violation_count();
            trace.push(stats);
            let count = report.violation_count();
            if best.as_ref().is_none_or(|(c, _, _)| count < *c) {
                best = Some((count, cand, report));
            }
            if count == 0 {
                break;
            }
        }
        let (count, cand, report) = best.expect("at least one attempt");
        if count > 0 && !policy.lenient {
            return Err(NibbleError::RestartsExhausted {
                iteration: i,
                restarts: policy.max_restarts,
                report: Box::new(report),
            });
        }
        state = cand;
        reports.push(report);
    }
    let final_report = check_final(g, reserved, state.colouring(), registry);
    if !final_report.is_clean() && !policy.lenient {
        return Err(NibbleError::FinalChecksFailed(Box::new(final_report)));
    }
    Ok(NibbleOutcome { colouring: state.into_colouring(), trace: trace[start..].to_vec(), reports, final_report })
}
