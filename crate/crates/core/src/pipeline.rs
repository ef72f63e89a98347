//! Reservation, nibble and completion run end to end, with the delivered
//! colouring checked by the unconditional verifier.

use crate::colouring::{find_bicoloured_cycles, properness_violations, PartialEdgeColouring};
use crate::finisher::{
    build_final_lists, build_reserved_lists, check_finishing_hypotheses, complete_colouring, gamma, HypothesisReport,
};
use crate::graph::{girth, Girth, Graph};
use crate::nibble::{
    build_cycle_registry_with_cap, run_nibble, FinalReport, IterationStats, NibblePolicy, DEFAULT_REGISTRY_CAP,
};
use crate::numeric::palette_size;
use crate::reservation::{check_reservation, resample_until_valid, ReservationError, ReservedSets};
use crate::schedule::{compute_schedule, schedule_with_iterations, StopRule};
use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PipelineConfig {
    pub eps: f64,
    pub seed: u64,
    /// Registry cycle length bound; `None` means twice the girth and
    /// `Some(0)` turns cycle tracking off.
    pub l_max: Option<usize>,
    /// Forces `i*` instead of the stopping rule.
    pub iterations: Option<usize>,
    /// With `policy.lenient` the run goes on past failed (A), (P), (B) and
    /// completion-hypothesis checks and the final verifier decides; an
    /// invalid reservation is kept as last sampled, and completion lists hold
    /// all of `S_u ∩ S_v`.
    pub policy: NibblePolicy,
    pub reservation_rounds: usize,
    pub finish_rounds: usize,
    pub registry_cap: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            eps: 0.5,
            seed: 0,
            l_max: None,
            iterations: None,
            policy: NibblePolicy::default(),
            reservation_rounds: 1000,
            finish_rounds: 1000,
            registry_cap: DEFAULT_REGISTRY_CAP,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Stage {
    Reservation,
    Schedule,
    Registry,
    Nibble,
    FinalLists,
    Finishing,
    Verification,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PipelineReport {
    pub n: usize,
    pub m: usize,
    pub delta: usize,
    pub eps: f64,
    pub seed: u64,
    pub palette_size: u32,
    pub girth: Girth,
    /// Girth handed to the schedule; a forest uses `n + 1`.
    pub schedule_girth: usize,
    pub reservation_rounds: usize,
    pub reservation_violations: usize,
    pub i_star: Option<usize>,
    pub stop_rule: Option<StopRule>,
    pub registry_cycles: Option<usize>,
    pub nibble_coloured: usize,
    pub final_checks: Option<FinalReport>,
    pub hypotheses: Option<HypothesisReport>,
    pub finish_rounds: Option<usize>,
    pub colours_used: usize,
    pub improper: usize,
    pub bicoloured: usize,
    /// Nibble-coloured edges `uv` avoid `S_u ∪ S_v`.
    pub nibble_provenance: Option<bool>,
    /// Completion-coloured edges `uv` use a colour of `S_u ∩ S_v`.
    pub finish_provenance: Option<bool>,
    pub success: bool,
    pub failed_stage: Option<Stage>,
    pub message: Option<String>,
}

#[derive(Clone, Debug)]
pub struct PipelineOutcome {
    pub report: PipelineReport,
    /// The total colouring, present only on success.
    pub colouring: Option<PartialEdgeColouring>,
    /// The colouring as the nibble left it, present only on success.
    pub nibble_colouring: Option<PartialEdgeColouring>,
    pub trace: Vec<IterationStats>,
    pub reserved: Option<ReservedSets>,
}

fn fail(mut report: PipelineReport, stage: Stage, msg: String) -> PipelineReport {
    report.success = false;
    report.failed_stage = Some(stage);
    report.message = Some(msg);
    report
}

pub fn colour_with_nibble(g: &Graph, cfg: &PipelineConfig) -> PipelineOutcome {
    let delta = g.max_degree();
    let gr = girth(g);
    let schedule_girth = gr.finite().unwrap_or(g.n() + 1);
    let mut report = PipelineReport {
        n: g.n(),
        m: g.m(),
        delta,
        eps: cfg.eps,
        seed: cfg.seed,
        palette_size: palette_size(cfg.eps, delta),
        girth: gr,
        schedule_girth,
        reservation_rounds: 0,
        reservation_violations: 0,
        i_star: None,
        stop_rule: None,
        registry_cycles: None,
        nibble_coloured: 0,
        final_checks: None,
        hypotheses: None,
        finish_rounds: None,
        colours_used: 0,
        improper: 0,
        bicoloured: 0,
        nibble_provenance: None,
        finish_provenance: None,
        success: false,
        failed_stage: None,
        message: None,
    };
    let mut trace = Vec::new();
    let done =
        |report, trace, reserved| PipelineOutcome { report, colouring: None, nibble_colouring: None, trace, reserved };

    let reserved = match resample_until_valid(g, cfg.eps, cfg.seed, cfg.reservation_rounds) {
        Ok(r) => {
            report.reservation_rounds = r.rounds;
            r.sets
        }
        Err(ReservationError::Exhausted { rounds, report: rep, last }) => {
            report.reservation_rounds = rounds;
            report.reservation_violations = rep.violation_count();
            if !cfg.policy.lenient {
                let msg = format!("{} events still violated after {rounds} rounds", rep.violation_count());
                return done(fail(report, Stage::Reservation, msg), trace, Some(*last));
            }
            *last
        }
        Err(e) => return done(fail(report, Stage::Reservation, e.to_string()), trace, None),
    };
    debug_assert_eq!(check_reservation(g, &reserved).violation_count(), report.reservation_violations);

    let schedule = match cfg.iterations {
        Some(k) => schedule_with_iterations(cfg.eps, delta, schedule_girth, k),
        None => compute_schedule(cfg.eps, delta, schedule_girth),
    };
    let schedule = match schedule {
        Ok(s) => s,
        Err(e) => return done(fail(report, Stage::Schedule, e.to_string()), trace, Some(reserved)),
    };
    report.i_star = Some(schedule.i_star);
    report.stop_rule = Some(schedule.stop);

    let l_max = cfg.l_max.unwrap_or(2 * schedule_girth);
    let registry = if l_max == 0 {
        None
    } else {
        match build_cycle_registry_with_cap(g, l_max, cfg.registry_cap) {
            Ok(r) => Some(r),
            Err(e) => return done(fail(report, Stage::Registry, e.to_string()), trace, Some(reserved)),
        }
    };
    report.registry_cycles = registry.as_ref().map(|r| r.len());

    let outcome = match run_nibble(g, &reserved, &schedule, registry.as_ref(), cfg.seed, cfg.policy, &mut trace) {
        Ok(o) => o,
        Err(e) => return done(fail(report, Stage::Nibble, e.to_string()), trace, Some(reserved)),
    };
    let chi = outcome.colouring;
    report.nibble_coloured = chi.coloured_count();
    report.final_checks = Some(outcome.final_report);

    let gm = gamma(cfg.eps);
    let lists = if cfg.policy.lenient {
        build_reserved_lists(g, &chi, &reserved, gm)
    } else {
        build_final_lists(g, &chi, &reserved, gm)
    };
    let lists = match lists {
        Ok(l) => l,
        Err(e) => return done(fail(report, Stage::FinalLists, e.to_string()), trace, Some(reserved)),
    };
    let hyp = check_finishing_hypotheses(g, &chi, &lists, gm, cfg.eps, registry.as_ref());
    let hyp_ok = hyp.is_empty();
    report.hypotheses = Some(hyp);
    if !hyp_ok && !cfg.policy.lenient {
        let msg = "completion hypotheses violated".to_string();
        return done(fail(report, Stage::FinalLists, msg), trace, Some(reserved));
    }

    let full = match complete_colouring(g, &chi, &lists, cfg.seed, cfg.finish_rounds) {
        Ok(c) => {
            report.finish_rounds = Some(c.rounds);
            c.colouring
        }
        Err(e) => return done(fail(report, Stage::Finishing, e.to_string()), trace, Some(reserved)),
    };

    let improper = properness_violations(g, &full).expect("colouring matches graph");
    report.improper = improper.len();
    report.bicoloured = if improper.is_empty() { find_bicoloured_cycles(g, &full).unwrap().len() } else { 0 };
    report.colours_used = full.distinct_colours();
    let (mut nib, mut fin) = (true, true);
    for e in 0..g.m() {
        let (u, v) = g.edge(e);
        let c = full.get(e).expect("completion is total");
        if chi.get(e).is_some() {
            nib &= !reserved.contains(u, c) && !reserved.contains(v, c);
        } else {
            fin &= reserved.contains(u, c) && reserved.contains(v, c);
        }
    }
    report.nibble_provenance = Some(nib);
    report.finish_provenance = Some(fin);
    let ok = full.is_total()
        && report.improper == 0
        && report.bicoloured == 0
        && report.colours_used <= report.palette_size as usize
        && nib
        && fin;
    if !ok {
        let msg = format!(
            "{} clashes, {} bicoloured cycles, {} colours, provenance {nib}/{fin}",
            report.improper, report.bicoloured, report.colours_used
        );
        return done(fail(report, Stage::Verification, msg), trace, Some(reserved));
    }
    report.success = true;
    PipelineOutcome { report, colouring: Some(full), nibble_colouring: Some(chi), trace, reserved: Some(reserved) }
}
