//! The semi-random colouring phase.
//!
//! Iteration `i` truncates every list to `⌊L_i⌋` colours (S.1), assigns each
//! uncoloured edge a uniform colour from its list (S.2), drops colours that
//! clash at a vertex (S.3), flips the equalizing edge coin (S.4), removes
//! retained colours from the lists at both ends (S.5) and flips the
//! equalizing vertex coins (S.6).

mod cycles;
mod run;

pub use cycles::{
    build_cycle_registry, build_cycle_registry_with_cap, can_become_bicoloured, cycle_multiplicity, significant_pairs,
    CycleRegistry, CycleView, EdgeLabel, Multiplicity, PairRecord, RegisteredCycle, RegistryTooLarge,
    DEFAULT_REGISTRY_CAP,
};
pub use run::{check_final, run_nibble, FinalReport, NibbleOutcome, NibblePolicy};

use crate::colouring::{Colour, PartialEdgeColouring};
use crate::graph::{girth, Girth, Graph};
use crate::numeric::floor_tol;
use crate::reservation::{check_reservation, ReservationReport, ReservedSets};
use crate::rng::{self, Domain};
use crate::schedule::ScheduleParams;
use fixedbitset::FixedBitSet;
use rand::Rng;
use serde::Serialize;
use thiserror::Error;

const E2: f64 = 7.38905609893065; // e²

#[derive(Debug, Error)]
pub enum NibbleError {
    #[error("graph girth {found} is below the schedule girth {required}")]
    GirthTooSmall { found: Girth, required: usize },
    #[error("reserved sets violate the reservation bounds ({} events)", .0.violation_count())]
    ReservationInvalid(Box<ReservationReport>),
    #[error("reserved sets cover {sets} vertices but the graph has {n}")]
    SizeMismatch { sets: usize, n: usize },
    #[error("list target ⌊L_{iteration}⌋ is below one colour")]
    ListTargetBelowOne { iteration: usize },
    #[error("properties fail at the start of the run")]
    InitialPropertiesFailed(Box<PropertyReport>),
    #[error("iteration {iteration}: properties still fail after {restarts} restarts")]
    RestartsExhausted { iteration: usize, restarts: usize, report: Box<PropertyReport> },
    #[error("final checks fail: {0}")]
    FinalChecksFailed(Box<FinalReport>),
}

/// `t` or `r` counts indexed by `(vertex, colour)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountTable {
    palette: usize,
    data: Vec<u32>,
}

impl CountTable {
    fn new(n: usize, palette: usize) -> Self {
        CountTable { palette, data: vec![0; n * palette] }
    }

    pub fn get(&self, v: usize, c: Colour) -> u32 {
        self.data[v * self.palette + c as usize]
    }

    fn add(&mut self, v: usize, c: Colour) {
        self.data[v * self.palette + c as usize] += 1;
    }

    fn sub(&mut self, v: usize, c: Colour) {
        self.data[v * self.palette + c as usize] -= 1;
    }

    pub fn max(&self) -> u32 {
        self.data.iter().copied().max().unwrap_or(0)
    }

    fn row(&self, v: usize) -> &[u32] {
        &self.data[v * self.palette..(v + 1) * self.palette]
    }
}

/// `P = (1 − 1/L)^{t_u + t_v − 2}`: probability that no other edge at either
/// end is assigned the colour.
pub fn keep_probability(list_len: f64, t_u: u32, t_v: u32) -> f64 {
    (1.0 - 1.0 / list_len).powi(t_u as i32 + t_v as i32 - 2)
}

/// `Q = 1 − t/(e²L)`: probability that no edge at the vertex retains the colour.
pub fn colour_survival_probability(list_len: f64, t: u32) -> f64 {
    1.0 - t as f64 / (E2 * list_len)
}

/// `Eq = 1 − 1/(e²P)`, clamped to `[0, 1]`; the flag reports a clamp.
pub fn edge_coin_probability(p: f64) -> (f64, bool) {
    let eq = 1.0 - 1.0 / (E2 * p);
    if eq < 0.0 {
        (0.0, true)
    } else {
        (eq.min(1.0), false)
    }
}

/// `Vq = 1 − (1−e⁻²)/Q`, clamped to `[0, 1]`; the flag reports a clamp.
pub fn vertex_coin_probability(q: f64) -> (f64, bool) {
    if q <= 0.0 {
        return (1.0, true);
    }
    let vq = 1.0 - (1.0 - 1.0 / E2) / q;
    if vq < 0.0 {
        (0.0, true)
    } else {
        (vq.min(1.0), false)
    }
}

/// Outcome of S.2–S.4 for one iteration, before any state changes.
#[derive(Clone, Debug, PartialEq)]
pub struct Draw {
    pub assigned: Vec<Option<Colour>>,
    pub retained: Vec<Option<Colour>>,
    pub conflicts: usize,
    pub equalized: usize,
    pub eq_clamps: usize,
    pub p_warnings: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IterationStats {
    pub iteration: usize,
    pub attempt: usize,
    pub list_target: usize,
    pub uncoloured_before: usize,
    pub assigned: usize,
    pub conflicts: usize,
    pub equalized: usize,
    pub retained: usize,
    pub uncoloured_after: usize,
    pub vertex_removals: usize,
    pub mean_list: f64,
    pub min_list: usize,
    pub max_t: u32,
    pub max_r: u32,
    pub eq_clamps: usize,
    pub vq_clamps: usize,
    pub p_warnings: usize,
    pub q_warnings: usize,
    pub property_violations: usize,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum P4Status {
    Checked,
    /// `Λ <= 0`, so `λ >= Λ` holds for every cycle.
    Vacuous,
    #[default]
    NotTracked,
}

/// Violations of (P.1)–(P.4) measured against index `index` of the schedule.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PropertyReport {
    pub index: usize,
    /// `(edge, ℓ(e))` with `ℓ(e) < L`.
    pub p1: Vec<(usize, usize)>,
    /// `(v, c, t(v,c))` with `t > T`.
    pub p2: Vec<(usize, Colour, u32)>,
    /// `(v, c, r(v,c))` with `r > R`.
    pub p3: Vec<(usize, Colour, u32)>,
    pub p4: P4Status,
    /// `(cycle index, pair, λ)` for significant pairs with `λ < Λ`.
    pub p4_violations: Vec<(usize, (Colour, Colour), usize)>,
}

impl PropertyReport {
    pub fn is_empty(&self) -> bool {
        self.violation_count() == 0
    }

    pub fn violation_count(&self) -> usize {
        self.p1.len() + self.p2.len() + self.p3.len() + self.p4_violations.len()
    }
}

#[derive(Clone, Debug)]
pub struct NibbleState<'a> {
    graph: &'a Graph,
    reserved: &'a ReservedSets,
    schedule: &'a ScheduleParams,
    registry: Option<&'a CycleRegistry>,
    iteration: usize,
    colouring: PartialEdgeColouring,
    lists: Vec<Vec<Colour>>,
    t: CountTable,
    r: CountTable,
}

/// Initial state; requires valid reserved sets and enough girth.
pub fn init_state<'a>(
    g: &'a Graph,
    reserved: &'a ReservedSets,
    schedule: &'a ScheduleParams,
    registry: Option<&'a CycleRegistry>,
) -> Result<NibbleState<'a>, NibbleError> {
    let report = check_reservation_for(g, reserved)?;
    if !report.is_empty() {
        return Err(NibbleError::ReservationInvalid(Box::new(report)));
    }
    init_state_unchecked(g, reserved, schedule, registry)
}

fn check_reservation_for(g: &Graph, reserved: &ReservedSets) -> Result<ReservationReport, NibbleError> {
    if reserved.n() != g.n() {
        return Err(NibbleError::SizeMismatch { sets: reserved.n(), n: g.n() });
    }
    Ok(check_reservation(g, reserved))
}

/// Initial state without checking the reservation bounds.
pub fn init_state_unchecked<'a>(
    g: &'a Graph,
    reserved: &'a ReservedSets,
    schedule: &'a ScheduleParams,
    registry: Option<&'a CycleRegistry>,
) -> Result<NibbleState<'a>, NibbleError> {
    if reserved.n() != g.n() {
        return Err(NibbleError::SizeMismatch { sets: reserved.n(), n: g.n() });
    }
    let found = girth(g);
    if !found.at_least(schedule.girth) {
        return Err(NibbleError::GirthTooSmall { found, required: schedule.girth });
    }
    let palette = reserved.palette_size();
    let mut t = CountTable::new(g.n(), palette as usize);
    let mut r = CountTable::new(g.n(), palette as usize);
    let mut lists = Vec::with_capacity(g.m());
    for &(u, v) in g.edges() {
        let mut blocked = reserved.set(u).clone();
        blocked.union_with(reserved.set(v));
        let list: Vec<Colour> = (0..palette).filter(|&c| !blocked.contains(c as usize)).collect();
        for &c in &list {
            t.add(u, c);
            t.add(v, c);
        }
        for c in reserved.set(v).ones() {
            r.add(u, c as Colour);
        }
        for c in reserved.set(u).ones() {
            r.add(v, c as Colour);
        }
        lists.push(list);
    }
    Ok(NibbleState {
        graph: g,
        reserved,
        schedule,
        registry,
        iteration: 1,
        colouring: PartialEdgeColouring::new(palette, g.m()),
        lists,
        t,
        r,
    })
}

impl<'a> NibbleState<'a> {
    pub fn graph(&self) -> &'a Graph {
        self.graph
    }

    pub fn reserved(&self) -> &'a ReservedSets {
        self.reserved
    }

    pub fn schedule(&self) -> &'a ScheduleParams {
        self.schedule
    }

    pub fn registry(&self) -> Option<&'a CycleRegistry> {
        self.registry
    }

    /// Index of the next iteration to run.
    pub fn iteration(&self) -> usize {
        self.iteration
    }

    pub fn colouring(&self) -> &PartialEdgeColouring {
        &self.colouring
    }

    pub fn into_colouring(self) -> PartialEdgeColouring {
        self.colouring
    }

    /// `L_i(e)`, ascending; empty once `e` is coloured.
    pub fn list(&self, e: usize) -> &[Colour] {
        &self.lists[e]
    }

    pub fn t(&self, v: usize, c: Colour) -> u32 {
        self.t.get(v, c)
    }

    pub fn r(&self, v: usize, c: Colour) -> u32 {
        self.r.get(v, c)
    }

    pub fn t_table(&self) -> &CountTable {
        &self.t
    }

    pub fn r_table(&self) -> &CountTable {
        &self.r
    }

    /// `⌊L_i⌋` for the current iteration.
    pub fn list_target(&self) -> usize {
        floor_tol(self.schedule.l(self.iteration)).max(0.0) as usize
    }

    /// Removes colours of `e`'s list for which `keep` is false, keeping `t` in sync.
    pub fn retain_list(&mut self, e: usize, mut keep: impl FnMut(Colour) -> bool) {
        let (u, v) = self.graph.edge(e);
        let mut list = std::mem::take(&mut self.lists[e]);
        list.retain(|&c| {
            let k = keep(c);
            if !k {
                self.t.sub(u, c);
                self.t.sub(v, c);
            }
            k
        });
        self.lists[e] = list;
    }

    /// `P_i(e, c)` with the list length taken as `⌊L_i⌋`.
    pub fn p_keep(&self, e: usize, c: Colour) -> f64 {
        let (u, v) = self.graph.edge(e);
        keep_probability(self.list_target() as f64, self.t(u, c), self.t(v, c))
    }

    /// `Q_i(v, c)` with the list length taken as `⌊L_i⌋`.
    pub fn q_keep(&self, v: usize, c: Colour) -> f64 {
        colour_survival_probability(self.list_target() as f64, self.t(v, c))
    }

    /// S.1: cut every list down to `⌊L_i⌋` colours, dropping the largest first.
    pub fn truncate_lists(&mut self) {
        let target = self.list_target();
        for e in 0..self.graph.m() {
            if self.lists[e].len() > target {
                let (u, v) = self.graph.edge(e);
                for &c in &self.lists[e][target..] {
                    self.t.sub(u, c);
                    self.t.sub(v, c);
                }
                self.lists[e].truncate(target);
            }
        }
    }

    /// S.2–S.4 on the current (truncated) lists.
    pub fn draw(&self, seed: u64) -> Draw {
        let g = self.graph;
        let i = self.iteration as u64;
        let mut assigned = vec![None; g.m()];
        for (e, slot) in assigned.iter_mut().enumerate() {
            let list = &self.lists[e];
            if self.colouring.get(e).is_none() && !list.is_empty() {
                let k = rng::stream(seed, Domain::Assign, &[i, e as u64]).gen_range(0..list.len());
                *slot = Some(list[k]);
            }
        }
        let mut clash = vec![false; g.m()];
        let mut at = Vec::new();
        for v in 0..g.n() {
            at.clear();
            at.extend(g.incident(v).iter().filter_map(|&(_, e)| assigned[e].map(|c| (c, e))));
            at.sort_unstable();
            for w in at.windows(2) {
                if w[0].0 == w[1].0 {
                    clash[w[0].1] = true;
                    clash[w[1].1] = true;
                }
            }
        }
        let list_len = self.list_target() as f64;
        let mut retained = vec![None; g.m()];
        let (mut conflicts, mut equalized, mut eq_clamps, mut p_warnings) = (0, 0, 0, 0);
        for e in 0..g.m() {
            let Some(c) = assigned[e] else { continue };
            if clash[e] {
                conflicts += 1;
                continue;
            }
            let (u, v) = g.edge(e);
            let p = keep_probability(list_len, self.t(u, c), self.t(v, c));
            if p <= 1.0 / E2 {
                p_warnings += 1;
            }
            let (eq, clamped) = edge_coin_probability(p);
            eq_clamps += clamped as usize;
            if rng::unit(seed, Domain::EdgeCoin, &[i, e as u64]) < eq {
                equalized += 1;
            } else {
                retained[e] = Some(c);
            }
        }
        Draw { assigned, retained, conflicts, equalized, eq_clamps, p_warnings }
    }

    /// S.5–S.6: colour retained edges, shrink the lists, advance the iteration.
    pub fn apply(&mut self, draw: &Draw, seed: u64) -> IterationStats {
        let g = self.graph;
        let palette = self.colouring.palette_size() as usize;
        let i = self.iteration as u64;
        let list_len = self.list_target() as f64;
        let uncoloured_before = self.colouring.len() - self.colouring.coloured_count();
        let mut retained_at = vec![FixedBitSet::with_capacity(palette); g.n()];
        for (e, c) in draw.retained.iter().enumerate() {
            if let Some(c) = *c {
                let (u, v) = g.edge(e);
                retained_at[u].insert(c as usize);
                retained_at[v].insert(c as usize);
            }
        }
        let mut removed = retained_at.clone();
        let (mut vertex_removals, mut vq_clamps, mut q_warnings) = (0, 0, 0);
        for v in 0..g.n() {
            for (c, &tv) in self.t.row(v).iter().enumerate() {
                if tv == 0 || retained_at[v].contains(c) {
                    continue;
                }
                let q = colour_survival_probability(list_len, tv);
                if q <= 1.0 - 1.0 / E2 {
                    q_warnings += 1;
                }
                let (vq, clamped) = vertex_coin_probability(q);
                vq_clamps += clamped as usize;
                if rng::unit(seed, Domain::VertexCoin, &[i, v as u64, c as u64]) < vq {
                    removed[v].insert(c);
                    vertex_removals += 1;
                }
            }
        }
        let mut retained = 0;
        for e in 0..g.m() {
            if let Some(c) = draw.retained[e] {
                retained += 1;
                self.retain_list(e, |_| false);
                self.colouring.set(e, Some(c));
                let (u, v) = g.edge(e);
                for x in self.reserved.set(v).ones() {
                    self.r.sub(u, x as Colour);
                }
                for x in self.reserved.set(u).ones() {
                    self.r.sub(v, x as Colour);
                }
            }
        }
        for e in 0..g.m() {
            if self.colouring.get(e).is_none() {
                let (u, v) = g.edge(e);
                let (ru, rv) = (&removed[u], &removed[v]);
                let mut list = std::mem::take(&mut self.lists[e]);
                list.retain(|&c| {
                    let drop = ru.contains(c as usize) || rv.contains(c as usize);
                    if drop {
                        self.t.sub(u, c);
                        self.t.sub(v, c);
                    }
                    !drop
                });
                self.lists[e] = list;
            }
        }
        let uncoloured: Vec<usize> = self.colouring.uncoloured_edges();
        let lens: Vec<usize> = uncoloured.iter().map(|&e| self.lists[e].len()).collect();
        let stats = IterationStats {
            iteration: self.iteration,
            attempt: 0,
            list_target: list_len as usize,
            uncoloured_before,
            assigned: draw.assigned.iter().flatten().count(),
            conflicts: draw.conflicts,
            equalized: draw.equalized,
            retained,
            uncoloured_after: uncoloured.len(),
            vertex_removals,
            mean_list: if lens.is_empty() { 0.0 } else { lens.iter().sum::<usize>() as f64 / lens.len() as f64 },
            min_list: lens.iter().copied().min().unwrap_or(0),
            max_t: self.t.max(),
            max_r: self.r.max(),
            eq_clamps: draw.eq_clamps,
            vq_clamps,
            p_warnings: draw.p_warnings,
            q_warnings,
            property_violations: 0,
        };
        self.iteration += 1;
        debug_assert!(self.counts_consistent());
        stats
    }

    /// One full iteration S.1–S.6.
    pub fn run_iteration(&mut self, seed: u64) -> IterationStats {
        self.truncate_lists();
        let draw = self.draw(seed);
        self.apply(&draw, seed)
    }

    /// Recounts `t` and `r` from scratch and compares with the maintained tables.
    pub fn counts_consistent(&self) -> bool {
        let g = self.graph;
        let palette = self.colouring.palette_size() as usize;
        let mut t = CountTable::new(g.n(), palette);
        let mut r = CountTable::new(g.n(), palette);
        for (e, &(u, v)) in g.edges().iter().enumerate() {
            if self.colouring.get(e).is_some() {
                continue;
            }
            for &c in &self.lists[e] {
                t.add(u, c);
                t.add(v, c);
            }
            for c in self.reserved.set(v).ones() {
                r.add(u, c as Colour);
            }
            for c in self.reserved.set(u).ones() {
                r.add(v, c as Colour);
            }
        }
        t == self.t && r == self.r
    }

    /// (P.1)–(P.4) against `L_i, T_i, R_i, Λ_i, Ψ_i` for the current index `i`.
    pub fn check_properties(&self) -> PropertyReport {
        let g = self.graph;
        let s = self.schedule;
        let i = self.iteration;
        let (l, t_max, r_max) = (s.l(i), s.t(i), s.r(i));
        let p1 = (0..g.m())
            .filter(|&e| self.colouring.get(e).is_none() && (self.lists[e].len() as f64) < l)
            .map(|e| (e, self.lists[e].len()))
            .collect();
        let mut p2 = Vec::new();
        let mut p3 = Vec::new();
        for v in 0..g.n() {
            for c in 0..self.colouring.palette_size() {
                let (tv, rv) = (self.t(v, c), self.r(v, c));
                if tv as f64 > t_max {
                    p2.push((v, c, tv));
                }
                if rv as f64 > r_max {
                    p3.push((v, c, rv));
                }
            }
        }
        let lambda = s.lambda(i);
        let (p4, p4_violations) = match self.registry {
            None => (P4Status::NotTracked, Vec::new()),
            Some(_) if lambda <= 0.0 => (P4Status::Vacuous, Vec::new()),
            Some(reg) => {
                let psi = s.psi(i);
                let mut out = Vec::new();
                for (idx, cyc) in reg.cycles.iter().enumerate() {
                    for rec in significant_pairs(cyc, self, psi) {
                        if rec.significant && (rec.free as f64) < lambda {
                            out.push((idx, rec.pair, rec.free));
                        }
                    }
                }
                (P4Status::Checked, out)
            }
        };
        PropertyReport { index: i, p1, p2, p3, p4, p4_violations }
    }
}

impl CycleView for NibbleState<'_> {
    fn colour(&self, e: usize) -> Option<Colour> {
        self.colouring.get(e)
    }

    fn reserved(&self, e: usize, c: Colour) -> bool {
        let (u, v) = self.graph.edge(e);
        self.reserved.contains(u, c) && self.reserved.contains(v, c)
    }

    fn free(&self, e: usize, c: Colour) -> bool {
        self.lists[e].binary_search(&c).is_ok()
    }

    fn options(&self, e: usize) -> Vec<Colour> {
        let (u, v) = self.graph.edge(e);
        let mut o = self.reserved.intersection(u, v);
        o.extend_from_slice(&self.lists[e]);
        o.sort_unstable();
        o.dedup();
        o
    }

    fn palette_size(&self) -> u32 {
        self.colouring.palette_size()
    }
}

#[cfg(test)]
mod tests;
