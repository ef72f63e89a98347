//! Reserved colour sets `S_v`: Bernoulli sampling plus local resampling until
//! (A.1) `|S_v| <= 4εΔ/9`, (A.2) `|S_u ∩ S_v| >= ε²Δ/18` and
//! (A.3) `|{u ∈ N(v) : c ∈ S_u}| <= εΔ/2` all hold.

use crate::colouring::Colour;
use crate::graph::Graph;
use crate::numeric::palette_size;
use crate::rng::{self, Domain};
use fixedbitset::FixedBitSet;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ReservationError {
    #[error("no valid reservation after {rounds} rounds ({} violated events remain)", report.violation_count())]
    Exhausted { rounds: usize, report: Box<ReservationReport>, last: Box<ReservedSets> },
    #[error("colour {colour} at vertex {vertex} outside palette of size {palette}")]
    ColourOutOfRange { vertex: usize, colour: Colour, palette: u32 },
    #[error("reservation covers {sets} vertices but the graph has {n}")]
    SizeMismatch { sets: usize, n: usize },
    #[error("invalid reservation file: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReservedSets {
    palette_size: u32,
    epsilon_bits: u64,
    sets: Vec<FixedBitSet>,
}

#[derive(Serialize, Deserialize)]
struct ReservationFile {
    palette_size: u32,
    sets: Vec<Vec<Colour>>,
}

impl ReservedSets {
    /// No reserved colours anywhere.
    pub fn empty(n: usize, palette_size: u32, eps: f64) -> Self {
        let sets = vec![FixedBitSet::with_capacity(palette_size as usize); n];
        ReservedSets { palette_size, epsilon_bits: eps.to_bits(), sets }
    }

    pub fn from_sets(palette_size: u32, eps: f64, sets: Vec<Vec<Colour>>) -> Result<Self, ReservationError> {
        let mut out = Self::empty(sets.len(), palette_size, eps);
        for (v, s) in sets.into_iter().enumerate() {
            for c in s {
                if c >= palette_size {
                    return Err(ReservationError::ColourOutOfRange { vertex: v, colour: c, palette: palette_size });
                }
                out.sets[v].insert(c as usize);
            }
        }
        Ok(out)
    }

    pub fn palette_size(&self) -> u32 {
        self.palette_size
    }

    pub fn epsilon(&self) -> f64 {
        f64::from_bits(self.epsilon_bits)
    }

    pub fn n(&self) -> usize {
        self.sets.len()
    }

    pub fn set(&self, v: usize) -> &FixedBitSet {
        &self.sets[v]
    }

    pub fn contains(&self, v: usize, c: Colour) -> bool {
        self.sets[v].contains(c as usize)
    }

    pub fn size(&self, v: usize) -> usize {
        self.sets[v].count_ones(..)
    }

    pub fn colours(&self, v: usize) -> Vec<Colour> {
        self.sets[v].ones().map(|c| c as Colour).collect()
    }

    /// `S_u ∩ S_v` in increasing order.
    pub fn intersection(&self, u: usize, v: usize) -> Vec<Colour> {
        self.sets[u].intersection(&self.sets[v]).map(|c| c as Colour).collect()
    }

    pub fn intersection_size(&self, u: usize, v: usize) -> usize {
        self.sets[u].intersection_count(&self.sets[v])
    }

    /// `|S_{v,c}| = |{u ∈ N(v) : c ∈ S_u}|`.
    pub fn neighbours_reserving(&self, g: &Graph, v: usize, c: Colour) -> usize {
        g.neighbours(v).filter(|&u| self.contains(u, c)).count()
    }

    pub fn to_json(&self) -> String {
        let file =
            ReservationFile { palette_size: self.palette_size, sets: (0..self.n()).map(|v| self.colours(v)).collect() };
        serde_json::to_string(&file).expect("reservation serializes")
    }

    /// Parses the JSON format; `ε` is not part of the file.
    pub fn from_json(text: &str, eps: f64) -> Result<Self, ReservationError> {
        let file: ReservationFile = serde_json::from_str(text)?;
        Self::from_sets(file.palette_size, eps, file.sets)
    }

    pub fn check_matches(&self, g: &Graph) -> Result<(), ReservationError> {
        if self.n() != g.n() {
            return Err(ReservationError::SizeMismatch { sets: self.n(), n: g.n() });
        }
        Ok(())
    }
}

/// Inclusion probability `(1+ε)^{-1/2}·ε/3`.
pub fn inclusion_probability(eps: f64) -> f64 {
    (1.0 + eps).powf(-0.5) * eps / 3.0
}

/// Fills `set` with independent Bernoulli(p) memberships over `[0, palette)`,
/// drawing geometric gaps between members.
fn sample_set(set: &mut FixedBitSet, palette: usize, p: f64, rng: &mut impl Rng) {
    set.clear();
    if p <= 0.0 {
        return;
    }
    if p >= 1.0 {
        set.insert_range(..);
        return;
    }
    let log_q = (1.0 - p).ln();
    let mut c = 0usize;
    loop {
        let u: f64 = 1.0 - rng.gen::<f64>(); // (0, 1]
        let gap = (u.ln() / log_q).floor();
        if gap >= (palette - c) as f64 {
            return;
        }
        c += gap as usize;
        set.insert(c);
        c += 1;
        if c >= palette {
            return;
        }
    }
}

fn sample_vertex(sets: &mut ReservedSets, v: usize, p: f64, seed: u64, round: u64) {
    let palette = sets.palette_size as usize;
    let mut r = rng::stream(seed, Domain::Reserve, &[round, v as u64]);
    sample_set(&mut sets.sets[v], palette, p, &mut r);
}

/// Independent draw of every `S_v` over the palette `⌈(1+ε)Δ⌉`.
pub fn sample_reserved_sets(g: &Graph, eps: f64, seed: u64) -> ReservedSets {
    let mut sets = ReservedSets::empty(g.n(), palette_size(eps, g.max_degree()), eps);
    let p = inclusion_probability(eps);
    for v in 0..g.n() {
        sample_vertex(&mut sets, v, p, seed, 0);
    }
    sets
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ReservationThresholds {
    /// (A.1) upper bound on `|S_v|`.
    pub max_set: f64,
    /// (A.2) lower bound on `|S_u ∩ S_v|`.
    pub min_intersection: f64,
    /// (A.3) upper bound on `|S_{v,c}|`.
    pub max_neighbours: f64,
}

impl ReservationThresholds {
    pub fn new(eps: f64, delta: usize) -> Self {
        let d = delta as f64;
        ReservationThresholds {
            max_set: 4.0 * eps * d / 9.0,
            min_intersection: eps * eps * d / 18.0,
            max_neighbours: eps * d / 2.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReservationReport {
    pub thresholds: ReservationThresholds,
    /// Violated `A_v`: `(v, |S_v|)`.
    pub a: Vec<(usize, usize)>,
    /// Violated `B_e`: `(e, |S_u ∩ S_v|)`.
    pub b: Vec<(usize, usize)>,
    /// Violated `C_{v,c}`: `(v, c, |S_{v,c}|)`.
    pub c: Vec<(usize, Colour, usize)>,
}

impl ReservationReport {
    pub fn is_empty(&self) -> bool {
        self.a.is_empty() && self.b.is_empty() && self.c.is_empty()
    }

    pub fn violation_count(&self) -> usize {
        self.a.len() + self.b.len() + self.c.len()
    }
}

pub fn check_reservation(g: &Graph, sets: &ReservedSets) -> ReservationReport {
    let th = ReservationThresholds::new(sets.epsilon(), g.max_degree());
    let a = (0..g.n()).map(|v| (v, sets.size(v))).filter(|&(_, s)| s as f64 > th.max_set).collect();
    let b = g
        .edges()
        .iter()
        .enumerate()
        .map(|(e, &(u, v))| (e, sets.intersection_size(u, v)))
        .filter(|&(_, s)| (s as f64) < th.min_intersection)
        .collect();
    let mut c = Vec::new();
    let mut count = vec![0usize; sets.palette_size as usize];
    for v in 0..g.n() {
        count.iter_mut().for_each(|x| *x = 0);
        for u in g.neighbours(v) {
            for col in sets.sets[u].ones() {
                count[col] += 1;
            }
        }
        for (col, &k) in count.iter().enumerate() {
            if k as f64 > th.max_neighbours {
                c.push((v, col as Colour, k));
            }
        }
    }
    ReservationReport { thresholds: th, a, b, c }
}

#[derive(Clone, Debug)]
pub struct Resampled {
    pub sets: ReservedSets,
    /// Sampling rounds performed, the initial draw included.
    pub rounds: usize,
}

/// Samples, then repeatedly redraws `S_v` for every vertex touched by a
/// violated event: `v` for `A_v`, both ends for `B_e`, `v` and `N(v)` for
/// `C_{v,c}`.
pub fn resample_until_valid(g: &Graph, eps: f64, seed: u64, max_rounds: usize) -> Result<Resampled, ReservationError> {
    let p = inclusion_probability(eps);
    let mut sets = sample_reserved_sets(g, eps, seed);
    let mut rounds = 1;
    loop {
        let report = check_reservation(g, &sets);
        if report.is_empty() {
            return Ok(Resampled { sets, rounds });
        }
        if rounds >= max_rounds {
            return Err(ReservationError::Exhausted { rounds, report: Box::new(report), last: Box::new(sets) });
        }
        let mut touched = vec![false; g.n()];
        for &(v, _) in &report.a {
            touched[v] = true;
        }
        for &(e, _) in &report.b {
            let (u, v) = g.edge(e);
            touched[u] = true;
            touched[v] = true;
        }
        for &(v, _, _) in &report.c {
            touched[v] = true;
            for u in g.neighbours(v) {
                touched[u] = true;
            }
        }
        for v in (0..g.n()).filter(|&v| touched[v]) {
            sample_vertex(&mut sets, v, p, seed, rounds as u64);
        }
        rounds += 1;
    }
}
