//! Completion of a partial colouring from reserved colours.
//!
//! Every uncoloured edge `uv` gets the `⌊γΔ⌋` smallest colours of `S_u ∩ S_v`
//! as its list; colours are then drawn uniformly and events are resampled
//! until the colouring is proper and acyclic.

use crate::colouring::{find_bicoloured_cycles, properness_violations, BicolouredCycle, Colour, PartialEdgeColouring};
use crate::graph::Graph;
use crate::nibble::{can_become_bicoloured, CycleRegistry, P4Status};
use crate::numeric::floor_tol;
use crate::reservation::ReservedSets;
use crate::rng::{self, Domain};
use rand::Rng;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

/// `γ = ε²/18`.
pub fn gamma(eps: f64) -> f64 {
    eps * eps / 18.0
}

#[derive(Debug, Error)]
pub enum FinishError {
    #[error("edge {edge}: |S_u ∩ S_v| = {size} is below γΔ = {required}")]
    IntersectionTooSmall { edge: usize, size: usize, required: f64 },
    #[error("uncoloured edge {edge} has no list")]
    MissingList { edge: usize },
    #[error("uncoloured edge {edge} has an empty list")]
    EmptyList { edge: usize },
    #[error("the partial colouring is not proper and acyclic before completion")]
    PartialNotAcyclic,
    #[error("no valid completion after {rounds} rounds ({} adjacent clashes, {} bicoloured cycles left)", .improper.len(), .bicoloured.len())]
    RoundsExhausted { rounds: usize, improper: Vec<(usize, usize)>, bicoloured: Vec<BicolouredCycle> },
}

/// Lists of the edges left uncoloured, keyed by edge id.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct FinalLists {
    pub size: usize,
    pub lists: BTreeMap<usize, Vec<Colour>>,
}

impl FinalLists {
    pub fn get(&self, e: usize) -> Option<&[Colour]> {
        self.lists.get(&e).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.lists.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lists.is_empty()
    }
}

pub fn build_final_lists(
    g: &Graph,
    chi: &PartialEdgeColouring,
    reserved: &ReservedSets,
    gamma: f64,
) -> Result<FinalLists, FinishError> {
    let required = gamma * g.max_degree() as f64;
    let size = floor_tol(required).max(0.0) as usize;
    let mut lists = BTreeMap::new();
    for e in chi.uncoloured_edges() {
        let (u, v) = g.edge(e);
        let mut common = reserved.intersection(u, v);
        if (common.len() as f64) < required {
            return Err(FinishError::IntersectionTooSmall { edge: e, size: common.len(), required });
        }
        common.truncate(size);
        lists.insert(e, common);
    }
    Ok(FinalLists { size, lists })
}

/// Lists holding the whole of `S_u ∩ S_v`, for lenient runs where `⌊γΔ⌋`
/// leaves too few colours to finish. `size` stays `⌊γΔ⌋` so the hypothesis
/// report still measures against the nominal length.
pub fn build_reserved_lists(
    g: &Graph,
    chi: &PartialEdgeColouring,
    reserved: &ReservedSets,
    gamma: f64,
) -> Result<FinalLists, FinishError> {
    let size = floor_tol(gamma * g.max_degree() as f64).max(0.0) as usize;
    let mut lists = BTreeMap::new();
    for e in chi.uncoloured_edges() {
        let (u, v) = g.edge(e);
        let common = reserved.intersection(u, v);
        if common.is_empty() {
            return Err(FinishError::IntersectionTooSmall { edge: e, size: 0, required: 1.0 });
        }
        lists.insert(e, common);
    }
    Ok(FinalLists { size, lists })
}

/// Violations of the four hypotheses of the completion step.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct HypothesisReport {
    /// Uncoloured edges whose list is missing, has the wrong size, or holds a
    /// colour already used on an adjacent coloured edge.
    pub h1: Vec<usize>,
    pub h2_threshold: f64,
    /// `(e, c, count)`: colour `c` of `e`'s list is on the lists of `count`
    /// adjacent uncoloured edges, more than `γ²Δ/128`.
    pub h2: Vec<(usize, Colour, usize)>,
    pub union_size: usize,
    pub h3: bool,
    /// Registry cycles with fewer than three uncoloured edges that some
    /// extension can bicolour.
    pub h4: Vec<usize>,
    pub h4_status: P4Status,
}

impl HypothesisReport {
    pub fn is_empty(&self) -> bool {
        self.h1.is_empty() && self.h2.is_empty() && !self.h3 && self.h4.is_empty()
    }
}

pub fn check_finishing_hypotheses(
    g: &Graph,
    chi: &PartialEdgeColouring,
    lists: &FinalLists,
    gamma: f64,
    eps: f64,
    registry: Option<&CycleRegistry>,
) -> HypothesisReport {
    let delta = g.max_degree() as f64;
    let mut report = HypothesisReport { h2_threshold: gamma * gamma * delta / 128.0, ..Default::default() };
    let uncoloured = chi.uncoloured_edges();
    for &e in &uncoloured {
        let Some(list) = lists.get(e) else {
            report.h1.push(e);
            continue;
        };
        let (u, v) = g.edge(e);
        let clash =
            |c: Colour| [u, v].iter().any(|&w| g.incident(w).iter().any(|&(_, f)| f != e && chi.get(f) == Some(c)));
        if list.len() != lists.size || list.iter().any(|&c| clash(c)) {
            report.h1.push(e);
        }
        for &c in list {
            let mut count = 0;
            for w in [u, v] {
                for &(_, f) in g.incident(w) {
                    if f != e && lists.get(f).is_some_and(|l| l.contains(&c)) {
                        count += 1;
                    }
                }
            }
            if count as f64 > report.h2_threshold {
                report.h2.push((e, c, count));
            }
        }
    }
    let union: BTreeSet<Colour> = lists.lists.values().flatten().copied().collect();
    report.union_size = union.len();
    report.h3 = union.len() as f64 > (1.0 + eps) * delta;
    match registry {
        None => report.h4_status = P4Status::NotTracked,
        Some(reg) => {
            report.h4_status = P4Status::Checked;
            let options = |e: usize| lists.get(e).map(<[Colour]>::to_vec).unwrap_or_default();
            report.h4 = reg
                .cycles
                .iter()
                .enumerate()
                .filter(|(_, c)| c.edges.iter().filter(|&&e| chi.get(e).is_none()).count() < 3)
                .filter(|(_, c)| can_become_bicoloured(c, chi, options))
                .map(|(i, _)| i)
                .collect();
        }
    }
    report
}

#[derive(Clone, Debug)]
pub struct Completion {
    pub colouring: PartialEdgeColouring,
    /// Resampling rounds after the initial draw.
    pub rounds: usize,
    /// Total single-edge redraws.
    pub redraws: usize,
}

fn pick(list: &[Colour], seed: u64, round: usize, e: usize) -> Colour {
    let mut rng = rng::stream(seed, Domain::Finish, &[round as u64, e as u64]);
    list[rng.gen_range(0..list.len())]
}

/// Draws every uncoloured edge from its list, then repeatedly redraws the new
/// edges involved in adjacent clashes or, once proper, in bicoloured cycles.
/// Colours present in `chi` are never changed.
pub fn complete_colouring(
    g: &Graph,
    chi: &PartialEdgeColouring,
    lists: &FinalLists,
    seed: u64,
    max_rounds: usize,
) -> Result<Completion, FinishError> {
    let m = g.m();
    if !properness_violations(g, chi).expect("colouring matches graph").is_empty()
        || !find_bicoloured_cycles(g, chi).expect("proper").is_empty()
    {
        return Err(FinishError::PartialNotAcyclic);
    }
    let fresh = chi.uncoloured_edges();
    let mut is_new = vec![false; m];
    for &e in &fresh {
        match lists.get(e) {
            None => return Err(FinishError::MissingList { edge: e }),
            Some([]) => return Err(FinishError::EmptyList { edge: e }),
            Some(_) => is_new[e] = true,
        }
    }
    let mut out = chi.clone();
    for &e in &fresh {
        out.set(e, Some(pick(lists.get(e).unwrap(), seed, 0, e)));
    }
    let mut redraws = 0;
    for round in 1..=max_rounds + 1 {
        let improper = properness_violations(g, &out).unwrap();
        let (bad, bicoloured): (BTreeSet<usize>, Vec<BicolouredCycle>) = if !improper.is_empty() {
            let bad = improper.iter().flat_map(|&(e, f)| [e, f]).filter(|&e| is_new[e]).collect();
            (bad, Vec::new())
        } else {
            let cycles = find_bicoloured_cycles(g, &out).unwrap();
            let bad = cycles.iter().flat_map(|c| c.edges.iter().copied()).filter(|&e| is_new[e]).collect();
            (bad, cycles)
        };
        if improper.is_empty() && bicoloured.is_empty() {
            return Ok(Completion { colouring: out, rounds: round - 1, redraws });
        }
        if round > max_rounds {
            return Err(FinishError::RoundsExhausted { rounds: max_rounds, improper, bicoloured });
        }
        for &e in &bad {
            out.set(e, Some(pick(lists.get(e).unwrap(), seed, round, e)));
        }
        redraws += bad.len();
    }
    unreachable!("loop returns by round max_rounds + 1")
}
