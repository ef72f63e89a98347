//! Bounded-length cycle registry and per-colour-pair cycle accounting.

use crate::colouring::{Colour, PartialEdgeColouring};
use crate::graph::Graph;
use crate::schedule::Psi;
use serde::Serialize;
use std::collections::BTreeSet;

pub const DEFAULT_REGISTRY_CAP: usize = 1_000_000;

/// A simple cycle: `edges[i]` joins `vertices[i]` and `vertices[i+1]` (cyclically).
/// `vertices[0]` is the smallest vertex and `vertices[1] < vertices[last]`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct RegisteredCycle {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
}

impl RegisteredCycle {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CycleRegistry {
    pub l_max: usize,
    pub cycles: Vec<RegisteredCycle>,
}

impl CycleRegistry {
    pub fn empty() -> Self {
        CycleRegistry { l_max: 0, cycles: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.cycles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("more than {cap} cycles of length <= {l_max}")]
pub struct RegistryTooLarge {
    pub cap: usize,
    pub l_max: usize,
}

pub fn build_cycle_registry(g: &Graph, l_max: usize) -> Result<CycleRegistry, RegistryTooLarge> {
    build_cycle_registry_with_cap(g, l_max, DEFAULT_REGISTRY_CAP)
}

/// Every simple cycle of length `3..=l_max`, each listed once: the DFS starts
/// at the cycle's smallest vertex, visits only larger vertices, and keeps the
/// direction whose second vertex is smaller than the last.
pub fn build_cycle_registry_with_cap(g: &Graph, l_max: usize, cap: usize) -> Result<CycleRegistry, RegistryTooLarge> {
    let mut cycles = Vec::new();
    let mut on_path = vec![false; g.n()];
    let mut verts = Vec::new();
    let mut edges = Vec::new();
    for s in 0..g.n() {
        verts.push(s);
        on_path[s] = true;
        dfs(g, s, l_max, cap, &mut on_path, &mut verts, &mut edges, &mut cycles)?;
        on_path[s] = false;
        verts.pop();
    }
    Ok(CycleRegistry { l_max, cycles })
}

#[allow(clippy::too_many_arguments)]
fn dfs(
    g: &Graph,
    s: usize,
    l_max: usize,
    cap: usize,
    on_path: &mut [bool],
    verts: &mut Vec<usize>,
    edges: &mut Vec<usize>,
    out: &mut Vec<RegisteredCycle>,
) -> Result<(), RegistryTooLarge> {
    let x = *verts.last().unwrap();
    for &(y, e) in g.incident(x) {
        if y == s {
            if verts.len() >= 3 && verts[1] < x {
                if out.len() >= cap {
                    return Err(RegistryTooLarge { cap, l_max });
                }
                let mut es = edges.clone();
                es.push(e);
                out.push(RegisteredCycle { vertices: verts.clone(), edges: es });
            }
            continue;
        }
        if y < s || on_path[y] || verts.len() >= l_max {
            continue;
        }
        on_path[y] = true;
        verts.push(y);
        edges.push(e);
        dfs(g, s, l_max, cap, on_path, verts, edges, out)?;
        edges.pop();
        verts.pop();
        on_path[y] = false;
    }
    Ok(())
}

/// Which colours of a pair `{c, d}` an edge can carry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EdgeLabel {
    COnly,
    DOnly,
    Both,
    None,
}

impl EdgeLabel {
    pub fn from_flags(c: bool, d: bool) -> Self {
        match (c, d) {
            (true, true) => EdgeLabel::Both,
            (true, false) => EdgeLabel::COnly,
            (false, true) => EdgeLabel::DOnly,
            (false, false) => EdgeLabel::None,
        }
    }

    /// Allows colour `c` (`first`) or `d`.
    fn allows(self, first: bool) -> bool {
        match self {
            EdgeLabel::Both => true,
            EdgeLabel::COnly => first,
            EdgeLabel::DOnly => !first,
            EdgeLabel::None => false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Multiplicity {
    Incompatible,
    Arcs(usize),
}

/// Longest alternating arc starting at position `i` of the cyclic label
/// sequence, capped at the cycle length.
fn reach(labels: &[EdgeLabel], i: usize) -> usize {
    let l = labels.len();
    let mut best = 0;
    for first in [true, false] {
        let mut len = 0;
        while len < l && labels[(i + len) % l].allows(first == (len % 2 == 0)) {
            len += 1;
        }
        best = best.max(len);
    }
    best
}

/// Minimum number of alternating arcs partitioning the cycle.
///
/// For each cut position the linear problem is solved greedily, which is exact
/// because every sub-arc of an alternating arc is alternating.
pub fn cycle_multiplicity(labels: &[EdgeLabel]) -> Multiplicity {
    if labels.contains(&EdgeLabel::None) {
        return Multiplicity::Incompatible;
    }
    let l = labels.len();
    let reach: Vec<usize> = (0..l).map(|i| reach(labels, i)).collect();
    let mut best = usize::MAX;
    for cut in 0..l {
        let (mut covered, mut arcs) = (0, 0);
        while covered < l {
            let step = reach[(cut + covered) % l].min(l - covered);
            covered += step;
            arcs += 1;
        }
        best = best.min(arcs);
    }
    Multiplicity::Arcs(best)
}

/// Accounting of one compatible colour pair on one cycle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairRecord {
    pub pair: (Colour, Colour),
    pub multiplicity: usize,
    /// Uncoloured edges that are `c`- or `d`-reserved.
    pub reserved: usize,
    /// Uncoloured edges that are `c`- or `d`-free (`λ`).
    pub free: usize,
    /// Uncoloured edges counted as both reserved and free (e.g. `c`-reserved and `d`-free).
    pub overlap: usize,
    /// Coloured edges (each carries `c` or `d`).
    pub coloured: usize,
    pub significant: bool,
    /// Every edge coloured and the cycle alternates: a bicoloured cycle.
    pub bicoloured: bool,
}

/// Per-cycle view of the colouring state needed for pair accounting.
pub trait CycleView {
    fn colour(&self, e: usize) -> Option<Colour>;
    fn reserved(&self, e: usize, c: Colour) -> bool;
    fn free(&self, e: usize, c: Colour) -> bool;
    /// Colours `e` is compatible with while uncoloured, ascending.
    fn options(&self, e: usize) -> Vec<Colour>;
    fn palette_size(&self) -> u32;
}

/// All compatible pairs of `cycle` with their accounting and significance
/// against `psi`.
pub fn significant_pairs(cycle: &RegisteredCycle, view: &impl CycleView, psi: Psi) -> Vec<PairRecord> {
    candidate_pairs(cycle, view).into_iter().filter_map(|pair| pair_record(cycle, view, pair, psi)).collect()
}

fn candidate_pairs(cycle: &RegisteredCycle, view: &impl CycleView) -> Vec<(Colour, Colour)> {
    let coloured: BTreeSet<Colour> = cycle.edges.iter().filter_map(|&e| view.colour(e)).collect();
    if coloured.len() >= 3 {
        return Vec::new();
    }
    let uncoloured: Vec<usize> = cycle.edges.iter().copied().filter(|&e| view.colour(e).is_none()).collect();
    let options: Vec<BTreeSet<Colour>> = uncoloured.iter().map(|&e| view.options(e).into_iter().collect()).collect();
    let all: BTreeSet<Colour> = (0..view.palette_size()).collect();
    // partners d for a fixed c: edges not allowing c must allow d
    let partners = |c: Colour| -> BTreeSet<Colour> {
        let mut acc = all.clone();
        for o in &options {
            if !o.contains(&c) {
                acc = acc.intersection(o).copied().collect();
            }
        }
        acc.remove(&c);
        acc
    };
    let mut out = BTreeSet::new();
    let firsts: Vec<Colour> = match coloured.len() {
        2 => {
            let v: Vec<Colour> = coloured.iter().copied().collect();
            if partners(v[0]).contains(&v[1]) {
                out.insert((v[0], v[1]));
            }
            return out.into_iter().collect();
        }
        1 => coloured.iter().copied().collect(),
        _ => match options.iter().min_by_key(|o| o.len()) {
            Some(o) => o.iter().copied().collect(),
            None => return Vec::new(),
        },
    };
    for c in firsts {
        for d in partners(c) {
            out.insert((c.min(d), c.max(d)));
        }
    }
    out.into_iter().collect()
}

fn pair_record(
    cycle: &RegisteredCycle,
    view: &impl CycleView,
    (c, d): (Colour, Colour),
    psi: Psi,
) -> Option<PairRecord> {
    let mut labels = Vec::with_capacity(cycle.len());
    let (mut reserved, mut free, mut overlap, mut coloured) = (0, 0, 0, 0);
    for &e in &cycle.edges {
        match view.colour(e) {
            Some(x) => {
                labels.push(EdgeLabel::from_flags(x == c, x == d));
                coloured += 1;
            }
            None => {
                let (rc, rd) = (view.reserved(e, c), view.reserved(e, d));
                let (fc, fd) = (view.free(e, c), view.free(e, d));
                labels.push(EdgeLabel::from_flags(rc || fc, rd || fd));
                let (r, f) = (rc || rd, fc || fd);
                reserved += r as usize;
                free += f as usize;
                overlap += (r && f) as usize;
            }
        }
    }
    let Multiplicity::Arcs(multiplicity) = cycle_multiplicity(&labels) else {
        return None;
    };
    let bicoloured = coloured == cycle.len() && multiplicity == 1 && cycle.len().is_multiple_of(2);
    Some(PairRecord {
        pair: (c, d),
        multiplicity,
        reserved,
        free,
        overlap,
        coloured,
        significant: psi.admits(multiplicity) && psi.admits(reserved),
        bicoloured,
    })
}

/// Whether the cycle can become bicoloured when each uncoloured edge takes a
/// colour from `options(e)` and coloured edges keep theirs.
///
/// A bicoloured cycle alternates, so it has even length, one colour on even
/// positions and another on odd ones.
pub fn can_become_bicoloured(
    cycle: &RegisteredCycle,
    colouring: &PartialEdgeColouring,
    options: impl Fn(usize) -> Vec<Colour>,
) -> bool {
    let l = cycle.len();
    if l % 2 == 1 {
        return false;
    }
    let mut class: [Option<BTreeSet<Colour>>; 2] = [None, None];
    for (pos, &e) in cycle.edges.iter().enumerate() {
        let allowed: BTreeSet<Colour> = match colouring.get(e) {
            Some(x) => [x].into(),
            None => options(e).into_iter().collect(),
        };
        let slot = &mut class[pos % 2];
        *slot = Some(match slot.take() {
            None => allowed,
            Some(prev) => prev.intersection(&allowed).copied().collect(),
        });
    }
    let (x, y) = (class[0].take().unwrap_or_default(), class[1].take().unwrap_or_default());
    if x.is_empty() || y.is_empty() {
        return false;
    }
    !(x.len() == 1 && y.len() == 1 && x == y)
}
