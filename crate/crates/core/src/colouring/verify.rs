use super::{Colour, ColouringError, PartialEdgeColouring};
use crate::graph::Graph;
use serde::Serialize;

/// A cycle whose edges all carry one of two colours, in canonical form:
/// the vertex sequence is the lexicographically smallest rotation or
/// reflection, and `edges[i]` joins `vertices[i]` to `vertices[i+1]`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct BicolouredCycle {
    pub colours: (Colour, Colour),
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
}

fn check_len(g: &Graph, chi: &PartialEdgeColouring) -> Result<(), ColouringError> {
    if chi.len() != g.m() {
        return Err(ColouringError::LengthMismatch { colouring: chi.len(), graph: g.m() });
    }
    Ok(())
}

/// Pairs `(e, f)`, `e < f`, of adjacent edges with the same colour.
pub fn properness_violations(g: &Graph, chi: &PartialEdgeColouring) -> Result<Vec<(usize, usize)>, ColouringError> {
    check_len(g, chi)?;
    let mut out = Vec::new();
    let mut at = Vec::new();
    for v in 0..g.n() {
        at.clear();
        at.extend(g.incident(v).iter().filter_map(|&(_, e)| chi.get(e).map(|c| (c, e))));
        at.sort_unstable();
        for i in 0..at.len() {
            for j in i + 1..at.len() {
                if at[j].0 != at[i].0 {
                    break;
                }
                out.push((at[i].1.min(at[j].1), at[i].1.max(at[j].1)));
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// Incident coloured edges per vertex, sorted by colour (compressed rows).
struct ColourIndex {
    start: Vec<usize>,
    entries: Vec<(Colour, usize)>,
}

impl ColourIndex {
    fn new(g: &Graph, chi: &PartialEdgeColouring) -> Self {
        let mut start = Vec::with_capacity(g.n() + 1);
        let mut entries = Vec::with_capacity(2 * g.m());
        for v in 0..g.n() {
            start.push(entries.len());
            let s = entries.len();
            entries.extend(g.incident(v).iter().filter_map(|&(_, e)| chi.get(e).map(|c| (c, e))));
            entries[s..].sort_unstable();
        }
        start.push(entries.len());
        ColourIndex { start, entries }
    }

    fn at(&self, v: usize) -> &[(Colour, usize)] {
        &self.entries[self.start[v]..self.start[v + 1]]
    }

    fn find(&self, v: usize, c: Colour) -> Option<usize> {
        let row = self.at(v);
        row.binary_search_by_key(&c, |&(x, _)| x).ok().map(|i| row[i].1)
    }
}

fn canonical(colours: (Colour, Colour), vertices: Vec<usize>, edges: Vec<usize>) -> BicolouredCycle {
    let l = vertices.len();
    let s = (0..l).min_by_key(|&i| vertices[i]).unwrap();
    let forward = vertices[(s + 1) % l] < vertices[(s + l - 1) % l];
    let (vs, es) = if forward {
        ((0..l).map(|i| vertices[(s + i) % l]).collect(), (0..l).map(|i| edges[(s + i) % l]).collect())
    } else {
        ((0..l).map(|i| vertices[(s + l - i) % l]).collect(), (0..l).map(|i| edges[(s + 2 * l - i - 1) % l]).collect())
    };
    BicolouredCycle { colours, vertices: vs, edges: es }
}

/// Every cycle coloured with exactly two colours, for a proper partial colouring.
///
/// Only colour pairs meeting at some vertex are scanned. Uncoloured edges are
/// ignored.
pub fn find_bicoloured_cycles(g: &Graph, chi: &PartialEdgeColouring) -> Result<Vec<BicolouredCycle>, ColouringError> {
    let violations = properness_violations(g, chi)?;
    if !violations.is_empty() {
        return Err(ColouringError::NotProper { violations });
    }
    let index = ColourIndex::new(g, chi);
    let mut pairs = Vec::new();
    for v in 0..g.n() {
        let row = index.at(v);
        for i in 0..row.len() {
            for j in i + 1..row.len() {
                pairs.push((row[i].0, row[j].0));
            }
        }
    }
    pairs.sort_unstable();
    pairs.dedup();
    if pairs.is_empty() {
        return Ok(Vec::new());
    }

    // edges grouped by colour
    let palette = chi.palette_size() as usize;
    let mut by_colour_start = vec![0usize; palette + 1];
    for c in chi.colours().iter().flatten() {
        by_colour_start[*c as usize + 1] += 1;
    }
    for c in 0..palette {
        by_colour_start[c + 1] += by_colour_start[c];
    }
    let mut fill = by_colour_start.clone();
    let mut by_colour = vec![0usize; by_colour_start[palette]];
    for (e, c) in chi.colours().iter().enumerate() {
        if let Some(c) = *c {
            by_colour[fill[c as usize]] = e;
            fill[c as usize] += 1;
        }
    }

    let mut stamp = vec![0u32; g.m()];
    let mut out = Vec::new();
    for (pid, &(c, d)) in pairs.iter().enumerate() {
        let tag = pid as u32 + 1;
        let other = |x: Colour| if x == c { d } else { c };
        for &e0 in &by_colour[by_colour_start[c as usize]..by_colour_start[c as usize + 1]] {
            if stamp[e0] == tag {
                continue;
            }
            stamp[e0] = tag;
            let (x0, y0) = g.edge(e0);
            let mut vertices = vec![x0];
            let mut edges = vec![e0];
            let (mut cur, mut want) = (y0, d);
            let mut closed = false;
            while let Some(f) = index.find(cur, want) {
                if f == e0 {
                    closed = true;
                    break;
                }
                stamp[f] = tag;
                vertices.push(cur);
                edges.push(f);
                cur = g.other_end(f, cur);
                want = other(want);
            }
            if closed {
                out.push(canonical((c, d), vertices, edges));
            } else {
                let (mut cur, mut want) = (x0, d);
                while let Some(f) = index.find(cur, want) {
                    stamp[f] = tag;
                    cur = g.other_end(f, cur);
                    want = other(want);
                }
            }
        }
    }
    out.sort();
    Ok(out)
}

pub fn is_acyclic(g: &Graph, chi: &PartialEdgeColouring) -> Result<bool, ColouringError> {
    Ok(find_bicoloured_cycles(g, chi)?.is_empty())
}

/// Edges (starting with `e`) of a bicoloured cycle through the coloured edge
/// `e`, if one exists. Assumes `chi` is proper around the cycle.
pub fn bicoloured_cycle_through(g: &Graph, chi: &PartialEdgeColouring, e: usize) -> Option<Vec<usize>> {
    let c = chi.get(e)?;
    let (u, v) = g.edge(e);
    let find = |w: usize, col: Colour| g.incident(w).iter().map(|&(_, f)| f).find(|&f| chi.get(f) == Some(col));
    for &(_, f0) in g.incident(v) {
        let Some(d) = chi.get(f0) else { continue };
        if f0 == e || d == c {
            continue;
        }
        let mut cycle = vec![e, f0];
        let mut cur = g.other_end(f0, v);
        let mut want = c;
        loop {
            if cur == u && want == c {
                return Some(cycle);
            }
            match find(cur, want) {
                Some(f) if f != e && cycle.len() <= g.m() => {
                    cycle.push(f);
                    cur = g.other_end(f, cur);
                    want = if want == c { d } else { c };
                }
                _ => break,
            }
        }
    }
    None
}
