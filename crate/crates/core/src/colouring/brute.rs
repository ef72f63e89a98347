use super::{Colour, ColouringError, PartialEdgeColouring};
use crate::graph::Graph;

pub const DEFAULT_EDGE_GUARD: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AcyclicIndex {
    Exact(u32),
    NotFound,
}

pub fn brute_force_acyclic_index(g: &Graph, max_colours: u32) -> Result<AcyclicIndex, ColouringError> {
    brute_force_acyclic_index_with_guard(g, max_colours, DEFAULT_EDGE_GUARD)
}

/// Smallest `k <= max_colours` admitting an acyclic edge colouring, by
/// backtracking with properness and bicoloured-cycle pruning.
pub fn brute_force_acyclic_index_with_guard(
    g: &Graph,
    max_colours: u32,
    guard: usize,
) -> Result<AcyclicIndex, ColouringError> {
    if g.m() > guard {
        return Err(ColouringError::TooManyEdges { m: g.m(), guard });
    }
    if g.m() == 0 {
        return Ok(AcyclicIndex::Exact(0));
    }
    for k in g.max_degree() as u32..=max_colours {
        if acyclic_colouring_with(g, k).is_some() {
            return Ok(AcyclicIndex::Exact(k));
        }
    }
    Ok(AcyclicIndex::NotFound)
}

/// Some acyclic edge colouring with at most `k` colours, if one exists.
pub fn acyclic_colouring_with(g: &Graph, k: u32) -> Option<PartialEdgeColouring> {
    let order = bfs_edge_order(g);
    let mut colours = vec![None; g.m()];
    if search(g, &order, 0, k, 0, &mut colours) {
        Some(PartialEdgeColouring::from_colours(k, colours).unwrap())
    } else {
        None
    }
}

fn bfs_edge_order(g: &Graph) -> Vec<usize> {
    let mut seen = vec![false; g.m()];
    let mut order = Vec::with_capacity(g.m());
    for s in 0..g.m() {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut head = order.len();
        order.push(s);
        while head < order.len() {
            let (u, v) = g.edge(order[head]);
            head += 1;
            for w in [u, v] {
                for &(_, f) in g.incident(w) {
                    if !seen[f] {
                        seen[f] = true;
                        order.push(f);
                    }
                }
            }
        }
    }
    order
}

fn search(g: &Graph, order: &[usize], idx: usize, k: u32, used: u32, colours: &mut [Option<Colour>]) -> bool {
    let Some(&e) = order.get(idx) else { return true };
    // colours above `used` are interchangeable, so only the first is tried
    for c in 0..k.min(used + 1) {
        if admissible(g, colours, e, c) {
            colours[e] = Some(c);
            if search(g, order, idx + 1, k, used.max(c + 1), colours) {
                return true;
            }
            colours[e] = None;
        }
    }
    false
}

fn colour_at(g: &Graph, colours: &[Option<Colour>], w: usize, c: Colour) -> Option<usize> {
    g.incident(w).iter().map(|&(_, f)| f).find(|&f| colours[f] == Some(c))
}

fn admissible(g: &Graph, colours: &[Option<Colour>], e: usize, c: Colour) -> bool {
    let (u, v) = g.edge(e);
    if colour_at(g, colours, u, c).is_some() || colour_at(g, colours, v, c).is_some() {
        return false;
    }
    for &(_, f) in g.incident(v) {
        let Some(d) = colours[f] else { continue };
        // follow the d,c,d,... path from v; reaching u closes a {c,d} cycle with e
        let mut cur = g.other_end(f, v);
        let mut want = c;
        loop {
            if cur == u {
                return false;
            }
            match colour_at(g, colours, cur, want) {
                Some(h) => {
                    cur = g.other_end(h, cur);
                    want = if want == c { d } else { c };
                }
                None => break,
            }
        }
    }
    true
}
