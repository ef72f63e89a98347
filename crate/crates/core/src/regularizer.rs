//! Embedding a graph of maximum degree Δ into a Δ-regular graph without
//! creating short cycles.
//!
//! One step takes `|V(H)|` disjoint copies of `G` and, for an edge `xy` of a
//! bipartite regular host `H` whose colour equals the power-colour of a
//! deficient vertex `v`, joins copy `x` of `v` to copy `y` of `v`. Every
//! deficient vertex gains one edge per step. Copy 0 keeps the original labels.

use crate::graph::{
    bipartite_girth_six, families, generate_high_girth_regular, girth, girth_at_least, next_prime, Girth, Graph,
    GraphError,
};
use crate::rng::{self, derive_key, Domain};
use rand::seq::SliceRandom;
use serde::Serialize;
use std::collections::VecDeque;
use thiserror::Error;

pub const DEFAULT_EMBED_BUDGET: usize = 1_000_000;

/// Swap budget handed to the high-girth generator when building hosts.
const HOST_SWAP_STEPS: usize = 1_000_000;

#[derive(Debug, Error)]
pub enum RegularizerError {
    #[error("graph is not bipartite")]
    NotBipartite,
    #[error("graph is not regular")]
    NotRegular,
    #[error("host degree {found} is below the {needed} colours on deficient vertices")]
    HostDegreeTooSmall { needed: usize, found: usize },
    #[error("host girth {found} is below the target {needed}")]
    HostGirthTooSmall { needed: usize, found: Girth },
    #[error("estimated output of {estimate:.3e} vertices exceeds the budget of {budget}")]
    BudgetExceeded { estimate: f64, budget: usize },
    #[error("host construction failed: {0}")]
    HostConstruction(#[from] GraphError),
    #[error("embedding check failed: {0}")]
    CheckFailed(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PowerColouring {
    /// Colour of each vertex, `0..count`.
    pub colours: Vec<usize>,
    pub count: usize,
    /// Largest ball size `1 + Δ·((Δ−1)^r − 1)/(Δ−2)`; greedy never exceeds it.
    pub greedy_bound: u128,
    /// `count ≤ Δ^r`.
    pub within_delta_power: bool,
}

/// `1 + Δ + Δ(Δ−1) + … + Δ(Δ−1)^{r−1}`, saturating.
pub fn power_colour_bound(delta: usize, r: usize) -> u128 {
    let (d, mut term, mut total) = (delta as u128, delta as u128, 1u128);
    for _ in 0..r {
        total = total.saturating_add(term);
        term = term.saturating_mul(d.saturating_sub(1));
        if term == 0 {
            break;
        }
    }
    total
}

pub fn power_colouring(g: &Graph, r: usize) -> PowerColouring {
    let order: Vec<usize> = (0..g.n()).collect();
    power_colouring_ordered(g, r, &order)
}

/// Greedy colouring of `G^r` visiting vertices in `order`.
pub fn power_colouring_ordered(g: &Graph, r: usize, order: &[usize]) -> PowerColouring {
    const NONE: usize = usize::MAX;
    let mut colours = vec![NONE; g.n()];
    let mut used = Vec::new();
    let mut count = 0;
    for &v in order {
        used.clear();
        used.extend(g.ball(v, r).into_iter().map(|u| colours[u]).filter(|&c| c != NONE));
        used.sort_unstable();
        used.dedup();
        let c = used.iter().enumerate().find(|&(i, &c)| i != c).map_or(used.len(), |(i, _)| i);
        colours[v] = c;
        count = count.max(c + 1);
    }
    let delta = g.max_degree() as u128;
    let within_delta_power =
        u32::try_from(r).ok().and_then(|r| delta.checked_pow(r)).is_none_or(|p| count as u128 <= p);
    PowerColouring { colours, count, greedy_bound: power_colour_bound(g.max_degree(), r), within_delta_power }
}

struct Matcher<'a> {
    h: &'a Graph,
    alive: &'a [bool],
    mate: Vec<usize>,
    dist: Vec<usize>,
}

const NIL: usize = usize::MAX;

impl Matcher<'_> {
    /// Hopcroft–Karp over live edges; `mate[v]` is the matched edge id.
    fn run(&mut self, left: &[usize]) {
        loop {
            let mut queue = VecDeque::new();
            for &u in left {
                if self.mate[u] == NIL {
                    self.dist[u] = 0;
                    queue.push_back(u);
                } else {
                    self.dist[u] = NIL;
                }
            }
            let mut found = false;
            while let Some(u) = queue.pop_front() {
                for &(v, e) in self.h.incident(u) {
                    if !self.alive[e] {
                        continue;
                    }
                    match self.mate[v] {
                        NIL => found = true,
                        f => {
                            let w = self.h.other_end(f, v);
                            if self.dist[w] == NIL {
                                self.dist[w] = self.dist[u] + 1;
                                queue.push_back(w);
                            }
                        }
                    }
                }
            }
            if !found {
                return;
            }
            for &u in left {
                if self.mate[u] == NIL {
                    self.augment(u);
                }
            }
        }
    }

    fn augment(&mut self, u: usize) -> bool {
        for &(v, e) in self.h.incident(u) {
            if !self.alive[e] {
                continue;
            }
            let ok = match self.mate[v] {
                NIL => true,
                f => {
                    let w = self.h.other_end(f, v);
                    self.dist[w] == self.dist[u].wrapping_add(1) && self.augment(w)
                }
            };
            if ok {
                self.mate[u] = e;
                self.mate[v] = e;
                return true;
            }
        }
        self.dist[u] = NIL;
        false
    }
}

/// Splits a `d`-regular bipartite graph into `d` perfect matchings; entry `e`
/// is the matching (colour) of edge `e`.
pub fn bipartite_regular_edge_colouring(h: &Graph) -> Result<Vec<usize>, RegularizerError> {
    let side = h.bipartition().ok_or(RegularizerError::NotBipartite)?;
    if !h.is_regular() {
        return Err(RegularizerError::NotRegular);
    }
    let d = if h.n() == 0 { 0 } else { h.degree(0) };
    let left: Vec<usize> = (0..h.n()).filter(|&v| !side[v]).collect();
    let mut colour = vec![NIL; h.m()];
    let mut alive = vec![true; h.m()];
    for c in 0..d {
        let mut m = Matcher { h, alive: &alive, mate: vec![NIL; h.n()], dist: vec![NIL; h.n()] };
        m.run(&left);
        let mate = m.mate;
        if mate.contains(&NIL) {
            return Err(RegularizerError::CheckFailed(format!("matching {c} is not perfect")));
        }
        for &u in &left {
            colour[mate[u]] = c;
            alive[mate[u]] = false;
        }
    }
    for v in 0..h.n() {
        let mut seen = vec![false; d];
        for &(_, e) in h.incident(v) {
            seen[colour[e]] = true;
        }
        if seen.contains(&false) {
            return Err(RegularizerError::CheckFailed(format!("vertex {v} misses a colour")));
        }
    }
    Ok(colour)
}

/// Moore-type lower bound on the order of a `d`-regular graph of girth `g`.
fn moore_bound(d: usize, g: usize) -> u128 {
    let k = (g.saturating_sub(1) / 2) as u32;
    let geometric = |terms: u32| (0..terms).fold(0u128, |acc, i| acc.saturating_add((d as u128 - 1).saturating_pow(i)));
    if g % 2 == 1 {
        1u128.saturating_add((d as u128).saturating_mul(geometric(k)))
    } else {
        2u128.saturating_mul(geometric(g as u32 / 2))
    }
}

/// Vertex count of the generated base graph for hosts of girth above six.
fn swap_base_order(degree: usize, girth_target: usize) -> u128 {
    let n = moore_bound(degree, girth_target).saturating_mul(4).max(degree as u128 + 1);
    if n % 2 == 1 && degree % 2 == 1 {
        n + 1
    } else {
        n
    }
}

/// Order of the host [`host_graph`] would build.
pub fn host_size_estimate(degree: usize, girth_target: usize) -> u128 {
    match degree {
        0 | 1 => 2,
        2 => girth_target.max(4).next_multiple_of(2) as u128,
        _ if girth_target <= 4 => 2 * degree as u128,
        _ if girth_target <= 6 => 2 * (degree * (2 * next_prime(degree) - 1)) as u128,
        _ => 2 * swap_base_order(degree, girth_target),
    }
}

/// A bipartite `degree`-regular graph of girth at least `girth_target`.
///
/// `K_{D,D}` up to girth four, an algebraic construction up to six, beyond
/// that the bipartite double cover of a swap-generated high-girth graph.
pub fn host_graph(degree: usize, girth_target: usize, seed: u64) -> Result<Graph, RegularizerError> {
    let h = match degree {
        0 => return Err(GraphError::InvalidParameters("host degree must be positive".into()).into()),
        1 => families::path(2),
        2 => families::cycle(girth_target.max(4).next_multiple_of(2)),
        _ if girth_target <= 4 => families::complete_bipartite(degree, degree),
        _ if girth_target <= 6 => bipartite_girth_six(degree, 2 * next_prime(degree) - 1, seed)?,
        _ => {
            let n = usize::try_from(swap_base_order(degree, girth_target))
                .map_err(|_| GraphError::InvalidParameters("host too large".into()))?;
            let (base, _) = generate_high_girth_regular(n, degree, girth_target, seed, HOST_SWAP_STEPS)?;
            double_cover(&base)
        }
    };
    Ok(h)
}

/// `G × K_2`: vertex `v` splits into `v` and `v + n`, edge `uv` into
/// `u(v+n)` and `v(u+n)`.
pub fn double_cover(g: &Graph) -> Graph {
    let n = g.n();
    let edges = g.edges().iter().flat_map(|&(u, v)| [(u, v + n), (v, u + n)]);
    Graph::new(2 * n, edges).expect("double cover of a simple graph is simple")
}

#[derive(Clone, Debug)]
pub struct EmbedStep {
    pub graph: Graph,
    pub copies: usize,
    /// Colours on deficient vertices, the least admissible host degree.
    pub needed_degree: usize,
    pub added_edges: usize,
}

fn deficient_first_colouring(g: &Graph, r: usize, seed: u64) -> (PowerColouring, usize) {
    let delta = g.max_degree();
    let mut deficient: Vec<usize> = (0..g.n()).filter(|&v| g.degree(v) < delta).collect();
    let mut full: Vec<usize> = (0..g.n()).filter(|&v| g.degree(v) == delta).collect();
    let mut rng = rng::stream(seed, Domain::Embed, &[g.n() as u64, g.m() as u64]);
    deficient.shuffle(&mut rng);
    full.shuffle(&mut rng);
    let needed_from = deficient.len();
    deficient.extend(full);
    let pc = power_colouring_ordered(g, r, &deficient);
    let needed = deficient[..needed_from].iter().map(|&v| pc.colours[v] + 1).max().unwrap_or(0);
    (pc, needed)
}

/// Colours needed on deficient vertices for one step at this girth target.
pub fn needed_host_degree(g: &Graph, girth_target: usize, seed: u64) -> usize {
    deficient_first_colouring(g, girth_target, seed).1
}

/// One doubling step. Deficient vertices are coloured first in the power
/// colouring so the host degree only has to cover their colours.
pub fn embed_step(g: &Graph, girth_target: usize, h: &Graph, seed: u64) -> Result<EmbedStep, RegularizerError> {
    let n = g.n();
    let delta = g.max_degree();
    let (pc, needed) = deficient_first_colouring(g, girth_target, seed);
    let copies = h.n();
    let mut edges = Vec::with_capacity(copies * g.m() + copies * n);
    for x in 0..copies {
        edges.extend(g.edges().iter().map(|&(u, v)| (x * n + u, x * n + v)));
    }
    let mut added_edges = 0;
    if needed > 0 {
        if !h.is_regular() || h.degree(0) < needed {
            let found = if h.is_regular() && h.n() > 0 { h.degree(0) } else { h.min_degree() };
            return Err(RegularizerError::HostDegreeTooSmall { needed, found });
        }
        if !girth_at_least(h, girth_target) {
            return Err(RegularizerError::HostGirthTooSmall { needed: girth_target, found: girth(h) });
        }
        let fh = bipartite_regular_edge_colouring(h)?;
        let mut by_colour = vec![Vec::new(); needed];
        for v in (0..n).filter(|&v| g.degree(v) < delta) {
            by_colour[pc.colours[v]].push(v);
        }
        for (e, &(x, y)) in h.edges().iter().enumerate() {
            if let Some(vs) = by_colour.get(fh[e]) {
                for &v in vs {
                    edges.push((x * n + v, y * n + v));
                    added_edges += 1;
                }
            }
        }
    }
    let out = Graph::new(copies * n, edges)?;
    let want_min = if g.min_degree() < delta { g.min_degree() + 1 } else { delta };
    if out.n() > 0 && (out.max_degree() != delta || out.min_degree() != want_min) {
        return Err(RegularizerError::CheckFailed(format!(
            "degrees [{}, {}] after step, expected [{want_min}, {delta}]",
            out.min_degree(),
            out.max_degree()
        )));
    }
    let t = girth(g).finite().unwrap_or(usize::MAX).min(girth_target);
    if !girth_at_least(&out, t) {
        return Err(RegularizerError::CheckFailed(format!("output has a cycle shorter than {t}")));
    }
    Ok(EmbedStep { graph: out, copies, needed_degree: needed, added_edges })
}

#[derive(Clone, Debug)]
pub struct Embedding {
    pub graph: Graph,
    pub steps: usize,
    /// Vertex of the output holding each original vertex.
    pub copy0: Vec<usize>,
}

/// Output order if every step used a host of the first step's size.
pub fn embed_size_estimate(g: &Graph, girth_target: usize, seed: u64) -> f64 {
    let steps = g.max_degree() - g.min_degree();
    if steps == 0 {
        return g.n() as f64;
    }
    let hs = host_size_estimate(needed_host_degree(g, girth_target, seed), girth_target) as f64;
    g.n() as f64 * hs.powi(steps as i32)
}

/// Repeats [`embed_step`] until the graph is Δ-regular.
pub fn embed_regular(g: &Graph, girth_target: usize, seed: u64, budget: usize) -> Result<Embedding, RegularizerError> {
    let copy0: Vec<usize> = (0..g.n()).collect();
    if g.n() == 0 || g.is_regular() {
        return Ok(Embedding { graph: g.clone(), steps: 0, copy0 });
    }
    let estimate = embed_size_estimate(g, girth_target, seed);
    if estimate > budget as f64 {
        return Err(RegularizerError::BudgetExceeded { estimate, budget });
    }
    let mut cur = g.clone();
    let mut steps = 0;
    while !cur.is_regular() {
        let step_seed = derive_key(seed, Domain::Embed, &[steps as u64]);
        let needed = needed_host_degree(&cur, girth_target, step_seed);
        let size = cur.n() as f64 * host_size_estimate(needed, girth_target) as f64;
        if size > budget as f64 {
            return Err(RegularizerError::BudgetExceeded { estimate: size, budget });
        }
        let h = host_graph(needed, girth_target, step_seed)?;
        cur = embed_step(&cur, girth_target, &h, step_seed)?.graph;
        steps += 1;
    }
    let inside: Vec<(usize, usize)> = cur.edges().iter().copied().filter(|&(u, v)| u < g.n() && v < g.n()).collect();
    if inside != g.edges() {
        return Err(RegularizerError::CheckFailed("copy 0 differs from the input".into()));
    }
    Ok(Embedding { graph: cur, steps, copy0 })
}
