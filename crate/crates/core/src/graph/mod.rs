//! Simple undirected graphs with dense vertex and edge ids.

mod generate;
mod io;

pub use generate::{bipartite_girth_six, generate_high_girth_regular, generate_random_regular, next_prime, SwapReport};
pub use io::{load_graph, parse_edge_list, save_graph, to_edge_list};

use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(usize, usize),
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("malformed header: {0:?}")]
    MalformedHeader(String),
    #[error("malformed edge on line {line}: {text:?}")]
    MalformedEdge { line: usize, text: String },
    #[error("header declares {declared} edges but {found} were listed")]
    EdgeCountMismatch { declared: usize, found: usize },
    #[error("n*d must be even (n={n}, d={d})")]
    OddDegreeSum { n: usize, d: usize },
    #[error("degree {d} must be smaller than the vertex count {n}")]
    DegreeTooLarge { n: usize, d: usize },
    #[error("invalid generator parameters: {0}")]
    InvalidParameters(String),
    #[error("no simple {d}-regular graph on {n} vertices found after {attempts} attempts")]
    GenerationFailed { n: usize, d: usize, attempts: usize },
    #[error("girth target {target} missed after {steps} swap steps (best girth {best})")]
    GirthTargetMissed { target: usize, best: Girth, steps: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Length of a shortest cycle; forests have unbounded girth.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Girth {
    Finite(usize),
    Unbounded,
}

impl Girth {
    pub fn at_least(self, g: usize) -> bool {
        match self {
            Girth::Finite(x) => x >= g,
            Girth::Unbounded => true,
        }
    }

    pub fn finite(self) -> Option<usize> {
        match self {
            Girth::Finite(x) => Some(x),
            Girth::Unbounded => None,
        }
    }
}

impl fmt::Display for Girth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Girth::Finite(x) => write!(f, "{x}"),
            Girth::Unbounded => write!(f, "unbounded"),
        }
    }
}

/// Immutable simple graph. Edge ids are positions in [`Graph::edges`]; each
/// stored pair has its smaller endpoint first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<(usize, usize)>>,
}

impl Graph {
    pub fn new<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut list = Vec::new();
        let mut seen = HashSet::new();
        let mut adj = vec![Vec::new(); n];
        for (a, b) in edges {
            for v in [a, b] {
                if v >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: v, n });
                }
            }
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            let key = (a.min(b), a.max(b));
            if !seen.insert(key) {
                return Err(GraphError::DuplicateEdge(key.0, key.1));
            }
            let id = list.len();
            adj[key.0].push((key.1, id));
            adj[key.1].push((key.0, id));
            list.push(key);
        }
        Ok(Graph { n, edges: list, adj })
    }

    pub fn empty(n: usize) -> Self {
        Graph { n, edges: Vec::new(), adj: vec![Vec::new(); n] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> (usize, usize) {
        self.edges[e]
    }

    /// `(neighbour, edge id)` pairs at `v`.
    pub fn incident(&self, v: usize) -> &[(usize, usize)] {
        &self.adj[v]
    }

    pub fn neighbours(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[v].iter().map(|&(u, _)| u)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn min_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).min().unwrap_or(0)
    }

    pub fn is_regular(&self) -> bool {
        self.max_degree() == self.min_degree()
    }

    pub fn edge_id(&self, u: usize, v: usize) -> Option<usize> {
        let (a, b) = if self.adj[u].len() <= self.adj[v].len() { (u, v) } else { (v, u) };
        self.adj[a].iter().find(|&&(w, _)| w == b).map(|&(_, e)| e)
    }

    pub fn other_end(&self, e: usize, v: usize) -> usize {
        let (a, b) = self.edges[e];
        if a == v {
            b
        } else {
            a
        }
    }

    /// Two-colouring of the vertices, if one exists.
    pub fn bipartition(&self) -> Option<Vec<bool>> {
        let mut side: Vec<Option<bool>> = vec![None; self.n];
        let mut stack = Vec::new();
        for s in 0..self.n {
            if side[s].is_some() {
                continue;
            }
            side[s] = Some(false);
            stack.push(s);
            while let Some(x) = stack.pop() {
                let sx = side[x].unwrap();
                for &(y, _) in &self.adj[x] {
                    match side[y] {
                        None => {
                            side[y] = Some(!sx);
                            stack.push(y);
                        }
                        Some(sy) if sy == sx => return None,
                        Some(_) => {}
                    }
                }
            }
        }
        Some(side.into_iter().map(|s| s.unwrap()).collect())
    }

    /// Vertices within distance `r` of `v`, excluding `v`.
    pub fn ball(&self, v: usize, r: usize) -> Vec<usize> {
        let mut dist = std::collections::HashMap::new();
        dist.insert(v, 0usize);
        let mut frontier = vec![v];
        let mut out = Vec::new();
        for d in 1..=r {
            let mut next = Vec::new();
            for &x in &frontier {
                for &(y, _) in &self.adj[x] {
                    if let std::collections::hash_map::Entry::Vacant(slot) = dist.entry(y) {
                        slot.insert(d);
                        next.push(y);
                        out.push(y);
                    }
                }
            }
            frontier = next;
        }
        out
    }
}

/// Girth by breadth-first search from every vertex.
pub fn girth(g: &Graph) -> Girth {
    match shortest_cycle(g) {
        Some(c) => Girth::Finite(c.len()),
        None => Girth::Unbounded,
    }
}

/// Vertex sequence of one shortest cycle, or `None` for a forest.
pub fn shortest_cycle(g: &Graph) -> Option<Vec<usize>> {
    shortest_cycle_below(g, usize::MAX)
}

/// Whether every cycle has length at least `t`; searches only to depth `t/2`.
pub fn girth_at_least(g: &Graph, t: usize) -> bool {
    shortest_cycle_below(g, t).is_none()
}

fn shortest_cycle_below(g: &Graph, bound: usize) -> Option<Vec<usize>> {
    let n = g.n();
    let mut dist = vec![usize::MAX; n];
    let mut parent = vec![(usize::MAX, usize::MAX); n];
    let mut queue = Vec::with_capacity(n);
    let mut best = bound;
    let mut best_cycle = None;
    for r in 0..n {
        dist[r] = 0;
        queue.push(r);
        let mut head = 0;
        while head < queue.len() {
            let x = queue[head];
            head += 1;
            if best != usize::MAX && 2 * dist[x] >= best {
                break;
            }
            for &(y, e) in g.incident(x) {
                if e == parent[x].1 {
                    continue;
                }
                if dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                    parent[y] = (x, e);
                    queue.push(y);
                } else {
                    let len = dist[x] + dist[y] + 1;
                    if len < best {
                        best = len;
                        best_cycle = Some(join_tree_paths(&parent, r, x, y));
                    }
                }
            }
        }
        for &v in &queue {
            dist[v] = usize::MAX;
            parent[v] = (usize::MAX, usize::MAX);
        }
        queue.clear();
        if best == 3 {
            break;
        }
    }
    best_cycle
}

fn join_tree_paths(parent: &[(usize, usize)], r: usize, x: usize, y: usize) -> Vec<usize> {
    let up = |mut v: usize| {
        let mut p = vec![v];
        while v != r {
            v = parent[v].0;
            p.push(v);
        }
        p
    };
    let mut cycle = up(x);
    cycle.reverse();
    let mut tail = up(y);
    tail.pop();
    cycle.extend(tail);
    cycle
}

/// Small named graphs used by tests and examples.
pub mod families {
    use super::Graph;

    pub fn cycle(n: usize) -> Graph {
        Graph::new(n, (0..n).map(|i| (i, (i + 1) % n))).expect("cycle needs n >= 3")
    }

    pub fn path(n: usize) -> Graph {
        Graph::new(n, (1..n).map(|i| (i - 1, i))).unwrap()
    }

    pub fn complete(n: usize) -> Graph {
        Graph::new(n, (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b)))).unwrap()
    }

    pub fn complete_bipartite(a: usize, b: usize) -> Graph {
        Graph::new(a + b, (0..a).flat_map(|x| (0..b).map(move |y| (x, a + y)))).unwrap()
    }

    /// `K_{1,k}` with centre 0.
    pub fn star(k: usize) -> Graph {
        Graph::new(k + 1, (1..=k).map(|i| (0, i))).unwrap()
    }

    pub fn petersen() -> Graph {
        let outer = (0..5).map(|i| (i, (i + 1) % 5));
        let spokes = (0..5).map(|i| (i, i + 5));
        let inner = (0..5).map(|i| (5 + i, 5 + (i + 2) % 5));
        Graph::new(10, outer.chain(spokes).chain(inner)).unwrap()
    }

    /// Incidence graph of the Fano plane.
    pub fn heawood() -> Graph {
        let lines = (0..7).flat_map(|l| [0, 1, 3].into_iter().map(move |o| (l, 7 + (l + o) % 7)));
        Graph::new(14, lines).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::families::*;
    use super::*;

    #[test]
    fn construction_rejects_bad_input() {
        assert!(matches!(Graph::new(3, [(0, 0)]), Err(GraphError::SelfLoop(0))));
        assert!(matches!(Graph::new(3, [(0, 1), (1, 0)]), Err(GraphError::DuplicateEdge(0, 1))));
        assert!(matches!(Graph::new(3, [(0, 3)]), Err(GraphError::VertexOutOfRange { .. })));
    }

    #[test]
    fn bounded_girth_test() {
        assert!(girth_at_least(&petersen(), 5));
        assert!(!girth_at_least(&petersen(), 6));
        assert!(girth_at_least(&heawood(), 6));
        assert!(girth_at_least(&path(9), 100));
        assert!(!girth_at_least(&complete(4), 4));
    }

    #[test]
    fn adjacency_is_consistent() {
        let g = petersen();
        let total: usize = (0..g.n()).map(|v| g.degree(v)).sum();
        assert_eq!(total, 2 * g.m());
        for (e, &(u, v)) in g.edges().iter().enumerate() {
            assert!(u < v);
            assert_eq!(g.edge_id(u, v), Some(e));
            assert_eq!(g.edge_id(v, u), Some(e));
            assert_eq!(g.other_end(e, u), v);
        }
    }

    #[test]
    fn girth_of_named_graphs() {
        assert_eq!(girth(&cycle(5)), Girth::Finite(5));
        assert_eq!(girth(&path(4)), Girth::Unbounded);
        assert_eq!(girth(&petersen()), Girth::Finite(5));
        assert_eq!(girth(&heawood()), Girth::Finite(6));
        assert_eq!(girth(&complete(4)), Girth::Finite(3));
        assert_eq!(girth(&complete_bipartite(3, 3)), Girth::Finite(4));
        assert_eq!(girth(&Graph::empty(0)), Girth::Unbounded);
        assert!(Girth::Finite(100) < Girth::Unbounded);
    }

    #[test]
    fn shortest_cycle_is_a_cycle() {
        for g in [petersen(), heawood(), cycle(9), complete(5)] {
            let c = shortest_cycle(&g).unwrap();
            let set: HashSet<_> = c.iter().collect();
            assert_eq!(set.len(), c.len());
            for i in 0..c.len() {
                assert!(g.edge_id(c[i], c[(i + 1) % c.len()]).is_some());
            }
        }
    }

    #[test]
    fn bipartition_and_ball() {
        assert!(heawood().bipartition().is_some());
        assert!(petersen().bipartition().is_none());
        let mut b = path(5).ball(0, 2);
        b.sort();
        assert_eq!(b, vec![1, 2]);
    }
}
