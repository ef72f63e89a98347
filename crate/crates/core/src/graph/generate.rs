//! Random regular, high-girth and algebraic girth-six generators.

use super::{girth, Girth, Graph, GraphError};
use crate::rng::{self, Domain};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_xoshiro::SplitMix64;
use std::collections::{HashMap, HashSet};

/// Full-rejection attempts before the pairing is repaired by switchings.
const REJECTION_ATTEMPTS: usize = 100;

type Key = (usize, usize);

fn key(a: usize, b: usize) -> Key {
    (a.min(b), a.max(b))
}

/// Random simple `d`-regular graph on `n` vertices from the configuration model.
///
/// Pairings are drawn and rejected while non-simple; if every attempt fails, the
/// last pairing is repaired with degree-preserving switchings.
pub fn generate_random_regular(n: usize, d: usize, seed: u64) -> Result<Graph, GraphError> {
    if (n * d) % 2 == 1 {
        return Err(GraphError::OddDegreeSum { n, d });
    }
    if d > 0 && d >= n {
        return Err(GraphError::DegreeTooLarge { n, d });
    }
    let mut rng = rng::stream(seed, Domain::Generate, &[0]);
    let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
    let mut pairs = Vec::new();
    for _ in 0..REJECTION_ATTEMPTS {
        stubs.shuffle(&mut rng);
        pairs = stubs.chunks(2).map(|c| (c[0], c[1])).collect::<Vec<_>>();
        let mut seen = HashSet::new();
        if pairs.iter().all(|&(a, b)| a != b && seen.insert(key(a, b))) {
            return Graph::new(n, pairs);
        }
    }
    repair_pairing(&mut pairs, &mut rng, n, d)?;
    Graph::new(n, pairs)
}

fn repair_pairing(pairs: &mut [(usize, usize)], rng: &mut SplitMix64, n: usize, d: usize) -> Result<(), GraphError> {
    let mut count: HashMap<Key, usize> = HashMap::new();
    for &(a, b) in pairs.iter() {
        *count.entry(key(a, b)).or_default() += 1;
    }
    let is_bad = |count: &HashMap<Key, usize>, (a, b): (usize, usize)| a == b || count[&key(a, b)] > 1;
    let budget = 1000 * pairs.len().max(1);
    let mut tries = 0;
    loop {
        let bad: Vec<usize> = (0..pairs.len()).filter(|&i| is_bad(&count, pairs[i])).collect();
        if bad.is_empty() {
            return Ok(());
        }
        for i in bad {
            if !is_bad(&count, pairs[i]) {
                continue;
            }
            loop {
                tries += 1;
                if tries > budget {
                    return Err(GraphError::GenerationFailed { n, d, attempts: REJECTION_ATTEMPTS });
                }
                let j = rng.gen_range(0..pairs.len());
                if j == i {
                    continue;
                }
                let (a, b) = pairs[i];
                let (mut c, mut dd) = pairs[j];
                if rng.gen::<bool>() {
                    std::mem::swap(&mut c, &mut dd);
                }
                let (p, q) = ((a, c), (b, dd));
                if p.0 == p.1 || q.0 == q.1 || key(p.0, p.1) == key(q.0, q.1) {
                    continue;
                }
                if count.get(&key(p.0, p.1)).copied().unwrap_or(0) > 0
                    || count.get(&key(q.0, q.1)).copied().unwrap_or(0) > 0
                {
                    continue;
                }
                for old in [pairs[i], pairs[j]] {
                    *count.get_mut(&key(old.0, old.1)).unwrap() -= 1;
                }
                pairs[i] = p;
                pairs[j] = q;
                *count.entry(key(p.0, p.1)).or_default() += 1;
                *count.entry(key(q.0, q.1)).or_default() += 1;
                break;
            }
        }
    }
}

/// Outcome details of a successful girth-raising run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SwapReport {
    pub steps: usize,
    pub girth: Girth,
}

/// Short cycles (length below the target) stored by their sorted edge keys,
/// bucketed by length so a shortest one can be picked uniformly.
struct ShortCycles {
    buckets: Vec<Vec<Vec<Key>>>,
    index: HashMap<Vec<Key>, usize>,
}

impl ShortCycles {
    fn new(limit: usize) -> Self {
        ShortCycles { buckets: vec![Vec::new(); limit + 1], index: HashMap::new() }
    }

    fn len(&self) -> usize {
        self.index.len()
    }

    fn insert(&mut self, c: Vec<Key>) {
        if self.index.contains_key(&c) {
            return;
        }
        let b = &mut self.buckets[c.len()];
        self.index.insert(c.clone(), b.len());
        b.push(c);
    }

    fn remove(&mut self, c: &[Key]) {
        if let Some(pos) = self.index.remove(c) {
            let b = &mut self.buckets[c.len()];
            b.swap_remove(pos);
            if pos < b.len() {
                let moved = b[pos].clone();
                self.index.insert(moved, pos);
            }
        }
    }

    fn shortest_len(&self) -> Option<usize> {
        self.buckets.iter().position(|b| !b.is_empty())
    }
}

struct SwapGraph {
    adj: Vec<Vec<usize>>,
    edges: Vec<Key>,
    pos: HashMap<Key, usize>,
}

impl SwapGraph {
    fn has(&self, a: usize, b: usize) -> bool {
        self.adj[a].contains(&b)
    }

    fn replace(&mut self, old: Key, new: Key) {
        let i = self.pos.remove(&old).unwrap();
        self.edges[i] = new;
        self.pos.insert(new, i);
        let (a, b) = old;
        self.adj[a].retain(|&x| x != b);
        self.adj[b].retain(|&x| x != a);
        self.adj[new.0].push(new.1);
        self.adj[new.1].push(new.0);
    }

    /// All cycles of length at most `max_len` through edge `(a, b)`.
    fn cycles_through(&self, (a, b): Key, max_len: usize) -> Vec<Vec<Key>> {
        let mut out = Vec::new();
        let mut path = vec![b];
        self.extend(a, max_len, &mut path, &mut out);
        out
    }

    fn extend(&self, target: usize, max_len: usize, path: &mut Vec<usize>, out: &mut Vec<Vec<Key>>) {
        let x = *path.last().unwrap();
        // path has path.len()-1 edges; closing needs one more plus the start edge
        for &y in &self.adj[x] {
            if y == target {
                if path.len() >= 2 {
                    let mut c: Vec<Key> = path.windows(2).map(|w| key(w[0], w[1])).collect();
                    c.push(key(x, target));
                    c.push(key(path[0], target));
                    c.sort_unstable();
                    out.push(c);
                }
                continue;
            }
            if path.len() + 1 > max_len - 1 || path.contains(&y) {
                continue;
            }
            path.push(y);
            self.extend(target, max_len, path, out);
            path.pop();
        }
    }
}

fn union_cycles(groups: Vec<Vec<Vec<Key>>>) -> Vec<Vec<Key>> {
    let mut seen = HashSet::new();
    groups.into_iter().flatten().filter(|c| seen.insert(c.clone())).collect()
}

/// Random `d`-regular graph with girth at least `g_min`, reached from a random
/// regular graph by double-edge swaps that remove short cycles.
///
/// A swap replaces an edge on a shortest short cycle and a uniformly random
/// edge by a cross pair; it is kept when the number of short cycles through
/// the touched edges does not grow.
pub fn generate_high_girth_regular(
    n: usize,
    d: usize,
    g_min: usize,
    seed: u64,
    max_steps: usize,
) -> Result<(Graph, SwapReport), GraphError> {
    if g_min < 3 {
        return Err(GraphError::InvalidParameters(format!("g_min must be at least 3, got {g_min}")));
    }
    let start = generate_random_regular(n, d, seed)?;
    let limit = g_min - 1;
    let mut sg = SwapGraph {
        adj: (0..n).map(|v| start.neighbours(v).collect()).collect(),
        edges: start.edges().to_vec(),
        pos: start.edges().iter().enumerate().map(|(i, &e)| (e, i)).collect(),
    };
    let mut short = ShortCycles::new(limit);
    if limit >= 3 {
        for &e in &sg.edges {
            for c in sg.cycles_through(e, limit) {
                short.insert(c);
            }
        }
    }
    let mut rng = rng::stream(seed, Domain::Generate, &[1]);
    let mut best = short.shortest_len();
    let mut steps = 0;
    while short.len() > 0 {
        if steps >= max_steps {
            let best = best.map_or(Girth::Unbounded, Girth::Finite);
            return Err(GraphError::GirthTargetMissed { target: g_min, best, steps });
        }
        steps += 1;
        let len = short.shortest_len().unwrap();
        let bucket = &short.buckets[len];
        let cyc = &bucket[rng.gen_range(0..bucket.len())];
        let e = cyc[rng.gen_range(0..cyc.len())];
        let f = sg.edges[rng.gen_range(0..sg.edges.len())];
        let (a, b) = e;
        let (mut c, mut dd) = f;
        if rng.gen::<bool>() {
            std::mem::swap(&mut c, &mut dd);
        }
        if [a, b].contains(&c) || [a, b].contains(&dd) || sg.has(a, c) || sg.has(b, dd) {
            continue;
        }
        let before = union_cycles(vec![sg.cycles_through(e, limit), sg.cycles_through(f, limit)]);
        let (e2, f2) = (key(a, c), key(b, dd));
        sg.replace(e, e2);
        sg.replace(f, f2);
        let after = union_cycles(vec![sg.cycles_through(e2, limit), sg.cycles_through(f2, limit)]);
        if after.len() <= before.len() {
            for c in &before {
                short.remove(c);
            }
            for c in after {
                short.insert(c);
            }
            let now = short.shortest_len();
            if now.map_or(usize::MAX, |x| x) > best.map_or(usize::MAX, |x| x) {
                best = now;
            }
        } else {
            sg.replace(e2, e);
            sg.replace(f2, f);
        }
    }
    let g = Graph::new(n, sg.edges)?;
    let gi = girth(&g);
    debug_assert!(gi.at_least(g_min));
    Ok((g, SwapReport { steps, girth: gi }))
}

pub fn next_prime(x: usize) -> usize {
    let is_prime = |p: usize| p >= 2 && (2..).take_while(|q| q * q <= p).all(|q| !p.is_multiple_of(q));
    (x.max(2)..).find(|&p| is_prime(p)).unwrap()
}

/// Bipartite `d`-regular graph of girth at least six on `2·d·m` vertices.
///
/// With `q` the smallest prime `>= d`, left vertex `(a, b)` is joined to right
/// vertex `(x, y)` iff `y ≡ (a·x mod q) − b (mod m)`, for `a, x < d` and
/// `b, y ∈ Z_m`. `m >= 2q − 1` rules out four-cycles. Labels are shuffled by
/// `seed`.
pub fn bipartite_girth_six(d: usize, m: usize, seed: u64) -> Result<Graph, GraphError> {
    if d == 0 {
        return Err(GraphError::InvalidParameters("degree must be positive".into()));
    }
    let q = next_prime(d);
    if m < 2 * q - 1 {
        return Err(GraphError::InvalidParameters(format!(
            "m = {m} must be at least 2q-1 = {} for degree {d}",
            2 * q - 1
        )));
    }
    let half = d * m;
    let mut perm: Vec<usize> = (0..2 * half).collect();
    perm.shuffle(&mut rng::stream(seed, Domain::Generate, &[2]));
    let mut edges = Vec::with_capacity(half * d);
    for a in 0..d {
        for b in 0..m {
            for x in 0..d {
                let y = ((a * x % q) as i64 - b as i64).rem_euclid(m as i64) as usize;
                let (u, v) = (perm[a * m + b], perm[half + x * m + y]);
                edges.push(key(u, v));
            }
        }
    }
    edges.sort_unstable();
    Graph::new(2 * half, edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_regular_basics() {
        let g = generate_random_regular(10, 3, 1).unwrap();
        assert!((0..10).all(|v| g.degree(v) == 3));
        assert!(matches!(generate_random_regular(5, 3, 0), Err(GraphError::OddDegreeSum { .. })));
        assert!(matches!(generate_random_regular(4, 4, 0), Err(GraphError::DegreeTooLarge { .. })));
        assert_eq!(generate_random_regular(6, 0, 0).unwrap().m(), 0);
        assert_eq!(generate_random_regular(30, 4, 9).unwrap(), generate_random_regular(30, 4, 9).unwrap());
    }

    #[test]
    fn dense_regular_needs_repair_and_stays_simple() {
        let g = generate_random_regular(500, 10, 7).unwrap();
        assert!((0..500).all(|v| g.degree(v) == 10));
        let g = generate_random_regular(500, 100, 3).unwrap();
        assert!((0..500).all(|v| g.degree(v) == 100));
        let g = generate_random_regular(6, 5, 3).unwrap();
        assert_eq!(g.m(), 15);
    }

    #[test]
    fn high_girth_small_cubic() {
        let (g, rep) = generate_high_girth_regular(14, 3, 6, 3, 200_000).unwrap();
        assert!(girth(&g).at_least(6));
        assert_eq!(rep.girth, girth(&g));
        assert!((0..14).all(|v| g.degree(v) == 3));
    }

    #[test]
    fn k4_cannot_reach_girth_four() {
        match generate_high_girth_regular(4, 3, 4, 0, 1000) {
            Err(GraphError::GirthTargetMissed { best, .. }) => assert_eq!(best, Girth::Finite(3)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn algebraic_girth_six() {
        assert_eq!(next_prime(20), 23);
        assert_eq!(next_prime(1), 2);
        for (d, m) in [(1, 3), (3, 5), (4, 9), (20, 50)] {
            let g = bipartite_girth_six(d, m, 1).unwrap();
            assert_eq!(g.n(), 2 * d * m);
            assert!((0..g.n()).all(|v| g.degree(v) == d));
            assert!(g.bipartition().is_some());
            assert!(girth(&g).at_least(6), "d={d} m={m}");
        }
        assert!(bipartite_girth_six(5, 8, 0).is_err());
    }
}
