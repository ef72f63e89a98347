//! Brute-force reference answers for small graphs, on plain edge lists.
//!
//! Nothing here depends on `aec-core`; the integration tests and the
//! acceptance suite compare the core algorithms against these.

use std::collections::BTreeSet;

pub type Edges = Vec<(usize, usize)>;

/// Bit of the pair `i < j` in an adjacency mask (colex order, so a vertex
/// added last only touches the highest bits).
fn pair_bit(i: usize, j: usize) -> usize {
    debug_assert!(i < j);
    j * (j - 1) / 2 + i
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                prefix.push(v);
                go(prefix, used, out);
                prefix.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; k], &mut out);
    out
}

fn mask_edges(k: usize, mask: u32) -> Edges {
    let mut edges = Vec::new();
    for j in 1..k {
        for i in 0..j {
            if mask >> pair_bit(i, j) & 1 == 1 {
                edges.push((i, j));
            }
        }
    }
    edges
}

/// One representative of every isomorphism class of graphs on `n <= 7`
/// vertices, found by adding a vertex to every class on `n - 1` vertices in
/// every possible way and keeping the lexicographically least relabelling.
pub fn graphs_on(n: usize) -> Vec<Edges> {
    assert!(n <= 7, "mask enumeration is limited to 7 vertices");
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut classes: BTreeSet<u32> = BTreeSet::from([0]);
    for k in 2..=n {
        let pairs = k * (k - 1) / 2;
        let maps: Vec<Vec<usize>> = permutations(k)
            .into_iter()
            .map(|p| {
                let mut map = vec![0; pairs];
                for j in 1..k {
                    for i in 0..j {
                        let (a, b) = (p[i].min(p[j]), p[i].max(p[j]));
                        map[pair_bit(i, j)] = pair_bit(a, b);
                    }
                }
                map
            })
            .collect();
        let mut next = BTreeSet::new();
        for &base in &classes {
            for nbrs in 0u32..1 << (k - 1) {
                let mask = base | nbrs << pair_bit(0, k - 1);
                let canon = maps
                    .iter()
                    .map(|map| {
                        let mut out = 0u32;
                        let mut rest = mask;
                        while rest != 0 {
                            let b = rest.trailing_zeros() as usize;
                            out |= 1 << map[b];
                            rest &= rest - 1;
                        }
                        out
                    })
                    .min()
                    .unwrap();
                next.insert(canon);
            }
        }
        classes = next;
    }
    classes.into_iter().map(|m| mask_edges(n, m)).collect()
}

pub fn is_connected(n: usize, edges: &[(usize, usize)]) -> bool {
    if n == 0 {
        return true;
    }
    let mut comp: Vec<usize> = (0..n).collect();
    fn root(comp: &mut [usize], mut x: usize) -> usize {
        while comp[x] != x {
            comp[x] = comp[comp[x]];
            x = comp[x];
        }
        x
    }
    for &(u, v) in edges {
        let (a, b) = (root(&mut comp, u), root(&mut comp, v));
        comp[a] = b;
    }
    let r = root(&mut comp, 0);
    (0..n).all(|v| root(&mut comp, v) == r)
}

/// Isomorphism classes of connected graphs with `1..=max_n` vertices.
pub fn connected_graphs_up_to(max_n: usize) -> Vec<(usize, Edges)> {
    (1..=max_n)
        .flat_map(|n| graphs_on(n).into_iter().filter(move |e| is_connected(n, e)).map(move |e| (n, e)))
        .collect()
}

fn edge_matrix(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<Option<usize>>> {
    let mut id = vec![vec![None; n]; n];
    for (e, &(u, v)) in edges.iter().enumerate() {
        id[u][v] = Some(e);
        id[v][u] = Some(e);
    }
    id
}

/// Every cycle of the graph as a sorted list of edge indices, sorted.
///
/// Each cycle is listed once from its smallest vertex `s`, as a simple path
/// through larger vertices that returns to `s`, with the reflection removed
/// by requiring the second vertex to be smaller than the last.
pub fn all_cycles(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let id = edge_matrix(n, edges);
    let mut out = Vec::new();
    let mut path = Vec::new();
    let mut on = vec![false; n];
    fn extend(id: &[Vec<Option<usize>>], path: &mut Vec<usize>, on: &mut [bool], out: &mut Vec<Vec<usize>>) {
        let s = path[0];
        let last = *path.last().unwrap();
        for w in 0..id.len() {
            if id[last][w].is_none() {
                continue;
            }
            if w == s && path.len() >= 3 && path[1] < last {
                let mut cyc: Vec<usize> = path.windows(2).map(|p| id[p[0]][p[1]].unwrap()).collect();
                cyc.push(id[last][s].unwrap());
                cyc.sort_unstable();
                out.push(cyc);
            } else if w > s && !on[w] {
                on[w] = true;
                path.push(w);
                extend(id, path, on, out);
                path.pop();
                on[w] = false;
            }
        }
    }
    for s in 0..n {
        path.push(s);
        on[s] = true;
        extend(&id, &mut path, &mut on, &mut out);
        on[s] = false;
        path.pop();
    }
    out.sort();
    out
}

pub fn girth(n: usize, edges: &[(usize, usize)]) -> Option<usize> {
    all_cycles(n, edges).iter().map(Vec::len).min()
}

/// No two edges sharing an endpoint carry the same colour.
pub fn is_proper(edges: &[(usize, usize)], colours: &[Option<u32>]) -> bool {
    for e in 0..edges.len() {
        for f in e + 1..edges.len() {
            let (a, b) = edges[e];
            let (c, d) = edges[f];
            let touch = a == c || a == d || b == c || b == d;
            if touch && colours[e].is_some() && colours[e] == colours[f] {
                return false;
            }
        }
    }
    true
}

/// The cycles (from [`all_cycles`]) whose edges are all coloured and use
/// exactly two colours.
pub fn bicoloured_cycles(cycles: &[Vec<usize>], colours: &[Option<u32>]) -> Vec<Vec<usize>> {
    cycles
        .iter()
        .filter(|cyc| {
            let mut seen: [Option<u32>; 2] = [None, None];
            for &e in cyc.iter() {
                let Some(c) = colours[e] else { return false };
                if seen[0].is_none_or(|x| x == c) {
                    seen[0] = Some(c);
                } else if seen[1].is_none_or(|x| x == c) {
                    seen[1] = Some(c);
                } else {
                    return false;
                }
            }
            seen[1].is_some()
        })
        .cloned()
        .collect()
}

/// Smallest `k <= max_k` such that some total colouring with colours
/// `0..k` is proper and has no bicoloured cycle, trying all `k^m`
/// assignments.
pub fn acyclic_index(n: usize, edges: &[(usize, usize)], max_k: u32) -> Option<u32> {
    let m = edges.len();
    if m == 0 {
        return Some(0);
    }
    let cycles = all_cycles(n, edges);
    for k in 1..=max_k {
        let mut digits = vec![0u32; m];
        loop {
            let colours: Vec<Option<u32>> = digits.iter().map(|&d| Some(d)).collect();
            if is_proper(edges, &colours) && bicoloured_cycles(&cycles, &colours).is_empty() {
                return Some(k);
            }
            let mut i = 0;
            while i < m && digits[i] + 1 == k {
                digits[i] = 0;
                i += 1;
            }
            if i == m {
                break;
            }
            digits[i] += 1;
        }
    }
    None
}

/// Colours of a pair `{c, d}` an edge may take.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Label {
    C,
    D,
    Both,
    Neither,
}

pub const LABELS: [Label; 4] = [Label::C, Label::D, Label::Both, Label::Neither];

fn fits(label: Label, want_c: bool) -> bool {
    match label {
        Label::Both => true,
        Label::C => want_c,
        Label::D => !want_c,
        Label::Neither => false,
    }
}

/// Fewest arcs in a partition of the cyclic sequence into alternating arcs,
/// trying every set of cut positions in order of size.
pub struct PartitionSearch {
    len: usize,
    cut_sets: Vec<u32>,
}

impl PartitionSearch {
    pub fn new(len: usize) -> Self {
        assert!((1..32).contains(&len));
        let mut cut_sets: Vec<u32> = (1u32..1 << len).collect();
        cut_sets.sort_by_key(|s| s.count_ones());
        PartitionSearch { len, cut_sets }
    }

    pub fn min_arcs(&self, labels: &[Label]) -> Option<usize> {
        let l = self.len;
        assert_eq!(labels.len(), l);
        // ok[start][len - 1]: the arc of `len` edges from `start` alternates
        let mut ok = vec![vec![false; l]; l];
        for (start, row) in ok.iter_mut().enumerate() {
            for (len1, cell) in row.iter_mut().enumerate() {
                *cell = [true, false]
                    .iter()
                    .any(|&first| (0..=len1).all(|t| fits(labels[(start + t) % l], first == (t % 2 == 0))));
            }
        }
        // an edge lying on no alternating arc rules out every partition
        if labels.contains(&Label::Neither) {
            return None;
        }
        let mut cuts = Vec::with_capacity(l);
        for &set in &self.cut_sets {
            cuts.clear();
            cuts.extend((0..l).filter(|&i| set >> i & 1 == 1));
            let valid = (0..cuts.len()).all(|j| {
                let start = cuts[j];
                let end = if j + 1 < cuts.len() { cuts[j + 1] } else { cuts[0] + l };
                ok[start][end - start - 1]
            });
            if valid {
                return Some(cuts.len());
            }
        }
        None
    }
}
