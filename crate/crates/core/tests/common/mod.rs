//! Brute-force oracles shared by the integration tests. None of them call
//! into the structures they check beyond reading inputs.

#![allow(dead_code)]

use std::collections::{BTreeSet, VecDeque};

use gst_core::{SearchTree, Topology, VertexId};
use rand::Rng;

pub fn vid(v: usize) -> VertexId {
    VertexId(v as u32)
}

/// Uniform attachment: vertex `i` joins a uniform earlier vertex.
pub fn random_tree<R: Rng>(n: usize, rng: &mut R) -> Topology {
    let edges: Vec<(u32, u32)> = (1..n).map(|i| (rng.gen_range(0..i) as u32, i as u32)).collect();
    Topology::from_edges(n, &edges).unwrap()
}

pub fn path_graph(n: usize) -> Topology {
    let edges: Vec<(u32, u32)> = (1..n as u32).map(|i| (i - 1, i)).collect();
    Topology::from_edges(n, &edges).unwrap()
}

/// Every labelled tree on `n` vertices, from Prüfer sequences.
pub fn labelled_trees(n: usize) -> Vec<Topology> {
    if n == 1 {
        return vec![Topology::from_edges(1, &[]).unwrap()];
    }
    if n == 2 {
        return vec![Topology::from_edges(2, &[(0, 1)]).unwrap()];
    }
    let len = n - 2;
    let mut out = Vec::new();
    for code in 0..n.pow(len as u32) {
        let seq: Vec<usize> = (0..len).map(|i| code / n.pow(i as u32) % n).collect();
        let mut degree = vec![1usize; n];
        for &s in &seq {
            degree[s] += 1;
        }
        let mut edges = Vec::new();
        for &s in &seq {
            let leaf = (0..n).find(|&v| degree[v] == 1).unwrap();
            edges.push((leaf as u32, s as u32));
            degree[leaf] -= 1;
            degree[s] -= 1;
        }
        let rest: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
        edges.push((rest[0] as u32, rest[1] as u32));
        out.push(Topology::from_edges(n, &edges).unwrap());
    }
    out
}

/// Connected components of `G` restricted to `set`, each sorted.
pub fn components(g: &Topology, set: &BTreeSet<VertexId>) -> BTreeSet<Vec<VertexId>> {
    let mut seen = BTreeSet::new();
    let mut out = BTreeSet::new();
    for &s in set {
        if !seen.insert(s) {
            continue;
        }
        let mut comp = vec![s];
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            for &y in g.neighbors(x) {
                if set.contains(&y) && seen.insert(y) {
                    comp.push(y);
                    queue.push_back(y);
                }
            }
        }
        comp.sort();
        out.insert(comp);
    }
    out
}

pub fn subtree(t: &SearchTree, v: VertexId) -> BTreeSet<VertexId> {
    let mut out = BTreeSet::from([v]);
    let mut stack = vec![v];
    while let Some(x) = stack.pop() {
        for &c in t.children(x) {
            out.insert(c);
            stack.push(c);
        }
    }
    out
}

/// The recursive definition, checked literally at every node.
pub fn valid_by_definition(g: &Topology, t: &SearchTree) -> bool {
    if t.n() != g.n() {
        return false;
    }
    g.vertices().all(|v| {
        let mut below = subtree(t, v);
        below.remove(&v);
        let want = components(g, &below);
        let got: BTreeSet<Vec<VertexId>> = t
            .children(v)
            .iter()
            .map(|&c| subtree(t, c).into_iter().collect())
            .collect();
        want == got
    })
}

/// Minimal connected superset of a nonempty `s`: delete leaves outside `s`
/// until none remain.
pub fn hull_by_pruning(g: &Topology, s: &[VertexId]) -> BTreeSet<VertexId> {
    let n = g.n();
    let mut keep = vec![false; n];
    for &x in s {
        keep[x.index()] = true;
    }
    let mut alive = vec![true; n];
    let mut degree: Vec<usize> = g.vertices().map(|x| g.degree(x)).collect();
    let mut queue: VecDeque<VertexId> = g.vertices().filter(|x| degree[x.index()] <= 1 && !keep[x.index()]).collect();
    while let Some(x) = queue.pop_front() {
        if !alive[x.index()] {
            continue;
        }
        alive[x.index()] = false;
        for &y in g.neighbors(x) {
            if alive[y.index()] {
                degree[y.index()] -= 1;
                if degree[y.index()] <= 1 && !keep[y.index()] {
                    queue.push_back(y);
                }
            }
        }
    }
    g.vertices().filter(|x| alive[x.index()]).collect()
}

/// Every hull vertex outside `s` has exactly two hull neighbours.
pub fn steiner_closed_by_pruning(g: &Topology, s: &[VertexId]) -> bool {
    let hull = hull_by_pruning(g, s);
    hull.iter()
        .filter(|v| !s.contains(v))
        .all(|&v| g.neighbors(v).iter().filter(|w| hull.contains(w)).count() == 2)
}

/// Edges of `G(S)`: pairs of `S` whose connecting path has no interior vertex in `S`.
pub fn minor_edges_oracle(g: &Topology, s: &[VertexId]) -> BTreeSet<(VertexId, VertexId)> {
    let mut out = BTreeSet::new();
    for (i, &a) in s.iter().enumerate() {
        for &b in &s[i + 1..] {
            let path = bfs_path(g, a, b);
            if path[1..path.len() - 1].iter().all(|x| !s.contains(x)) {
                out.insert((a.min(b), a.max(b)));
            }
        }
    }
    out
}

pub fn bfs_path(g: &Topology, a: VertexId, b: VertexId) -> Vec<VertexId> {
    let mut prev = vec![None; g.n()];
    let mut queue = VecDeque::from([a]);
    prev[a.index()] = Some(a);
    while let Some(x) = queue.pop_front() {
        for &y in g.neighbors(x) {
            if prev[y.index()].is_none() {
                prev[y.index()] = Some(x);
                queue.push_back(y);
            }
        }
    }
    let mut path = vec![b];
    let mut x = b;
    while x != a {
        x = prev[x.index()].unwrap();
        path.push(x);
    }
    path.reverse();
    path
}

/// Preferred children by replaying the definition over the whole history.
pub fn preferred_oracle(p: &SearchTree, history: &[VertexId]) -> Vec<Option<VertexId>> {
    let n = p.n();
    (0..n)
        .map(|y| {
            let y = vid(y);
            let under = subtree(p, y);
            let last = history.iter().rev().find(|x| under.contains(x))?;
            if *last == y {
                return p.children(y).iter().min().copied();
            }
            p.children(y).iter().copied().find(|&c| subtree(p, c).contains(last))
        })
        .collect()
}

/// Interleave count by the definition: changes between two defined values.
pub fn interleave_oracle(p: &SearchTree, x: &[VertexId]) -> u64 {
    let mut total = 0;
    for i in 1..=x.len() {
        let before = preferred_oracle(p, &x[..i - 1]);
        let after = preferred_oracle(p, &x[..i]);
        total += before
            .iter()
            .zip(&after)
            .filter(|(b, a)| b.is_some() && a.is_some() && b != a)
            .count() as u64;
    }
    total
}

/// A classical binary search tree over keys `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bst {
    pub root: usize,
    pub left: Vec<Option<usize>>,
    pub right: Vec<Option<usize>>,
    pub parent: Vec<Option<usize>>,
}

impl Bst {
    /// Reads a search tree on a path graph as a BST (smaller keys go left).
    pub fn from_search_tree(t: &SearchTree) -> Option<Bst> {
        let n = t.n();
        let mut b = Bst {
            root: t.root().index(),
            left: vec![None; n],
            right: vec![None; n],
            parent: vec![None; n],
        };
        for v in 0..n {
            for &c in t.children(vid(v)) {
                let slot = if c.index() < v { &mut b.left[v] } else { &mut b.right[v] };
                if slot.replace(c.index()).is_some() {
                    return None;
                }
                b.parent[c.index()] = Some(v);
            }
        }
        Some(b)
    }

    pub fn in_order(&self) -> Vec<usize> {
        fn walk(b: &Bst, x: Option<usize>, out: &mut Vec<usize>) {
            if let Some(x) = x {
                walk(b, b.left[x], out);
                out.push(x);
                walk(b, b.right[x], out);
            }
        }
        let mut out = Vec::new();
        walk(self, Some(self.root), &mut out);
        out
    }

    /// Textbook single rotation lifting `x` above its parent.
    pub fn rotate_up(&mut self, x: usize) {
        let p = self.parent[x].expect("x is not the root");
        let g = self.parent[p];
        if self.left[p] == Some(x) {
            let b = self.right[x];
            self.left[p] = b;
            if let Some(b) = b {
                self.parent[b] = Some(p);
            }
            self.right[x] = Some(p);
        } else {
            let b = self.left[x];
            self.right[p] = b;
            if let Some(b) = b {
                self.parent[b] = Some(p);
            }
            self.left[x] = Some(p);
        }
        self.parent[p] = Some(x);
        self.parent[x] = g;
        match g {
            None => self.root = x,
            Some(g) => {
                if self.left[g] == Some(p) {
                    self.left[g] = Some(x);
                } else {
                    self.right[g] = Some(x);
                }
            }
        }
    }
}

pub fn catalan(n: usize) -> u128 {
    let mut c = 1u128;
    for i in 0..n as u128 {
        c = c * 2 * (2 * i + 1) / (i + 2);
    }
    c
}
