//! The fixed underlying tree `G` and the geometric queries the rest of the
//! crate needs on it: paths, hulls, lowest common ancestors and the
//! "which way is the target" oracle.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::ParseError;

/// Dense identifier of a vertex of `G`, in `[0, n)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub u32);

impl VertexId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<u32> for VertexId {
    fn from(v: u32) -> Self {
        VertexId(v)
    }
}

impl From<usize> for VertexId {
    fn from(v: usize) -> Self {
        VertexId(v as u32)
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub(crate) const NONE: u32 = u32::MAX;

/// An unrooted tree on `n` vertices.
///
/// Construction validates the input and precomputes a rooting at vertex 0
/// (DFS intervals plus a sparse table) so that `lca`, `direction` and
/// `distance` are O(1) or O(log deg).
#[derive(Clone, Debug)]
pub struct Topology {
    adj: Vec<Vec<VertexId>>,
    parent: Vec<u32>,
    depth: Vec<u32>,
    tin: Vec<u32>,
    tout: Vec<u32>,
    /// Children in DFS (= `tin`) order.
    down: Vec<Vec<u32>>,
    /// `sparse[k][i]` = vertex of minimum depth in `order[i .. i + 2^k]`.
    sparse: Vec<Vec<u32>>,
}

impl Topology {
    /// Builds a topology from an explicit edge list.
    pub fn from_edges(n: usize, edges: &[(u32, u32)]) -> Result<Self, ParseError> {
        if n == 0 {
            return Err(ParseError::Empty);
        }
        let mut adj: Vec<Vec<VertexId>> = vec![Vec::new(); n];
        let mut dsu = Dsu::new(n);
        for (i, &(u, v)) in edges.iter().enumerate() {
            let line = i + 2;
            for w in [u, v] {
                if w as usize >= n {
                    return Err(ParseError::VertexOutOfRange { line, vertex: w, n });
                }
            }
            if u == v {
                return Err(ParseError::SelfLoop { line, vertex: u });
            }
            if adj[u as usize].contains(&VertexId(v)) {
                return Err(ParseError::DuplicateEdge { line, u, v });
            }
            if !dsu.union(u as usize, v as usize) {
                return Err(ParseError::Cycle { line, u, v });
            }
            adj[u as usize].push(VertexId(v));
            adj[v as usize].push(VertexId(u));
        }
        if edges.len() + 1 < n {
            return Err(ParseError::Disconnected {
                edges: edges.len(),
                n,
            });
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(Self::index(adj))
    }

    /// Parses the edge-list document: a line `n`, then `n - 1` lines `u v`.
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (_, header) = lines.next().ok_or(ParseError::Empty)?;
        let n: usize = header.parse().map_err(|_| ParseError::BadLine {
            line: 1,
            content: header.to_string(),
        })?;
        let mut edges = Vec::with_capacity(n.saturating_sub(1));
        for (line, l) in lines {
            let mut it = l.split_whitespace();
            let parsed = match (it.next(), it.next(), it.next()) {
                (Some(a), Some(b), None) => a.parse::<u32>().ok().zip(b.parse::<u32>().ok()),
                _ => None,
            };
            let (u, v) = parsed.ok_or_else(|| ParseError::BadLine {
                line,
                content: l.to_string(),
            })?;
            edges.push((u, v));
        }
        Self::from_edges(n, &edges)
    }

    /// Serializes back to the edge-list document (edges as `parent child`
    /// pairs of the internal rooting, in vertex order).
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("{}\n", self.n());
        for (u, v) in self.edges() {
            out.push_str(&format!("{} {}\n", u, v));
        }
        out
    }

    fn index(adj: Vec<Vec<VertexId>>) -> Self {
        let n = adj.len();
        let mut parent = vec![NONE; n];
        let mut depth = vec![0u32; n];
        let mut tin = vec![0u32; n];
        let mut tout = vec![0u32; n];
        let mut order = Vec::with_capacity(n);
        let mut down = vec![Vec::new(); n];
        // Iterative DFS from vertex 0; `next[v]` is the adjacency cursor.
        let mut next = vec![0usize; n];
        let mut stack = vec![0u32];
        tin[0] = 0;
        order.push(0);
        while let Some(&v) = stack.last() {
            let vi = v as usize;
            if next[vi] < adj[vi].len() {
                let w = adj[vi][next[vi]].0;
                next[vi] += 1;
                if w == parent[vi] {
                    continue;
                }
                parent[w as usize] = v;
                depth[w as usize] = depth[vi] + 1;
                tin[w as usize] = order.len() as u32;
                order.push(w);
                down[vi].push(w);
                stack.push(w);
            } else {
                tout[vi] = order.len() as u32;
                stack.pop();
            }
        }
        let mut sparse = vec![order];
        let mut width = 1;
        while 2 * width <= n {
            let prev = sparse.last().unwrap();
            let row: Vec<u32> = (0..=n - 2 * width)
                .map(|i| {
                    let (a, b) = (prev[i], prev[i + width]);
                    if depth[a as usize] <= depth[b as usize] {
                        a
                    } else {
                        b
                    }
                })
                .collect();
            sparse.push(row);
            width *= 2;
        }
        Topology {
            adj,
            parent,
            depth,
            tin,
            tout,
            down,
            sparse,
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        (0..self.n() as u32).map(VertexId)
    }

    /// Sorted neighbors of `v`.
    #[inline]
    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.adj[v.index()]
    }

    #[inline]
    pub fn degree(&self, v: VertexId) -> usize {
        self.adj[v.index()].len()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        v.index() < self.n()
    }

    pub fn are_adjacent(&self, u: VertexId, v: VertexId) -> bool {
        self.adj[u.index()].binary_search(&v).is_ok()
    }

    /// The `n - 1` undirected edges, each reported once as `(u, v)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.vertices().flat_map(move |u| {
            self.adj[u.index()]
                .iter()
                .filter(move |&&v| u < v)
                .map(move |&v| (u, v))
        })
    }

    #[inline]
    pub(crate) fn tin(&self, v: VertexId) -> u32 {
        self.tin[v.index()]
    }

    /// Whether `a` is an ancestor of (or equal to) `b` in the rooting at 0.
    #[inline]
    pub(crate) fn rooted_ancestor(&self, a: u32, b: u32) -> bool {
        let (a, b) = (a as usize, b as usize);
        self.tin[a] <= self.tin[b] && self.tin[b] < self.tout[a]
    }

    /// Lowest common ancestor in the rooting at vertex 0.
    pub fn lca(&self, u: VertexId, v: VertexId) -> VertexId {
        if u == v {
            return u;
        }
        let (mut a, mut b) = (self.tin[u.index()] as usize, self.tin[v.index()] as usize);
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        // Minimum-depth vertex on order[a+1 ..= b]; its parent is the LCA.
        let (lo, hi) = (a + 1, b + 1);
        let k = (usize::BITS - 1 - (hi - lo).leading_zeros()) as usize;
        let x = self.sparse[k][lo];
        let y = self.sparse[k][hi - (1 << k)];
        let m = if self.depth[x as usize] <= self.depth[y as usize] {
            x
        } else {
            y
        };
        VertexId(self.parent[m as usize])
    }

    /// Number of edges on the path between `u` and `v`.
    pub fn distance(&self, u: VertexId, v: VertexId) -> u32 {
        let w = self.lca(u, v);
        self.depth[u.index()] + self.depth[v.index()] - 2 * self.depth[w.index()]
    }

    /// The vertex where the three pairwise paths between `a`, `b`, `c` meet.
    pub fn median(&self, a: VertexId, b: VertexId, c: VertexId) -> VertexId {
        let x = self.lca(a, b);
        let y = self.lca(b, c);
        let z = self.lca(a, c);
        let mut best = x;
        for w in [y, z] {
            if self.depth[w.index()] > self.depth[best.index()] {
                best = w;
            }
        }
        best
    }

    /// The unique simple path from `u` to `v`, both inclusive.
    pub fn path_between(&self, u: VertexId, v: VertexId) -> Vec<VertexId> {
        let w = self.lca(u, v);
        let mut head = Vec::new();
        let mut x = u;
        while x != w {
            head.push(x);
            x = VertexId(self.parent[x.index()]);
        }
        head.push(w);
        let mut tail = Vec::new();
        let mut y = v;
        while y != w {
            tail.push(y);
            y = VertexId(self.parent[y.index()]);
        }
        head.extend(tail.into_iter().rev());
        head
    }

    /// The neighbor of `x` on the path towards `t`. Requires `x != t`.
    ///
    /// Equivalently: the component of `G \ x` that contains `t` is the one
    /// holding the returned vertex.
    pub fn direction(&self, x: VertexId, t: VertexId) -> Result<VertexId, crate::GstError> {
        if x == t {
            return Err(crate::GstError::SameVertex(x));
        }
        Ok(self.step_towards(x, t))
    }

    /// Unchecked form of [`direction`](Self::direction).
    #[inline]
    pub(crate) fn step_towards(&self, x: VertexId, t: VertexId) -> VertexId {
        debug_assert_ne!(x, t);
        let xi = x.index();
        if self.rooted_ancestor(x.0, t.0) {
            let kids = &self.down[xi];
            let target = self.tin[t.index()];
            let pos = kids.partition_point(|&c| self.tin[c as usize] <= target);
            VertexId(kids[pos - 1])
        } else {
            VertexId(self.parent[xi])
        }
    }

    /// Vertices of the minimal connected subgraph containing `s`, sorted.
    pub fn convex_hull(&self, s: &[VertexId]) -> Result<Vec<VertexId>, crate::GstError> {
        let Some(&first) = s.first() else {
            return Err(crate::GstError::EmptySet);
        };
        let mut mark = vec![false; self.n()];
        mark[first.index()] = true;
        let mut hull = vec![first];
        // CH(S) is the union of the paths from one fixed member to all others.
        for &v in &s[1..] {
            let w = self.lca(first, v);
            for start in [first, v] {
                let mut x = start;
                loop {
                    if !mark[x.index()] {
                        mark[x.index()] = true;
                        hull.push(x);
                    }
                    if x == w {
                        break;
                    }
                    x = VertexId(self.parent[x.index()]);
                }
            }
        }
        hull.sort_unstable();
        Ok(hull)
    }

    /// Closest vertex of `CH(set)` to `v`; `v` itself when it lies in the hull.
    pub fn project_onto_hull(&self, v: VertexId, set: &[VertexId]) -> VertexId {
        let anchor = set[0];
        let mut best = anchor;
        let mut best_dist = self.distance(v, anchor);
        for &a in &set[1..] {
            let m = self.median(v, anchor, a);
            let d = self.distance(v, m);
            if d < best_dist {
                best = m;
                best_dist = d;
            }
        }
        best
    }
}

/// Plain union-find with path halving.
pub(crate) struct Dsu {
    parent: Vec<u32>,
}

impl Dsu {
    pub(crate) fn new(n: usize) -> Self {
        Dsu {
            parent: (0..n as u32).collect(),
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] as usize != x {
            let p = self.parent[x] as usize;
            self.parent[x] = self.parent[p];
            x = self.parent[x] as usize;
        }
        x
    }

    /// Returns false when `a` and `b` were already connected.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb as u32;
        true
    }
}
