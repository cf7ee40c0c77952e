//! Rooted search trees on `G`, their validity check and the rotation primitive.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{GstError, ParseError};
use crate::topology::{Topology, VertexId, NONE};

/// A rooted tree on the vertex set of some [`Topology`].
///
/// Children lists are kept sorted by id. The type only guarantees that the
/// parent/children arrays describe a single rooted tree; search-tree validity
/// with respect to a particular `G` is checked by [`validate_search_tree`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SearchTree {
    root: VertexId,
    parent: Vec<u32>,
    children: Vec<Vec<VertexId>>,
}

/// Why a rooted tree fails to be a search tree on `G`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    /// The node whose child subtrees do not match the components of
    /// `G[subtree] \ node` (or the node where the structure breaks).
    pub node: VertexId,
    pub kind: ViolationKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ViolationKind {
    /// Parent/children arrays do not describe one rooted spanning tree.
    Structure(String),
    /// The edge `(u, w)` of `G` joins two different child subtrees of `node`.
    EdgeAcrossChildren { u: VertexId, w: VertexId },
    /// The subtree of `child` is not connected in `G`.
    DisconnectedChild { child: VertexId },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ViolationKind::Structure(msg) => write!(f, "at node {}: {}", self.node, msg),
            ViolationKind::EdgeAcrossChildren { u, w } => write!(
                f,
                "at node {}: edge {}-{} joins two different child subtrees",
                self.node, u, w
            ),
            ViolationKind::DisconnectedChild { child } => write!(
                f,
                "at node {}: subtree of child {} is not connected in G",
                self.node, child
            ),
        }
    }
}

impl std::error::Error for Violation {}

fn structure(node: VertexId, msg: impl Into<String>) -> Violation {
    Violation {
        node,
        kind: ViolationKind::Structure(msg.into()),
    }
}

impl SearchTree {
    /// Builds a tree from a parent array (`None` marks the root).
    pub fn from_parents(parents: &[Option<VertexId>]) -> Result<Self, Violation> {
        let n = parents.len();
        if n == 0 {
            return Err(structure(VertexId(0), "empty tree"));
        }
        let mut root = None;
        let mut parent = vec![NONE; n];
        let mut children = vec![Vec::new(); n];
        for (i, p) in parents.iter().enumerate() {
            let v = VertexId(i as u32);
            match p {
                None if root.is_some() => return Err(structure(v, "second root")),
                None => root = Some(v),
                Some(p) if p.index() >= n => {
                    return Err(structure(v, format!("parent {} out of range", p)))
                }
                Some(p) if *p == v => return Err(structure(v, "node is its own parent")),
                Some(p) => {
                    parent[i] = p.0;
                    children[p.index()].push(v);
                }
            }
        }
        let root = root.ok_or_else(|| structure(VertexId(0), "no root"))?;
        let t = SearchTree {
            root,
            parent,
            children,
        };
        let reached = t.preorder();
        if reached.len() != n {
            let mut seen = vec![false; n];
            for v in reached {
                seen[v.index()] = true;
            }
            let lost = VertexId(seen.iter().position(|s| !s).unwrap_or(0) as u32);
            return Err(structure(lost, "node not reachable from the root (cycle)"));
        }
        Ok(t)
    }

    /// Builds a tree from its root and a list of `(parent, child)` links.
    pub fn from_links(n: usize, root: VertexId, links: &[(VertexId, VertexId)]) -> Result<Self, Violation> {
        let mut parents = vec![None; n];
        for &(p, c) in links {
            if c.index() >= n {
                return Err(structure(c, "child out of range"));
            }
            if parents[c.index()].is_some() {
                return Err(structure(c, "node has two parents"));
            }
            parents[c.index()] = Some(p);
        }
        if parents[root.index()].is_some() {
            return Err(structure(root, "root has a parent"));
        }
        Self::from_parents(&parents)
    }

    pub fn n(&self) -> usize {
        self.parent.len()
    }

    pub fn root(&self) -> VertexId {
        self.root
    }

    #[inline]
    pub fn parent(&self, v: VertexId) -> Option<VertexId> {
        match self.parent[v.index()] {
            NONE => None,
            p => Some(VertexId(p)),
        }
    }

    #[inline]
    pub fn children(&self, v: VertexId) -> &[VertexId] {
        &self.children[v.index()]
    }

    pub fn parents(&self) -> Vec<Option<VertexId>> {
        (0..self.n() as u32).map(|v| self.parent(VertexId(v))).collect()
    }

    pub fn is_root(&self, v: VertexId) -> bool {
        v == self.root
    }

    /// Whether `a` is an ancestor of `b` (or `a == b`). O(depth).
    pub fn is_ancestor(&self, a: VertexId, b: VertexId) -> bool {
        let mut x = b;
        loop {
            if x == a {
                return true;
            }
            match self.parent(x) {
                Some(p) => x = p,
                None => return false,
            }
        }
    }

    /// `v`, its parent, ..., the root.
    pub fn ancestors(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        std::iter::successors(Some(v), move |&x| self.parent(x))
    }

    /// Depth of `v`, counting the root as depth 1.
    pub fn depth(&self, v: VertexId) -> usize {
        self.ancestors(v).count()
    }

    /// Nodes in preorder, children visited in id order.
    pub fn preorder(&self) -> Vec<VertexId> {
        let mut out = Vec::with_capacity(self.n());
        let mut stack = vec![self.root];
        while let Some(x) = stack.pop() {
            out.push(x);
            if out.len() > self.n() {
                break;
            }
            stack.extend(self.children(x).iter().rev());
        }
        out
    }

    /// Vertex set of the subtree rooted at `v`, in preorder.
    pub fn subtree(&self, v: VertexId) -> Vec<VertexId> {
        let mut out = Vec::new();
        let mut stack = vec![v];
        while let Some(x) = stack.pop() {
            out.push(x);
            stack.extend(self.children(x).iter().rev());
        }
        out
    }

    /// Depth of every node (root = 1).
    pub fn depths(&self) -> Vec<u32> {
        let mut depth = vec![0u32; self.n()];
        for x in self.preorder() {
            depth[x.index()] = self.parent(x).map_or(1, |p| depth[p.index()] + 1);
        }
        depth
    }

    /// Number of nodes on the longest root-to-leaf path.
    pub fn height(&self) -> usize {
        self.depths().into_iter().max().unwrap_or(0) as usize
    }

    /// The child of `x` whose subtree contains `target`, which must be a
    /// proper descendant of `x`. Uses the direction oracle of `G`.
    pub fn child_towards(&self, g: &Topology, x: VertexId, target: VertexId) -> Option<VertexId> {
        let z = g.step_towards(x, target);
        self.child_containing_neighbor(g, x, z)
    }

    /// The child of `x` whose subtree contains the `G`-neighbor `z` of `x`.
    #[inline]
    pub(crate) fn child_containing_neighbor(&self, g: &Topology, x: VertexId, z: VertexId) -> Option<VertexId> {
        self.children[x.index()]
            .iter()
            .copied()
            .find(|&c| c == z || g.step_towards(x, c) == z)
    }

    /// Rotates `v` above its parent, in place. Returns the child of `v`
    /// that was handed over to the old parent, if any.
    pub fn rotate_in_place(&mut self, g: &Topology, v: VertexId) -> Result<Option<VertexId>, GstError> {
        let p = self.parent(v).ok_or(GstError::RotateRoot(v))?;
        let grand = self.parent(p);
        // The subtree of v touches p through exactly one vertex; the child of
        // v holding the first step from v towards p is the one that moves.
        let z = g.step_towards(v, p);
        let moved = if z == p {
            None
        } else {
            Some(
                self.child_containing_neighbor(g, v, z)
                    .expect("subtree of v must reach its parent through a child"),
            )
        };
        remove_sorted(&mut self.children[p.index()], v);
        if let Some(u) = moved {
            remove_sorted(&mut self.children[v.index()], u);
            insert_sorted(&mut self.children[p.index()], u);
            self.parent[u.index()] = p.0;
        }
        insert_sorted(&mut self.children[v.index()], p);
        self.parent[p.index()] = v.0;
        match grand {
            Some(gp) => {
                remove_sorted(&mut self.children[gp.index()], p);
                insert_sorted(&mut self.children[gp.index()], v);
                self.parent[v.index()] = gp.0;
            }
            None => {
                self.parent[v.index()] = NONE;
                self.root = v;
            }
        }
        Ok(moved)
    }

    /// Moves `child` under `new_parent` without any validity check.
    /// Used for fault injection in tests and audits.
    #[doc(hidden)]
    pub fn relink_unchecked(&mut self, child: VertexId, new_parent: VertexId) {
        if let Some(p) = self.parent(child) {
            remove_sorted(&mut self.children[p.index()], child);
        }
        insert_sorted(&mut self.children[new_parent.index()], child);
        self.parent[child.index()] = new_parent.0;
    }

    /// Text form: `root r`, then one line `v parent(v)` per vertex with
    /// `-1` as the parent of the root.
    pub fn to_text(&self) -> String {
        let mut out = format!("root {}\n", self.root);
        for v in 0..self.n() as u32 {
            match self.parent(VertexId(v)) {
                Some(p) => out.push_str(&format!("{} {}\n", v, p)),
                None => out.push_str(&format!("{} -1\n", v)),
            }
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let bad = |msg: String| ParseError::Tree(msg);
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or(ParseError::Empty)?;
        let root: u32 = header
            .strip_prefix("root")
            .and_then(|r| r.trim().parse().ok())
            .ok_or_else(|| bad(format!("bad header {:?}", header)))?;
        let mut entries = Vec::new();
        for l in lines {
            let mut it = l.split_whitespace();
            let (Some(a), Some(b), None) = (it.next(), it.next(), it.next()) else {
                return Err(bad(format!("bad line {:?}", l)));
            };
            let v: u32 = a.parse().map_err(|_| bad(format!("bad vertex {:?}", a)))?;
            let p: i64 = b.parse().map_err(|_| bad(format!("bad parent {:?}", b)))?;
            entries.push((v, p));
        }
        let n = entries.len();
        let mut parents = vec![None; n];
        let mut seen = vec![false; n];
        for (v, p) in entries {
            if v as usize >= n || seen[v as usize] {
                return Err(bad(format!("vertex {} out of range or repeated", v)));
            }
            seen[v as usize] = true;
            if p >= 0 {
                if p as usize >= n {
                    return Err(bad(format!("parent {} out of range", p)));
                }
                parents[v as usize] = Some(VertexId(p as u32));
            }
        }
        if root as usize >= n || parents[root as usize].is_some() {
            return Err(bad(format!("root {} does not have parent -1", root)));
        }
        SearchTree::from_parents(&parents).map_err(|e| bad(e.to_string()))
    }
}

fn insert_sorted(list: &mut Vec<VertexId>, v: VertexId) {
    let pos = list.partition_point(|&x| x < v);
    list.insert(pos, v);
}

fn remove_sorted(list: &mut Vec<VertexId>, v: VertexId) {
    let pos = list.binary_search(&v).expect("child list out of sync");
    list.remove(pos);
}

/// Checks that `t` is a valid search tree on `g`: every node's child
/// subtrees are exactly the connected components of `G[subtree] \ node`.
///
/// Runs in linear time using the equivalent characterization "every edge of
/// `G` joins an ancestor/descendant pair, and every subtree is connected".
pub fn validate_search_tree(g: &Topology, t: &SearchTree) -> Result<(), Violation> {
    let n = g.n();
    if t.n() != n {
        return Err(structure(
            t.root(),
            format!("tree has {} nodes, G has {}", t.n(), n),
        ));
    }
    let order = t.preorder();
    if order.len() != n {
        return Err(structure(t.root(), "not a single rooted tree"));
    }
    for v in 0..n as u32 {
        let v = VertexId(v);
        for &c in t.children(v) {
            if t.parent(c) != Some(v) {
                return Err(structure(v, format!("child {} does not point back", c)));
            }
        }
        if t.children(v).windows(2).any(|w| w[0] >= w[1]) {
            return Err(structure(v, "children not sorted"));
        }
    }
    let mut tin = vec![0u32; n];
    let mut size = vec![1u32; n];
    let mut depth = vec![0u32; n];
    for (i, &x) in order.iter().enumerate() {
        tin[x.index()] = i as u32;
        depth[x.index()] = t.parent(x).map_or(0, |p| depth[p.index()] + 1);
    }
    for &x in order.iter().rev() {
        if let Some(p) = t.parent(x) {
            size[p.index()] += size[x.index()];
        }
    }
    let below = |a: VertexId, b: VertexId| {
        let (ta, tb) = (tin[a.index()], tin[b.index()]);
        ta < tb && tb < ta + size[a.index()]
    };
    let mut offenders: Vec<(u32, Violation)> = Vec::new();
    // Each edge counted at the lowest node whose subtree holds both endpoints.
    let mut up_edges = vec![0u32; n];
    for (u, w) in g.edges() {
        if below(u, w) {
            up_edges[u.index()] += 1;
        } else if below(w, u) {
            up_edges[w.index()] += 1;
        } else {
            let mut a = u;
            while !(a == w || below(a, w)) {
                a = t.parent(a).expect("root is an ancestor of everything");
            }
            up_edges[a.index()] += 1;
            offenders.push((
                depth[a.index()],
                Violation {
                    node: a,
                    kind: ViolationKind::EdgeAcrossChildren { u, w },
                },
            ));
        }
    }
    let mut inside = up_edges;
    for &x in order.iter().rev() {
        if inside[x.index()] + 1 != size[x.index()] {
            if let Some(p) = t.parent(x) {
                offenders.push((
                    depth[p.index()],
                    Violation {
                        node: p,
                        kind: ViolationKind::DisconnectedChild { child: x },
                    },
                ));
            }
        }
        if let Some(p) = t.parent(x) {
            inside[p.index()] += inside[x.index()];
        }
    }
    match offenders.into_iter().min_by_key(|(d, v)| (*d, v.node)) {
        Some((_, v)) => Err(v),
        None => Ok(()),
    }
}

/// Returns the tree obtained by rotating `v` above its parent.
///
/// Unlike [`SearchTree::rotate_in_place`], this scans every child subtree of
/// `v` for a neighbor of the parent and fails loudly if more than one child
/// qualifies.
pub fn rotate(g: &Topology, t: &SearchTree, v: VertexId) -> Result<SearchTree, GstError> {
    if !g.contains(v) || v.index() >= t.n() {
        return Err(GstError::UnknownVertex(v));
    }
    let p = t.parent(v).ok_or(GstError::RotateRoot(v))?;
    let movers: Vec<VertexId> = t
        .children(v)
        .iter()
        .copied()
        .filter(|&c| t.subtree(c).into_iter().any(|x| g.are_adjacent(x, p)))
        .collect();
    assert!(
        movers.len() <= 1,
        "rotation of {}: children {:?} all touch the parent {}",
        v,
        movers,
        p
    );
    let mut parents = t.parents();
    parents[v.index()] = t.parent(p);
    parents[p.index()] = Some(v);
    if let Some(&u) = movers.first() {
        parents[u.index()] = Some(p);
    }
    SearchTree::from_parents(&parents).map_err(GstError::InvalidTree)
}

/// Builds a search tree top-down: `choose` picks the root of the whole
/// vertex set, then the root of every component left behind, recursively.
/// Each slice passed to `choose` is a connected vertex set.
pub fn build_search_tree(g: &Topology, mut choose: impl FnMut(&[VertexId]) -> VertexId) -> SearchTree {
    let n = g.n();
    let mut parents = vec![None; n];
    let mut removed = vec![false; n];
    let mut stamp = vec![0u32; n];
    let mut epoch = 0u32;
    let mut work = vec![(g.vertices().collect::<Vec<_>>(), None)];
    while let Some((comp, parent)) = work.pop() {
        let r = choose(&comp);
        debug_assert!(comp.contains(&r));
        parents[r.index()] = parent;
        removed[r.index()] = true;
        epoch += 1;
        for &s in g.neighbors(r) {
            if removed[s.index()] || stamp[s.index()] == epoch {
                continue;
            }
            stamp[s.index()] = epoch;
            let mut part = vec![s];
            let mut i = 0;
            while i < part.len() {
                let x = part[i];
                i += 1;
                for &y in g.neighbors(x) {
                    if !removed[y.index()] && stamp[y.index()] != epoch {
                        stamp[y.index()] = epoch;
                        part.push(y);
                    }
                }
            }
            work.push((part, Some(r)));
        }
    }
    SearchTree::from_parents(&parents).expect("top-down construction yields a tree")
}

/// A search tree whose every local root is drawn uniformly from its component.
pub fn random_search_tree<R: rand::Rng + ?Sized>(g: &Topology, rng: &mut R) -> SearchTree {
    build_search_tree(g, |comp| comp[rng.gen_range(0..comp.len())])
}

/// Height of a tree: nodes on its longest root-to-leaf path.
pub fn height(t: &SearchTree) -> usize {
    t.height()
}
