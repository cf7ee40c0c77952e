//! Steiner-closed sets and trees, the closure transformation, centroid
//! decomposition, reference trees and minor trees `G(S)`.

use serde::{Deserialize, Serialize};

use crate::error::GstError;
use crate::search_tree::{build_search_tree, validate_search_tree, SearchTree};
use crate::topology::{Topology, VertexId, NONE};

/// A vertex set together with its convex hull and hull degrees.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SteinerSet {
    pub members: Vec<VertexId>,
    pub hull: Vec<VertexId>,
    /// Degree inside the hull, parallel to `hull`.
    pub hull_degrees: Vec<usize>,
}

impl SteinerSet {
    pub fn new(g: &Topology, s: &[VertexId]) -> Result<Self, GstError> {
        check_vertices(g, s)?;
        let hull = g.convex_hull(s)?;
        let mut in_hull = vec![false; g.n()];
        for &h in &hull {
            in_hull[h.index()] = true;
        }
        let hull_degrees = hull
            .iter()
            .map(|&h| g.neighbors(h).iter().filter(|w| in_hull[w.index()]).count())
            .collect();
        let mut members = s.to_vec();
        members.sort_unstable();
        members.dedup();
        Ok(SteinerSet {
            members,
            hull,
            hull_degrees,
        })
    }

    pub fn is_closed(&self) -> bool {
        self.hull
            .iter()
            .zip(&self.hull_degrees)
            .all(|(h, &d)| d == 2 || self.members.binary_search(h).is_ok())
    }
}

fn check_vertices(g: &Topology, s: &[VertexId]) -> Result<(), GstError> {
    if s.is_empty() {
        return Err(GstError::EmptySet);
    }
    match s.iter().find(|v| !g.contains(**v)) {
        Some(&v) => Err(GstError::UnknownVertex(v)),
        None => Ok(()),
    }
}

/// Whether every hull vertex outside `s` has hull-degree exactly two.
pub fn is_steiner_closed(g: &Topology, s: &[VertexId]) -> Result<bool, GstError> {
    Ok(SteinerSet::new(g, s)?.is_closed())
}

/// For a Steiner-closed `path` (flagged in `in_path`), whether adding `c`
/// keeps it closed. Returns the hull vertex that would get degree three
/// otherwise.
fn closure_breaker(g: &Topology, path: &[VertexId], in_path: &[bool], c: VertexId) -> Option<VertexId> {
    let s = g.project_onto_hull(c, path);
    if s == c || in_path[s.index()] {
        None
    } else {
        Some(s)
    }
}

/// Whether every root-to-node vertex set of `t` is Steiner-closed.
pub fn is_steiner_closed_tree(g: &Topology, t: &SearchTree) -> Result<bool, GstError> {
    validate_search_tree(g, t).map_err(GstError::InvalidTree)?;
    Ok(first_open_node(g, t).is_none())
}

/// The first node (in preorder) whose root path is not Steiner-closed.
pub fn first_open_node(g: &Topology, t: &SearchTree) -> Option<VertexId> {
    let mut in_path = vec![false; g.n()];
    let mut path = Vec::new();
    // (node, entering?) pairs.
    let mut stack = vec![(t.root(), true)];
    while let Some((x, enter)) = stack.pop() {
        if !enter {
            in_path[x.index()] = false;
            path.pop();
            continue;
        }
        if !path.is_empty() && closure_breaker(g, &path, &in_path, x).is_some() {
            return Some(x);
        }
        in_path[x.index()] = true;
        path.push(x);
        stack.push((x, false));
        for &c in t.children(x).iter().rev() {
            stack.push((c, true));
        }
    }
    None
}

struct Frame {
    node: VertexId,
    todo: Vec<VertexId>,
    next: usize,
}

/// Turns a valid search tree into a Steiner-closed one of at most twice the
/// height. Depth-first in ascending child order; whenever adding a child `c`
/// to the current root path would break closure, the offending hull vertex is
/// rotated up to sit directly below the current node and visited first.
pub fn steinerify(g: &Topology, t: &SearchTree) -> Result<SearchTree, GstError> {
    validate_search_tree(g, t).map_err(GstError::InvalidTree)?;
    let mut t = t.clone();
    let mut in_path = vec![false; g.n()];
    let root = t.root();
    let mut path = vec![root];
    in_path[root.index()] = true;
    let mut stack = vec![Frame {
        node: root,
        todo: t.children(root).to_vec(),
        next: 0,
    }];
    while let Some(fr) = stack.last_mut() {
        if fr.next == fr.todo.len() {
            in_path[fr.node.index()] = false;
            path.pop();
            stack.pop();
            continue;
        }
        let f = fr.node;
        let c = fr.todo[fr.next];
        let child = match closure_breaker(g, &path, &in_path, c) {
            None => c,
            Some(s) => {
                while t.parent(s) != Some(f) {
                    t.rotate_in_place(g, s)?;
                }
                fr.todo[fr.next] = s;
                s
            }
        };
        fr.next += 1;
        in_path[child.index()] = true;
        path.push(child);
        let todo = t.children(child).to_vec();
        stack.push(Frame {
            node: child,
            todo,
            next: 0,
        });
    }
    Ok(t)
}

/// Centroid of the connected set `comp`; the smaller id wins a tie.
fn centroid_of(g: &Topology, comp: &[VertexId], stamp: &mut [u32], epoch: u32) -> VertexId {
    if comp.len() <= 2 {
        return *comp.iter().min().expect("nonempty component");
    }
    for &x in comp {
        stamp[x.index()] = epoch;
    }
    let total = comp.len();
    let mut order = Vec::with_capacity(total);
    let mut parent = vec![NONE; g.n()];
    order.push(comp[0]);
    stamp[comp[0].index()] = epoch + 1;
    let mut i = 0;
    while i < order.len() {
        let x = order[i];
        i += 1;
        for &y in g.neighbors(x) {
            if stamp[y.index()] == epoch {
                stamp[y.index()] = epoch + 1;
                parent[y.index()] = x.0;
                order.push(y);
            }
        }
    }
    let mut size = vec![0usize; g.n()];
    let mut heaviest = vec![0usize; g.n()];
    let mut best: Option<VertexId> = None;
    for &x in order.iter().rev() {
        size[x.index()] += 1;
        let up = total - size[x.index()];
        if heaviest[x.index()].max(up) * 2 <= total && best.map_or(true, |b| x < b) {
            best = Some(x);
        }
        let p = parent[x.index()];
        if p != NONE {
            size[p as usize] += size[x.index()];
            heaviest[p as usize] = heaviest[p as usize].max(size[x.index()]);
        }
    }
    best.expect("every tree has a centroid")
}

/// Recursive centroid decomposition: height at most `floor(log2 n) + 1`.
pub fn centroid_decomposition(g: &Topology) -> SearchTree {
    let mut stamp = vec![0u32; g.n()];
    let mut epoch = 0u32;
    build_search_tree(g, |comp| {
        epoch += 2;
        centroid_of(g, comp, &mut stamp, epoch)
    })
}

/// The Steiner-closed reference tree: closure of the centroid decomposition.
pub fn reference_tree(g: &Topology) -> SearchTree {
    steinerify(g, &centroid_decomposition(g)).expect("centroid decomposition is a valid search tree")
}

/// `G(S)` for a Steiner-closed `S`: vertices of `S`, with `a`–`b` adjacent
/// when no other member of `S` lies on the path between them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinorTree {
    pub vertices: Vec<VertexId>,
    /// Sorted pairs `(a, b)` with `a < b`.
    pub edges: Vec<(VertexId, VertexId)>,
}

impl MinorTree {
    pub fn is_tree(&self) -> bool {
        let k = self.vertices.len();
        if self.edges.len() + 1 != k {
            return false;
        }
        let pos = |v: VertexId| self.vertices.binary_search(&v).ok();
        let mut dsu = crate::topology::Dsu::new(k);
        self.edges.iter().all(|&(a, b)| match (pos(a), pos(b)) {
            (Some(i), Some(j)) => dsu.union(i, j),
            _ => false,
        })
    }

    pub fn neighbors(&self, v: VertexId) -> Vec<VertexId> {
        self.edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == v {
                    Some(b)
                } else if b == v {
                    Some(a)
                } else {
                    None
                }
            })
            .collect()
    }
}

/// Builds `G(S)` through the virtual tree of `S` in O(k log k).
pub fn minor_tree(g: &Topology, s: &[VertexId]) -> Result<MinorTree, GstError> {
    check_vertices(g, s)?;
    let mut members = s.to_vec();
    members.sort_unstable();
    members.dedup();
    let mut keys = members.clone();
    keys.sort_unstable_by_key(|&v| g.tin(v));
    let base = keys.len();
    for i in 1..base {
        keys.push(g.lca(keys[i - 1], keys[i]));
    }
    keys.sort_unstable_by_key(|&v| g.tin(v));
    keys.dedup();
    let is_member = |v: VertexId| members.binary_search(&v).is_ok();
    // Virtual tree adjacency, indexed by position in `keys`.
    let pos = |v: VertexId| keys.binary_search_by_key(&g.tin(v), |&k| g.tin(k)).expect("key present");
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); keys.len()];
    let mut stack: Vec<usize> = Vec::new();
    for (i, &v) in keys.iter().enumerate() {
        while let Some(&top) = stack.last() {
            if g.rooted_ancestor(keys[top].0, v.0) {
                break;
            }
            stack.pop();
        }
        if let Some(&top) = stack.last() {
            adj[top].push(i);
            adj[i].push(top);
        }
        stack.push(i);
    }
    for (i, &v) in keys.iter().enumerate() {
        if !is_member(v) && adj[i].len() != 2 {
            return Err(GstError::NotSteinerClosed);
        }
    }
    let mut edges = Vec::with_capacity(members.len().saturating_sub(1));
    for &u in &members {
        let ui = pos(u);
        for &start in &adj[ui] {
            let (mut prev, mut cur) = (ui, start);
            while !is_member(keys[cur]) {
                let next = if adj[cur][0] == prev { adj[cur][1] } else { adj[cur][0] };
                prev = cur;
                cur = next;
            }
            let w = keys[cur];
            if u < w {
                edges.push((u, w));
            }
        }
    }
    edges.sort_unstable();
    Ok(MinorTree {
        vertices: members,
        edges,
    })
}

/// `G(S)` straight from the definition, for any vertex set: all pairs whose
/// connecting path has no member of `S` in its interior. Quadratic; used as a
/// cross-check and for sets that are not Steiner-closed.
pub fn minor_edges_by_definition(g: &Topology, s: &[VertexId]) -> Vec<(VertexId, VertexId)> {
    let mut members = s.to_vec();
    members.sort_unstable();
    members.dedup();
    let mut out = Vec::new();
    for (i, &a) in members.iter().enumerate() {
        for &b in &members[i + 1..] {
            let p = g.path_between(a, b);
            if p[1..p.len() - 1].iter().all(|x| members.binary_search(x).is_err()) {
                out.push((a, b));
            }
        }
    }
    out
}

/// Number of connected components of `CH(pi) \ CH(pi[i..])`.
///
/// `pi` is a root-to-node vertex sequence of a Steiner-closed search tree and
/// `1 <= i < |pi|`. For `|pi| = 1` there is nothing to split and the answer
/// is 0.
pub fn split_components(g: &Topology, pi: &[VertexId], i: usize) -> Result<usize, GstError> {
    check_vertices(g, pi)?;
    let mut seen = vec![false; g.n()];
    for &v in pi {
        if std::mem::replace(&mut seen[v.index()], true) {
            return Err(GstError::MergePrecondition(format!("vertex {} repeated in path", v)));
        }
    }
    if pi.len() == 1 {
        return Ok(0);
    }
    if i == 0 || i >= pi.len() {
        return Err(GstError::CutDepth {
            depth: i as u32,
            min: 0,
            max: pi.len() as u32 - 1,
        });
    }
    let whole = g.convex_hull(pi)?;
    let suffix = g.convex_hull(&pi[i..])?;
    let mut left = vec![false; g.n()];
    for &h in &whole {
        left[h.index()] = true;
    }
    for &h in &suffix {
        left[h.index()] = false;
    }
    Ok(count_components(g, &whole, &mut left))
}

/// Counts components of the vertices flagged in `mark` (restricted to
/// `candidates`), clearing the flags.
fn count_components(g: &Topology, candidates: &[VertexId], mark: &mut [bool]) -> usize {
    let mut count = 0;
    for &s in candidates {
        if !mark[s.index()] {
            continue;
        }
        count += 1;
        mark[s.index()] = false;
        let mut stack = vec![s];
        while let Some(x) = stack.pop() {
            for &y in g.neighbors(x) {
                if mark[y.index()] {
                    mark[y.index()] = false;
                    stack.push(y);
                }
            }
        }
    }
    count
}

/// Every root-to-node vertex sequence of `t`, one per node.
pub fn root_paths(t: &SearchTree) -> Vec<Vec<VertexId>> {
    let mut out = Vec::with_capacity(t.n());
    let mut path = Vec::new();
    let mut stack = vec![(t.root(), true)];
    while let Some((x, enter)) = stack.pop() {
        if !enter {
            path.pop();
            continue;
        }
        path.push(x);
        out.push(path.clone());
        stack.push((x, false));
        for &c in t.children(x).iter().rev() {
            stack.push((c, true));
        }
    }
    out
}
