//! The online structure.
//!
//! A Steiner-closed reference tree `P` is split into preferred paths. For a
//! path with node set `S`, the nodes of `S` occupy a connected region of the
//! machine tree (a *fragment*) which is itself a search tree on the minor
//! `G(S)`: it is the virtual tree of a link-cut forest over `G(S)`, i.e. solid
//! paths kept as splay trees, hung from each other by path-parent links. The
//! composite for the reference subtree of a path's top hangs below the deeper
//! of its (at most two) neighbours in the paths above.
//!
//! Every splay rotation is issued to the machine as a paid rotation at the
//! rotated node, with the finger walking there along tree edges. Changing the
//! splay pointers without rotating (cutting a solid edge into a dashed one and
//! back) does not change the machine tree and is free bookkeeping.

mod audit;

use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use audit::TangoViolation;

use crate::error::GstError;
use crate::interleave::PreferredState;
use crate::machine::{GstMachine, TraceMode};
use crate::search_tree::SearchTree;
use crate::steiner::{minor_tree, reference_tree};
use crate::topology::{Topology, VertexId, NONE};

/// A preferred path, named by its topmost node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PathId(pub VertexId);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    pub target: VertexId,
    pub cost: u64,
    pub paths_touched: u64,
    pub path_changes: u64,
    pub wall_ns: u64,
}

/// Edges of minors removed and added by the last cut or merge.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinorOps {
    pub cuts: u32,
    pub links: u32,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct TangoOptions {
    pub trace: TraceMode,
    /// Audit the whole structure after every search (only for n <= 512).
    pub debug_audit: bool,
}

/// Splay-tree bookkeeping of the link-cut forests. `par` is the splay parent
/// or, for the root of a splay tree, the path-parent (`NONE` at a fragment root).
#[derive(Clone, Debug)]
struct Lct {
    ch: Vec<[u32; 2]>,
    par: Vec<u32>,
    rev: Vec<bool>,
}

#[derive(Clone, Debug)]
pub struct TangoTree {
    reference: SearchTree,
    depth: Vec<u32>,
    tracker: PreferredState,
    /// Preferred child as realised by the path partition (`NONE` ends a path).
    pref: Vec<u32>,
    path_of: Vec<u32>,
    /// Path nodes in reference-depth order, indexed by the top node.
    paths: Vec<Vec<VertexId>>,
    /// Neighbours in `G` of the reference subtree of each node, among its
    /// ancestors; at most two.
    boundary: Vec<[u32; 2]>,
    lct: Lct,
    machine: GstMachine,
    initial_tree: SearchTree,
    last_ops: MinorOps,
    /// Set once a path was cut or merged outside of a search.
    manual: bool,
    debug_audit: bool,
    total_path_changes: u64,
    scratch: Vec<u32>,
}

impl TangoTree {
    pub fn new(g: Topology) -> Self {
        Self::with_options(g, TangoOptions::default())
    }

    pub fn with_options(g: Topology, opts: TangoOptions) -> Self {
        let reference = reference_tree(&g);
        Self::with_reference(g, reference, opts).expect("reference tree is Steiner-closed")
    }

    /// Builds the structure over a given Steiner-closed reference tree.
    pub fn with_reference(g: Topology, reference: SearchTree, opts: TangoOptions) -> Result<Self, GstError> {
        if !crate::steiner::is_steiner_closed_tree(&g, &reference)? {
            return Err(GstError::NotSteinerClosed);
        }
        let n = g.n();
        let depth = reference.depths();
        let tracker = PreferredState::new_unchecked(reference.clone());
        let pref: Vec<u32> = (0..n as u32)
            .map(|y| reference.children(VertexId(y)).first().map_or(NONE, |c| c.0))
            .collect();
        let boundary = boundary_sets(&g, &reference, &depth);

        let mut path_of = vec![NONE; n];
        let mut paths = vec![Vec::new(); n];
        let mut lct = Lct {
            ch: vec![[NONE; 2]; n],
            par: vec![NONE; n],
            rev: vec![false; n],
        };
        let mut t_parent: Vec<Option<VertexId>> = vec![None; n];
        let mut t_depth = vec![0u32; n];
        // Tops in reference preorder: hangers are placed after the paths above.
        for top in reference.preorder() {
            let is_top = reference.parent(top).map_or(true, |p| pref[p.index()] != top.0);
            if !is_top {
                continue;
            }
            let mut nodes = vec![top];
            let mut x = top;
            while pref[x.index()] != NONE {
                x = VertexId(pref[x.index()]);
                nodes.push(x);
            }
            for &x in &nodes {
                path_of[x.index()] = top.0;
            }
            // The fragment starts as G(S) rooted at the top, every edge dashed.
            let minor = minor_tree(&g, &nodes)?;
            let anchor = boundary[top.index()]
                .iter()
                .filter(|&&a| a != NONE)
                .max_by_key(|&&a| t_depth[a as usize])
                .map(|&a| VertexId(a));
            t_parent[top.index()] = anchor;
            t_depth[top.index()] = anchor.map_or(1, |a| t_depth[a.index()] + 1);
            let mut queue = vec![top];
            let mut i = 0;
            while i < queue.len() {
                let x = queue[i];
                i += 1;
                for w in minor.neighbors(x) {
                    if w != top && t_parent[w.index()].is_none() {
                        t_parent[w.index()] = Some(x);
                        t_depth[w.index()] = t_depth[x.index()] + 1;
                        lct.par[w.index()] = x.0;
                        queue.push(w);
                    }
                }
            }
            paths[top.index()] = nodes;
        }
        let tree = SearchTree::from_parents(&t_parent).map_err(GstError::InvalidTree)?;
        let mut machine = GstMachine::new(g, tree.clone())?.with_trace_mode(opts.trace);
        machine.set_debug_validate(opts.debug_audit);
        Ok(TangoTree {
            reference,
            depth,
            tracker,
            pref,
            path_of,
            paths,
            boundary,
            lct,
            machine,
            initial_tree: tree,
            last_ops: MinorOps::default(),
            manual: false,
            debug_audit: opts.debug_audit && n <= crate::machine::DEBUG_VALIDATE_LIMIT,
            total_path_changes: 0,
            scratch: Vec::new(),
        })
    }

    pub fn topology(&self) -> &Topology {
        self.machine.topology()
    }

    pub fn reference(&self) -> &SearchTree {
        &self.reference
    }

    pub fn machine(&self) -> &GstMachine {
        &self.machine
    }

    pub fn tracker(&self) -> &PreferredState {
        &self.tracker
    }

    /// The composite tree the machine started from.
    pub fn initial_tree(&self) -> &SearchTree {
        &self.initial_tree
    }

    pub fn tree(&self) -> &SearchTree {
        self.machine.tree()
    }

    /// Reference depth of `v` (root = 1).
    pub fn depth_of(&self, v: VertexId) -> u32 {
        self.depth[v.index()]
    }

    pub fn total_path_changes(&self) -> u64 {
        self.total_path_changes
    }

    pub fn last_minor_ops(&self) -> MinorOps {
        self.last_ops
    }

    pub fn path_of(&self, v: VertexId) -> PathId {
        PathId(VertexId(self.path_of[v.index()]))
    }

    pub fn path(&self, p: PathId) -> Option<&[VertexId]> {
        self.paths
            .get(p.0.index())
            .filter(|nodes| nodes.first() == Some(&p.0))
            .map(Vec::as_slice)
    }

    pub fn paths(&self) -> impl Iterator<Item = (PathId, &[VertexId])> + '_ {
        self.paths
            .iter()
            .filter(|nodes| !nodes.is_empty())
            .map(|nodes| (PathId(nodes[0]), nodes.as_slice()))
    }

    pub fn path_count(&self) -> usize {
        self.paths().count()
    }

    /// Serves a search for `v` as one machine session.
    pub fn search(&mut self, v: VertexId) -> Result<SearchStats, GstError> {
        if !self.topology().contains(v) {
            return Err(GstError::UnknownVertex(v));
        }
        let clock = Instant::now();
        self.machine.begin_search(v)?;
        self.tracker.record_access(v);
        let mut chain: Vec<VertexId> = self.reference.ancestors(v).collect();
        chain.reverse();
        let mut changes = 0u64;
        for y in chain {
            let want = self.tracker.effective(y).map_or(NONE, |c| c.0);
            if self.pref[y.index()] != want {
                self.switch_preferred(y, want)?;
                changes += 1;
            }
        }
        // v now lies on the root path; bring it to the root.
        self.access(v);
        self.machine.walk_to(v)?;
        let cost = self.machine.end_search()?;
        self.total_path_changes += changes;
        if self.debug_audit {
            if let Err(e) = self.audit() {
                panic!("audit failed after searching {}: {}", v, e);
            }
        }
        Ok(SearchStats {
            target: v,
            cost,
            paths_touched: changes + 1,
            path_changes: changes,
            wall_ns: clock.elapsed().as_nanos() as u64,
        })
    }

    /// Cuts the path `p` into the nodes above reference depth `d` and those
    /// at depth `d` or below. Outside a search the work is charged to a
    /// maintenance session.
    pub fn cut_path(&mut self, p: PathId, d: u32) -> Result<(PathId, PathId), GstError> {
        let nodes = self.path(p).ok_or(GstError::UnknownPath(p.0 .0))?;
        let (lo, hi) = (self.depth_of(nodes[0]), self.depth_of(*nodes.last().unwrap()));
        if d <= lo || d > hi {
            return Err(GstError::CutDepth { depth: d, min: lo, max: hi });
        }
        let bottom = nodes[(d - lo) as usize];
        self.maintenance(|t| t.cut_internal(p.0, d))?;
        self.manual = true;
        Ok((p, PathId(bottom)))
    }

    /// Appends `bottom` below `top`; the last node of `top` must be the
    /// reference parent of the first node of `bottom`.
    pub fn merge_paths(&mut self, top: PathId, bottom: PathId) -> Result<PathId, GstError> {
        let upper = self.path(top).ok_or(GstError::UnknownPath(top.0 .0))?;
        let last = *upper.last().unwrap();
        self.path(bottom).ok_or(GstError::UnknownPath(bottom.0 .0))?;
        if self.reference.parent(bottom.0) != Some(last) {
            return Err(GstError::MergePrecondition(format!(
                "{} is not the reference parent of {}",
                last, bottom.0
            )));
        }
        self.maintenance(|t| t.merge_internal(top.0, bottom.0))?;
        self.manual = true;
        Ok(top)
    }

    fn maintenance(&mut self, op: impl FnOnce(&mut Self) -> Result<(), GstError>) -> Result<(), GstError> {
        let own = !self.machine.in_session();
        if own {
            self.machine.begin_maintenance()?;
        }
        op(self)?;
        if own {
            self.machine.end_search()?;
        }
        Ok(())
    }

    /// Makes `want` the preferred child of `y` (`NONE` ends the path at `y`).
    fn switch_preferred(&mut self, y: VertexId, want: u32) -> Result<(), GstError> {
        let top = VertexId(self.path_of[y.index()]);
        if self.pref[y.index()] != NONE {
            self.cut_internal(top, self.depth[y.index()] + 1)?;
        }
        if want != NONE {
            self.merge_internal(top, VertexId(want))?;
        }
        Ok(())
    }

    /// Crossing edges of `G(S1 ∪ S2)` between the upper part `S1` (path
    /// `top`) and the lower path `S2` whose first node is `c`.
    fn crossings(&self, top: VertexId, c: VertexId, lower: &[VertexId]) -> Vec<(VertexId, VertexId)> {
        let g = self.machine.topology();
        self.boundary[c.index()]
            .iter()
            .filter(|&&a| a != NONE && self.path_of[a as usize] == top.0 && self.depth[a as usize] < self.depth[c.index()])
            .map(|&a| {
                let a = VertexId(a);
                let q = g.project_onto_hull(a, lower);
                debug_assert!(lower.contains(&q), "crossing from {} lands outside the lower path", a);
                (a, q)
            })
            .collect()
    }

    fn cut_internal(&mut self, top: VertexId, d: u32) -> Result<(), GstError> {
        let nodes = std::mem::take(&mut self.paths[top.index()]);
        let k = (d - self.depth[top.index()]) as usize;
        let (upper, lower) = nodes.split_at(k);
        let c = lower[0];
        let cross = self.crossings(top, c, lower);
        match cross[..] {
            [(a, q)] => {
                self.evert(a);
                self.access(a);
                let r2 = self
                    .machine
                    .tree()
                    .child_towards(self.machine.topology(), a, q)
                    .expect("lower part hangs below a");
                debug_assert_eq!(self.lct.par[r2.index()], a.0);
                self.lct.par[r2.index()] = NONE;
                self.last_ops = MinorOps { cuts: 1, links: 0 };
            }
            [(a1, _), (a2, _)] => {
                self.evert(a1);
                self.access(a2);
                self.splay(a1);
                self.splay_below(a2, a1);
                self.push(a2);
                let r2 = self.lct.ch[a2.index()][0];
                debug_assert_ne!(r2, NONE);
                self.lct.ch[a2.index()][0] = NONE;
                self.lct.par[r2 as usize] = NONE;
                self.last_ops = MinorOps { cuts: 2, links: 1 };
            }
            _ => unreachable!("a lower path has one or two crossing edges, got {}", cross.len()),
        }
        for &x in lower {
            self.path_of[x.index()] = c.0;
        }
        let y = upper[upper.len() - 1];
        self.pref[y.index()] = NONE;
        self.paths[c.index()] = lower.to_vec();
        self.paths[top.index()] = upper.to_vec();
        Ok(())
    }

    fn merge_internal(&mut self, top: VertexId, c: VertexId) -> Result<(), GstError> {
        let y = *self.paths[top.index()].last().expect("path is nonempty");
        if self.reference.parent(c) != Some(y) || self.pref[y.index()] != NONE {
            return Err(GstError::MergePrecondition(format!("{} cannot continue below {}", c, y)));
        }
        let lower = std::mem::take(&mut self.paths[c.index()]);
        if lower.first() != Some(&c) {
            return Err(GstError::UnknownPath(c.0));
        }
        let cross = self.crossings(top, c, &lower);
        match cross[..] {
            [(a, q)] => {
                self.access(a);
                self.evert(q);
                debug_assert_eq!(self.machine.tree().parent(q), Some(a));
                self.lct.par[q.index()] = a.0;
                self.last_ops = MinorOps { cuts: 0, links: 1 };
            }
            [(a1, q1), (a2, q2)] => {
                self.evert(a1);
                self.access(a2);
                self.push(a2);
                debug_assert_eq!(self.lct.ch[a2.index()][0], a1.0);
                self.push(a1);
                debug_assert_eq!(self.lct.ch[a1.index()], [NONE, NONE]);
                self.evert(q1);
                self.access(q2);
                debug_assert_eq!(self.machine.tree().parent(q2), Some(a1));
                self.lct.ch[a1.index()][1] = q2.0;
                self.lct.par[q2.index()] = a1.0;
                self.last_ops = MinorOps { cuts: 1, links: 2 };
            }
            _ => unreachable!("a lower path has one or two crossing edges, got {}", cross.len()),
        }
        for &x in &lower {
            self.path_of[x.index()] = top.0;
        }
        self.pref[y.index()] = c.0;
        self.paths[top.index()].extend(lower);
        Ok(())
    }

    // Link-cut primitives. Only `rotate` changes the machine tree.

    #[inline]
    fn is_splay_root(&self, x: VertexId) -> bool {
        let p = self.lct.par[x.index()];
        p == NONE || (self.lct.ch[p as usize][0] != x.0 && self.lct.ch[p as usize][1] != x.0)
    }

    #[inline]
    fn push(&mut self, x: VertexId) {
        let i = x.index();
        if self.lct.rev[i] {
            self.lct.rev[i] = false;
            self.lct.ch[i].swap(0, 1);
            for c in self.lct.ch[i] {
                if c != NONE {
                    self.lct.rev[c as usize] ^= true;
                }
            }
        }
    }

    fn rotate(&mut self, x: VertexId) {
        let y = self.lct.par[x.index()];
        let z = self.lct.par[y as usize];
        let dx = usize::from(self.lct.ch[y as usize][1] == x.0);
        let b = self.lct.ch[x.index()][dx ^ 1];
        if !self.is_splay_root(VertexId(y)) {
            let dz = usize::from(self.lct.ch[z as usize][1] == y);
            self.lct.ch[z as usize][dz] = x.0;
        }
        self.lct.par[x.index()] = z;
        self.lct.ch[x.index()][dx ^ 1] = y;
        self.lct.par[y as usize] = x.0;
        self.lct.ch[y as usize][dx] = b;
        if b != NONE {
            self.lct.par[b as usize] = y;
        }
        self.machine.rotate_at(x).expect("splay rotation is a legal machine rotation");
    }

    /// Splays `x` until its splay parent is `stop` (`NONE`: to the splay root).
    fn splay_below(&mut self, x: VertexId, stop: VertexId) {
        let mut stack = std::mem::take(&mut self.scratch);
        stack.clear();
        stack.push(x.0);
        let mut y = x;
        while !self.is_splay_root(y) && self.lct.par[y.index()] != stop.0 {
            y = VertexId(self.lct.par[y.index()]);
            stack.push(y.0);
        }
        if self.lct.par[y.index()] == stop.0 && stop.0 != NONE {
            stack.push(stop.0);
        }
        for &s in stack.iter().rev() {
            self.push(VertexId(s));
        }
        self.scratch = stack;
        let at_top = |t: &Self, v: VertexId| t.is_splay_root(v) || t.lct.par[v.index()] == stop.0;
        while !at_top(self, x) {
            let y = VertexId(self.lct.par[x.index()]);
            if !at_top(self, y) {
                let z = self.lct.par[y.index()] as usize;
                let zig_zig = (self.lct.ch[y.index()][0] == x.0) == (self.lct.ch[z][0] == y.0);
                if zig_zig {
                    self.rotate(y);
                } else {
                    self.rotate(x);
                }
            }
            self.rotate(x);
        }
    }

    fn splay(&mut self, x: VertexId) {
        self.splay_below(x, VertexId(NONE));
    }

    /// Makes the represented path from the fragment's represented root to `x`
    /// solid, with `x` at the root of its splay tree and of the fragment.
    fn access(&mut self, x: VertexId) {
        let mut last = NONE;
        let mut y = x.0;
        while y != NONE {
            self.splay(VertexId(y));
            self.push(VertexId(y));
            self.lct.ch[y as usize][1] = last;
            last = y;
            y = self.lct.par[y as usize];
        }
        self.splay(x);
    }

    /// Makes `x` the represented root of its fragment.
    fn evert(&mut self, x: VertexId) {
        self.access(x);
        self.lct.rev[x.index()] ^= true;
    }

    /// Fault injection for tests: re-hangs `child` below `new_parent` in the
    /// machine tree without any bookkeeping.
    #[doc(hidden)]
    pub fn corrupt_parent(&mut self, child: VertexId, new_parent: VertexId) {
        self.machine.corrupt_parent(child, new_parent);
    }
}

/// For every non-root node `c` of `p`: the ancestors of `c` adjacent in `g`
/// to the reference subtree of `c`.
fn boundary_sets(g: &Topology, p: &SearchTree, depth: &[u32]) -> Vec<[u32; 2]> {
    let mut out = vec![[NONE; 2]; g.n()];
    for (u, w) in g.edges() {
        let (upper, mut x) = if depth[u.index()] < depth[w.index()] { (u, w) } else { (w, u) };
        while x != upper {
            let slot = &mut out[x.index()];
            if !slot.contains(&upper.0) {
                let free = slot.iter().position(|&s| s == NONE).expect("at most two boundary vertices");
                slot[free] = upper.0;
            }
            x = p.parent(x).expect("edge endpoints are ancestor-related in a search tree");
        }
    }
    out
}
