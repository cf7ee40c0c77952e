use std::fmt;

use crate::search_tree::{validate_search_tree, Violation};
use crate::steiner::{is_steiner_closed, minor_tree};
use crate::topology::{VertexId, NONE};

use super::{PathId, TangoTree};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TangoViolation {
    InvalidTree(Violation),
    Partition(String),
    NotSteinerClosed(PathId),
    Minor { path: PathId, detail: String },
    SolidPath { path: PathId, nodes: Vec<VertexId> },
    Link { node: VertexId, detail: String },
}

impl fmt::Display for TangoViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TangoViolation::InvalidTree(v) => write!(f, "machine tree invalid {}", v),
            TangoViolation::Partition(s) => write!(f, "path partition: {}", s),
            TangoViolation::NotSteinerClosed(p) => write!(f, "path {} is not Steiner-closed", p.0),
            TangoViolation::Minor { path, detail } => write!(f, "minor of path {}: {}", path.0, detail),
            TangoViolation::SolidPath { path, nodes } => {
                write!(f, "solid path {:?} of path {} does not follow G", nodes, path.0)
            }
            TangoViolation::Link { node, detail } => write!(f, "link at {}: {}", node, detail),
        }
    }
}

impl std::error::Error for TangoViolation {}

impl TangoTree {
    /// Checks every structural invariant of the composite.
    pub fn audit(&self) -> Result<(), TangoViolation> {
        let g = self.topology();
        let t = self.machine.tree();
        validate_search_tree(g, t).map_err(TangoViolation::InvalidTree)?;
        self.audit_partition()?;
        for (p, nodes) in self.paths() {
            if !is_steiner_closed(g, nodes).unwrap_or(false) {
                return Err(TangoViolation::NotSteinerClosed(p));
            }
            let expect = minor_tree(g, nodes).map_err(|e| TangoViolation::Minor {
                path: p,
                detail: e.to_string(),
            })?;
            let mut got = self.represented_edges(p);
            got.sort_unstable();
            if got != expect.edges {
                return Err(TangoViolation::Minor {
                    path: p,
                    detail: format!("stored edges {:?}, expected {:?}", got, expect.edges),
                });
            }
            for solid in self.solid_paths(p) {
                let along: Vec<VertexId> = g
                    .path_between(solid[0], *solid.last().unwrap())
                    .into_iter()
                    .filter(|x| self.path_of[x.index()] == p.0 .0)
                    .collect();
                if along != solid {
                    return Err(TangoViolation::SolidPath { path: p, nodes: solid });
                }
            }
        }
        for x in g.vertices() {
            let lp = self.lct.par[x.index()];
            let tp = t.parent(x);
            if lp != NONE {
                if tp != Some(VertexId(lp)) {
                    return Err(TangoViolation::Link {
                        node: x,
                        detail: format!("machine parent {:?}, link-cut parent {}", tp, lp),
                    });
                }
            } else if let Some(a) = tp {
                let top = self.path_of[x.index()];
                if !self.boundary[top as usize].contains(&a.0) {
                    return Err(TangoViolation::Link {
                        node: x,
                        detail: format!("fragment of path {} hangs below {}, not a neighbour", top, a),
                    });
                }
            }
        }
        Ok(())
    }

    fn audit_partition(&self) -> Result<(), TangoViolation> {
        let n = self.topology().n();
        let mut seen = vec![false; n];
        for (p, nodes) in self.paths() {
            let top = p.0;
            if let Some(parent) = self.reference.parent(top) {
                if self.pref[parent.index()] == top.0 {
                    return Err(TangoViolation::Partition(format!("top {} continues its parent's path", top)));
                }
            }
            for (i, &x) in nodes.iter().enumerate() {
                if std::mem::replace(&mut seen[x.index()], true) {
                    return Err(TangoViolation::Partition(format!("{} in two paths", x)));
                }
                if self.path_of[x.index()] != top.0 {
                    return Err(TangoViolation::Partition(format!("{} misfiled", x)));
                }
                let next = nodes.get(i + 1).map_or(NONE, |v| v.0);
                if self.pref[x.index()] != next {
                    return Err(TangoViolation::Partition(format!("preferred child of {} disagrees with its path", x)));
                }
                if next != NONE && self.reference.parent(VertexId(next)) != Some(x) {
                    return Err(TangoViolation::Partition(format!("{} does not follow {} in the reference tree", next, x)));
                }
            }
        }
        if let Some(lost) = seen.iter().position(|s| !s) {
            return Err(TangoViolation::Partition(format!("{} is on no path", lost)));
        }
        if !self.manual {
            for y in self.topology().vertices() {
                let want = self.tracker.effective(y).map_or(NONE, |c| c.0);
                if self.pref[y.index()] != want {
                    return Err(TangoViolation::Partition(format!("{} does not prefer its tracked child", y)));
                }
            }
        }
        Ok(())
    }

    /// In-order node lists of the splay trees of path `p`.
    pub fn solid_paths(&self, p: PathId) -> Vec<Vec<VertexId>> {
        let Some(nodes) = self.path(p) else { return Vec::new() };
        let mut out = Vec::new();
        for &r in nodes {
            if !self.is_splay_root(r) {
                continue;
            }
            let mut list = Vec::new();
            // (node, flipped, expanded)
            let mut stack = vec![(r.0, false, false)];
            while let Some((x, flip, expanded)) = stack.pop() {
                if expanded {
                    list.push(VertexId(x));
                    continue;
                }
                let f = flip ^ self.lct.rev[x as usize];
                let [l, rgt] = self.lct.ch[x as usize];
                let (first, second) = if f { (rgt, l) } else { (l, rgt) };
                if second != NONE {
                    stack.push((second, f, false));
                }
                stack.push((x, f, true));
                if first != NONE {
                    stack.push((first, f, false));
                }
            }
            out.push(list);
        }
        out
    }

    /// Edges of the tree represented by the link-cut forest of path `p`.
    pub fn represented_edges(&self, p: PathId) -> Vec<(VertexId, VertexId)> {
        let mut edges = Vec::new();
        let order = |a: VertexId, b: VertexId| if a < b { (a, b) } else { (b, a) };
        for solid in self.solid_paths(p) {
            for w in solid.windows(2) {
                edges.push(order(w[0], w[1]));
            }
            let root = self.splay_root_of(solid[0]);
            let up = self.lct.par[root.index()];
            if up != NONE {
                edges.push(order(solid[0], VertexId(up)));
            }
        }
        edges
    }

    fn splay_root_of(&self, mut x: VertexId) -> VertexId {
        while !self.is_splay_root(x) {
            x = VertexId(self.lct.par[x.index()]);
        }
        x
    }
}
