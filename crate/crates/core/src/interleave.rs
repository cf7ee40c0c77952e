//! Preferred children on a fixed reference tree and the interleave bound.

use serde::{Deserialize, Serialize};

use crate::error::GstError;
use crate::search_tree::{validate_search_tree, SearchTree};
use crate::topology::{Topology, VertexId, NONE};

/// Preferred-child state over a reference tree `P`.
#[derive(Clone, Debug)]
pub struct PreferredState {
    reference: SearchTree,
    preferred: Vec<u32>,
}

/// What one access changed.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AccessChanges {
    /// Nodes whose preferred child moved from one defined child to another.
    pub changed: Vec<VertexId>,
    /// Nodes whose preferred child became defined for the first time.
    pub first_defined: Vec<VertexId>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InterleaveResult {
    pub total: u64,
    /// Change count of every node of `P`, indexed by vertex id.
    pub per_node: Vec<u64>,
    pub first_definitions: u64,
    pub lower_bound: i64,
}

impl InterleaveResult {
    fn new(per_node: Vec<u64>, first_definitions: u64) -> Self {
        let total: u64 = per_node.iter().sum();
        let lower_bound = (total / 2) as i64 - per_node.len() as i64;
        InterleaveResult {
            total,
            per_node,
            first_definitions,
            lower_bound,
        }
    }
}

impl PreferredState {
    pub fn new(g: &Topology, p: SearchTree) -> Result<Self, GstError> {
        validate_search_tree(g, &p).map_err(GstError::InvalidTree)?;
        Ok(Self::new_unchecked(p))
    }

    /// As [`new`](Self::new) for a reference tree already known to be valid.
    pub fn new_unchecked(p: SearchTree) -> Self {
        let n = p.n();
        PreferredState {
            reference: p,
            preferred: vec![NONE; n],
        }
    }

    pub fn reference(&self) -> &SearchTree {
        &self.reference
    }

    /// The preferred child of `y`, if defined.
    pub fn preferred(&self, y: VertexId) -> Option<VertexId> {
        match self.preferred[y.index()] {
            NONE => None,
            c => Some(VertexId(c)),
        }
    }

    /// The preferred child if defined, otherwise the smallest child.
    pub fn effective(&self, y: VertexId) -> Option<VertexId> {
        self.preferred(y)
            .or_else(|| self.reference.children(y).first().copied())
    }

    pub fn record_access(&mut self, x: VertexId) -> AccessChanges {
        let mut out = AccessChanges::default();
        let mut set = |y: VertexId, c: VertexId, out: &mut AccessChanges| {
            let slot = &mut self.preferred[y.index()];
            if *slot == NONE {
                out.first_defined.push(y);
            } else if *slot != c.0 {
                out.changed.push(y);
            }
            *slot = c.0;
        };
        if let Some(&first) = self.reference.children(x).first() {
            set(x, first, &mut out);
        }
        let mut below = x;
        while let Some(y) = self.reference.parent(below) {
            set(y, below, &mut out);
            below = y;
        }
        out
    }
}

/// `I(G, P, X)`, the first-definition count and `floor(I / 2) - n`.
pub fn interleave_bound(g: &Topology, p: &SearchTree, x: &[VertexId]) -> Result<InterleaveResult, GstError> {
    if let Some(&bad) = x.iter().find(|v| !g.contains(**v)) {
        return Err(GstError::UnknownVertex(bad));
    }
    let mut state = PreferredState::new(g, p.clone())?;
    let mut per_node = vec![0u64; p.n()];
    let mut first = 0u64;
    for &v in x {
        let ch = state.record_access(v);
        for y in ch.changed {
            per_node[y.index()] += 1;
        }
        first += ch.first_defined.len() as u64;
    }
    Ok(InterleaveResult::new(per_node, first))
}

/// Preferred children recomputed from the whole access history: for each
/// node, the child towards the latest access inside its subtree.
pub fn preferred_from_history(p: &SearchTree, history: &[VertexId]) -> Vec<Option<VertexId>> {
    let n = p.n();
    let mut out = vec![None; n];
    for y in (0..n as u32).map(VertexId) {
        let last = history.iter().rev().find(|&&x| p.is_ancestor(y, x));
        out[y.index()] = match last {
            None => None,
            Some(&x) if x == y => p.children(y).first().copied(),
            Some(&x) => p.ancestors(x).find(|&a| p.parent(a) == Some(y)),
        };
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{centroid_figure_tree, example_tree, v};

    fn path3() -> (Topology, SearchTree) {
        let g = Topology::parse("3\n0 1\n1 2\n").unwrap();
        let p = SearchTree::from_parents(&[Some(VertexId(1)), None, Some(VertexId(1))]).unwrap();
        (g, p)
    }

    #[test]
    fn fresh_state_is_undefined() {
        let s = PreferredState::new(&example_tree(), centroid_figure_tree()).unwrap();
        assert!((0..12).all(|i| s.preferred(VertexId(i)).is_none()));
        let g1 = Topology::parse("1\n").unwrap();
        let s1 = PreferredState::new(&g1, SearchTree::from_parents(&[None]).unwrap()).unwrap();
        assert_eq!(s1.preferred(VertexId(0)), None);
    }

    #[test]
    fn alternating_leaves_on_path() {
        let (g, p) = path3();
        let mut s = PreferredState::new(&g, p.clone()).unwrap();
        let b = VertexId(1);
        let a1 = s.record_access(VertexId(0));
        assert_eq!(a1.first_defined, vec![b]);
        assert!(a1.changed.is_empty());
        assert_eq!(s.record_access(VertexId(2)).changed, vec![b]);
        assert_eq!(s.record_access(VertexId(0)).changed, vec![b]);
        let r = interleave_bound(&g, &p, &[VertexId(0), VertexId(2), VertexId(0)]).unwrap();
        assert_eq!(r.total, 2);
        assert_eq!(r.lower_bound, -2);
        assert_eq!(r.first_definitions, 1);
    }

    #[test]
    fn repeated_access_is_quiet() {
        let g = example_tree();
        let p = centroid_figure_tree();
        let mut s = PreferredState::new(&g, p).unwrap();
        s.record_access(v('a'));
        assert_eq!(s.record_access(v('a')), AccessChanges::default());
    }

    #[test]
    fn root_access_prefers_first_child() {
        let g = example_tree();
        let mut s = PreferredState::new(&g, centroid_figure_tree()).unwrap();
        s.record_access(v('j'));
        s.record_access(v('d'));
        assert_eq!(s.preferred(v('d')), Some(v('c')));
    }

    #[test]
    fn trivial_sequences() {
        let g = example_tree();
        let p = centroid_figure_tree();
        assert_eq!(interleave_bound(&g, &p, &[v('k')]).unwrap().total, 0);
        assert_eq!(interleave_bound(&g, &p, &[v('k'); 7]).unwrap().total, 0);
        assert!(interleave_bound(&g, &p, &[VertexId(12)]).is_err());
    }

    #[test]
    fn matches_history_recomputation() {
        let g = example_tree();
        let p = centroid_figure_tree();
        let mut s = PreferredState::new(&g, p.clone()).unwrap();
        let seq: Vec<VertexId> = "abjlkdgfeihcdaljd".chars().map(v).collect();
        for i in 0..seq.len() {
            s.record_access(seq[i]);
            let expect = preferred_from_history(&p, &seq[..=i]);
            let got: Vec<_> = (0..12).map(|y| s.preferred(VertexId(y))).collect();
            assert_eq!(got, expect, "after {} accesses", i + 1);
        }
    }
}
