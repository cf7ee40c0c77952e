//! Ground truth for tiny inputs: enumeration of all search trees, exact
//! optimum cost by shortest paths over machine states, and a static baseline.

use std::collections::{HashMap, VecDeque};

use crate::error::GstError;
use crate::machine::{CostReport, GstMachine, TraceMode};
use crate::search_tree::SearchTree;
use crate::steiner::reference_tree;
use crate::topology::{Topology, VertexId, NONE};

/// Largest `n` for which [`enumerate_search_trees`] materialises the list.
pub const ENUMERATE_LIMIT: usize = 10;
/// Largest `n` accepted by the streaming [`for_each_search_tree`].
pub const VISIT_LIMIT: usize = 16;
/// Guards of [`exact_opt`].
pub const OPT_MAX_N: usize = 5;
pub const OPT_MAX_M: usize = 4;

fn guard(what: &'static str, limit: usize, got: usize) -> Result<(), GstError> {
    if got > limit {
        Err(GstError::GuardExceeded { what, limit, got })
    } else {
        Ok(())
    }
}

fn adjacency_masks(g: &Topology) -> Vec<u64> {
    g.vertices()
        .map(|v| g.neighbors(v).iter().fold(0u64, |m, w| m | 1 << w.0))
        .collect()
}

/// Splits `set` into its connected components.
fn components(adj: &[u64], mut set: u64, mut each: impl FnMut(u64)) {
    while set != 0 {
        let seed = set & set.wrapping_neg();
        let mut comp = seed;
        let mut frontier = seed;
        while frontier != 0 {
            let mut next = 0u64;
            let mut f = frontier;
            while f != 0 {
                let b = f.trailing_zeros();
                f &= f - 1;
                next |= adj[b as usize];
            }
            next &= set & !comp;
            comp |= next;
            frontier = next;
        }
        set &= !comp;
        each(comp);
    }
}

fn visit_rec(adj: &[u64], pending: &mut Vec<(u64, u32)>, parents: &mut [u32], visit: &mut dyn FnMut(&[u32])) {
    let Some((mask, parent)) = pending.pop() else {
        visit(parents);
        return;
    };
    let mut roots = mask;
    while roots != 0 {
        let r = roots.trailing_zeros();
        roots &= roots - 1;
        parents[r as usize] = parent;
        let before = pending.len();
        components(adj, mask & !(1 << r), |c| pending.push((c, r)));
        visit_rec(adj, pending, parents, visit);
        pending.truncate(before);
    }
    pending.push((mask, parent));
}

/// Calls `visit` with the parent array (`u32::MAX` at the root) of every
/// valid search tree on `g`.
pub fn for_each_search_tree(g: &Topology, mut visit: impl FnMut(&[u32])) -> Result<(), GstError> {
    guard("vertices for search-tree enumeration", VISIT_LIMIT, g.n())?;
    let adj = adjacency_masks(g);
    let all = if g.n() == 64 { u64::MAX } else { (1u64 << g.n()) - 1 };
    let mut parents = vec![NONE; g.n()];
    visit_rec(&adj, &mut vec![(all, NONE)], &mut parents, &mut visit);
    Ok(())
}

fn to_tree(parents: &[u32]) -> SearchTree {
    let p: Vec<Option<VertexId>> = parents
        .iter()
        .map(|&x| (x != NONE).then_some(VertexId(x)))
        .collect();
    SearchTree::from_parents(&p).expect("enumerated parent array is a tree")
}

/// Every valid search tree on `g`.
pub fn enumerate_search_trees(g: &Topology) -> Result<Vec<SearchTree>, GstError> {
    guard("vertices for search-tree enumeration", ENUMERATE_LIMIT, g.n())?;
    let mut out = Vec::new();
    for_each_search_tree(g, |p| out.push(to_tree(p)))?;
    Ok(out)
}

/// `count(S) = sum over roots r of the product of count(C)` over the
/// components `C` of `S \ r`, memoised on vertex masks.
pub fn count_search_trees(g: &Topology) -> Result<u128, GstError> {
    guard("vertices for search-tree counting", 24, g.n())?;
    fn count(adj: &[u64], mask: u64, memo: &mut HashMap<u64, u128>) -> u128 {
        if mask & (mask - 1) == 0 {
            return 1;
        }
        if let Some(&c) = memo.get(&mask) {
            return c;
        }
        let mut total = 0u128;
        let mut roots = mask;
        while roots != 0 {
            let r = roots.trailing_zeros();
            roots &= roots - 1;
            let mut comps = Vec::new();
            components(adj, mask & !(1 << r), |c| comps.push(c));
            total += comps.into_iter().map(|c| count(adj, c, memo)).product::<u128>();
        }
        memo.insert(mask, total);
        total
    }
    let adj = adjacency_masks(g);
    Ok(count(&adj, (1u64 << g.n()) - 1, &mut HashMap::new()))
}

/// Injective encoding of a machine state: the tree's parent array, the
/// finger, and the search progress (`2 * search index + touched`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateKey(u64);

impl StateKey {
    pub fn new(parents: &[u32], finger: VertexId, progress: u32, n: usize) -> Self {
        let base = n as u64 + 1;
        let mut code = 0u64;
        for &p in parents {
            code = code * base + if p == NONE { 0 } else { p as u64 + 1 };
        }
        StateKey(((code * n as u64) + finger.0 as u64) << 8 | progress as u64)
    }

    pub fn decode(self, n: usize) -> (Vec<u32>, VertexId, u32) {
        let progress = (self.0 & 0xff) as u32;
        let rest = self.0 >> 8;
        let finger = VertexId((rest % n as u64) as u32);
        let mut code = rest / n as u64;
        let base = n as u64 + 1;
        let mut parents = vec![NONE; n];
        for slot in parents.iter_mut().rev() {
            let d = code % base;
            code /= base;
            *slot = if d == 0 { NONE } else { d as u32 - 1 };
        }
        (parents, finger, progress)
    }

    pub fn raw(self) -> u64 {
        self.0
    }
}

#[derive(Clone, Debug, Default)]
pub struct OptOptions {
    /// Returning the finger to the root between searches is paid: a session
    /// may only end with the finger back at the root.
    pub paid_reset: bool,
    /// Start from this tree instead of minimising over all initial trees.
    pub initial: Option<SearchTree>,
}

/// Minimum total cost of serving `x` from any initial tree.
pub fn exact_opt(g: &Topology, x: &[VertexId]) -> Result<u64, GstError> {
    exact_opt_with(g, x, &OptOptions::default())
}

pub fn exact_opt_with(g: &Topology, x: &[VertexId], opts: &OptOptions) -> Result<u64, GstError> {
    let n = g.n();
    guard("vertices for exact OPT", OPT_MAX_N, n)?;
    guard("sequence length for exact OPT", OPT_MAX_M, x.len())?;
    if let Some(&bad) = x.iter().find(|v| !g.contains(**v)) {
        return Err(GstError::UnknownVertex(bad));
    }
    let m = x.len();
    if m == 0 {
        return Ok(0);
    }
    let initial = match &opts.initial {
        Some(t) => {
            crate::search_tree::validate_search_tree(g, t).map_err(GstError::InvalidTree)?;
            vec![t.clone()]
        }
        None => enumerate_search_trees(g)?,
    };
    let raw_parents = |t: &SearchTree| -> Vec<u32> { t.parents().iter().map(|p| p.map_or(NONE, |v| v.0)).collect() };

    let mut dist: HashMap<StateKey, u64> = HashMap::new();
    let mut queue: VecDeque<StateKey> = VecDeque::new();
    for t in &initial {
        let root = t.root();
        let key = StateKey::new(&raw_parents(t), root, u32::from(root == x[0]), n);
        if dist.insert(key, 0).is_none() {
            queue.push_back(key);
        }
    }
    let push = |dist: &mut HashMap<StateKey, u64>, queue: &mut VecDeque<StateKey>, key: StateKey, d: u64, free: bool| {
        if dist.get(&key).map_or(true, |&old| d < old) {
            dist.insert(key, d);
            if free {
                queue.push_front(key);
            } else {
                queue.push_back(key);
            }
        }
    };
    while let Some(key) = queue.pop_front() {
        let d = dist[&key];
        let (parents, finger, progress) = key.decode(n);
        let (j, touched) = ((progress / 2) as usize, progress % 2 == 1);
        if j == m {
            return Ok(d);
        }
        let tree = to_tree(&parents);
        if touched && (!opts.paid_reset || tree.is_root(finger)) {
            let next = if j + 1 == m {
                StateKey::new(&parents, finger, 2 * m as u32, n)
            } else {
                let root = tree.root();
                let progress = 2 * (j as u32 + 1) + u32::from(root == x[j + 1]);
                StateKey::new(&parents, root, progress, n)
            };
            push(&mut dist, &mut queue, next, d, true);
        }
        let step = |f: VertexId| 2 * j as u32 + u32::from(touched || f == x[j]);
        if let Some(p) = tree.parent(finger) {
            push(&mut dist, &mut queue, StateKey::new(&parents, p, step(p), n), d + 1, false);
            let mut rotated = tree.clone();
            rotated.rotate_in_place(g, finger)?;
            let rp = raw_parents(&rotated);
            push(&mut dist, &mut queue, StateKey::new(&rp, finger, step(finger), n), d + 1, false);
        }
        for &c in tree.children(finger) {
            push(&mut dist, &mut queue, StateKey::new(&parents, c, step(c), n), d + 1, false);
        }
    }
    unreachable!("every sequence can be served")
}

/// Serves `x` by walking down a fixed reference tree, never rotating.
pub fn static_baseline(g: &Topology, x: &[VertexId]) -> Result<CostReport, GstError> {
    static_baseline_on(g, &reference_tree(g), x)
}

pub fn static_baseline_on(g: &Topology, p: &SearchTree, x: &[VertexId]) -> Result<CostReport, GstError> {
    let mut m = GstMachine::new(g.clone(), p.clone())?.with_trace_mode(TraceMode::CountOnly);
    for &v in x {
        m.static_search(v)?;
    }
    Ok(m.cost_report())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search_tree::validate_search_tree;

    fn path_graph(n: usize) -> Topology {
        let edges: Vec<(u32, u32)> = (1..n as u32).map(|i| (i - 1, i)).collect();
        Topology::from_edges(n, &edges).unwrap()
    }

    fn star(n: usize) -> Topology {
        let edges: Vec<(u32, u32)> = (1..n as u32).map(|i| (0, i)).collect();
        Topology::from_edges(n, &edges).unwrap()
    }

    /// All parent arrays on `n` nodes that form a rooted tree.
    fn all_rooted_trees(n: usize) -> Vec<SearchTree> {
        let mut out = Vec::new();
        let total = (n + 1).pow(n as u32);
        for code in 0..total {
            let mut c = code;
            let mut parents = vec![None; n];
            for slot in parents.iter_mut() {
                let d = c % (n + 1);
                c /= n + 1;
                *slot = (d > 0).then(|| VertexId(d as u32 - 1));
            }
            if let Ok(t) = SearchTree::from_parents(&parents) {
                out.push(t);
            }
        }
        out
    }

    #[test]
    fn counts_on_small_shapes() {
        assert_eq!(enumerate_search_trees(&path_graph(3)).unwrap().len(), 5);
        assert_eq!(enumerate_search_trees(&Topology::parse("1\n").unwrap()).unwrap().len(), 1);
        // Center-rooted: 1. Leaf-rooted: the rest is a 3-vertex path (5 trees).
        assert_eq!(enumerate_search_trees(&star(4)).unwrap().len(), 16);
        assert_eq!(count_search_trees(&star(4)).unwrap(), 16);
    }

    #[test]
    fn enumeration_matches_brute_force_filter() {
        for g in [path_graph(4), star(4), Topology::parse("4\n0 1\n1 2\n1 3\n").unwrap()] {
            let mut brute: Vec<SearchTree> = all_rooted_trees(g.n())
                .into_iter()
                .filter(|t| validate_search_tree(&g, t).is_ok())
                .collect();
            let mut fast = enumerate_search_trees(&g).unwrap();
            let key = |t: &SearchTree| t.to_text();
            brute.sort_by_key(key);
            fast.sort_by_key(key);
            assert_eq!(fast, brute);
        }
    }

    #[test]
    fn enumeration_guard() {
        assert!(matches!(enumerate_search_trees(&path_graph(11)), Err(GstError::GuardExceeded { .. })));
    }

    #[test]
    fn state_key_round_trip() {
        let parents = [NONE, 0, 1, 1, 0];
        let k = StateKey::new(&parents, VertexId(3), 7, 5);
        assert_eq!(k.decode(5), (parents.to_vec(), VertexId(3), 7));
    }

    #[test]
    fn opt_small_cases() {
        let g = path_graph(3);
        for v in g.vertices() {
            assert_eq!(exact_opt(&g, &[v]).unwrap(), 0);
        }
        assert_eq!(exact_opt(&path_graph(2), &[VertexId(0), VertexId(1)]).unwrap(), 1);
        let aca = [VertexId(0), VertexId(2), VertexId(0)];
        let opt = exact_opt(&g, &aca).unwrap();
        // Root a with child c serves c in one move and a for free.
        assert_eq!(opt, 1);
        assert!(exact_opt(&path_graph(6), &[VertexId(0)]).is_err());
        assert!(exact_opt(&g, &[VertexId(0); 5]).is_err());
    }

    #[test]
    fn opt_prefix_monotone_and_paid_reset() {
        let g = star(4);
        let x = [VertexId(1), VertexId(2), VertexId(3), VertexId(1)];
        let mut prev = 0;
        for k in 1..=4 {
            let o = exact_opt(&g, &x[..k]).unwrap();
            assert!(o >= prev);
            let paid = exact_opt_with(&g, &x[..k], &OptOptions { paid_reset: true, initial: None }).unwrap();
            assert!(paid >= o);
            prev = o;
        }
    }

    #[test]
    fn fixed_initial_tree_costs_at_least_free_choice() {
        let g = path_graph(4);
        let t = enumerate_search_trees(&g).unwrap().pop().unwrap();
        let x = [VertexId(3), VertexId(0)];
        let fixed = exact_opt_with(&g, &x, &OptOptions { paid_reset: false, initial: Some(t) }).unwrap();
        assert!(fixed >= exact_opt(&g, &x).unwrap());
    }

    #[test]
    fn static_baseline_examples() {
        let g = star(6);
        let x: Vec<VertexId> = (0..6).map(VertexId).collect();
        let r = static_baseline(&g, &x).unwrap();
        assert!(r.per_search_cost.iter().all(|&c| c <= 1));
        assert_eq!(r.per_search_cost[0], 0);
        let pg = path_graph(40);
        let seq: Vec<VertexId> = (0..200).map(|i| VertexId((i * 7 % 40) as u32)).collect();
        let total = static_baseline(&pg, &seq).unwrap().total_cost;
        assert!(total as f64 <= 200.0 * (2.0 * 40f64.log2() + 2.0));
    }
}
