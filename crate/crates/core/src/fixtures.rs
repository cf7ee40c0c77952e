//! The 12-vertex example tree and the search trees drawn on it, with the
//! letters `a..l` encoded as `0..11`.

use crate::search_tree::SearchTree;
use crate::topology::{Topology, VertexId};

/// Vertex id of a letter `a..l`.
pub fn v(letter: char) -> VertexId {
    assert!(('a'..='l').contains(&letter), "fixture letter {letter:?}");
    VertexId(letter as u32 - 'a' as u32)
}

/// Letter of a vertex id `0..11`.
pub fn letter(x: VertexId) -> char {
    char::from(b'a' + x.0 as u8)
}

fn vs(letters: &str) -> Vec<VertexId> {
    letters.chars().map(v).collect()
}

/// The example tree `G`.
pub fn example_tree() -> Topology {
    let edges: Vec<(u32, u32)> = ["ac", "cb", "cd", "dg", "gf", "fe", "fh", "di", "ij", "jk", "jl"]
        .iter()
        .map(|e| {
            let e = vs(e);
            (e[0].0, e[1].0)
        })
        .collect();
    Topology::from_edges(12, &edges).expect("fixture tree")
}

fn tree(root: char, links: &[(char, &str)]) -> SearchTree {
    let mut pairs = Vec::new();
    for &(p, kids) in links {
        for c in kids.chars() {
            pairs.push((v(p), v(c)));
        }
    }
    SearchTree::from_links(12, v(root), &pairs).expect("fixture search tree")
}

/// Search tree rooted at `c` with the long spine `c f i k l j`.
pub fn figure_search_tree() -> SearchTree {
    tree('c', &[('c', "abf"), ('f', "ehi"), ('i', "dk"), ('d', "g"), ('k', "l"), ('l', "j")])
}

/// [`figure_search_tree`] after rotating `i` above `f`.
pub fn figure_rotated_tree() -> SearchTree {
    tree('c', &[('c', "abi"), ('i', "fk"), ('f', "ehd"), ('d', "g"), ('k', "l"), ('l', "j")])
}

/// Centroid decomposition of [`example_tree`].
pub fn centroid_figure_tree() -> SearchTree {
    tree('d', &[('d', "cfj"), ('c', "ab"), ('f', "egh"), ('j', "ikl")])
}

/// Steiner-closed tree obtained from [`figure_search_tree`].
pub fn steiner_figure_tree() -> SearchTree {
    tree('c', &[('c', "abf"), ('f', "ehd"), ('d', "gi"), ('i', "k"), ('k', "j"), ('j', "l")])
}

/// A vertex set given as letters.
pub fn set(letters: &str) -> Vec<VertexId> {
    vs(letters)
}
