//! Deterministic generators for trees and access sequences.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::GstError;
use crate::search_tree::SearchTree;
use crate::topology::{Topology, VertexId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TreeShape {
    Path,
    Star,
    Caterpillar,
    Binary,
    Random,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeqKind {
    Uniform,
    Repeated,
    Sequential,
    Adversarial,
}

impl std::str::FromStr for TreeShape {
    type Err = GstError;
    fn from_str(s: &str) -> Result<Self, GstError> {
        Ok(match s {
            "path" => TreeShape::Path,
            "star" => TreeShape::Star,
            "caterpillar" => TreeShape::Caterpillar,
            "binary" => TreeShape::Binary,
            "random" => TreeShape::Random,
            _ => {
                return Err(GstError::UnknownName {
                    kind: "tree shape",
                    name: s.to_string(),
                })
            }
        })
    }
}

impl std::str::FromStr for SeqKind {
    type Err = GstError;
    fn from_str(s: &str) -> Result<Self, GstError> {
        Ok(match s {
            "uniform" => SeqKind::Uniform,
            "repeated" => SeqKind::Repeated,
            "sequential" => SeqKind::Sequential,
            "adversarial" => SeqKind::Adversarial,
            _ => {
                return Err(GstError::UnknownName {
                    kind: "sequence kind",
                    name: s.to_string(),
                })
            }
        })
    }
}

/// Parent of vertex `i >= 1` for each shape.
pub fn gen_tree(shape: TreeShape, n: usize, seed: u64) -> Result<Topology, GstError> {
    if n == 0 {
        return Err(GstError::EmptySet);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spine = n.div_ceil(2);
    let edges: Vec<(u32, u32)> = (1..n)
        .map(|i| {
            let p = match shape {
                TreeShape::Path => i - 1,
                TreeShape::Star => 0,
                TreeShape::Caterpillar if i < spine => i - 1,
                TreeShape::Caterpillar => (i - spine) % spine,
                TreeShape::Binary => (i - 1) / 2,
                TreeShape::Random => rng.gen_range(0..i),
            };
            (p as u32, i as u32)
        })
        .collect();
    Ok(Topology::from_edges(n, &edges)?)
}

pub fn gen_seq(kind: SeqKind, g: &Topology, m: usize, seed: u64) -> Vec<VertexId> {
    gen_seq_with_reference(kind, g, &crate::steiner::reference_tree(g), m, seed)
}

/// As [`gen_seq`], with the reference tree supplied (it drives `adversarial`).
pub fn gen_seq_with_reference(kind: SeqKind, g: &Topology, p: &SearchTree, m: usize, seed: u64) -> Vec<VertexId> {
    let n = g.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match kind {
        SeqKind::Uniform => (0..m).map(|_| VertexId(rng.gen_range(0..n as u32))).collect(),
        SeqKind::Repeated => vec![VertexId(rng.gen_range(0..n as u32)); m],
        SeqKind::Sequential => (0..m).map(|i| VertexId((i % n) as u32)).collect(),
        SeqKind::Adversarial => {
            // Descend the reference tree to a leaf, cycling through the
            // children of every node so siblings keep alternating.
            let mut turn: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n.max(1))).collect();
            (0..m)
                .map(|_| {
                    let mut x = p.root();
                    while !p.children(x).is_empty() {
                        let kids = p.children(x);
                        let c = kids[turn[x.index()] % kids.len()];
                        turn[x.index()] += 1;
                        x = c;
                    }
                    x
                })
                .collect()
        }
    }
}
