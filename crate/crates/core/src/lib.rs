//! Search trees on trees under the rotation-based cost model.
//!
//! The crate is organised bottom-up:
//!
//! * [`topology`] holds the fixed unrooted tree `G`;
//! * [`search_tree`] holds rooted search trees on `G` and the rotation;
//! * [`machine`] executes unit-cost programs (finger moves and rotations);
//! * [`interleave`] tracks preferred children and the interleave lower bound;
//! * [`steiner`] builds Steiner-closed reference trees and minor trees;
//! * [`tango`] is the online structure;
//! * [`oracle`] enumerates search trees and computes exact optima on tiny inputs;
//! * [`gen`], [`run`] and [`verify`] drive experiments.

pub mod error;
pub mod fixtures;
pub mod gen;
pub mod interleave;
pub mod machine;
pub mod oracle;
pub mod run;
pub mod search_tree;
pub mod steiner;
pub mod tango;
pub mod topology;
pub mod verify;

pub use error::{GstError, MachineError, ParseError};
pub use interleave::{interleave_bound, AccessChanges, InterleaveResult, PreferredState};
pub use machine::{CostReport, GstMachine, TraceEvent, TraceMode, UnitOp};
pub use search_tree::{height, rotate, validate_search_tree, SearchTree, Violation, ViolationKind};
pub use steiner::{
    centroid_decomposition, is_steiner_closed, is_steiner_closed_tree, minor_tree, reference_tree,
    split_components, steinerify, MinorTree, SteinerSet,
};
pub use tango::{PathId, SearchStats, TangoTree};
pub use topology::{Topology, VertexId};

/// `1 + ceil(log2 log2 max(n, 4))`, the per-path factor in the cost bounds.
pub fn loglog_factor(n: usize) -> u64 {
    let n = n.max(4) as f64;
    1 + n.log2().log2().ceil() as u64
}
