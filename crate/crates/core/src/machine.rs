//! Unit-cost execution of programs on a search tree: one finger, moves to a
//! parent or child, and rotations at the finger, grouped into search sessions.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{GstError, MachineError};
use crate::search_tree::{validate_search_tree, SearchTree};
use crate::topology::{Topology, VertexId};

/// Full validation after every op is only done up to this size.
pub const DEBUG_VALIDATE_LIMIT: usize = 512;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum UnitOp {
    MoveToParent,
    MoveToChild(VertexId),
    RotateHere,
}

/// One line of a trace.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TraceEvent {
    Begin(VertexId),
    /// A session with no target, used for standalone path maintenance.
    BeginMaintenance,
    Op(UnitOp),
    End,
}

/// Whether the machine records the ops it executes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum TraceMode {
    #[default]
    Full,
    /// Only costs are kept; for long benchmark runs.
    CountOnly,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostReport {
    #[serde(rename = "per_search")]
    pub per_search_cost: Vec<u64>,
    #[serde(rename = "total")]
    pub total_cost: u64,
}

impl CostReport {
    pub fn from_costs(per_search_cost: Vec<u64>) -> Self {
        let total_cost = per_search_cost.iter().sum();
        CostReport {
            per_search_cost,
            total_cost,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain data")
    }
}

#[derive(Clone, Copy, Debug)]
struct Session {
    target: Option<VertexId>,
    touched: bool,
    start_cost: u64,
}

#[derive(Clone, Debug)]
pub struct GstMachine {
    topology: Topology,
    tree: SearchTree,
    finger: VertexId,
    total_cost: u64,
    mode: TraceMode,
    trace: Vec<TraceEvent>,
    per_search: Vec<u64>,
    session: Option<Session>,
    debug_validate: bool,
    // Scratch marks for finger walks.
    mark: Vec<u32>,
    epoch: u32,
}

impl GstMachine {
    pub fn new(g: Topology, t0: SearchTree) -> Result<Self, GstError> {
        validate_search_tree(&g, &t0).map_err(GstError::InvalidTree)?;
        let n = g.n();
        Ok(GstMachine {
            finger: t0.root(),
            topology: g,
            tree: t0,
            total_cost: 0,
            mode: TraceMode::Full,
            trace: Vec::new(),
            per_search: Vec::new(),
            session: None,
            debug_validate: false,
            mark: vec![0; n],
            epoch: 0,
        })
    }

    pub fn with_trace_mode(mut self, mode: TraceMode) -> Self {
        self.mode = mode;
        self
    }

    /// Validate the whole tree after every op (only honoured for small n).
    pub fn set_debug_validate(&mut self, on: bool) {
        self.debug_validate = on && self.topology.n() <= DEBUG_VALIDATE_LIMIT;
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn tree(&self) -> &SearchTree {
        &self.tree
    }

    pub fn finger(&self) -> VertexId {
        self.finger
    }

    pub fn total_cost(&self) -> u64 {
        self.total_cost
    }

    pub fn trace(&self) -> &[TraceEvent] {
        &self.trace
    }

    pub fn trace_mode(&self) -> TraceMode {
        self.mode
    }

    pub fn in_session(&self) -> bool {
        self.session.is_some()
    }

    pub fn cost_report(&self) -> CostReport {
        CostReport::from_costs(self.per_search.clone())
    }

    fn record(&mut self, e: TraceEvent) {
        if self.mode == TraceMode::Full {
            self.trace.push(e);
        }
    }

    pub fn begin_search(&mut self, target: VertexId) -> Result<(), MachineError> {
        if !self.topology.contains(target) {
            return Err(MachineError::UnknownVertex(target));
        }
        self.open(Some(target))?;
        self.record(TraceEvent::Begin(target));
        Ok(())
    }

    /// Opens a session without a target; its ops are still charged.
    pub fn begin_maintenance(&mut self) -> Result<(), MachineError> {
        self.open(None)?;
        self.record(TraceEvent::BeginMaintenance);
        Ok(())
    }

    fn open(&mut self, target: Option<VertexId>) -> Result<(), MachineError> {
        if let Some(s) = self.session {
            return Err(MachineError::SessionOpen(s.target.unwrap_or(self.finger)));
        }
        self.finger = self.tree.root();
        self.session = Some(Session {
            target,
            touched: target.map_or(true, |t| t == self.finger),
            start_cost: self.total_cost,
        });
        Ok(())
    }

    /// Closes the session and returns its cost.
    pub fn end_search(&mut self) -> Result<u64, MachineError> {
        let s = self.session.ok_or(MachineError::NoSession)?;
        if !s.touched {
            return Err(MachineError::TargetNotTouched(s.target.expect("maintenance sessions are touched")));
        }
        self.session = None;
        let cost = self.total_cost - s.start_cost;
        self.per_search.push(cost);
        self.record(TraceEvent::End);
        Ok(cost)
    }

    pub fn apply(&mut self, op: UnitOp) -> Result<(), MachineError> {
        let Some(session) = self.session.as_mut() else {
            return Err(MachineError::NoSession);
        };
        let f = self.finger;
        match op {
            UnitOp::MoveToParent => {
                self.finger = self.tree.parent(f).ok_or(MachineError::ParentOfRoot(f))?;
            }
            UnitOp::MoveToChild(c) => {
                if !self.topology.contains(c) || self.tree.children(f).binary_search(&c).is_err() {
                    return Err(MachineError::NotAChild { finger: f, child: c });
                }
                self.finger = c;
            }
            UnitOp::RotateHere => {
                if self.tree.is_root(f) {
                    return Err(MachineError::RotateRoot(f));
                }
                self.tree
                    .rotate_in_place(&self.topology, f)
                    .expect("non-root rotation succeeds");
            }
        }
        if session.target == Some(self.finger) {
            session.touched = true;
        }
        self.total_cost += 1;
        self.record(TraceEvent::Op(op));
        if self.debug_validate {
            if let Err(v) = validate_search_tree(&self.topology, &self.tree) {
                panic!("tree invalid after {:?}: {}", op, v);
            }
        }
        Ok(())
    }

    /// Walks the finger to `z` along the tree path, paying one unit per edge.
    /// Bookkeeping is proportional to the length of the walk.
    pub fn walk_to(&mut self, z: VertexId) -> Result<(), MachineError> {
        let f = self.finger;
        if f == z {
            return Ok(());
        }
        // Climb from both ends alternately, marking, until the paths meet.
        self.epoch = self.epoch.wrapping_add(2);
        if self.epoch < 2 {
            self.mark.iter_mut().for_each(|m| *m = 0);
            self.epoch = 2;
        }
        let (ef, ez) = (self.epoch, self.epoch + 1);
        let (mut a, mut b) = (Some(f), Some(z));
        self.mark[f.index()] = ef;
        self.mark[z.index()] = ez;
        let meet = loop {
            if let Some(x) = a {
                if self.mark[x.index()] == ez {
                    break x;
                }
                self.mark[x.index()] = ef;
                a = self.tree.parent(x);
            }
            if let Some(y) = b {
                if self.mark[y.index()] == ef {
                    break y;
                }
                self.mark[y.index()] = ez;
                b = self.tree.parent(y);
            }
            if a.is_none() && b.is_none() {
                unreachable!("tree nodes share the root");
            }
        };
        while self.finger != meet {
            self.apply(UnitOp::MoveToParent)?;
        }
        let mut down = Vec::new();
        let mut y = z;
        while y != meet {
            down.push(y);
            y = self.tree.parent(y).expect("meet is an ancestor");
        }
        for &c in down.iter().rev() {
            self.apply(UnitOp::MoveToChild(c))?;
        }
        Ok(())
    }

    /// Moves the finger to `x` and rotates there.
    pub fn rotate_at(&mut self, x: VertexId) -> Result<(), MachineError> {
        self.walk_to(x)?;
        self.apply(UnitOp::RotateHere)
    }

    /// Test hook: changes a parent link without paying or checking anything.
    #[doc(hidden)]
    pub fn corrupt_parent(&mut self, child: VertexId, new_parent: VertexId) {
        self.tree.relink_unchecked(child, new_parent);
    }

    /// Runs the trivial static strategy for one search: walk down from the
    /// root to `target` without rotating.
    pub fn static_search(&mut self, target: VertexId) -> Result<u64, MachineError> {
        self.begin_search(target)?;
        while self.finger != target {
            let c = self
                .tree
                .child_towards(&self.topology, self.finger, target)
                .expect("target lies below the finger");
            self.apply(UnitOp::MoveToChild(c))?;
        }
        self.end_search()
    }
}

/// Renders trace events in the line format `S v`, `M`, `P`, `C v`, `R`, `E`.
pub fn format_trace(events: &[TraceEvent]) -> String {
    let mut out = String::new();
    for e in events {
        let _ = match e {
            TraceEvent::Begin(v) => writeln!(out, "S {}", v),
            TraceEvent::BeginMaintenance => writeln!(out, "M"),
            TraceEvent::Op(UnitOp::MoveToParent) => writeln!(out, "P"),
            TraceEvent::Op(UnitOp::MoveToChild(c)) => writeln!(out, "C {}", c),
            TraceEvent::Op(UnitOp::RotateHere) => writeln!(out, "R"),
            TraceEvent::End => writeln!(out, "E"),
        };
    }
    out
}

pub fn parse_trace(text: &str) -> Result<Vec<TraceEvent>, crate::ParseError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let l = raw.trim();
        if l.is_empty() {
            continue;
        }
        let bad = || crate::ParseError::BadLine {
            line: i + 1,
            content: l.to_string(),
        };
        let mut it = l.split_whitespace();
        let head = it.next().ok_or_else(bad)?;
        let arg = it.next().map(|a| a.parse::<u32>().map_err(|_| bad())).transpose()?;
        if it.next().is_some() {
            return Err(bad());
        }
        let e = match (head, arg) {
            ("S", Some(v)) => TraceEvent::Begin(VertexId(v)),
            ("M", None) => TraceEvent::BeginMaintenance,
            ("P", None) => TraceEvent::Op(UnitOp::MoveToParent),
            ("C", Some(v)) => TraceEvent::Op(UnitOp::MoveToChild(VertexId(v))),
            ("R", None) => TraceEvent::Op(UnitOp::RotateHere),
            ("E", None) => TraceEvent::End,
            _ => return Err(bad()),
        };
        out.push(e);
    }
    Ok(out)
}

/// Re-executes a trace from `t0`. Errors carry the index of the failing event.
pub fn replay_events(g: &Topology, t0: &SearchTree, events: &[TraceEvent]) -> Result<GstMachine, GstError> {
    let mut m = GstMachine::new(g.clone(), t0.clone())?;
    for (index, e) in events.iter().enumerate() {
        let r = match *e {
            TraceEvent::Begin(v) => m.begin_search(v),
            TraceEvent::BeginMaintenance => m.begin_maintenance(),
            TraceEvent::Op(op) => m.apply(op),
            TraceEvent::End => m.end_search().map(|_| ()),
        };
        r.map_err(|source| GstError::Replay { index, source })?;
    }
    Ok(m)
}

/// Parses and replays a trace document.
pub fn replay(g: &Topology, t0: &SearchTree, trace: &str) -> Result<CostReport, GstError> {
    let events = parse_trace(trace)?;
    Ok(replay_events(g, t0, &events)?.cost_report())
}
