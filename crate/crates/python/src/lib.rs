//! Python module `gst_trees`.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use gst_core::gen::{gen_seq_with_reference, gen_tree, SeqKind, TreeShape};
use gst_core::oracle::{exact_opt, static_baseline};
use gst_core::run::{run_on, Algorithm};
use gst_core::tango::TangoOptions;
use gst_core::{GstError, TraceMode, VertexId};

fn err(e: GstError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn ids(xs: &[u32]) -> Vec<VertexId> {
    xs.iter().copied().map(VertexId).collect()
}

fn raw(xs: &[VertexId]) -> Vec<u32> {
    xs.iter().map(|v| v.0).collect()
}

#[pyclass(frozen)]
#[derive(Clone)]
struct Topology(gst_core::Topology);

#[pymethods]
impl Topology {
    /// Parses the edge-list format: `n`, then one `u v` line per edge.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        gst_core::Topology::parse(text)
            .map(Topology)
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }

    #[staticmethod]
    fn from_edges(n: usize, edges: Vec<(u32, u32)>) -> PyResult<Self> {
        gst_core::Topology::from_edges(n, &edges)
            .map(Topology)
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }

    #[staticmethod]
    #[pyo3(signature = (shape, n, seed=0))]
    fn generate(shape: &str, n: usize, seed: u64) -> PyResult<Self> {
        let shape: TreeShape = shape.parse().map_err(err)?;
        gen_tree(shape, n, seed).map(Topology).map_err(err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    fn edges(&self) -> Vec<(u32, u32)> {
        self.0.edges().map(|(u, v)| (u.0, v.0)).collect()
    }

    fn neighbors(&self, v: u32) -> PyResult<Vec<u32>> {
        if !self.0.contains(VertexId(v)) {
            return Err(err(GstError::UnknownVertex(VertexId(v))));
        }
        Ok(raw(self.0.neighbors(VertexId(v))))
    }

    fn path_between(&self, u: u32, v: u32) -> PyResult<Vec<u32>> {
        for x in [u, v] {
            if !self.0.contains(VertexId(x)) {
                return Err(err(GstError::UnknownVertex(VertexId(x))));
            }
        }
        Ok(raw(&self.0.path_between(VertexId(u), VertexId(v))))
    }

    fn convex_hull(&self, s: Vec<u32>) -> PyResult<Vec<u32>> {
        self.0.convex_hull(&ids(&s)).map(|h| raw(&h)).map_err(err)
    }

    fn direction(&self, x: u32, t: u32) -> PyResult<u32> {
        self.0.direction(VertexId(x), VertexId(t)).map(|v| v.0).map_err(err)
    }

    fn to_edge_list(&self) -> String {
        self.0.to_edge_list()
    }

    fn __repr__(&self) -> String {
        format!("Topology(n={})", self.0.n())
    }
}

#[pyclass(frozen)]
#[derive(Clone)]
struct SearchTree(gst_core::SearchTree);

#[pymethods]
impl SearchTree {
    /// Builds a tree from a parent list (`None` at the root).
    #[staticmethod]
    fn from_parents(parents: Vec<Option<u32>>) -> PyResult<Self> {
        let p: Vec<Option<VertexId>> = parents.into_iter().map(|x| x.map(VertexId)).collect();
        gst_core::SearchTree::from_parents(&p)
            .map(SearchTree)
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }

    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        gst_core::SearchTree::parse(text)
            .map(SearchTree)
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }

    #[getter]
    fn root(&self) -> u32 {
        self.0.root().0
    }

    fn parents(&self) -> Vec<Option<u32>> {
        self.0.parents().iter().map(|p| p.map(|v| v.0)).collect()
    }

    fn children(&self, v: u32) -> Vec<u32> {
        raw(self.0.children(VertexId(v)))
    }

    fn height(&self) -> usize {
        gst_core::height(&self.0)
    }

    fn to_text(&self) -> String {
        self.0.to_text()
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.0 == other.0
    }

    fn __repr__(&self) -> String {
        format!("SearchTree(root={}, n={})", self.0.root().0, self.0.n())
    }
}

/// Returns `None` for a valid tree, otherwise `(node, message)`.
#[pyfunction]
fn validate(g: &Topology, t: &SearchTree) -> Option<(u32, String)> {
    gst_core::validate_search_tree(&g.0, &t.0)
        .err()
        .map(|v| (v.node.0, v.to_string()))
}

#[pyfunction]
fn rotate(g: &Topology, t: &SearchTree, v: u32) -> PyResult<SearchTree> {
    gst_core::rotate(&g.0, &t.0, VertexId(v)).map(SearchTree).map_err(err)
}

#[pyfunction]
fn reference_tree(g: &Topology) -> SearchTree {
    SearchTree(gst_core::reference_tree(&g.0))
}

#[pyfunction]
fn centroid_decomposition(g: &Topology) -> SearchTree {
    SearchTree(gst_core::centroid_decomposition(&g.0))
}

#[pyfunction]
fn steinerify(g: &Topology, t: &SearchTree) -> PyResult<SearchTree> {
    gst_core::steinerify(&g.0, &t.0).map(SearchTree).map_err(err)
}

#[pyfunction]
fn is_steiner_closed(g: &Topology, s: Vec<u32>) -> PyResult<bool> {
    gst_core::is_steiner_closed(&g.0, &ids(&s)).map_err(err)
}

/// Edges of the minor tree `G(S)`.
#[pyfunction]
fn minor_tree(g: &Topology, s: Vec<u32>) -> PyResult<Vec<(u32, u32)>> {
    let m = gst_core::minor_tree(&g.0, &ids(&s)).map_err(err)?;
    Ok(m.edges.iter().map(|(a, b)| (a.0, b.0)).collect())
}

/// `(I, first_definitions, lower_bound)` for the sequence `x` on reference `p`.
#[pyfunction]
fn interleave_bound(g: &Topology, p: &SearchTree, x: Vec<u32>) -> PyResult<(u64, u64, i64)> {
    let r = gst_core::interleave_bound(&g.0, &p.0, &ids(&x)).map_err(err)?;
    Ok((r.total, r.first_definitions, r.lower_bound))
}

#[pyfunction]
#[pyo3(name = "exact_opt")]
fn exact_opt_py(g: &Topology, x: Vec<u32>) -> PyResult<u64> {
    exact_opt(&g.0, &ids(&x)).map_err(err)
}

/// Per-search costs of walking down the reference tree.
#[pyfunction]
#[pyo3(name = "static_baseline")]
fn static_baseline_py(g: &Topology, x: Vec<u32>) -> PyResult<Vec<u64>> {
    static_baseline(&g.0, &ids(&x)).map(|r| r.per_search_cost).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (kind, g, m, seed=0))]
fn gen_seq(kind: &str, g: &Topology, m: usize, seed: u64) -> PyResult<Vec<u32>> {
    let kind: SeqKind = kind.parse().map_err(err)?;
    let p = gst_core::reference_tree(&g.0);
    Ok(raw(&gen_seq_with_reference(kind, &g.0, &p, m, seed)))
}

/// Runs `algorithm` ("tango", "static" or "opt") and returns the JSON report.
#[pyfunction]
#[pyo3(signature = (g, x, algorithm="tango", debug_audit=false))]
fn run(g: &Topology, x: Vec<u32>, algorithm: &str, debug_audit: bool) -> PyResult<String> {
    let algo: Algorithm = algorithm.parse().map_err(err)?;
    let p = gst_core::reference_tree(&g.0);
    let r = run_on(&g.0, &p, &ids(&x), algo, debug_audit, false).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(r.to_json())
}

#[pyclass]
struct TangoTree(gst_core::TangoTree);

#[pymethods]
impl TangoTree {
    #[new]
    #[pyo3(signature = (g, debug_audit=false))]
    fn new(g: &Topology, debug_audit: bool) -> Self {
        let opts = TangoOptions {
            trace: TraceMode::CountOnly,
            debug_audit,
        };
        TangoTree(gst_core::TangoTree::with_options(g.0.clone(), opts))
    }

    /// Serves one search; returns `(cost, path_changes)`.
    fn search(&mut self, v: u32) -> PyResult<(u64, u64)> {
        let s = self.0.search(VertexId(v)).map_err(err)?;
        Ok((s.cost, s.path_changes))
    }

    fn audit(&self) -> PyResult<()> {
        self.0.audit().map_err(|e| PyRuntimeError::new_err(e.to_string()))
    }

    #[getter]
    fn total_cost(&self) -> u64 {
        self.0.machine().total_cost()
    }

    #[getter]
    fn total_path_changes(&self) -> u64 {
        self.0.total_path_changes()
    }

    fn tree(&self) -> SearchTree {
        SearchTree(self.0.tree().clone())
    }

    fn reference(&self) -> SearchTree {
        SearchTree(self.0.reference().clone())
    }

    /// Preferred paths as lists of vertices, top first.
    fn paths(&self) -> Vec<Vec<u32>> {
        self.0.paths().map(|(_, nodes)| raw(nodes)).collect()
    }
}

#[pymodule]
fn gst_trees(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Topology>()?;
    m.add_class::<SearchTree>()?;
    m.add_class::<TangoTree>()?;
    m.add_function(wrap_pyfunction!(validate, m)?)?;
    m.add_function(wrap_pyfunction!(rotate, m)?)?;
    m.add_function(wrap_pyfunction!(reference_tree, m)?)?;
    m.add_function(wrap_pyfunction!(centroid_decomposition, m)?)?;
    m.add_function(wrap_pyfunction!(steinerify, m)?)?;
    m.add_function(wrap_pyfunction!(is_steiner_closed, m)?)?;
    m.add_function(wrap_pyfunction!(minor_tree, m)?)?;
    m.add_function(wrap_pyfunction!(interleave_bound, m)?)?;
    m.add_function(wrap_pyfunction!(exact_opt_py, m)?)?;
    m.add_function(wrap_pyfunction!(static_baseline_py, m)?)?;
    m.add_function(wrap_pyfunction!(gen_seq, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    Ok(())
}
