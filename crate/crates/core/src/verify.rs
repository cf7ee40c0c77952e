//! Invariant suites behind `gst verify`. Each check is small enough to run
//! in a few seconds; the integration tests run the full-size versions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::fixtures::{figure_rotated_tree, figure_search_tree, example_tree, v};
use crate::gen::{gen_seq_with_reference, gen_tree, SeqKind, TreeShape};
use crate::interleave::{interleave_bound, preferred_from_history};
use crate::machine::replay_events;
use crate::oracle::{exact_opt, for_each_search_tree};
use crate::search_tree::{height, random_search_tree, rotate, validate_search_tree, SearchTree};
use crate::steiner::{
    centroid_decomposition, is_steiner_closed, is_steiner_closed_tree, minor_tree, reference_tree, root_paths,
    split_components, steinerify,
};
use crate::tango::{TangoOptions, TangoTree};
use crate::topology::{Topology, VertexId, NONE};
use crate::{GstError, TraceMode};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Core,
    Steiner,
    Lowerbound,
    Tango,
    All,
}

impl std::str::FromStr for Suite {
    type Err = GstError;
    fn from_str(s: &str) -> Result<Self, GstError> {
        Ok(match s {
            "core" => Suite::Core,
            "steiner" => Suite::Steiner,
            "lowerbound" => Suite::Lowerbound,
            "tango" => Suite::Tango,
            "all" => Suite::All,
            _ => {
                return Err(GstError::UnknownName {
                    kind: "suite",
                    name: s.to_string(),
                })
            }
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(suite: &'static str, name: &'static str, r: Result<String, String>) -> Check {
    let (passed, detail) = match r {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    Check {
        suite,
        name,
        passed,
        detail,
    }
}

/// Runs the checks of `suite` on a given tree instead of generated ones.
/// The lower-bound matrix has no tree parameter and runs unchanged.
pub fn verify_on(suite: Suite, g: &Topology) -> Vec<Check> {
    let mut out = Vec::new();
    if matches!(suite, Suite::Core | Suite::All) {
        out.push(check("core", "rotations on tree", rotations_on(g, 1000, 0)));
    }
    if matches!(suite, Suite::Steiner | Suite::All) {
        out.push(check("steiner", "reference tree", reference_on(g)));
    }
    if matches!(suite, Suite::Lowerbound | Suite::All) {
        out.push(check("lowerbound", "tiny matrix", lower_bound_matrix(3)));
    }
    if matches!(suite, Suite::Tango | Suite::All) {
        out.push(check("tango", "tree fuzz", tango_fuzz(g, 1000, 0)));
    }
    out
}

pub fn verify(suite: Suite) -> Vec<Check> {
    let mut out = Vec::new();
    if matches!(suite, Suite::Core | Suite::All) {
        out.push(check("core", "figure trees", figure_trees()));
        out.push(check("core", "rotation fuzz", rotation_fuzz(1000, 0)));
    }
    if matches!(suite, Suite::Steiner | Suite::All) {
        out.push(check("steiner", "centroid height", centroid_heights(200, 1)));
        out.push(check("steiner", "steinerify", steinerify_fuzz(200, 2)));
        out.push(check("steiner", "split components", split_fuzz(20, 3)));
    }
    if matches!(suite, Suite::Lowerbound | Suite::All) {
        out.push(check("lowerbound", "tiny matrix", lower_bound_matrix(3)));
    }
    if matches!(suite, Suite::Tango | Suite::All) {
        out.push(check("tango", "example tree fuzz", tango_fuzz(&example_tree(), 1000, 4)));
        let g = gen_tree(TreeShape::Random, 64, 5).expect("n > 0");
        out.push(check("tango", "random tree fuzz", tango_fuzz(&g, 1000, 5)));
    }
    out
}

/// The eight unlabelled trees with at most five vertices.
pub fn small_trees() -> Vec<Topology> {
    [
        "1\n",
        "2\n0 1\n",
        "3\n0 1\n1 2\n",
        "4\n0 1\n1 2\n2 3\n",
        "4\n0 1\n0 2\n0 3\n",
        "5\n0 1\n1 2\n2 3\n3 4\n",
        "5\n0 1\n0 2\n0 3\n0 4\n",
        "5\n0 1\n1 2\n2 3\n2 4\n",
    ]
    .iter()
    .map(|t| Topology::parse(t).expect("fixture parses"))
    .collect()
}

/// All sequences over `n` symbols of length exactly `m`.
pub fn all_sequences(n: usize, m: usize) -> impl Iterator<Item = Vec<VertexId>> {
    let total = n.pow(m as u32);
    (0..total).map(move |mut code| {
        (0..m)
            .map(|_| {
                let v = code % n;
                code /= n;
                VertexId(v as u32)
            })
            .collect()
    })
}

fn figure_trees() -> Result<String, String> {
    let g = example_tree();
    let t = figure_search_tree();
    validate_search_tree(&g, &t).map_err(|e| e.to_string())?;
    let r = rotate(&g, &t, v('i')).map_err(|e| e.to_string())?;
    if r != figure_rotated_tree() {
        return Err("rotation at i does not give the rotated figure tree".into());
    }
    if height(&t) != 6 || height(&centroid_decomposition(&g)) != 3 {
        return Err("figure heights differ".into());
    }
    Ok("figure trees valid, rotation and heights match".into())
}

pub fn rotation_fuzz(cases: usize, seed: u64) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..cases {
        let n = rng.gen_range(2..=64);
        let g = gen_tree(TreeShape::Random, n, rng.gen()).map_err(|e| e.to_string())?;
        let t = random_search_tree(&g, &mut rng);
        let x = VertexId(rng.gen_range(0..n as u32));
        let Some(p) = t.parent(x) else { continue };
        let r = rotate(&g, &t, x).map_err(|e| format!("case {i}: {e}"))?;
        validate_search_tree(&g, &r).map_err(|e| format!("case {i}: {e}"))?;
        let back = rotate(&g, &r, p).map_err(|e| format!("case {i}: {e}"))?;
        if back != t {
            return Err(format!("case {i}: rotating back at {p} does not restore the tree"));
        }
    }
    Ok(format!("{cases} cases"))
}

fn rotations_on(g: &Topology, cases: usize, seed: u64) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = reference_tree(g);
    for i in 0..cases {
        let x = VertexId(rng.gen_range(0..g.n() as u32));
        let Some(p) = t.parent(x) else { continue };
        let r = rotate(g, &t, x).map_err(|e| format!("rotation {i}: {e}"))?;
        validate_search_tree(g, &r).map_err(|e| format!("rotation {i}: {e}"))?;
        if rotate(g, &r, p).map_err(|e| e.to_string())? != t {
            return Err(format!("rotation {i}: rotating back at {p} does not restore the tree"));
        }
        t = r;
    }
    Ok(format!("{cases} rotations"))
}

/// Closure, height and split bounds of the reference tree of `g`.
fn reference_on(g: &Topology) -> Result<String, String> {
    let n = g.n();
    let c = centroid_decomposition(g);
    if height(&c) > n.ilog2() as usize + 1 {
        return Err(format!("centroid height {} too large", height(&c)));
    }
    let p = reference_tree(g);
    validate_search_tree(g, &p).map_err(|e| e.to_string())?;
    if !is_steiner_closed_tree(g, &p).map_err(|e| e.to_string())? {
        return Err("reference tree is not Steiner-closed".into());
    }
    if height(&p) > 2 * height(&c) {
        return Err("closure more than doubled the height".into());
    }
    for pi in root_paths(&p) {
        if !minor_tree(g, &pi).map_err(|e| e.to_string())?.is_tree() {
            return Err("a minor is not a tree".into());
        }
        for i in 1..pi.len() {
            if split_components(g, &pi, i).map_err(|e| e.to_string())? > 2 {
                return Err(format!("split of a path at {i} leaves more than two components"));
            }
        }
    }
    Ok(format!("height {} (centroid {})", height(&p), height(&c)))
}

pub fn centroid_heights(cases: usize, seed: u64) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..cases {
        let n = rng.gen_range(2..=1024);
        let g = gen_tree(TreeShape::Random, n, rng.gen()).map_err(|e| e.to_string())?;
        let h = height(&centroid_decomposition(&g));
        let bound = n.ilog2() as usize + 1;
        if h > bound {
            return Err(format!("n = {n}: height {h} > {bound}"));
        }
    }
    Ok(format!("{cases} trees"))
}

pub fn steinerify_fuzz(cases: usize, seed: u64) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..cases {
        let n = rng.gen_range(1..=256);
        let g = gen_tree(TreeShape::Random, n, rng.gen()).map_err(|e| e.to_string())?;
        let t = random_search_tree(&g, &mut rng);
        let s = steinerify(&g, &t).map_err(|e| e.to_string())?;
        validate_search_tree(&g, &s).map_err(|e| e.to_string())?;
        if !is_steiner_closed_tree(&g, &s).map_err(|e| e.to_string())? {
            return Err(format!("n = {n}: output not Steiner-closed"));
        }
        if height(&s) > 2 * height(&t) {
            return Err(format!("n = {n}: height {} > 2 * {}", height(&s), height(&t)));
        }
        let p = reference_tree(&g);
        let bound = 2.0 * (n as f64).log2() + 2.0;
        if height(&p) as f64 > bound {
            return Err(format!("n = {n}: reference height {} > {bound:.2}", height(&p)));
        }
    }
    Ok(format!("{cases} trees"))
}

pub fn split_fuzz(cases: usize, seed: u64) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut splits = 0u64;
    for _ in 0..cases {
        let n = rng.gen_range(1..=128);
        let g = gen_tree(TreeShape::Random, n, rng.gen()).map_err(|e| e.to_string())?;
        let p = reference_tree(&g);
        for pi in root_paths(&p) {
            for i in 1..pi.len() {
                let c = split_components(&g, &pi, i).map_err(|e| e.to_string())?;
                splits += 1;
                if c > 2 {
                    return Err(format!("n = {n}: split at {i} leaves {c} components"));
                }
            }
        }
    }
    Ok(format!("{splits} splits"))
}

/// `floor(I/2) - n <= OPT` over the small trees, every valid reference
/// tree, and every sequence of length at most `max_m`.
pub fn lower_bound_matrix(max_m: usize) -> Result<String, String> {
    let mut instances = 0u64;
    for g in small_trees() {
        let n = g.n();
        let mut refs = Vec::new();
        for_each_search_tree(&g, |par| {
            let parents: Vec<Option<VertexId>> = par.iter().map(|&x| (x != NONE).then_some(VertexId(x))).collect();
            refs.push(SearchTree::from_parents(&parents).expect("enumerated tree"));
        })
        .map_err(|e| e.to_string())?;
        for m in 0..=max_m {
            for x in all_sequences(n, m) {
                let opt = exact_opt(&g, &x).map_err(|e| e.to_string())? as i64;
                for p in &refs {
                    let lb = interleave_bound(&g, p, &x).map_err(|e| e.to_string())?.lower_bound;
                    instances += 1;
                    if lb > opt {
                        return Err(format!("n = {n}, X = {x:?}: bound {lb} > OPT {opt}"));
                    }
                }
            }
        }
    }
    Ok(format!("{instances} (G, P, X) instances"))
}

/// Random searches with audits, a trace replay, the path-change budget and
/// the preferred children against a recomputation from history.
pub fn tango_fuzz(g: &Topology, searches: usize, seed: u64) -> Result<String, String> {
    let opts = TangoOptions {
        trace: TraceMode::Full,
        debug_audit: false,
    };
    let mut t = TangoTree::with_options(g.clone(), opts);
    let p = t.reference().clone();
    let x = gen_seq_with_reference(SeqKind::Uniform, g, &p, searches, seed);
    for (i, &y) in x.iter().enumerate() {
        t.search(y).map_err(|e| e.to_string())?;
        t.audit().map_err(|e| format!("after search {i}: {e}"))?;
        if g.n() <= 64 {
            let want = preferred_from_history(&p, &x[..=i]);
            let got: Vec<_> = g.vertices().map(|u| t.tracker().preferred(u)).collect();
            if want != got {
                return Err(format!("after search {i}: preferred children differ from history"));
            }
        }
    }
    let replayed = replay_events(g, t.initial_tree(), t.machine().trace()).map_err(|e| e.to_string())?;
    if replayed.tree() != t.tree() || replayed.cost_report() != t.machine().cost_report() {
        return Err("trace replay differs".into());
    }
    let ib = interleave_bound(g, &p, &x).map_err(|e| e.to_string())?;
    if t.total_path_changes() > ib.total + ib.first_definitions {
        return Err(format!(
            "{} path changes exceed I + first definitions = {}",
            t.total_path_changes(),
            ib.total + ib.first_definitions
        ));
    }
    for (_, nodes) in t.paths() {
        if !is_steiner_closed(g, nodes).map_err(|e| e.to_string())? {
            return Err("a preferred path is not Steiner-closed".into());
        }
        if !minor_tree(g, nodes).map_err(|e| e.to_string())?.is_tree() {
            return Err("a minor is not a tree".into());
        }
    }
    Ok(format!(
        "{searches} searches, cost {}, {} path changes",
        t.machine().total_cost(),
        t.total_path_changes()
    ))
}
