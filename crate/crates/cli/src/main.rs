use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use gst_core::gen::{gen_seq, gen_tree, SeqKind, TreeShape};
use gst_core::machine::replay;
use gst_core::run::{format_sequence, load_tree, parse_sequence, run, Algorithm, RunConfig, SeqSource, TreeSource};
use gst_core::tango::TangoTree;
use gst_core::verify::{verify, verify_on, Suite};
use gst_core::{centroid_decomposition, interleave_bound, reference_tree, SearchTree, Topology};

#[derive(Parser)]
#[command(name = "gst", version, about = "Search trees on trees: generators, runs, bounds, checks")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a tree as an edge list.
    GenTree {
        #[arg(long)]
        shape: TreeShape,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate an access sequence on a tree.
    GenSeq {
        #[arg(long)]
        tree: PathBuf,
        #[arg(long)]
        kind: SeqKind,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Serve a sequence and print the JSON report.
    Run(RunArgs),
    /// Interleave bound of a sequence as JSON.
    Lowerbound {
        #[arg(long)]
        tree: PathBuf,
        #[arg(long)]
        seq: PathBuf,
        #[arg(long, value_enum, default_value_t = Reference::Steiner)]
        reference: Reference,
        /// Search-tree document used with `--reference file`.
        #[arg(long)]
        reference_file: Option<PathBuf>,
    },
    /// Run invariant suites; exits non-zero on failure.
    Verify {
        #[arg(default_value = "all")]
        suite: Suite,
        /// Run the suite's checks on this tree instead of generated ones.
        #[arg(long)]
        tree: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Replay a trace and print its cost report.
    Replay {
        #[arg(long)]
        tree: PathBuf,
        #[arg(long)]
        trace: PathBuf,
        /// Initial search tree document; defaults to the tree given by `--start`.
        #[arg(long)]
        initial: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Start::Tango)]
        start: Start,
    },
}

#[derive(clap::Args)]
struct RunArgs {
    #[arg(long, conflicts_with = "shape")]
    tree: Option<PathBuf>,
    #[arg(long, requires = "n")]
    shape: Option<TreeShape>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 0)]
    tree_seed: u64,
    #[arg(long, conflicts_with = "kind")]
    seq: Option<PathBuf>,
    #[arg(long, requires = "m")]
    kind: Option<SeqKind>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seq_seed: u64,
    #[arg(long, default_value = "tango")]
    algo: Algorithm,
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long)]
    debug_audit: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Reference {
    Centroid,
    Steiner,
    File,
}

#[derive(Clone, Copy, ValueEnum)]
enum Start {
    /// The initial composite tree of the online structure.
    Tango,
    /// The reference tree (what `--algo static` starts from).
    Static,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn topology(path: &Path) -> Result<Topology> {
    Ok(Topology::parse(&read(path)?)?)
}

fn run_config(a: RunArgs) -> Result<RunConfig> {
    let tree = match (a.tree, a.shape, a.n) {
        (Some(p), _, _) => TreeSource::File(p),
        (None, Some(shape), Some(n)) => TreeSource::Generate {
            shape,
            n,
            seed: a.tree_seed,
        },
        _ => bail!("give --tree FILE or --shape with --n"),
    };
    let seq = match (a.seq, a.kind, a.m) {
        (Some(p), _, _) => SeqSource::File(p),
        (None, Some(kind), Some(m)) => SeqSource::Generate {
            kind,
            m,
            seed: a.seq_seed,
        },
        _ => bail!("give --seq FILE or --kind with --m"),
    };
    Ok(RunConfig {
        report: a.report,
        trace: a.trace,
        debug_audit: a.debug_audit,
        ..RunConfig::new(tree, seq, a.algo)
    })
}

fn main() -> ExitCode {
    match real_main() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn real_main() -> Result<ExitCode> {
    match Cli::parse().cmd {
        Cmd::GenTree { shape, n, seed, out } => {
            emit(out.as_deref(), &gen_tree(shape, n, seed)?.to_edge_list())?;
        }
        Cmd::GenSeq {
            tree,
            kind,
            m,
            seed,
            out,
        } => {
            let g = topology(&tree)?;
            emit(out.as_deref(), &format_sequence(&gen_seq(kind, &g, m, seed)))?;
        }
        Cmd::Run(args) => {
            let cfg = run_config(args)?;
            let report = run(&cfg)?;
            println!("{}", report.to_json());
            if report.audit == Some(false) {
                return Ok(ExitCode::FAILURE);
            }
        }
        Cmd::Lowerbound {
            tree,
            seq,
            reference,
            reference_file,
        } => {
            let g = topology(&tree)?;
            let x = parse_sequence(&read(&seq)?)?;
            let p = match reference {
                Reference::Steiner => reference_tree(&g),
                Reference::Centroid => centroid_decomposition(&g),
                Reference::File => {
                    let f = reference_file.context("--reference file needs --reference-file")?;
                    SearchTree::parse(&read(&f)?)?
                }
            };
            let r = interleave_bound(&g, &p, &x)?;
            println!("{}", serde_json::to_string_pretty(&r)?);
        }
        Cmd::Verify { suite, tree, json } => {
            let checks = match tree {
                Some(f) => verify_on(suite, &topology(&f)?),
                None => verify(suite),
            };
            if json {
                println!("{}", serde_json::to_string_pretty(&checks)?);
            } else {
                for c in &checks {
                    let tag = if c.passed { "PASS" } else { "FAIL" };
                    println!("{tag} {}/{}: {}", c.suite, c.name, c.detail);
                }
            }
            if checks.iter().any(|c| !c.passed) {
                return Ok(ExitCode::FAILURE);
            }
        }
        Cmd::Replay {
            tree,
            trace,
            initial,
            start,
        } => {
            let g = load_tree(&TreeSource::File(tree))?;
            let t0 = match (initial, start) {
                (Some(f), _) => SearchTree::parse(&read(&f)?)?,
                (None, Start::Static) => reference_tree(&g),
                (None, Start::Tango) => TangoTree::new(g.clone()).initial_tree().clone(),
            };
            let report = replay(&g, &t0, &read(&trace)?)?;
            println!("{}", report.to_json());
        }
    }
    Ok(ExitCode::SUCCESS)
}
