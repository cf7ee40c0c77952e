//! Mean C' of tango over five seeds on random trees, m = 20n:
//! `cargo run --release --example scaling [max_exp]`.

use gst_core::gen::{gen_seq_with_reference, gen_tree, SeqKind, TreeShape};
use gst_core::reference_tree;
use gst_core::run::{run_on, Algorithm};

fn main() {
    let max_exp: u32 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(12);
    for kind in [SeqKind::Uniform, SeqKind::Adversarial] {
        for e in (6..=max_exp).step_by(2) {
            let n = 1usize << e;
            let mut cs = Vec::new();
            for seed in 0..5u64 {
                let g = gen_tree(TreeShape::Random, n, seed).unwrap();
                let p = reference_tree(&g);
                let x = gen_seq_with_reference(kind, &g, &p, 20 * n, seed);
                let r = run_on(&g, &p, &x, Algorithm::Tango, false, false).unwrap();
                cs.push(r.c_prime());
            }
            let mean = cs.iter().sum::<f64>() / cs.len() as f64;
            println!("{kind:?} n={n:6} mean C'={mean:.3} seeds={cs:.3?}");
        }
    }
}
