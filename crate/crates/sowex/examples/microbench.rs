//! Scratch microbenchmark of hot-loop components.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sowex::extremal::{ExtremalMode, TournamentTree};

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let n = 256usize;
    let iters = 20_000_000u64;

    // (a) f64 draws
    let t = std::time::Instant::now();
    let mut acc = 0.0;
    for _ in 0..iters {
        acc += rng.random::<f64>();
    }
    println!("f64 draw: {:.1} ns (acc {acc:.1})", t.elapsed().as_nanos() as f64 / iters as f64);

    // (b) random_range
    let t = std::time::Instant::now();
    let mut acc2 = 0u64;
    for _ in 0..iters {
        acc2 += rng.random_range(0..n) as u64;
    }
    println!("random_range: {:.1} ns (acc {acc2})", t.elapsed().as_nanos() as f64 / iters as f64);

    // (c) tree set_pair, neighbor indices
    let values: Vec<f64> = (0..n).map(|_| rng.random()).collect();
    let mut tree = TournamentTree::build(&values, ExtremalMode::Min).unwrap();
    let t = std::time::Instant::now();
    for k in 0..iters {
        let i = (k as usize * 37) % n;
        let j = (i + 1) % n;
        tree.set_pair(i, j, (k % 97) as f64 / 97.0, (k % 89) as f64 / 89.0);
    }
    println!(
        "set_pair(neighbors): {:.1} ns (root {})",
        t.elapsed().as_nanos() as f64 / iters as f64,
        tree.query_extremal().0
    );

    // (d) set_pair, random far indices
    let t = std::time::Instant::now();
    for k in 0..iters {
        let i = (k as usize * 37) % n;
        let j = (k as usize * 151 + 91) % n;
        let j = if j == i { (j + 1) % n } else { j };
        tree.set_pair(i, j, (k % 97) as f64 / 97.0, (k % 89) as f64 / 89.0);
    }
    println!(
        "set_pair(random): {:.1} ns (root {})",
        t.elapsed().as_nanos() as f64 / iters as f64,
        tree.query_extremal().0
    );
}
