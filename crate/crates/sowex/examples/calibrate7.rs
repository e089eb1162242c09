//! Scratch: discriminate between candidate readings of the trade rule.
//!
//! A: literal reshuffle, histogram conditioned on quiescent steps
//!    (w_min above a reference level).
//! B: poor agent receives the larger share max(eps, 1-eps) * delta.
//!
//! Fingerprints to match: wc_half(256) = 0.8010, variance 0.057,
//! P(l=0) = 0.4575, P(l=1) = 0.4820.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sowex::estimators::{wc_half, Flank};
use sowex::extremal::{ExtremalMode, TournamentTree};
use sowex::hist::Histogram;

fn main() {
    let n = 256usize;
    let t_skip = 20_000_000u64;
    let t_measure = 40_000_000u64;

    for max_share in [false, true] {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mut wealth: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..2.0)).collect();
        let mut tree = TournamentTree::build(&wealth, ExtremalMode::Min).unwrap();
        let mut prev_min = usize::MAX;
        let mut jumps = [0u64; 3]; // l=0, l=1, other
        let mut hist_all = Histogram::new(0.0, 0.002, 2000).unwrap();
        let mut hist_quiet = Histogram::new(0.0, 0.002, 2000).unwrap();
        let mut quiet_steps = 0u64;
        let mut var_sum = 0.0;
        let mut sum_sq: f64 = wealth.iter().map(|w| w * w).sum();

        for t in 0..(t_skip + t_measure) {
            let (i, wi) = tree.query_extremal();
            let j = {
                let pick: usize = rng.random_range(0..2);
                if pick == 0 {
                    (i + n - 1) % n
                } else {
                    (i + 1) % n
                }
            };
            let wj = wealth[j];
            let delta = wi + wj;
            let eps: f64 = loop {
                let e: f64 = rng.random();
                if e > 0.0 {
                    break e;
                }
            };
            let (ni, nj) = if max_share {
                let hi = eps.max(1.0 - eps);
                (hi * delta, (1.0 - hi) * delta)
            } else {
                (eps * delta, (1.0 - eps) * delta)
            };
            sum_sq += ni * ni + nj * nj - wi * wi - wj * wj;
            wealth[i] = ni;
            wealth[j] = nj;
            tree.set_pair(i, j, ni, nj);

            if t >= t_skip {
                // Jump statistics.
                if prev_min != usize::MAX {
                    let d = i.abs_diff(prev_min);
                    let l = d.min(n - d);
                    match l {
                        0 => jumps[0] += 1,
                        1 => jumps[1] += 1,
                        _ => jumps[2] += 1,
                    }
                }
                var_sum += sum_sq / n as f64 - 1.0;
                // Histogram of a snapshot every N steps.
                if t % n as u64 == 0 {
                    for &w in &wealth {
                        hist_all.record(w);
                    }
                    let wmin = tree.query_extremal().1;
                    if wmin > 0.79 {
                        quiet_steps += 1;
                        for &w in &wealth {
                            hist_quiet.record(w);
                        }
                    }
                }
            }
            prev_min = i;
        }
        let total_jumps = (jumps[0] + jumps[1] + jumps[2]) as f64;
        let label = if max_share { "B: max-share" } else { "A: literal" };
        println!("--- {label} ---");
        println!(
            "P(l=0)={:.4} P(l=1)={:.4}  [targets 0.4575 0.4820]",
            jumps[0] as f64 / total_jumps,
            jumps[1] as f64 / total_jumps
        );
        println!(
            "time-avg variance = {:.4}  [target 0.057]",
            var_sum / t_measure as f64
        );
        println!(
            "wc_half(all) = {:?}  [target 0.8010]",
            wc_half(&hist_all, Flank::Left)
        );
        println!(
            "wc_half(quiet, {} snapshots) = {:?}",
            quiet_steps,
            wc_half(&hist_quiet, Flank::Left)
        );
    }
}
