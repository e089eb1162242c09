//! Scratch calibration driver: step throughput and a first look at the
//! stationary poverty line. Run with:
//!   cargo run --example calibrate -- <n> <t_skip> <t_measure> <runs>

use sowex::engine::{run_phase, ModelConfig, SimulationState, Variant};
use sowex::observers::{Observer, ObserverSet, WealthHistogram};
use sowex::topology::Topology;

fn main() {
    let args: Vec<u64> = std::env::args()
        .skip(1)
        .map(|a| a.parse().expect("numeric args"))
        .collect();
    let (n, t_skip, t_measure, runs) = (
        *args.first().unwrap_or(&256) as usize,
        *args.get(1).unwrap_or(&10_000_000),
        *args.get(2).unwrap_or(&10_000_000),
        *args.get(3).unwrap_or(&4),
    );
    let topo = Topology::ring(n).unwrap();
    let config = ModelConfig::new(Variant::Minimal, 20260810);

    let mut merged: Option<WealthHistogram> = None;
    let t0 = std::time::Instant::now();
    for run in 0..runs {
        let mut state = SimulationState::init(&config, n, run);
        let mut empty = ObserverSet::new();
        run_phase(&mut state, &config, &topo, t_skip, &mut empty).unwrap();
        let mut set = ObserverSet::new();
        set.push(Observer::WealthHist(WealthHistogram::default_range()));
        run_phase(&mut state, &config, &topo, t_measure, &mut set).unwrap();
        let h = set.wealth_hist().unwrap().clone();
        match &mut merged {
            None => merged = Some(h),
            Some(m) => {
                use sowex::observers::Observer as O;
                let mut a = O::WealthHist(m.clone());
                a.merge(&O::WealthHist(h)).unwrap();
                if let O::WealthHist(hh) = a {
                    *m = hh;
                }
            }
        }
    }
    let elapsed = t0.elapsed().as_secs_f64();
    let steps = (t_skip + t_measure) * runs;
    println!(
        "n={n} steps={steps} wall={elapsed:.1}s rate={:.1} Msteps/s ({:.1} ns/step)",
        steps as f64 / elapsed / 1e6,
        elapsed * 1e9 / steps as f64
    );

    let hist = merged.unwrap();
    let h = hist.histogram();
    let dens = h.densities();
    let (peak_idx, peak) = dens
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(i, &d)| (i, d))
        .unwrap();
    // Rising-edge half-max crossing with linear interpolation.
    let half = peak / 2.0;
    let mut wc_half = f64::NAN;
    for k in 1..=peak_idx {
        if dens[k] >= half {
            let (d0, d1) = (dens[k - 1], dens[k]);
            let (x0, x1) = (h.bin_center(k - 1), h.bin_center(k));
            wc_half = x0 + (half - d0) / (d1 - d0) * (x1 - x0);
            break;
        }
    }
    println!(
        "peak at w={:.4} density={peak:.3}; wc_half={wc_half:.4}",
        h.bin_center(peak_idx)
    );
    // Steepest-slope intercept on the rising edge.
    let mut best = (0usize, 0.0f64);
    for k in 1..=peak_idx {
        let s = dens[k] - dens[k - 1];
        if s > best.1 {
            best = (k, s);
        }
    }
    let k = best.0;
    let slope = (dens[k] - dens[k - 1]) / h.bin_width();
    let wc_slope = h.bin_center(k - 1) - dens[k - 1] / slope;
    println!("wc_slope={wc_slope:.4}");
}
