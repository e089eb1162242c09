//! Scratch: Gaussian-tail fit of the stationary distribution.
//! cargo run --example calibrate4 -- <n> <t_skip> <t_measure> <runs>

use sowex::engine::{run_phase, ModelConfig, SimulationState, Variant};
use sowex::estimators::{gaussian_fit, wc_half, wc_slope, Flank};
use sowex::observers::{Observer, ObserverSet, WealthHistogram};
use sowex::topology::Topology;

fn main() {
    let args: Vec<u64> = std::env::args()
        .skip(1)
        .map(|a| a.parse().expect("numeric args"))
        .collect();
    let (n, t_skip, t_measure, runs) = (
        *args.first().unwrap_or(&256) as usize,
        *args.get(1).unwrap_or(&20_000_000),
        *args.get(2).unwrap_or(&10_000_000),
        *args.get(3).unwrap_or(&16),
    );
    let topo = Topology::ring(n).unwrap();
    let config = ModelConfig::new(Variant::Minimal, 99991);

    let mut merged = Observer::WealthHist(WealthHistogram::default_range());
    for run in 0..runs {
        let mut state = SimulationState::init(&config, n, run);
        let mut empty = ObserverSet::new();
        run_phase(&mut state, &config, &topo, t_skip, &mut empty).unwrap();
        let mut set = ObserverSet::new();
        set.push(Observer::WealthHist(WealthHistogram::default_range()));
        run_phase(&mut state, &config, &topo, t_measure, &mut set).unwrap();
        merged
            .merge(&Observer::WealthHist(set.wealth_hist().unwrap().clone()))
            .unwrap();
    }
    let Observer::WealthHist(hist) = merged else {
        unreachable!()
    };
    let h = hist.histogram();
    let dens = h.densities();
    let (peak_idx, peak) = dens
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(i, &d)| (i, d))
        .unwrap();
    let peak_w = h.bin_center(peak_idx);
    println!("n={n} runs={runs}: peak {peak:.3} at w={peak_w:.4}");
    println!(
        "wc_half={:.4} wc_slope={:.4}",
        wc_half(h, Flank::Left).unwrap(),
        wc_slope(h, Flank::Left).unwrap()
    );
    // Tail fit from just right of the peak onward.
    let points: Vec<(f64, f64)> = h
        .density_points()
        .into_iter()
        .filter(|&(w, d)| w > peak_w + 0.05 && w < 3.5 && d > 1e-6)
        .collect();
    let fit = gaussian_fit(&points, false).unwrap();
    println!(
        "tail gaussian: a={:.3} mu={:.3} sigma={:.3} residual={:.2e} ({} pts)",
        fit.param("a"),
        fit.param("mu"),
        fit.param("sigma"),
        fit.residual,
        fit.n_points
    );
    // Mass below selected thresholds.
    for thr in [0.78f64, 0.80, 0.8010] {
        let mass: f64 = h
            .density_points()
            .iter()
            .filter(|&&(w, _)| w < thr)
            .map(|&(_, d)| d * h.bin_width())
            .sum();
        println!("mass below {thr}: {mass:.4}");
    }
}
