//! Scratch: slow-relaxation check — does the below-line mass keep
//! draining long after the second moment looks flat?
//! cargo run --example calibrate5 -- <n> <windows...>

use sowex::engine::{run_phase, ModelConfig, SimulationState, Variant};
use sowex::estimators::{wc_half, Flank};
use sowex::observers::{Observer, ObserverSet, WealthHistogram};
use sowex::topology::Topology;

fn main() {
    let n: usize = std::env::args()
        .nth(1)
        .map(|a| a.parse().unwrap())
        .unwrap_or(256);
    let topo = Topology::ring(n).unwrap();
    let config = ModelConfig::new(Variant::Minimal, 20260811);
    let mut state = SimulationState::init(&config, n, 0);
    // Measure in consecutive windows; each window's histogram is fresh.
    let windows: [u64; 6] = [
        10_000_000, 30_000_000, 60_000_000, 100_000_000, 200_000_000, 200_000_000,
    ];
    for w in windows {
        let mut set = ObserverSet::new();
        set.push(Observer::WealthHist(WealthHistogram::default_range()));
        run_phase(&mut state, &config, &topo, w, &mut set).unwrap();
        let h = set.wealth_hist().unwrap().histogram();
        let mass_08: f64 = h
            .density_points()
            .iter()
            .filter(|&&(x, _)| x < 0.80)
            .map(|&(_, d)| d * h.bin_width())
            .sum();
        let var = state.wealth_variance();
        let wc = wc_half(h, Flank::Left).map(|v| format!("{v:.4}")).unwrap_or("n/a".into());
        println!(
            "t_end={:>12}: mass<0.80 = {mass_08:.4}, wc_half = {wc}, inst. var = {var:.4}",
            state.time()
        );
    }
}
