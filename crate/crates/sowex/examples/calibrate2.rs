//! Scratch cross-checks of stationary observables.
//! cargo run --example calibrate2 -- <n> <t_skip> <t_measure>

use sowex::engine::{run_phase, ModelConfig, SimulationState, Variant};
use sowex::observers::{
    JumpRecorder, Observer, ObserverSet, PersistenceClocks, StationarityProbe,
};
use sowex::topology::Topology;

fn main() {
    let args: Vec<u64> = std::env::args()
        .skip(1)
        .map(|a| a.parse().expect("numeric args"))
        .collect();
    let (n, t_skip, t_measure) = (
        *args.first().unwrap_or(&256) as usize,
        *args.get(1).unwrap_or(&20_000_000),
        *args.get(2).unwrap_or(&20_000_000),
    );
    let topo = Topology::ring(n).unwrap();
    let config = ModelConfig::new(Variant::Minimal, 777);
    let mut state = SimulationState::init(&config, n, 0);
    let mut empty = ObserverSet::new();
    run_phase(&mut state, &config, &topo, t_skip, &mut empty).unwrap();

    let mut set = ObserverSet::new();
    set.push(Observer::Jump(JumpRecorder::new(&topo).unwrap()));
    set.push(Observer::Persistence(PersistenceClocks::new()));
    set.push(Observer::Stationarity(StationarityProbe::new(t_measure)));
    // Histogram of w_min values seen at each step, via a fine histogram.
    let mut wmin_hist = sowex::hist::Histogram::new(0.0, 0.002, 1000).unwrap();
    let end = state.time() + t_measure;
    set.attach(state.wealth(), state.time());
    while state.time() < end {
        let rec = state.step(&config, &topo);
        set.on_step(&rec, state.wealth());
        wmin_hist.record(rec.extremal_wealth_before);
    }
    set.detach(state.wealth(), state.time());

    let probe = set.stationarity().unwrap();
    println!(
        "variance: q3={:.5} q4={:.5} (target 0.057 at N=256, 0.0607 at N=1024)",
        probe.quarter3_mean(),
        probe.quarter4_mean()
    );
    let jump = set.jump().unwrap();
    println!(
        "P(l=0)={:.4} P(l=1)={:.4} (targets 0.4575, 0.4820)",
        jump.probability(0),
        jump.probability(1)
    );
    let wmin = state.wealth().iter().cloned().fold(f64::INFINITY, f64::min);
    println!("final min wealth = {wmin:.4}");
    // Where does the w_min distribution sit? quantiles.
    let total = wmin_hist.total();
    let mut acc = 0u64;
    for q in [0.01, 0.1, 0.25, 0.5, 0.75, 0.9] {
        let target = (q * total as f64) as u64;
        let mut acc2 = 0u64;
        for k in 0..wmin_hist.n_bins() {
            acc2 += wmin_hist.counts()[k];
            if acc2 >= target {
                println!("w_min q{q}: {:.4}", wmin_hist.bin_center(k));
                break;
            }
        }
    }
    let _ = acc;
    acc = 0;
    let _ = acc;
}
