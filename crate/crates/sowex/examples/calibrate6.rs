//! Scratch: validate the incremental variance tracking against per-step
//! brute-force recomputation.

use sowex::engine::{run_phase, neumaier_sum_of, ModelConfig, SimulationState, Variant};
use sowex::observers::{Observer, ObserverSet, StationarityProbe};
use sowex::topology::Topology;

fn main() {
    let n = 256usize;
    let topo = Topology::ring(n).unwrap();
    let config = ModelConfig::new(Variant::Minimal, 777);
    let mut state = SimulationState::init(&config, n, 0);
    let mut empty = ObserverSet::new();
    run_phase(&mut state, &config, &topo, 20_000_000, &mut empty).unwrap();

    let window = 1_000_000u64;
    let mut set = ObserverSet::new();
    set.push(Observer::Stationarity(StationarityProbe::new(window)));
    set.attach(state.wealth(), state.time());
    let end = state.time() + window;
    let mut brute_sum = 0.0;
    let mut brute_count = 0u64;
    let q3 = state.time() + window / 2;
    let q4 = state.time() + 3 * window / 4;
    while state.time() < end {
        let rec = state.step(&config, &topo);
        set.on_step(&rec, state.wealth());
        if rec.time > q3 && rec.time <= q4 {
            let sum_sq = neumaier_sum_of(state.wealth(), |w| w * w);
            brute_sum += sum_sq / n as f64 - 1.0;
            brute_count += 1;
        }
    }
    let probe = set.stationarity().unwrap();
    println!(
        "probe q3 = {:.6}, brute q3 = {:.6}",
        probe.quarter3_mean(),
        brute_sum / brute_count as f64
    );
}
