//! Scratch: detailed stationary-state structure at one size.
//! cargo run --example calibrate3 -- <n> <t_skip> <t_measure>

use sowex::engine::{run_phase, ModelConfig, SimulationState, Variant};
use sowex::observers::{AvalancheDirection, AvalancheRecorder, Observer, ObserverSet, WealthHistogram};
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
    let config = ModelConfig::new(Variant::Minimal, 4321);
    let mut state = SimulationState::init(&config, n, 0);
    let mut empty = ObserverSet::new();
    run_phase(&mut state, &config, &topo, t_skip, &mut empty).unwrap();

    let mut set = ObserverSet::new();
    set.push(Observer::WealthHist(WealthHistogram::default_range()));
    set.push(Observer::Avalanche(AvalancheRecorder::new(
        &[0.56, 0.66, 0.71, 0.78, 0.8010, 0.81],
        AvalancheDirection::Below,
    )));
    let end = state.time() + t_measure;
    set.attach(state.wealth(), state.time());
    let mut below_count = [0u64; 4]; // w_min < 0.5 / 0.6 / 0.7 / 0.8010
    let mut agents_below_080 = 0u64;
    let mut agents_below_070 = 0u64;
    let mut snapshots = 0u64;
    while state.time() < end {
        let rec = state.step(&config, &topo);
        set.on_step(&rec, state.wealth());
        let wm = rec.extremal_wealth_before;
        if wm < 0.5 {
            below_count[0] += 1;
        }
        if wm < 0.6 {
            below_count[1] += 1;
        }
        if wm < 0.7 {
            below_count[2] += 1;
        }
        if wm < 0.8010 {
            below_count[3] += 1;
        }
        if state.time() % 10_000 == 0 {
            snapshots += 1;
            agents_below_080 += state.wealth().iter().filter(|&&w| w < 0.80).count() as u64;
            agents_below_070 += state.wealth().iter().filter(|&&w| w < 0.70).count() as u64;
        }
    }
    set.detach(state.wealth(), state.time());

    let t = t_measure as f64;
    println!(
        "P(w_min < 0.5)={:.4}  <0.6: {:.4}  <0.7: {:.4}  <0.8010: {:.4}",
        below_count[0] as f64 / t,
        below_count[1] as f64 / t,
        below_count[2] as f64 / t,
        below_count[3] as f64 / t
    );
    println!(
        "mean agents below 0.70: {:.3}, below 0.80: {:.3} (of {n})",
        agents_below_070 as f64 / snapshots as f64,
        agents_below_080 as f64 / snapshots as f64
    );
    let hist = set.wealth_hist().unwrap().histogram();
    println!("P(w) profile:");
    for k in (0..hist.n_bins()).step_by(10) {
        let c = hist.bin_center(k);
        if (0.55..1.3).contains(&c) {
            println!("  w={c:.3} P={:.4}", hist.density(k));
        }
    }
    let av = set.avalanche().unwrap();
    for (idx, w_o) in av.thresholds().iter().enumerate() {
        println!(
            "w_o={w_o:.4}: avalanches={} mean size={:.2}",
            av.sizes(idx).total(),
            av.mean_size(idx)
        );
    }
}
