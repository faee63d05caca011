//! Frequency disorder washes out the averaged transmission.

use bh_transport::config::{ghz, ChainConfig};
use bh_transport::disorder::{ensemble_transmission, prominence_distribution, DisorderSpec, Engine};
use bh_transport::spectroscopy::SweepGrid;

fn main() -> bh_transport::Result<()> {
    let base = ChainConfig::default().to_params();
    let j = base.tunneling;
    let freqs = SweepGrid::linspace(ghz(3.65), ghz(4.15), 1001);
    let specs: Vec<DisorderSpec> = [0.1, 0.5, 1.0, 2.0]
        .iter()
        .map(|&s| DisorderSpec { base_freq: ghz(3.9), sigma: s * j, n_realizations: 100, seed: 11 })
        .collect();
    let dists = prominence_distribution(&specs, &base, &freqs, &Engine::Linear, 10)?;
    println!("{:>6} {:>12} {:>10}  prominence histogram (0..1, 10 bins)", "σ/J", "max|⟨S21⟩|", "median");
    for (spec, dist) in specs.iter().zip(&dists) {
        let ens = ensemble_transmission(spec, &base, &freqs, &Engine::Linear)?;
        let peak = ens.averaged_magnitude().into_iter().fold(0.0, f64::max);
        println!("{:>6.1} {peak:>12.4} {:>10.4}  {:?}", spec.sigma / j, dist.median(), dist.counts);
    }
    Ok(())
}
