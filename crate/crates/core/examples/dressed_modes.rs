//! Dressed single-excitation modes and the saturable Maxwell-Bloch
//! transmission compared with the linear model.

use bh_transport::analytics::{dressed_modes, linear_s21, maxwell_bloch_s21};
use bh_transport::lattice::ChainParams;

fn main() -> bh_transport::Result<()> {
    let (j, gamma) = (1.0, 0.02);
    for m in dressed_modes(j, gamma, 1.0) {
        println!("S{}: E − ω = {:+.3}J  Γ_n/Γ = {:.4}  Ω_n/Ω = {:+.4}  a = {:?}", m.index, m.detuning / j, m.rate / gamma, m.drive, m.amplitudes.map(|a| (a * 1e4).round() / 1e4));
    }
    let chain = ChainParams::uniform(5, 0.0, 0.0, j, gamma);
    println!("{:>8} {:>10} {:>10} {:>10}", "delta/J", "linear", "MB Ω→0", "MB Ω=Γ");
    for k in -10..=10 {
        let delta = 0.2 * k as f64 * j;
        let mut p = chain.clone();
        p.drive_freq = delta;
        let lin = linear_s21(&p)?.norm();
        let weak = maxwell_bloch_s21(-delta, 1e-6 * gamma, j, gamma / 2.0).norm();
        let strong = maxwell_bloch_s21(-delta, gamma, j, gamma / 2.0).norm();
        println!("{:>8.2} {lin:>10.5} {weak:>10.5} {strong:>10.5}", delta / j);
    }
    Ok(())
}
