//! Transmission peaks of the degenerate five-site chain in the linear model.

use bh_transport::analytics::{degenerate_peak_widths, linear_s21, refined_maxima};
use bh_transport::lattice::ChainParams;

fn main() -> bh_transport::Result<()> {
    let (j, gamma) = (1.0, 1.0 / 500.0);
    let chain = ChainParams::uniform(5, 0.0, 0.0, j, gamma);
    let power = |delta: f64| {
        let mut p = chain.clone();
        p.drive_freq = delta;
        linear_s21(&p).map(|s| s.norm_sqr()).unwrap_or(0.0)
    };
    let peaks = refined_maxima(power, -2.2 * j, 2.2 * j, 4001, 1e-12)?;
    let widths = degenerate_peak_widths(j, gamma)?;
    println!("{:>10} {:>10} {:>8}", "delta/J", "|S21|", "FWHM/Γ");
    for (d, w) in peaks.iter().zip(widths) {
        println!("{:>10.6} {:>10.6} {:>8.4}", d / j, power(*d).sqrt(), w / gamma);
    }
    println!("sum of widths / Γ = {:.4}", widths.iter().sum::<f64>() / gamma);
    Ok(())
}
