//! Photon blockade in the fitted five-transmon chain: |S21| on a drive
//! frequency by amplitude grid next to the multiphoton lines.
//!
//! Pass `full` for the 121-state basis and 61 frequencies (a few minutes);
//! the default is a 56-state basis on 31 frequencies.

use bh_transport::config::{ghz, to_ghz, ChainConfig};
use bh_transport::eigen::{multiphoton_lines, sector_eigensolve};
use bh_transport::lattice::build_basis;
use bh_transport::spectroscopy::{sweep, SweepGrid};

fn main() -> bh_transport::Result<()> {
    let full = std::env::args().any(|a| a == "full");
    let params = ChainConfig::default().to_params();
    let basis = if full { build_basis(5, 3, 4)? } else { build_basis(5, 3, 3)? };
    let gamma = 16.0;
    let amps: Vec<f64> = [0.05, 0.5, 1.5, 3.0, 6.0, 12.0].iter().map(|f| f * gamma).collect();
    let freqs = SweepGrid::linspace(ghz(3.80), ghz(3.98), if full { 61 } else { 31 });
    let grid = SweepGrid::new(freqs.clone(), amps.clone())?;
    let table = sweep(&params, &basis, &grid);
    println!("{} states, {} cells, {} failed", basis.dim(), grid.len(), table.failures());

    print!("{:>9}", "GHz");
    for a in &amps {
        print!(" {:>7}", format!("{:.2}Γ", a / gamma));
    }
    println!();
    for (i, f) in freqs.iter().enumerate() {
        print!("{:>9.4}", to_ghz(*f));
        for k in 0..amps.len() {
            print!(" {:>7.3}", table.magnitudes_at(&grid, k)[i]);
        }
        println!();
    }

    let spec = sector_eigensolve(&params, &basis)?;
    let lines: Vec<String> = multiphoton_lines(&spec, basis.total_cap() as usize)
        .into_iter()
        .filter(|&(_, w)| w >= freqs[0] && w <= freqs[freqs.len() - 1])
        .map(|(n, w)| format!("{n}:{:.4}", to_ghz(w)))
        .collect();
    println!("multiphoton lines in range (n:GHz): {}", lines.join(" "));
    Ok(())
}
