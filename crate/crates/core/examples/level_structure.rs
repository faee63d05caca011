//! Eigenlevels of the fitted chain: doublon band, multiphoton lines and
//! spacing statistics of the densest sector against uniform parameters.

use bh_transport::config::{ghz, to_ghz, ChainConfig};
use bh_transport::eigen::{densest_sector, eigenstate_projection, level_spacing_stats, sector_eigensolve};
use bh_transport::lattice::build_basis;

fn main() -> bh_transport::Result<()> {
    let basis = build_basis(5, 3, 4)?;
    let fitted = ChainConfig::default().to_params();
    let spec = sector_eigensolve(&fitted, &basis)?;
    println!("{} levels in sectors of size {:?}", spec.len(), spec.sectors.iter().map(|s| s.energies.len()).collect::<Vec<_>>());

    let two = spec.sector(2).expect("two-photon sector");
    for (k, &e) in two.energies.iter().take(6).enumerate() {
        let doubly: f64 = two.states.iter().zip(two.vectors.column(k).iter()).filter(|(s, _)| s.contains(&2)).map(|(_, a)| a * a).sum();
        println!("two-photon level {k}: E/2π = {:.4} GHz, doubly occupied weight {doubly:.3}", to_ghz(spec.lab_energy(2, e)));
    }
    let lowest_two = spec.global_levels().iter().position(|l| l.0 == 2).expect("two-photon level");
    let top: Vec<String> = eigenstate_projection(&spec, lowest_two)?
        .into_iter()
        .take(4)
        .map(|(occ, a)| format!("{a:+.3}|{}⟩", occ.iter().map(|d| d.to_string()).collect::<String>()))
        .collect();
    println!("lowest two-photon state ≈ {}", top.join(" "));

    let mut ideal = fitted.clone();
    let mean_alpha = fitted.anharmonicity.iter().sum::<f64>() / 5.0;
    ideal.site_freq = vec![ghz(3.9); 5];
    ideal.anharmonicity = vec![mean_alpha; 5];
    let sector = densest_sector(&spec);
    for (name, p) in [("fitted", &fitted), ("uniform", &ideal)] {
        let st = level_spacing_stats(&sector_eigensolve(p, &basis)?, sector)?;
        println!("{name:>8}: sector {sector}, KS(WD) = {:.3}, KS(Poisson) = {:.3}", st.ks_wigner_dyson, st.ks_poisson);
    }
    Ok(())
}
