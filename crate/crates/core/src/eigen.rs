//! Excitation-sector spectra of the undriven chain, multiphoton lines,
//! eigenstate projections and nearest-neighbour spacing statistics.

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::{build_hamiltonian, ChainParams, FockBasis};

/// Eigenpairs of one excitation sector.
#[derive(Debug, Clone)]
pub struct SectorLevels {
    /// Total excitation number.
    pub n: usize,
    /// Ascending energies in the frame of `EigenSpectrum::frame`.
    pub energies: Vec<f64>,
    /// Eigenvectors as columns over the sector's occupation tuples.
    pub vectors: DMatrix<f64>,
    /// Occupation tuples of the sector, in basis order.
    pub states: Vec<Vec<u32>>,
}

/// Sector-resolved spectrum of the undriven Hamiltonian.
#[derive(Debug, Clone)]
pub struct EigenSpectrum {
    /// Rotating-frame frequency the energies are measured in.
    pub frame: f64,
    pub sectors: Vec<SectorLevels>,
}

impl EigenSpectrum {
    /// Energy of an n-excitation level in the laboratory frame.
    pub fn lab_energy(&self, n: usize, level: f64) -> f64 {
        level + n as f64 * self.frame
    }

    pub fn sector(&self, n: usize) -> Option<&SectorLevels> {
        self.sectors.get(n)
    }

    /// All levels as `(sector, index in sector, lab energy)` in ascending
    /// lab energy; index 0 is the vacuum.
    pub fn global_levels(&self) -> Vec<(usize, usize, f64)> {
        let mut all: Vec<(usize, usize, f64)> = self
            .sectors
            .iter()
            .flat_map(|s| s.energies.iter().enumerate().map(move |(k, &e)| (s.n, k, self.lab_energy(s.n, e))))
            .collect();
        all.sort_by(|a, b| a.2.total_cmp(&b.2).then(a.0.cmp(&b.0)).then(a.1.cmp(&b.1)));
        all
    }

    pub fn len(&self) -> usize {
        self.sectors.iter().map(|s| s.energies.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Dense symmetric eigensolve of every sector block of the undriven
/// Hamiltonian. Energies are relative to the vacuum, which is exactly zero.
pub fn sector_eigensolve(params: &ChainParams, basis: &FockBasis) -> Result<EigenSpectrum> {
    if params.drive_amp != 0.0 {
        return Err(Error::InvalidParameter("level structure needs an undriven chain".into()));
    }
    let h = build_hamiltonian(params, basis)?;
    let mut blocks: Vec<(usize, DMatrix<f64>)> = basis
        .sectors()
        .iter()
        .enumerate()
        .map(|(n, r)| (n, DMatrix::zeros(r.len(), r.len())))
        .collect();
    let sector_of: Vec<usize> = basis
        .sectors()
        .iter()
        .enumerate()
        .flat_map(|(n, r)| std::iter::repeat_n(n, r.len()))
        .collect();
    for &(r, c, v) in h.entries() {
        let n = sector_of[r];
        if sector_of[c] != n {
            return Err(Error::InvalidParameter("Hamiltonian mixes excitation sectors".into()));
        }
        let start = basis.sectors()[n].start;
        blocks[n].1[(r - start, c - start)] = v.re;
    }
    let sectors = blocks
        .into_par_iter()
        .map(|(n, block)| {
            let range = basis.sectors()[n].clone();
            let eig = SymmetricEigen::new(block);
            let mut order: Vec<usize> = (0..range.len()).collect();
            order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
            let energies = order.iter().map(|&k| eig.eigenvalues[k]).collect();
            let vectors = DMatrix::from_fn(range.len(), range.len(), |r, c| eig.eigenvectors[(r, order[c])]);
            SectorLevels { n, energies, vectors, states: basis.states()[range].to_vec() }
        })
        .collect();
    Ok(EigenSpectrum { frame: params.drive_freq, sectors })
}

/// n-photon drive frequencies `E_lab/n` of every level in sectors
/// `1..=max_n`, as `(n, ω_d)` sorted by `n` then frequency.
pub fn multiphoton_lines(spectrum: &EigenSpectrum, max_n: usize) -> Vec<(usize, f64)> {
    let mut out = Vec::new();
    for s in spectrum.sectors.iter().filter(|s| s.n >= 1 && s.n <= max_n) {
        let mut lines: Vec<f64> = s.energies.iter().map(|&e| spectrum.lab_energy(s.n, e) / s.n as f64).collect();
        lines.sort_by(f64::total_cmp);
        out.extend(lines.into_iter().map(|w| (s.n, w)));
    }
    out
}

/// Amplitudes of the `index`-th level in global energy order over the
/// occupation tuples, sorted by decreasing magnitude.
pub fn eigenstate_projection(spectrum: &EigenSpectrum, index: usize) -> Result<Vec<(Vec<u32>, f64)>> {
    let levels = spectrum.global_levels();
    let &(n, k, _) = levels.get(index).ok_or(Error::IndexOutOfRange { index, len: levels.len() })?;
    let s = &spectrum.sectors[n];
    let mut amps: Vec<(Vec<u32>, f64)> = s.states.iter().cloned().zip(s.vectors.column(k).iter().copied()).collect();
    amps.sort_by(|a, b| b.1.abs().total_cmp(&a.1.abs()));
    Ok(amps)
}

/// Mean-normalized nearest-neighbour spacings and their Kolmogorov-Smirnov
/// distances to the Wigner-Dyson surmise and to the Poisson law.
#[derive(Debug, Clone)]
pub struct SpacingStats {
    pub spacings: Vec<f64>,
    pub ks_wigner_dyson: f64,
    pub ks_poisson: f64,
}

pub fn wigner_dyson_cdf(s: f64) -> f64 {
    1.0 - (-std::f64::consts::PI * s * s / 4.0).exp()
}

pub fn poisson_cdf(s: f64) -> f64 {
    1.0 - (-s).exp()
}

/// Kolmogorov-Smirnov distance between a sample and a continuous CDF.
pub fn ks_distance(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut x = samples.to_vec();
    x.sort_by(f64::total_cmp);
    let n = x.len() as f64;
    x.iter()
        .enumerate()
        .map(|(i, &v)| {
            let f = cdf(v);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

/// Spacing statistics of an arbitrary level list (sorted internally).
pub fn spacing_stats(levels: &[f64]) -> Result<SpacingStats> {
    if levels.len() < 3 {
        return Err(Error::TooFewLevels { needed: 3, found: levels.len() });
    }
    let mut e = levels.to_vec();
    e.sort_by(f64::total_cmp);
    let raw: Vec<f64> = e.windows(2).map(|w| w[1] - w[0]).collect();
    let mean = raw.iter().sum::<f64>() / raw.len() as f64;
    if !(mean > 0.0) {
        return Err(Error::InvalidParameter("levels are fully degenerate".into()));
    }
    let spacings: Vec<f64> = raw.iter().map(|s| s / mean).collect();
    Ok(SpacingStats {
        ks_wigner_dyson: ks_distance(&spacings, wigner_dyson_cdf),
        ks_poisson: ks_distance(&spacings, poisson_cdf),
        spacings,
    })
}

/// Spacing statistics of one excitation sector.
pub fn level_spacing_stats(spectrum: &EigenSpectrum, sector: usize) -> Result<SpacingStats> {
    let s = spectrum
        .sector(sector)
        .ok_or(Error::IndexOutOfRange { index: sector, len: spectrum.sectors.len() })?;
    spacing_stats(&s.energies)
}

/// Sector holding the most levels (the lowest such sector on ties).
pub fn densest_sector(spectrum: &EigenSpectrum) -> usize {
    spectrum
        .sectors
        .iter()
        .rev()
        .max_by_key(|s| s.energies.len())
        .map(|s| s.n)
        .unwrap_or(0)
}
