//! Gaussian frequency disorder, ensemble-averaged transmission and the
//! brightest-peak prominence statistic.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::analytics::linear_s21;
use crate::error::{Error, Result};
use crate::lattice::{ChainParams, FockBasis};
use crate::spectroscopy::s21_point;

/// Site-frequency disorder around a common base frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct DisorderSpec {
    /// Base site frequency (angular).
    pub base_freq: f64,
    /// Standard deviation of the shifts (angular).
    pub sigma: f64,
    pub n_realizations: usize,
    pub seed: u64,
}

impl DisorderSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!("disorder width {} must be non-negative", self.sigma)));
        }
        if self.n_realizations == 0 {
            return Err(Error::InvalidParameter("need at least one realization".into()));
        }
        Ok(())
    }
}

/// Site frequencies `base + δω_i`, `δω_i ~ N(0, σ)`, for one realization.
///
/// Each realization owns the ChaCha8 stream numbered by its index under the
/// spec's seed, and shifts are drawn in site order, so a realization does not
/// depend on which others are computed or in what order.
pub fn sample_realization(spec: &DisorderSpec, base: &ChainParams, index: usize) -> Result<ChainParams> {
    spec.validate()?;
    if index >= spec.n_realizations {
        return Err(Error::IndexOutOfRange { index, len: spec.n_realizations });
    }
    let mut p = base.clone();
    if spec.sigma == 0.0 {
        p.site_freq = vec![spec.base_freq; p.n_sites()];
        return Ok(p);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(index as u64);
    let normal = Normal::new(0.0, spec.sigma).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    for w in &mut p.site_freq {
        *w = spec.base_freq + normal.sample(&mut rng);
    }
    Ok(p)
}

/// How each realization's transmission is computed.
#[derive(Debug, Clone)]
pub enum Engine {
    /// Linearized Langevin model.
    Linear,
    /// Master-equation steady state at the given drive amplitude.
    Quantum { amplitude: f64, basis: FockBasis },
}

/// Per-realization curves and their complex average.
#[derive(Debug, Clone)]
pub struct EnsembleResult {
    /// Complex S21 per realization; `None` for failed realizations.
    pub curves: Vec<Option<Vec<Complex64>>>,
    /// Mean of the successful complex curves.
    pub averaged: Vec<Complex64>,
    /// Mean of the successful `|S21|` curves.
    pub mean_magnitude: Vec<f64>,
    pub failures: usize,
}

impl EnsembleResult {
    /// `|⟨S21⟩|` at every drive frequency.
    pub fn averaged_magnitude(&self) -> Vec<f64> {
        self.averaged.iter().map(|s| s.norm()).collect()
    }
}

fn curve(p: &ChainParams, omega_d: &[f64], engine: &Engine) -> Result<Vec<Complex64>> {
    let mut p = p.clone();
    omega_d
        .iter()
        .map(|&w| match engine {
            Engine::Linear => {
                p.drive_freq = w;
                linear_s21(&p)
            }
            Engine::Quantum { amplitude, basis } => {
                s21_point(&p.clone().with_drive(*amplitude, w), basis).map(|pt| pt.s21)
            }
        })
        .collect()
}

/// Transmission of every realization over the drive frequencies `omega_d`.
pub fn ensemble_transmission(
    spec: &DisorderSpec,
    base: &ChainParams,
    omega_d: &[f64],
    engine: &Engine,
) -> Result<EnsembleResult> {
    spec.validate()?;
    if omega_d.is_empty() {
        return Err(Error::InvalidParameter("drive frequency grid is empty".into()));
    }
    let curves: Vec<Option<Vec<Complex64>>> = (0..spec.n_realizations)
        .into_par_iter()
        .map(|k| sample_realization(spec, base, k).and_then(|p| curve(&p, omega_d, engine)).ok())
        .collect();
    let ok: Vec<&Vec<Complex64>> = curves.iter().flatten().collect();
    let failures = curves.len() - ok.len();
    if ok.is_empty() {
        return Err(Error::SingularSystem("every realization failed".into()));
    }
    let n = ok.len() as f64;
    let averaged = (0..omega_d.len()).map(|i| ok.iter().map(|c| c[i]).sum::<Complex64>() / n).collect();
    let mean_magnitude = (0..omega_d.len()).map(|i| ok.iter().map(|c| c[i].norm()).sum::<f64>() / n).collect();
    Ok(EnsembleResult { curves, averaged, mean_magnitude, failures })
}

/// Points averaged by [`brightest_peak_prominence`].
pub const PROMINENCE_POINTS: usize = 10;

/// Mean of the 10 samples centred on the maximum, the window shifted inward
/// at the ends of the curve.
pub fn brightest_peak_prominence(curve: &[f64]) -> Result<f64> {
    let n = curve.len();
    if n < PROMINENCE_POINTS {
        return Err(Error::CurveTooShort { needed: PROMINENCE_POINTS, found: n });
    }
    let arg = curve
        .iter()
        .enumerate()
        .fold(0, |best, (k, &v)| if v > curve[best] { k } else { best });
    let start = arg.saturating_sub(PROMINENCE_POINTS / 2).min(n - PROMINENCE_POINTS);
    Ok(curve[start..start + PROMINENCE_POINTS].iter().sum::<f64>() / PROMINENCE_POINTS as f64)
}

/// Prominence samples of one disorder width with a fixed-bin histogram.
#[derive(Debug, Clone)]
pub struct ProminenceDistribution {
    pub sigma: f64,
    pub samples: Vec<f64>,
    /// Left edges of the bins.
    pub bin_edges: Vec<f64>,
    pub counts: Vec<usize>,
}

impl ProminenceDistribution {
    pub fn median(&self) -> f64 {
        median(&self.samples)
    }
}

pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 { v[m] } else { 0.5 * (v[m - 1] + v[m]) }
}

/// Histogram of `samples` over `n_bins` equal bins on `[lo, hi]`; values at
/// `hi` land in the last bin and values outside are dropped.
pub fn histogram(samples: &[f64], lo: f64, hi: f64, n_bins: usize) -> (Vec<f64>, Vec<usize>) {
    let width = (hi - lo) / n_bins as f64;
    let edges = (0..n_bins).map(|k| lo + width * k as f64).collect();
    let mut counts = vec![0; n_bins];
    for &s in samples {
        if s < lo || s > hi || !s.is_finite() {
            continue;
        }
        let k = (((s - lo) / width) as usize).min(n_bins - 1);
        counts[k] += 1;
    }
    (edges, counts)
}

/// Brightest-peak prominence of every realization for each spec, binned on
/// `[0, 1]` (the passive range of `|S21|`).
pub fn prominence_distribution(
    specs: &[DisorderSpec],
    base: &ChainParams,
    omega_d: &[f64],
    engine: &Engine,
    n_bins: usize,
) -> Result<Vec<ProminenceDistribution>> {
    if n_bins == 0 {
        return Err(Error::InvalidParameter("histogram needs at least one bin".into()));
    }
    specs
        .iter()
        .map(|spec| {
            let ens = ensemble_transmission(spec, base, omega_d, engine)?;
            let samples = ens
                .curves
                .iter()
                .flatten()
                .map(|c| brightest_peak_prominence(&c.iter().map(|s| s.norm()).collect::<Vec<_>>()))
                .collect::<Result<Vec<_>>>()?;
            let (bin_edges, counts) = histogram(&samples, 0.0, 1.0, n_bins);
            Ok(ProminenceDistribution { sigma: spec.sigma, samples, bin_edges, counts })
        })
        .collect()
}
