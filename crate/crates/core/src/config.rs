//! JSON run configuration in laboratory units.
//!
//! Frequencies are ordinary frequencies in GHz (site and drive frequencies)
//! or MHz (anharmonicity, tunneling, drive amplitude, disorder width); rates
//! are in µs⁻¹. Internally everything is angular in rad/µs, and the rates are
//! used as Lindblad rates unchanged.

use std::f64::consts::TAU;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::ChainParams;

/// GHz to rad/µs.
pub fn ghz(f: f64) -> f64 {
    f * TAU * 1e3
}

/// MHz to rad/µs.
pub fn mhz(f: f64) -> f64 {
    f * TAU
}

/// rad/µs to GHz.
pub fn to_ghz(w: f64) -> f64 {
    w / (TAU * 1e3)
}

/// rad/µs to MHz.
pub fn to_mhz(w: f64) -> f64 {
    w / TAU
}

/// Chain parameters. Defaults are the fitted values of the five-transmon
/// device.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChainConfig {
    pub site_freq_ghz: Vec<f64>,
    pub anharmonicity_mhz: Vec<f64>,
    pub tunneling_mhz: f64,
    pub decay_per_us: Vec<f64>,
    /// Pure dephasing, zero unless given.
    pub dephasing_per_us: Option<Vec<f64>>,
}

impl Default for ChainConfig {
    fn default() -> Self {
        Self {
            site_freq_ghz: vec![3.898, 3.898, 3.9, 3.901, 3.901],
            anharmonicity_mhz: vec![-188.0, -178.0, -178.0, -178.0, -188.0],
            tunneling_mhz: 41.0,
            decay_per_us: vec![16.0, 6.0, 0.1, 3.0, 16.0],
            dephasing_per_us: None,
        }
    }
}

impl ChainConfig {
    /// Undriven internal parameters; the rotating frame is the first site
    /// frequency until a drive is set.
    pub fn to_params(&self) -> ChainParams {
        let n = self.site_freq_ghz.len();
        let site_freq: Vec<f64> = self.site_freq_ghz.iter().map(|&f| ghz(f)).collect();
        ChainParams {
            drive_freq: site_freq.first().copied().unwrap_or(0.0),
            site_freq,
            anharmonicity: self.anharmonicity_mhz.iter().map(|&a| mhz(a)).collect(),
            tunneling: mhz(self.tunneling_mhz),
            drive_amp: 0.0,
            decay: self.decay_per_us.clone(),
            dephasing: self.dephasing_per_us.clone().unwrap_or_else(|| vec![0.0; n]),
        }
    }

    fn check(&self, errors: &mut Vec<String>) {
        let n = self.site_freq_ghz.len();
        if n == 0 {
            errors.push("chain.site_freq_ghz must list at least one site".into());
        }
        let mut lists = vec![
            ("chain.anharmonicity_mhz", &self.anharmonicity_mhz),
            ("chain.decay_per_us", &self.decay_per_us),
        ];
        if let Some(d) = &self.dephasing_per_us {
            lists.push(("chain.dephasing_per_us", d));
        }
        for (name, v) in &lists {
            if v.len() != n {
                errors.push(format!("{name} has {} entries but the chain has {n} sites", v.len()));
            }
        }
        lists.push(("chain.site_freq_ghz", &self.site_freq_ghz));
        for (name, v) in &lists {
            if v.iter().any(|x| !x.is_finite()) {
                errors.push(format!("{name} contains a non-finite value"));
            }
        }
        for (name, v) in &lists[1..] {
            if name.ends_with("per_us") && v.iter().any(|&x| x < 0.0) {
                errors.push(format!("{name} contains a negative rate"));
            }
        }
        if !self.tunneling_mhz.is_finite() {
            errors.push("chain.tunneling_mhz must be finite".into());
        }
    }
}

/// Truncation of the Fock space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BasisConfig {
    pub per_site_cap: u32,
    pub total_cap: u32,
}

impl Default for BasisConfig {
    fn default() -> Self {
        Self { per_site_cap: 3, total_cap: 4 }
    }
}

/// An axis given either as an evenly spaced range or as explicit values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Axis {
    Range { start: f64, stop: f64, points: usize },
    Values(Vec<f64>),
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Axis::Range { start, stop, points } => crate::spectroscopy::SweepGrid::linspace(*start, *stop, *points),
            Axis::Values(v) => v.clone(),
        }
    }

    fn check(&self, name: &str, errors: &mut Vec<String>) {
        let v = self.values();
        if v.is_empty() {
            errors.push(format!("{name} is empty"));
        } else if v.iter().any(|x| !x.is_finite()) {
            errors.push(format!("{name} contains a non-finite value"));
        } else if v.windows(2).any(|w| w[1] <= w[0]) {
            errors.push(format!("{name} must be strictly increasing"));
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LinearConfig {
    pub omega_d_ghz: Axis,
}

impl Default for LinearConfig {
    fn default() -> Self {
        Self { omega_d_ghz: Axis::Range { start: 3.8, stop: 4.0, points: 2001 } }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub omega_d_ghz: Axis,
    /// Drive amplitude `Ω/2π`.
    pub omega_mhz: Axis,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            omega_d_ghz: Axis::Range { start: 3.8, stop: 3.98, points: 61 },
            omega_mhz: Axis::Values(vec![0.05, 0.5, 1.5, 3.0, 6.0, 12.0]),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LevelsConfig {
    /// Highest photon number of the multiphoton lines; all sectors if absent.
    pub max_photons: Option<usize>,
    /// Sector of the spacing statistics; the sector with most levels if absent.
    pub sector: Option<usize>,
    /// Global level indices whose eigenvectors are written out.
    pub projections: Vec<usize>,
}

impl Default for LevelsConfig {
    fn default() -> Self {
        Self { max_photons: None, sector: None, projections: vec![1, 11, 20] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EngineConfig {
    Linear,
    Quantum { omega_mhz: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DisorderConfig {
    /// Base site frequency; the mean of the chain frequencies if absent.
    pub base_freq_ghz: Option<f64>,
    pub sigma_mhz: Vec<f64>,
    pub n_realizations: usize,
    pub omega_d_ghz: Axis,
    pub engine: EngineConfig,
    pub bins: usize,
}

impl Default for DisorderConfig {
    fn default() -> Self {
        Self {
            base_freq_ghz: Some(3.9),
            sigma_mhz: vec![0.0, 6.0, 20.0, 40.0],
            n_realizations: 100,
            omega_d_ghz: Axis::Range { start: 3.75, stop: 4.05, points: 601 },
            engine: EngineConfig::Linear,
            bins: 20,
        }
    }
}

/// Complete run configuration.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub chain: ChainConfig,
    pub basis: BasisConfig,
    pub linear: LinearConfig,
    pub sweep: SweepConfig,
    pub levels: LevelsConfig,
    pub disorder: DisorderConfig,
    pub output: Option<PathBuf>,
    pub workers: Option<usize>,
    pub seed: u64,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| Error::Config(vec![e.to_string()]))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(vec![format!("cannot read {}: {e}", path.display())]))?;
        Self::from_json(&text)
    }

    /// Every violation at once.
    pub fn validate(&self) -> Result<()> {
        let mut errors = Vec::new();
        self.chain.check(&mut errors);
        if self.basis.per_site_cap == 0 || self.basis.total_cap == 0 {
            errors.push("basis caps must be positive".into());
        }
        self.linear.omega_d_ghz.check("linear.omega_d_ghz", &mut errors);
        self.sweep.omega_d_ghz.check("sweep.omega_d_ghz", &mut errors);
        self.sweep.omega_mhz.check("sweep.omega_mhz", &mut errors);
        if self.sweep.omega_mhz.values().iter().any(|&x| x <= 0.0) {
            errors.push("sweep.omega_mhz must be positive".into());
        }
        self.disorder.omega_d_ghz.check("disorder.omega_d_ghz", &mut errors);
        if self.disorder.sigma_mhz.is_empty() {
            errors.push("disorder.sigma_mhz is empty".into());
        }
        if self.disorder.sigma_mhz.iter().any(|&s| !(s >= 0.0 && s.is_finite())) {
            errors.push("disorder.sigma_mhz must be non-negative".into());
        }
        if self.disorder.n_realizations == 0 {
            errors.push("disorder.n_realizations must be at least 1".into());
        }
        if self.disorder.bins == 0 {
            errors.push("disorder.bins must be at least 1".into());
        }
        if self.disorder.omega_d_ghz.values().len() < crate::disorder::PROMINENCE_POINTS {
            errors.push(format!(
                "disorder.omega_d_ghz needs at least {} points for the prominence",
                crate::disorder::PROMINENCE_POINTS
            ));
        }
        if let EngineConfig::Quantum { omega_mhz } = self.disorder.engine {
            if !(omega_mhz > 0.0 && omega_mhz.is_finite()) {
                errors.push("disorder.engine.quantum.omega_mhz must be positive".into());
            }
        }
        if self.workers == Some(0) {
            errors.push("workers must be at least 1".into());
        }
        if errors.is_empty() { Ok(()) } else { Err(Error::Config(errors)) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_gives_defaults() {
        let cfg = RunConfig::from_json("{}").unwrap();
        assert_eq!(cfg, RunConfig::default());
        let p = cfg.chain.to_params();
        assert_eq!(p.n_sites(), 5);
        assert!((p.tunneling - 2.0 * std::f64::consts::PI * 41.0).abs() < 1e-12);
        assert_eq!(p.decay, vec![16.0, 6.0, 0.1, 3.0, 16.0]);
        assert_eq!(p.dephasing, vec![0.0; 5]);
    }

    #[test]
    fn unit_round_trip() {
        for f in [3.898, 3.9, 4.05, 1e-3, 12.345678] {
            assert!((to_ghz(ghz(f)) - f).abs() <= 1e-12 * f);
            assert!((to_mhz(mhz(f)) - f).abs() <= 1e-12 * f);
        }
    }

    #[test]
    fn reports_all_violations() {
        let text = r#"{
            "chain": {"site_freq_ghz": [3.9, 3.9], "anharmonicity_mhz": [-180],
                      "tunneling_mhz": 41, "decay_per_us": [1, -2]},
            "basis": {"per_site_cap": 0, "total_cap": 2},
            "disorder": {"n_realizations": 0},
            "workers": 0
        }"#;
        let Err(Error::Config(errs)) = RunConfig::from_json(text) else { panic!("expected config error") };
        assert_eq!(errs.len(), 5, "{errs:?}");
    }

    #[test]
    fn rejects_unknown_fields_and_bad_axes() {
        assert!(RunConfig::from_json(r#"{"chian": {}}"#).is_err());
        let bad = r#"{"sweep": {"omega_d_ghz": [3.9, 3.8], "omega_mhz": {"start": 1, "stop": 2, "points": 0}}}"#;
        let Err(Error::Config(errs)) = RunConfig::from_json(bad) else { panic!() };
        assert_eq!(errs.len(), 2, "{errs:?}");
    }

    #[test]
    fn quantum_engine_parses() {
        let cfg = RunConfig::from_json(r#"{"disorder": {"engine": {"quantum": {"omega_mhz": 0.2}}}}"#).unwrap();
        assert_eq!(cfg.disorder.engine, EngineConfig::Quantum { omega_mhz: 0.2 });
        let cfg = RunConfig::from_json(r#"{"disorder": {"engine": "linear"}}"#).unwrap();
        assert_eq!(cfg.disorder.engine, EngineConfig::Linear);
    }
}
