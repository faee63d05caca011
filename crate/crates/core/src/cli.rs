//! Run orchestration behind the `bh-transport` binary: one command per
//! analysis, CSV outputs with fixed headers, diagnostics on stderr.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use crate::analytics::{fit_lorentzian, linear_spectrum, refined_maxima};
use crate::config::{ghz, mhz, to_ghz, to_mhz, EngineConfig, RunConfig};
use crate::disorder::{brightest_peak_prominence, ensemble_transmission, histogram, DisorderSpec, Engine};
use crate::eigen::{densest_sector, eigenstate_projection, level_spacing_stats, multiphoton_lines, sector_eigensolve};
use crate::error::{Error, Result};
use crate::lattice::build_basis;
use crate::spectroscopy::{sweep, SweepGrid};

/// Header of `spectrum.csv`.
pub const SPECTRUM_HEADER: [&str; 6] = ["omega_d_GHz", "Omega_MHz", "re_S21", "im_S21", "abs_S21", "residual"];
/// Header of `levels.csv`.
pub const LEVELS_HEADER: [&str; 3] = ["sector", "index", "E_over_2pi_GHz"];
/// Header of `lines.csv`.
pub const LINES_HEADER: [&str; 2] = ["n_photons", "omega_d_GHz"];
/// Header of `peaks.csv`.
pub const PEAKS_HEADER: [&str; 3] = ["omega_d_GHz", "abs_S21", "fwhm_MHz"];
/// Header of each `disorder_*.csv`.
pub const REALIZATION_HEADER: [&str; 4] = ["omega_d_GHz", "re_S21", "im_S21", "abs_S21"];
/// Header of `averaged.csv`.
pub const AVERAGED_HEADER: [&str; 6] = ["sigma_MHz", "omega_d_GHz", "re_S21", "im_S21", "abs_S21", "mean_abs_S21"];
/// Header of `prominence.csv`.
pub const PROMINENCE_HEADER: [&str; 3] = ["sigma_MHz", "realization", "prominence"];
/// Header of `histogram.csv`.
pub const HISTOGRAM_HEADER: [&str; 3] = ["sigma_MHz", "bin_start", "count"];
/// Header of `spacings.csv`.
pub const SPACINGS_HEADER: [&str; 2] = ["sector", "spacing"];
/// Header of `projections.csv`.
pub const PROJECTIONS_HEADER: [&str; 5] = ["level", "sector", "E_over_2pi_GHz", "occupations", "amplitude"];

/// The four analyses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Linear,
    Sweep,
    Levels,
    Disorder,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Linear => "linear",
            Command::Sweep => "sweep",
            Command::Levels => "levels",
            Command::Disorder => "disorder",
        }
    }
}

/// Command-line overrides of the configuration.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
    pub seed: Option<u64>,
}

/// Machine-readable failure report written to stderr.
#[derive(Debug, Serialize)]
pub struct ErrorReport {
    pub command: String,
    pub kind: &'static str,
    pub messages: Vec<String>,
}

impl ErrorReport {
    pub fn new(command: Command, err: &Error) -> Self {
        let (kind, messages) = match err {
            Error::Config(v) => ("config", v.clone()),
            Error::Io(e) => ("io", vec![e.to_string()]),
            Error::Csv(e) => ("io", vec![e.to_string()]),
            Error::Json(e) => ("io", vec![e.to_string()]),
            e => ("runtime", vec![e.to_string()]),
        };
        Self { command: command.name().into(), kind, messages }
    }

    /// Process exit code: 2 for configuration errors, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.kind == "config" { 2 } else { 1 }
    }
}

/// Runs `command` for the configuration at `config_path`, applying the
/// overrides, inside a worker pool of the configured size. Returns the
/// output directory.
pub fn run(command: Command, config_path: &Path, overrides: &Overrides) -> Result<PathBuf> {
    let mut cfg = RunConfig::load(config_path)?;
    if let Some(out) = &overrides.out {
        cfg.output = Some(out.clone());
    }
    if overrides.workers.is_some() {
        cfg.workers = overrides.workers;
    }
    if let Some(seed) = overrides.seed {
        cfg.seed = seed;
    }
    cfg.validate()?;
    run_config(command, &cfg)
}

/// Runs `command` for an already validated configuration.
pub fn run_config(command: Command, cfg: &RunConfig) -> Result<PathBuf> {
    let out = cfg.output.clone().unwrap_or_else(|| PathBuf::from("out"));
    fs::create_dir_all(&out)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cfg.workers {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let start = Instant::now();
    pool.install(|| match command {
        Command::Linear => cmd_linear(cfg, &out),
        Command::Sweep => cmd_sweep(cfg, &out),
        Command::Levels => cmd_levels(cfg, &out),
        Command::Disorder => cmd_disorder(cfg, &out),
    })?;
    eprintln!("{} finished in {:.2} s, outputs in {}", command.name(), start.elapsed().as_secs_f64(), out.display());
    Ok(out)
}

fn writer(path: &Path, header: &[&str]) -> Result<csv::Writer<fs::File>> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    Ok(w)
}

fn row<const N: usize>(w: &mut csv::Writer<fs::File>, values: [String; N]) -> Result<()> {
    w.write_record(&values)?;
    Ok(())
}

fn num(x: f64) -> String {
    format!("{x}")
}

/// Linear-model spectrum with located peaks and fitted widths.
pub fn cmd_linear(cfg: &RunConfig, out: &Path) -> Result<()> {
    let params = cfg.chain.to_params();
    let freqs_ghz = cfg.linear.omega_d_ghz.values();
    let freqs: Vec<f64> = freqs_ghz.iter().map(|&f| ghz(f)).collect();
    let s21 = linear_spectrum(&params, &freqs)?;
    let mut w = writer(&out.join("spectrum.csv"), &SPECTRUM_HEADER)?;
    for (&f, s) in freqs_ghz.iter().zip(&s21) {
        row(&mut w, [num(f), num(0.0), num(s.re), num(s.im), num(s.norm()), num(0.0)])?;
    }
    w.flush()?;

    let mag2 = |f: f64| {
        let mut p = params.clone();
        p.drive_freq = f;
        crate::analytics::linear_s21(&p).map(|s| s.norm_sqr()).unwrap_or(0.0)
    };
    let (lo, hi) = (freqs[0], *freqs.last().unwrap_or(&freqs[0]));
    let peaks = if freqs.len() >= 3 { refined_maxima(mag2, lo, hi, freqs.len(), 1e-9 * (hi - lo).abs().max(1.0))? } else { vec![] };
    let gamma_scale = params.decay.iter().copied().fold(0.0, f64::max).max(1e-3);
    let mut w = writer(&out.join("peaks.csv"), &PEAKS_HEADER)?;
    for &p in &peaks {
        let width = fit_lorentzian(mag2, p, gamma_scale / 4.0).map(|(_, w)| w).unwrap_or(f64::NAN);
        row(&mut w, [num(to_ghz(p)), num(mag2(p).sqrt()), num(to_mhz(width))])?;
    }
    w.flush()?;
    eprintln!("linear: {} points, {} peaks", freqs.len(), peaks.len());
    Ok(())
}

/// Master-equation `S21` over the (ω_d, Ω) grid plus the multiphoton lines of
/// the same chain.
pub fn cmd_sweep(cfg: &RunConfig, out: &Path) -> Result<()> {
    let params = cfg.chain.to_params();
    let basis = build_basis(params.n_sites(), cfg.basis.per_site_cap, cfg.basis.total_cap)?;
    let (freqs_ghz, amps_mhz) = (cfg.sweep.omega_d_ghz.values(), cfg.sweep.omega_mhz.values());
    let grid = SweepGrid::new(
        freqs_ghz.iter().map(|&f| ghz(f)).collect(),
        amps_mhz.iter().map(|&f| mhz(f)).collect(),
    )?;
    eprintln!("sweep: {} states, {} grid cells", basis.dim(), grid.len());
    let table = sweep(&params, &basis, &grid);
    let mut w = writer(&out.join("spectrum.csv"), &SPECTRUM_HEADER)?;
    for (idx, r) in table.rows.iter().enumerate() {
        let (f, a) = (freqs_ghz[idx % freqs_ghz.len()], amps_mhz[idx / freqs_ghz.len()]);
        if let Some(e) = &r.error {
            eprintln!("cell ω_d/2π = {f} GHz, Ω/2π = {a} MHz failed: {e}");
        }
        row(
            &mut w,
            [
                num(f),
                num(a),
                num(r.s21.re),
                num(r.s21.im),
                num(r.s21.norm()),
                num(r.residual),
            ],
        )?;
    }
    w.flush()?;
    write_lines(cfg, out)?;
    eprintln!("sweep: {} failed cells", table.failures());
    Ok(())
}

fn write_lines(cfg: &RunConfig, out: &Path) -> Result<()> {
    let params = cfg.chain.to_params();
    let basis = build_basis(params.n_sites(), cfg.basis.per_site_cap, cfg.basis.total_cap)?;
    let spec = sector_eigensolve(&params, &basis)?;
    let max_n = cfg.levels.max_photons.unwrap_or(spec.sectors.len().saturating_sub(1));
    let mut w = writer(&out.join("lines.csv"), &LINES_HEADER)?;
    for (n, f) in multiphoton_lines(&spec, max_n) {
        row(&mut w, [n.to_string(), num(to_ghz(f))])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct SpacingReport {
    sector: usize,
    levels: usize,
    ks_wigner_dyson: f64,
    ks_poisson: f64,
}

/// Sector spectra, multiphoton lines, spacing statistics and selected
/// eigenstate projections.
pub fn cmd_levels(cfg: &RunConfig, out: &Path) -> Result<()> {
    let params = cfg.chain.to_params();
    let basis = build_basis(params.n_sites(), cfg.basis.per_site_cap, cfg.basis.total_cap)?;
    let spec = sector_eigensolve(&params, &basis)?;
    let mut w = writer(&out.join("levels.csv"), &LEVELS_HEADER)?;
    for s in &spec.sectors {
        for (k, &e) in s.energies.iter().enumerate() {
            row(&mut w, [s.n.to_string(), k.to_string(), num(to_ghz(spec.lab_energy(s.n, e)))])?;
        }
    }
    w.flush()?;
    write_lines(cfg, out)?;

    let sector = cfg.levels.sector.unwrap_or_else(|| densest_sector(&spec));
    let stats = level_spacing_stats(&spec, sector)?;
    let mut w = writer(&out.join("spacings.csv"), &SPACINGS_HEADER)?;
    for s in &stats.spacings {
        row(&mut w, [sector.to_string(), num(*s)])?;
    }
    w.flush()?;
    let report = SpacingReport {
        sector,
        levels: stats.spacings.len() + 1,
        ks_wigner_dyson: stats.ks_wigner_dyson,
        ks_poisson: stats.ks_poisson,
    };
    fs::write(out.join("spacing_stats.json"), serde_json::to_string_pretty(&report)? + "\n")?;

    let levels = spec.global_levels();
    let mut w = writer(&out.join("projections.csv"), &PROJECTIONS_HEADER)?;
    for &idx in &cfg.levels.projections {
        let &(n, _, e) = levels.get(idx).ok_or(Error::IndexOutOfRange { index: idx, len: levels.len() })?;
        for (occ, amp) in eigenstate_projection(&spec, idx)?.into_iter().filter(|a| a.1.abs() > 1e-12) {
            let occ: String = occ.iter().map(|d| d.to_string()).collect();
            row(&mut w, [idx.to_string(), n.to_string(), num(to_ghz(e)), occ, num(amp)])?;
        }
    }
    w.flush()?;
    eprintln!(
        "levels: {} levels, sector {sector}: KS(WD) = {:.4}, KS(Poisson) = {:.4}",
        spec.len(),
        stats.ks_wigner_dyson,
        stats.ks_poisson
    );
    Ok(())
}

/// Disorder ensembles: per-realization curves, averaged curves and the
/// brightest-peak prominence samples with histograms.
pub fn cmd_disorder(cfg: &RunConfig, out: &Path) -> Result<()> {
    let params = cfg.chain.to_params();
    let d = &cfg.disorder;
    let base_ghz = d
        .base_freq_ghz
        .unwrap_or_else(|| cfg.chain.site_freq_ghz.iter().sum::<f64>() / cfg.chain.site_freq_ghz.len() as f64);
    let freqs_ghz = d.omega_d_ghz.values();
    let freqs: Vec<f64> = freqs_ghz.iter().map(|&f| ghz(f)).collect();
    let engine = match d.engine {
        EngineConfig::Linear => Engine::Linear,
        EngineConfig::Quantum { omega_mhz } => Engine::Quantum {
            amplitude: mhz(omega_mhz),
            basis: build_basis(params.n_sites(), cfg.basis.per_site_cap, cfg.basis.total_cap)?,
        },
    };
    let mut avg = writer(&out.join("averaged.csv"), &AVERAGED_HEADER)?;
    let mut prom = writer(&out.join("prominence.csv"), &PROMINENCE_HEADER)?;
    let mut hist = writer(&out.join("histogram.csv"), &HISTOGRAM_HEADER)?;
    for (si, &sigma) in d.sigma_mhz.iter().enumerate() {
        let spec = DisorderSpec { base_freq: ghz(base_ghz), sigma: mhz(sigma), n_realizations: d.n_realizations, seed: cfg.seed };
        let ens = ensemble_transmission(&spec, &params, &freqs, &engine)?;
        let mut samples = Vec::new();
        for (k, curve) in ens.curves.iter().enumerate() {
            let Some(curve) = curve else {
                eprintln!("σ = {sigma} MHz realization {k} failed");
                continue;
            };
            let mut w = writer(&out.join(format!("disorder_s{si}_r{k:04}.csv")), &REALIZATION_HEADER)?;
            for (&f, s) in freqs_ghz.iter().zip(curve) {
                row(&mut w, [num(f), num(s.re), num(s.im), num(s.norm())])?;
            }
            w.flush()?;
            let p = brightest_peak_prominence(&curve.iter().map(|s| s.norm()).collect::<Vec<_>>())?;
            row(&mut prom, [num(sigma), k.to_string(), num(p)])?;
            samples.push(p);
        }
        for ((&f, s), m) in freqs_ghz.iter().zip(&ens.averaged).zip(&ens.mean_magnitude) {
            row(&mut avg, [num(sigma), num(f), num(s.re), num(s.im), num(s.norm()), num(*m)])?;
        }
        let (edges, counts) = histogram(&samples, 0.0, 1.0, d.bins);
        for (e, c) in edges.iter().zip(counts) {
            row(&mut hist, [num(sigma), num(*e), c.to_string()])?;
        }
        eprintln!("disorder: σ = {sigma} MHz, {} realizations, {} failed", d.n_realizations, ens.failures);
    }
    avg.flush()?;
    prom.flush()?;
    hist.flush()?;
    Ok(())
}
