//! Input-output transmission from the steady state and drive sweeps.

use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::{build_hamiltonian, raising_op, ChainParams, FockBasis};
use crate::liouvillian::{build_liouvillian, collapse_ops, expectation, steady_state, SteadyState};

/// Transmission at one drive setting with its solver diagnostics.
#[derive(Debug, Clone)]
pub struct S21Point {
    pub s21: Complex64,
    pub steady: SteadyState,
}

/// `S21 = 2√(γ_1 γ_N) Tr[ρ_ss b_N†] / (iΩ)` at the drive stored in `params`.
pub fn s21_point(params: &ChainParams, basis: &FockBasis) -> Result<S21Point> {
    params.validate()?;
    if params.drive_amp <= 0.0 {
        return Err(Error::InvalidParameter("drive amplitude must be positive".into()));
    }
    let n = params.n_sites();
    let (g1, gn) = (params.decay[0], params.decay[n - 1]);
    if g1 <= 0.0 || gn <= 0.0 {
        return Err(Error::InvalidParameter("edge decay rates must be positive".into()));
    }
    let h = build_hamiltonian(params, basis)?;
    let l = build_liouvillian(&h, &collapse_ops(params, basis)?)?;
    let steady = steady_state(&l)?;
    let out = expectation(&steady.rho, &raising_op(basis, n)?)?;
    let s21 = 2.0 * (g1 * gn).sqrt() * out / (Complex64::new(0.0, 1.0) * params.drive_amp);
    Ok(S21Point { s21, steady })
}

/// Drive frequencies and amplitudes of a sweep, each strictly increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    omega_d: Vec<f64>,
    amplitudes: Vec<f64>,
}

impl SweepGrid {
    pub fn new(omega_d: Vec<f64>, amplitudes: Vec<f64>) -> Result<Self> {
        for (name, axis) in [("drive frequency", &omega_d), ("drive amplitude", &amplitudes)] {
            if axis.is_empty() {
                return Err(Error::InvalidParameter(format!("{name} axis is empty")));
            }
            if axis.iter().any(|v| !v.is_finite()) || axis.windows(2).any(|w| w[1] <= w[0]) {
                return Err(Error::InvalidParameter(format!("{name} axis must be finite and strictly increasing")));
            }
        }
        Ok(Self { omega_d, amplitudes })
    }

    /// `n` evenly spaced points from `lo` to `hi` inclusive.
    pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        match n {
            0 => Vec::new(),
            1 => vec![lo],
            _ => (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect(),
        }
    }

    pub fn omega_d(&self) -> &[f64] {
        &self.omega_d
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn len(&self) -> usize {
        self.omega_d.len() * self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Grid cells with the amplitude as the outer and the frequency as the
    /// inner index.
    pub fn cells(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.amplitudes.iter().flat_map(move |&a| self.omega_d.iter().map(move |&w| (w, a)))
    }
}

/// One sweep cell. Failed cells carry NaN values and the error text.
#[derive(Debug, Clone)]
pub struct SpectrumRow {
    pub omega_d: f64,
    pub amplitude: f64,
    pub s21: Complex64,
    pub residual: f64,
    pub iterations: usize,
    pub seconds: f64,
    pub error: Option<String>,
}

/// Sweep results in grid order.
#[derive(Debug, Clone, Default)]
pub struct SpectrumTable {
    pub rows: Vec<SpectrumRow>,
}

impl SpectrumTable {
    /// `|S21|` along the frequency axis at the `k`-th amplitude.
    pub fn magnitudes_at(&self, grid: &SweepGrid, k: usize) -> Vec<f64> {
        let n = grid.omega_d().len();
        self.rows[k * n..(k + 1) * n].iter().map(|r| r.s21.norm()).collect()
    }

    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| r.error.is_some()).count()
    }
}

/// Solves every cell of `grid` on the current rayon pool. Cell failures are
/// recorded in their rows and never abort the sweep.
pub fn sweep(params: &ChainParams, basis: &FockBasis, grid: &SweepGrid) -> SpectrumTable {
    let cells: Vec<(f64, f64)> = grid.cells().collect();
    let rows = cells
        .par_iter()
        .map(|&(w, a)| {
            let start = Instant::now();
            let p = params.clone().with_drive(a, w);
            let result = s21_point(&p, basis);
            let seconds = start.elapsed().as_secs_f64();
            match result {
                Ok(pt) => SpectrumRow {
                    omega_d: w,
                    amplitude: a,
                    s21: pt.s21,
                    residual: pt.steady.residual,
                    iterations: pt.steady.iterations,
                    seconds,
                    error: None,
                },
                Err(e) => SpectrumRow {
                    omega_d: w,
                    amplitude: a,
                    s21: Complex64::new(f64::NAN, f64::NAN),
                    residual: f64::NAN,
                    iterations: 0,
                    seconds,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    SpectrumTable { rows }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytics::linear_s21;
    use crate::lattice::build_basis;

    #[test]
    fn weak_drive_follows_linear_model() {
        let basis = build_basis(3, 2, 2).unwrap();
        let (j, g) = (1.0, 0.2);
        for d in [-1.3, -0.5, 0.0, 0.4, 1.41] {
            let p = ChainParams::uniform(3, 0.0, -4.0, j, g).with_drive(g / 100.0, d);
            let q = s21_point(&p, &basis).unwrap().s21;
            let l = linear_s21(&p).unwrap();
            assert!((q - l).norm() < 1e-3 * l.norm().max(1e-3), "δ = {d}: {q} vs {l}");
        }
    }

    #[test]
    fn rejects_zero_drive() {
        let basis = build_basis(2, 1, 2).unwrap();
        let p = ChainParams::uniform(2, 0.0, -1.0, 1.0, 0.3);
        assert!(s21_point(&p, &basis).is_err());
    }

    #[test]
    fn grid_validation() {
        assert!(SweepGrid::new(vec![], vec![1.0]).is_err());
        assert!(SweepGrid::new(vec![1.0, 1.0], vec![1.0]).is_err());
        assert!(SweepGrid::new(vec![1.0, 2.0], vec![0.5]).is_ok());
        assert_eq!(SweepGrid::linspace(0.0, 1.0, 3), vec![0.0, 0.5, 1.0]);
    }

    #[test]
    fn sweep_order_is_amplitude_major() {
        let basis = build_basis(2, 1, 2).unwrap();
        let p = ChainParams::uniform(2, 0.0, -1.0, 1.0, 0.3);
        let grid = SweepGrid::new(vec![-1.0, 0.0, 1.0], vec![0.01, 0.02]).unwrap();
        let table = sweep(&p, &basis, &grid);
        assert_eq!(table.rows.len(), 6);
        assert_eq!((table.rows[1].omega_d, table.rows[1].amplitude), (0.0, 0.01));
        assert_eq!((table.rows[3].omega_d, table.rows[3].amplitude), (-1.0, 0.02));
        assert_eq!(table.failures(), 0);
        let single = s21_point(&p.clone().with_drive(0.02, 1.0), &basis).unwrap().s21;
        assert_eq!(table.rows[5].s21, single);
    }

    #[test]
    fn failed_cells_are_recorded() {
        let basis = build_basis(2, 1, 2).unwrap();
        let mut p = ChainParams::uniform(2, 0.0, -1.0, 1.0, 0.3);
        p.decay[1] = 0.0;
        let grid = SweepGrid::new(vec![0.0], vec![0.1]).unwrap();
        let table = sweep(&p, &basis, &grid);
        assert!(table.rows[0].s21.re.is_nan());
        assert!(table.rows[0].error.is_some());
    }
}
