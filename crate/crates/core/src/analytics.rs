//! Closed-form limits of the chain: the linearized Langevin solution, the
//! dressed single-excitation modes with their Maxwell-Bloch transmission,
//! and the two-qutrit perturbative terms and sector resonances.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::ChainParams;

type C = Complex64;

const I: C = C::new(0.0, 1.0);

/// Linear-response transmission at the drive frequency `params.drive_freq`.
///
/// Solves the tridiagonal steady-state Langevin system
/// `i(ω_i − ω_d)b_i† − (γ_i/2)b_i† + iJ(b_{i−1}† + b_{i+1}†) + δ_{i1}√γ_1 b_in† = 0`
/// and returns `√γ_N b_N† / b_in†`. The drive amplitude is ignored.
pub fn linear_s21(params: &ChainParams) -> Result<C> {
    params.validate()?;
    let n = params.n_sites();
    if n < 2 {
        return Err(Error::InvalidParameter("linear transmission needs at least two sites".into()));
    }
    let (g1, gn) = (params.decay[0], params.decay[n - 1]);
    if g1 <= 0.0 || gn <= 0.0 {
        return Err(Error::InvalidParameter("edge decay rates must be positive".into()));
    }
    let diag: Vec<C> = (0..n)
        .map(|i| I * (params.site_freq[i] - params.drive_freq) - 0.5 * params.decay[i])
        .collect();
    let off = I * params.tunneling;
    let mut rhs = vec![C::new(0.0, 0.0); n];
    rhs[0] = C::new(-g1.sqrt(), 0.0);
    let x = solve_tridiagonal(off, &diag, off, &rhs)?;
    Ok(gn.sqrt() * x[n - 1])
}

/// [`linear_s21`] at each drive frequency in `omega_d`.
pub fn linear_spectrum(params: &ChainParams, omega_d: &[f64]) -> Result<Vec<C>> {
    let mut p = params.clone();
    omega_d
        .iter()
        .map(|&w| {
            p.drive_freq = w;
            linear_s21(&p)
        })
        .collect()
}

/// Thomas algorithm for a tridiagonal matrix with constant off-diagonals.
fn solve_tridiagonal(lower: C, diag: &[C], upper: C, rhs: &[C]) -> Result<Vec<C>> {
    let n = diag.len();
    let mut c = vec![C::new(0.0, 0.0); n];
    let mut d = vec![C::new(0.0, 0.0); n];
    let scale = diag.iter().map(|v| v.norm()).fold(lower.norm().max(upper.norm()), f64::max);
    let mut pivot = diag[0];
    for i in 0..n {
        if i > 0 {
            pivot = diag[i] - lower * c[i - 1];
        }
        if pivot.norm() <= f64::EPSILON * scale {
            return Err(Error::SingularSystem(format!("zero pivot in row {i} of the Langevin system")));
        }
        c[i] = upper / pivot;
        d[i] = if i == 0 { rhs[0] / pivot } else { (rhs[i] - lower * d[i - 1]) / pivot };
    }
    for i in (0..n - 1).rev() {
        d[i] = d[i] - c[i] * d[i + 1];
    }
    Ok(d)
}

/// Closed-form transmission `√Γ b_5†/b_in†` of the degenerate five-site
/// chain with loss `Γ` on both edges only; `delta = ω_d − ω`.
///
/// The rational expression is written in `x = ω − ω_d`:
/// `4iJ⁴Γ / ((ixΓ + 2x² − 2J²)(ix²Γ − 2iJ²Γ + 2x³ − 6xJ²))`.
pub fn degenerate_closed_form(delta: f64, j: f64, gamma: f64) -> C {
    let d = -delta;
    let num = 4.0 * I * j.powi(4) * gamma;
    let a = I * d * gamma + 2.0 * d * d - 2.0 * j * j;
    let b = I * d * d * gamma - 2.0 * I * j * j * gamma + 2.0 * d.powi(3) - 6.0 * d * j * j;
    num / (a * b)
}

/// Single-particle detuning `2J sin(k/2)` with `k = 2πm/(N+1)`.
///
/// Valid momenta are `m = ±1, ±2, …` with `|m| ≤ N/2`, plus `m = 0` for odd N.
pub fn dispersion(n_sites: usize, m: i64, j: f64) -> Result<f64> {
    let n = n_sites as i64;
    let valid = n_sites > 0 && 2 * m.abs() <= n && (m != 0 || n % 2 == 1);
    if !valid {
        return Err(Error::InvalidParameter(format!("momentum index {m} invalid for {n_sites} sites")));
    }
    let k = 2.0 * std::f64::consts::PI * m as f64 / (n + 1) as f64;
    Ok(2.0 * j * (0.5 * k).sin())
}

/// Maximum of a unimodal function on `[a, b]` by golden-section search.
pub fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while (b - a).abs() > tol {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1);
        }
    }
    0.5 * (a + b)
}

/// Local maxima of `f` on a uniform grid of `n` points over `[lo, hi]`,
/// each refined by golden-section search between its grid neighbours.
pub fn refined_maxima(f: impl Fn(f64) -> f64, lo: f64, hi: f64, n: usize, tol: f64) -> Result<Vec<f64>> {
    if n < 3 {
        return Err(Error::CurveTooShort { needed: 3, found: n });
    }
    let h = (hi - lo) / (n - 1) as f64;
    let xs: Vec<f64> = (0..n).map(|k| lo + h * k as f64).collect();
    let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    Ok((1..n - 1)
        .filter(|&k| ys[k] > ys[k - 1] && ys[k] >= ys[k + 1])
        .map(|k| golden_max(&f, xs[k - 1], xs[k + 1], tol))
        .collect())
}

/// Center and FWHM of a `|S|²` peak near `center`, from a least-squares
/// parabola fitted to `1/|S|²` on a window of ±3 widths, repeated twice.
pub fn fit_lorentzian(f: impl Fn(f64) -> f64, center: f64, width_guess: f64) -> Result<(f64, f64)> {
    const POINTS: usize = 41;
    let (mut x0, mut w) = (center, width_guess);
    for _ in 0..3 {
        let xs: Vec<f64> = (0..POINTS).map(|k| x0 + 3.0 * w * (2.0 * k as f64 / (POINTS - 1) as f64 - 1.0)).collect();
        let a = DMatrix::from_fn(POINTS, 3, |r, c| ((xs[r] - x0) / w).powi(c as i32));
        let y = nalgebra::DVector::from_iterator(POINTS, xs.iter().map(|&x| 1.0 / f(x)));
        let coef = a
            .svd(true, true)
            .solve(&y, 1e-14)
            .map_err(|e| Error::FitFailed(e.to_string()))?;
        let (c0, c1, c2) = (coef[0], coef[1] / w, coef[2] / (w * w));
        if !(c2 > 0.0) {
            return Err(Error::FitFailed(format!("no minimum of 1/|S|² near {center}")));
        }
        let shift = -c1 / (2.0 * c2);
        let m = c0 - c1 * c1 / (4.0 * c2);
        if !(m > 0.0) {
            return Err(Error::FitFailed(format!("non-positive peak floor near {center}")));
        }
        x0 += shift;
        w = 2.0 * (m / c2).sqrt();
    }
    Ok((x0, w))
}

/// FWHM of the five `|S21|²` peaks of the degenerate edge-loss chain, ordered
/// from `δ = −√3J` to `δ = +√3J`.
pub fn degenerate_peak_widths(j: f64, gamma: f64) -> Result<[f64; 5]> {
    if !(j > 0.0 && gamma > 0.0) {
        return Err(Error::InvalidParameter("J and Γ must be positive".into()));
    }
    if j / gamma < 100.0 {
        return Err(Error::InvalidParameter(format!("J/Γ = {} below the strong-coupling range", j / gamma)));
    }
    let params = ChainParams::uniform(5, 0.0, 0.0, j, gamma);
    let f = |d: f64| {
        let mut p = params.clone();
        p.drive_freq = d;
        linear_s21(&p).map(|s| s.norm_sqr()).unwrap_or(f64::NAN)
    };
    let s3 = 3f64.sqrt();
    let mut widths = [0.0; 5];
    for (k, pole) in [-s3 * j, -j, 0.0, j, s3 * j].into_iter().enumerate() {
        let (_, w) = fit_lorentzian(f, pole, gamma / 2.0)
            .map_err(|e| Error::FitFailed(format!("peak {}: {e}", k + 1)))?;
        widths[k] = w;
    }
    Ok(widths)
}

/// A single-excitation normal mode of the five-qubit XY chain with loss `Γ`
/// on both edges.
#[derive(Debug, Clone, PartialEq)]
pub struct DressedMode {
    /// 1-based mode label.
    pub index: usize,
    /// `E_n − ω`.
    pub detuning: f64,
    /// Site amplitudes of `S_n†`.
    pub amplitudes: [f64; 5],
    /// `Γ (|a_1|² + |a_5|²)`.
    pub rate: f64,
    /// `a_1 Ω`.
    pub drive: f64,
}

/// The five dressed modes in order of increasing energy.
pub fn dressed_modes(j: f64, gamma: f64, omega: f64) -> [DressedMode; 5] {
    let s3 = 3f64.sqrt();
    let e = 1.0 / (2.0 * s3);
    let amps = [
        [e, -0.5, 1.0 / s3, -0.5, e],
        [0.5, -0.5, 0.0, 0.5, -0.5],
        [1.0 / s3, 0.0, -1.0 / s3, 0.0, 1.0 / s3],
        [0.5, 0.5, 0.0, -0.5, -0.5],
        [e, 0.5, 1.0 / s3, 0.5, e],
    ];
    let detunings = [-s3 * j, -j, 0.0, j, s3 * j];
    std::array::from_fn(|k| {
        let a = amps[k];
        DressedMode {
            index: k + 1,
            detuning: detunings[k],
            amplitudes: a,
            rate: gamma * (a[0] * a[0] + a[4] * a[4]),
            drive: a[0] * omega,
        }
    })
}

/// Five-term dressed-state transmission with saturable denominators,
/// `delta_w = ω − ω_d`:
///
/// `Σ_n s_n c_nΓ / (i(Δω − e_n) + c_nΓ) · 1/(1 + ½ c_nΩ²Γ / ((Δω − e_n)² + c_n²Γ²))`
///
/// with `c = (1/6, 1/2, 2/3, 1/2, 1/6)`, `s = (+, −, +, −, +)` and
/// `e = (√3J, J, 0, −J, −√3J)`. Here `Γ` is a coherence decay rate, half the
/// Lindblad edge rate of the same chain.
pub fn maxwell_bloch_s21(delta_w: f64, omega: f64, j: f64, gamma: f64) -> C {
    let s3 = 3f64.sqrt();
    let terms = [
        (1.0 / 6.0, 1.0, s3 * j),
        (0.5, -1.0, j),
        (2.0 / 3.0, 1.0, 0.0),
        (0.5, -1.0, -j),
        (1.0 / 6.0, 1.0, -s3 * j),
    ];
    terms
        .iter()
        .map(|&(c, sign, e)| {
            let x = delta_w - e;
            let g = c * gamma;
            let lorentz = c * gamma / (I * x + g);
            let saturation = 1.0 + 0.5 * c * omega * omega * gamma / (x * x + g * g);
            sign * lorentz / saturation
        })
        .sum()
}

/// First- and third-order terms of `⟨σ₂⁻⟩` for two driven qutrits,
/// `delta = ω_d − ω`.
pub fn two_qutrit_series(delta: f64, omega: f64, j: f64, gamma: f64, alpha: f64) -> Result<(C, C)> {
    let a = 16.0 * j * j + (gamma - 4.0 * I * delta).powi(2);
    let b = 16.0 * j * j + (gamma + 4.0 * I * delta).powi(2);
    let c = 2.0 * alpha - I * gamma - 4.0 * delta;
    let d = 16.0 * j * j + (gamma - 4.0 * I * delta) * (2.0 * I * alpha + gamma - 4.0 * I * delta);
    let scale = 16.0 * j * j + gamma * gamma + 16.0 * delta * delta + alpha * alpha;
    if [a, b, d].iter().any(|v| v.norm() <= 1e-14 * scale) || c.norm() <= 1e-14 * scale.sqrt() {
        return Err(Error::SingularSystem(format!("series pole at δ = {delta}")));
    }
    let first = -16.0 * omega * j / a;
    let third = -4096.0 * omega.powi(3) * j.powi(3) * (alpha - I * gamma - 4.0 * delta) / (c * a * b * d);
    Ok((first, third))
}

/// Excitation-sector Hamiltonian `H_(n)` of two qutrits at detuning `delta`,
/// `n = 1..=4`.
pub fn two_qutrit_sector_matrix(n: usize, delta: f64, j: f64, alpha: f64) -> Result<DMatrix<f64>> {
    let s2 = 2f64.sqrt();
    Ok(match n {
        1 => DMatrix::from_row_slice(2, 2, &[-delta, j, j, -delta]),
        2 => DMatrix::from_row_slice(
            3,
            3,
            &[
                alpha - 2.0 * delta,
                s2 * j,
                0.0,
                s2 * j,
                -2.0 * delta,
                s2 * j,
                0.0,
                s2 * j,
                alpha - 2.0 * delta,
            ],
        ),
        3 => DMatrix::from_row_slice(2, 2, &[alpha - 3.0 * delta, 2.0 * j, 2.0 * j, alpha - 3.0 * delta]),
        4 => DMatrix::from_element(1, 1, 2.0 * alpha - 4.0 * delta),
        _ => return Err(Error::IndexOutOfRange { index: n, len: 4 }),
    })
}

/// n-photon resonance detunings of two qutrits for `n = 1..=4`, each list
/// ascending.
pub fn two_qutrit_sector_resonances(j: f64, alpha: f64) -> Vec<(usize, Vec<f64>)> {
    let root = (16.0 * j * j + alpha * alpha).sqrt();
    let mut out = vec![
        (1, vec![-j, j]),
        (2, vec![(alpha - root) / 4.0, alpha / 2.0, (alpha + root) / 4.0]),
        (3, vec![(alpha - 2.0 * j) / 3.0, (alpha + 2.0 * j) / 3.0]),
        (4, vec![alpha / 2.0]),
    ];
    for (_, v) in &mut out {
        v.sort_by(f64::total_cmp);
    }
    out
}

/// Eigenvalues of `H_(n)` at zero detuning divided by `n`, ascending.
pub fn sector_eigen_resonances(n: usize, j: f64, alpha: f64) -> Result<Vec<f64>> {
    let h = two_qutrit_sector_matrix(n, 0.0, j, alpha)?;
    let mut e: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().map(|v| v / n as f64).collect();
    e.sort_by(f64::total_cmp);
    Ok(e)
}
