//! Lindblad generator on column-vectorized density matrices and its
//! trace-one steady state.
//!
//! With `vec` stacking columns, `vec(AXB) = (Bᵀ ⊗ A) vec(X)`, so
//!
//! `L = −i(I⊗H − Hᵀ⊗I) + Σ_k [Ō_k⊗O_k − ½ I⊗O_k†O_k − ½ (O_k†O_k)ᵀ⊗I]`
//!
//! where `Ō` is the entrywise conjugate.

use std::collections::HashMap;

use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::Col;
use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::solver::{gmres, triangular_lyapunov};
use crate::lattice::{lowering_op, number_op, ChainParams, FockBasis, SparseOperator};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Scaled residual accepted from the steady-state solve.
pub const RESIDUAL_TOL: f64 = 1e-8;
/// Slack allowed on the smallest eigenvalue of a steady state.
pub const POSITIVITY_TOL: f64 = 1e-8;
/// Hermiticity and trace tolerance of a density matrix.
pub const STATE_TOL: f64 = 1e-10;

/// Relaxation operators `√γ_i b_i` and dephasing operators `√γφ_i n_i`, one
/// per site with a strictly positive rate.
pub fn collapse_ops(params: &ChainParams, basis: &FockBasis) -> Result<Vec<SparseOperator>> {
    params.validate()?;
    if params.n_sites() != basis.n_sites() {
        return Err(Error::DimensionMismatch { expected: basis.n_sites(), found: params.n_sites() });
    }
    let mut ops = Vec::new();
    for (i, &g) in params.decay.iter().enumerate() {
        if g > 0.0 {
            ops.push(lowering_op(basis, i + 1)?.scale(Complex64::new(g.sqrt(), 0.0)));
        }
    }
    for (i, &g) in params.dephasing.iter().enumerate() {
        if g > 0.0 {
            ops.push(number_op(basis, i + 1)?.scale(Complex64::new(g.sqrt(), 0.0)));
        }
    }
    Ok(ops)
}

/// Sparse Lindblad generator acting on `vec(ρ)` (column-major).
#[derive(Debug, Clone)]
pub struct Liouvillian {
    dim: usize,
    dissipative: bool,
    entries: Vec<(usize, usize, Complex64)>,
    hamiltonian: SparseOperator,
    collapse: Vec<SparseOperator>,
}

impl Liouvillian {
    /// Hilbert-space dimension `d`; the generator is `d² × d²`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn dim2(&self) -> usize {
        self.dim * self.dim
    }

    pub fn entries(&self) -> &[(usize, usize, Complex64)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn hamiltonian(&self) -> &SparseOperator {
        &self.hamiltonian
    }

    pub fn collapse_ops(&self) -> &[SparseOperator] {
        &self.collapse
    }

    /// Largest entry magnitude, the reference scale for residuals.
    pub fn scale(&self) -> f64 {
        self.entries.iter().map(|e| e.2.norm()).fold(0.0, f64::max)
    }

    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.dim2());
        let mut y = vec![Complex64::new(0.0, 0.0); self.dim2()];
        for &(r, c, v) in &self.entries {
            y[r] += v * x[c];
        }
        y
    }

    /// Applies the generator to a matrix and returns the resulting matrix.
    pub fn apply_matrix(&self, x: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let d = self.dim;
        assert_eq!(x.shape(), (d, d));
        let y = self.apply(x.as_slice());
        DMatrix::from_column_slice(d, d, &y)
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let n = self.dim2();
        let mut m = DMatrix::zeros(n, n);
        for &(r, c, v) in &self.entries {
            m[(r, c)] += v;
        }
        m
    }

    /// The two smallest singular values of the dense generator. The first is
    /// zero up to rounding when a steady state exists; the second measures
    /// how well isolated it is. Dense, so only for small systems.
    pub fn gap_probe(&self) -> [f64; 2] {
        let mut sv: Vec<f64> = self.to_dense().singular_values().iter().copied().collect();
        sv.sort_by(f64::total_cmp);
        [sv[0], sv.get(1).copied().unwrap_or(f64::INFINITY)]
    }
}

/// Assembles the Lindblad generator for Hamiltonian `h` and collapse operators.
pub fn build_liouvillian(h: &SparseOperator, collapse: &[SparseOperator]) -> Result<Liouvillian> {
    let d = h.dim();
    if let Some(op) = collapse.iter().find(|op| op.dim() != d) {
        return Err(Error::DimensionMismatch { expected: d, found: op.dim() });
    }
    let mut acc: HashMap<(usize, usize), Complex64> = HashMap::new();
    let mut push = |r: usize, c: usize, v: Complex64| *acc.entry((r, c)).or_default() += v;

    // −i(I⊗H) + i(Hᵀ⊗I)
    for &(r, c, v) in h.entries() {
        for k in 0..d {
            push(k * d + r, k * d + c, -I * v);
            push(c * d + k, r * d + k, I * v);
        }
    }
    for op in collapse {
        for &(r1, c1, a) in op.entries() {
            for &(r2, c2, b) in op.entries() {
                push(r1 * d + r2, c1 * d + c2, a.conj() * b);
            }
        }
        let ono = op.adjoint().matmul(op);
        for &(r, c, v) in ono.entries() {
            for k in 0..d {
                push(k * d + r, k * d + c, -0.5 * v);
                push(c * d + k, r * d + k, -0.5 * v);
            }
        }
    }
    let mut entries: Vec<_> = acc.into_iter().map(|((r, c), v)| (r, c, v)).collect();
    entries.sort_unstable_by_key(|&(r, c, _)| (c, r));
    let dissipative = collapse.iter().any(|op| op.max_abs() > 0.0);
    Ok(Liouvillian {
        dim: d,
        dissipative,
        entries,
        hamiltonian: h.clone(),
        collapse: collapse.to_vec(),
    })
}

/// Dense Hermitian unit-trace matrix on the Fock basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    values: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Wraps a matrix after checking Hermiticity, unit trace and positivity.
    pub fn new(values: DMatrix<Complex64>) -> Result<Self> {
        let rho = Self { values };
        rho.check_invariants()?;
        Ok(rho)
    }

    /// Pure state `|k⟩⟨k|` of basis state `k`.
    pub fn basis_state(dim: usize, k: usize) -> Self {
        let mut values = DMatrix::zeros(dim, dim);
        values[(k, k)] = Complex64::new(1.0, 0.0);
        Self { values }
    }

    pub fn dim(&self) -> usize {
        self.values.nrows()
    }

    pub fn values(&self) -> &DMatrix<Complex64> {
        &self.values
    }

    pub fn trace(&self) -> Complex64 {
        self.values.trace()
    }

    pub fn hermiticity_error(&self) -> f64 {
        (&self.values - self.values.adjoint()).camax()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.values
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// Population of each basis state.
    pub fn populations(&self) -> Vec<f64> {
        self.values.diagonal().iter().map(|v| v.re).collect()
    }

    pub fn check_invariants(&self) -> Result<()> {
        let herm = self.hermiticity_error();
        if herm > STATE_TOL {
            return Err(Error::InvalidState(format!("hermiticity error {herm:e}")));
        }
        let tr = self.trace();
        if (tr - 1.0).norm() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace {tr}")));
        }
        let min = self.min_eigenvalue();
        if min < -POSITIVITY_TOL {
            return Err(Error::InvalidState(format!("eigenvalue {min:e} below zero")));
        }
        Ok(())
    }
}

/// How the steady state is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SteadyStateMethod {
    /// Direct LU up to [`AUTO_DIRECT_MAX_DIM`] states, jump-Krylov above.
    #[default]
    Auto,
    /// Sparse LU of the generator with one row replaced by the trace.
    DirectLu,
    /// GMRES on the fixed-point equation of the jump map, preconditioned by
    /// an exact Lyapunov solve of the no-jump evolution. Falls back to the
    /// direct LU when the no-jump part is singular (e.g. an undriven vacuum).
    JumpKrylov,
}

/// Largest Hilbert-space dimension solved by direct LU under `Auto`.
pub const AUTO_DIRECT_MAX_DIM: usize = 40;

/// Solved steady state with its solver diagnostics.
#[derive(Debug, Clone)]
pub struct SteadyState {
    pub rho: DensityMatrix,
    /// `‖L vec(ρ)‖_∞ / max|L_ij|`.
    pub residual: f64,
    /// Method that produced the state (never `Auto`).
    pub method: SteadyStateMethod,
    /// Krylov iterations; zero for the direct solve.
    pub iterations: usize,
}

/// Unique trace-one null vector of `l` using [`SteadyStateMethod::Auto`].
pub fn steady_state(l: &Liouvillian) -> Result<SteadyState> {
    steady_state_with(l, SteadyStateMethod::Auto)
}

/// Unique trace-one null vector of `l`.
///
/// The raw solution is Hermitized, normalized and checked against the
/// residual tolerance and the density-matrix invariants.
pub fn steady_state_with(l: &Liouvillian, method: SteadyStateMethod) -> Result<SteadyState> {
    if !l.dissipative {
        return Err(Error::SingularSystem("no dissipative channel, steady state is not unique".into()));
    }
    let method = match method {
        SteadyStateMethod::Auto if l.dim <= AUTO_DIRECT_MAX_DIM => SteadyStateMethod::DirectLu,
        SteadyStateMethod::Auto => SteadyStateMethod::JumpKrylov,
        m => m,
    };
    let (raw, method, iterations) = match method {
        SteadyStateMethod::JumpKrylov => match solve_jump_krylov(l)? {
            Some((raw, iters)) => (raw, SteadyStateMethod::JumpKrylov, iters),
            None => (solve_direct(l)?, SteadyStateMethod::DirectLu, 0),
        },
        _ => (solve_direct(l)?, SteadyStateMethod::DirectLu, 0),
    };
    let d = l.dim;
    if raw.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::SingularSystem("non-finite solution".into()));
    }
    let m = DMatrix::from_column_slice(d, d, &raw);
    let mut m = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let tr = m.trace();
    if tr.norm() < f64::EPSILON {
        return Err(Error::SingularSystem("solution has vanishing trace".into()));
    }
    m /= tr;

    let residual = l.apply(m.as_slice()).iter().map(|v| v.norm()).fold(0.0, f64::max) / l.scale();
    if !(residual <= RESIDUAL_TOL) {
        return Err(Error::SingularSystem(format!("residual {residual:e} above {RESIDUAL_TOL:e}")));
    }
    let rho = DensityMatrix::new(m)?;
    Ok(SteadyState { rho, residual, method, iterations })
}

fn solve_direct(l: &Liouvillian) -> Result<Vec<Complex64>> {
    let d = l.dim;
    let n = l.dim2();
    let mut triplets: Vec<Triplet<usize, usize, Complex64>> = l
        .entries
        .iter()
        .filter(|&&(r, _, _)| r != 0)
        .map(|&(r, c, v)| Triplet::new(r, c, v))
        .collect();
    triplets.extend((0..d).map(|k| Triplet::new(0, k * d + k, Complex64::new(1.0, 0.0))));
    let a = SparseColMat::<usize, Complex64>::try_new_from_triplets(n, n, &triplets)
        .map_err(|e| Error::SingularSystem(format!("assembly failed: {e:?}")))?;
    let lu = a.sp_lu().map_err(|e| Error::SingularSystem(format!("factorization failed: {e:?}")))?;
    let mut rhs = Col::<Complex64>::zeros(n);
    rhs[0] = Complex64::new(1.0, 0.0);
    let x = lu.solve(&rhs);
    Ok((0..n).map(|k| x[k]).collect())
}

/// `O X` for sparse `O` and dense `X`.
fn sparse_dense(op: &SparseOperator, x: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let d = x.nrows();
    let mut out = DMatrix::zeros(d, d);
    for &(r, c, v) in op.entries() {
        for j in 0..d {
            out[(r, j)] += v * x[(c, j)];
        }
    }
    out
}

const KRYLOV_TOL: f64 = 1e-12;
const KRYLOV_RESTART: usize = 80;
const KRYLOV_MAX_ITER: usize = 2000;
const REFINE_STEPS: usize = 4;
const REFINE_TARGET: f64 = 1e-12;

/// Splits `L = K + J` into the no-jump part `K(X) = A X + X A†` with
/// `A = −iH − ½ Σ O†O` and the jumps `J(X) = Σ O X O†`.
///
/// `M = −J K⁻¹` maps a post-jump state to the next post-jump state and is
/// trace preserving, so `z = K ρ` solves `(I − M + v Trᵀ) z = v` for a
/// unit-trace `v` and `ρ = K⁻¹ z`. `K⁻¹` comes from a complex Schur form of
/// `A` and a triangular Lyapunov solve. The result is polished by iterative
/// refinement against the exact sparse generator.
///
/// Returns `Ok(None)` when `K` is numerically singular.
fn solve_jump_krylov(l: &Liouvillian) -> Result<Option<(Vec<Complex64>, usize)>> {
    let d = l.dim;
    let mut a = l.hamiltonian.to_dense() * (-I);
    for op in &l.collapse {
        a -= op.adjoint().matmul(op).to_dense() * Complex64::new(0.5, 0.0);
    }
    let Some(schur) = Schur::try_new(a, 1e-15, 100 * d.max(10)) else {
        return Err(Error::SingularSystem("Schur decomposition did not converge".into()));
    };
    let (q, t) = schur.unpack();
    let q_adj = q.adjoint();
    let diag_scale = (0..d).map(|k| t[(k, k)].norm()).fold(0.0, f64::max);
    let tiny = 1e-12 * diag_scale.max(f64::MIN_POSITIVE);
    if (0..d).any(|k| 2.0 * t[(k, k)].re.abs() < tiny) {
        return Ok(None);
    }

    let k_inv = |f: &DMatrix<Complex64>| -> DMatrix<Complex64> {
        let y = triangular_lyapunov(&t, &(&q_adj * f * &q), tiny)
            .expect("diagonal of the Schur factor was checked");
        &q * y * &q_adj
    };
    let jumps = |x: &DMatrix<Complex64>| -> DMatrix<Complex64> {
        let mut out = DMatrix::zeros(d, d);
        for op in &l.collapse {
            // O X O† = (O (O X)†)†
            let ox = sparse_dense(op, x);
            out += sparse_dense(op, &ox.adjoint()).adjoint();
        }
        out
    };
    // z ↦ (I − M + v Trᵀ) z with v = |0⟩⟨0|
    let apply = |z: &[Complex64]| -> Vec<Complex64> {
        let zm = DMatrix::from_column_slice(d, d, z);
        let tr = zm.trace();
        let mut out = jumps(&k_inv(&zm)) + zm;
        out[(0, 0)] += tr;
        out.as_slice().to_vec()
    };
    let solve = |rhs: &[Complex64], iterations: &mut usize| -> Result<DMatrix<Complex64>> {
        let mut z = vec![Complex64::new(0.0, 0.0); d * d];
        let report = gmres(&apply, rhs, &mut z, KRYLOV_TOL, KRYLOV_RESTART, KRYLOV_MAX_ITER);
        *iterations += report.iterations;
        if !report.converged {
            return Err(Error::SingularSystem(format!(
                "jump-Krylov stalled at relative residual {:e} after {} iterations",
                report.relative_residual, report.iterations
            )));
        }
        Ok(k_inv(&DMatrix::from_column_slice(d, d, &z)))
    };

    let mut iterations = 0;
    let mut v = vec![Complex64::new(0.0, 0.0); d * d];
    v[0] = Complex64::new(1.0, 0.0);
    let mut rho = solve(&v, &mut iterations)?;
    let scale = l.scale();
    for _ in 0..REFINE_STEPS {
        rho /= rho.trace();
        let r = l.apply(rho.as_slice());
        let res = r.iter().map(|v| v.norm()).fold(0.0, f64::max) / scale;
        if res <= REFINE_TARGET {
            break;
        }
        let minus_r: Vec<Complex64> = r.iter().map(|v| -v).collect();
        rho += solve(&minus_r, &mut iterations)?;
    }
    rho /= rho.trace();
    Ok(Some((rho.as_slice().to_vec(), iterations)))
}

/// `Tr(ρ A)`.
pub fn expectation(rho: &DensityMatrix, a: &SparseOperator) -> Result<Complex64> {
    if rho.dim() != a.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), found: a.dim() });
    }
    Ok(a.entries().iter().map(|&(r, c, v)| v * rho.values[(c, r)]).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_basis, build_hamiltonian};

    #[test]
    fn paper_rates_give_five_relaxation_ops() {
        let b = build_basis(5, 1, 1).unwrap();
        let mut p = ChainParams::uniform(5, 1.0, 0.0, 0.1, 16.0);
        p.decay = vec![16.0, 6.0, 0.1, 3.0, 16.0];
        let ops = collapse_ops(&p, &b).unwrap();
        assert_eq!(ops.len(), 5);
        let k1 = b.index_of(&[0, 0, 1, 0, 0]).unwrap();
        assert!((ops[2].get(0, k1).re - 0.1f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn zero_rates_give_no_ops() {
        let b = build_basis(3, 2, 2).unwrap();
        let p = ChainParams::uniform(3, 1.0, 0.0, 0.1, 0.0);
        assert!(collapse_ops(&p, &b).unwrap().is_empty());
    }

    #[test]
    fn dephasing_ops_are_diagonal() {
        let b = build_basis(2, 2, 2).unwrap();
        let mut p = ChainParams::uniform(2, 1.0, 0.0, 0.1, 0.0);
        p.dephasing = vec![0.0, 4.0];
        let ops = collapse_ops(&p, &b).unwrap();
        assert_eq!(ops.len(), 1);
        let k = b.index_of(&[0, 2]).unwrap();
        assert!((ops[0].get(k, k).re - 4.0).abs() < 1e-15);
    }

    #[test]
    fn unit_rate_qubit_collapse_is_lowering_matrix() {
        let b = build_basis(1, 1, 1).unwrap();
        let p = ChainParams::uniform(1, 1.0, 0.0, 0.0, 1.0);
        let ops = collapse_ops(&p, &b).unwrap();
        assert_eq!(ops.len(), 1);
        assert_eq!(ops[0], lowering_op(&b, 1).unwrap());
    }

    #[test]
    fn amplitude_damping_generator() {
        let g = 2.5;
        let b = build_basis(1, 1, 1).unwrap();
        let p = ChainParams::uniform(1, 0.0, 0.0, 0.0, g);
        let h = SparseOperator::zeros(2);
        let l = build_liouvillian(&h, &collapse_ops(&p, &b).unwrap()).unwrap();
        let excited = DensityMatrix::basis_state(2, 1);
        let out = l.apply_matrix(excited.values());
        let mut expected = DMatrix::zeros(2, 2);
        expected[(1, 1)] = Complex64::new(-g, 0.0);
        expected[(0, 0)] = Complex64::new(g, 0.0);
        assert!((out - expected).camax() < 1e-14);
    }

    #[test]
    fn undamped_generator_is_rejected() {
        let b = build_basis(2, 1, 2).unwrap();
        let p = ChainParams::uniform(2, 1.0, 0.0, 0.3, 0.0).with_drive(0.2, 1.0);
        let h = build_hamiltonian(&p, &b).unwrap();
        let l = build_liouvillian(&h, &[]).unwrap();
        assert!(matches!(steady_state(&l), Err(Error::SingularSystem(_))));
    }

    #[test]
    fn collapse_dimension_mismatch() {
        let h = SparseOperator::identity(3);
        let op = SparseOperator::identity(2);
        assert!(matches!(build_liouvillian(&h, &[op]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn undriven_chain_relaxes_to_vacuum() {
        let b = build_basis(3, 2, 3).unwrap();
        let p = ChainParams::uniform(3, 5.0, -1.0, 0.7, 0.4);
        let h = build_hamiltonian(&p, &b).unwrap();
        let ss = steady_state(&build_liouvillian(&h, &collapse_ops(&p, &b).unwrap()).unwrap()).unwrap();
        let vac = DensityMatrix::basis_state(b.dim(), 0);
        assert!((ss.rho.values() - vac.values()).camax() < 1e-10);
    }

    #[test]
    fn expectation_basics() {
        let b = build_basis(2, 2, 3).unwrap();
        let vac = DensityMatrix::basis_state(b.dim(), 0);
        let id = SparseOperator::identity(b.dim());
        assert_eq!(expectation(&vac, &id).unwrap(), Complex64::new(1.0, 0.0));
        let n = crate::lattice::total_number_op(&b);
        assert_eq!(expectation(&vac, &n).unwrap(), Complex64::new(0.0, 0.0));
        assert!(expectation(&vac, &SparseOperator::identity(2)).is_err());
    }

    #[test]
    fn rejects_non_physical_matrices() {
        let mut m = DMatrix::<Complex64>::identity(2, 2) * Complex64::new(0.5, 0.0);
        m[(0, 1)] = Complex64::new(0.0, 0.3);
        assert!(DensityMatrix::new(m.clone()).is_err());
        m[(1, 0)] = Complex64::new(0.0, -0.3);
        assert!(DensityMatrix::new(m.clone()).is_ok());
        m[(0, 1)] = Complex64::new(0.8, 0.0);
        m[(1, 0)] = Complex64::new(0.8, 0.0);
        assert!(matches!(DensityMatrix::new(m), Err(Error::InvalidState(_))));
    }

    #[test]
    fn jump_krylov_matches_direct_lu() {
        let b = build_basis(3, 2, 3).unwrap();
        let mut p = ChainParams::uniform(3, 2.0, -1.3, 0.6, 0.5).with_drive(0.8, 2.1);
        p.decay[1] = 0.05;
        p.dephasing[2] = 0.02;
        let l = build_liouvillian(&build_hamiltonian(&p, &b).unwrap(), &collapse_ops(&p, &b).unwrap()).unwrap();
        let direct = steady_state_with(&l, SteadyStateMethod::DirectLu).unwrap();
        let krylov = steady_state_with(&l, SteadyStateMethod::JumpKrylov).unwrap();
        assert_eq!(krylov.method, SteadyStateMethod::JumpKrylov);
        assert!((direct.rho.values() - krylov.rho.values()).camax() < 1e-10);
    }

    #[test]
    fn jump_krylov_falls_back_on_undriven_vacuum() {
        let b = build_basis(2, 2, 2).unwrap();
        let p = ChainParams::uniform(2, 1.0, -0.5, 0.3, 0.2);
        let l = build_liouvillian(&build_hamiltonian(&p, &b).unwrap(), &collapse_ops(&p, &b).unwrap()).unwrap();
        let ss = steady_state_with(&l, SteadyStateMethod::JumpKrylov).unwrap();
        assert_eq!(ss.method, SteadyStateMethod::DirectLu);
        assert!((ss.rho.values()[(0, 0)].re - 1.0).abs() < 1e-12);
    }
}
