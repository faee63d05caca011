//! Truncated bosonic Fock space of an open chain and the rotating-frame
//! Bose-Hubbard Hamiltonian with a coherent drive on the first site.
//!
//! All frequencies are angular and all rates are in the inverse of the same
//! time unit. The library does not care which unit; the run configuration
//! converts laboratory units to rad/µs and µs⁻¹.

use std::collections::{BTreeMap, HashMap};
use std::ops::Range;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

const C0: Complex64 = Complex64::new(0.0, 0.0);

/// Physical parameters of a driven-dissipative Bose-Hubbard chain.
///
/// The drive always acts on site 1 and transmission is read from the last
/// site. A mirrored device is modelled by reversing the per-site arrays.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainParams {
    /// Bare site frequencies.
    pub site_freq: Vec<f64>,
    /// On-site interaction (negative for transmons).
    pub anharmonicity: Vec<f64>,
    /// Nearest-neighbour tunneling rate.
    pub tunneling: f64,
    /// Drive amplitude entering as `(amp/2)(b₁† + b₁)`.
    pub drive_amp: f64,
    /// Drive frequency; defines the rotating frame.
    pub drive_freq: f64,
    /// Relaxation rates, used directly as Lindblad rates.
    pub decay: Vec<f64>,
    /// Pure-dephasing rates, used directly as Lindblad rates.
    pub dephasing: Vec<f64>,
}

impl ChainParams {
    /// Uniform chain with the given edge loss on sites 1 and N, no bulk loss,
    /// no dephasing and no drive.
    pub fn uniform(n_sites: usize, freq: f64, anharmonicity: f64, tunneling: f64, edge_decay: f64) -> Self {
        let mut decay = vec![0.0; n_sites];
        if n_sites > 0 {
            decay[0] = edge_decay;
            decay[n_sites - 1] = edge_decay;
        }
        Self {
            site_freq: vec![freq; n_sites],
            anharmonicity: vec![anharmonicity; n_sites],
            tunneling,
            drive_amp: 0.0,
            drive_freq: freq,
            decay,
            dephasing: vec![0.0; n_sites],
        }
    }

    pub fn with_drive(mut self, amp: f64, freq: f64) -> Self {
        self.drive_amp = amp;
        self.drive_freq = freq;
        self
    }

    pub fn n_sites(&self) -> usize {
        self.site_freq.len()
    }

    /// Checks the structural invariants: at least one site, equal array
    /// lengths, finite values and non-negative rates.
    pub fn validate(&self) -> Result<()> {
        let n = self.n_sites();
        if n == 0 {
            return Err(Error::InvalidParameter("chain needs at least one site".into()));
        }
        for (name, v) in [
            ("anharmonicity", &self.anharmonicity),
            ("decay", &self.decay),
            ("dephasing", &self.dephasing),
        ] {
            if v.len() != n {
                return Err(Error::InvalidParameter(format!(
                    "{name} has {} entries, expected {n}",
                    v.len()
                )));
            }
        }
        let all = self
            .site_freq
            .iter()
            .chain(&self.anharmonicity)
            .chain(&self.decay)
            .chain(&self.dephasing)
            .chain([&self.tunneling, &self.drive_amp, &self.drive_freq]);
        if all.into_iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("non-finite parameter".into()));
        }
        if self.decay.iter().chain(&self.dephasing).any(|&g| g < 0.0) {
            return Err(Error::InvalidParameter("negative dissipation rate".into()));
        }
        Ok(())
    }
}

/// Occupation-number basis with a per-site and a total excitation cap.
///
/// States are ordered by total excitation number and lexicographically inside
/// each sector, so every sector is a contiguous index range.
#[derive(Debug, Clone)]
pub struct FockBasis {
    n_sites: usize,
    per_site_cap: u32,
    total_cap: u32,
    states: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, usize>,
    sectors: Vec<Range<usize>>,
}

impl FockBasis {
    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn per_site_cap(&self) -> u32 {
        self.per_site_cap
    }

    pub fn total_cap(&self) -> u32 {
        self.total_cap
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[Vec<u32>] {
        &self.states
    }

    pub fn state(&self, k: usize) -> &[u32] {
        &self.states[k]
    }

    pub fn index_of(&self, occupations: &[u32]) -> Option<usize> {
        self.index.get(occupations).copied()
    }

    /// Index range of the states with exactly `n` excitations.
    pub fn sector(&self, n: usize) -> Option<Range<usize>> {
        self.sectors.get(n).cloned()
    }

    /// Index ranges of all sectors, by excitation number.
    pub fn sectors(&self) -> &[Range<usize>] {
        &self.sectors
    }

    fn check_site(&self, site: usize) -> Result<usize> {
        if site == 0 || site > self.n_sites {
            return Err(Error::SiteOutOfRange { site, n_sites: self.n_sites });
        }
        Ok(site - 1)
    }
}

/// Enumerates every occupation tuple with `n_i ≤ per_site_cap` and
/// `Σ n_i ≤ total_cap`.
pub fn build_basis(n_sites: usize, per_site_cap: u32, total_cap: u32) -> Result<FockBasis> {
    if n_sites == 0 || per_site_cap == 0 || total_cap == 0 {
        return Err(Error::InvalidParameter(format!(
            "basis sizes must be positive (sites {n_sites}, per-site cap {per_site_cap}, total cap {total_cap})"
        )));
    }
    let mut states = Vec::new();
    let mut sectors = Vec::new();
    let mut current = vec![0u32; n_sites];
    for total in 0..=total_cap {
        let start = states.len();
        fill_sector(0, total, per_site_cap, &mut current, &mut states);
        sectors.push(start..states.len());
    }
    // Sectors above what the per-site cap allows are empty; drop them.
    while sectors.last().is_some_and(|r| r.is_empty()) {
        sectors.pop();
    }
    let index = states.iter().enumerate().map(|(k, s)| (s.clone(), k)).collect();
    Ok(FockBasis { n_sites, per_site_cap, total_cap, states, index, sectors })
}

fn fill_sector(site: usize, remaining: u32, cap: u32, current: &mut [u32], out: &mut Vec<Vec<u32>>) {
    let last = current.len() - 1;
    if site == last {
        if remaining <= cap {
            current[site] = remaining;
            out.push(current.to_vec());
        }
        return;
    }
    for n in 0..=remaining.min(cap) {
        current[site] = n;
        fill_sector(site + 1, remaining - n, cap, current, out);
    }
    current[site] = 0;
}

/// Complex sparse matrix on a Fock basis, stored as row-major sorted
/// coordinate entries without duplicates.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOperator {
    dim: usize,
    entries: Vec<(usize, usize, Complex64)>,
}

impl SparseOperator {
    /// Builds an operator from coordinate entries, summing duplicates.
    /// Explicit zeros are kept so sparsity patterns stay parameter independent.
    pub fn from_triplets(dim: usize, triplets: impl IntoIterator<Item = (usize, usize, Complex64)>) -> Self {
        let mut acc: BTreeMap<(usize, usize), Complex64> = BTreeMap::new();
        for (r, c, v) in triplets {
            assert!(r < dim && c < dim, "entry ({r}, {c}) outside {dim}x{dim}");
            *acc.entry((r, c)).or_insert(C0) += v;
        }
        let entries = acc.into_iter().map(|((r, c), v)| (r, c, v)).collect();
        Self { dim, entries }
    }

    pub fn zeros(dim: usize) -> Self {
        Self { dim, entries: Vec::new() }
    }

    pub fn identity(dim: usize) -> Self {
        Self::diagonal((0..dim).map(|_| Complex64::new(1.0, 0.0)).collect::<Vec<_>>())
    }

    pub fn diagonal(values: Vec<Complex64>) -> Self {
        let dim = values.len();
        let entries = values.into_iter().enumerate().map(|(k, v)| (k, k, v)).collect();
        Self { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[(usize, usize, Complex64)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries
            .binary_search_by(|&(r, c, _)| (r, c).cmp(&(row, col)))
            .map(|k| self.entries[k].2)
            .unwrap_or(C0)
    }

    pub fn adjoint(&self) -> Self {
        Self::from_triplets(self.dim, self.entries.iter().map(|&(r, c, v)| (c, r, v.conj())))
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|&(r, c, v)| (r, c, v * factor)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "operator dimensions differ");
        Self::from_triplets(self.dim, self.entries.iter().chain(&other.entries).copied())
    }

    /// Matrix product `self · other`.
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "operator dimensions differ");
        let mut rows_of_other: Vec<Vec<(usize, Complex64)>> = vec![Vec::new(); other.dim];
        for &(r, c, v) in &other.entries {
            rows_of_other[r].push((c, v));
        }
        let triplets = self.entries.iter().flat_map(|&(r, k, a)| {
            rows_of_other[k].iter().map(move |&(c, b)| (r, c, a * b))
        });
        Self::from_triplets(self.dim, triplets.collect::<Vec<_>>())
    }

    /// Matrix-vector product.
    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.dim, "vector length differs from operator dimension");
        let mut y = vec![C0; self.dim];
        for &(r, c, v) in &self.entries {
            y[r] += v * x[c];
        }
        y
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for &(r, c, v) in &self.entries {
            m[(r, c)] = v;
        }
        m
    }

    /// Largest entrywise deviation `|A_rc − conj(A_cr)|`.
    pub fn hermiticity_error(&self) -> f64 {
        self.entries
            .iter()
            .map(|&(r, c, v)| (v - self.get(c, r).conj()).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() <= tol
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|e| e.2.norm()).fold(0.0, f64::max)
    }
}

/// Annihilation operator `b_site` (sites are 1-based). Images that would
/// leave the truncated space are dropped.
pub fn lowering_op(basis: &FockBasis, site: usize) -> Result<SparseOperator> {
    let i = basis.check_site(site)?;
    let mut triplets = Vec::new();
    let mut target = vec![0u32; basis.n_sites];
    for (col, s) in basis.states.iter().enumerate() {
        if s[i] == 0 {
            continue;
        }
        target.copy_from_slice(s);
        target[i] -= 1;
        if let Some(row) = basis.index_of(&target) {
            triplets.push((row, col, Complex64::new(f64::from(s[i]).sqrt(), 0.0)));
        }
    }
    Ok(SparseOperator::from_triplets(basis.dim(), triplets))
}

/// The part `√n |n−1⟩⟨n|` of `b_site` acting on the single transition from
/// occupation `level` down to `level − 1`.
pub fn transition_op(basis: &FockBasis, site: usize, level: u32) -> Result<SparseOperator> {
    let i = basis.check_site(site)?;
    let b = lowering_op(basis, site)?;
    Ok(SparseOperator::from_triplets(
        basis.dim(),
        b.entries.iter().copied().filter(|&(_, c, _)| basis.states[c][i] == level),
    ))
}

/// Creation operator `b_site†`.
pub fn raising_op(basis: &FockBasis, site: usize) -> Result<SparseOperator> {
    Ok(lowering_op(basis, site)?.adjoint())
}

/// Occupation `n_site = b†b`, diagonal.
pub fn number_op(basis: &FockBasis, site: usize) -> Result<SparseOperator> {
    let i = basis.check_site(site)?;
    Ok(SparseOperator::diagonal(
        basis.states.iter().map(|s| Complex64::new(f64::from(s[i]), 0.0)).collect(),
    ))
}

/// Total excitation number, diagonal.
pub fn total_number_op(basis: &FockBasis) -> SparseOperator {
    SparseOperator::diagonal(
        basis
            .states
            .iter()
            .map(|s| Complex64::new(f64::from(s.iter().sum::<u32>()), 0.0))
            .collect(),
    )
}

/// Rotating-frame Hamiltonian
///
/// `H = Σ (ω_i − ω_d) n_i + (α_i/2) n_i(n_i − 1) + J Σ (b†_{i+1} b_i + h.c.) + (Ω/2)(b₁† + b₁)`
///
/// Every diagonal entry is stored, zero or not.
pub fn build_hamiltonian(params: &ChainParams, basis: &FockBasis) -> Result<SparseOperator> {
    params.validate()?;
    if params.n_sites() != basis.n_sites() {
        return Err(Error::DimensionMismatch { expected: basis.n_sites(), found: params.n_sites() });
    }
    let dim = basis.dim();
    let diag: Vec<Complex64> = basis
        .states
        .iter()
        .map(|s| {
            let e: f64 = s
                .iter()
                .enumerate()
                .map(|(i, &n)| {
                    let n = f64::from(n);
                    (params.site_freq[i] - params.drive_freq) * n + 0.5 * params.anharmonicity[i] * n * (n - 1.0)
                })
                .sum();
            Complex64::new(e, 0.0)
        })
        .collect();
    let mut h = SparseOperator::diagonal(diag);

    let lowering: Vec<SparseOperator> =
        (1..=basis.n_sites()).map(|site| lowering_op(basis, site)).collect::<Result<_>>()?;
    if params.tunneling != 0.0 {
        let j = Complex64::new(params.tunneling, 0.0);
        for pair in lowering.windows(2) {
            let hop = pair[1].adjoint().matmul(&pair[0]);
            h = h.add(&hop.scale(j)).add(&hop.adjoint().scale(j));
        }
    }
    if params.drive_amp != 0.0 {
        let drive = lowering[0].add(&lowering[0].adjoint());
        h = h.add(&drive.scale(Complex64::new(0.5 * params.drive_amp, 0.0)));
    }
    debug_assert_eq!(h.dim(), dim);
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn re(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn small_bases() {
        let b = build_basis(2, 1, 2).unwrap();
        assert_eq!(b.dim(), 4);
        assert_eq!(b.states(), &[vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);

        let b = build_basis(1, 3, 3).unwrap();
        assert_eq!(b.states(), &[vec![0], vec![1], vec![2], vec![3]]);
    }

    #[test]
    fn rejects_zero_sizes() {
        assert!(build_basis(0, 1, 1).is_err());
        assert!(build_basis(2, 0, 1).is_err());
        assert!(build_basis(2, 1, 0).is_err());
    }

    #[test]
    fn per_site_cap_above_total_is_pure_total_capping() {
        let a = build_basis(3, 5, 3).unwrap();
        let b = build_basis(3, 3, 3).unwrap();
        assert_eq!(a.states(), b.states());
    }

    #[test]
    fn sectors_are_contiguous() {
        let b = build_basis(4, 2, 5).unwrap();
        for (n, range) in b.sectors().iter().enumerate() {
            for k in range.clone() {
                assert_eq!(b.state(k).iter().sum::<u32>() as usize, n);
            }
        }
        assert_eq!(b.sectors().last().unwrap().end, b.dim());
    }

    #[test]
    fn ladder_superdiagonal() {
        let b = build_basis(1, 3, 3).unwrap();
        let a = lowering_op(&b, 1).unwrap();
        assert_eq!(a.nnz(), 3);
        for n in 1..=3 {
            assert!((a.get(n - 1, n) - re((n as f64).sqrt())).norm() < 1e-15);
        }
    }

    #[test]
    fn lowering_on_two_qubits() {
        let b = build_basis(2, 1, 2).unwrap();
        let a1 = lowering_op(&b, 1).unwrap();
        let from = b.index_of(&[1, 1]).unwrap();
        let to = b.index_of(&[0, 1]).unwrap();
        assert_eq!(a1.get(to, from), re(1.0));
    }

    #[test]
    fn truncated_commutator() {
        let b = build_basis(1, 3, 3).unwrap();
        let a = lowering_op(&b, 1).unwrap();
        let ad = a.adjoint();
        let comm = a.matmul(&ad).add(&ad.matmul(&a).scale(re(-1.0))).to_dense();
        let mut expected = DMatrix::<Complex64>::identity(4, 4);
        expected[(3, 3)] -= re(4.0);
        assert!((comm - expected).camax() < 1e-14);
    }

    #[test]
    fn ladder_power_vanishes_at_cap() {
        let b = build_basis(3, 2, 4).unwrap();
        for site in 1..=3 {
            let a = lowering_op(&b, site).unwrap();
            let cube = a.matmul(&a).matmul(&a);
            assert!(cube.max_abs() == 0.0);
            assert!(a.matmul(&a).max_abs() > 0.0);
        }
    }

    #[test]
    fn site_out_of_range() {
        let b = build_basis(2, 1, 2).unwrap();
        assert!(matches!(lowering_op(&b, 0), Err(Error::SiteOutOfRange { .. })));
        assert!(matches!(number_op(&b, 3), Err(Error::SiteOutOfRange { .. })));
    }

    #[test]
    fn number_operators() {
        let b = build_basis(2, 1, 2).unwrap();
        let n = total_number_op(&b);
        let diag: Vec<f64> = (0..4).map(|k| n.get(k, k).re).collect();
        assert_eq!(diag, vec![0.0, 1.0, 1.0, 2.0]);

        let b = build_basis(5, 3, 4).unwrap();
        let n1 = number_op(&b, 1).unwrap();
        let k = b.index_of(&[3, 0, 0, 0, 0]).unwrap();
        assert_eq!(n1.get(k, k), re(3.0));
    }

    #[test]
    fn diagonal_energy_without_hopping() {
        let mut p = ChainParams::uniform(5, 10.0, -2.0, 0.0, 1.0);
        p.site_freq = vec![10.0, 11.5, 9.0, 10.0, 10.0];
        p.anharmonicity[1] = -1.7;
        p.drive_freq = 9.25;
        let b = build_basis(5, 3, 4).unwrap();
        let h = build_hamiltonian(&p, &b).unwrap();
        assert!(h.entries().iter().all(|&(r, c, _)| r == c));
        let k = b.index_of(&[0, 2, 0, 0, 0]).unwrap();
        let expected = 2.0 * (11.5 - 9.25) - 1.7;
        assert!((h.get(k, k).re - expected).abs() < 1e-12);
    }

    #[test]
    fn hamiltonian_size_mismatch() {
        let p = ChainParams::uniform(3, 1.0, -0.1, 0.1, 0.01);
        let b = build_basis(4, 2, 2).unwrap();
        assert!(matches!(build_hamiltonian(&p, &b), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn rejects_negative_rates() {
        let mut p = ChainParams::uniform(3, 1.0, -0.1, 0.1, 0.01);
        p.dephasing[1] = -1.0;
        let b = build_basis(3, 2, 2).unwrap();
        assert!(build_hamiltonian(&p, &b).is_err());
    }

    #[test]
    fn transitions_sum_to_lowering() {
        let b = build_basis(2, 3, 4).unwrap();
        let total = (1..=3)
            .map(|n| transition_op(&b, 2, n).unwrap())
            .fold(SparseOperator::zeros(b.dim()), |acc, t| acc.add(&t));
        assert_eq!(total.to_dense(), lowering_op(&b, 2).unwrap().to_dense());
        assert_eq!(transition_op(&b, 1, 2).unwrap().nnz(), 3);
    }
}
