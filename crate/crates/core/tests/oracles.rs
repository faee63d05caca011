//! Library results against independent dense or closed-form references
//! built here from scratch.

use bh_transport::analytics::{dispersion, linear_s21};
use bh_transport::config::{ghz, mhz, ChainConfig};
use bh_transport::eigen::{ks_distance, multiphoton_lines, poisson_cdf, sector_eigensolve, spacing_stats, wigner_dyson_cdf};
use bh_transport::lattice::{build_basis, build_hamiltonian, lowering_op, ChainParams, FockBasis};
use bh_transport::liouvillian::{
    build_liouvillian, collapse_ops, steady_state, steady_state_with, Liouvillian, SteadyStateMethod,
};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Uniform};

type C = Complex64;

fn generator(p: &ChainParams, b: &FockBasis) -> Liouvillian {
    let h = build_hamiltonian(p, b).unwrap();
    build_liouvillian(&h, &collapse_ops(p, b).unwrap()).unwrap()
}

/// `vec(AXB) = (Bᵀ ⊗ A) vec(X)` assembled densely.
fn kron_generator(p: &ChainParams, b: &FockBasis) -> DMatrix<C> {
    let d = b.dim();
    let id = DMatrix::<C>::identity(d, d);
    let h = build_hamiltonian(p, b).unwrap().to_dense();
    let mut l = (id.kronecker(&h) - h.transpose().kronecker(&id)) * C::new(0.0, -1.0);
    for o in collapse_ops(p, b).unwrap() {
        let o = o.to_dense();
        let oo = o.adjoint() * &o;
        l += o.conjugate().kronecker(&o) - id.kronecker(&oo) * C::new(0.5, 0.0) - oo.transpose().kronecker(&id) * C::new(0.5, 0.0);
    }
    l
}

/// Trace-one null vector by dense LU with the first row replaced by the trace.
fn dense_steady_state(l: &DMatrix<C>, d: usize) -> DMatrix<C> {
    let mut m = l.clone();
    let mut rhs = DVector::<C>::zeros(d * d);
    for c in 0..d * d {
        m[(0, c)] = C::new(0.0, 0.0);
    }
    for k in 0..d {
        m[(0, k * d + k)] = C::new(1.0, 0.0);
    }
    rhs[0] = C::new(1.0, 0.0);
    let x = m.lu().solve(&rhs).unwrap();
    DMatrix::from_column_slice(d, d, x.as_slice())
}

fn driven_chain() -> ChainParams {
    ChainParams {
        site_freq: vec![1.0, 1.3, 0.8, 1.1],
        anharmonicity: vec![-2.0, -1.5, -2.5, -1.8],
        tunneling: 0.4,
        drive_amp: 0.9,
        drive_freq: 1.05,
        decay: vec![0.3, 0.05, 0.1, 0.4],
        dephasing: vec![0.02, 0.0, 0.05, 0.01],
    }
}

#[test]
fn sparse_generator_equals_kronecker_assembly() {
    let p = driven_chain();
    let b = build_basis(4, 2, 3).unwrap();
    let sparse = generator(&p, &b).to_dense();
    let dense = kron_generator(&p, &b);
    assert!((sparse - dense).camax() < 1e-13);
}

#[test]
fn steady_state_solvers_match_dense_lu() {
    for (p, b) in [
        (driven_chain(), build_basis(4, 2, 3).unwrap()),
        (
            ChainParams { site_freq: vec![1.0, 1.3, 0.8, 1.1, 0.9], ..ChainParams::uniform(5, 1.0, -2.0, 0.4, 0.3) }
                .with_drive(0.8, 1.0),
            build_basis(5, 2, 3).unwrap(),
        ),
    ] {
        let d = b.dim();
        let reference = dense_steady_state(&kron_generator(&p, &b), d);
        let l = generator(&p, &b);
        for method in [SteadyStateMethod::DirectLu, SteadyStateMethod::JumpKrylov] {
            let ss = steady_state_with(&l, method).unwrap();
            let err = (ss.rho.values() - &reference).camax();
            assert!(err < 1e-10, "{method:?} on {d} states: {err:e}");
        }
    }
}

#[test]
fn driven_two_level_population_matches_optical_bloch() {
    let b = build_basis(1, 1, 1).unwrap();
    let (gamma, omega) = (0.7, 1.3);
    for detuning in [-2.0, -0.4, 0.0, 0.25, 1.5] {
        let p = ChainParams::uniform(1, 5.0, 0.0, 0.0, gamma).with_drive(omega, 5.0 - detuning);
        let ss = steady_state(&generator(&p, &b)).unwrap();
        let excited = ss.rho.values()[(1, 1)].re;
        let bloch = 0.25 * omega * omega / (detuning * detuning + 0.25 * gamma * gamma + 0.5 * omega * omega);
        assert!((excited - bloch).abs() < 1e-12, "Δ = {detuning}: {excited} vs {bloch}");
        let coherence = ss.rho.values()[(1, 0)];
        let expected = -0.5 * omega * C::new(detuning, 0.5 * gamma) / (detuning * detuning + 0.25 * gamma * gamma + 0.5 * omega * omega);
        let sigma = bh_transport::liouvillian::expectation(&ss.rho, &lowering_op(&b, 1).unwrap()).unwrap();
        assert!((coherence - sigma).norm() < 1e-15);
        assert!((sigma - expected).norm() < 1e-12, "Δ = {detuning}: {sigma} vs {expected}");
    }
}

#[test]
fn linear_model_equals_dense_inverse() {
    let p = ChainConfig::default().to_params();
    let n = p.n_sites();
    for wd in [ghz(3.85), ghz(3.9), ghz(3.93)] {
        let i = C::new(0.0, 1.0);
        let m = DMatrix::from_fn(n, n, |r, c| {
            if r == c {
                i * (p.site_freq[r] - wd) - 0.5 * p.decay[r]
            } else if r.abs_diff(c) == 1 {
                i * p.tunneling
            } else {
                C::new(0.0, 0.0)
            }
        });
        let x = m.try_inverse().unwrap();
        let reference = -(p.decay[0] * p.decay[n - 1]).sqrt() * x[(n - 1, 0)];
        let mut q = p.clone();
        q.drive_freq = wd;
        let s = linear_s21(&q).unwrap();
        assert!((s - reference).norm() < 1e-12 * reference.norm().max(1.0));
    }
}

#[test]
fn dispersion_matches_hopping_spectrum() {
    let j = 0.7;
    for n in [3usize, 5, 7] {
        let hop = DMatrix::from_fn(n, n, |r, c| if r.abs_diff(c) == 1 { j } else { 0.0 });
        let mut eig: Vec<f64> = hop.symmetric_eigenvalues().iter().copied().collect();
        eig.sort_by(f64::total_cmp);
        let half = (n / 2) as i64;
        let mut modes: Vec<f64> = (-half..=half).map(|m| dispersion(n, m, j).unwrap()).collect();
        modes.sort_by(f64::total_cmp);
        assert_eq!(modes.len(), n);
        for (a, b) in modes.iter().zip(&eig) {
            assert!((a - b).abs() < 1e-12, "N = {n}: {a} vs {b}");
        }
    }
}

#[test]
fn single_photon_lines_are_the_hopping_eigenvalues() {
    let p = ChainConfig::default().to_params();
    let n = p.n_sites();
    let spec = sector_eigensolve(&p, &build_basis(n, 3, 4).unwrap()).unwrap();
    let ones: Vec<f64> = multiphoton_lines(&spec, 1).into_iter().map(|l| l.1).collect();
    let h = DMatrix::from_fn(n, n, |r, c| if r == c { p.site_freq[r] } else if r.abs_diff(c) == 1 { p.tunneling } else { 0.0 });
    let mut eig: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    eig.sort_by(f64::total_cmp);
    for (a, b) in ones.iter().zip(&eig) {
        assert!((a - b).abs() < 1e-9 * b.abs());
    }
}

#[test]
fn lowest_two_photon_band_is_doublons() {
    let (w, alpha, j) = (ghz(3.9), mhz(-180.0), mhz(41.0));
    let p = ChainParams::uniform(5, w, alpha, j, 1.0);
    let spec = sector_eigensolve(&p, &build_basis(5, 3, 4).unwrap()).unwrap();
    let s = spec.sector(2).unwrap();
    let doubly: Vec<bool> = s.states.iter().map(|st| st.contains(&2)).collect();
    for k in 0..5 {
        let weight: f64 = s.vectors.column(k).iter().zip(&doubly).filter(|(_, &d)| d).map(|(a, _)| a * a).sum();
        assert!(weight > 0.5, "level {k} doublon weight {weight}");
        let e = spec.lab_energy(2, s.energies[k]);
        assert!((e - (2.0 * w + alpha)).abs() < mhz(60.0));
    }
    let weight5: f64 = s.vectors.column(5).iter().zip(&doubly).filter(|(_, &d)| d).map(|(a, _)| a * a).sum();
    assert!(weight5 < 0.5);
}

#[test]
fn sampled_ensembles_follow_their_spacing_laws() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let normal = Normal::new(0.0, 1.0).unwrap();
    let goe: Vec<f64> = (0..4000)
        .map(|_| {
            let (a, d, b) = (normal.sample(&mut rng), normal.sample(&mut rng), normal.sample(&mut rng) / 2f64.sqrt());
            ((a - d).powi(2) + 4.0 * b * b).sqrt()
        })
        .collect();
    let mean = goe.iter().sum::<f64>() / goe.len() as f64;
    let goe: Vec<f64> = goe.iter().map(|s| s / mean).collect();
    assert!(ks_distance(&goe, wigner_dyson_cdf) < 0.03);
    assert!(ks_distance(&goe, poisson_cdf) > 0.1);

    let uniform = Uniform::new(0.0, 1.0).unwrap();
    let levels: Vec<f64> = (0..4000).map(|_| uniform.sample(&mut rng)).collect();
    let st = spacing_stats(&levels).unwrap();
    assert!(st.ks_poisson < 0.03);
    assert!(st.ks_wigner_dyson > 0.1);
}
