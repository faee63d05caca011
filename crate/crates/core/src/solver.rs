//! Dense and Krylov building blocks for the steady-state solvers.

use nalgebra::DMatrix;
use num_complex::Complex64;

type C = Complex64;

/// Solves `T Y + Y T† = F` for upper-triangular `T` by back substitution
/// (Bartels-Stewart with the Schur factor already applied).
///
/// Returns `None` when some `T_ii + conj(T_jj)` is smaller than `tiny`.
pub fn triangular_lyapunov(t: &DMatrix<C>, f: &DMatrix<C>, tiny: f64) -> Option<DMatrix<C>> {
    let d = t.nrows();
    let mut y = DMatrix::<C>::zeros(d, d);
    let mut row = vec![C::new(0.0, 0.0); d];
    for i in (0..d).rev() {
        // row = F[i, :] − Σ_{k>i} T[i,k] Y[k, :]
        for j in 0..d {
            row[j] = f[(i, j)];
        }
        for k in i + 1..d {
            let tik = t[(i, k)];
            if tik == C::new(0.0, 0.0) {
                continue;
            }
            for j in 0..d {
                row[j] -= tik * y[(k, j)];
            }
        }
        let tii = t[(i, i)];
        for j in (0..d).rev() {
            let mut s = row[j];
            for k in j + 1..d {
                s -= y[(i, k)] * t[(j, k)].conj();
            }
            let denom = tii + t[(j, j)].conj();
            if denom.norm() < tiny {
                return None;
            }
            y[(i, j)] = s / denom;
        }
    }
    Some(y)
}

/// Outcome of a GMRES run.
#[derive(Debug, Clone)]
pub struct GmresReport {
    pub iterations: usize,
    pub relative_residual: f64,
    pub converged: bool,
}

fn dot(a: &[C], b: &[C]) -> C {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[C]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Restarted GMRES with modified Gram-Schmidt and Givens rotations.
///
/// Solves `A x = b` starting from `x`, which is overwritten. Stops when the
/// residual norm drops below `tol · ‖b‖` or after `max_iter` matvecs.
pub fn gmres(
    mut apply: impl FnMut(&[C]) -> Vec<C>,
    b: &[C],
    x: &mut [C],
    tol: f64,
    restart: usize,
    max_iter: usize,
) -> GmresReport {
    let b_norm = norm(b).max(f64::MIN_POSITIVE);
    let mut iterations = 0;
    while iterations < max_iter {
        let ax = apply(x);
        let r: Vec<C> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
        let beta = norm(&r);
        let mut rel = beta / b_norm;
        if rel <= tol {
            return GmresReport { iterations, relative_residual: rel, converged: true };
        }
        let mut basis: Vec<Vec<C>> = vec![r.iter().map(|v| v / beta).collect()];
        let mut hess: Vec<Vec<C>> = Vec::new();
        let mut cs: Vec<C> = Vec::new();
        let mut sn: Vec<C> = Vec::new();
        let mut g = vec![C::new(beta, 0.0)];
        let mut steps = 0;
        for k in 0..restart {
            if iterations >= max_iter {
                break;
            }
            let mut w = apply(&basis[k]);
            iterations += 1;
            let mut h = vec![C::new(0.0, 0.0); k + 2];
            for (j, v) in basis.iter().enumerate() {
                h[j] = dot(v, &w);
                for (wi, vi) in w.iter_mut().zip(v) {
                    *wi -= h[j] * vi;
                }
            }
            let w_norm = norm(&w);
            h[k + 1] = C::new(w_norm, 0.0);
            for j in 0..k {
                let t = cs[j] * h[j] + sn[j] * h[j + 1];
                h[j + 1] = -sn[j].conj() * h[j] + cs[j].conj() * h[j + 1];
                h[j] = t;
            }
            let denom = (h[k].norm_sqr() + h[k + 1].norm_sqr()).sqrt();
            let (c, s) = if denom == 0.0 {
                (C::new(1.0, 0.0), C::new(0.0, 0.0))
            } else {
                (h[k] / denom, h[k + 1] / denom)
            };
            // rotation [c̄ s̄; −s c] zeroes the subdiagonal entry
            let (c, s) = (c.conj(), s.conj());
            h[k] = c * h[k] + s * h[k + 1];
            h[k + 1] = C::new(0.0, 0.0);
            cs.push(c);
            sn.push(s);
            g.push(-s.conj() * g[k]);
            g[k] = c * g[k];
            hess.push(h);
            steps = k + 1;
            rel = g[k + 1].norm() / b_norm;
            if rel <= tol || w_norm == 0.0 {
                break;
            }
            basis.push(w.iter().map(|v| v / w_norm).collect());
        }
        // back substitution on the rotated Hessenberg matrix
        let mut y = vec![C::new(0.0, 0.0); steps];
        for i in (0..steps).rev() {
            let mut s = g[i];
            for j in i + 1..steps {
                s -= hess[j][i] * y[j];
            }
            y[i] = s / hess[i][i];
        }
        for (j, yj) in y.iter().enumerate() {
            for (xi, vi) in x.iter_mut().zip(&basis[j]) {
                *xi += yj * vi;
            }
        }
        if rel <= tol || steps == 0 {
            break;
        }
    }
    let ax = apply(x);
    let r: f64 = norm(&b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect::<Vec<_>>());
    let rel = r / b_norm;
    GmresReport { iterations, relative_residual: rel, converged: rel <= tol * 10.0 }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn lyapunov_matches_direct_residual() {
        let d = 6;
        let t = DMatrix::from_fn(d, d, |i, j| {
            if i > j {
                c(0.0, 0.0)
            } else if i == j {
                c(-0.3 - i as f64 * 0.1, 0.7 * i as f64 - 1.0)
            } else {
                c(0.2 * (i + 2 * j) as f64 - 1.0, 0.1 * (j as f64 - i as f64))
            }
        });
        let f = DMatrix::from_fn(d, d, |i, j| c((i * j) as f64 * 0.3 - 1.0, i as f64 - 0.5 * j as f64));
        let y = triangular_lyapunov(&t, &f, 1e-14).unwrap();
        let res = &t * &y + &y * t.adjoint() - &f;
        assert!(res.camax() < 1e-12);
    }

    #[test]
    fn lyapunov_reports_singular_spectrum() {
        let mut t = DMatrix::<C>::zeros(2, 2);
        t[(0, 0)] = c(0.0, 1.0);
        t[(1, 1)] = c(-1.0, 0.0);
        assert!(triangular_lyapunov(&t, &DMatrix::identity(2, 2), 1e-12).is_none());
    }

    #[test]
    fn gmres_solves_nonsymmetric_system() {
        let n = 40;
        let a = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                c(4.0 + i as f64 * 0.05, 0.5)
            } else {
                c(((i * 31 + j * 17) % 13) as f64 / 40.0 - 0.15, ((i + 2 * j) % 5) as f64 / 50.0)
            }
        });
        let x_true: Vec<C> = (0..n).map(|k| c(k as f64 * 0.1, 1.0 - k as f64 * 0.02)).collect();
        let b: Vec<C> = (&a * nalgebra::DVector::from_vec(x_true.clone())).iter().copied().collect();
        let mut x = vec![c(0.0, 0.0); n];
        let apply = |v: &[C]| (&a * nalgebra::DVector::from_column_slice(v)).iter().copied().collect();
        let report = gmres(apply, &b, &mut x, 1e-13, 7, 500);
        assert!(report.converged, "{report:?}");
        for (xi, ti) in x.iter().zip(&x_true) {
            assert!((xi - ti).norm() < 1e-10);
        }
    }
}
