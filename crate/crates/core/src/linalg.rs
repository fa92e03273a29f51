//! Dense complex linear algebra at qubit scale.
//!
//! Matrices are `nalgebra` dense matrices of `Complex64`. Spectral routines are
//! cyclic Jacobi methods: a two-sided sweep for Hermitian eigenproblems and a
//! one-sided (Hestenes) sweep for singular values. Both leave exact zeros
//! untouched, so structured states built from exact amplitudes keep exact-zero
//! spectra, and both reach absolute accuracy near `eps * ||M||` for small
//! eigen/singular values.

use std::cell::Cell;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;

/// Entrywise bound on `|M - M^dagger|` for a matrix to count as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Negative eigenvalues above this are treated as round-off and clipped to zero.
pub const PSD_CLIP: f64 = 1e-10;
/// Eigenvalues below this make a matrix non-PSD.
pub const PSD_REJECT: f64 = 1e-8;

/// Convergence controls for the Jacobi solvers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverSettings {
    /// Stop once the off-diagonal Frobenius norm is below `rel_tol * ||M||_F`.
    pub rel_tol: f64,
    pub max_sweeps: usize,
}

impl SolverSettings {
    pub const DEFAULT: SolverSettings = SolverSettings {
        rel_tol: 1e-15,
        max_sweeps: 60,
    };
    /// Used when re-evaluating marginal inequality violations.
    pub const TIGHT: SolverSettings = SolverSettings {
        rel_tol: 1e-18,
        max_sweeps: 200,
    };
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self::DEFAULT
    }
}

thread_local! {
    static SETTINGS: Cell<SolverSettings> = const { Cell::new(SolverSettings::DEFAULT) };
}

/// Solver settings in effect on the current thread.
pub fn solver_settings() -> SolverSettings {
    SETTINGS.with(|s| s.get())
}

/// Runs `f` with `settings` active for every solver call on this thread.
pub fn with_solver_settings<T>(settings: SolverSettings, f: impl FnOnce() -> T) -> T {
    struct Restore(SolverSettings);
    impl Drop for Restore {
        fn drop(&mut self) {
            SETTINGS.with(|s| s.set(self.0));
        }
    }
    let _restore = Restore(SETTINGS.with(|s| s.replace(settings)));
    f()
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

pub fn from_diag(d: &[f64]) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(d.len(), d.len());
    for (i, &x) in d.iter().enumerate() {
        m[(i, i)] = c(x, 0.0);
    }
    m
}

/// Pauli Y.
pub fn sigma_y() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)])
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

pub fn dagger(m: &ComplexMatrix) -> ComplexMatrix {
    m.adjoint()
}

pub fn trace(m: &ComplexMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

/// Largest entrywise deviation from Hermitian symmetry.
pub fn hermiticity_error(m: &ComplexMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn is_finite(m: &ComplexMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn check_hermitian(m: &ComplexMatrix) -> Result<()> {
    if !m.is_square() {
        return Err(Error::NotSquare(m.nrows(), m.ncols()));
    }
    let err = hermiticity_error(m);
    if err > HERMITIAN_TOL || !err.is_finite() {
        return Err(Error::NotHermitian(err));
    }
    Ok(())
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct Eigh {
    /// Non-increasing.
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector of `values[k]`.
    pub vectors: ComplexMatrix,
}

/// Apply the unitary U (acting on coordinates p, q) as `A <- U^dagger A U`.
/// `U = [[c, s], [-s conj(u), c conj(u)]]` in the (p, q) plane.
fn rotate_two_sided(a: &mut ComplexMatrix, p: usize, q: usize, cs: f64, sn: f64, u: Complex64) {
    let n = a.nrows();
    let upp = c(cs, 0.0);
    let upq = c(sn, 0.0);
    let uqp = -u.conj() * sn;
    let uqq = u.conj() * cs;
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * upp + akq * uqp;
        a[(k, q)] = akp * upq + akq * uqq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = upp.conj() * apk + uqp.conj() * aqk;
        a[(q, k)] = upq.conj() * apk + uqq.conj() * aqk;
    }
}

fn rotate_columns(v: &mut ComplexMatrix, p: usize, q: usize, cs: f64, sn: f64, u: Complex64) {
    let uqp = -u.conj() * sn;
    let uqq = u.conj() * cs;
    for k in 0..v.nrows() {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * cs + vkq * uqp;
        v[(k, q)] = vkp * sn + vkq * uqq;
    }
}

/// Jacobi rotation parameters annihilating the real symmetric 2x2 off-diagonal `b`.
fn jacobi_cs(app: f64, aqq: f64, b: f64) -> (f64, f64) {
    let theta = (aqq - app) / (2.0 * b);
    let t = if theta >= 0.0 {
        1.0 / (theta + (theta * theta + 1.0).sqrt())
    } else {
        -1.0 / (-theta + (theta * theta + 1.0).sqrt())
    };
    let cs = 1.0 / (t * t + 1.0).sqrt();
    (cs, t * cs)
}

fn off_norm(a: &ComplexMatrix) -> f64 {
    let n = a.nrows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Full Hermitian eigen-decomposition, eigenvalues non-increasing.
pub fn eigh(m: &ComplexMatrix) -> Result<Eigh> {
    check_hermitian(m)?;
    let settings = solver_settings();
    let n = m.nrows();
    let mut a = m.clone();
    // Symmetrize exactly so the rotations see a Hermitian matrix.
    for i in 0..n {
        a[(i, i)] = c(a[(i, i)].re, 0.0);
        for j in (i + 1)..n {
            let avg = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
            a[(i, j)] = avg;
            a[(j, i)] = avg.conj();
        }
    }
    let mut v = identity(n);
    let scale = a.norm();
    let mut converged = n < 2;
    for _ in 0..settings.max_sweeps {
        let off = off_norm(&a);
        if off == 0.0 || off <= settings.rel_tol * scale {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let b = apq.norm();
                if b == 0.0 {
                    continue;
                }
                let u = apq / b;
                let (cs, sn) = jacobi_cs(a[(p, p)].re, a[(q, q)].re, b);
                rotate_two_sided(&mut a, p, q, cs, sn, u);
                rotate_columns(&mut v, p, q, cs, sn, u);
                a[(p, q)] = c(0.0, 0.0);
                a[(q, p)] = c(0.0, 0.0);
                a[(p, p)] = c(a[(p, p)].re, 0.0);
                a[(q, q)] = c(a[(q, q)].re, 0.0);
            }
        }
    }
    if !converged {
        let off = off_norm(&a);
        if off == 0.0 || off <= settings.rel_tol * scale {
            converged = true;
        }
    }
    if !converged {
        return Err(Error::NoConvergence(settings.max_sweeps));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        vectors.set_column(k, &v.column(i));
    }
    Ok(Eigh { values, vectors })
}

/// Eigenvalues of a Hermitian matrix in non-increasing order.
pub fn herm_eigvals(m: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(eigh(m)?.values)
}

/// Rebuild `V diag(f(lambda)) V^dagger`.
pub fn spectral_map(e: &Eigh, f: impl Fn(f64) -> f64) -> ComplexMatrix {
    let n = e.vectors.nrows();
    let mut out = ComplexMatrix::zeros(n, n);
    for (k, &lam) in e.values.iter().enumerate() {
        let w = f(lam);
        if w == 0.0 {
            continue;
        }
        let col = e.vectors.column(k);
        for i in 0..n {
            let ci = col[i] * w;
            for j in 0..n {
                out[(i, j)] += ci * col[j].conj();
            }
        }
    }
    out
}

/// Principal square root of a Hermitian PSD matrix.
pub fn mat_sqrt_psd(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let e = eigh(m)?;
    if let Some(&min) = e.values.last() {
        if min < -PSD_REJECT {
            return Err(Error::NotPsd(min));
        }
    }
    Ok(spectral_map(&e, |x| x.max(0.0).sqrt()))
}

/// Singular values (non-increasing, `min(rows, cols)` of them) by one-sided Jacobi.
pub fn singular_values(m: &ComplexMatrix) -> Result<Vec<f64>> {
    let mut a = if m.ncols() > m.nrows() {
        m.adjoint()
    } else {
        m.clone()
    };
    let settings = solver_settings();
    let (rows, cols) = a.shape();
    // Column orthogonality cannot be resolved below round-off of the inner products.
    let threshold = settings.rel_tol.max(f64::EPSILON * rows as f64);
    let mut converged = cols < 2;
    for _ in 0..settings.max_sweeps {
        let mut rotated = false;
        for p in 0..cols {
            for q in (p + 1)..cols {
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = c(0.0, 0.0);
                for k in 0..rows {
                    let x = a[(k, p)];
                    let y = a[(k, q)];
                    alpha += x.norm_sqr();
                    beta += y.norm_sqr();
                    gamma += x.conj() * y;
                }
                let g = gamma.norm();
                if g == 0.0 || g <= threshold * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let u = gamma / g;
                let (cs, sn) = jacobi_cs(alpha, beta, g);
                rotate_columns(&mut a, p, q, cs, sn, u);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence(settings.max_sweeps));
    }
    let mut sv: Vec<f64> = (0..cols).map(|j| a.column(j).norm()).collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    Ok(sv)
}

/// `||M||_1 = Tr sqrt(M M^dagger)`, the sum of singular values.
pub fn trace_norm(m: &ComplexMatrix) -> Result<f64> {
    if !m.is_square() {
        return Err(Error::NotSquare(m.nrows(), m.ncols()));
    }
    Ok(singular_values(m)?.iter().sum())
}
