//! Entanglement quantifiers: linear entropy, concurrence (pure, two-qubit
//! mixed), concurrence of assistance, negativity and its convex-roof
//! extensions, and a brute-force ensemble search for the assisted quantity.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{self, c, ComplexMatrix};
use crate::qstate::{self, Bipartition, DensityMatrix, PureState, State};

/// Which quantity a [`MeasureValue`] carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MeasureKind {
    Concurrence,
    Coa,
    Negativity,
    Cren,
    Crenoa,
    LinearEntropy,
}

impl MeasureKind {
    pub const ALL: [MeasureKind; 6] = [
        MeasureKind::Concurrence,
        MeasureKind::Coa,
        MeasureKind::Negativity,
        MeasureKind::Cren,
        MeasureKind::Crenoa,
        MeasureKind::LinearEntropy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MeasureKind::Concurrence => "concurrence",
            MeasureKind::Coa => "coa",
            MeasureKind::Negativity => "negativity",
            MeasureKind::Cren => "cren",
            MeasureKind::Crenoa => "crenoa",
            MeasureKind::LinearEntropy => "linear-entropy",
        }
    }
}

impl fmt::Display for MeasureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MeasureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('_', "-");
        MeasureKind::ALL
            .iter()
            .copied()
            .find(|k| k.name() == key)
            .or(match key.as_str() {
                "c" => Some(MeasureKind::Concurrence),
                "ca" | "assistance" => Some(MeasureKind::Coa),
                "n" => Some(MeasureKind::Negativity),
                "entropy" | "linear" => Some(MeasureKind::LinearEntropy),
                _ => None,
            })
            .ok_or_else(|| Error::Parse(format!("unknown measure {s:?}")))
    }
}

/// A computed measure together with what it was computed on.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasureValue {
    pub kind: MeasureKind,
    pub value: f64,
    pub context: String,
}

/// `1 - Tr(rho^2)`.
pub fn linear_entropy(rho: &DensityMatrix) -> f64 {
    (1.0 - rho.purity()).max(0.0)
}

/// `2 sqrt(sum |2x2 minors|^2)` of an amplitude matrix, i.e. `sqrt(2 (1 - Tr rho_A^2))`
/// without the cancellation in `1 - purity`.
pub fn concurrence_from_amplitudes(m: &ComplexMatrix) -> f64 {
    let t;
    let m = if m.nrows() > m.ncols() {
        t = m.transpose();
        &t
    } else {
        m
    };
    let (rows, cols) = m.shape();
    let mut s = 0.0;
    for i in 0..rows {
        for k in i + 1..rows {
            for j in 0..cols {
                let (a, b) = (m[(i, j)], m[(k, j)]);
                if a == Complex64::ZERO && b == Complex64::ZERO {
                    continue;
                }
                for l in j + 1..cols {
                    s += (a * m[(k, l)] - m[(i, l)] * b).norm_sqr();
                }
            }
        }
    }
    2.0 * s.sqrt()
}

/// Concurrence of a pure state across `cut`.
pub fn concurrence_pure(state: &PureState, cut: &Bipartition) -> Result<f64> {
    Ok(concurrence_from_amplitudes(
        &state.amplitude_matrix(cut.side_a())?,
    ))
}

fn require_two_qubit(rho: &DensityMatrix) -> Result<()> {
    if rho.n_qubits() != 2 {
        return Err(Error::NotTwoQubit(rho.n_qubits()));
    }
    Ok(())
}

/// The four Wootters lambdas of a two-qubit state, non-increasing.
///
/// These are the square roots of the eigenvalues of `rho (Y x Y) rho* (Y x Y)`,
/// computed as the singular values of `W^T (Y x Y) W` for any factor `rho = W W^dagger`.
pub fn wootters_lambdas(rho: &DensityMatrix) -> Result<[f64; 4]> {
    require_two_qubit(rho)?;
    let e = linalg::eigh(rho.matrix())?;
    let mut w = ComplexMatrix::zeros(4, 4);
    for (k, &p) in e.values.iter().enumerate() {
        if p > 0.0 {
            let s = p.sqrt();
            for i in 0..4 {
                w[(i, k)] = e.vectors[(i, k)] * s;
            }
        }
    }
    let yy = linalg::kron(&linalg::sigma_y(), &linalg::sigma_y());
    let tau = w.transpose() * yy * w;
    let sv = linalg::singular_values(&tau)?;
    let mut out = [0.0; 4];
    out.copy_from_slice(&sv[..4]);
    Ok(out)
}

/// `max(0, l1 - l2 - l3 - l4)`.
pub fn wootters_concurrence(rho: &DensityMatrix) -> Result<f64> {
    let l = wootters_lambdas(rho)?;
    Ok((l[0] - l[1] - l[2] - l[3]).max(0.0))
}

/// `l1 + l2 + l3 + l4`.
pub fn coa_two_qubit(rho: &DensityMatrix) -> Result<f64> {
    Ok(wootters_lambdas(rho)?.iter().sum())
}

pub fn cren_two_qubit(rho: &DensityMatrix) -> Result<f64> {
    wootters_concurrence(rho)
}

pub fn crenoa_two_qubit(rho: &DensityMatrix) -> Result<f64> {
    coa_two_qubit(rho)
}

/// `||rho^{T_A}||_1 - 1`, transposing `cut.side_a()`.
pub fn negativity(state: &State, cut: &Bipartition) -> Result<f64> {
    let rho = state.density();
    let mut want = rho.labels().to_vec();
    let mut have: Vec<usize> = cut.side_a().iter().chain(cut.side_b()).copied().collect();
    want.sort_unstable();
    have.sort_unstable();
    if want != have {
        return Err(Error::BadLabels(format!(
            "cut {cut} does not match state labels {want:?}"
        )));
    }
    let pt = qstate::partial_transpose(&rho, cut.side_a())?;
    Ok((linalg::trace_norm(&pt)? - 1.0).max(0.0))
}

/// `2 sum_{i<j} sqrt(l_i l_j)` over the Schmidt coefficients.
pub fn negativity_pure_schmidt(state: &PureState, cut: &Bipartition) -> Result<f64> {
    let s = linalg::singular_values(&state.amplitude_matrix(cut.side_a())?)?;
    let mut acc = 0.0;
    for i in 0..s.len() {
        for j in i + 1..s.len() {
            acc += s[i] * s[j];
        }
    }
    Ok(2.0 * acc)
}

/// Outcome of [`coa_bruteforce_oracle`].
#[derive(Clone, Debug, PartialEq)]
pub struct OracleResult {
    /// Best ensemble average concurrence found (a lower bound on the COA).
    pub value: f64,
    /// False when the restart budget ran out before two restarts agreed on the optimum.
    pub stabilized: bool,
    pub restarts: usize,
    pub ensemble_size: usize,
}

const ORACLE_MAX_STEPS: usize = 4000;
const ORACLE_AGREE: f64 = 1e-6;

/// Unnormalized member `x` contributes `p C(psi) = 2 |x00 x11 - x01 x10|`.
fn ensemble_average(u: &ComplexMatrix, w: &ComplexMatrix) -> f64 {
    let x = u * w;
    (0..x.nrows())
        .map(|i| 2.0 * (x[(i, 0)] * x[(i, 3)] - x[(i, 1)] * x[(i, 2)]).norm())
        .sum()
}

fn gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    c(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

fn random_isometry(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let mut u = ComplexMatrix::from_fn(rows, cols, |_, _| gaussian(rng));
    for j in 0..cols {
        for k in 0..j {
            let proj: Complex64 = (0..rows).map(|i| u[(i, k)].conj() * u[(i, j)]).sum();
            for i in 0..rows {
                let v = u[(i, k)];
                u[(i, j)] -= proj * v;
            }
        }
        let norm = (0..rows).map(|i| u[(i, j)].norm_sqr()).sum::<f64>().sqrt();
        for i in 0..rows {
            u[(i, j)] /= norm;
        }
    }
    u
}

/// Maximize the average concurrence over pure-state ensembles of `rho`.
///
/// An ensemble of `m` members is `x_i = sum_j U_ij w_j` for an `m x r` isometry `U`
/// and `rho = sum_j w_j w_j^dagger`. Each restart draws a random isometry and
/// hill-climbs with random Givens rotations between ensemble members, halving
/// the step after repeated failures. Restart `k` uses RNG stream `k` of `seed`,
/// so the result is non-decreasing in `restarts`.
pub fn coa_bruteforce_oracle(
    rho: &DensityMatrix,
    ensemble_size: usize,
    restarts: usize,
    seed: u64,
) -> Result<OracleResult> {
    require_two_qubit(rho)?;
    if restarts == 0 {
        return Err(Error::BadInput("restarts must be positive".into()));
    }
    let e = linalg::eigh(rho.matrix())?;
    let cols: Vec<usize> = (0..4).filter(|&k| e.values[k] > 1e-14).collect();
    let r = cols.len();
    // rows of w are the vectors w_j
    let w = ComplexMatrix::from_fn(r, 4, |j, i| {
        e.vectors[(i, cols[j])] * e.values[cols[j]].sqrt()
    });
    let m = ensemble_size.clamp(r.max(2), 4.max(r));

    let mut best = f64::NEG_INFINITY;
    let mut agreeing = 0usize;
    for k in 0..restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(k as u64);
        let mut u = random_isometry(m, r, &mut rng);
        let mut f = ensemble_average(&u, &w);
        let mut step = 0.5;
        let mut fails = 0;
        for _ in 0..ORACLE_MAX_STEPS {
            if step < 1e-9 {
                break;
            }
            let p = rng.random_range(0..m);
            let mut q = rng.random_range(0..m - 1);
            if q >= p {
                q += 1;
            }
            let theta: f64 = step * rng.sample::<f64, _>(StandardNormal);
            let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            let (sn, cs) = theta.sin_cos();
            let ph = Complex64::from_polar(1.0, phi);
            let mut trial = u.clone();
            for j in 0..r {
                let (a, b) = (u[(p, j)], u[(q, j)]);
                trial[(p, j)] = a * cs - ph * b * sn;
                trial[(q, j)] = ph.conj() * a * sn + b * cs;
            }
            let ft = ensemble_average(&trial, &w);
            if ft > f {
                u = trial;
                f = ft;
                fails = 0;
            } else {
                fails += 1;
                if fails >= 30 {
                    step *= 0.5;
                    fails = 0;
                }
            }
        }
        if f > best + ORACLE_AGREE {
            best = f;
            agreeing = 1;
        } else if (f - best).abs() <= ORACLE_AGREE {
            best = best.max(f);
            agreeing += 1;
        }
    }
    Ok(OracleResult {
        value: best,
        stabilized: agreeing >= 2,
        restarts,
        ensemble_size: m,
    })
}
