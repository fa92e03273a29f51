//! Named state families and random sampling.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{c, ComplexMatrix};
use crate::qstate::{DensityMatrix, PureState, State, MAX_QUBITS};

/// Parameters whose squares should sum to one are accepted within this
/// distance and rescaled, so that rounded values like `0.447` work.
pub const RECIPE_RENORM_TOL: f64 = 1e-2;

const PARAM_NORM_TOL: f64 = 1e-10;

fn check_weights(l: &[f64], lenient: bool) -> Result<Vec<f64>> {
    if l.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(Error::BadInput(format!(
            "coefficients must be finite and >= 0: {l:?}"
        )));
    }
    let s: f64 = l.iter().map(|x| x * x).sum();
    let tol = if lenient {
        RECIPE_RENORM_TOL
    } else {
        PARAM_NORM_TOL
    };
    if (s - 1.0).abs() > tol {
        return Err(Error::BadNormalization(s));
    }
    let n = s.sqrt();
    Ok(l.iter().map(|x| x / n).collect())
}

fn real(x: f64) -> Complex64 {
    c(x, 0.0)
}

/// `l0|000> + l1 e^{i phi}|100> + l2|101> + l3|110> + l4|111>`.
pub fn gsd_three_qubit(l: [f64; 5], phi: f64) -> Result<PureState> {
    let l = check_weights(&l, false)?;
    let mut amps = vec![real(0.0); 8];
    amps[0b000] = real(l[0]);
    amps[0b100] = Complex64::from_polar(l[1], phi);
    amps[0b101] = real(l[2]);
    amps[0b110] = real(l[3]);
    amps[0b111] = real(l[4]);
    PureState::new(amps)
}

/// `(|0000> + |0010> + |1011>) / sqrt(3)`.
pub fn example2_state() -> PureState {
    let a = real(1.0 / 3f64.sqrt());
    let mut amps = vec![real(0.0); 16];
    for i in [0b0000, 0b0010, 0b1011] {
        amps[i] = a;
    }
    PureState::new(amps).expect("normalized by construction")
}

fn two_term_six(ket: &str) -> PureState {
    let a = real(std::f64::consts::FRAC_1_SQRT_2);
    let mut amps = vec![real(0.0); 64];
    amps[0] = a;
    amps[usize::from_str_radix(ket, 2).expect("binary literal")] = a;
    PureState::new(amps).expect("normalized by construction")
}

/// `(|000000> + |101000>) / sqrt(2)`: a Bell pair between qubits 0 and 2.
pub fn example3_state() -> PureState {
    two_term_six("101000")
}

/// `(|000000> + |001100>) / sqrt(2)`: a Bell pair between qubits 2 and 3.
pub fn example4_state() -> PureState {
    two_term_six("001100")
}

/// `l1|1000> + l2|0100> + l3|0010> + l4|0001>`.
pub fn wclass_four_qubit(l: [f64; 4]) -> Result<PureState> {
    let l = check_weights(&l, false)?;
    let mut amps = vec![real(0.0); 16];
    for (k, x) in l.iter().enumerate() {
        amps[1 << (3 - k)] = real(*x);
    }
    PureState::new(amps)
}

pub fn ghz(n: usize) -> Result<PureState> {
    check_qubits(n, 2)?;
    let a = real(std::f64::consts::FRAC_1_SQRT_2);
    let mut amps = vec![real(0.0); 1 << n];
    amps[0] = a;
    amps[(1 << n) - 1] = a;
    PureState::new(amps)
}

pub fn w(n: usize) -> Result<PureState> {
    check_qubits(n, 2)?;
    let a = real(1.0 / (n as f64).sqrt());
    let mut amps = vec![real(0.0); 1 << n];
    for k in 0..n {
        amps[1 << k] = a;
    }
    PureState::new(amps)
}

/// `|0...0>`.
pub fn product(n: usize) -> Result<PureState> {
    check_qubits(n, 1)?;
    PureState::basis(&"0".repeat(n))
}

fn check_qubits(n: usize, min: usize) -> Result<()> {
    if n < min || n > MAX_QUBITS {
        return Err(Error::BadSize(format!(
            "n_qubits = {n} outside {min}..={MAX_QUBITS}"
        )));
    }
    Ok(())
}

/// RNG for `(seed, stream)`. Streams give independent sequences per sample index.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn gaussian_vec(len: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    (0..len)
        .map(|_| c(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect()
}

/// Haar-random pure state from a normalized vector of complex Gaussians.
pub fn haar_random_pure(n_qubits: usize, seed: u64) -> Result<PureState> {
    haar_random_pure_stream(n_qubits, seed, 0)
}

pub fn haar_random_pure_stream(n_qubits: usize, seed: u64, stream: u64) -> Result<PureState> {
    check_qubits(n_qubits, 1)?;
    let mut rng = rng_for(seed, stream);
    haar_from_rng(n_qubits, &mut rng)
}

pub fn haar_from_rng(n_qubits: usize, rng: &mut ChaCha8Rng) -> Result<PureState> {
    check_qubits(n_qubits, 1)?;
    PureState::normalized(gaussian_vec(1 << n_qubits, rng))
}

/// Reduced state of a Haar-random purification with a `rank`-dimensional ancilla:
/// `G G^dagger / Tr` for a `2^n x rank` complex Gaussian `G`.
pub fn random_mixed(n_qubits: usize, rank: usize, seed: u64) -> Result<DensityMatrix> {
    check_qubits(n_qubits, 1)?;
    let dim = 1usize << n_qubits;
    if rank == 0 || rank > dim {
        return Err(Error::BadSize(format!("rank {rank} outside 1..={dim}")));
    }
    let mut rng = rng_for(seed, 0);
    let g = ComplexMatrix::from_column_slice(dim, rank, &gaussian_vec(dim * rank, &mut rng));
    let mut rho = &g * g.adjoint();
    let tr: f64 = (0..dim).map(|i| rho[(i, i)].re).sum();
    rho /= real(tr);
    // exact hermiticity
    for i in 0..dim {
        rho[(i, i)].im = 0.0;
        for j in i + 1..dim {
            rho[(j, i)] = rho[(i, j)].conj();
        }
    }
    DensityMatrix::new((0..n_qubits).collect(), rho)
}

/// Named state constructor with its parameters, `kind:p1,p2,...`.
#[derive(Clone, Debug, PartialEq)]
pub enum StateRecipe {
    Gsd3 { l: [f64; 5], phi: f64 },
    Example2,
    Example3,
    Example4,
    WClass4 { l: [f64; 4] },
    Ghz { n: usize },
    W { n: usize },
    Product { n: usize },
    HaarPure { n: usize, seed: u64, stream: u64 },
    RandomMixed { n: usize, rank: usize, seed: u64 },
}

impl StateRecipe {
    pub fn build(&self) -> Result<State> {
        Ok(match self {
            StateRecipe::Gsd3 { l, phi } => {
                let l = check_weights(l, true)?;
                gsd_three_qubit([l[0], l[1], l[2], l[3], l[4]], *phi)?.into()
            }
            StateRecipe::Example2 => example2_state().into(),
            StateRecipe::Example3 => example3_state().into(),
            StateRecipe::Example4 => example4_state().into(),
            StateRecipe::WClass4 { l } => {
                let l = check_weights(l, true)?;
                wclass_four_qubit([l[0], l[1], l[2], l[3]])?.into()
            }
            StateRecipe::Ghz { n } => ghz(*n)?.into(),
            StateRecipe::W { n } => w(*n)?.into(),
            StateRecipe::Product { n } => product(*n)?.into(),
            StateRecipe::HaarPure { n, seed, stream } => {
                haar_random_pure_stream(*n, *seed, *stream)?.into()
            }
            StateRecipe::RandomMixed { n, rank, seed } => random_mixed(*n, *rank, *seed)?.into(),
        })
    }

    /// Pure states only.
    pub fn build_pure(&self) -> Result<PureState> {
        match self.build()? {
            State::Pure(s) => Ok(s),
            State::Mixed(_) => Err(Error::BadInput(format!(
                "recipe {self} is not a pure state"
            ))),
        }
    }
}

fn list(v: &[f64]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

impl fmt::Display for StateRecipe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateRecipe::Gsd3 { l, phi } => {
                write!(f, "gsd3:{},{}", list(l), phi)
            }
            StateRecipe::Example2 => f.write_str("example2"),
            StateRecipe::Example3 => f.write_str("example3"),
            StateRecipe::Example4 => f.write_str("example4"),
            StateRecipe::WClass4 { l } => write!(f, "wclass4:{}", list(l)),
            StateRecipe::Ghz { n } => write!(f, "ghz:{n}"),
            StateRecipe::W { n } => write!(f, "w:{n}"),
            StateRecipe::Product { n } => write!(f, "product:{n}"),
            StateRecipe::HaarPure { n, seed, stream } => write!(f, "haar:{n},{seed},{stream}"),
            StateRecipe::RandomMixed { n, rank, seed } => write!(f, "mixed:{n},{rank},{seed}"),
        }
    }
}

fn reals(kind: &str, args: &[&str], min: usize, max: usize) -> Result<Vec<f64>> {
    if args.len() < min || args.len() > max {
        return Err(Error::Parse(format!(
            "recipe {kind} takes {min}..={max} parameters, got {}",
            args.len()
        )));
    }
    args.iter()
        .map(|a| {
            a.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad number {a:?} in recipe {kind}")))
        })
        .collect()
}

fn integer(kind: &str, x: f64) -> Result<u64> {
    if x < 0.0 || x.fract() != 0.0 || x > 9.007_199_254_740_992e15 {
        return Err(Error::Parse(format!(
            "recipe {kind} needs a non-negative integer, got {x}"
        )));
    }
    Ok(x as u64)
}

impl FromStr for StateRecipe {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (kind, rest) = match s.split_once(':') {
            Some((k, r)) => (k.trim().to_ascii_lowercase(), r),
            None => (s.to_ascii_lowercase(), ""),
        };
        let args: Vec<&str> = if rest.trim().is_empty() {
            Vec::new()
        } else {
            rest.split(',').collect()
        };
        let k = kind.as_str();
        match k {
            "gsd3" => {
                let v = reals(k, &args, 5, 6)?;
                Ok(StateRecipe::Gsd3 {
                    l: [v[0], v[1], v[2], v[3], v[4]],
                    phi: v.get(5).copied().unwrap_or(0.0),
                })
            }
            "example2" | "example3" | "example4" => {
                reals(k, &args, 0, 0)?;
                Ok(match k {
                    "example2" => StateRecipe::Example2,
                    "example3" => StateRecipe::Example3,
                    _ => StateRecipe::Example4,
                })
            }
            "wclass4" => {
                let v = reals(k, &args, 4, 4)?;
                Ok(StateRecipe::WClass4 {
                    l: [v[0], v[1], v[2], v[3]],
                })
            }
            "ghz" | "w" | "product" => {
                let v = reals(k, &args, 1, 1)?;
                let n = integer(k, v[0])? as usize;
                Ok(match k {
                    "ghz" => StateRecipe::Ghz { n },
                    "w" => StateRecipe::W { n },
                    _ => StateRecipe::Product { n },
                })
            }
            "haar" => {
                let v = reals(k, &args, 2, 3)?;
                Ok(StateRecipe::HaarPure {
                    n: integer(k, v[0])? as usize,
                    seed: integer(k, v[1])?,
                    stream: v.get(2).map(|x| integer(k, *x)).transpose()?.unwrap_or(0),
                })
            }
            "mixed" => {
                let v = reals(k, &args, 3, 3)?;
                Ok(StateRecipe::RandomMixed {
                    n: integer(k, v[0])? as usize,
                    rank: integer(k, v[1])? as usize,
                    seed: integer(k, v[2])?,
                })
            }
            _ => Err(Error::Parse(format!("unknown recipe kind {kind:?}"))),
        }
    }
}
