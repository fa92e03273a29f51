//! JSON state files.
//!
//! Pure: `{"n_qubits": N, "amplitudes": [[re, im], ...]}` with `2^N` entries.
//! Mixed: `{"n_qubits": N, "matrix": [[[re, im], ...], ...]}`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, ComplexMatrix};
use crate::qstate::{DensityMatrix, PureState, State};

/// Norm (or trace) deviations up to this are silently renormalized.
pub const LOAD_RENORM_TOL: f64 = 1e-8;
/// Below this the input is taken as already normalized and kept bit-exact.
const ROUNDOFF: f64 = 1e-14;

#[derive(Serialize, Deserialize)]
struct PureFile {
    n_qubits: usize,
    amplitudes: Vec<[f64; 2]>,
}

#[derive(Serialize, Deserialize)]
struct MixedFile {
    n_qubits: usize,
    matrix: Vec<Vec<[f64; 2]>>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum AnyFile {
    Pure(PureFile),
    Mixed(MixedFile),
}

fn check_dim(n: usize, len: usize) -> Result<()> {
    if n == 0 || n > crate::qstate::MAX_QUBITS || len != 1 << n {
        return Err(Error::BadSize(format!("{len} entries for n_qubits = {n}")));
    }
    Ok(())
}

pub fn state_from_json(text: &str) -> Result<State> {
    let file: AnyFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("state file: {e}")))?;
    match file {
        AnyFile::Pure(f) => {
            check_dim(f.n_qubits, f.amplitudes.len())?;
            let mut amps: Vec<_> = f.amplitudes.iter().map(|[re, im]| c(*re, *im)).collect();
            let norm2: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
            if (norm2 - 1.0).abs() > LOAD_RENORM_TOL {
                return Err(Error::BadNormalization(norm2));
            }
            if (norm2 - 1.0).abs() > ROUNDOFF {
                let norm = norm2.sqrt();
                amps.iter_mut().for_each(|z| *z /= norm);
            }
            Ok(PureState::new(amps)?.into())
        }
        AnyFile::Mixed(f) => {
            check_dim(f.n_qubits, f.matrix.len())?;
            let dim = f.matrix.len();
            if f.matrix.iter().any(|row| row.len() != dim) {
                return Err(Error::BadSize("density matrix is not square".into()));
            }
            let mut m = ComplexMatrix::from_fn(dim, dim, |i, j| {
                let [re, im] = f.matrix[i][j];
                c(re, im)
            });
            let tr: f64 = (0..dim).map(|i| m[(i, i)].re).sum();
            if (tr - 1.0).abs() > LOAD_RENORM_TOL {
                return Err(Error::BadNormalization(tr));
            }
            if (tr - 1.0).abs() > ROUNDOFF {
                m /= c(tr, 0.0);
            }
            Ok(DensityMatrix::new((0..f.n_qubits).collect(), m)?.into())
        }
    }
}

pub fn state_to_json(state: &State) -> Result<String> {
    let text = match state {
        State::Pure(s) => serde_json::to_string_pretty(&PureFile {
            n_qubits: s.n_qubits(),
            amplitudes: s.amplitudes().iter().map(|z| [z.re, z.im]).collect(),
        }),
        State::Mixed(r) => {
            if r.labels().iter().enumerate().any(|(i, &l)| i != l) {
                return Err(Error::BadLabels(format!(
                    "only states on qubits 0..n can be written, got {:?}",
                    r.labels()
                )));
            }
            let m = r.matrix();
            serde_json::to_string_pretty(&MixedFile {
                n_qubits: r.n_qubits(),
                matrix: (0..m.nrows())
                    .map(|i| {
                        (0..m.ncols())
                            .map(|j| [m[(i, j)].re, m[(i, j)].im])
                            .collect()
                    })
                    .collect(),
            })
        }
    };
    text.map_err(|e| Error::Parse(e.to_string()))
}

pub fn load_state(path: &Path) -> Result<State> {
    state_from_json(&fs::read_to_string(path)?)
}

pub fn save_state(state: &State, path: &Path) -> Result<()> {
    let mut text = state_to_json(state)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}
