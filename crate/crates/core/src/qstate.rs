//! N-qubit states, partial trace and partial transpose, cut bookkeeping.
//!
//! Ket convention: qubit 0 is the leftmost symbol of a ket string and the
//! amplitude index is the big-endian binary reading of that string, so
//! `|1011>` is index 11. Reduced density matrices keep the original labels of
//! the qubits they describe (ascending), with the same big-endian convention
//! inside the reduced space.

use std::collections::BTreeSet;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, c, ComplexMatrix};

/// Normalization tolerance for pure states.
pub const NORM_TOL: f64 = 1e-10;
/// Trace tolerance for density matrices.
pub const TRACE_TOL: f64 = 1e-10;
/// Minimum eigenvalue accepted when constructing a density matrix.
pub const PSD_TOL: f64 = 1e-9;
/// Schmidt coefficients above this count towards the Schmidt rank.
pub const SCHMIDT_RANK_TOL: f64 = 1e-10;

/// Largest supported register.
pub const MAX_QUBITS: usize = 10;

#[inline]
fn bit(index: usize, pos: usize, width: usize) -> usize {
    (index >> (width - 1 - pos)) & 1
}

/// Gather the bits at `positions` (in order) into a big-endian integer.
#[inline]
fn gather(index: usize, positions: &[usize], width: usize) -> usize {
    positions
        .iter()
        .fold(0, |acc, &p| (acc << 1) | bit(index, p, width))
}

fn sorted_unique(labels: &[usize], what: &str) -> Result<Vec<usize>> {
    let set: BTreeSet<usize> = labels.iter().copied().collect();
    if set.len() != labels.len() {
        return Err(Error::BadLabels(format!(
            "duplicate label in {what} {labels:?}"
        )));
    }
    Ok(set.into_iter().collect())
}

fn positions_of(subset: &[usize], labels: &[usize]) -> Result<Vec<usize>> {
    subset
        .iter()
        .map(|q| {
            labels
                .iter()
                .position(|l| l == q)
                .ok_or_else(|| Error::BadLabels(format!("qubit {q} not in {labels:?}")))
        })
        .collect()
}

/// Normalized pure state of `n_qubits` qubits labelled `0..n_qubits`.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl PureState {
    /// Validates length `2^n` and unit norm within [`NORM_TOL`].
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        let n = Self::qubits_for(amps.len())?;
        if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::BadInput("non-finite amplitude".into()));
        }
        let norm2: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
        if (norm2 - 1.0).abs() > NORM_TOL {
            return Err(Error::BadNormalization(norm2));
        }
        Ok(Self { n_qubits: n, amps })
    }

    /// Rescales an arbitrary non-zero vector to unit norm.
    pub fn normalized(mut amps: Vec<Complex64>) -> Result<Self> {
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::BadNormalization(norm * norm));
        }
        for z in &mut amps {
            *z /= norm;
        }
        Self::new(amps)
    }

    /// Computational basis state from a ket string such as `"0110"`.
    pub fn basis(ket: &str) -> Result<Self> {
        let n = ket.len();
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::BadSize(format!("ket of length {n}")));
        }
        let idx = usize::from_str_radix(ket, 2)
            .map_err(|_| Error::Parse(format!("not a binary ket: {ket:?}")))?;
        let mut amps = vec![c(0.0, 0.0); 1 << n];
        amps[idx] = c(1.0, 0.0);
        Self::new(amps)
    }

    /// Normalized superposition of `(coefficient, ket string)` terms.
    pub fn from_kets(terms: &[(Complex64, &str)]) -> Result<Self> {
        let n = terms
            .first()
            .map(|(_, k)| k.len())
            .ok_or_else(|| Error::BadInput("no terms".into()))?;
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::BadSize(format!("ket of length {n}")));
        }
        let mut amps = vec![c(0.0, 0.0); 1 << n];
        for (coef, ket) in terms {
            if ket.len() != n {
                return Err(Error::BadInput(format!("ket {ket:?} has wrong length")));
            }
            let idx = usize::from_str_radix(ket, 2)
                .map_err(|_| Error::Parse(format!("not a binary ket: {ket:?}")))?;
            amps[idx] += coef;
        }
        Self::normalized(amps)
    }

    fn qubits_for(len: usize) -> Result<usize> {
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::BadSize(format!("amplitude vector of length {len}")));
        }
        let n = len.trailing_zeros() as usize;
        if n > MAX_QUBITS {
            return Err(Error::BadSize(format!("{n} qubits exceeds {MAX_QUBITS}")));
        }
        Ok(n)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn labels(&self) -> Vec<usize> {
        (0..self.n_qubits).collect()
    }

    pub fn kron(&self, other: &PureState) -> Result<PureState> {
        let mut amps = Vec::with_capacity(self.amps.len() * other.amps.len());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        PureState::qubits_for(amps.len())?;
        Ok(PureState {
            n_qubits: self.n_qubits + other.n_qubits,
            amps,
        })
    }

    /// Apply a 2x2 unitary to one qubit.
    pub fn apply_single(&self, qubit: usize, u: &ComplexMatrix) -> Result<PureState> {
        if qubit >= self.n_qubits || u.shape() != (2, 2) {
            return Err(Error::BadLabels(format!("qubit {qubit}")));
        }
        let n = self.n_qubits;
        let stride = 1 << (n - 1 - qubit);
        let mut out = self.amps.clone();
        for i in 0..self.amps.len() {
            if i & stride == 0 {
                let a0 = self.amps[i];
                let a1 = self.amps[i | stride];
                out[i] = u[(0, 0)] * a0 + u[(0, 1)] * a1;
                out[i | stride] = u[(1, 0)] * a0 + u[(1, 1)] * a1;
            }
        }
        Ok(PureState {
            n_qubits: n,
            amps: out,
        })
    }

    /// Amplitudes arranged as a `2^|side_a| x 2^|rest|` matrix.
    pub fn amplitude_matrix(&self, side_a: &[usize]) -> Result<ComplexMatrix> {
        let labels = self.labels();
        let a = sorted_unique(side_a, "cut")?;
        positions_of(&a, &labels)?;
        let b: Vec<usize> = labels.iter().copied().filter(|q| !a.contains(q)).collect();
        let n = self.n_qubits;
        let mut m = ComplexMatrix::zeros(1 << a.len(), 1 << b.len());
        for (i, amp) in self.amps.iter().enumerate() {
            m[(gather(i, &a, n), gather(i, &b, n))] = *amp;
        }
        Ok(m)
    }

    /// Reduced state on `keep`.
    pub fn reduced(&self, keep: &[usize]) -> Result<DensityMatrix> {
        if keep.is_empty() {
            return Err(Error::BadLabels("empty keep set".into()));
        }
        let keep = sorted_unique(keep, "keep set")?;
        let m = self.amplitude_matrix(&keep)?;
        let rho = &m * m.adjoint();
        Ok(DensityMatrix {
            labels: keep,
            matrix: rho,
        })
    }

    pub fn density(&self) -> DensityMatrix {
        let v = ComplexMatrix::from_column_slice(self.amps.len(), 1, &self.amps);
        DensityMatrix {
            labels: self.labels(),
            matrix: &v * v.adjoint(),
        }
    }
}

/// Hermitian, unit-trace, PSD matrix over an ordered set of qubit labels.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    labels: Vec<usize>,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates labels, dimension, hermiticity, trace and positivity.
    pub fn new(labels: Vec<usize>, matrix: ComplexMatrix) -> Result<Self> {
        if labels.is_empty() || labels.len() > MAX_QUBITS {
            return Err(Error::BadSize(format!("{} labels", labels.len())));
        }
        let sorted = sorted_unique(&labels, "labels")?;
        if sorted != labels {
            return Err(Error::BadLabels(format!(
                "labels must be ascending: {labels:?}"
            )));
        }
        let dim = 1usize << labels.len();
        if matrix.shape() != (dim, dim) {
            return Err(Error::BadSize(format!(
                "{}x{} matrix for {} qubit(s)",
                matrix.nrows(),
                matrix.ncols(),
                labels.len()
            )));
        }
        if !linalg::is_finite(&matrix) {
            return Err(Error::BadInput("non-finite matrix entry".into()));
        }
        let herm = linalg::hermiticity_error(&matrix);
        if herm > linalg::HERMITIAN_TOL {
            return Err(Error::NotHermitian(herm));
        }
        let tr = linalg::trace(&matrix).re;
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::BadNormalization(tr));
        }
        let min = linalg::herm_eigvals(&matrix)?
            .last()
            .copied()
            .unwrap_or(0.0);
        if min < -PSD_TOL {
            return Err(Error::NotPsd(min));
        }
        Ok(Self { labels, matrix })
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn n_qubits(&self) -> usize {
        self.labels.len()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn purity(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Trace out everything but `keep`.
    pub fn reduced(&self, keep: &[usize]) -> Result<DensityMatrix> {
        if keep.is_empty() {
            return Err(Error::BadLabels("empty keep set".into()));
        }
        let keep = sorted_unique(keep, "keep set")?;
        let kpos = positions_of(&keep, &self.labels)?;
        let m = self.labels.len();
        let tpos: Vec<usize> = (0..m).filter(|p| !kpos.contains(p)).collect();
        let dim = 1usize << m;
        let mut out = ComplexMatrix::zeros(1 << keep.len(), 1 << keep.len());
        for i in 0..dim {
            let ti = gather(i, &tpos, m);
            let ki = gather(i, &kpos, m);
            for j in 0..dim {
                if gather(j, &tpos, m) == ti {
                    out[(ki, gather(j, &kpos, m))] += self.matrix[(i, j)];
                }
            }
        }
        Ok(DensityMatrix {
            labels: keep,
            matrix: out,
        })
    }
}

/// Either kind of state, as loaded from a file or recipe.
#[derive(Clone, Debug, PartialEq)]
pub enum State {
    Pure(PureState),
    Mixed(DensityMatrix),
}

impl State {
    pub fn labels(&self) -> Vec<usize> {
        match self {
            State::Pure(s) => s.labels(),
            State::Mixed(r) => r.labels().to_vec(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        match self {
            State::Pure(s) => s.n_qubits(),
            State::Mixed(r) => r.n_qubits(),
        }
    }

    pub fn density(&self) -> DensityMatrix {
        match self {
            State::Pure(s) => s.density(),
            State::Mixed(r) => r.clone(),
        }
    }

    pub fn as_pure(&self) -> Option<&PureState> {
        match self {
            State::Pure(s) => Some(s),
            State::Mixed(_) => None,
        }
    }
}

impl From<PureState> for State {
    fn from(s: PureState) -> Self {
        State::Pure(s)
    }
}

impl From<DensityMatrix> for State {
    fn from(r: DensityMatrix) -> Self {
        State::Mixed(r)
    }
}

/// `Tr_{rest}` of either kind of state.
pub fn partial_trace(state: &State, keep: &[usize]) -> Result<DensityMatrix> {
    match state {
        State::Pure(s) => s.reduced(keep),
        State::Mixed(r) => r.reduced(keep),
    }
}

/// Transpose the tensor factors of `side` (a subset of `rho`'s labels).
pub fn partial_transpose(rho: &DensityMatrix, side: &[usize]) -> Result<ComplexMatrix> {
    let side = sorted_unique(side, "transpose side")?;
    let pos = positions_of(&side, rho.labels())?;
    let m = rho.n_qubits();
    let mask = pos.iter().fold(0usize, |acc, &p| acc | (1 << (m - 1 - p)));
    let dim = 1usize << m;
    let src = rho.matrix();
    let mut out = ComplexMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            let i2 = (i & !mask) | (j & mask);
            let j2 = (j & !mask) | (i & mask);
            out[(i, j)] = src[(i2, j2)];
        }
    }
    Ok(out)
}

/// Split of a label set into two disjoint, covering sides.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bipartition {
    side_a: Vec<usize>,
    side_b: Vec<usize>,
}

impl Bipartition {
    pub fn new(side_a: &[usize], side_b: &[usize], labels: &[usize]) -> Result<Self> {
        let a = sorted_unique(side_a, "side a")?;
        let b = sorted_unique(side_b, "side b")?;
        if a.is_empty() || b.is_empty() {
            return Err(Error::BadLabels(
                "both sides of a cut must be non-empty".into(),
            ));
        }
        if a.iter().any(|q| b.contains(q)) {
            return Err(Error::BadLabels(format!("sides overlap: {a:?} | {b:?}")));
        }
        let mut all: Vec<usize> = a.iter().chain(b.iter()).copied().collect();
        all.sort_unstable();
        let mut want = labels.to_vec();
        want.sort_unstable();
        if all != want {
            return Err(Error::BadLabels(format!(
                "cut {a:?} | {b:?} does not cover {want:?}"
            )));
        }
        Ok(Self {
            side_a: a,
            side_b: b,
        })
    }

    /// `side_a` against the rest of `labels`.
    pub fn against_rest(side_a: &[usize], labels: &[usize]) -> Result<Self> {
        let b: Vec<usize> = labels
            .iter()
            .copied()
            .filter(|q| !side_a.contains(q))
            .collect();
        Self::new(side_a, &b, labels)
    }

    /// Grammar: `"0,1|2,3"`.
    pub fn parse(spec: &str, labels: &[usize]) -> Result<Self> {
        let groups = parse_groups(spec)?;
        match groups.as_slice() {
            [a, b] => Self::new(a, b, labels),
            [a] => Self::against_rest(a, labels),
            _ => Err(Error::Parse(format!("cut {spec:?} must have one '|'"))),
        }
    }

    pub fn side_a(&self) -> &[usize] {
        &self.side_a
    }

    pub fn side_b(&self) -> &[usize] {
        &self.side_b
    }

    pub fn swapped(&self) -> Self {
        Self {
            side_a: self.side_b.clone(),
            side_b: self.side_a.clone(),
        }
    }
}

impl fmt::Display for Bipartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}|{}", join(&self.side_a), join(&self.side_b))
    }
}

fn join(v: &[usize]) -> String {
    v.iter()
        .map(|q| q.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// Parse `"1|2,3"` into label groups.
pub fn parse_groups(spec: &str) -> Result<Vec<Vec<usize>>> {
    spec.split('|')
        .map(|g| {
            g.split(',')
                .map(|t| {
                    t.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::Parse(format!("bad qubit label {t:?} in {spec:?}")))
                })
                .collect()
        })
        .collect()
}

/// A focus qubit plus disjoint blocks covering every other label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockGrouping {
    focus: usize,
    blocks: Vec<Vec<usize>>,
}

impl BlockGrouping {
    pub fn new(focus: usize, blocks: Vec<Vec<usize>>, labels: &[usize]) -> Result<Self> {
        if !labels.contains(&focus) {
            return Err(Error::BadLabels(format!("focus {focus} not in {labels:?}")));
        }
        if blocks.is_empty() || blocks.iter().any(|b| b.is_empty()) {
            return Err(Error::BadLabels("blocks must be non-empty".into()));
        }
        let mut seen = BTreeSet::new();
        let mut norm = Vec::with_capacity(blocks.len());
        for b in &blocks {
            let b = sorted_unique(b, "block")?;
            for &q in &b {
                if q == focus {
                    return Err(Error::BadLabels(format!("block contains focus {focus}")));
                }
                if !seen.insert(q) {
                    return Err(Error::BadLabels(format!("qubit {q} in two blocks")));
                }
            }
            norm.push(b);
        }
        let rest: BTreeSet<usize> = labels.iter().copied().filter(|&q| q != focus).collect();
        if seen != rest {
            return Err(Error::BadLabels(format!(
                "blocks {blocks:?} do not cover {rest:?}"
            )));
        }
        Ok(Self {
            focus,
            blocks: norm,
        })
    }

    /// One block per non-focus qubit, in label order.
    pub fn singletons(focus: usize, labels: &[usize]) -> Result<Self> {
        let blocks = labels
            .iter()
            .filter(|&&q| q != focus)
            .map(|&q| vec![q])
            .collect();
        Self::new(focus, blocks, labels)
    }

    pub fn parse(focus: usize, spec: &str, labels: &[usize]) -> Result<Self> {
        Self::new(focus, parse_groups(spec)?, labels)
    }

    pub fn focus(&self) -> usize {
        self.focus
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }
}

/// Squared Schmidt coefficients across `cut`, non-increasing, `min(d_a, d_b)` of them.
pub fn schmidt_coefficients(state: &PureState, cut: &Bipartition) -> Result<Vec<f64>> {
    let m = state.amplitude_matrix(cut.side_a())?;
    Ok(linalg::singular_values(&m)?
        .into_iter()
        .map(|s| s * s)
        .collect())
}

pub fn schmidt_rank(state: &PureState, cut: &Bipartition, tol: f64) -> Result<usize> {
    Ok(schmidt_coefficients(state, cut)?
        .iter()
        .filter(|&&l| l > tol)
        .count())
}
