//! Monogamy and polygamy inequalities of concurrence and negativity.
//!
//! Every evaluator returns an [`InequalityReport`] with the signed slack
//! (`lhs - rhs` for lower bounds, `rhs - lhs` for upper bounds), so that
//! `holds <=> slack >= -tol` for every inequality.
//!
//! Powers of measure values use [`powa`]: values at or below [`ZERO_SNAP`]
//! count as exactly zero and stay zero for every exponent, including 0.
//! Block weights `(alpha/2)^(i-1)` use the ordinary `0^0 = 1`, so at
//! `alpha = 0` only the first block contributes.

use std::fmt;
use std::str::FromStr;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::measures;
use crate::qstate::{BlockGrouping, PureState};

/// Measure values at or below this are treated as exactly zero.
pub const ZERO_SNAP: f64 = 1e-12;
/// Slack tolerance used when no other is given.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Slack in the prefix-dominance test of the ordering search.
pub const ORDERING_TOL: f64 = 1e-12;
/// Largest block count for the exhaustive ordering search.
pub const MAX_BLOCKS: usize = 8;
/// Tolerance of the scalar inequality checks.
pub const SCALAR_TOL: f64 = 1e-12;

/// `x^a` for a measure value `x`, with `x <= ZERO_SNAP` mapped to 0.
pub fn powa(x: f64, a: f64) -> f64 {
    if x <= ZERO_SNAP {
        0.0
    } else {
        x.powf(a)
    }
}

/// `(alpha/2)^i`, with `0^0 = 1`.
pub fn weight(alpha: f64, i: usize) -> f64 {
    (alpha / 2.0).powi(i as i32)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum InequalityId {
    Ckw2,
    CkwAlpha,
    DualCoa,
    Thm1,
    Thm2,
    Thm3,
    Cor1,
    Cor2Lower,
    Cor2Upper,
    NegMonogamy,
    NegDual,
    Thm4,
    Thm5,
    Thm6,
    Lemma1,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// `lhs >= rhs`
    Lower,
    /// `lhs <= rhs`
    Upper,
}

/// Closed or half-open range of admissible exponents.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AlphaRange {
    pub min: f64,
    pub max: f64,
    pub min_exclusive: bool,
}

impl AlphaRange {
    pub fn contains(&self, a: f64) -> bool {
        let above = if self.min_exclusive {
            a > self.min
        } else {
            a >= self.min
        };
        a.is_finite() && above && a <= self.max
    }

    pub fn describe(&self) -> &'static str {
        match (self.min, self.max, self.min_exclusive) {
            (m, x, _) if m == x => "{2}",
            (_, x, _) if x.is_infinite() => "[2, inf)",
            (_, _, true) => "(0, 2]",
            (_, 1.0, false) => "[0, 1]",
            _ => "[0, 2]",
        }
    }
}

impl InequalityId {
    pub const ALL: [InequalityId; 15] = [
        InequalityId::Ckw2,
        InequalityId::CkwAlpha,
        InequalityId::DualCoa,
        InequalityId::Thm1,
        InequalityId::Thm2,
        InequalityId::Thm3,
        InequalityId::Cor1,
        InequalityId::Cor2Lower,
        InequalityId::Cor2Upper,
        InequalityId::NegMonogamy,
        InequalityId::NegDual,
        InequalityId::Thm4,
        InequalityId::Thm5,
        InequalityId::Thm6,
        InequalityId::Lemma1,
    ];

    pub fn name(self) -> &'static str {
        match self {
            InequalityId::Ckw2 => "CKW2",
            InequalityId::CkwAlpha => "CKW_ALPHA",
            InequalityId::DualCoa => "DUAL_COA",
            InequalityId::Thm1 => "THM1",
            InequalityId::Thm2 => "THM2",
            InequalityId::Thm3 => "THM3",
            InequalityId::Cor1 => "COR1",
            InequalityId::Cor2Lower => "COR2_LOWER",
            InequalityId::Cor2Upper => "COR2_UPPER",
            InequalityId::NegMonogamy => "NEG_MONOGAMY",
            InequalityId::NegDual => "NEG_DUAL",
            InequalityId::Thm4 => "THM4",
            InequalityId::Thm5 => "THM5",
            InequalityId::Thm6 => "THM6",
            InequalityId::Lemma1 => "LEMMA1",
        }
    }

    pub fn direction(self) -> Direction {
        use InequalityId::*;
        match self {
            Ckw2 | CkwAlpha | Thm2 | Cor1 | Cor2Lower | NegMonogamy | Thm5 | Lemma1 => {
                Direction::Lower
            }
            DualCoa | Thm1 | Thm3 | Cor2Upper | NegDual | Thm4 | Thm6 => Direction::Upper,
        }
    }

    pub fn alpha_range(self) -> AlphaRange {
        use InequalityId::*;
        let r = |min, max, min_exclusive| AlphaRange {
            min,
            max,
            min_exclusive,
        };
        match self {
            Ckw2 | DualCoa | NegDual => r(2.0, 2.0, false),
            CkwAlpha | NegMonogamy => r(2.0, f64::INFINITY, false),
            Thm5 => r(0.0, 2.0, true),
            Lemma1 => r(0.0, 1.0, false),
            _ => r(0.0, 2.0, false),
        }
    }

    /// Default `(start, stop, points)` grid inside the validity range.
    pub fn default_grid(self) -> (f64, f64, usize) {
        use InequalityId::*;
        match self {
            Ckw2 | DualCoa | NegDual => (2.0, 2.0, 1),
            CkwAlpha | NegMonogamy => (2.0, 4.0, 41),
            Thm5 => (0.05, 2.0, 40),
            Lemma1 => (0.0, 1.0, 41),
            _ => (0.0, 2.0, 41),
        }
    }

    /// Smallest register the evaluator accepts.
    pub fn min_qubits(self) -> usize {
        use InequalityId::*;
        match self {
            Ckw2 | CkwAlpha | DualCoa | Thm1 | Thm4 | NegMonogamy | NegDual => 2,
            Thm2 | Thm3 | Thm5 | Thm6 => 3,
            Cor1 | Cor2Lower | Cor2Upper => 6,
            Lemma1 => 0,
        }
    }

    pub fn is_state_based(self) -> bool {
        self != InequalityId::Lemma1
    }
}

impl fmt::Display for InequalityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for InequalityId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_uppercase().replace('-', "_");
        InequalityId::ALL
            .iter()
            .copied()
            .find(|id| id.name() == key)
            .ok_or_else(|| Error::Parse(format!("unknown inequality {s:?}")))
    }
}

/// One evaluated inequality instance.
#[derive(Clone, Debug, PartialEq)]
pub struct InequalityReport {
    pub inequality_id: InequalityId,
    pub alpha: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    /// Block order per focus, e.g. `0:1|2+3;1:0|2|3`.
    pub ordering: Option<String>,
    pub holds: bool,
    pub tol: f64,
    /// Orderings found and, where the inequality is conditional, its branch condition met.
    pub precondition_met: bool,
    /// Branch condition recorded for inequalities stated unconditionally.
    pub branch: Option<bool>,
    pub schmidt_rank: Option<usize>,
}

impl InequalityReport {
    pub fn new(id: InequalityId, alpha: f64, lhs: f64, rhs: f64, tol: f64) -> Self {
        let slack = match id.direction() {
            Direction::Lower => lhs - rhs,
            Direction::Upper => rhs - lhs,
        };
        Self {
            inequality_id: id,
            alpha,
            lhs,
            rhs,
            slack,
            ordering: None,
            holds: slack >= -tol,
            tol,
            precondition_met: true,
            branch: None,
            schmidt_rank: None,
        }
    }
}

impl fmt::Display for InequalityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.inequality_id.direction() {
            Direction::Lower => ">=",
            Direction::Upper => "<=",
        };
        writeln!(f, "inequality        {}", self.inequality_id)?;
        writeln!(f, "alpha             {}", self.alpha)?;
        writeln!(f, "lhs               {}", fmt_sig(self.lhs, 12))?;
        writeln!(f, "rhs               {}", fmt_sig(self.rhs, 12))?;
        writeln!(f, "relation          lhs {op} rhs")?;
        writeln!(f, "slack             {:e}", self.slack)?;
        writeln!(f, "holds             {}", self.holds)?;
        writeln!(f, "precondition_met  {}", self.precondition_met)?;
        if let Some(o) = &self.ordering {
            writeln!(f, "ordering          {o}")?;
        }
        if let Some(b) = self.branch {
            writeln!(f, "branch            {b}")?;
        }
        if let Some(r) = self.schmidt_rank {
            writeln!(f, "schmidt_rank      {r}")?;
        }
        write!(f, "tol               {:e}", self.tol)
    }
}

/// Decimal rendering with `sig` significant digits.
pub fn fmt_sig(x: f64, sig: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i64;
    let decimals = (sig as i64 - 1 - mag).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.starts_with("-0") && s.trim_start_matches(['-', '0', '.']).is_empty() {
        s[1..].to_string()
    } else {
        s
    }
}

/// Result of the block-ordering search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderingResult {
    /// Block indices in evaluation order.
    pub permutation: Vec<usize>,
    pub satisfied: bool,
    /// 1-based `t` at which `v_t >= sum_{l>t} v_l` first fails.
    pub failure_prefix: Option<usize>,
}

fn first_failure(values: &[f64], perm: &[usize]) -> Option<usize> {
    let mut rest: f64 = perm.iter().map(|&i| values[i]).sum();
    for (t, &i) in perm.iter().enumerate().take(perm.len().saturating_sub(1)) {
        rest -= values[i];
        if values[i] < rest.max(0.0) - ORDERING_TOL {
            return Some(t + 1);
        }
    }
    None
}

/// Search block permutations for prefix dominance `v_t >= sum_{l>t} v_l`.
///
/// The descending order is tried first; otherwise all `k!` permutations are
/// scanned. With no valid order, the permutation whose first failure comes
/// latest is returned (the descending order on ties).
pub fn find_ordering(values: &[f64]) -> Result<OrderingResult> {
    let k = values.len();
    if k == 0 {
        return Err(Error::BadInput("no blocks".into()));
    }
    if k > MAX_BLOCKS {
        return Err(Error::TooManyBlocks(k));
    }
    let mut desc: Vec<usize> = (0..k).collect();
    desc.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    let Some(mut best_fail) = first_failure(values, &desc) else {
        return Ok(OrderingResult {
            permutation: desc,
            satisfied: true,
            failure_prefix: None,
        });
    };
    let mut best = desc;
    for perm in (0..k).permutations(k) {
        match first_failure(values, &perm) {
            None => {
                return Ok(OrderingResult {
                    permutation: perm,
                    satisfied: true,
                    failure_prefix: None,
                })
            }
            Some(t) if t > best_fail => {
                best_fail = t;
                best = perm;
            }
            _ => {}
        }
    }
    Ok(OrderingResult {
        permutation: best,
        satisfied: false,
        failure_prefix: Some(best_fail),
    })
}

/// Which qubits play `A`, `B` and `C_1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Roles {
    pub a: usize,
    pub b: usize,
    pub c1: usize,
}

impl Default for Roles {
    fn default() -> Self {
        Roles { a: 0, b: 1, c1: 2 }
    }
}

/// Everything besides the state and exponent that an evaluation needs.
#[derive(Clone, Debug, PartialEq)]
pub struct EvalSpec {
    /// Focus of the single-focus inequalities; defaults to `roles.a`.
    pub focus: Option<usize>,
    pub roles: Roles,
    /// Groupings overriding the singleton default for their focus.
    pub groupings: Vec<BlockGrouping>,
    pub tol: f64,
}

impl Default for EvalSpec {
    fn default() -> Self {
        EvalSpec {
            focus: None,
            roles: Roles::default(),
            groupings: Vec::new(),
            tol: DEFAULT_TOL,
        }
    }
}

impl EvalSpec {
    pub fn with_tol(tol: f64) -> Self {
        EvalSpec {
            tol,
            ..Default::default()
        }
    }

    pub fn focus(&self) -> usize {
        self.focus.unwrap_or(self.roles.a)
    }

    pub fn grouping_for(&self, focus: usize, labels: &[usize]) -> Result<BlockGrouping> {
        match self.groupings.iter().find(|g| g.focus() == focus) {
            Some(g) => BlockGrouping::new(focus, g.blocks().to_vec(), labels),
            None => BlockGrouping::singletons(focus, labels),
        }
    }
}

/// Pairwise concurrences and COAs of a pure state, computed once.
#[derive(Clone, Debug)]
pub struct StateAnalysis {
    state: PureState,
    pair_c: Vec<Vec<f64>>,
    pair_ca: Vec<Vec<f64>>,
}

impl StateAnalysis {
    pub fn new(state: &PureState) -> Result<Self> {
        let n = state.n_qubits();
        let mut pair_c = vec![vec![0.0; n]; n];
        let mut pair_ca = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let rho = state.reduced(&[i, j])?;
                let l = measures::wootters_lambdas(&rho)?;
                let cv = (l[0] - l[1] - l[2] - l[3]).max(0.0);
                let ca: f64 = l.iter().sum();
                pair_c[i][j] = cv;
                pair_c[j][i] = cv;
                pair_ca[i][j] = ca;
                pair_ca[j][i] = ca;
            }
        }
        Ok(Self {
            state: state.clone(),
            pair_c,
            pair_ca,
        })
    }

    pub fn state(&self) -> &PureState {
        &self.state
    }

    pub fn n_qubits(&self) -> usize {
        self.state.n_qubits()
    }

    pub fn labels(&self) -> Vec<usize> {
        self.state.labels()
    }

    fn check(&self, q: usize) -> Result<()> {
        if q >= self.n_qubits() {
            return Err(Error::BadLabels(format!(
                "qubit {q} not in a {}-qubit state",
                self.n_qubits()
            )));
        }
        Ok(())
    }

    /// `C(rho_ij)`.
    pub fn pair_concurrence(&self, i: usize, j: usize) -> Result<f64> {
        self.check(i)?;
        self.check(j)?;
        if i == j {
            return Err(Error::BadLabels(format!("pair ({i}, {j})")));
        }
        Ok(self.pair_c[i][j])
    }

    /// `C_a(rho_ij)`.
    pub fn pair_coa(&self, i: usize, j: usize) -> Result<f64> {
        self.check(i)?;
        self.check(j)?;
        if i == j {
            return Err(Error::BadLabels(format!("pair ({i}, {j})")));
        }
        Ok(self.pair_ca[i][j])
    }

    /// Concurrence across `side | rest`.
    pub fn cut_concurrence(&self, side: &[usize]) -> Result<f64> {
        Ok(measures::concurrence_from_amplitudes(
            &self.state.amplitude_matrix(side)?,
        ))
    }

    /// Negativity across `side | rest`.
    pub fn cut_negativity(&self, side: &[usize]) -> Result<f64> {
        let cut = crate::qstate::Bipartition::against_rest(side, &self.labels())?;
        measures::negativity_pure_schmidt(&self.state, &cut)
    }

    pub fn cut_schmidt_rank(&self, side: &[usize]) -> Result<usize> {
        let cut = crate::qstate::Bipartition::against_rest(side, &self.labels())?;
        crate::qstate::schmidt_rank(&self.state, &cut, crate::qstate::SCHMIDT_RANK_TOL)
    }

    /// `sum_{j != focus} C^2(rho_{focus j})`.
    pub fn concurrence_sq_sum(&self, focus: usize) -> Result<f64> {
        self.check(focus)?;
        Ok((0..self.n_qubits())
            .filter(|&j| j != focus)
            .map(|j| self.pair_c[focus][j].powi(2))
            .sum())
    }

    /// `sum_{j in block} C_a^2(rho_{focus j})`.
    pub fn grouped_coa_sq(&self, focus: usize, block: &[usize]) -> Result<f64> {
        self.check(focus)?;
        let mut s = 0.0;
        for &j in block {
            self.check(j)?;
            if j == focus {
                return Err(Error::BadLabels(format!(
                    "block {block:?} contains focus {focus}"
                )));
            }
            s += self.pair_ca[focus][j].powi(2);
        }
        Ok(s)
    }

    /// Blocks of `grouping` in a prefix-dominant order, with their `C_a` values.
    pub fn weighted_blocks(&self, grouping: &BlockGrouping) -> Result<WeightedBlocks> {
        let sq = grouping
            .blocks()
            .iter()
            .map(|b| self.grouped_coa_sq(grouping.focus(), b))
            .collect::<Result<Vec<_>>>()?;
        let ordering = find_ordering(&sq)?;
        let blocks = ordering
            .permutation
            .iter()
            .map(|&i| grouping.blocks()[i].clone())
            .collect();
        let values = ordering.permutation.iter().map(|&i| sq[i].sqrt()).collect();
        Ok(WeightedBlocks {
            focus: grouping.focus(),
            blocks,
            values,
            ordering,
        })
    }
}

/// Ordered blocks of one focus and their assisted values `C_a(rho_{A M_i})`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedBlocks {
    pub focus: usize,
    pub blocks: Vec<Vec<usize>>,
    pub values: Vec<f64>,
    pub ordering: OrderingResult,
}

impl WeightedBlocks {
    /// `sum_i (alpha/2)^(i-1) C_a^alpha(rho_{A M_i})`.
    pub fn weighted_sum(&self, alpha: f64) -> f64 {
        self.values
            .iter()
            .enumerate()
            .map(|(i, &v)| weight(alpha, i) * powa(v, alpha))
            .sum()
    }

    pub fn describe(&self) -> String {
        let blocks = self
            .blocks
            .iter()
            .map(|b| b.iter().map(|q| q.to_string()).join("+"))
            .join("|");
        format!("{}:{}", self.focus, blocks)
    }
}

/// An inequality with its alpha-independent ingredients computed for one state.
#[derive(Clone, Debug)]
pub struct Prepared {
    id: InequalityId,
    tol: f64,
    /// Base of the left-hand side, raised to alpha (or squared for the fixed-alpha forms).
    lhs_base: f64,
    /// Pairwise values raised individually (CKW forms) or squared sums (dual forms).
    terms: Vec<f64>,
    /// Squared sums raised to alpha/2 (max-forms).
    sums: Vec<f64>,
    weighted: Vec<WeightedBlocks>,
    factor: f64,
    precondition_met: bool,
    branch: Option<bool>,
    schmidt_rank: Option<usize>,
}

fn require_qubits(id: InequalityId, n: usize) -> Result<()> {
    let need = id.min_qubits();
    if n < need {
        return Err(Error::TooFewQubits { need, got: n });
    }
    Ok(())
}

fn distinct(roles: &[usize], n: usize) -> Result<()> {
    for (i, &r) in roles.iter().enumerate() {
        if r >= n {
            return Err(Error::BadLabels(format!(
                "role qubit {r} not in a {n}-qubit state"
            )));
        }
        if roles[..i].contains(&r) {
            return Err(Error::BadLabels(format!("qubit {r} assigned two roles")));
        }
    }
    Ok(())
}

/// `C^2(X | rest) >= C^2(Y | rest)` up to snapping.
fn ge(x: f64, y: f64) -> bool {
    x >= y - ZERO_SNAP
}

impl Prepared {
    pub fn new(analysis: &StateAnalysis, id: InequalityId, spec: &EvalSpec) -> Result<Self> {
        use InequalityId::*;
        let n = analysis.n_qubits();
        if !id.is_state_based() {
            return Err(Error::BadInput(format!("{id} takes scalars, not a state")));
        }
        require_qubits(id, n)?;
        let labels = analysis.labels();
        let Roles { a, b, c1 } = spec.roles;
        let mut p = Prepared {
            id,
            tol: spec.tol,
            lhs_base: 0.0,
            terms: Vec::new(),
            sums: Vec::new(),
            weighted: Vec::new(),
            factor: 1.0,
            precondition_met: true,
            branch: None,
            schmidt_rank: None,
        };
        let others = |f: usize| labels.iter().copied().filter(move |&j| j != f);
        match id {
            Ckw2 | CkwAlpha | NegMonogamy => {
                let f = spec.focus();
                distinct(&[f], n)?;
                p.lhs_base = if id == NegMonogamy {
                    analysis.cut_negativity(&[f])?
                } else {
                    analysis.cut_concurrence(&[f])?
                };
                // N_c = C on two-qubit reductions
                p.terms = others(f).map(|j| analysis.pair_c[f][j]).collect();
            }
            DualCoa | NegDual => {
                let f = spec.focus();
                distinct(&[f], n)?;
                p.lhs_base = if id == NegDual {
                    analysis.cut_negativity(&[f])?
                } else {
                    analysis.cut_concurrence(&[f])?
                };
                let g = spec.grouping_for(f, &labels)?;
                // N_a = C_a on two-qubit reductions
                p.terms = g
                    .blocks()
                    .iter()
                    .map(|blk| analysis.grouped_coa_sq(f, blk))
                    .collect::<Result<_>>()?;
            }
            Thm1 | Thm4 => {
                let f = spec.focus();
                distinct(&[f], n)?;
                p.lhs_base = if id == Thm4 {
                    analysis.cut_negativity(&[f])?
                } else {
                    analysis.cut_concurrence(&[f])?
                };
                p.weighted = vec![analysis.weighted_blocks(&spec.grouping_for(f, &labels)?)?];
            }
            Thm2 | Thm3 | Thm5 | Thm6 => {
                distinct(&[a, b], n)?;
                let ab = [a.min(b), a.max(b)];
                p.lhs_base = if matches!(id, Thm5 | Thm6) {
                    analysis.cut_negativity(&ab)?
                } else {
                    analysis.cut_concurrence(&ab)?
                };
                p.weighted = vec![
                    analysis.weighted_blocks(&spec.grouping_for(a, &labels)?)?,
                    analysis.weighted_blocks(&spec.grouping_for(b, &labels)?)?,
                ];
                p.sums = vec![
                    analysis.concurrence_sq_sum(a)?,
                    analysis.concurrence_sq_sum(b)?,
                ];
                let ca = analysis.cut_concurrence(&[a])?;
                let cb = analysis.cut_concurrence(&[b])?;
                p.branch = Some(ge(ca * ca, cb * cb));
                if id == Thm6 {
                    let r = analysis.cut_schmidt_rank(&ab)?;
                    p.schmidt_rank = Some(r);
                    p.factor = (r * r.saturating_sub(1)) as f64 / 2.0;
                }
            }
            Cor1 | Cor2Lower | Cor2Upper => {
                distinct(&[a, b, c1], n)?;
                let mut abc = vec![a, b, c1];
                abc.sort_unstable();
                p.lhs_base = analysis.cut_concurrence(&abc)?;
                p.weighted = vec![
                    analysis.weighted_blocks(&spec.grouping_for(a, &labels)?)?,
                    analysis.weighted_blocks(&spec.grouping_for(b, &labels)?)?,
                    analysis.weighted_blocks(&spec.grouping_for(c1, &labels)?)?,
                ];
                p.sums = vec![
                    analysis.concurrence_sq_sum(a)?,
                    analysis.concurrence_sq_sum(b)?,
                    analysis.concurrence_sq_sum(c1)?,
                ];
                let mut ab = vec![a, b];
                ab.sort_unstable();
                let c_ab = analysis.cut_concurrence(&ab)?;
                let c_c1 = analysis.cut_concurrence(&[c1])?;
                let branch = match id {
                    Cor1 => ge(c_ab * c_ab, c_c1 * c_c1),
                    Cor2Lower => ge(c_c1 * c_c1, c_ab * c_ab),
                    _ => true,
                };
                p.branch = Some(branch);
                if id == Cor2Lower {
                    // J_{C_1} does not enter
                    p.weighted.truncate(2);
                }
                p.precondition_met = branch;
            }
            Lemma1 => unreachable!(),
        }
        p.precondition_met &= p.weighted.iter().all(|w| w.ordering.satisfied);
        Ok(p)
    }

    pub fn id(&self) -> InequalityId {
        self.id
    }

    pub fn precondition_met(&self) -> bool {
        self.precondition_met
    }

    pub fn weighted(&self) -> &[WeightedBlocks] {
        &self.weighted
    }

    fn j(&self, k: usize, alpha: f64) -> f64 {
        self.weighted[k].weighted_sum(alpha)
    }

    /// Evaluate at one exponent.
    pub fn eval(&self, alpha: f64) -> Result<InequalityReport> {
        use InequalityId::*;
        let range = self.id.alpha_range();
        if !range.contains(alpha) {
            return Err(Error::BadAlpha {
                alpha,
                range: range.describe(),
            });
        }
        let (lhs, rhs) = match self.id {
            Ckw2 => (
                self.lhs_base.powi(2),
                self.terms.iter().map(|c| c * c).sum(),
            ),
            CkwAlpha | NegMonogamy => (
                powa(self.lhs_base, alpha),
                self.terms.iter().map(|&c| powa(c, alpha)).sum(),
            ),
            DualCoa | NegDual => (self.lhs_base.powi(2), self.terms.iter().sum()),
            Thm1 | Thm4 => (powa(self.lhs_base, alpha), self.j(0, alpha)),
            Thm2 | Thm5 => (powa(self.lhs_base, alpha), self.max_form(alpha)),
            Thm3 => (
                powa(self.lhs_base, alpha),
                self.j(0, alpha) + self.j(1, alpha),
            ),
            Thm6 => (
                powa(self.lhs_base, alpha),
                powa(self.factor, alpha / 2.0) * (self.j(0, alpha) + self.j(1, alpha)),
            ),
            Cor1 => (
                powa(self.lhs_base, alpha),
                self.max_form(alpha) - self.j(2, alpha),
            ),
            Cor2Lower => (
                powa(self.lhs_base, alpha),
                powa(self.sums[2], alpha / 2.0) - self.j(0, alpha) - self.j(1, alpha),
            ),
            Cor2Upper => (
                powa(self.lhs_base, alpha),
                self.j(0, alpha) + self.j(1, alpha) + self.j(2, alpha),
            ),
            Lemma1 => unreachable!(),
        };
        let mut r = InequalityReport::new(self.id, alpha, lhs, rhs, self.tol);
        if !self.weighted.is_empty() {
            r.ordering = Some(self.weighted.iter().map(|w| w.describe()).join(";"));
        }
        r.precondition_met = self.precondition_met;
        r.branch = self.branch;
        r.schmidt_rank = self.schmidt_rank;
        Ok(r)
    }

    /// `max{ S_A^(alpha/2) - J_B, S_B^(alpha/2) - J_A }`.
    fn max_form(&self, alpha: f64) -> f64 {
        let first = powa(self.sums[0], alpha / 2.0) - self.j(1, alpha);
        let second = powa(self.sums[1], alpha / 2.0) - self.j(0, alpha);
        first.max(second)
    }

    /// `N^alpha(AB | rest) - (S_A^(alpha/2) - J'_A)`: the gap between the
    /// negativity and the first candidate with the `A`-focus weighted sum.
    pub fn theorem5_difference(&self, alpha: f64) -> Result<f64> {
        if !matches!(
            self.id,
            InequalityId::Thm5 | InequalityId::Thm6 | InequalityId::Thm2 | InequalityId::Thm3
        ) {
            return Err(Error::BadInput(format!(
                "{} has no A/B weighted sums",
                self.id
            )));
        }
        Ok(powa(self.lhs_base, alpha) - (powa(self.sums[0], alpha / 2.0) - self.j(0, alpha)))
    }
}

/// Evaluate one inequality on one pure state.
pub fn evaluate(
    state: &PureState,
    id: InequalityId,
    spec: &EvalSpec,
    alpha: f64,
) -> Result<InequalityReport> {
    let analysis = StateAnalysis::new(state)?;
    Prepared::new(&analysis, id, spec)?.eval(alpha)
}

/// `sum_{j in block} C_a^2(rho_{focus j})`.
pub fn grouped_coa_sq(state: &PureState, focus: usize, block: &[usize]) -> Result<f64> {
    StateAnalysis::new(state)?.grouped_coa_sq(focus, block)
}

fn focused(focus: usize) -> EvalSpec {
    EvalSpec {
        focus: Some(focus),
        roles: Roles {
            a: focus,
            ..Roles::default()
        },
        ..Default::default()
    }
}

fn with_grouping(grouping: &BlockGrouping) -> EvalSpec {
    EvalSpec {
        groupings: vec![grouping.clone()],
        ..focused(grouping.focus())
    }
}

/// `C^alpha(A|rest) >= sum_j C^alpha(A B_j)`, `alpha >= 2`.
pub fn ckw_check(state: &PureState, focus: usize, alpha: f64) -> Result<InequalityReport> {
    let id = if alpha == 2.0 {
        InequalityId::Ckw2
    } else {
        InequalityId::CkwAlpha
    };
    evaluate(state, id, &focused(focus), alpha)
}

/// `C^2(A|rest) <= sum_i C_a^2(A M_i)`.
pub fn dual_coa_check(state: &PureState, grouping: &BlockGrouping) -> Result<InequalityReport> {
    evaluate(state, InequalityId::DualCoa, &with_grouping(grouping), 2.0)
}

/// `C^alpha(A|rest) <= sum_i (alpha/2)^(i-1) C_a^alpha(A M_i)`, `0 <= alpha <= 2`.
pub fn theorem1_bound(
    state: &PureState,
    grouping: &BlockGrouping,
    alpha: f64,
) -> Result<InequalityReport> {
    evaluate(state, InequalityId::Thm1, &with_grouping(grouping), alpha)
}

pub fn theorem2_lower(state: &PureState, alpha: f64, spec: &EvalSpec) -> Result<InequalityReport> {
    evaluate(state, InequalityId::Thm2, spec, alpha)
}

pub fn theorem3_upper(state: &PureState, alpha: f64, spec: &EvalSpec) -> Result<InequalityReport> {
    evaluate(state, InequalityId::Thm3, spec, alpha)
}

pub fn corollary1_lower(
    state: &PureState,
    alpha: f64,
    spec: &EvalSpec,
) -> Result<InequalityReport> {
    evaluate(state, InequalityId::Cor1, spec, alpha)
}

pub fn corollary2_bounds(
    state: &PureState,
    alpha: f64,
    spec: &EvalSpec,
) -> Result<(InequalityReport, InequalityReport)> {
    let analysis = StateAnalysis::new(state)?;
    Ok((
        Prepared::new(&analysis, InequalityId::Cor2Lower, spec)?.eval(alpha)?,
        Prepared::new(&analysis, InequalityId::Cor2Upper, spec)?.eval(alpha)?,
    ))
}

/// `N^alpha(A|rest) >= sum_j N_c^alpha(A B_j)`, `alpha >= 2`.
pub fn negativity_monogamy_check(
    state: &PureState,
    focus: usize,
    alpha: f64,
) -> Result<InequalityReport> {
    evaluate(state, InequalityId::NegMonogamy, &focused(focus), alpha)
}

/// `N^2(A|rest) <= sum_i N_a^2(A M_i)`.
pub fn negativity_dual_check(
    state: &PureState,
    grouping: &BlockGrouping,
) -> Result<InequalityReport> {
    evaluate(state, InequalityId::NegDual, &with_grouping(grouping), 2.0)
}

pub fn theorem4_bound(
    state: &PureState,
    grouping: &BlockGrouping,
    alpha: f64,
) -> Result<InequalityReport> {
    evaluate(state, InequalityId::Thm4, &with_grouping(grouping), alpha)
}

pub fn theorem5_lower(state: &PureState, alpha: f64, spec: &EvalSpec) -> Result<InequalityReport> {
    evaluate(state, InequalityId::Thm5, spec, alpha)
}

pub fn theorem6_upper(state: &PureState, alpha: f64, spec: &EvalSpec) -> Result<InequalityReport> {
    evaluate(state, InequalityId::Thm6, spec, alpha)
}

/// `N^alpha(AB|rest) - ((sum_{x != A} N_c^2(A x))^(alpha/2) - J'_A)`.
pub fn theorem5_difference(state: &PureState, alpha: f64, spec: &EvalSpec) -> Result<f64> {
    let analysis = StateAnalysis::new(state)?;
    Prepared::new(&analysis, InequalityId::Thm5, spec)?.theorem5_difference(alpha)
}

/// `(x - y)^a >= x^a - y^a` and `(x + y)^a <= x^a + y^a` for `x >= y >= 0`, `0 <= a <= 1`.
pub fn lemma1_check(x: f64, y: f64, alpha: f64) -> Result<(InequalityReport, InequalityReport)> {
    if !(x.is_finite() && y.is_finite()) || y < 0.0 || x < y {
        return Err(Error::BadInput(format!(
            "need x >= y >= 0, got x = {x}, y = {y}"
        )));
    }
    let range = InequalityId::Lemma1.alpha_range();
    if !range.contains(alpha) {
        return Err(Error::BadAlpha {
            alpha,
            range: range.describe(),
        });
    }
    let id = InequalityId::Lemma1;
    let diff = InequalityReport::new(
        id,
        alpha,
        (x - y).powf(alpha),
        x.powf(alpha) - y.powf(alpha),
        SCALAR_TOL,
    );
    // second form is an upper bound: swap sides so the lower-bound slack convention applies
    let sum = InequalityReport::new(
        id,
        alpha,
        x.powf(alpha) + y.powf(alpha),
        (x + y).powf(alpha),
        SCALAR_TOL,
    );
    Ok((diff, sum))
}

/// `(1+t)^x <= 1 + x t <= 1 + x t^x` for `t, x` in `[0, 1]`.
pub fn proof_scalar_check(t: f64, x: f64) -> Result<bool> {
    if !(0.0..=1.0).contains(&t) || !(0.0..=1.0).contains(&x) {
        return Err(Error::BadInput(format!(
            "t = {t}, x = {x} outside [0, 1]^2"
        )));
    }
    let a = (1.0 + t).powf(x);
    let b = 1.0 + x * t;
    let c = 1.0 + x * t.powf(x);
    Ok(a <= b + SCALAR_TOL && b <= c + SCALAR_TOL)
}
