//! Randomized verification campaigns and figure data.

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{with_solver_settings, SolverSettings};
use crate::monogamy::{
    fmt_sig, lemma1_check, powa, proof_scalar_check, EvalSpec, InequalityId, InequalityReport,
    Prepared, StateAnalysis,
};
use crate::qstate::PureState;
use crate::states::{self, StateRecipe};

/// Negative slacks in `[-MARGINAL_HI, -MARGINAL_LO)` are re-evaluated with tight solver settings.
pub const MARGINAL_HI: f64 = 1e-8;
pub const MARGINAL_LO: f64 = 1e-10;
/// Points per axis of the scalar grids.
pub const SCALAR_GRID: usize = 101;
/// Points per figure curve.
pub const FIGURE_POINTS: usize = 201;

/// `points` evenly spaced values from `start` to `stop` inclusive.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AlphaGrid {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl AlphaGrid {
    pub fn new(start: f64, stop: f64, points: usize) -> Result<Self> {
        if points == 0 || !start.is_finite() || !stop.is_finite() {
            return Err(Error::BadInput(format!(
                "bad alpha grid {start}:{stop}:{points}"
            )));
        }
        if points == 1 && start != stop {
            return Err(Error::BadInput(
                "a one-point alpha grid needs start == stop".into(),
            ));
        }
        if stop < start {
            return Err(Error::BadInput(format!(
                "alpha grid runs backwards: {start} > {stop}"
            )));
        }
        Ok(AlphaGrid {
            start,
            stop,
            points,
        })
    }

    pub fn default_for(id: InequalityId) -> Self {
        let (start, stop, points) = id.default_grid();
        AlphaGrid {
            start,
            stop,
            points,
        }
    }

    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.start];
        }
        let step = (self.stop - self.start) / (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                if i + 1 == self.points {
                    self.stop
                } else {
                    self.start + step * i as f64
                }
            })
            .collect()
    }
}

impl FromStr for AlphaGrid {
    type Err = Error;

    /// `start:stop:points`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        let bad = || Error::Parse(format!("alpha grid {s:?}, expected START:STOP:POINTS"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let start = parts[0].parse::<f64>().map_err(|_| bad())?;
        let stop = parts[1].parse::<f64>().map_err(|_| bad())?;
        let points = parts[2].parse::<usize>().map_err(|_| bad())?;
        AlphaGrid::new(start, stop, points)
    }
}

impl fmt::Display for AlphaGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.points)
    }
}

#[derive(Clone, Debug)]
pub struct CampaignConfig {
    pub inequality: InequalityId,
    pub n_qubits: usize,
    pub samples: usize,
    pub alpha_grid: AlphaGrid,
    pub seed: u64,
    pub tol: f64,
    /// Roles, focus and block groupings. Its `tol` is replaced by `tol` above.
    pub spec: EvalSpec,
    /// Worker threads; 0 lets rayon decide.
    pub threads: usize,
    pub output: Option<PathBuf>,
}

impl CampaignConfig {
    pub fn new(inequality: InequalityId, n_qubits: usize, samples: usize, seed: u64) -> Self {
        CampaignConfig {
            inequality,
            n_qubits,
            samples,
            alpha_grid: AlphaGrid::default_for(inequality),
            seed,
            tol: crate::monogamy::DEFAULT_TOL,
            spec: EvalSpec::default(),
            threads: 0,
            output: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 && self.inequality.is_state_based() {
            return Err(Error::BadInput("samples must be at least 1".into()));
        }
        if !(self.tol >= 0.0 && self.tol.is_finite()) {
            return Err(Error::BadInput(format!(
                "tolerance {} must be >= 0",
                self.tol
            )));
        }
        let range = self.inequality.alpha_range();
        for a in self.alpha_grid.values() {
            if !range.contains(a) {
                return Err(Error::BadAlpha {
                    alpha: a,
                    range: range.describe(),
                });
            }
        }
        if self.inequality.is_state_based() {
            let need = self.inequality.min_qubits();
            if self.n_qubits < need {
                return Err(Error::TooFewQubits {
                    need,
                    got: self.n_qubits,
                });
            }
            if self.n_qubits > crate::qstate::MAX_QUBITS {
                return Err(Error::BadSize(format!(
                    "n_qubits = {} exceeds {}",
                    self.n_qubits,
                    crate::qstate::MAX_QUBITS
                )));
            }
        }
        Ok(())
    }

    fn eval_spec(&self) -> EvalSpec {
        EvalSpec {
            tol: self.tol,
            ..self.spec.clone()
        }
    }

    pub fn recipe(&self, sample: usize) -> StateRecipe {
        StateRecipe::HaarPure {
            n: self.n_qubits,
            seed: self.seed,
            stream: sample as u64,
        }
    }
}

/// One report with what is needed to replay it.
#[derive(Clone, Debug, PartialEq)]
pub struct CampaignRow {
    pub sample: usize,
    pub recipe: String,
    pub report: InequalityReport,
    /// Slack fell in the marginal window and the row holds the tight re-evaluation.
    pub marginal: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WorstCase {
    pub slack: f64,
    pub alpha: f64,
    pub sample: usize,
    pub recipe: String,
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CampaignSummary {
    pub inequality: String,
    pub n_qubits: usize,
    pub samples: usize,
    pub alpha_grid: String,
    pub seed: u64,
    pub tol: f64,
    pub total: usize,
    pub holds: usize,
    pub violations: usize,
    pub skipped: usize,
    pub marginal: usize,
    /// Most negative slack among precondition-satisfied checks.
    pub worst: Option<WorstCase>,
    pub runtime_secs: f64,
}

impl CampaignSummary {
    pub fn skip_rate(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.skipped as f64 / self.total as f64
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serializes")
    }
}

impl fmt::Display for CampaignSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<(&str, String)> = vec![
            ("inequality", self.inequality.clone()),
            ("n_qubits", self.n_qubits.to_string()),
            ("samples", self.samples.to_string()),
            ("alpha_grid", self.alpha_grid.clone()),
            ("seed", self.seed.to_string()),
            ("tol", format!("{:e}", self.tol)),
            ("total", self.total.to_string()),
            ("holds", self.holds.to_string()),
            ("violations", self.violations.to_string()),
            ("skipped", self.skipped.to_string()),
            ("skip_rate", format!("{:.4}", self.skip_rate())),
            ("marginal", self.marginal.to_string()),
            (
                "worst_slack",
                self.worst
                    .as_ref()
                    .map_or("-".into(), |w| format!("{:e}", w.slack)),
            ),
            (
                "worst_case",
                self.worst.as_ref().map_or("-".into(), |w| {
                    format!("sample {} recipe {} alpha {}", w.sample, w.recipe, w.alpha)
                }),
            ),
            ("runtime_s", format!("{:.3}", self.runtime_secs)),
        ];
        for (i, (k, v)) in rows.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{k:<12} {v}")?;
        }
        Ok(())
    }
}

fn eval_state(
    state: &PureState,
    id: InequalityId,
    spec: &EvalSpec,
    alphas: &[f64],
) -> Result<Vec<InequalityReport>> {
    let analysis = StateAnalysis::new(state)?;
    let prepared = Prepared::new(&analysis, id, spec)?;
    alphas.iter().map(|&a| prepared.eval(a)).collect()
}

fn is_marginal(r: &InequalityReport) -> bool {
    r.slack < -MARGINAL_LO && r.slack >= -MARGINAL_HI
}

/// All rows of one sample, in alpha order.
pub fn replay_sample(config: &CampaignConfig, sample: usize) -> Result<Vec<CampaignRow>> {
    let recipe = config.recipe(sample);
    let state = recipe.build_pure()?;
    let spec = config.eval_spec();
    let alphas = config.alpha_grid.values();
    let mut reports = eval_state(&state, config.inequality, &spec, &alphas)?;
    let mut flags = vec![false; reports.len()];
    if reports.iter().any(is_marginal) {
        let tight = with_solver_settings(SolverSettings::TIGHT, || {
            eval_state(&state, config.inequality, &spec, &alphas)
        })?;
        for (k, r) in reports.iter_mut().enumerate() {
            if is_marginal(r) {
                *r = tight[k].clone();
                flags[k] = true;
            }
        }
    }
    let recipe = recipe.to_string();
    Ok(reports
        .into_iter()
        .zip(flags)
        .map(|(report, marginal)| CampaignRow {
            sample,
            recipe: recipe.clone(),
            report,
            marginal,
        })
        .collect())
}

fn lemma1_rows(config: &CampaignConfig) -> Result<Vec<CampaignRow>> {
    let alphas = config.alpha_grid.values();
    let g = SCALAR_GRID - 1;
    let mut rows = Vec::new();
    let mut sample = 0;
    // x on a grid over [0, 1], y = s x with s on a grid over [0, 1]
    for i in 0..=g {
        let x = i as f64 / g as f64;
        for j in 0..=g {
            let y = x * (j as f64 / g as f64);
            let recipe = format!("lemma1:{x},{y}");
            for &a in &alphas {
                let (d, s) = lemma1_check(x, y, a)?;
                for mut report in [d, s] {
                    report.tol = config.tol;
                    report.holds = report.slack >= -config.tol;
                    rows.push(CampaignRow {
                        sample,
                        recipe: recipe.clone(),
                        report,
                        marginal: false,
                    });
                }
            }
            sample += 1;
        }
    }
    Ok(rows)
}

fn thread_pool(threads: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::BadInput(format!("thread pool: {e}")))
}

/// Every report of the campaign, ordered by sample then alpha.
pub fn campaign_rows(config: &CampaignConfig) -> Result<Vec<CampaignRow>> {
    config.validate()?;
    if !config.inequality.is_state_based() {
        return lemma1_rows(config);
    }
    let pool = thread_pool(config.threads)?;
    let per_sample: Vec<Result<Vec<CampaignRow>>> = pool.install(|| {
        (0..config.samples)
            .into_par_iter()
            .map(|k| replay_sample(config, k))
            .collect()
    });
    let mut rows = Vec::with_capacity(config.samples * config.alpha_grid.points);
    for r in per_sample {
        rows.extend(r?);
    }
    Ok(rows)
}

pub fn summarize(
    config: &CampaignConfig,
    rows: &[CampaignRow],
    runtime_secs: f64,
) -> CampaignSummary {
    let mut s = CampaignSummary {
        inequality: config.inequality.name().to_string(),
        n_qubits: config.n_qubits,
        samples: config.samples,
        alpha_grid: config.alpha_grid.to_string(),
        seed: config.seed,
        tol: config.tol,
        total: rows.len(),
        holds: 0,
        violations: 0,
        skipped: 0,
        marginal: 0,
        worst: None,
        runtime_secs,
    };
    for row in rows {
        let r = &row.report;
        s.marginal += row.marginal as usize;
        if !r.precondition_met {
            s.skipped += 1;
            continue;
        }
        if r.holds {
            s.holds += 1;
        } else {
            s.violations += 1;
        }
        if s.worst.as_ref().is_none_or(|w| r.slack < w.slack) {
            s.worst = Some(WorstCase {
                slack: r.slack,
                alpha: r.alpha,
                sample: row.sample,
                recipe: row.recipe.clone(),
                seed: config.seed,
            });
        }
    }
    s
}

pub const CSV_HEADER: [&str; 10] = [
    "sample",
    "recipe",
    "inequality_id",
    "alpha",
    "lhs",
    "rhs",
    "slack",
    "holds",
    "ordering",
    "precondition_met",
];

/// Floats use the shortest round-trip representation.
pub fn write_campaign_csv<W: Write>(rows: &[CampaignRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for row in rows {
        let r = &row.report;
        w.write_record([
            row.sample.to_string(),
            row.recipe.clone(),
            r.inequality_id.name().to_string(),
            r.alpha.to_string(),
            r.lhs.to_string(),
            r.rhs.to_string(),
            r.slack.to_string(),
            r.holds.to_string(),
            r.ordering.clone().unwrap_or_default(),
            r.precondition_met.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

/// Run the campaign, writing the CSV to `config.output` if set.
pub fn run_campaign(config: &CampaignConfig) -> Result<CampaignSummary> {
    let t0 = Instant::now();
    let rows = campaign_rows(config)?;
    if let Some(path) = &config.output {
        write_campaign_csv(&rows, create(path)?)?;
    }
    Ok(summarize(config, &rows, t0.elapsed().as_secs_f64()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ScalarGridSummary {
    pub checked: usize,
    pub violations: usize,
}

/// `(1+t)^x <= 1 + x t <= 1 + x t^x` on a `points x points` grid over `[0, 1]^2`.
pub fn proof_scalar_grid(points: usize) -> Result<ScalarGridSummary> {
    if points < 2 {
        return Err(Error::BadInput(
            "scalar grid needs at least 2 points".into(),
        ));
    }
    let g = (points - 1) as f64;
    let mut s = ScalarGridSummary {
        checked: 0,
        violations: 0,
    };
    for i in 0..points {
        for j in 0..points {
            s.checked += 1;
            if !proof_scalar_check(i as f64 / g, j as f64 / g)? {
                s.violations += 1;
            }
        }
    }
    Ok(s)
}

/// One point of a figure curve.
#[derive(Clone, Debug, PartialEq)]
pub struct FigurePoint {
    pub alpha: f64,
    pub series: &'static str,
    pub value: f64,
}

fn figure_alphas() -> Vec<f64> {
    AlphaGrid {
        start: 0.0,
        stop: 2.0,
        points: FIGURE_POINTS,
    }
    .values()
}

/// The `W`-class state of the fourth and fifth figures.
pub fn figure_wclass_state() -> PureState {
    states::wclass_four_qubit([0.75, 0.5, std::f64::consts::SQRT_2 / 4.0, 0.25])
        .expect("normalized weights")
}

/// Curves of figure 1 to 5, grouped by alpha.
pub fn figure_points(figure: u32) -> Result<Vec<FigurePoint>> {
    let alphas = figure_alphas();
    let spec = EvalSpec::default();
    let mut pts = Vec::new();
    let mut push = |alpha, series, value| {
        pts.push(FigurePoint {
            alpha,
            series,
            value,
        })
    };
    match figure {
        1 => {
            let l = 1.0 / 5f64.sqrt();
            let s = states::gsd_three_qubit([l; 5], 0.0)?;
            let an = StateAnalysis::new(&s)?;
            let p = Prepared::new(&an, InequalityId::Thm1, &spec)?;
            for &a in &alphas {
                let r = p.eval(a)?;
                push(a, "concurrence_alpha", r.lhs);
                push(a, "thm1_rhs", r.rhs);
            }
        }
        2 | 3 => {
            let id = if figure == 2 {
                InequalityId::Thm2
            } else {
                InequalityId::Thm3
            };
            let name = if figure == 2 { "thm2_rhs" } else { "thm3_rhs" };
            let an = StateAnalysis::new(&states::example2_state())?;
            let p = Prepared::new(&an, id, &spec)?;
            for &a in &alphas {
                push(a, name, p.eval(a)?.rhs);
            }
        }
        4 | 5 => {
            let s = figure_wclass_state();
            let an = StateAnalysis::new(&s)?;
            let p = Prepared::new(&an, InequalityId::Thm5, &spec)?;
            let neg = an.cut_negativity(&[0, 1])?;
            for &a in &alphas {
                if figure == 4 {
                    push(a, "y", p.theorem5_difference(a)?);
                } else {
                    let j = p.weighted()[0].weighted_sum(a) + p.weighted()[1].weighted_sum(a);
                    push(a, "negativity_alpha", powa(neg, a));
                    push(a, "ja_plus_jb", j);
                }
            }
        }
        _ => return Err(Error::BadInput(format!("figure {figure} not in 1..=5"))),
    }
    Ok(pts)
}

/// `alpha,series,value` with alpha to two decimals and values to 12 significant digits.
pub fn write_figure_csv<W: Write>(points: &[FigurePoint], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(["alpha", "series", "value"])
        .map_err(csv_err)?;
    for p in points {
        w.write_record([
            format!("{:.2}", p.alpha),
            p.series.to_string(),
            fmt_sig(p.value, 12),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_figure(figure: u32, out: &Path) -> Result<()> {
    let pts = figure_points(figure)?;
    write_figure_csv(&pts, create(out)?)
}
