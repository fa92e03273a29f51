use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qmono::harness::{self, AlphaGrid, CampaignConfig};
use qmono::measures::{self, MeasureKind};
use qmono::monogamy::{self, fmt_sig, EvalSpec, InequalityId, Prepared, Roles, StateAnalysis};
use qmono::qstate::{Bipartition, BlockGrouping, DensityMatrix, State};
use qmono::states::{self, StateRecipe};
use qmono::{io, Error};

const EXIT_VIOLATED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_PRECONDITION: u8 = 4;

#[derive(Parser)]
#[command(
    name = "qmono",
    version,
    about = "Entanglement measures and monogamy checks for multi-qubit states"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute one entanglement measure.
    Measure(MeasureArgs),
    /// Evaluate one inequality on one state (or on scalars for LEMMA1).
    Check(CheckArgs),
    /// Randomized campaign over Haar-random pure states.
    Verify(VerifyArgs),
    /// Write the CSV data behind one of the figures.
    Reproduce(ReproduceArgs),
    /// Write a Haar-random pure state to a JSON state file.
    Sample(SampleArgs),
}

#[derive(Args)]
#[group(required = false, multiple = false)]
struct StateSource {
    /// JSON state file.
    #[arg(long)]
    state: Option<PathBuf>,
    /// Named state, e.g. `example2`, `gsd3:l0,l1,l2,l3,l4[,phi]`, `haar:n,seed[,stream]`.
    #[arg(long)]
    recipe: Option<String>,
}

#[derive(Args)]
struct MeasureArgs {
    #[command(flatten)]
    source: StateSource,
    /// concurrence, coa, negativity, cren, crenoa, linear-entropy.
    #[arg(long)]
    measure: String,
    /// Bipartition `0,1|2,3`, or one group to cut against the rest.
    #[arg(long)]
    cut: Option<String>,
    /// Two qubits `i,j` whose reduced state is measured.
    #[arg(long)]
    pair: Option<String>,
}

#[derive(Args)]
struct RoleArgs {
    /// Qubit playing A.
    #[arg(long, default_value_t = 0)]
    a: usize,
    /// Qubit playing B.
    #[arg(long, default_value_t = 1)]
    b: usize,
    /// Qubit playing C_1.
    #[arg(long, default_value_t = 2)]
    c1: usize,
    /// Focus of single-focus inequalities (defaults to A).
    #[arg(long)]
    focus: Option<usize>,
    /// Block grouping `1|2,3` for the focus, or `F:1|2,3` for qubit F. Repeatable.
    #[arg(long)]
    blocks: Vec<String>,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    source: StateSource,
    #[arg(long)]
    inequality: String,
    #[arg(long)]
    alpha: f64,
    #[command(flatten)]
    roles: RoleArgs,
    /// LEMMA1 scalar x.
    #[arg(long)]
    x: Option<f64>,
    /// LEMMA1 scalar y.
    #[arg(long)]
    y: Option<f64>,
    #[arg(long, default_value_t = monogamy::DEFAULT_TOL)]
    tol: f64,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    inequality: String,
    /// Number of qubits.
    #[arg(long, default_value_t = 3)]
    n: usize,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    /// `START:STOP:POINTS`; defaults to the inequality's own grid.
    #[arg(long)]
    alpha_grid: Option<String>,
    #[arg(long, env = "QMONO_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = monogamy::DEFAULT_TOL)]
    tol: f64,
    /// CSV of every report.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Print the summary as JSON.
    #[arg(long)]
    json: bool,
    #[command(flatten)]
    roles: RoleArgs,
}

#[derive(Args)]
struct ReproduceArgs {
    /// Figure number, 1 to 5.
    #[arg(long)]
    figure: u32,
    /// Output CSV (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SampleArgs {
    /// Number of qubits.
    #[arg(long)]
    n: usize,
    #[arg(long, env = "QMONO_SEED", default_value_t = 0)]
    seed: u64,
    /// Output JSON (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

/// An error tagged with the flag it came from.
struct Failure {
    flag: Option<&'static str>,
    err: Error,
}

impl Failure {
    fn code(&self) -> u8 {
        if self.err.is_numerical() {
            EXIT_NUMERICAL
        } else {
            EXIT_USAGE
        }
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        Failure { flag: None, err }
    }
}

trait Flag<T> {
    fn flag(self, name: &'static str) -> Result<T, Failure>;
}

impl<T> Flag<T> for qmono::Result<T> {
    fn flag(self, name: &'static str) -> Result<T, Failure> {
        self.map_err(|err| Failure {
            flag: Some(name),
            err,
        })
    }
}

type Outcome = Result<u8, Failure>;

fn load(source: &StateSource) -> Result<State, Failure> {
    match (&source.state, &source.recipe) {
        (Some(p), None) => io::load_state(p).flag("--state"),
        (None, Some(r)) => r
            .parse::<StateRecipe>()
            .and_then(|r| r.build())
            .flag("--recipe"),
        _ => Err(Error::BadInput(
            "one of --state or --recipe is required".into(),
        ))
        .flag("--state"),
    }
}

fn parse_pair(spec: &str, n: usize) -> qmono::Result<[usize; 2]> {
    let v: Vec<usize> = spec
        .split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad qubit label {t:?}")))
        })
        .collect::<qmono::Result<_>>()?;
    match v.as_slice() {
        &[i, j] if i != j && i < n && j < n => Ok([i.min(j), i.max(j)]),
        _ => Err(Error::BadLabels(format!(
            "pair {spec:?} needs two distinct qubits below {n}"
        ))),
    }
}

fn two_qubit(state: &State, pair: Option<&str>) -> Result<DensityMatrix, Failure> {
    match pair {
        Some(p) => {
            let [i, j] = parse_pair(p, state.n_qubits()).flag("--pair")?;
            qmono::qstate::partial_trace(state, &[i, j]).flag("--pair")
        }
        None if state.n_qubits() == 2 => Ok(state.density()),
        None => Err(Error::NotTwoQubit(state.n_qubits())).flag("--pair"),
    }
}

fn measure(args: &MeasureArgs) -> Outcome {
    let kind: MeasureKind = args.measure.parse().flag("--measure")?;
    let state = load(&args.source)?;
    let labels = state.labels();
    let cut = args
        .cut
        .as_deref()
        .map(|c| Bipartition::parse(c, &labels))
        .transpose()
        .flag("--cut")?;
    let value = match kind {
        MeasureKind::Concurrence | MeasureKind::Negativity | MeasureKind::LinearEntropy
            if cut.is_some() && args.pair.is_none() =>
        {
            let cut = cut.unwrap();
            match kind {
                MeasureKind::Concurrence => match &state {
                    State::Pure(s) => measures::concurrence_pure(s, &cut).flag("--cut")?,
                    State::Mixed(r) if r.n_qubits() == 2 => measures::wootters_concurrence(r)?,
                    State::Mixed(_) => {
                        return Err(Error::BadInput(
                            "concurrence across a cut needs a pure state; use --pair for two-qubit reductions"
                                .into(),
                        ))
                        .flag("--cut")
                    }
                },
                MeasureKind::Negativity => measures::negativity(&state, &cut).flag("--cut")?,
                _ => measures::linear_entropy(
                    &qmono::qstate::partial_trace(&state, cut.side_a()).flag("--cut")?,
                ),
            }
        }
        MeasureKind::Negativity => {
            let rho = two_qubit(&state, args.pair.as_deref())?;
            let k = Bipartition::parse("0|1", &[0, 1])?;
            measures::negativity(&rho.into(), &k)?
        }
        MeasureKind::LinearEntropy if args.pair.is_none() => {
            return Err(Error::BadInput(
                "linear-entropy needs --cut or --pair".into(),
            ))
            .flag("--cut")
        }
        MeasureKind::LinearEntropy => {
            measures::linear_entropy(&two_qubit(&state, args.pair.as_deref())?)
        }
        MeasureKind::Concurrence => {
            measures::wootters_concurrence(&two_qubit(&state, args.pair.as_deref())?)?
        }
        MeasureKind::Coa => measures::coa_two_qubit(&two_qubit(&state, args.pair.as_deref())?)?,
        MeasureKind::Cren => measures::cren_two_qubit(&two_qubit(&state, args.pair.as_deref())?)?,
        MeasureKind::Crenoa => {
            measures::crenoa_two_qubit(&two_qubit(&state, args.pair.as_deref())?)?
        }
    };
    println!("{}", fmt_sig(value, 12));
    Ok(0)
}

fn eval_spec(r: &RoleArgs, n: usize, tol: f64) -> Result<EvalSpec, Failure> {
    let labels: Vec<usize> = (0..n).collect();
    let focus = r.focus.unwrap_or(r.a);
    let mut groupings = Vec::new();
    for spec in &r.blocks {
        let (f, body) = match spec.split_once(':') {
            Some((f, body)) => (
                f.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad focus {f:?} in {spec:?}")))
                    .flag("--blocks")?,
                body,
            ),
            None => (focus, spec.as_str()),
        };
        let g = BlockGrouping::parse(f, body, &labels).flag("--blocks")?;
        if g.blocks().len() > monogamy::MAX_BLOCKS {
            return Err(Error::TooManyBlocks(g.blocks().len())).flag("--blocks");
        }
        groupings.push(g);
    }
    Ok(EvalSpec {
        focus: r.focus,
        roles: Roles {
            a: r.a,
            b: r.b,
            c1: r.c1,
        },
        groupings,
        tol,
    })
}

fn check_tol(tol: f64) -> Result<(), Failure> {
    if tol >= 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::BadInput(format!("tolerance {tol} must be >= 0"))).flag("--tol")
    }
}

fn check(args: &CheckArgs) -> Outcome {
    let id: InequalityId = args.inequality.parse().flag("--inequality")?;
    check_tol(args.tol)?;
    if !id.is_state_based() {
        let x = args
            .x
            .ok_or(Error::BadInput("LEMMA1 needs --x".into()))
            .flag("--x")?;
        let y = args
            .y
            .ok_or(Error::BadInput("LEMMA1 needs --y".into()))
            .flag("--y")?;
        let (d, s) = match monogamy::lemma1_check(x, y, args.alpha) {
            Err(e @ Error::BadAlpha { .. }) => return Err(e).flag("--alpha"),
            r => r.flag("--x")?,
        };
        println!("{d}\n\n{s}");
        return Ok(if d.holds && s.holds { 0 } else { EXIT_VIOLATED });
    }
    let state = load(&args.source)?;
    let pure = match &state {
        State::Pure(s) => s.clone(),
        State::Mixed(_) => {
            return Err(Error::BadInput(format!("{id} is evaluated on pure states")))
                .flag("--state")
        }
    };
    let spec = eval_spec(&args.roles, pure.n_qubits(), args.tol)?;
    let analysis = StateAnalysis::new(&pure)?;
    let prepared = match Prepared::new(&analysis, id, &spec) {
        Err(e @ (Error::TooFewQubits { .. } | Error::BadInput(_))) => {
            return Err(e).flag("--inequality")
        }
        Err(e @ Error::BadLabels(_)) => return Err(e).flag("--a/--b/--c1/--focus"),
        r => r?,
    };
    let report = prepared.eval(args.alpha).flag("--alpha")?;
    println!("{report}");
    for w in prepared.weighted() {
        println!(
            "blocks[{}]      {:?} C_a = {:?}",
            w.focus, w.blocks, w.values
        );
    }
    if !report.precondition_met {
        let no_order = prepared.weighted().iter().any(|w| !w.ordering.satisfied);
        if no_order {
            println!("precondition not met: NoValidOrdering");
        } else {
            println!("precondition not met: branch condition fails");
        }
        return Ok(EXIT_PRECONDITION);
    }
    Ok(if report.holds { 0 } else { EXIT_VIOLATED })
}

fn verify(args: &VerifyArgs) -> Outcome {
    let id: InequalityId = args.inequality.parse().flag("--inequality")?;
    check_tol(args.tol)?;
    let mut cfg = CampaignConfig::new(id, args.n, args.samples, args.seed);
    if let Some(g) = &args.alpha_grid {
        cfg.alpha_grid = g.parse::<AlphaGrid>().flag("--alpha-grid")?;
    }
    cfg.tol = args.tol;
    cfg.threads = args.threads;
    cfg.output = args.out.clone();
    cfg.spec = eval_spec(&args.roles, args.n.max(1), args.tol)?;
    match cfg.validate() {
        Err(e @ Error::BadAlpha { .. }) => return Err(e).flag("--alpha-grid"),
        Err(e @ Error::TooFewQubits { .. }) => return Err(e).flag("--n"),
        Err(e) => return Err(e).flag("--samples"),
        Ok(()) => {}
    }
    let summary = match harness::run_campaign(&cfg) {
        Err(e @ Error::Io(_)) => return Err(e).flag("--out"),
        r => r?,
    };
    if args.json {
        println!("{}", summary.to_json());
    } else {
        println!("{summary}");
    }
    Ok(if summary.violations == 0 {
        0
    } else {
        EXIT_VIOLATED
    })
}

fn write_out(out: Option<&Path>, bytes: &[u8]) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, bytes).map_err(Error::from).flag("--out"),
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(Error::from)
            .flag("--out"),
    }
}

fn reproduce(args: &ReproduceArgs) -> Outcome {
    let pts = harness::figure_points(args.figure).flag("--figure")?;
    let mut buf = Vec::new();
    harness::write_figure_csv(&pts, &mut buf)?;
    write_out(args.out.as_deref(), &buf)?;
    Ok(0)
}

fn sample(args: &SampleArgs) -> Outcome {
    let s = states::haar_random_pure(args.n, args.seed).flag("--n")?;
    let mut text = io::state_to_json(&s.into())?;
    text.push('\n');
    write_out(args.out.as_deref(), text.as_bytes())?;
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Measure(a) => measure(a),
        Command::Check(a) => check(a),
        Command::Verify(a) => verify(a),
        Command::Reproduce(a) => reproduce(a),
        Command::Sample(a) => sample(a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            match f.flag {
                Some(flag) => eprintln!("error: {flag}: {}", f.err),
                None => eprintln!("error: {}", f.err),
            }
            ExitCode::from(f.code())
        }
    }
}
