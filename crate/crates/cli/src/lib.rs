//! The `focal` command: every library capability behind one binary, with
//! deterministic CSV and JSON emitters for the figure data.

mod figures;
mod table;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use focal_core::io::Sig17;
use focal_core::{
    alpha_asymptotic, alpha_bounds, analyze, binary_bounds, cross_entropy, entropy_consequences, focal_d1_inverse,
    focal_entropy, focal_entropy_dgamma, focal_loss, focal_loss_d1, focal_loss_d2, h_gamma, kappa, kl_divergence,
    limit_diagnostic, phi, recurse_minimizer, rho_and_r, shannon_entropy, solve_minimizer, sufficient_conditions,
    tilt, EntropyValue, FocalError, FocusParam64, Pmf64,
};
use focal_experiments::{
    compare_posteriors, ingest_mnist, sample_synthetic, synthetic_posterior, theory_table, train_classifier,
    BinnedDataset, ExperimentError, PosteriorTable, SyntheticSpec, TrainConfig, DEFAULT_MIN_COUNT,
};
use serde::Serialize;

pub use figures::{
    fig10_gammas, fig5_gammas, fig6_gammas, fig9_gammas, figure_table, geomspace, scan_table, Figure, ScanOverrides,
    FIG10_P, FIG10_QS, FIG3_GAMMAS, FIG3_P, FIG4_GAMMA, FIG4_P, FIG4_STEPS, FIG5_PMFS, FIG6_PMFS, FIG7_GAMMA,
    FIG7_RESOLUTION, FIG9_P, FIGURES,
};
pub use table::{Cell, Table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NUMERIC: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

const FIGURE_HELP: &str = "\
Figures (number or --name), CSV columns:
  3  minimizer-bars   gamma,label,p,p_star
  4  recursion        step,p0,p1,p2,p3            (step 0 is the input)
  5  max-probability  support_size,gamma,p_max,max_p_star
  6  asymptote        support_size,gamma,alpha_star,alpha_asymptotic
  7  simplex-scan     p1,p2,p3,alpha_star,p_gamma_a,pmin_minus_pa,d1
  9  binary-bounds    gamma,q_gamma,p_star_1,q_gamma_plus1,gap_bound
  10 limit            q_index,gamma,value,target

Every CSV starts with '# key=value' lines (seed first), then the header.
Numbers use 17 significant digits; failed cells and undefined values are 'nan'.
--gamma and --resolution apply to the simplex-scan figure only.";

const OUTPUT_HELP: &str = "\
Exit status: 0 on success, 2 on numerical failure (JSON diagnostic on stderr),
64 on usage errors. Set FOCAL_LOG (e.g. FOCAL_LOG=info) for log output.";

#[derive(Debug, Parser)]
#[command(name = "focal", version, about = "Focal-loss calculus and figure data", after_help = OUTPUT_HELP)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Write the artifact here instead of stdout.
    #[arg(long, global = true, visible_alias = "out", value_name = "PATH")]
    output: Option<PathBuf>,
    /// Output format; figures and scans default to csv, everything else to json.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads for scans and sweeps.
    #[arg(long, global = true, value_parser = parse_jobs)]
    jobs: Option<usize>,
    /// Seed for stochastic commands, echoed in every artifact.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct PmfArgs {
    /// Comma-separated probabilities; labels are 0..N-1.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, value_parser = parse_finite,
          required_unless_present = "pmf_file", conflicts_with = "pmf_file")]
    pmf: Vec<f64>,
    /// JSON file {"labels": [...], "probs": [...]}.
    #[arg(long, value_name = "PATH")]
    pmf_file: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct QArgs {
    /// Comma-separated probabilities of the second distribution.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, value_parser = parse_finite,
          conflicts_with = "q_file")]
    q: Vec<f64>,
    /// JSON file for the second distribution.
    #[arg(long, value_name = "PATH")]
    q_file: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct TrainArgs {
    /// Focusing parameter of the training loss.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true, value_parser = parse_gamma)]
    gamma: f64,
    #[arg(long, default_value_t = 30)]
    epochs: usize,
    #[arg(long, default_value_t = 64)]
    batch_size: usize,
    #[arg(long, default_value_t = 64)]
    hidden: usize,
    #[arg(long, default_value_t = 1e-3, allow_hyphen_values = true, value_parser = parse_finite)]
    learning_rate: f64,
    /// Bins with fewer samples are left out of the gap.
    #[arg(long, default_value_t = DEFAULT_MIN_COUNT)]
    min_count: usize,
    /// Posterior table written in csv format.
    #[arg(long, value_enum, default_value_t = PosteriorKind::Learned)]
    table: PosteriorKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PosteriorKind {
    Learned,
    Theory,
    Empirical,
    Reference,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Focal loss, derivatives, phi and kappa at points; inverse of the derivative.
    ///
    /// CSV columns: p,loss,d1,d2,phi,kappa (with --p) or t,p (with --t).
    Loss {
        #[arg(long, allow_hyphen_values = true, value_parser = parse_gamma)]
        gamma: f64,
        /// Probabilities in (0, 1).
        #[arg(long = "p", value_delimiter = ',', allow_hyphen_values = true, value_parser = parse_open_unit,
              required_unless_present = "t")]
        p: Vec<f64>,
        /// Negative derivative values to invert.
        #[arg(long = "t", value_delimiter = ',', allow_hyphen_values = true, value_parser = parse_negative)]
        t: Vec<f64>,
    },
    /// Shannon, cross, focal and KL entropies of p against q (default q = p).
    ///
    /// CSV columns: quantity,value.
    Entropy {
        #[arg(long, allow_hyphen_values = true, value_parser = parse_gamma)]
        gamma: f64,
        #[command(flatten)]
        pmf: PmfArgs,
        #[command(flatten)]
        q: QArgs,
    },
    /// Minimizer of the focal entropy and its normalization constant.
    ///
    /// CSV columns: label,p,p_star.
    Minimize {
        #[arg(long, allow_hyphen_values = true, value_parser = parse_gamma)]
        gamma: f64,
        #[command(flatten)]
        pmf: PmfArgs,
    },
    /// Regime tags, sorted gaps and sufficient conditions.
    ///
    /// CSV columns: rank,p_sorted,p_star_sorted,d,tag.
    Analyze {
        #[arg(long, allow_hyphen_values = true, value_parser = parse_positive)]
        gamma: f64,
        #[command(flatten)]
        pmf: PmfArgs,
    },
    /// Provable brackets for the normalization constant.
    ///
    /// CSV columns: quantity,value.
    Bounds {
        #[arg(long, allow_hyphen_values = true, value_parser = parse_gamma)]
        gamma: f64,
        #[command(flatten)]
        pmf: PmfArgs,
    },
    /// Power-law envelope of the binary minimizer over a gamma list.
    ///
    /// CSV columns: gamma,q_gamma,p_star_1,q_gamma_plus1,gap_bound.
    Binary {
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true,
              value_parser = parse_positive)]
        gamma: Vec<f64>,
        /// Minority probability in (0, 1/2].
        #[arg(long = "p", default_value_t = 0.05, allow_hyphen_values = true, value_parser = parse_minority)]
        p: f64,
    },
    /// Exact normalization constant against its large-gamma approximation.
    ///
    /// CSV columns: gamma,alpha_star,alpha_asymptotic,relative_gap.
    Asymptote {
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true,
              value_parser = parse_gamma)]
        gamma: Vec<f64>,
        #[command(flatten)]
        pmf: PmfArgs,
    },
    /// Repeated application of the minimizer map.
    ///
    /// CSV columns: step,label,prob (step 0 is the input).
    Recurse {
        #[arg(long, allow_hyphen_values = true, value_parser = parse_gamma)]
        gamma: f64,
        #[command(flatten)]
        pmf: PmfArgs,
        #[arg(long, default_value_t = 3)]
        steps: usize,
    },
    /// Focal entropy to the power 1/gamma along a gamma grid.
    ///
    /// CSV columns: gamma,value,target.
    Limit {
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true,
              value_parser = parse_positive)]
        gamma: Vec<f64>,
        #[command(flatten)]
        pmf: PmfArgs,
        #[command(flatten)]
        q: QArgs,
    },
    /// Interior lattice scan of the ternary simplex.
    ///
    /// CSV columns: p1,p2,p3,alpha_star,p_gamma_a,pmin_minus_pa,d1.
    Scan {
        #[arg(long, allow_hyphen_values = true, value_parser = parse_positive)]
        gamma: f64,
        #[arg(long, default_value_t = 60, value_parser = parse_resolution)]
        resolution: usize,
    },
    /// Data series behind a numbered figure.
    #[command(after_long_help = FIGURE_HELP)]
    Figure {
        /// Figure number or stable name.
        #[arg(required_unless_present = "name", conflicts_with = "name")]
        id: Option<String>,
        /// Stable figure name.
        #[arg(long)]
        name: Option<String>,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_positive)]
        gamma: Option<f64>,
        #[arg(long, value_parser = parse_resolution)]
        resolution: Option<usize>,
    },
    /// Train the classifier on the synthetic imbalanced task.
    ///
    /// CSV columns: f1_bin,f2_bin,count,p_c0,p_c1 for the table chosen by --table.
    TrainSynthetic {
        #[command(flatten)]
        train: TrainArgs,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
    },
    /// Train the classifier on binned MNIST zoning features (digit 1 vs rest).
    ///
    /// CSV columns: f1_bin,f2_bin,count,p_c0,p_c1 for the table chosen by --table.
    TrainMnist {
        #[command(flatten)]
        train: TrainArgs,
        /// IDX image file.
        #[arg(long, value_name = "PATH")]
        images: PathBuf,
        /// IDX label file.
        #[arg(long, value_name = "PATH")]
        labels: PathBuf,
    },
}

fn parse_finite(s: &str) -> Result<f64, String> {
    match s.trim().parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err("expected a finite number".into()),
    }
}

fn parse_gamma(s: &str) -> Result<f64, String> {
    let v = parse_finite(s)?;
    if v < 0.0 {
        return Err("focusing parameter must be >= 0".into());
    }
    Ok(v)
}

fn parse_positive(s: &str) -> Result<f64, String> {
    let v = parse_finite(s)?;
    if v <= 0.0 {
        return Err("must be > 0".into());
    }
    Ok(v)
}

fn parse_open_unit(s: &str) -> Result<f64, String> {
    let v = parse_finite(s)?;
    if !(v > 0.0 && v < 1.0) {
        return Err("must lie in (0, 1)".into());
    }
    Ok(v)
}

fn parse_minority(s: &str) -> Result<f64, String> {
    let v = parse_finite(s)?;
    if !(v > 0.0 && v <= 0.5) {
        return Err("must lie in (0, 1/2]".into());
    }
    Ok(v)
}

fn parse_negative(s: &str) -> Result<f64, String> {
    let v = parse_finite(s)?;
    if v >= 0.0 {
        return Err("derivative values must be < 0".into());
    }
    Ok(v)
}

fn parse_jobs(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(n) if n > 0 => Ok(n),
        _ => Err("expected a positive integer".into()),
    }
}

fn parse_resolution(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(n) if n >= 10 => Ok(n),
        _ => Err("expected an integer >= 10".into()),
    }
}

/// Failure of a command, carrying its exit status.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numeric { kind: &'static str, message: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Numeric { .. } => EXIT_NUMERIC,
        }
    }
}

fn usage(flag: &str, detail: impl std::fmt::Display) -> CliError {
    CliError::Usage(format!("invalid value for '{}': {}", flag, detail))
}

impl From<FocalError> for CliError {
    fn from(e: FocalError) -> Self {
        let kind = match &e {
            FocalError::Domain { .. } => "domain",
            FocalError::Convergence { .. } => "convergence",
            FocalError::Bracket { .. } => "bracket",
            FocalError::InvalidPmf(_) => "invalid_pmf",
            FocalError::LabelMismatch(_) => "label_mismatch",
            FocalError::AbsoluteContinuity { .. } => "absolute_continuity",
            FocalError::Budget { .. } => "budget",
        };
        CliError::Numeric {
            kind,
            message: e.to_string(),
        }
    }
}

impl From<ExperimentError> for CliError {
    fn from(e: ExperimentError) -> Self {
        let kind = match &e {
            ExperimentError::Core(inner) => return CliError::from(inner.clone()),
            ExperimentError::Io { .. } => "io",
            ExperimentError::Format(_) => "format",
            ExperimentError::Invalid(_) => "invalid",
            ExperimentError::Shape(_) => "shape",
            ExperimentError::NonFinite { .. } => "non_finite",
        };
        CliError::Numeric {
            kind,
            message: e.to_string(),
        }
    }
}

/// Emitted artifact: JSON text and, when the command has one, its table.
struct Artifact {
    json: String,
    csv: Option<String>,
    default: Format,
}

impl Artifact {
    fn render(self, format: Option<Format>) -> Result<String, CliError> {
        match format.unwrap_or(self.default) {
            Format::Json => Ok(self.json),
            Format::Csv => self
                .csv
                .ok_or_else(|| usage("--format", "csv is not available for this command")),
        }
    }
}

#[derive(Serialize)]
struct Envelope<'a, B: Serialize> {
    command: &'a str,
    seed: u64,
    #[serde(flatten)]
    body: &'a B,
}

fn json<B: Serialize>(command: &str, seed: u64, body: &B) -> String {
    let mut s = serde_json::to_string_pretty(&Envelope { command, seed, body }).expect("artifact serializes");
    s.push('\n');
    s
}

/// Table artifact whose JSON carries the same rows and metadata.
fn table_artifact(command: &str, seed: u64, table: Table, default: Format) -> Artifact {
    Artifact {
        json: json(command, seed, &table),
        csv: Some(seeded_csv(seed, table)),
        default,
    }
}

fn read_text(flag: &str, path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| usage(flag, format!("{}: {}", path.display(), e)))
}

fn load_pmf(args: &PmfArgs) -> Result<Pmf64, CliError> {
    match &args.pmf_file {
        Some(path) => Pmf64::from_json(&read_text("--pmf-file", path)?).map_err(|e| usage("--pmf-file", e)),
        None => Pmf64::from_probs(args.pmf.clone()).map_err(|e| usage("--pmf", e)),
    }
}

fn load_q(args: &QArgs) -> Result<Option<Pmf64>, CliError> {
    match &args.q_file {
        Some(path) => Pmf64::from_json(&read_text("--q-file", path)?)
            .map(Some)
            .map_err(|e| usage("--q-file", e)),
        None if args.q.is_empty() => Ok(None),
        None => Pmf64::from_probs(args.q.clone()).map(Some).map_err(|e| usage("--q", e)),
    }
}

/// Label-set disagreement between the two inputs is a usage error.
fn pair_err(e: FocalError) -> CliError {
    match e {
        FocalError::LabelMismatch(_) => usage("--q", e),
        other => other.into(),
    }
}

fn gamma_param(g: f64) -> Result<FocusParam64, CliError> {
    FocusParam64::new(g).map_err(|e| usage("--gamma", e))
}

fn require_support(flag: &str, p: &Pmf64) -> Result<(), CliError> {
    if p.support_size() < 2 {
        return Err(usage(flag, "needs at least two labels with positive mass"));
    }
    Ok(())
}

/// Parses `args` (including the program name), runs the command and writes
/// its artifact. Returns the process exit status.
pub fn run<I, A>(args: I) -> i32
where
    I: IntoIterator<Item = A>,
    A: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::new().filter("FOCAL_LOG")).try_init();
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let command = command_name(&cli.command);
    match execute(cli) {
        Ok(()) => EXIT_OK,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {}", msg);
            EXIT_USAGE
        }
        Err(e @ CliError::Numeric { .. }) => {
            let CliError::Numeric { kind, ref message } = e else { unreachable!() };
            let diag = serde_json::json!({
                "error": { "command": command, "kind": kind, "message": message }
            });
            eprintln!("{}", diag);
            e.exit_code()
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Loss { .. } => "loss",
        Command::Entropy { .. } => "entropy",
        Command::Minimize { .. } => "minimize",
        Command::Analyze { .. } => "analyze",
        Command::Bounds { .. } => "bounds",
        Command::Binary { .. } => "binary",
        Command::Asymptote { .. } => "asymptote",
        Command::Recurse { .. } => "recurse",
        Command::Limit { .. } => "limit",
        Command::Scan { .. } => "scan",
        Command::Figure { .. } => "figure",
        Command::TrainSynthetic { .. } => "train-synthetic",
        Command::TrainMnist { .. } => "train-mnist",
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let Cli { common, command } = cli;
    let artifact = match common.jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| usage("--jobs", e))?
            .install(|| dispatch(&command, common.seed))?,
        None => dispatch(&command, common.seed)?,
    };
    let text = artifact.render(common.format)?;
    match &common.output {
        Some(path) => std::fs::write(path, text).map_err(|e| usage("--output", format!("{}: {}", path.display(), e))),
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| usage("--output", e))
        }
    }
}

fn dispatch(command: &Command, seed: u64) -> Result<Artifact, CliError> {
    let name = command_name(command);
    match command {
        Command::Loss { gamma, p, t } => loss(name, seed, *gamma, p, t),
        Command::Entropy { gamma, pmf, q } => entropy(name, seed, *gamma, pmf, q),
        Command::Minimize { gamma, pmf } => {
            let p = load_pmf(pmf)?;
            let r = solve_minimizer(gamma_param(*gamma)?, &p)?;
            let mut t = Table::new(&["label", "p", "p_star"])
                .meta("gamma", *gamma)
                .meta("alpha_star", r.alpha_star)
                .meta("residual", r.residual);
            for i in 0..p.len() {
                t.push(vec![p.labels()[i].clone().into(), p.prob(i).into(), r.p_star.prob(i).into()]);
            }
            #[derive(Serialize)]
            struct Body<'a> {
                gamma: Sig17<f64>,
                p: &'a Pmf64,
                #[serde(flatten)]
                result: &'a focal_core::MinimizerResult64,
            }
            let json = json(name, seed, &Body { gamma: Sig17(*gamma), p: &p, result: &r });
            Ok(Artifact {
                csv: Some(seeded_csv(seed, t)),
                json,
                default: Format::Json,
            })
        }
        Command::Analyze { gamma, pmf } => {
            let p = load_pmf(pmf)?;
            require_support("--pmf", &p)?;
            let g = gamma_param(*gamma)?;
            let report = analyze(g, &p)?;
            let sufficient = sufficient_conditions(g, &p)?;
            let consequences = entropy_consequences(g, &p)?;
            let sorted_p = p.sorted_desc();
            let sorted_q = report.minimizer.p_star.sorted_desc();
            let mut t = Table::new(&["rank", "p_sorted", "p_star_sorted", "d", "tag"])
                .meta("gamma", *gamma)
                .meta("p_gamma_a", report.p_gamma_a)
                .meta("p_gamma_b", report.p_gamma_b)
                .meta("over_suppression", report.over_suppression);
            for (k, (&d, tag)) in report.d.iter().zip(&report.tags).enumerate() {
                let tag = serde_json::to_value(tag).expect("tag serializes");
                t.push(vec![
                    k.into(),
                    sorted_p[k].into(),
                    sorted_q[k].into(),
                    d.into(),
                    tag.as_str().unwrap_or_default().into(),
                ]);
            }
            #[derive(Serialize)]
            struct Body<'a> {
                gamma: Sig17<f64>,
                p: &'a Pmf64,
                p_star: &'a Pmf64,
                #[serde(flatten)]
                report: &'a focal_core::RegimeReport64,
                sufficient_conditions: &'a focal_core::SufficientConditions<f64>,
                entropy_consequences: &'a focal_core::EntropyConsequences,
            }
            let json = json(
                name,
                seed,
                &Body {
                    gamma: Sig17(*gamma),
                    p: &p,
                    p_star: &report.minimizer.p_star,
                    report: &report,
                    sufficient_conditions: &sufficient,
                    entropy_consequences: &consequences,
                },
            );
            Ok(Artifact {
                csv: Some(seeded_csv(seed, t)),
                json,
                default: Format::Json,
            })
        }
        Command::Bounds { gamma, pmf } => {
            let p = load_pmf(pmf)?;
            require_support("--pmf", &p)?;
            let g = gamma_param(*gamma)?;
            let b = alpha_bounds(g, &p)?;
            let alpha = solve_minimizer(g, &p)?.alpha_star;
            let (lo, hi) = b.tightest();
            let mut t = Table::new(&["quantity", "value"]).meta("gamma", *gamma);
            for (k, v) in [
                ("c_n_gamma", b.c_n_gamma),
                ("box_lo", b.box_lo),
                ("box_hi", b.box_hi),
                ("phi_lo", b.phi_lo.unwrap_or(f64::NAN)),
                ("phi_hi", b.phi_hi.unwrap_or(f64::NAN)),
                ("phi_max", b.phi_max),
                ("tightest_lo", lo),
                ("tightest_hi", hi),
                ("alpha_star", alpha),
            ] {
                t.push(vec![k.into(), v.into()]);
            }
            #[derive(Serialize)]
            struct Body<'a> {
                gamma: Sig17<f64>,
                #[serde(flatten)]
                bounds: &'a focal_core::AlphaBounds64,
                tightest: [Sig17<f64>; 2],
                alpha_star: Sig17<f64>,
            }
            let json = json(
                name,
                seed,
                &Body {
                    gamma: Sig17(*gamma),
                    bounds: &b,
                    tightest: [Sig17(lo), Sig17(hi)],
                    alpha_star: Sig17(alpha),
                },
            );
            Ok(Artifact {
                csv: Some(seeded_csv(seed, t)),
                json,
                default: Format::Json,
            })
        }
        Command::Binary { gamma, p } => {
            let mut t = Table::new(&["gamma", "q_gamma", "p_star_1", "q_gamma_plus1", "gap_bound"])
                .meta("p", *p);
            for &g in gamma {
                let b = binary_bounds(gamma_param(g)?, *p)?;
                t.push(vec![g.into(), b.q_gamma.into(), b.p_star_1.into(), b.q_gamma_plus1.into(), b.gap_bound.into()]);
            }
            Ok(table_artifact(name, seed, t, Format::Json))
        }
        Command::Asymptote { gamma, pmf } => {
            let p = load_pmf(pmf)?;
            require_support("--pmf", &p)?;
            let mut t = Table::new(&["gamma", "alpha_star", "alpha_asymptotic", "relative_gap"]);
            for &g in gamma {
                let fg = gamma_param(g)?;
                let exact = solve_minimizer(fg, &p)?.alpha_star;
                let approx = alpha_asymptotic(fg, &p);
                t.push(vec![g.into(), exact.into(), approx.into(), ((exact - approx).abs() / exact).into()]);
            }
            Ok(table_artifact(name, seed, t, Format::Json))
        }
        Command::Recurse { gamma, pmf, steps } => {
            let p = load_pmf(pmf)?;
            let seq = recurse_minimizer(gamma_param(*gamma)?, &p, *steps)?;
            let mut t = Table::new(&["step", "label", "prob"]).meta("gamma", *gamma);
            for (k, q) in std::iter::once(&p).chain(&seq).enumerate() {
                for i in 0..q.len() {
                    t.push(vec![k.into(), q.labels()[i].clone().into(), q.prob(i).into()]);
                }
            }
            #[derive(Serialize)]
            struct Body<'a> {
                gamma: Sig17<f64>,
                steps: Vec<&'a Pmf64>,
            }
            let json = json(
                name,
                seed,
                &Body {
                    gamma: Sig17(*gamma),
                    steps: std::iter::once(&p).chain(&seq).collect(),
                },
            );
            Ok(Artifact {
                csv: Some(seeded_csv(seed, t)),
                json,
                default: Format::Json,
            })
        }
        Command::Limit { gamma, pmf, q } => {
            let p = load_pmf(pmf)?;
            let q = load_q(q)?.ok_or_else(|| usage("--q", "a second distribution is required"))?;
            let d = limit_diagnostic(&p, &q, gamma).map_err(pair_err)?;
            let mut t = Table::new(&["gamma", "value", "target"]);
            for pt in &d.points {
                t.push(vec![pt.gamma.into(), pt.value.to_real().into(), d.target.into()]);
            }
            Ok(Artifact {
                json: json(name, seed, &d),
                csv: Some(seeded_csv(seed, t)),
                default: Format::Json,
            })
        }
        Command::Scan { gamma, resolution } => {
            let t = scan_table(Table::new(&[]), *gamma, *resolution)?;
            Ok(table_artifact(name, seed, t, Format::Csv))
        }
        Command::Figure {
            id,
            name: fig_name,
            gamma,
            resolution,
        } => {
            let key = id.as_deref().or(fig_name.as_deref()).unwrap_or_default();
            let flag = if id.is_some() { "<ID>" } else { "--name" };
            let figure = Figure::parse(key).ok_or_else(|| {
                let known: Vec<String> = FIGURES.iter().map(|f| format!("{} ({})", f.number(), f.name())).collect();
                usage(flag, format!("unknown figure '{}'; expected one of {}", key, known.join(", ")))
            })?;
            if figure != Figure::SimplexScan {
                if gamma.is_some() {
                    return Err(usage("--gamma", "only the simplex-scan figure takes --gamma"));
                }
                if resolution.is_some() {
                    return Err(usage("--resolution", "only the simplex-scan figure takes --resolution"));
                }
            }
            let t = figure_table(
                figure,
                ScanOverrides {
                    gamma: *gamma,
                    resolution: *resolution,
                },
            )?;
            Ok(table_artifact(name, seed, t, Format::Csv))
        }
        Command::TrainSynthetic { train, samples } => {
            let spec = SyntheticSpec::reference(*samples, seed);
            let data = sample_synthetic(&spec).map_err(|e| match e {
                ExperimentError::Invalid(m) => usage("--samples", m),
                other => other.into(),
            })?;
            let reference = synthetic_posterior(&spec)?;
            train_report(name, seed, train, &data, reference, Some(&spec), None)
        }
        Command::TrainMnist { train, images, labels } => {
            for (flag, path) in [("--images", images), ("--labels", labels)] {
                if !path.is_file() {
                    return Err(usage(flag, format!("{} is not a readable file", path.display())));
                }
            }
            let ingest = ingest_mnist(images, labels)?;
            let reference = ingest.dataset.empirical_posterior();
            let info = MnistInfo {
                cuts_f1: ingest.cuts_f1,
                cuts_f2: ingest.cuts_f2,
                class_counts: ingest.class_counts,
            };
            train_report(name, seed, train, &ingest.dataset, reference, None, Some(info))
        }
    }
}

fn seeded_csv(seed: u64, table: Table) -> String {
    let mut t = Table::new(&table.columns);
    t.meta.push(("seed".into(), Cell::UInt(seed)));
    t.meta.extend(table.meta);
    t.rows = table.rows;
    t.to_csv()
}

fn loss(name: &str, seed: u64, gamma: f64, ps: &[f64], ts: &[f64]) -> Result<Artifact, CliError> {
    let g = gamma_param(gamma)?;
    let mut points = Table::new(&["p", "loss", "d1", "d2", "phi", "kappa"]).meta("gamma", gamma);
    for &p in ps {
        points.push(vec![
            p.into(),
            focal_loss(g, p)?.into(),
            focal_loss_d1(g, p)?.into(),
            focal_loss_d2(g, p)?.into(),
            phi(g, p)?.into(),
            kappa(p)?.into(),
        ]);
    }
    let mut inverse = Table::new(&["t", "p"]).meta("gamma", gamma);
    for &t in ts {
        inverse.push(vec![t.into(), focal_d1_inverse(g, t)?.into()]);
    }
    let json = json_raw_rows(name, seed, gamma, &points, &inverse);
    let csv = match (ps.is_empty(), ts.is_empty()) {
        (false, true) => Some(seeded_csv(seed, points)),
        (true, false) => Some(seeded_csv(seed, inverse)),
        _ => None,
    };
    Ok(Artifact {
        json,
        csv,
        default: Format::Json,
    })
}

fn json_raw_rows(name: &str, seed: u64, gamma: f64, points: &Table, inverse: &Table) -> String {
    #[derive(Serialize)]
    struct Body<'a> {
        gamma: Sig17<f64>,
        points: Rows<'a>,
        inverse: Rows<'a>,
    }
    struct Rows<'a>(&'a Table);
    impl Serialize for Rows<'_> {
        fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
            use serde::ser::{SerializeMap, SerializeSeq};
            let mut seq = s.serialize_seq(Some(self.0.rows.len()))?;
            for row in &self.0.rows {
                struct Row<'b>(&'b [&'static str], &'b [Cell]);
                impl Serialize for Row<'_> {
                    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                        let mut m = s.serialize_map(Some(self.0.len()))?;
                        for (k, v) in self.0.iter().zip(self.1) {
                            m.serialize_entry(k, v)?;
                        }
                        m.end()
                    }
                }
                seq.serialize_element(&Row(&self.0.columns, row))?;
            }
            seq.end()
        }
    }
    json(
        name,
        seed,
        &Body {
            gamma: Sig17(gamma),
            points: Rows(points),
            inverse: Rows(inverse),
        },
    )
}

fn entropy(name: &str, seed: u64, gamma: f64, pmf: &PmfArgs, q: &QArgs) -> Result<Artifact, CliError> {
    let g = gamma_param(gamma)?;
    let p = load_pmf(pmf)?;
    let q = load_q(q)?.unwrap_or_else(|| p.clone());
    let derivs = focal_entropy_dgamma(g, &p, &q).map_err(pair_err)?;
    let (first, second) = match derivs {
        EntropyValue::Finite(d) => (EntropyValue::Finite(d.first), EntropyValue::Finite(d.second)),
        EntropyValue::Infinite => (EntropyValue::Infinite, EntropyValue::Infinite),
    };
    let rho = match rho_and_r(g, &p, &q) {
        Ok(r) => Some(r.rho),
        Err(FocalError::AbsoluteContinuity { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    #[derive(Serialize)]
    struct Body {
        gamma: Sig17<f64>,
        p: Pmf64,
        q: Pmf64,
        shannon: Sig17<f64>,
        cross_entropy: EntropyValue<f64>,
        focal_entropy: EntropyValue<f64>,
        kl_divergence: EntropyValue<f64>,
        dgamma_first: EntropyValue<f64>,
        dgamma_second: EntropyValue<f64>,
        h_gamma_q: Sig17<f64>,
        tilt_q: Pmf64,
        rho: Option<Sig17<f64>>,
    }
    let body = Body {
        gamma: Sig17(gamma),
        shannon: Sig17(shannon_entropy(&p)),
        cross_entropy: cross_entropy(&p, &q)?,
        focal_entropy: focal_entropy(g, &p, &q)?,
        kl_divergence: kl_divergence(&p, &q)?,
        dgamma_first: first,
        dgamma_second: second,
        h_gamma_q: Sig17(h_gamma(g, &q)),
        tilt_q: tilt(g, &q),
        rho: rho.map(Sig17),
        p,
        q,
    };
    let mut t = Table::new(&["quantity", "value"]).meta("gamma", gamma);
    for (k, v) in [
        ("shannon", body.shannon.0),
        ("cross_entropy", body.cross_entropy.to_real()),
        ("focal_entropy", body.focal_entropy.to_real()),
        ("kl_divergence", body.kl_divergence.to_real()),
        ("dgamma_first", body.dgamma_first.to_real()),
        ("dgamma_second", body.dgamma_second.to_real()),
        ("h_gamma_q", body.h_gamma_q.0),
        ("rho", rho.unwrap_or(f64::NAN)),
    ] {
        t.push(vec![k.into(), v.into()]);
    }
    Ok(Artifact {
        json: json(name, seed, &body),
        csv: Some(seeded_csv(seed, t)),
        default: Format::Json,
    })
}

#[derive(Debug, Clone, Serialize)]
struct MnistInfo {
    cuts_f1: [f64; 3],
    cuts_f2: [f64; 3],
    class_counts: [usize; 2],
}

fn train_report(
    name: &str,
    seed: u64,
    args: &TrainArgs,
    data: &BinnedDataset,
    reference: PosteriorTable,
    spec: Option<&SyntheticSpec>,
    mnist: Option<MnistInfo>,
) -> Result<Artifact, CliError> {
    let config = TrainConfig {
        gamma: args.gamma,
        hidden_width: args.hidden,
        learning_rate: args.learning_rate,
        batch_size: args.batch_size,
        epochs: args.epochs,
        seed,
        ..TrainConfig::default()
    };
    if config.hidden_width == 0 {
        return Err(usage("--hidden", "must be positive"));
    }
    if config.batch_size == 0 {
        return Err(usage("--batch-size", "must be positive"));
    }
    if !(config.learning_rate > 0.0) {
        return Err(usage("--learning-rate", "must be positive"));
    }
    let run = train_classifier(data, &config)?;
    let theory = theory_table(gamma_param(args.gamma)?, &reference)?;
    let counts = data.bin_counts();
    let comparison = compare_posteriors(&run.posterior, &theory, &counts, args.min_count)?;
    let empirical = data.empirical_posterior();

    let chosen = match args.table {
        PosteriorKind::Learned => &run.posterior,
        PosteriorKind::Theory => &theory,
        PosteriorKind::Empirical => &empirical,
        PosteriorKind::Reference => &reference,
    };
    let mut csv = format!(
        "# seed={}\n# gamma={}\n# table={}\n# max_abs_gap={}\n# compared_bins={}\n",
        seed,
        focal_core::io::fmt_sig17(args.gamma),
        posterior_kind_name(args.table),
        focal_core::io::fmt_sig17(comparison.max_abs_gap),
        comparison.compared_bins
    );
    csv.push_str(&chosen.to_csv(&counts));

    #[derive(Serialize)]
    struct Body<'a> {
        #[serde(skip_serializing_if = "Option::is_none")]
        spec: Option<&'a SyntheticSpec>,
        #[serde(skip_serializing_if = "Option::is_none")]
        mnist: Option<MnistInfo>,
        run: &'a focal_experiments::TrainRun,
        bin_counts: &'a [usize],
        empirical: &'a PosteriorTable,
        reference: &'a PosteriorTable,
        theory: &'a PosteriorTable,
        comparison: &'a focal_experiments::Comparison,
    }
    let json = json(
        name,
        seed,
        &Body {
            spec,
            mnist,
            run: &run,
            bin_counts: &counts,
            empirical: &empirical,
            reference: &reference,
            theory: &theory,
            comparison: &comparison,
        },
    );
    Ok(Artifact {
        json,
        csv: Some(csv),
        default: Format::Json,
    })
}

fn posterior_kind_name(k: PosteriorKind) -> &'static str {
    match k {
        PosteriorKind::Learned => "learned",
        PosteriorKind::Theory => "theory",
        PosteriorKind::Empirical => "empirical",
        PosteriorKind::Reference => "reference",
    }
}
