//! `fpr`: false positive risk from the command line.
//!
//! Exit codes: 0 success, 1 domain or runtime error, 2 usage error.

mod render;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fpr_core::calc::CalcMode;
use fpr_core::curves::{n_for_power, Figure};
use fpr_core::fpr::{Method, CONVENTIONAL_ALPHA};
use fpr_core::simulate::{DEFAULT_BAND_CENTER, DEFAULT_BAND_HALF_WIDTH, DEFAULT_THRESHOLDS};
use fpr_core::ttest::{read_groups_csv, two_sample_t};
use fpr_core::FprError;
use fpr_service::api::{self, CalcRequest, CurveParams, SimRequest};
use fpr_service::config::{ConfigError, ServiceConfig};

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Domain(#[from] FprError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Config(#[from] ConfigError),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }

    fn io(path: &Path) -> impl FnOnce(std::io::Error) -> Self + '_ {
        move |source| CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "fpr", version, about = "False positive risk from p-values")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Complete (p, prior, FPR) from two of them.
    Calc(CalcArgs),
    /// Two-sample t test from a `group,value` CSV, with its FPR.
    Ttest(TtestArgs),
    /// Write curve data as CSV.
    Curve(CurveArgs),
    /// Monte Carlo t tests under H0 and H1.
    Simulate(SimulateArgs),
    /// Run the HTTP service.
    Serve(ServeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
enum Format {
    #[default]
    Human,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    /// FPR from p and prior.
    Fpr,
    /// p from FPR and prior.
    P,
    /// Prior from p and FPR.
    Prior,
}

impl From<ModeArg> for CalcMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Fpr => CalcMode::FprFromPPrior,
            ModeArg::P => CalcMode::PFromFprPrior,
            ModeArg::Prior => CalcMode::PriorFromPFpr,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    PEquals,
    PLessThan,
    SellkeBerger,
    Goodman,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::PEquals => Method::PEquals,
            MethodArg::PLessThan => Method::PLessThan,
            MethodArg::SellkeBerger => Method::SellkeBerger,
            MethodArg::Goodman => Method::Goodman,
        }
    }
}

#[derive(Debug, Args)]
struct CalcArgs {
    #[arg(long, value_enum)]
    mode: ModeArg,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    prior: Option<f64>,
    #[arg(long)]
    fpr: Option<f64>,
    /// Observations per group.
    #[arg(long, required_unless_present = "design_from_power", conflicts_with = "design_from_power")]
    n: Option<f64>,
    /// Effect size in standard deviations.
    #[arg(long)]
    es: f64,
    /// Choose n so that the design has this power at alpha = 0.05.
    #[arg(long, value_name = "POWER")]
    design_from_power: Option<f64>,
    #[arg(long, value_enum, default_value_t = MethodArg::PEquals)]
    method: MethodArg,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
}

#[derive(Debug, Args)]
struct TtestArgs {
    /// CSV with header `group,value` and groups A and B.
    csv: PathBuf,
    #[arg(long)]
    prior: Option<f64>,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
}

#[derive(Debug, Args)]
struct CurveArgs {
    #[arg(value_enum)]
    figure: FigureArg,
    /// Observed p (fig1, fig2).
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    prior: Option<f64>,
    /// Constant power (fig1).
    #[arg(long)]
    power: Option<f64>,
    /// Effect size (fig2, fig3).
    #[arg(long)]
    es: Option<f64>,
    /// Per-group size (fig3).
    #[arg(long)]
    n: Option<f64>,
    #[arg(long)]
    es_min: Option<f64>,
    #[arg(long)]
    es_max: Option<f64>,
    #[arg(long)]
    es_step: Option<f64>,
    #[arg(long)]
    n_min: Option<f64>,
    #[arg(long)]
    n_max: Option<f64>,
    #[arg(long)]
    p_min: Option<f64>,
    #[arg(long)]
    p_max: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
    /// Directory for `<figure>-<method>.csv` files.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FigureArg {
    Fig1,
    Fig2,
    Fig3,
}

impl From<FigureArg> for Figure {
    fn from(f: FigureArg) -> Self {
        match f {
            FigureArg::Fig1 => Figure::Fig1,
            FigureArg::Fig2 => Figure::Fig2,
            FigureArg::Fig3 => Figure::Fig3,
        }
    }
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    es: f64,
    #[arg(long, default_value_t = 100_000)]
    sims: u64,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_BAND_CENTER)]
    band_center: f64,
    #[arg(long, default_value_t = DEFAULT_BAND_HALF_WIDTH)]
    band_half_width: f64,
    /// p thresholds to tally; repeatable.
    #[arg(long = "threshold")]
    thresholds: Vec<f64>,
    /// Also write the JSON result here.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
}

#[derive(Debug, Args)]
struct ServeArgs {
    /// TOML config; `FPR_BIND` and `FPR_PORT` override it.
    #[arg(long)]
    config: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap already uses 0 for --help/--version and 2 for usage errors.
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match &e {
                CliError::Domain(d) => eprintln!("error [{}]: {d}", d.code()),
                other => eprintln!("error: {other}"),
            }
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Calc(args) => calc(args),
        Command::Ttest(args) => ttest(args),
        Command::Curve(args) => curve(args),
        Command::Simulate(args) => simulate(args),
        Command::Serve(args) => serve(args),
    }
}

fn print_json(value: &serde_json::Value) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("JSON values serialize")
    );
}

fn calc(args: CalcArgs) -> Result<()> {
    let mode = CalcMode::from(args.mode);
    let (need_a, need_b, computed) = match mode {
        CalcMode::FprFromPPrior => (("--p", args.p), ("--prior", args.prior), ("--fpr", args.fpr)),
        CalcMode::PFromFprPrior => (("--fpr", args.fpr), ("--prior", args.prior), ("--p", args.p)),
        CalcMode::PriorFromPFpr => (("--p", args.p), ("--fpr", args.fpr), ("--prior", args.prior)),
    };
    for (flag, value) in [need_a, need_b] {
        if value.is_none() {
            return Err(CliError::Usage(format!("--mode {mode} requires {flag}")));
        }
    }
    if computed.1.is_some() {
        return Err(CliError::Usage(format!(
            "--mode {mode} computes {}; do not pass it",
            computed.0
        )));
    }
    let n = match (args.n, args.design_from_power) {
        (Some(n), _) => n,
        (None, Some(power)) => n_for_power(power, args.es, CONVENTIONAL_ALPHA)?,
        (None, None) => unreachable!("clap requires --n or --design-from-power"),
    };
    let req = CalcRequest {
        mode,
        p_value: args.p,
        prior: args.prior,
        fpr: args.fpr,
        n_per_group: n,
        effect_size_normalized: args.es,
        method: args.method.into(),
    };
    let resp = api::calc_response(&req)?;
    match args.format {
        Format::Human => print!("{}", render::calc_human(&resp)),
        Format::Json => print_json(&api::to_rounded_json(&resp)),
        Format::Csv => print!("{}", render::calc_csv(&resp)),
    }
    Ok(())
}

fn ttest(args: TtestArgs) -> Result<()> {
    let file = fs::File::open(&args.csv).map_err(CliError::io(&args.csv))?;
    let (a, b) = read_groups_csv(file)?;
    let summary = two_sample_t(&a, &b)?;
    let resp = api::ttest_from_summary(summary, args.prior)?;
    match args.format {
        Format::Human => print!("{}", render::ttest_human(&resp)),
        Format::Json => print_json(&api::to_rounded_json(&resp)),
        Format::Csv => print!("{}", render::ttest_csv(&resp)),
    }
    Ok(())
}

fn curve(args: CurveArgs) -> Result<()> {
    let figure = Figure::from(args.figure);
    let d = CurveParams::default();
    let params = CurveParams {
        p: args.p.unwrap_or(d.p),
        prior: args.prior.unwrap_or(d.prior),
        power: args.power.unwrap_or(d.power),
        es: args.es.unwrap_or(d.es),
        n: args.n.unwrap_or(d.n),
        es_min: args.es_min.unwrap_or(d.es_min),
        es_max: args.es_max.unwrap_or(d.es_max),
        es_step: args.es_step.unwrap_or(d.es_step),
        n_min: args.n_min.unwrap_or(d.n_min),
        n_max: args.n_max.unwrap_or(d.n_max),
        p_min: args.p_min.unwrap_or(d.p_min),
        p_max: args.p_max.unwrap_or(d.p_max),
        points: args.points.unwrap_or(d.points),
    };
    if figure == Figure::Fig3 && params.p_min >= (-1.0f64).exp() {
        return Err(CliError::Usage(format!(
            "--p-min {} leaves no p below 1/e (0.3679), where the Sellke-Berger bound holds",
            params.p_min
        )));
    }
    let resp = api::curves_response(figure, &params)?;

    fs::create_dir_all(&args.out).map_err(CliError::io(&args.out))?;
    let mut written = Vec::new();
    for series in &resp.series {
        let path = args.out.join(series.file_name());
        fs::write(&path, series.to_csv()).map_err(CliError::io(&path))?;
        written.push(path);
    }
    match args.format {
        Format::Json => print_json(&api::to_rounded_json(&resp)),
        Format::Human | Format::Csv => {
            for path in &written {
                println!("wrote {}", path.display());
            }
            if let Some(m) = resp.minimum {
                println!("minimum FPR {} at n = {}", render::sig(m.fpr, 3), m.n);
            }
        }
    }
    Ok(())
}

fn simulate(args: SimulateArgs) -> Result<()> {
    let req = SimRequest {
        n_per_group: args.n,
        effect_size: args.es,
        n_sims: args.sims,
        seed: args.seed,
        band_center: args.band_center,
        band_half_width: args.band_half_width,
        thresholds: if args.thresholds.is_empty() {
            DEFAULT_THRESHOLDS.to_vec()
        } else {
            args.thresholds
        },
    };
    let resp = api::sim_response(&req)?;
    let json = api::to_rounded_json(&resp);
    if let Some(path) = &args.out {
        let text = serde_json::to_string_pretty(&json).expect("JSON values serialize");
        fs::write(path, text).map_err(CliError::io(path))?;
    }
    match args.format {
        Format::Human => print!("{}", render::sim_human(&resp)),
        Format::Json => print_json(&json),
        Format::Csv => print!("{}", render::sim_csv(&resp)),
    }
    Ok(())
}

fn serve(args: ServeArgs) -> Result<()> {
    let cfg = match &args.config {
        Some(path) => ServiceConfig::load(path)?,
        None => ServiceConfig::default(),
    };
    let cfg = cfg.apply_env(|k| std::env::var(k).ok())?;
    let runtime = tokio::runtime::Runtime::new().map_err(CliError::io(Path::new("tokio runtime")))?;
    let addr = cfg.addr();
    runtime
        .block_on(fpr_service::serve(cfg))
        .map_err(|source| CliError::Io {
            path: PathBuf::from(addr.to_string()),
            source,
        })
}
