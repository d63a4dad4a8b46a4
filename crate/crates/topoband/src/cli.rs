use crate::canonical::{to_string, write_atomic};
use crate::family::{load_family, Family};
use crate::model_file::{load_model, LoadError};
use crate::par::Rayon;
use crate::report::*;
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use topoband_core::bulk::{chern_fh, chern_great_circle, chern_north_preimage, km_dirac, winding_chiral, Method};
use topoband_core::clifford::{dirac_decompose, DiracModel};
use topoband_core::correspondence::{sweep, verify, Options};
use topoband_core::edge_spectrum::{
    check_strip_length, default_strip_length, incipience_points_singular, strip_edge_branches,
};
use topoband_core::models::{gap_report, BulkModel, SymClass};
use topoband_core::ErrorKind;

pub const EXIT_OK: i32 = 0;
pub const EXIT_MODEL: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_UNEQUAL: i32 = 4;
/// Output could not be written.
pub const EXIT_IO: i32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Winding,
    LatticeFlux,
    NorthPreimage,
    GreatCircle,
    DiracSign,
    Incipience,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Winding => Method::Winding,
            MethodArg::LatticeFlux => Method::LatticeFlux,
            MethodArg::NorthPreimage => Method::NorthPreimage,
            MethodArg::GreatCircle => Method::GreatCircle,
            MethodArg::DiracSign => Method::DiracSign,
            MethodArg::Incipience => Method::Incipience,
        }
    }
}

#[derive(Parser)]
#[command(name = "topoband", version, about = "Bulk and edge topological invariants of tight-binding models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Points on the periodic k2 grid.
    #[arg(long, default_value_t = Options::default().k2_grid)]
    grid: usize,
    /// Lattice size for the Berry-flux Chern number.
    #[arg(long, default_value_t = Options::default().flux_grid)]
    flux_grid: usize,
    /// Seed grid for preimage and incipience searches.
    #[arg(long, default_value_t = Options::default().preimage_grid)]
    preimage_grid: usize,
    /// Grid per dimension for the gap check.
    #[arg(long, default_value_t = Options::default().gap_grid)]
    gap_grid: usize,
    /// Strip length in unit cells; chosen from the decay length if absent.
    #[arg(long)]
    n: Option<usize>,
    /// Constant Fermi level for edge crossings; mid-gap if absent.
    #[arg(long, allow_negative_numbers = true)]
    fermi: Option<f64>,
    /// Write here (atomically) instead of standard output.
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Subcommand)]
enum Command {
    /// Bulk invariant by one method.
    Invariant {
        model: PathBuf,
        #[arg(long, value_enum)]
        method: Option<MethodArg>,
        #[command(flatten)]
        common: Common,
    },
    /// Strip spectrum in the bulk gap, as `k2,E,side,weight` rows.
    Edge {
        model: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Bulk and edge invariants side by side.
    Verify {
        model: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// `verify` over a parameter family.
    Sweep {
        family: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CommandKind {
    Invariant,
    Edge,
    Verify,
    Sweep,
}

/// Validated arguments. The defaults that end up here are echoed in every
/// output's metadata.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: CommandKind,
    pub input: PathBuf,
    pub method: Option<Method>,
    pub options: Options,
    pub output: Option<PathBuf>,
    pub format: Format,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Load(LoadError),
    Core(topoband_core::Error),
    Io(std::io::Error),
}

impl From<LoadError> for Failure {
    fn from(e: LoadError) -> Self {
        match e {
            LoadError::Model(m) => Failure::Core(m),
            e => Failure::Load(e),
        }
    }
}

impl From<topoband_core::Error> for Failure {
    fn from(e: topoband_core::Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) | Failure::Load(_) => EXIT_MODEL,
            Failure::Core(e) if e.kind() == ErrorKind::Model => EXIT_MODEL,
            Failure::Core(_) => EXIT_NUMERICAL,
            Failure::Io(_) => EXIT_IO,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(m) => m.clone(),
            Failure::Load(e) => e.to_string(),
            Failure::Core(e) => {
                let msg = e.to_string();
                if msg.starts_with(e.name()) {
                    msg
                } else {
                    format!("{}: {msg}", e.name())
                }
            }
            Failure::Io(e) => format!("cannot write output: {e}"),
        }
    }
}

impl RunConfig {
    fn from_cli(cli: Cli) -> Result<Self, Failure> {
        let (command, input, method, common) = match cli.command {
            Command::Invariant { model, method, common } => {
                (CommandKind::Invariant, model, method.map(Method::from), common)
            }
            Command::Edge { model, common } => (CommandKind::Edge, model, None, common),
            Command::Verify { model, common } => (CommandKind::Verify, model, None, common),
            Command::Sweep { family, common } => (CommandKind::Sweep, family, None, common),
        };
        let default_format = if command == CommandKind::Edge { Format::Csv } else { Format::Json };
        let format = common.format.unwrap_or(default_format);
        if format == Format::Csv && matches!(command, CommandKind::Invariant | CommandKind::Verify) {
            return Err(Failure::Usage("csv output is only available for edge and sweep".into()));
        }
        if common.grid < 8 {
            return Err(Failure::Usage("--grid must be at least 8".into()));
        }
        if common.flux_grid < 24 {
            return Err(Failure::Usage("--flux-grid must be at least 24".into()));
        }
        if common.preimage_grid < 8 || common.gap_grid < 8 {
            return Err(Failure::Usage("--preimage-grid and --gap-grid must be at least 8".into()));
        }
        if common.n.is_some_and(|n| n < 2) {
            return Err(Failure::Usage("--n must be at least 2".into()));
        }
        if common.fermi.is_some_and(|e| !e.is_finite()) {
            return Err(Failure::Usage("--fermi must be finite".into()));
        }
        let options = Options {
            k2_grid: common.grid,
            flux_grid: common.flux_grid,
            preimage_grid: common.preimage_grid,
            gap_grid: common.gap_grid,
            strip_length: common.n,
            fermi: common.fermi,
        };
        Ok(RunConfig { command, input, method, options, output: common.output, format })
    }
}

/// `run_with` on the process's standard streams.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(argv, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}

pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() { EXIT_MODEL } else { EXIT_OK };
        }
    };
    let result = RunConfig::from_cli(cli).and_then(|cfg| execute(&cfg, out));
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message());
            f.code()
        }
    }
}

fn emit(cfg: &RunConfig, out: &mut dyn Write, text: &str) -> Result<(), Failure> {
    match &cfg.output {
        Some(p) => write_atomic(p, text.as_bytes()).map_err(Failure::Io),
        None => out.write_all(text.as_bytes()).map_err(Failure::Io),
    }
}

fn dirac(model: &BulkModel) -> Result<DiracModel, Failure> {
    let d = dirac_decompose(model)?;
    d.require_traceless()?;
    Ok(d)
}

fn default_method(class: SymClass) -> Method {
    match class {
        SymClass::AIII => Method::Winding,
        SymClass::A => Method::LatticeFlux,
        SymClass::AII => Method::DiracSign,
    }
}

fn execute(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32, Failure> {
    let exec = Rayon::from_env();
    let opts = &cfg.options;
    match cfg.command {
        CommandKind::Invariant => {
            let model = load_model(&cfg.input)?;
            gap_report(&model, opts.gap_grid)?;
            let method = cfg.method.unwrap_or_else(|| default_method(model.class()));
            let result = match method {
                Method::Winding => (&winding_chiral(&model)?).into(),
                Method::LatticeFlux => (&chern_fh(&model, opts.flux_grid)?).into(),
                Method::NorthPreimage => {
                    (&chern_north_preimage(&dirac(&model)?, opts.preimage_grid, PREIMAGE_REFINE_TOL)?).into()
                }
                Method::GreatCircle => (&chern_great_circle(&dirac(&model)?, opts.k2_grid)?).into(),
                Method::DiracSign => (&km_dirac(&dirac(&model)?)?).into(),
                Method::Incipience => {
                    InvariantOut::incipience(&incipience_points_singular(&model, opts.preimage_grid)?, opts.preimage_grid)
                }
            };
            let file = InvariantFile { meta: Metadata::new(opts, None), model: (&model).into(), result };
            emit(cfg, out, &to_string(&file))?;
            Ok(EXIT_OK)
        }
        CommandKind::Edge => {
            let model = load_model(&cfg.input)?;
            gap_report(&model, opts.gap_grid)?;
            let (n_auto, xi) = default_strip_length(&model)?;
            let n = opts.strip_length.unwrap_or(n_auto);
            check_strip_length(n, xi)?;
            let mut spec = strip_edge_branches(&model, n, opts.k2_grid, &exec)?;
            spec.xi = xi;
            let meta = Metadata::new(opts, Some(n));
            let text = match cfg.format {
                Format::Json => to_string(&EdgeFile::new(meta, (&model).into(), &spec)),
                Format::Csv => {
                    let mut w = csv::Writer::from_writer(Vec::new());
                    w.write_record(["k2", "E", "side", "weight"]).map_err(csv_io)?;
                    for r in edge_rows(&spec) {
                        w.write_record([fmt(r.k2), fmt(r.energy), r.side, fmt(r.weight)]).map_err(csv_io)?;
                    }
                    String::from_utf8(w.into_inner().map_err(|e| Failure::Io(e.into_error()))?)
                        .expect("csv of ASCII fields")
                }
            };
            emit(cfg, out, &text)?;
            Ok(EXIT_OK)
        }
        CommandKind::Verify => {
            let model = load_model(&cfg.input)?;
            let report = verify(&model, opts, &exec)?;
            let file = VerifyFile {
                meta: Metadata::new(opts, report.strip_length),
                model: (&model).into(),
                report: (&report).into(),
            };
            emit(cfg, out, &to_string(&file))?;
            Ok(if report.equal { EXIT_OK } else { EXIT_UNEQUAL })
        }
        CommandKind::Sweep => {
            let family = load_family(&cfg.input)?;
            let table = sweep(|p| Ok(family.model(p)), &family.values, opts, &exec);
            let rows = sweep_rows(&table);
            let text = match cfg.format {
                Format::Json => to_string(&SweepFile {
                    meta: Metadata::new(opts, opts.strip_length),
                    family: family.name().into(),
                    equal: table.equal,
                    unequal: table.unequal,
                    gapless: table.gapless,
                    errors: table.errors,
                    rows,
                }),
                Format::Csv => sweep_csv(&family, &rows)?,
            };
            emit(cfg, out, &text)?;
            Ok(if table.unequal > 0 {
                EXIT_UNEQUAL
            } else if table.errors > 0 {
                EXIT_NUMERICAL
            } else {
                EXIT_OK
            })
        }
    }
}

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_io(e: csv::Error) -> Failure {
    Failure::Io(std::io::Error::other(e))
}

fn sweep_csv(family: &Family, rows: &[SweepRowOut]) -> Result<String, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["family", "parameter", "status", "bulk", "edge", "message"]).map_err(csv_io)?;
    for r in rows {
        w.write_record([
            family.name().to_string(),
            fmt(r.parameter),
            r.status.to_string(),
            join_values(&r.bulk),
            join_values(&r.edge),
            r.message.clone(),
        ])
        .map_err(csv_io)?;
    }
    let bytes = w.into_inner().map_err(|e| Failure::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("UTF-8 fields"))
}
