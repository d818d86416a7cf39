//! Command-line front end: `point`, `sweep`, `threshold`, `figure` and `validate`.
//!
//! Exit codes: 0 success, 1 usage error, 2 numerical or validation failure,
//! 3 I/O failure.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::parallel::{self, Execution};
use crate::scan::{
    evaluate_point, figure_dataset, run_sweep, threshold_temperature, FigureId, PointRecord,
    SweepAxis, SweepResult, SweepSpec, THRESHOLD_TOL,
};
use crate::thermal::Temperature;
use crate::validation::{run_validation, GridSize, ValidationReport, DEFAULT_SEED};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERIC: i32 = 2;
pub const EXIT_IO: i32 = 3;

/// Header of every sweep CSV.
pub const SWEEP_CSV_HEADER: &str = "axis,axis_value,concurrence,c_l1_total,c_l1_local,c_cc,path_flag";

#[derive(Debug, Parser)]
#[command(name = "dqd", version, about = "Thermal entanglement and correlated coherence of two coupled double quantum dots")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate every quantity at a single parameter point.
    Point(PointArgs),
    /// Sweep one parameter and tabulate the measures.
    Sweep(SweepArgs),
    /// Locate the temperature above which the concurrence vanishes.
    Threshold(ThresholdArgs),
    /// Write the datasets of one figure, one file per curve.
    Figure(FigureArgs),
    /// Compare closed-form results with brute-force diagonalization.
    Validate(ValidateArgs),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output file, or `-` for stdout.
    #[arg(short, long, default_value = "-")]
    pub output: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct ParamArgs {
    /// Tunneling of the first double dot.
    #[arg(long = "d1", allow_hyphen_values = true)]
    pub d1: f64,
    /// Tunneling of the second double dot.
    #[arg(long = "d2", allow_hyphen_values = true)]
    pub d2: f64,
    /// Coulomb coupling.
    #[arg(long = "v", allow_hyphen_values = true)]
    pub v: f64,
}

#[derive(Debug, Args)]
pub struct PointArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Temperature; `0` and `inf` select the two limits.
    #[arg(long = "t")]
    pub t: Temperature,
    /// Local basis angle in radians.
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_4, allow_hyphen_values = true)]
    pub theta: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub axis: SweepAxis,
    #[arg(long = "from", allow_hyphen_values = true)]
    pub from: f64,
    #[arg(long = "to", allow_hyphen_values = true)]
    pub to: f64,
    #[arg(long)]
    pub points: usize,
    /// Logarithmic grid spacing.
    #[arg(long)]
    pub log: bool,
    /// Not needed when sweeping delta1.
    #[arg(long = "d1", allow_hyphen_values = true)]
    pub d1: Option<f64>,
    /// Not needed when sweeping delta2.
    #[arg(long = "d2", allow_hyphen_values = true)]
    pub d2: Option<f64>,
    /// Not needed when sweeping coulomb.
    #[arg(long = "v", allow_hyphen_values = true)]
    pub v: Option<f64>,
    /// Not needed when sweeping temperature.
    #[arg(long = "t")]
    pub t: Option<Temperature>,
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_4, allow_hyphen_values = true)]
    pub theta: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long = "t-lo", default_value_t = 0.01)]
    pub t_lo: f64,
    #[arg(long = "t-hi", default_value_t = 1000.0)]
    pub t_hi: f64,
    #[arg(long, default_value_t = THRESHOLD_TOL)]
    pub tol: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct FigureArgs {
    #[arg(value_enum)]
    pub figure: FigureId,
    /// Directory receiving `<figure>_<curve>.<ext>` files.
    #[arg(long = "out-dir", default_value = ".")]
    pub out_dir: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = GridSize::Default)]
    pub grid: GridSize,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    if let Err(e) = parallel::configure_from_env() {
        eprintln!("error: {e}");
        return EXIT_USAGE;
    }
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidParameter { .. } | Error::Unsupported { .. } => EXIT_USAGE,
        Error::Io { .. } => EXIT_IO,
        _ => EXIT_NUMERIC,
    }
}

fn execute(command: Command) -> Result<i32> {
    match command {
        Command::Point(a) => cmd_point(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Threshold(a) => cmd_threshold(a),
        Command::Figure(a) => cmd_figure(a),
        Command::Validate(a) => cmd_validate(a),
    }
}

/// Output sink opened up front so an unwritable path fails before any work.
struct Sink {
    path: PathBuf,
    out: Box<dyn Write>,
}

impl Sink {
    fn open(path: &Path) -> Result<Self> {
        let out: Box<dyn Write> = if path.as_os_str() == "-" {
            Box::new(BufWriter::new(io::stdout()))
        } else {
            Box::new(BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?))
        };
        Ok(Sink {
            path: path.to_path_buf(),
            out,
        })
    }

    fn write(mut self, text: &str) -> Result<()> {
        self.out
            .write_all(text.as_bytes())
            .and_then(|_| self.out.flush())
            .map_err(|e| Error::io(&self.path, e))
    }
}

/// Twelve significant digits in Rust's scientific notation, e.g. `9.88012033751e-1`.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else if x == 0.0 {
        // no negative zero
        format!("{:.11e}", 0.0)
    } else {
        format!("{x:.11e}")
    }
}

/// JSON number carrying exactly the digits of [`format_number`].
fn json_number(x: f64) -> Value {
    let rounded: f64 = format_number(x).parse().unwrap_or(x);
    serde_json::Number::from_f64(rounded).map_or_else(|| Value::String(format_number(x)), Value::Number)
}

fn csv_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values are serializable");
    s.push('\n');
    s
}

const POINT_FIELDS: [&str; 22] = [
    "delta1", "delta2", "v", "t", "theta", "path_flag", "e1", "e2", "e3", "e4", "rho11", "rho12",
    "rho13", "rho14", "rho22", "rho23", "z_shifted", "z_shift", "concurrence", "c_l1_total",
    "c_l1_local", "c_cc",
];

fn point_values(r: &PointRecord) -> Vec<(&'static str, Value, String)> {
    let m = &r.measures;
    let numbers = [
        [r.params.delta1, r.params.delta2, r.params.v, r.temperature.value(), m.theta].as_slice(),
        &r.energies,
        &r.elements.as_array(),
        &[r.z.shifted, r.z.shift],
        &[m.concurrence, m.c_l1_total, m.c_l1_local, m.c_cc],
    ]
    .concat();
    let mut numbers = numbers.into_iter();
    POINT_FIELDS
        .iter()
        .map(|&name| {
            if name == "path_flag" {
                let flag = r.path.as_str();
                (name, Value::String(flag.into()), flag.to_string())
            } else {
                let x = numbers.next().expect("one number per numeric field");
                (name, json_number(x), format_number(x))
            }
        })
        .collect()
}

pub fn render_point(r: &PointRecord, format: Format) -> String {
    let values = point_values(r);
    match format {
        Format::Csv => csv_table(&POINT_FIELDS, &[values.into_iter().map(|(_, _, s)| s).collect()]),
        Format::Json => {
            let obj: Map<String, Value> = values.into_iter().map(|(k, v, _)| (k.to_string(), v)).collect();
            json_text(&Value::Object(obj))
        }
    }
}

fn sweep_row_cells(result: &SweepResult) -> Vec<Vec<String>> {
    let axis = result.spec.axis.as_str();
    result
        .rows
        .iter()
        .map(|r| {
            vec![
                axis.to_string(),
                format_number(r.axis_value),
                format_number(r.concurrence),
                format_number(r.c_l1_total),
                format_number(r.c_l1_local),
                format_number(r.c_cc),
                r.path.as_str().to_string(),
            ]
        })
        .collect()
}

pub fn render_sweep(result: &SweepResult, format: Format) -> String {
    match format {
        Format::Csv => {
            let header: Vec<&str> = SWEEP_CSV_HEADER.split(',').collect();
            csv_table(&header, &sweep_row_cells(result))
        }
        Format::Json => {
            let s = &result.spec;
            let rows: Vec<Value> = result
                .rows
                .iter()
                .map(|r| {
                    json!({
                        "axis": s.axis.as_str(),
                        "axis_value": json_number(r.axis_value),
                        "concurrence": json_number(r.concurrence),
                        "c_l1_total": json_number(r.c_l1_total),
                        "c_l1_local": json_number(r.c_l1_local),
                        "c_cc": json_number(r.c_cc),
                        "path_flag": r.path.as_str(),
                    })
                })
                .collect();
            json_text(&json!({
                "spec": {
                    "axis": s.axis.as_str(),
                    "start": json_number(s.start),
                    "stop": json_number(s.stop),
                    "points": s.points,
                    "delta1": json_number(s.params.delta1),
                    "delta2": json_number(s.params.delta2),
                    "v": json_number(s.params.v),
                    "t": json_number(s.temperature.value()),
                    "theta": json_number(s.theta),
                    "log_scale": s.log_scale,
                },
                "provenance": {
                    "engine_version": result.provenance.engine_version,
                    "numeric_points": result.provenance.numeric_points,
                },
                "rows": rows,
            }))
        }
    }
}

pub fn render_validation(report: &ValidationReport, format: Format) -> String {
    let opt = |g: Option<f64>| g.map_or_else(String::new, format_number);
    match format {
        Format::Csv => {
            let header = [
                "category", "tolerance", "max_deviation", "nonfinite_points", "gating", "passed",
                "worst_delta1", "worst_delta2", "worst_v", "worst_t",
            ];
            let mut rows: Vec<Vec<String>> = report
                .categories
                .iter()
                .map(|c| {
                    vec![
                        c.name.clone(),
                        format_number(c.tolerance),
                        format_number(c.max_deviation),
                        c.nonfinite_points.to_string(),
                        c.gating.to_string(),
                        c.passed.to_string(),
                        opt(c.worst.map(|w| w.params.delta1)),
                        opt(c.worst.map(|w| w.params.delta2)),
                        opt(c.worst.map(|w| w.params.v)),
                        opt(c.worst.map(|w| w.temperature.value())),
                    ]
                })
                .collect();
            let mut overall = vec![String::new(); header.len()];
            overall[0] = "overall".into();
            overall[3] = report.points.to_string();
            overall[4] = "true".into();
            overall[5] = report.passed().to_string();
            rows.push(overall);
            csv_table(&header, &rows)
        }
        Format::Json => {
            let cats: Vec<Value> = report
                .categories
                .iter()
                .map(|c| {
                    json!({
                        "category": c.name,
                        "tolerance": json_number(c.tolerance),
                        "max_deviation": json_number(c.max_deviation),
                        "nonfinite_points": c.nonfinite_points,
                        "gating": c.gating,
                        "passed": c.passed,
                        "worst": c.worst.map(|w| json!({
                            "delta1": json_number(w.params.delta1),
                            "delta2": json_number(w.params.delta2),
                            "v": json_number(w.params.v),
                            "t": json_number(w.temperature.value()),
                        })),
                    })
                })
                .collect();
            json_text(&json!({
                "seed": report.seed,
                "points": report.points,
                "passed": report.passed(),
                "categories": cats,
            }))
        }
    }
}

fn params(d1: f64, d2: f64, v: f64) -> Result<ModelParams> {
    ModelParams::new(d1, d2, v)
}

fn cmd_point(a: PointArgs) -> Result<i32> {
    let sink = Sink::open(&a.output.output)?;
    let p = params(a.params.d1, a.params.d2, a.params.v)?;
    let record = evaluate_point(&p, a.t, a.theta)?;
    sink.write(&render_point(&record, a.output.format))?;
    Ok(EXIT_OK)
}

fn required<T>(value: Option<T>, flag: &'static str, axis: SweepAxis) -> Result<T> {
    value.ok_or_else(|| Error::invalid(flag, format!("required unless sweeping {axis}")))
}

fn cmd_sweep(a: SweepArgs) -> Result<i32> {
    let sink = Sink::open(&a.output.output)?;
    let axis = a.axis;
    let pick = |value: Option<f64>, flag, swept| {
        if axis == swept {
            Ok(value.unwrap_or(0.0))
        } else {
            required(value, flag, axis)
        }
    };
    let p = params(
        pick(a.d1, "d1", SweepAxis::Delta1)?,
        pick(a.d2, "d2", SweepAxis::Delta2)?,
        pick(a.v, "v", SweepAxis::Coulomb)?,
    )?;
    let temperature = match (axis, a.t) {
        (SweepAxis::Temperature, t) => t.unwrap_or(Temperature::ZERO),
        (_, t) => required(t, "t", axis)?,
    };
    let spec = SweepSpec {
        axis,
        start: a.from,
        stop: a.to,
        points: a.points,
        params: p,
        temperature,
        theta: a.theta,
        log_scale: a.log,
    };
    let result = run_sweep(&spec)?;
    sink.write(&render_sweep(&result, a.output.format))?;
    Ok(EXIT_OK)
}

fn cmd_threshold(a: ThresholdArgs) -> Result<i32> {
    let sink = Sink::open(&a.output.output)?;
    let p = params(a.params.d1, a.params.d2, a.params.v)?;
    let t_star = threshold_temperature(&p, a.t_lo, a.t_hi, a.tol)?;
    let text = match a.output.format {
        Format::Csv => csv_table(
            &["delta1", "delta2", "v", "threshold_temperature"],
            &[vec![
                format_number(p.delta1),
                format_number(p.delta2),
                format_number(p.v),
                format_number(t_star),
            ]],
        ),
        Format::Json => json_text(&json!({
            "delta1": json_number(p.delta1),
            "delta2": json_number(p.delta2),
            "v": json_number(p.v),
            "threshold_temperature": json_number(t_star),
        })),
    };
    sink.write(&text)?;
    Ok(EXIT_OK)
}

fn cmd_figure(a: FigureArgs) -> Result<i32> {
    std::fs::create_dir_all(&a.out_dir).map_err(|e| Error::io(&a.out_dir, e))?;
    let curves = figure_dataset(a.figure)?;
    let mut written = String::new();
    for c in &curves {
        let path = a
            .out_dir
            .join(format!("{}_{}.{}", c.figure, c.label, a.format.extension()));
        Sink::open(&path)?.write(&render_sweep(&c.result, a.format))?;
        written.push_str(&format!("{}\n", path.display()));
    }
    Sink::open(Path::new("-"))?.write(&written)?;
    Ok(EXIT_OK)
}

fn cmd_validate(a: ValidateArgs) -> Result<i32> {
    let sink = Sink::open(&a.output.output)?;
    let report = run_validation(a.seed, a.grid, Execution::default())?;
    sink.write(&render_validation(&report, a.output.format))?;
    if report.passed() {
        return Ok(EXIT_OK);
    }
    for c in report.categories.iter().filter(|c| c.gating && !c.passed) {
        eprintln!(
            "validation failed: {} deviates by {:e} (tolerance {:e}) at {:?}",
            c.name, c.max_deviation, c.tolerance, c.worst
        );
    }
    Ok(EXIT_NUMERIC)
}
