//! Command-line front end.
//!
//! Point clouds are CSV files with one point per row and one column per
//! coordinate; `#` starts a comment. `X` comes from `--x`, `Y` from `--y`, and
//! vertex `i` of every output is the `i`-th row of `X` followed by the rows of
//! `Y`. Exit codes: 0 on success, 1 when validation fails (general position,
//! a failed comparison, a numerical failure), 2 on usage or input errors.
//! Set `COUPLED_ALPHA_THREADS` to fix the worker count.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::complex::{coupled_alpha_infty, CoupledComplex, PointCloudPair, Simplex, SimplicialComplex};
use crate::error::Error;
use crate::filtration::{coupled_filtration, FilteredComplex};
use crate::geometry::{jitter, Point, DEFAULT_EPSILON};
use crate::harness::scaling_experiment;
use crate::homology::{compare_diagrams, persistence_diagram, Interval};
use crate::oracle::cech_filtration;

/// Environment variable overriding the worker thread count.
pub const THREADS_ENV: &str = "COUPLED_ALPHA_THREADS";

#[derive(Parser, Debug)]
#[command(name = "coupled-alpha", version, about = "Coupled alpha complexes of point-cloud pairs")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,

    /// Predicate tolerance.
    #[arg(long, global = true, default_value_t = DEFAULT_EPSILON)]
    pub epsilon: f64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Write to this file instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// List the simplexes of the complex at radius infinity.
    Build(Input),
    /// Filtration values, sorted by (value, dim, lex).
    Filtrate {
        #[command(flatten)]
        input: Input,
        /// Simplex list from `build` (CSV or JSON) to filter instead of
        /// triangulating.
        #[arg(long)]
        complex: Option<PathBuf>,
        /// Keep only simplexes with value <= this radius.
        #[arg(long)]
        max_radius: Option<f64>,
    },
    /// Persistence intervals per dimension.
    Diagram {
        #[command(flatten)]
        input: Input,
        /// Truncate the filtration at this radius; later deaths become `inf`.
        #[arg(long)]
        max_radius: Option<f64>,
        /// Drop intervals of persistence <= this value.
        #[arg(long, default_value_t = 0.0)]
        min_persistence: f64,
    },
    /// Compare the coupled diagram with the Čech diagram of X ∪ Y in H0 and H1.
    Compare {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 1e-6)]
        tolerance: f64,
        #[arg(long, default_value_t = 1e-9)]
        min_persistence: f64,
    },
    /// Simplex counts of random Poisson instances in the unit cube.
    Scaling {
        #[arg(long, default_value_t = 2)]
        dim: usize,
        /// Comma-separated ascending intensities.
        #[arg(long, value_delimiter = ',', required = true)]
        n_list: Vec<f64>,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also certify empty circumspheres on every instance.
        #[arg(long)]
        certify: bool,
        /// Include wall time, which makes output nondeterministic.
        #[arg(long)]
        timing: bool,
    },
    /// Exhaustive coupled general position check.
    Check(Input),
}

#[derive(Args, Debug)]
pub struct Input {
    #[arg(long)]
    pub x: PathBuf,
    /// Omit for a single cloud.
    #[arg(long)]
    pub y: Option<PathBuf>,
    /// Expected ambient dimension.
    #[arg(long)]
    pub dim: Option<usize>,
    /// Perturb every coordinate uniformly in [-delta, delta].
    #[arg(long)]
    pub jitter: Option<f64>,
    /// Seed for `--jitter`.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// A failure with its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    kind: String,
    message: String,
}

impl Failure {
    fn usage(kind: &str, message: impl Into<String>) -> Self {
        Failure { code: 2, kind: kind.into(), message: message.into() }
    }

    fn validation(kind: &str, message: impl Into<String>) -> Self {
        Failure { code: 1, kind: kind.into(), message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let usage = matches!(
            e.kind(),
            "EmptyInput" | "NonFinite" | "DimensionMismatch" | "DimensionOverflow" | "NotInComplex" | "TooLarge"
        );
        Failure { code: if usage { 2 } else { 1 }, kind: e.kind().into(), message: e.to_string() }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::usage("Io", e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::usage("Csv", e.to_string())
    }
}

type Outcome = std::result::Result<i32, Failure>;

/// Runs with the process arguments and streams.
pub fn run() -> i32 {
    run_with(std::env::args_os(), &mut io::stdout().lock(), &mut io::stderr().lock())
}

/// Runs with explicit arguments (including the program name) and streams.
pub fn run_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args: Vec<std::ffi::OsString> = args.into_iter().map(Into::into).collect();
    let json_requested = args.windows(2).any(|w| w[0] == "--format" && w[1] == "json") || args.iter().any(|a| a == "--format=json");
    let config = match RunConfig::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return 0;
            }
            let failure = Failure::usage("Usage", e.to_string().trim_end());
            report(&failure, json_requested, stderr);
            return failure.code;
        }
    };
    let result = match thread_pool() {
        Ok(Some(pool)) => pool.install(|| execute(&config)),
        Ok(None) => execute(&config),
        Err(f) => Err(f),
    };
    match result.and_then(|(code, buffer)| emit(&config, &buffer, stdout).map(|_| code)) {
        Ok(code) => code,
        Err(failure) => {
            report(&failure, config.format == Format::Json, stderr);
            failure.code
        }
    }
}

fn thread_pool() -> std::result::Result<Option<rayon::ThreadPool>, Failure> {
    let Ok(raw) = std::env::var(THREADS_ENV) else { return Ok(None) };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| Failure::usage("Usage", format!("{THREADS_ENV}={raw:?} is not a thread count")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .map(Some)
        .map_err(|e| Failure::usage("Usage", e.to_string()))
}

fn report(failure: &Failure, json_mode: bool, stderr: &mut dyn Write) {
    let _ = if json_mode {
        writeln!(stderr, "{}", json!({"error": {"kind": failure.kind, "message": failure.message, "exit_code": failure.code}}))
    } else {
        writeln!(stderr, "error: {}", failure.message)
    };
}

fn execute(config: &RunConfig) -> std::result::Result<(i32, Vec<u8>), Failure> {
    let eps = config.epsilon;
    if !(eps.is_finite() && eps >= 0.0) {
        return Err(Failure::usage("Usage", "--epsilon must be finite and nonnegative"));
    }
    let mut buffer = Vec::new();
    let code = match &config.command {
        Command::Build(input) => build(input, eps, config.format, &mut buffer)?,
        Command::Filtrate { input, complex, max_radius } => {
            filtrate(input, complex.as_deref(), *max_radius, eps, config.format, &mut buffer)?
        }
        Command::Diagram { input, max_radius, min_persistence } => {
            diagram(input, *max_radius, *min_persistence, eps, config.format, &mut buffer)?
        }
        Command::Compare { input, tolerance, min_persistence } => {
            compare(input, *tolerance, *min_persistence, eps, config.format, &mut buffer)?
        }
        Command::Scaling { dim, n_list, trials, seed, certify, timing } => {
            scaling(*dim, n_list, *trials, *seed, *certify, *timing, eps, config.format, &mut buffer)?
        }
        Command::Check(input) => check(input, eps, config.format, &mut buffer)?,
    };
    Ok((code, buffer))
}

fn emit(config: &RunConfig, buffer: &[u8], stdout: &mut dyn Write) -> std::result::Result<(), Failure> {
    match &config.output {
        Some(path) => {
            let mut file = BufWriter::new(File::create(path)?);
            file.write_all(buffer)?;
            file.flush()?;
        }
        None => stdout.write_all(buffer)?,
    }
    Ok(())
}

/// Reads a point cloud: one point per row, one column per coordinate.
pub fn read_points(path: &Path) -> std::result::Result<Vec<Point>, String> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_path(path)
        .map_err(|e| format!("{}: {e}", path.display()))?;
    let mut points = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| format!("{}: {e}", path.display()))?;
        let coords = record
            .iter()
            .map(|field| field.parse::<f64>())
            .collect::<std::result::Result<Vec<f64>, _>>()
            .map_err(|e| format!("{}: row {}: {e}", path.display(), row + 1))?;
        if coords.is_empty() {
            continue;
        }
        points.push(Point::new(coords).map_err(|e| format!("{}: row {}: {e}", path.display(), row + 1))?);
    }
    Ok(points)
}

fn load_pair(input: &Input) -> std::result::Result<PointCloudPair, Failure> {
    let read = |p: &Path| read_points(p).map_err(|m| Failure::usage("Input", m));
    let mut x = read(&input.x)?;
    let mut y = match &input.y {
        Some(p) => read(p)?,
        None => Vec::new(),
    };
    if let Some(delta) = input.jitter {
        if !(delta.is_finite() && delta >= 0.0) {
            return Err(Failure::usage("Usage", "--jitter must be finite and nonnegative"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(input.seed);
        x = jitter(&x, delta, &mut rng);
        y = jitter(&y, delta, &mut rng);
    }
    let pair = PointCloudPair::new(x, y)?;
    if let Some(d) = input.dim {
        if d != pair.dim() {
            return Err(Error::DimensionMismatch { expected: d, found: pair.dim() }.into());
        }
    }
    Ok(pair)
}

/// Reads a `build` simplex list: CSV rows `dim, v_1..v_k` or the JSON object
/// `{"simplices": [[v_1, ..], ..]}`.
pub fn read_simplices(path: &Path) -> std::result::Result<Vec<Simplex>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    if text.trim_start().starts_with('{') {
        let value: Value = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        let list: Vec<Vec<usize>> = serde_json::from_value(value["simplices"].clone())
            .map_err(|e| format!("{}: {e}", path.display()))?;
        return Ok(list.into_iter().map(Simplex::new).collect());
    }
    let mut out = Vec::new();
    for (row, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields = line
            .split(',')
            .map(|f| f.trim().parse::<usize>())
            .collect::<std::result::Result<Vec<usize>, _>>()
            .map_err(|e| format!("{}: row {}: {e}", path.display(), row + 1))?;
        let Some((&dim, vertices)) = fields.split_first() else { continue };
        if vertices.len() != dim + 1 {
            return Err(format!("{}: row {}: dimension {dim} with {} vertices", path.display(), row + 1, vertices.len()));
        }
        out.push(Simplex::new(vertices.to_vec()));
    }
    Ok(out)
}

/// `{:?}` is the shortest round-tripping form and prints infinity as `inf`.
fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

fn json_f64(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        json!("inf")
    }
}

fn csv_row(out: &mut Vec<u8>, head: &[String], vertices: &[usize]) -> io::Result<()> {
    let fields: Vec<String> = head.iter().cloned().chain(vertices.iter().map(|v| v.to_string())).collect();
    writeln!(out, "{}", fields.join(","))
}

fn write_json(out: &mut Vec<u8>, value: &Value) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)
}

fn build(input: &Input, eps: f64, format: Format, out: &mut Vec<u8>) -> Outcome {
    let pair = load_pair(input)?;
    let complex = coupled_alpha_infty(&pair, eps)?;
    match format {
        Format::Csv => {
            for s in complex.simplices() {
                csv_row(out, &[s.dim().to_string()], s.vertices())?;
            }
        }
        Format::Json => {
            let simplices: Vec<&[usize]> = complex.simplices().iter().map(|s| s.vertices()).collect();
            write_json(out, &json!({"n_x": pair.n_x(), "n_y": pair.len() - pair.n_x(), "dim": pair.dim(), "simplices": simplices}))?;
        }
    }
    Ok(0)
}

fn filtration_for(input: &Input, complex_file: Option<&Path>, eps: f64) -> std::result::Result<FilteredComplex, Failure> {
    let pair = load_pair(input)?;
    let complex = match complex_file {
        Some(path) => {
            let simplices = read_simplices(path).map_err(|m| Failure::usage("Input", m))?;
            CoupledComplex::from_simplices(pair, simplices)?
        }
        None => coupled_alpha_infty(&pair, eps)?,
    };
    Ok(coupled_filtration(&complex, eps)?)
}

/// The faces of `fc` with value `<= r`, which form a subcomplex.
fn truncate(fc: &FilteredComplex, r: Option<f64>) -> std::result::Result<FilteredComplex, Failure> {
    let Some(r) = r else { return Ok(fc.clone()) };
    let kept: Vec<Simplex> = fc.at_radius(r).cloned().collect();
    let complex = SimplicialComplex::from_generators(kept, 0);
    let values = complex.simplices().iter().map(|s| fc.value(s).unwrap_or(0.0)).collect();
    Ok(FilteredComplex::new(complex, values)?)
}

fn filtrate(input: &Input, complex_file: Option<&Path>, max_radius: Option<f64>, eps: f64, format: Format, out: &mut Vec<u8>) -> Outcome {
    let fc = filtration_for(input, complex_file, eps)?;
    let rows: Vec<(&Simplex, f64)> = fc.sorted().into_iter().filter(|(_, v)| max_radius.is_none_or(|r| *v <= r)).collect();
    match format {
        Format::Csv => {
            for (s, v) in rows {
                csv_row(out, &[fmt_f64(v), s.dim().to_string()], s.vertices())?;
            }
        }
        Format::Json => {
            let rows: Vec<Value> = rows
                .into_iter()
                .map(|(s, v)| json!({"value": v, "dim": s.dim(), "vertices": s.vertices()}))
                .collect();
            write_json(out, &json!({"filtration": rows}))?;
        }
    }
    Ok(0)
}

fn interval_json(i: &Interval) -> Value {
    json!({"dim": i.dim, "birth": json_f64(i.birth), "death": json_f64(i.death)})
}

fn diagram(input: &Input, max_radius: Option<f64>, min_persistence: f64, eps: f64, format: Format, out: &mut Vec<u8>) -> Outcome {
    let fc = truncate(&filtration_for(input, None, eps)?, max_radius)?;
    let dgm = persistence_diagram(&fc)?;
    let mut intervals: Vec<&Interval> = dgm.all().iter().filter(|i| i.persistence() > min_persistence).collect();
    intervals.sort_by(|a, b| a.dim.cmp(&b.dim).then(a.birth.total_cmp(&b.birth)).then(a.death.total_cmp(&b.death)));
    match format {
        Format::Csv => {
            for i in intervals {
                writeln!(out, "{},{},{}", i.dim, fmt_f64(i.birth), fmt_f64(i.death))?;
            }
        }
        Format::Json => {
            let rows: Vec<Value> = intervals.into_iter().map(interval_json).collect();
            write_json(out, &json!({"intervals": rows}))?;
        }
    }
    Ok(0)
}

fn compare(input: &Input, tolerance: f64, min_persistence: f64, eps: f64, format: Format, out: &mut Vec<u8>) -> Outcome {
    let pair = load_pair(input)?;
    let coupled = persistence_diagram(&coupled_filtration(&coupled_alpha_infty(&pair, eps)?, eps)?)?;
    let points: Vec<Point> = pair.points().cloned().collect();
    let cech = persistence_diagram(&cech_filtration(&points, 2, eps)?)?;
    let cmp = compare_diagrams(&coupled, &cech, [0, 1], min_persistence);
    let pass = cmp.dims.iter().all(|d| d.count_a == d.count_b) && cmp.agrees(tolerance);
    let verdict = if pass { "PASS" } else { "FAIL" };
    match format {
        Format::Csv => {
            writeln!(out, "dim,count_coupled,count_cech,distance")?;
            for d in &cmp.dims {
                writeln!(out, "{},{},{},{}", d.dim, d.count_a, d.count_b, fmt_f64(d.distance.unwrap_or(f64::INFINITY)))?;
            }
            writeln!(out, "{verdict},{}", fmt_f64(cmp.max_discrepancy()))?;
        }
        Format::Json => {
            let dims: Vec<Value> = cmp
                .dims
                .iter()
                .map(|d| {
                    json!({"dim": d.dim, "count_coupled": d.count_a, "count_cech": d.count_b,
                           "distance": json_f64(d.distance.unwrap_or(f64::INFINITY))})
                })
                .collect();
            write_json(out, &json!({"dims": dims, "max_discrepancy": json_f64(cmp.max_discrepancy()), "tolerance": tolerance, "pass": pass}))?;
        }
    }
    Ok(if pass { 0 } else { 1 })
}

#[allow(clippy::too_many_arguments)]
fn scaling(d: usize, n_list: &[f64], trials: usize, seed: u64, certify: bool, timing: bool, eps: f64, format: Format, out: &mut Vec<u8>) -> Outcome {
    if d == 0 {
        return Err(Failure::usage("Usage", "--dim must be positive"));
    }
    if n_list.iter().any(|n| !(n.is_finite() && *n > 0.0)) {
        return Err(Failure::usage("Usage", "--n-list entries must be positive"));
    }
    if n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Failure::usage("Usage", "--n-list must be strictly ascending"));
    }
    let report = scaling_experiment(n_list, trials, d, seed, eps, certify)?;
    match format {
        Format::Csv => {
            let mut header = vec!["n".to_string(), "trial".into(), "seed".into(), "n_x".into(), "n_y".into()];
            header.extend((0..d + 2).map(|k| format!("F_{k}")));
            if timing {
                header.push("wall_time".into());
            }
            writeln!(out, "{}", header.join(","))?;
            for r in &report.records {
                let mut row = vec![fmt_f64(r.n), r.trial.to_string(), r.seed.to_string(), r.n_x.to_string(), r.n_y.to_string()];
                row.extend(r.counts.iter().map(|c| c.to_string()));
                if timing {
                    row.push(fmt_f64(r.wall_time));
                }
                writeln!(out, "{}", row.join(","))?;
            }
        }
        Format::Json => {
            let mut value = serde_json::to_value(&report).map_err(|e| Failure::validation("Internal", e.to_string()))?;
            if !timing {
                for r in value["records"].as_array_mut().into_iter().flatten() {
                    r.as_object_mut().map(|o| o.remove("wall_time"));
                }
            }
            write_json(out, &value)?;
        }
    }
    Ok(0)
}

fn check(input: &Input, eps: f64, format: Format, out: &mut Vec<u8>) -> Outcome {
    let pair = load_pair(input)?;
    let report = pair.check_general_position(eps);
    match format {
        Format::Csv => {
            for v in &report.violations {
                let kind = serde_json::to_value(v.kind).ok().and_then(|k| k.as_str().map(String::from)).unwrap_or_default();
                let point = v.point.map(|p| p.to_string()).unwrap_or_default();
                csv_row(out, &[kind, point], &v.subset)?;
            }
        }
        Format::Json => {
            write_json(out, &json!({"ok": report.is_ok(), "violations": report.violations}))?;
        }
    }
    Ok(if report.is_ok() { 0 } else { 1 })
}
