//! Command-line surface of the rotset toolkit: exact rotation polygons,
//! support queries, brute-force cross-checks, word decomposition, sequence
//! statistics, and torus lift simulation. File in, file out.

mod svg;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use rotset::ap;
use rotset::exact::{format_rat, parse_rat, Mat2, Rat};
use rotset::oracle;
use rotset::polygon::{decompose, rotation_polygon, simple_cycles, word_mean_bound_sq};
use rotset::support::support_max;
use rotset::torus::{
    cauchy_check, check_displacement_bound, estimate_rotation_set, itinerary,
    verify_rotational_chart, CauchyReport, ChartReport, LiftFamily, RectangleChart,
    RotationEstimate, TorusLift,
};
use rotset::{Error, IntVec2, Rational2, SftSystem, Symbol, Word};

const EXIT_PARSE: u8 = 2;
const EXIT_VALIDATION: u8 = 3;
const EXIT_NO_CYCLES: u8 = 4;
const EXIT_CAP: u8 = 5;

struct CliError {
    code: u8,
    msg: String,
}

impl CliError {
    fn parse(msg: impl Into<String>) -> CliError {
        CliError { code: EXIT_PARSE, msg: msg.into() }
    }

    fn check(msg: impl Into<String>) -> CliError {
        CliError { code: 1, msg: msg.into() }
    }

    fn validation(msg: impl Into<String>) -> CliError {
        CliError { code: EXIT_VALIDATION, msg: msg.into() }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> CliError {
        let code = match e {
            Error::CapExceeded { .. } => EXIT_CAP,
            Error::NoCycles => EXIT_NO_CYCLES,
            Error::NonFinite => 1,
            _ => EXIT_VALIDATION,
        };
        CliError { code, msg: e.to_string() }
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Parser)]
#[command(name = "rotset", version, about = "Rotation sets of torus dynamics: exact polygons, sequence statistics, lift simulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Cap on enumerated words per oracle call.
    #[arg(long, global = true, default_value_t = oracle::DEFAULT_WORD_CAP)]
    cap_words: u64,
    /// Cap on direct summation length.
    #[arg(long, global = true, default_value_t = ap::DEFAULT_SUM_CAP)]
    cap_sum: u64,
    /// Materialized schedule depth for sequence commands.
    #[arg(long, global = true, default_value_t = 6)]
    depth: usize,
    /// Seed recorded in reports (reserved for randomized sweeps).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Optional SVG output path (polygon and simulate).
    #[arg(long, global = true)]
    svg: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the exact rotation polygon of a system.
    Polygon {
        system: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Maximize <w, .> over the rotation set in one or more directions.
    Support {
        system: PathBuf,
        /// Direction as "p/q,p/q" (repeatable).
        #[arg(long = "dir", required = true, allow_hyphen_values = true)]
        dirs: Vec<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Cross-validate the polygon against brute-force word enumeration.
    Oracle {
        system: PathBuf,
        #[arg(long, default_value_t = 12)]
        n_max: u32,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Split an admissible word into cycles plus a short remainder.
    Decompose {
        system: PathBuf,
        /// Word as comma-separated symbols, e.g. "0,1,0".
        #[arg(long)]
        word: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Build the n-block power system.
    Power {
        system: PathBuf,
        #[arg(short, long)]
        n: u32,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Push the displacement cocycle forward by an integer matrix.
    Affine {
        system: PathBuf,
        /// Row-major entries "a,b,c,d".
        #[arg(long)]
        matrix: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Sequence statistics: checkpoints, recurrence windows, rotation points.
    Ap {
        /// Threshold as "p/q" in (0, 1].
        #[arg(long)]
        delta: String,
        /// Horizon for the rotation-point sweep (default: a_3).
        #[arg(long)]
        horizon: Option<u64>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Iterate a torus lift: rotation-set cloud, Cauchy check, chart checks.
    Simulate {
        lift: PathBuf,
        #[arg(long)]
        chart: Option<PathBuf>,
        /// Grid resolution per axis.
        #[arg(long, default_value_t = 16)]
        grid: usize,
        /// Iterations per orbit.
        #[arg(long, default_value_t = 1000)]
        steps: u32,
        /// Directory for the cloud CSV (default: current directory).
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

/// Caps, depth and seed, echoed into every report for reproducibility.
#[derive(Serialize)]
struct RunConfig {
    seed: u64,
    cap_words: u64,
    cap_sum: u64,
    depth: usize,
}

impl RunConfig {
    fn of(cli: &Cli) -> RunConfig {
        RunConfig {
            seed: cli.seed,
            cap_words: cli.cap_words,
            cap_sum: cli.cap_sum,
            depth: cli.depth,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.msg);
            ExitCode::from(e.code)
        }
    }
}

fn read_file(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::parse(format!("{}: {e}", path.display())))
}

fn read_system(path: &Path) -> CliResult<SftSystem> {
    let text = read_file(path)?;
    let sys: SftSystem = serde_json::from_str(&text)
        .map_err(|e| CliError::parse(format!("{}: {e}", path.display())))?;
    let report = sys.validate();
    if !report.is_valid() {
        return Err(CliError::validation(format!("{}: {report}", path.display())));
    }
    Ok(sys)
}

fn emit<T: Serialize>(value: &T, output: Option<&Path>) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::check(format!("serialization failed: {e}")))?;
    text.push('\n');
    match output {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::check(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_text(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::check(format!("{}: {e}", path.display())))
}

fn parse_symbols(s: &str) -> CliResult<Vec<Symbol>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<Symbol>()
                .map_err(|e| CliError::parse(format!("bad symbol {t:?}: {e}")))
        })
        .collect()
}

fn parse_direction(s: &str) -> CliResult<(Rat, Rat)> {
    let (x, y) = s
        .split_once(',')
        .ok_or_else(|| CliError::parse(format!("direction {s:?} must be \"p/q,p/q\"")))?;
    Ok((
        parse_rat(x).map_err(CliError::parse)?,
        parse_rat(y).map_err(CliError::parse)?,
    ))
}

fn run(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Polygon { system, output } => cmd_polygon(cli, system, output.as_deref()),
        Command::Support { system, dirs, output } => {
            cmd_support(system, dirs, output.as_deref())
        }
        Command::Oracle { system, n_max, output } => {
            cmd_oracle(cli, system, *n_max, output.as_deref())
        }
        Command::Decompose { system, word, output } => {
            cmd_decompose(system, word, output.as_deref())
        }
        Command::Power { system, n, output } => cmd_power(cli, system, *n, output.as_deref()),
        Command::Affine { system, matrix, output } => {
            cmd_affine(system, matrix, output.as_deref())
        }
        Command::Ap { delta, horizon, output } => {
            cmd_ap(cli, delta, *horizon, output.as_deref())
        }
        Command::Simulate { lift, chart, grid, steps, out_dir, output } => cmd_simulate(
            cli,
            lift,
            chart.as_deref(),
            *grid,
            *steps,
            out_dir.as_deref(),
            output.as_deref(),
        ),
    }
}

fn cmd_polygon(cli: &Cli, system: &Path, output: Option<&Path>) -> CliResult<()> {
    let sys = read_system(system)?;
    let poly = rotation_polygon(&sys)?;
    emit(&poly, output)?;
    if let Some(svg_path) = &cli.svg {
        write_text(svg_path, &svg::polygon_svg(&poly))?;
    }
    eprintln!("seed {}: polygon with {} vertices", cli.seed, poly.vertices().len());
    Ok(())
}

#[derive(Serialize)]
struct SupportRow {
    direction: (String, String),
    value: String,
    witness: Word,
}

fn cmd_support(system: &Path, dirs: &[String], output: Option<&Path>) -> CliResult<()> {
    let sys = read_system(system)?;
    let mut rows = Vec::new();
    for d in dirs {
        let w = parse_direction(d)?;
        let r = support_max(&sys, w)?;
        rows.push(SupportRow {
            direction: (format_rat(&w.0), format_rat(&w.1)),
            value: format_rat(&r.value),
            witness: r.witness.word().clone(),
        });
    }
    emit(&rows, output)
}

#[derive(Serialize)]
struct OracleLengthRow {
    n: u32,
    periodic_means: usize,
    contained: bool,
    word_means: usize,
    max_word_dist_sq: String,
    dist_bound_sq: String,
    bound_ok: bool,
}

#[derive(Serialize)]
struct VertexRealization {
    vertex: Rational2,
    witness_len: usize,
    realized_at_n: u32,
}

#[derive(Serialize)]
struct OracleReport {
    config: RunConfig,
    n_max: u32,
    polygon: rotset::RationalPolygon,
    oracle_hull: rotset::RationalPolygon,
    hull_equal: bool,
    per_length: Vec<OracleLengthRow>,
    vertices: Vec<VertexRealization>,
    pass: bool,
}

fn cmd_oracle(cli: &Cli, system: &Path, n_max: u32, output: Option<&Path>) -> CliResult<()> {
    let sys = read_system(system)?;
    let (sys, _) = sys.trim_to_biextendable()?;
    let poly = rotation_polygon(&sys)?;
    let hull = oracle::oracle_hull(&sys, n_max, cli.cap_words)?;
    let hull_equal = hull == poly;

    let mut per_length = Vec::new();
    for n in 1..=n_max {
        let periodic = oracle::oracle_means(&sys, n, cli.cap_words)?;
        let contained = periodic.iter().all(|m| poly.contains(m));
        let words = oracle::word_means(&sys, n, cli.cap_words)?;
        let bound = word_mean_bound_sq(&sys, n as u64);
        let max_dist = words
            .iter()
            .map(|m| poly.dist_sq(m))
            .max()
            .unwrap_or_else(|| Rat::from_integer(0));
        per_length.push(OracleLengthRow {
            n,
            periodic_means: periodic.len(),
            contained,
            word_means: words.len(),
            max_word_dist_sq: format_rat(&max_dist),
            dist_bound_sq: format_rat(&bound),
            bound_ok: max_dist <= bound,
        });
    }

    let cycles = simple_cycles(&sys);
    let mut vertices = Vec::new();
    for v in poly.vertices() {
        let witness_len = cycles
            .iter()
            .filter(|c| sys.mean(c) == *v)
            .map(|c| c.len())
            .min()
            .unwrap_or(0);
        let realized_at_n = (1..=n_max)
            .find(|&n| {
                (n as usize).is_multiple_of(witness_len.max(1))
                    && oracle::oracle_means(&sys, n, cli.cap_words)
                        .map(|m| m.contains(v))
                        .unwrap_or(false)
            })
            .unwrap_or(0);
        vertices.push(VertexRealization { vertex: *v, witness_len, realized_at_n });
    }

    let pass = hull_equal
        && per_length.iter().all(|r| r.contained && r.bound_ok)
        && vertices.iter().all(|v| v.realized_at_n > 0);
    let report = OracleReport {
        config: RunConfig::of(cli),
        n_max,
        polygon: poly,
        oracle_hull: hull,
        hull_equal,
        per_length,
        vertices,
        pass,
    };
    emit(&report, output)?;
    if !report.pass {
        return Err(CliError::check("oracle cross-check failed"));
    }
    Ok(())
}

#[derive(Serialize)]
struct DecomposeReport {
    cycles: Vec<Word>,
    remainder: Word,
    source_len: usize,
    psi: IntVec2,
    mean: Rational2,
}

fn cmd_decompose(system: &Path, word: &str, output: Option<&Path>) -> CliResult<()> {
    let sys = read_system(system)?;
    let w = Word(parse_symbols(word)?);
    let psi = sys.psi(&w)?;
    let d = decompose(&sys, &w)?;
    let report = DecomposeReport {
        cycles: d.cycles,
        remainder: d.remainder,
        source_len: d.source_len,
        psi,
        mean: Rational2::mean_of(psi, w.len().max(1) as u64),
    };
    emit(&report, output)
}

fn cmd_power(cli: &Cli, system: &Path, n: u32, output: Option<&Path>) -> CliResult<()> {
    let sys = read_system(system)?;
    let p = sys.power_system(n, cli.cap_words)?;
    emit(&p, output)
}

fn cmd_affine(system: &Path, matrix: &str, output: Option<&Path>) -> CliResult<()> {
    let sys = read_system(system)?;
    let e: Vec<i64> = matrix
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<i64>()
                .map_err(|err| CliError::parse(format!("bad matrix entry {t:?}: {err}")))
        })
        .collect::<CliResult<_>>()?;
    if e.len() != 4 {
        return Err(CliError::parse("matrix must have four row-major entries"));
    }
    let m = Mat2([[e[0], e[1]], [e[2], e[3]]]);
    emit(&sys.apply_integer_linear(&m), output)
}

#[derive(Serialize)]
struct ApReport {
    config: RunConfig,
    delta: String,
    t: u32,
    schedule: Vec<String>,
    checkpoints: Vec<ap::CheckpointRow>,
    windows: Vec<ap::WindowReport>,
    rotation_points: ap::RotationPointsReport,
    pass: bool,
}

fn cmd_ap(cli: &Cli, delta: &str, horizon: Option<u64>, output: Option<&Path>) -> CliResult<()> {
    let delta = parse_rat(delta).map_err(CliError::parse)?;
    let params = ap::ap_params(delta, cli.depth)?;

    let n_max = (0..=params.depth())
        .take_while(|&n| params.a_u64(n).is_some_and(|a| a <= cli.cap_sum))
        .last()
        .unwrap_or(0);
    let checkpoints = params.checkpoint_bounds(n_max, cli.cap_sum)?;

    let mut windows = Vec::new();
    for n0 in [0usize, 1] {
        windows.push(params.recurrence_window_check(n0, 100_000, cli.cap_sum)?);
    }

    let horizon = match horizon {
        Some(h) => h,
        None => params
            .a_u64(3.min(params.depth()))
            .ok_or_else(|| CliError::validation("schedule too large for a default horizon"))?,
    };
    let sys = SftSystem::full_shift(vec![IntVec2(0, 0), IntVec2(1, 0)]);
    let rotation_points = ap::symbolic_rotation_points(&params, &sys, horizon, 1, cli.cap_sum)?;

    let pass = checkpoints.iter().all(|r| r.pass)
        && windows.iter().all(|w| w.pass)
        && rotation_points.dense;
    let report = ApReport {
        config: RunConfig::of(cli),
        delta: format_rat(&delta),
        t: params.t(),
        schedule: params.schedule().iter().map(|a| a.to_string()).collect(),
        checkpoints,
        windows,
        rotation_points,
        pass,
    };
    emit(&report, output)
}

#[derive(Serialize)]
struct DisplacementSummary {
    segments: usize,
    steps: u32,
    bound: f64,
    max_residual: f64,
    pass: bool,
}

#[derive(Serialize)]
struct SimulateReport {
    config: RunConfig,
    lift: String,
    grid: usize,
    steps: u32,
    periodicity_residual: f64,
    translation_residual: Option<f64>,
    cauchy: CauchyReport,
    chart: Option<ChartReport>,
    displacement: Option<DisplacementSummary>,
    cloud_csv: String,
    pass: bool,
}

fn cmd_simulate(
    cli: &Cli,
    lift_path: &Path,
    chart_path: Option<&Path>,
    grid: usize,
    steps: u32,
    out_dir: Option<&Path>,
    output: Option<&Path>,
) -> CliResult<()> {
    let lift: TorusLift = serde_json::from_str(&read_file(lift_path)?)
        .map_err(|e| CliError::parse(format!("{}: {e}", lift_path.display())))?;

    let periodicity_residual = lift.periodicity_residual(64);
    let est = estimate_rotation_set(&lift, (grid, grid), steps)?;

    // Exact rotation vector for translations: the cloud must reproduce it.
    let translation_residual = match lift.family {
        LiftFamily::Translation { v } => Some(
            est.points
                .iter()
                .map(|p| (p.phi.0 - v.0).hypot(p.phi.1 - v.1))
                .fold(0.0, f64::max),
        ),
        _ => None,
    };

    let samples: Vec<(f64, f64)> = est.points.iter().map(|p| p.start).collect();
    let cauchy = cauchy_check(&lift, &samples, steps.min(1000))?;

    let mut chart_report = None;
    let mut displacement = None;
    if let Some(chart_path) = chart_path {
        let chart: RectangleChart = serde_json::from_str(&read_file(chart_path)?)
            .map_err(|e| CliError::parse(format!("{}: {e}", chart_path.display())))?;
        let report = verify_rotational_chart(&lift, &chart, 9)?;
        let chart_ok = report.pass;
        chart_report = Some(report);
        if chart_ok {
            let n = steps.min(50);
            let mut segments = 0usize;
            let mut max_residual = 0f64;
            let mut all_pass = true;
            for p in &est.points {
                if let Ok((_, valid)) = itinerary(&lift, &chart, p.start, n + 1) {
                    if valid > n as usize {
                        let r = check_displacement_bound(&lift, &chart, p.start, n)?;
                        segments += 1;
                        max_residual = max_residual.max(r.max_residual);
                        all_pass &= r.pass;
                    }
                }
            }
            displacement = Some(DisplacementSummary {
                segments,
                steps: n,
                bound: 2.0 * chart.d_s(),
                max_residual,
                pass: all_pass,
            });
        }
    }

    let out_dir = out_dir.unwrap_or(Path::new("."));
    fs::create_dir_all(out_dir)
        .map_err(|e| CliError::check(format!("{}: {e}", out_dir.display())))?;
    let csv_path = out_dir.join("cloud.csv");
    write_text(&csv_path, &cloud_csv(&est))?;
    if let Some(svg_path) = &cli.svg {
        write_text(svg_path, &svg::cloud_svg(&est))?;
    }

    let pass = periodicity_residual <= 1e-12
        && translation_residual.is_none_or(|r| r <= 1e-12)
        && cauchy.pass
        && chart_report.as_ref().is_none_or(|c| c.pass)
        && displacement.as_ref().is_none_or(|d| d.pass);
    let report = SimulateReport {
        config: RunConfig::of(cli),
        lift: lift.name.clone(),
        grid,
        steps,
        periodicity_residual,
        translation_residual,
        cauchy,
        chart: chart_report,
        displacement,
        cloud_csv: csv_path.display().to_string(),
        pass,
    };
    emit(&report, output)?;

    if let Some(c) = &report.chart {
        if !c.pass {
            return Err(CliError::validation("chart verification failed"));
        }
    }
    if let Some(d) = &report.displacement {
        if !d.pass {
            return Err(CliError::validation("displacement bound violated"));
        }
    }
    if !report.pass {
        return Err(CliError::check("simulation checks failed"));
    }
    Ok(())
}

fn cloud_csv(est: &RotationEstimate) -> String {
    let mut out = String::from("x,y,phi_x,phi_y\n");
    for p in &est.points {
        out.push_str(&format!(
            "{},{},{},{}\n",
            p.start.0, p.start.1, p.phi.0, p.phi.1
        ));
    }
    out
}
