//! `pairspec`: spectrum tables, parameter solves, samples from `P_μ`,
//! property suites and the shifted-average spectrum.
//!
//! Exit codes: 0 success, 1 failed property, 2 usage error, 3 numeric failure.

mod plot;

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use pairspec::lab::{summarize, DEFAULT_SEED};
use pairspec::measure::trial_seed;
use pairspec::verify::{self, Suite};
use pairspec::{
    general_sweep, log_ratio, sample_pmu, solve_params_for_theta, sweep_spectrum, theta_of, word_stats,
    ExperimentReport, GeneralOptions, ModelParams, SolveOptions,
};

/// `|log_ratio|` at or below this counts as the critical point θ = 1/4.
const CRITICAL_TOL: f64 = 1e-10;
/// Words generated per parallel batch in `sample`.
const SAMPLE_BATCH: usize = 256;

#[derive(Parser)]
#[command(name = "pairspec", version, about = "Dimension spectrum of the pair frequency (1/n) Σ x_k x_2k")]
struct Cli {
    /// Root-finding tolerance on the residual.
    #[arg(long, global = true, env = "PAIRSPEC_TOLERANCE", default_value_t = SolveOptions::default().tolerance)]
    tolerance: f64,

    /// Worker threads for sweeps and sampling (0 = one per core).
    #[arg(long, global = true, env = "PAIRSPEC_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate dim A_θ on a uniform θ grid.
    Spectrum(SpectrumArgs),
    /// Optimal Markov parameters and dimension at one θ.
    Solve {
        #[arg(long)]
        theta: f64,
    },
    /// Draw words from the multiplicative measure.
    Sample(SampleArgs),
    /// Run a property suite.
    Verify {
        #[arg(value_parser = parse_suite)]
        suite: Suite,
        /// Print the reports as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Spectrum of the averages of (x_k + β)(x_2k + γ), swept over q.
    General(GeneralArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct SpectrumArgs {
    #[arg(long, default_value_t = 201)]
    points: usize,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    min: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    max: f64,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Write a gnuplot script for the table to this path.
    #[arg(long, value_name = "PATH")]
    plot_script: Option<PathBuf>,
    /// Write the table here instead of stdout.
    #[arg(long, short, value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SampleArgs {
    /// Word length.
    #[arg(long)]
    n: usize,
    /// Use the optimal parameters for this θ.
    #[arg(long, conflicts_with_all = ["p", "q"], required_unless_present_all = ["p", "q"])]
    theta: Option<f64>,
    #[arg(long, requires = "q")]
    p: Option<f64>,
    #[arg(long, requires = "p")]
    q: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    count: usize,
    /// Print aggregate word statistics as JSON instead of the words.
    #[arg(long)]
    stats: bool,
}

#[derive(Args)]
struct GeneralArgs {
    #[arg(long, allow_hyphen_values = true)]
    beta: f64,
    #[arg(long, allow_hyphen_values = true)]
    gamma: f64,
    #[arg(long, default_value_t = 101)]
    points: usize,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|_| format!("expected one of measure, identity, oracle, general, all; got {s:?}"))
}

enum Failure {
    Property(String),
    Usage(String),
    Numeric(String),
    Io(io::Error),
}

impl From<pairspec::Error> for Failure {
    fn from(e: pairspec::Error) -> Self {
        use pairspec::Error as E;
        match e {
            E::Domain { .. } | E::InvalidArgument(_) => Failure::Usage(e.to_string()),
            _ => Failure::Numeric(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("pairspec: cannot configure thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    let result = SolveOptions::new(cli.tolerance, SolveOptions::default().max_iterations)
        .map_err(Failure::from)
        .and_then(|opts| run(cli.command, opts));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(f) => {
            let (code, msg) = match f {
                Failure::Property(m) => (1, m),
                Failure::Usage(m) => (2, m),
                Failure::Numeric(m) => (3, m),
                Failure::Io(e) => (2, format!("i/o error: {e}")),
            };
            eprintln!("pairspec: {msg}");
            ExitCode::from(code)
        }
    }
}

fn run(command: Command, opts: SolveOptions) -> CmdResult {
    match command {
        Command::Spectrum(args) => cmd_spectrum(args, opts),
        Command::Solve { theta } => cmd_solve(theta, opts),
        Command::Sample(args) => cmd_sample(args, opts),
        Command::Verify { suite, json } => cmd_verify(suite, json),
        Command::General(args) => cmd_general(args, opts),
    }
}

fn stdout() -> BufWriter<io::StdoutLock<'static>> {
    BufWriter::new(io::stdout().lock())
}

fn to_json<T: Serialize>(value: &T) -> Result<String, Failure> {
    serde_json::to_string_pretty(value).map_err(|e| Failure::Numeric(format!("cannot encode JSON: {e}")))
}

#[derive(Serialize)]
struct SpectrumRow {
    theta: f64,
    p: f64,
    q: f64,
    dim: f64,
    eggleston: f64,
}

fn spectrum_csv(rows: &[SpectrumRow]) -> String {
    let mut out = String::from("theta,p,q,dim,eggleston\n");
    for r in rows {
        out.push_str(&format!("{:.12},{:.12},{:.12},{:.12},{:.12}\n", r.theta, r.p, r.q, r.dim, r.eggleston));
    }
    out
}

fn cmd_spectrum(args: SpectrumArgs, opts: SolveOptions) -> CmdResult {
    let rows: Vec<SpectrumRow> = sweep_spectrum(args.points, args.min, args.max, opts)?
        .into_iter()
        .map(|pt| SpectrumRow {
            theta: pt.theta,
            p: pt.params.p(),
            q: pt.params.q(),
            dim: pt.dim,
            eggleston: pt.eggleston,
        })
        .collect();
    let csv = spectrum_csv(&rows);
    let table = match args.format {
        Format::Csv => csv.clone(),
        Format::Json => to_json(&rows)? + "\n",
    };
    match &args.output {
        Some(path) => fs::write(path, &table)?,
        None => {
            let mut out = stdout();
            out.write_all(table.as_bytes())?;
            out.flush()?;
        }
    }
    if let Some(script_path) = &args.plot_script {
        let csv_path = args.output.as_ref().filter(|_| matches!(args.format, Format::Csv));
        let script = match csv_path {
            Some(path) => plot::gnuplot_script(plot::Data::File(&path.to_string_lossy())),
            None => plot::gnuplot_script(plot::Data::Inline(&csv)),
        };
        fs::write(script_path, script)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct SolveOutput {
    theta: f64,
    p: f64,
    q: f64,
    dim: f64,
    /// `None` at the endpoints, where the ratio is singular.
    log_ratio: Option<f64>,
    side: &'static str,
}

fn side(theta: f64, ratio: Option<f64>) -> &'static str {
    match ratio {
        Some(r) if r.abs() <= CRITICAL_TOL => "critical",
        Some(r) if r < 0.0 => "A+",
        Some(_) => "A-",
        None if theta < 0.25 => "A+",
        None => "A-",
    }
}

fn cmd_solve(theta: f64, opts: SolveOptions) -> CmdResult {
    let sol = solve_params_for_theta(theta, opts)?;
    let dim = pairspec::dimension(theta, opts)?;
    let ratio = if sol.params.is_interior() { Some(log_ratio(sol.params)?) } else { None };
    let output =
        SolveOutput { theta, p: sol.params.p(), q: sol.params.q(), dim, log_ratio: ratio, side: side(theta, ratio) };
    let mut out = stdout();
    writeln!(out, "{}", to_json(&output)?)?;
    out.flush()?;
    Ok(())
}

#[derive(Serialize, Default)]
struct MeanCounts {
    n1_total: f64,
    n1_odd: f64,
    n1_half: Option<f64>,
    n00: Option<f64>,
    n01: Option<f64>,
    n10: Option<f64>,
    n11: Option<f64>,
    alpha_n: Option<f64>,
    pair_freq: f64,
}

#[derive(Serialize)]
struct SampleStats {
    n: usize,
    count: usize,
    seed: u64,
    p: f64,
    q: f64,
    theta: f64,
    /// Per-word averages of the word statistics.
    mean: MeanCounts,
    /// Pair frequency across words against θ; needs at least two words.
    pair_frequency: Option<ExperimentReport>,
}

fn sample_params(args: &SampleArgs, opts: SolveOptions) -> Result<ModelParams, Failure> {
    match (args.theta, args.p, args.q) {
        (Some(theta), None, None) => Ok(solve_params_for_theta(theta, opts)?.params),
        (None, Some(p), Some(q)) => Ok(ModelParams::new(p, q)?),
        _ => Err(Failure::Usage("give either --theta or both --p and --q".into())),
    }
}

fn cmd_sample(args: SampleArgs, opts: SolveOptions) -> CmdResult {
    let params = sample_params(&args, opts)?;
    if args.n == 0 {
        return Err(Failure::Usage("--n must be at least 1".into()));
    }
    if !args.n.is_power_of_two() {
        eprintln!("pairspec: warning: n = {} is not a power of two", args.n);
    }
    if args.stats {
        return sample_stats(&args, params);
    }
    let mut out = stdout();
    let total = args.count as u64;
    let mut start = 0u64;
    while start < total {
        let end = total.min(start + SAMPLE_BATCH as u64);
        let words = (start..end)
            .into_par_iter()
            .map(|j| sample_pmu(args.n, params, trial_seed(args.seed, j)).map(|w| w.to_string()))
            .collect::<Result<Vec<_>, _>>()?;
        for w in words {
            writeln!(out, "{w}")?;
        }
        start = end;
    }
    out.flush()?;
    Ok(())
}

fn mean_of(values: impl Iterator<Item = f64>, count: usize) -> f64 {
    let v: Vec<f64> = values.collect();
    pairspec::lab::pairwise_sum(&v) / count as f64
}

fn sample_stats(args: &SampleArgs, params: ModelParams) -> CmdResult {
    if args.count == 0 {
        return Err(Failure::Usage("--stats needs --count >= 1".into()));
    }
    let stats = (0..args.count as u64)
        .into_par_iter()
        .map(|j| sample_pmu(args.n, params, trial_seed(args.seed, j)).map(|w| word_stats(&w)))
        .collect::<Result<Vec<_>, _>>()?;
    let c = args.count;
    let halves: Option<Vec<_>> = stats.iter().map(|s| s.half).collect();
    let half_mean = |f: fn(&pairspec::measure::HalfStats) -> f64| halves.as_ref().map(|h| mean_of(h.iter().map(f), c));
    let mean = MeanCounts {
        n1_total: mean_of(stats.iter().map(|s| s.n1_total as f64), c),
        n1_odd: mean_of(stats.iter().map(|s| s.n1_odd as f64), c),
        n1_half: half_mean(|h| h.n1_half as f64),
        n00: half_mean(|h| h.n00 as f64),
        n01: half_mean(|h| h.n01 as f64),
        n10: half_mean(|h| h.n10 as f64),
        n11: half_mean(|h| h.n11 as f64),
        alpha_n: half_mean(|h| h.alpha_n),
        pair_freq: mean_of(stats.iter().map(|s| s.pair_freq), c),
    };
    let theta = theta_of(params);
    let pair_frequency = if c >= 2 {
        let freqs: Vec<f64> = stats.iter().map(|s| s.pair_freq).collect();
        Some(summarize(&freqs, args.n, theta, args.seed)?)
    } else {
        None
    };
    let report =
        SampleStats { n: args.n, count: c, seed: args.seed, p: params.p(), q: params.q(), theta, mean, pair_frequency };
    let mut out = stdout();
    writeln!(out, "{}", to_json(&report)?)?;
    out.flush()?;
    Ok(())
}

fn cmd_verify(suite: Suite, json: bool) -> CmdResult {
    let reports = verify::run(suite)?;
    let mut out = stdout();
    if json {
        writeln!(out, "{}", to_json(&reports)?)?;
    } else {
        for r in &reports {
            writeln!(out, "{}: {}", r.suite, if r.passed() { "PASS" } else { "FAIL" })?;
            for c in &r.checks {
                writeln!(
                    out,
                    "  {:<46} max residual {:.3e} (threshold {:.1e}) {}",
                    c.name,
                    c.max_residual,
                    c.threshold,
                    if c.passed { "ok" } else { "FAIL" }
                )?;
            }
        }
    }
    out.flush()?;
    let failed: Vec<String> = reports
        .iter()
        .flat_map(|r| r.checks.iter().filter(|c| !c.passed).map(move |c| format!("{}/{}", r.suite, c.name)))
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Property(format!("failed properties: {}", failed.join(", "))))
    }
}

fn cmd_general(args: GeneralArgs, opts: SolveOptions) -> CmdResult {
    let gopts = GeneralOptions { solve: opts, ..GeneralOptions::default() };
    let sweep = general_sweep(args.beta, args.gamma, args.points, &gopts)?;
    if sweep.skipped > 0 {
        eprintln!("pairspec: {} of {} grid values of q had no unique solution", sweep.skipped, args.points);
    }
    let outside = sweep.points.iter().filter(|pt| !pt.theta_in_range).count();
    if outside > 0 {
        eprintln!("pairspec: {outside} rows have theta outside the range of (x + beta)(y + gamma)");
    }
    let mut out = stdout();
    match args.format {
        Format::Csv => {
            writeln!(out, "beta,gamma,q,p,p0,theta,dim")?;
            for pt in &sweep.points {
                writeln!(
                    out,
                    "{:.12},{:.12},{:.12},{:.12},{:.12},{:.12},{:.12}",
                    pt.beta, pt.gamma, pt.q, pt.p, pt.p0, pt.theta, pt.dim
                )?;
            }
        }
        Format::Json => writeln!(out, "{}", to_json(&sweep.points)?)?,
    }
    out.flush()?;
    Ok(())
}
