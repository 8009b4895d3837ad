//! Command-line entry point.
//!
//! Exit codes: 0 success, 1 validation failure, 2 bad invocation, 3 runtime error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use crate::agents::IncentiveParams;
use crate::analysis::{
    accuracy, compare_methods, overall_from_hits, season_hits, sweep_windows, trend_slope, wins_delta,
    AccuracyReport, AnalysisError, Interval, WinsDeltaRecord,
};
use crate::domain::SeasonDataset;
use crate::engine::{run_replications, with_threads, EngineError, Mode, Model, PriorSpec, SimulationConfig};
use crate::io::{
    emit_reports, load_bundle, read_accuracy_csv, read_compare_csv, read_sweep_csv, read_wins_delta_csv, ReportSet,
};
use crate::outcome::MethodId;
use crate::ratings::WindowPolicy;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "COURTSIM_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "courtsim", version, about = "Agent-based NBA season simulation and game outcome prediction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Ingest a data directory and report diagnostics.
    Validate {
        #[arg(long)]
        data: PathBuf,
    },
    /// Simulate seasons and emit accuracy.csv and wins_delta.csv.
    Simulate {
        #[arg(long, default_value = "i")]
        method: MethodId,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Sweep the rating window and emit sweep.csv.
    Sweep {
        #[arg(long, default_value = "i")]
        method: MethodId,
        /// Inclusive range `a..b` or a comma-separated list.
        #[arg(long)]
        windows: WindowList,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Count per-season winners between consecutive pairs of methods and emit compare.csv.
    Compare {
        /// Comma-separated methods, compared pairwise in order: `i,ii,iii,iv` compares i with ii and iii with iv.
        #[arg(long, value_delimiter = ',', required = true)]
        methods: Vec<MethodId>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Print summary tables of a report directory.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long)]
    data: PathBuf,
    /// Season id, or `all`.
    #[arg(long, default_value = "all")]
    season: String,
    #[arg(long, default_value = "basic")]
    model: Model,
    #[arg(long, default_value = "monte-carlo")]
    mode: Mode,
    #[arg(long, default_value_t = 1000)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Last k games, or `all` (default).
    #[arg(long)]
    window: Option<WindowPolicy>,
    /// Uniform prior for every team.
    #[arg(long, default_value_t = 0.5)]
    prior: f64,
    /// Use per-team priors from priors.csv instead of --prior.
    #[arg(long, conflicts_with = "prior")]
    use_dataset_priors: bool,
    /// Factor applied to win-percentage ratings by tanking or resting teams.
    #[arg(long, default_value_t = 0.5)]
    incentive_factor: f64,
    /// Amount subtracted from net ratings by tanking or resting teams.
    #[arg(long, default_value_t = 5.0)]
    incentive_decrement: f64,
    /// Classified teams rest once at most this many games remain.
    #[arg(long, default_value_t = 3)]
    rest_trigger: u32,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct WindowList(Vec<usize>);

impl FromStr for WindowList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let positive = |t: &str| match t.trim().parse::<usize>() {
            Ok(k) if k >= 1 => Ok(k),
            _ => Err(format!("window {t:?} must be an integer >= 1")),
        };
        let ks = if let Some((a, b)) = s.split_once("..") {
            let (a, b) = (positive(a)?, positive(b.trim_start_matches('='))?);
            if a > b {
                return Err(format!("empty window range {s:?}"));
            }
            (a..=b).collect()
        } else {
            s.split(',').map(positive).collect::<Result<Vec<_>, _>>()?
        };
        Ok(WindowList(ks))
    }
}

/// A failed command and its exit code.
#[derive(Debug)]
enum Failure {
    Validation(String),
    Usage(String),
    Runtime(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Validation(_) => EXIT_VALIDATION,
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Runtime(_) => EXIT_RUNTIME,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Validation(m) | Failure::Usage(m) | Failure::Runtime(m) => m,
        }
    }
}

fn runtime(e: impl std::fmt::Display) -> Failure {
    Failure::Runtime(e.to_string())
}

fn engine_failure(e: AnalysisError) -> Failure {
    match e {
        AnalysisError::Engine(
            e @ (EngineError::ClosedLoopNetRating
            | EngineError::ZeroReplications
            | EngineError::BadPrior(_)
            | EngineError::MissingPriors(_)
            | EngineError::BadIncentives),
        ) => Failure::Usage(e.to_string()),
        other => runtime(other),
    }
}

/// Parses `args` (including the program name), runs the command, and
/// returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("error: {}", f.message());
            f.code()
        }
    }
}

fn dispatch(command: Command) -> Result<(), Failure> {
    match command {
        Command::Validate { data } => validate(&data),
        Command::Simulate { method, run } => {
            let ctx = Context::new(&run, method)?;
            ctx.threads(|| simulate(&ctx))
        }
        Command::Sweep { method, windows, run } => {
            if run.window.is_some() {
                return Err(Failure::Usage("--window conflicts with --windows".into()));
            }
            let ctx = Context::new(&run, method)?;
            ctx.threads(|| {
                let points = sweep_windows(&ctx.seasons, &ctx.config, &windows.0).map_err(engine_failure)?;
                ctx.emit(ReportSet {
                    sweep: Some(points),
                    ..ReportSet::default()
                })
            })
        }
        Command::Compare { methods, run } => {
            if methods.len() < 2 || methods.len() % 2 != 0 {
                return Err(Failure::Usage(
                    "--methods needs an even number of methods, compared pairwise in order".into(),
                ));
            }
            let ctx = Context::new(&run, methods[0])?;
            let pairs: Vec<_> = methods
                .chunks(2)
                .map(|p| ctx.config_for(p[0]).and_then(|a| Ok((a, ctx.config_for(p[1])?))))
                .collect::<Result<_, _>>()?;
            ctx.threads(|| {
                let counts = compare_methods(&ctx.seasons, &pairs).map_err(engine_failure)?;
                print!("{}", render_compare(&counts));
                ctx.emit(ReportSet {
                    compare: Some(counts),
                    ..ReportSet::default()
                })
            })
        }
        Command::Report { input } => report(&input),
    }
}

fn validate(dir: &Path) -> Result<(), Failure> {
    let bundle = load_bundle(dir).map_err(|e| Failure::Validation(e.to_string()))?;
    for s in &bundle.seasons {
        let era = s.era();
        println!(
            "{}: {} games, {} teams, {} games per team, classify top {} / eliminate below {}",
            s.season_id(),
            s.len(),
            s.teams().len(),
            s.schedule_length(),
            era.classify_rank(),
            era.eliminate_rank()
        );
    }
    for note in &bundle.notes {
        println!("note: {note}");
    }
    for w in &bundle.warnings {
        eprintln!("warning: {w}");
    }
    println!("ok: {} season(s) in {}", bundle.seasons.len(), dir.display());
    Ok(())
}

/// Everything a run-style subcommand needs, validated before work starts.
struct Context {
    seasons: Vec<SeasonDataset>,
    config: SimulationConfig<f64>,
    threads: Option<usize>,
    out: PathBuf,
}

impl Context {
    fn new(run: &RunArgs, method: MethodId) -> Result<Self, Failure> {
        let threads = threads_from_env()?;
        let prior = if run.use_dataset_priors {
            PriorSpec::Dataset
        } else {
            PriorSpec::Uniform(run.prior)
        };
        let config = SimulationConfig {
            method,
            model: run.model,
            mode: run.mode,
            window: run.window.unwrap_or_default(),
            prior,
            incentives: IncentiveParams {
                win_pct_factor: run.incentive_factor,
                net_rating_decrement: run.incentive_decrement,
                rest_trigger_remaining: run.rest_trigger,
            },
            replications: run.reps,
            master_seed: run.seed,
        };
        config.validate().map_err(|e| Failure::Usage(e.to_string()))?;

        let bundle = load_bundle(&run.data).map_err(|e| Failure::Validation(e.to_string()))?;
        for w in &bundle.warnings {
            log::warn!("{w}");
        }
        let seasons = if run.season == "all" {
            bundle.seasons
        } else {
            let available: Vec<String> = bundle.seasons.iter().map(|s| s.season_id().to_string()).collect();
            let season = bundle
                .seasons
                .into_iter()
                .find(|s| s.season_id() == run.season)
                .ok_or_else(|| {
                    Failure::Usage(format!("season {} not found (available: {})", run.season, available.join(", ")))
                })?;
            vec![season]
        };
        for s in &seasons {
            config.validate_for(s).map_err(|e| Failure::Usage(e.to_string()))?;
        }
        Ok(Context {
            seasons,
            config,
            threads,
            out: run.out.clone(),
        })
    }

    fn config_for(&self, method: MethodId) -> Result<SimulationConfig<f64>, Failure> {
        let config = SimulationConfig {
            method,
            ..self.config.clone()
        };
        config.validate().map_err(|e| Failure::Usage(e.to_string()))?;
        for s in &self.seasons {
            config.validate_for(s).map_err(|e| Failure::Usage(e.to_string()))?;
        }
        Ok(config)
    }

    fn threads(&self, f: impl FnOnce() -> Result<(), Failure> + Send) -> Result<(), Failure> {
        with_threads(self.threads, f).map_err(runtime)?
    }

    fn emit(&self, reports: ReportSet) -> Result<(), Failure> {
        for path in emit_reports(&reports, &self.out).map_err(runtime)? {
            println!("wrote {}", path.display());
        }
        Ok(())
    }
}

fn threads_from_env() -> Result<Option<usize>, Failure> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) if v.trim().is_empty() => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(Failure::Usage(format!("{THREADS_ENV} must be a positive integer, got {v:?}"))),
        },
    }
}

const INTERVALS: [Interval; 3] = [Interval::Complete, Interval::FirstHalf, Interval::SecondHalf];

/// Per-season rows in season order, then the multi-season aggregates when
/// more than one season is selected.
fn simulate(ctx: &Context) -> Result<(), Failure> {
    let config = &ctx.config;
    let mut rows: Vec<AccuracyReport> = Vec::new();
    let mut deltas: Vec<WinsDeltaRecord> = Vec::new();
    let mut hits: Vec<[Vec<(usize, usize)>; 3]> = Vec::new();
    for season in &ctx.seasons {
        let results = run_replications(season, config).map_err(|e| engine_failure(e.into()))?;
        for interval in INTERVALS {
            if !interval.range(season.len()).is_empty() {
                rows.push(accuracy(&results, season, config, interval).map_err(runtime)?);
            }
        }
        let delta = wins_delta(&results, season);
        log::info!("{}: wins-delta trend slope {:.6}", season.season_id(), delta.trend_slope);
        deltas.extend(delta.records);
        hits.push(INTERVALS.map(|i| season_hits(&results, i)));
    }
    if ctx.seasons.len() > 1 {
        for (slot, interval) in INTERVALS.into_iter().enumerate() {
            if ctx.seasons.iter().all(|s| !interval.range(s.len()).is_empty()) {
                let per_season: Vec<_> = hits.iter().map(|h| h[slot].clone()).collect();
                rows.extend(overall_from_hits(&per_season, config, interval).map_err(runtime)?);
            }
        }
    }
    print!("{}", render_accuracy(&rows));
    ctx.emit(ReportSet {
        accuracy: Some(rows),
        wins_delta: Some(deltas),
        ..ReportSet::default()
    })
}

fn report(dir: &Path) -> Result<(), Failure> {
    if !dir.is_dir() {
        return Err(Failure::Runtime(format!("{}: not a directory", dir.display())));
    }
    let mut found = false;
    let path = dir.join("accuracy.csv");
    if path.exists() {
        found = true;
        print!("{}", render_accuracy(&read_accuracy_csv(&path).map_err(runtime)?));
    }
    let path = dir.join("wins_delta.csv");
    if path.exists() {
        found = true;
        print!("{}", render_wins_delta(&read_wins_delta_csv(&path).map_err(runtime)?));
    }
    let path = dir.join("sweep.csv");
    if path.exists() {
        found = true;
        let points = read_sweep_csv(&path).map_err(runtime)?;
        let rows = points
            .iter()
            .map(|p| {
                vec![
                    p.window.to_string(),
                    p.method.to_string(),
                    p.interval.to_string(),
                    pct(p.mean_accuracy),
                    format!("[{}, {}]", pct(p.ci_low), pct(p.ci_high)),
                ]
            })
            .collect();
        print!("{}", table("Window sweep", &["window", "method", "interval", "accuracy %", "95% CI"], rows));
    }
    let path = dir.join("compare.csv");
    if path.exists() {
        found = true;
        print!("{}", render_compare(&read_compare_csv(&path).map_err(runtime)?));
    }
    if !found {
        return Err(Failure::Runtime(format!("{}: no report files found", dir.display())));
    }
    Ok(())
}

fn pct(x: f64) -> String {
    format!("{:.1}", 100.0 * x)
}

fn render_accuracy(rows: &[AccuracyReport]) -> String {
    let body = rows
        .iter()
        .map(|r| {
            vec![
                r.season_id.clone(),
                r.method.to_string(),
                r.model.to_string(),
                r.mode.to_string(),
                r.interval.to_string(),
                pct(r.mean_accuracy),
                format!("±{}", pct(r.ci_high - r.mean_accuracy)),
                r.replications.to_string(),
            ]
        })
        .collect();
    table(
        "Prediction accuracy",
        &["season", "method", "model", "mode", "interval", "accuracy %", "95% CI", "reps"],
        body,
    )
}

fn render_wins_delta(records: &[WinsDeltaRecord]) -> String {
    let mut seasons: Vec<&str> = records.iter().map(|r| r.season_id.as_str()).collect();
    seasons.dedup();
    let body = seasons
        .iter()
        .map(|season| {
            let rs: Vec<WinsDeltaRecord> = records.iter().filter(|r| r.season_id == *season).cloned().collect();
            let mean_abs = rs.iter().map(|r| r.delta.unsigned_abs() as f64).sum::<f64>() / rs.len() as f64;
            vec![season.to_string(), rs.len().to_string(), format!("{mean_abs:.3}"), format!("{:.4}", trend_slope(&rs))]
        })
        .collect();
    table("Simulated minus real wins", &["season", "records", "mean |delta|", "trend slope"], body)
}

fn render_compare(counts: &[crate::analysis::ComparisonCount]) -> String {
    let body = counts
        .iter()
        .map(|c| {
            vec![
                format!("{} vs {}", c.method_a, c.method_b),
                c.interval.to_string(),
                c.wins_a.to_string(),
                c.wins_b.to_string(),
                c.ties.to_string(),
            ]
        })
        .collect();
    table("Seasons won", &["pair", "interval", "first", "second", "ties"], body)
}

fn table(title: &str, header: &[&str], rows: Vec<Vec<String>>) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<String>| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}", w = *w))
            .collect();
        padded.join("  ").trim_end().to_string()
    };
    let mut out = String::new();
    let _ = writeln!(out, "{title}");
    let _ = writeln!(out, "{}", line(header.iter().map(|h| h.to_string()).collect()));
    let _ = writeln!(out, "{}", line(widths.iter().map(|w| "-".repeat(*w)).collect()));
    for row in rows {
        let _ = writeln!(out, "{}", line(row));
    }
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_lists() {
        assert_eq!("1..4".parse::<WindowList>().unwrap().0, vec![1, 2, 3, 4]);
        assert_eq!("2..=3".parse::<WindowList>().unwrap().0, vec![2, 3]);
        assert_eq!("5,1,10".parse::<WindowList>().unwrap().0, vec![5, 1, 10]);
        assert!("0..3".parse::<WindowList>().is_err());
        assert!("4..2".parse::<WindowList>().is_err());
        assert!("a".parse::<WindowList>().is_err());
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run(["courtsim", "frobnicate"]), EXIT_USAGE);
        assert_eq!(run(["courtsim", "simulate", "--data", "x", "--out", "y", "--method", "vii"]), EXIT_USAGE);
        assert_eq!(run(["courtsim", "simulate", "--data", "x", "--out", "y", "--reps", "0"]), EXIT_USAGE);
        assert_eq!(
            run(["courtsim", "simulate", "--data", "x", "--out", "y", "--method", "v", "--mode", "closed-loop"]),
            EXIT_USAGE
        );
        assert_eq!(
            run(["courtsim", "simulate", "--data", "x", "--out", "y", "--prior", "0.4", "--use-dataset-priors"]),
            EXIT_USAGE
        );
        assert_eq!(run(["courtsim", "--help"]), EXIT_OK);
    }

    #[test]
    fn table_alignment() {
        let t = table("T", &["a", "bb"], vec![vec!["long".into(), "x".into()]]);
        assert_eq!(t, "T\na     bb\n----  --\nlong  x\n\n");
    }
}
