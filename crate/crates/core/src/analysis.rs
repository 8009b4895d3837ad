//! Aggregation of replication results into accuracy tables, wins-delta
//! distributions, window sweeps and method comparisons.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use thiserror::Error;

use crate::domain::{SeasonDataset, TeamId};
use crate::engine::{run_replications, EngineError, Mode, Model, ReplicationResult, SimulationConfig};
use crate::outcome::MethodId;
use crate::ratings::WindowPolicy;
use crate::scalar::Scalar;

/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.96;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("no replication results")]
    NoResults,
    #[error("interval {0} contains no games")]
    EmptyInterval(Interval),
    #[error("seasons differ between compared runs: {0:?} vs {1:?}")]
    SeasonMismatch(Vec<String>, Vec<String>),
    #[error("compared configurations must share replication count and seed")]
    MismatchedConfigs,
    #[error("window sizes must be non-empty and at least 1")]
    BadWindows,
    #[error("replication counts differ across seasons")]
    UnevenReplications,
    #[error(transparent)]
    Engine(#[from] EngineError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Interval {
    Complete,
    FirstHalf,
    SecondHalf,
}

impl Interval {
    pub fn as_str(self) -> &'static str {
        match self {
            Interval::Complete => "complete",
            Interval::FirstHalf => "first-half",
            Interval::SecondHalf => "second-half",
        }
    }

    /// Chronological game indices in the interval for a season of `games` games.
    ///
    /// The second half starts at index `ceil(games / 2)`, league-wide.
    pub fn range(self, games: usize) -> Range<usize> {
        let mid = games.div_ceil(2);
        match self {
            Interval::Complete => 0..games,
            Interval::FirstHalf => 0..mid,
            Interval::SecondHalf => mid..games,
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Interval {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "complete" => Ok(Interval::Complete),
            "first-half" => Ok(Interval::FirstHalf),
            "second-half" => Ok(Interval::SecondHalf),
            other => Err(format!("unknown interval {other:?}")),
        }
    }
}

/// Mean with a normal-approximation 95% confidence interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanCi {
    pub mean: f64,
    pub low: f64,
    pub high: f64,
}

pub fn mean_ci(values: &[f64]) -> MeanCi {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return MeanCi { mean, low: mean, high: mean };
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let half = Z_95 * var.sqrt() / n.sqrt();
    MeanCi {
        mean,
        low: mean - half,
        high: mean + half,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AccuracyReport {
    pub season_id: String,
    pub method: MethodId,
    pub model: Model,
    pub mode: Mode,
    pub interval: Interval,
    pub mean_accuracy: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub replications: usize,
}

/// Correct and eligible game counts of one replication within an interval.
pub fn replication_hits(result: &ReplicationResult, interval: Interval) -> (usize, usize) {
    let range = interval.range(result.predictions.len());
    let eligible = range.len();
    let correct = result.predictions[range].iter().filter(|p| p.correct).count();
    (correct, eligible)
}

/// Per-replication accuracy within `interval`.
pub fn replication_accuracies(results: &[ReplicationResult], interval: Interval) -> Result<Vec<f64>, AnalysisError> {
    if results.is_empty() {
        return Err(AnalysisError::NoResults);
    }
    results
        .iter()
        .map(|r| match replication_hits(r, interval) {
            (_, 0) => Err(AnalysisError::EmptyInterval(interval)),
            (c, e) => Ok(c as f64 / e as f64),
        })
        .collect()
}

pub fn accuracy<S: Scalar>(
    results: &[ReplicationResult],
    dataset: &SeasonDataset,
    config: &SimulationConfig<S>,
    interval: Interval,
) -> Result<AccuracyReport, AnalysisError> {
    let stats = mean_ci(&replication_accuracies(results, interval)?);
    Ok(report(dataset.season_id(), config, interval, stats, results.len()))
}

fn report<S: Scalar>(
    season_id: &str,
    config: &SimulationConfig<S>,
    interval: Interval,
    stats: MeanCi,
    replications: usize,
) -> AccuracyReport {
    AccuracyReport {
        season_id: season_id.to_string(),
        method: config.method,
        model: config.model,
        mode: config.mode,
        interval,
        mean_accuracy: stats.mean,
        ci_low: stats.low,
        ci_high: stats.high,
        replications,
    }
}

/// Per-replication `(correct, eligible)` counts of one season.
pub fn season_hits(results: &[ReplicationResult], interval: Interval) -> Vec<(usize, usize)> {
    results.iter().map(|r| replication_hits(r, interval)).collect()
}

/// Per-replication accuracy pooled over several seasons.
///
/// `seasons[s][rep]` holds the hit counts of replication `rep` in season `s`.
/// Returns `(game_weighted, season_mean)`: the first divides total correct by
/// total eligible games, the second averages the per-season accuracies.
pub fn pool_hits(seasons: &[Vec<(usize, usize)>], interval: Interval) -> Result<(Vec<f64>, Vec<f64>), AnalysisError> {
    let reps = seasons.first().map(Vec::len).ok_or(AnalysisError::NoResults)?;
    if reps == 0 {
        return Err(AnalysisError::NoResults);
    }
    if seasons.iter().any(|r| r.len() != reps) {
        return Err(AnalysisError::UnevenReplications);
    }
    let mut weighted = Vec::with_capacity(reps);
    let mut season_mean = Vec::with_capacity(reps);
    for rep in 0..reps {
        let (mut correct, mut eligible, mut sum) = (0usize, 0usize, 0.0);
        for season in seasons {
            let (c, e) = season[rep];
            if e == 0 {
                return Err(AnalysisError::EmptyInterval(interval));
            }
            correct += c;
            eligible += e;
            sum += c as f64 / e as f64;
        }
        weighted.push(correct as f64 / eligible as f64);
        season_mean.push(sum / seasons.len() as f64);
    }
    Ok((weighted, season_mean))
}

/// [`pool_hits`] over full replication results.
pub fn pooled_accuracies(
    runs: &[&[ReplicationResult]],
    interval: Interval,
) -> Result<(Vec<f64>, Vec<f64>), AnalysisError> {
    let hits: Vec<_> = runs.iter().map(|r| season_hits(r, interval)).collect();
    pool_hits(&hits, interval)
}

/// Season label of the game-weighted multi-season aggregate.
pub const OVERALL: &str = "overall";
/// Season label of the mean-of-seasons aggregate.
pub const OVERALL_SEASON_MEAN: &str = "overall-season-mean";

/// Multi-season aggregate reports: game-weighted first, then season mean.
pub fn overall_accuracy<S: Scalar>(
    runs: &[&[ReplicationResult]],
    config: &SimulationConfig<S>,
    interval: Interval,
) -> Result<[AccuracyReport; 2], AnalysisError> {
    let hits: Vec<_> = runs.iter().map(|r| season_hits(r, interval)).collect();
    overall_from_hits(&hits, config, interval)
}

/// [`overall_accuracy`] from per-season hit counts.
pub fn overall_from_hits<S: Scalar>(
    seasons: &[Vec<(usize, usize)>],
    config: &SimulationConfig<S>,
    interval: Interval,
) -> Result<[AccuracyReport; 2], AnalysisError> {
    let (weighted, season_mean) = pool_hits(seasons, interval)?;
    let reps = weighted.len();
    Ok([
        report(OVERALL, config, interval, mean_ci(&weighted), reps),
        report(OVERALL_SEASON_MEAN, config, interval, mean_ci(&season_mean), reps),
    ])
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WinsDeltaRecord {
    pub season_id: String,
    pub team: TeamId,
    pub real_wins: u32,
    pub rep_index: usize,
    pub sim_wins: u32,
    pub delta: i64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WinsDelta {
    pub records: Vec<WinsDeltaRecord>,
    pub trend_slope: f64,
}

/// Ordinary least-squares slope of `y` on `x`; zero when `x` has no spread.
pub fn ols_slope(points: impl IntoIterator<Item = (f64, f64)> + Clone) -> f64 {
    let (mut n, mut sx, mut sy) = (0.0, 0.0, 0.0);
    for (x, y) in points.clone() {
        n += 1.0;
        sx += x;
        sy += y;
    }
    if n == 0.0 {
        return 0.0;
    }
    let (mx, my) = (sx / n, sy / n);
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in points {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

pub fn trend_slope(records: &[WinsDeltaRecord]) -> f64 {
    ols_slope(records.iter().map(|r| (f64::from(r.real_wins), r.delta as f64)))
}

/// Simulated minus real wins for every (team, replication); records are
/// ordered by team, then replication.
pub fn wins_delta(results: &[ReplicationResult], dataset: &SeasonDataset) -> WinsDelta {
    let real = dataset.real_wins();
    let mut records = Vec::with_capacity(results.len() * real.len());
    for (team, &real_wins) in dataset.teams().iter().zip(&real) {
        for r in results {
            let sim_wins = r.sim_wins.get(team).copied().unwrap_or(0);
            records.push(WinsDeltaRecord {
                season_id: dataset.season_id().to_string(),
                team: team.clone(),
                real_wins,
                rep_index: r.rep_index,
                sim_wins,
                delta: i64::from(sim_wins) - i64::from(real_wins),
            });
        }
    }
    let trend_slope = trend_slope(&records);
    WinsDelta { records, trend_slope }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub window: usize,
    pub method: MethodId,
    pub interval: Interval,
    pub mean_accuracy: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// Accuracy as a function of the rating window, pooled (game-weighted) over
/// the given seasons. The base config's seed is reused for every window.
pub fn sweep_windows<S: Scalar>(
    datasets: &[SeasonDataset],
    base: &SimulationConfig<S>,
    k_values: &[usize],
) -> Result<Vec<SweepPoint>, AnalysisError> {
    if k_values.is_empty() || k_values.contains(&0) || datasets.is_empty() {
        return Err(AnalysisError::BadWindows);
    }
    let ks: BTreeSet<usize> = k_values.iter().copied().collect();
    let mut points = Vec::with_capacity(ks.len() * 2);
    for k in ks {
        let config = SimulationConfig {
            window: WindowPolicy::Last(k),
            ..base.clone()
        };
        let mut complete = Vec::with_capacity(datasets.len());
        let mut second = Vec::with_capacity(datasets.len());
        for d in datasets {
            let results = run_replications(d, &config)?;
            complete.push(season_hits(&results, Interval::Complete));
            second.push(season_hits(&results, Interval::SecondHalf));
        }
        for (interval, hits) in [(Interval::Complete, &complete), (Interval::SecondHalf, &second)] {
            let stats = mean_ci(&pool_hits(hits, interval)?.0);
            points.push(SweepPoint {
                window: k,
                method: base.method,
                interval,
                mean_accuracy: stats.mean,
                ci_low: stats.low,
                ci_high: stats.high,
            });
        }
    }
    Ok(points)
}

/// Seasons won by each side of a comparison; ties count for neither.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComparisonCount {
    pub method_a: MethodId,
    pub method_b: MethodId,
    pub interval: Interval,
    pub wins_a: usize,
    pub wins_b: usize,
    pub ties: usize,
}

/// Counts seasons where each side has strictly higher mean accuracy.
pub fn count_season_wins(a: &[AccuracyReport], b: &[AccuracyReport]) -> Result<(usize, usize, usize), AnalysisError> {
    let seasons = |r: &[AccuracyReport]| r.iter().map(|x| x.season_id.clone()).collect::<Vec<_>>();
    let (sa, sb) = (seasons(a), seasons(b));
    if sa.iter().collect::<BTreeSet<_>>() != sb.iter().collect::<BTreeSet<_>>() || sa.len() != sb.len() {
        return Err(AnalysisError::SeasonMismatch(sa, sb));
    }
    let (mut wa, mut wb, mut ties) = (0, 0, 0);
    for ra in a {
        let rb = b.iter().find(|r| r.season_id == ra.season_id).expect("same season set");
        if ra.mean_accuracy > rb.mean_accuracy {
            wa += 1;
        } else if rb.mean_accuracy > ra.mean_accuracy {
            wb += 1;
        } else {
            ties += 1;
        }
    }
    Ok((wa, wb, ties))
}

/// Runs both configurations of each pair over every season and counts
/// per-season winners for the complete season and the second half.
pub fn compare_methods<S: Scalar>(
    datasets: &[SeasonDataset],
    pairs: &[(SimulationConfig<S>, SimulationConfig<S>)],
) -> Result<Vec<ComparisonCount>, AnalysisError> {
    let mut out = Vec::new();
    for (ca, cb) in pairs {
        if ca.replications != cb.replications || ca.master_seed != cb.master_seed {
            return Err(AnalysisError::MismatchedConfigs);
        }
        let reports = |cfg: &SimulationConfig<S>| -> Result<Vec<[AccuracyReport; 2]>, AnalysisError> {
            datasets
                .iter()
                .map(|d| {
                    let results = run_replications(d, cfg)?;
                    Ok([
                        accuracy(&results, d, cfg, Interval::Complete)?,
                        accuracy(&results, d, cfg, Interval::SecondHalf)?,
                    ])
                })
                .collect()
        };
        let (ra, rb) = (reports(ca)?, reports(cb)?);
        for (slot, interval) in [Interval::Complete, Interval::SecondHalf].into_iter().enumerate() {
            let pick = |r: &[[AccuracyReport; 2]]| r.iter().map(|x| x[slot].clone()).collect::<Vec<_>>();
            let (wins_a, wins_b, ties) = count_season_wins(&pick(&ra), &pick(&rb))?;
            out.push(ComparisonCount {
                method_a: ca.method,
                method_b: cb.method,
                interval,
                wins_a,
                wins_b,
                ties,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::fixtures::{game, team, two_team};
    use crate::domain::Conference;
    use crate::engine::{plan_distributions, GamePrediction};
    use crate::outcome::GameOutcome;

    fn cfg(method: MethodId, reps: usize) -> SimulationConfig<f64> {
        SimulationConfig {
            replications: reps,
            master_seed: 99,
            ..SimulationConfig::new(method)
        }
    }

    fn fake_result(correct: &[bool]) -> ReplicationResult {
        ReplicationResult {
            rep_index: 0,
            predictions: correct
                .iter()
                .map(|&c| GamePrediction {
                    game_id: "g".into(),
                    p_home_win: 1.0,
                    outcome: GameOutcome::HomeWin,
                    correct: c,
                })
                .collect(),
            sim_wins: Default::default(),
        }
    }

    #[test]
    fn interval_boundaries() {
        assert_eq!(Interval::SecondHalf.range(5), 3..5);
        assert_eq!(Interval::FirstHalf.range(5), 0..3);
        assert_eq!(Interval::SecondHalf.range(1230), 615..1230);
        assert_eq!(Interval::SecondHalf.range(1), 1..1);
    }

    #[test]
    fn perfect_replication_has_zero_width_ci() {
        let ds = two_team();
        let r = vec![fake_result(&[true; 4])];
        let rep = accuracy(&r, &ds, &cfg(MethodId::I, 1), Interval::Complete).unwrap();
        assert_eq!((rep.mean_accuracy, rep.ci_low, rep.ci_high), (1.0, 1.0, 1.0));
        assert!(matches!(
            replication_accuracies(&[fake_result(&[true])], Interval::SecondHalf),
            Err(AnalysisError::EmptyInterval(_))
        ));
        assert_eq!(replication_accuracies(&[], Interval::Complete), Err(AnalysisError::NoResults));
    }

    #[test]
    fn complete_is_weighted_mix_of_halves() {
        let ds = two_team();
        let results = run_replications(&ds, &cfg(MethodId::I, 50)).unwrap();
        for r in &results {
            let (cc, ce) = replication_hits(r, Interval::Complete);
            let (fc, fe) = replication_hits(r, Interval::FirstHalf);
            let (sc, se) = replication_hits(r, Interval::SecondHalf);
            assert_eq!((cc, ce), (fc + sc, fe + se));
        }
    }

    #[test]
    fn fixture_expected_accuracy() {
        let ds = two_team();
        let c = cfg(MethodId::Iii, 10_000);
        let results = run_replications(&ds, &c).unwrap();
        let rep = accuracy(&results, &ds, &c, Interval::Complete).unwrap();
        assert!((rep.mean_accuracy - 0.625).abs() <= 0.02, "{}", rep.mean_accuracy);
        assert!(rep.ci_low <= rep.mean_accuracy && rep.mean_accuracy <= rep.ci_high);
    }

    #[test]
    fn deterministic_method_has_zero_width_ci_without_ties() {
        let ds = two_team();
        let c = cfg(MethodId::V, 20);
        let plan = plan_distributions(&ds, &c).unwrap();
        let results = run_replications(&ds, &c).unwrap();
        let rep = accuracy(&results, &ds, &c, Interval::SecondHalf).unwrap();
        let uncertain = plan[2..].iter().any(|d| d.is_uncertain());
        assert_eq!(rep.ci_high - rep.ci_low == 0.0, !uncertain);
    }

    #[test]
    fn ols_matches_brute_force_fit() {
        let pts: Vec<(f64, f64)> = (0..40)
            .map(|i| {
                let x = (i % 13) as f64 * 3.0 + 20.0;
                (x, 0.3 * x - 7.0 + ((i * 7919) % 11) as f64 - 5.0)
            })
            .collect();
        let slope = ols_slope(pts.iter().copied());
        // brute force: for each candidate slope the best intercept is closed form;
        // ternary search the squared error over the slope
        let sse = |b: f64| {
            let a = pts.iter().map(|(x, y)| y - b * x).sum::<f64>() / pts.len() as f64;
            pts.iter().map(|(x, y)| (y - a - b * x).powi(2)).sum::<f64>()
        };
        let (mut lo, mut hi) = (-10.0, 10.0);
        for _ in 0..200 {
            let (m1, m2) = (lo + (hi - lo) / 3.0, hi - (hi - lo) / 3.0);
            if sse(m1) < sse(m2) {
                hi = m2;
            } else {
                lo = m1;
            }
        }
        // the search stalls once sse differences fall below rounding, around 1e-8
        assert!((slope - (lo + hi) / 2.0).abs() < 1e-6);
        // normal equations from raw sums, solved by Cramer's rule
        let n = pts.len() as f64;
        let (sx, sy) = (pts.iter().map(|p| p.0).sum::<f64>(), pts.iter().map(|p| p.1).sum::<f64>());
        let sxx = pts.iter().map(|p| p.0 * p.0).sum::<f64>();
        let sxy = pts.iter().map(|p| p.0 * p.1).sum::<f64>();
        let cramer = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        assert!((slope - cramer).abs() < 1e-9);
        assert_eq!(ols_slope([(1.0, 2.0), (1.0, 5.0)]), 0.0);
    }

    #[test]
    fn wins_delta_on_fixture() {
        let ds = two_team();
        let c = cfg(MethodId::Iii, 400);
        let results = run_replications(&ds, &c).unwrap();
        let wd = wins_delta(&results, &ds);
        assert_eq!(wd.records.len(), 800);
        for r in &results {
            let sum: i64 = wd.records.iter().filter(|x| x.rep_index == r.rep_index).map(|x| x.delta).sum();
            assert_eq!(sum, 0);
        }
        let x: Vec<_> = wd.records.iter().filter(|r| r.team == team("X")).collect();
        let mean_x = x.iter().map(|r| r.delta as f64).sum::<f64>() / x.len() as f64;
        // E[sim X] = 0.5 + 1 + 1 + 1 = 3.5 against 3 real wins
        assert!((mean_x - 0.5).abs() < 0.1);
        // slope equals the fraction of replications where X took game 1
        let x_swept = x.iter().filter(|r| r.sim_wins == 4).count() as f64 / x.len() as f64;
        assert!((wd.trend_slope - x_swept).abs() < 1e-12);
        assert!(wd.trend_slope > 0.0);
    }

    #[test]
    fn perfect_predictor_has_flat_trend() {
        let ds = two_team();
        let mut r = run_replications(&ds, &cfg(MethodId::I, 3)).unwrap();
        for rep in &mut r {
            rep.sim_wins = [(team("X"), 3), (team("Y"), 1)].into_iter().collect();
        }
        let wd = wins_delta(&r, &ds);
        assert!(wd.records.iter().all(|x| x.delta == 0));
        assert_eq!(wd.trend_slope, 0.0);
    }

    #[test]
    fn sweep_dedups_and_matches_unbounded_at_schedule_length() {
        let ds = two_team();
        let c = cfg(MethodId::Iii, 200);
        let pts = sweep_windows(std::slice::from_ref(&ds), &c, &[4, 1, 4]).unwrap();
        assert_eq!(pts.len(), 4);
        assert_eq!(pts.iter().map(|p| p.window).collect::<Vec<_>>(), [1, 1, 4, 4]);
        let results = run_replications(&ds, &c).unwrap();
        let full = accuracy(&results, &ds, &c, Interval::Complete).unwrap();
        assert_eq!(pts[2].mean_accuracy, full.mean_accuracy);
        // window 1 (method iii): game 1 coin flip, game 2 X 0.75 vs Y 0.25,
        // game 3 same, game 4 same -> X predicted, wrong
        assert!((pts[0].mean_accuracy - 0.625).abs() < 0.1);
        assert!(sweep_windows(std::slice::from_ref(&ds), &c, &[]).is_err());
        assert!(sweep_windows(std::slice::from_ref(&ds), &c, &[0]).is_err());
    }

    fn season(id: &str, year: i32, home_wins: [bool; 4]) -> SeasonDataset {
        let games = home_wins
            .iter()
            .enumerate()
            .map(|(i, &hw)| {
                let (h, a) = if i % 2 == 0 { ("X", "Y") } else { ("Y", "X") };
                let mut g = game(&format!("{i}"), 1 + i as u32, h, a, if hw { 100 } else { 90 }, if hw { 90 } else { 100 });
                g.season_id = id.to_string();
                g.date = chrono::NaiveDate::from_ymd_opt(year, 11, 1 + i as u32).unwrap();
                g
            })
            .collect();
        SeasonDataset::builder(id)
            .games(games)
            .conferences([(team("X"), Conference::East), (team("Y"), Conference::West)].into_iter().collect())
            .build()
            .unwrap()
    }

    #[test]
    fn comparisons_count_strict_wins() {
        let ds = vec![two_team()];
        let same = compare_methods(&ds, &[(cfg(MethodId::V, 5), cfg(MethodId::V, 5))]).unwrap();
        assert!(same.iter().all(|c| c.wins_a == 0 && c.wins_b == 0 && c.ties == 1));
        let mismatched = compare_methods(&ds, &[(cfg(MethodId::V, 5), cfg(MethodId::Vi, 6))]);
        assert_eq!(mismatched, Err(AnalysisError::MismatchedConfigs));
    }

    #[test]
    fn hand_built_seasons_split_the_comparison() {
        // Expected accuracies by hand: season A (home always wins) gives
        // (iii) 0.25 and (iv) 0.625; season B gives (iii) 0.5 and (iv) 0.375.
        let a = season("2016-2017", 2016, [true, true, true, true]);
        let b = season("2017-2018", 2017, [true, true, true, false]);
        let run = |m: MethodId, d: &SeasonDataset| {
            let c = cfg(m, 2000);
            accuracy(&run_replications(d, &c).unwrap(), d, &c, Interval::Complete).unwrap()
        };
        let iii = vec![run(MethodId::Iii, &a), run(MethodId::Iii, &b)];
        let iv = vec![run(MethodId::Iv, &a), run(MethodId::Iv, &b)];
        assert_eq!(count_season_wins(&iii, &iv).unwrap(), (1, 1, 0));
        assert!(matches!(count_season_wins(&iii, &iv[..1]), Err(AnalysisError::SeasonMismatch(..))));
    }

    #[test]
    fn overall_reports_both_aggregates() {
        let a = season("2016-2017", 2016, [true, true, true, true]);
        let b = season("2017-2018", 2017, [true, false, false, false]);
        let c = cfg(MethodId::V, 4);
        let ra = run_replications(&a, &c).unwrap();
        let rb = run_replications(&b, &c).unwrap();
        let [w, m] = overall_accuracy(&[&ra, &rb], &c, Interval::Complete).unwrap();
        assert_eq!(w.season_id, OVERALL);
        assert_eq!(m.season_id, OVERALL_SEASON_MEAN);
        // equal game counts: both aggregates agree
        assert!((w.mean_accuracy - m.mean_accuracy).abs() < 1e-12);
        assert_eq!(
            overall_accuracy(&[&ra, &rb[..2]], &c, Interval::Complete).unwrap_err(),
            AnalysisError::UnevenReplications
        );
    }
}
