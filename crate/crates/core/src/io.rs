//! CSV ingestion and report emission.
//!
//! A data directory holds `games.csv`, `teams.csv` and `picks.csv`, plus the
//! optional `priors.csv` and `era.csv`. Reports are written as
//! `accuracy.csv`, `wins_delta.csv`, `sweep.csv` and `compare.csv` with
//! reals in fixed 6-decimal notation so identical runs give identical bytes.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use csv::StringRecord;
use thiserror::Error;

use crate::analysis::{AccuracyReport, ComparisonCount, Interval, SweepPoint, WinsDeltaRecord};
use crate::domain::{BoxLine, Conference, DomainError, EraRules, GameRecord, SeasonDataset, TeamId};

pub const GAMES_COLUMNS: [&str; 17] = [
    "season_id", "game_id", "date", "home_team", "away_team", "home_pts", "away_pts", "home_fga",
    "home_fta", "home_oreb", "home_tov", "away_fga", "away_fta", "away_oreb", "away_tov",
    "home_poss", "away_poss",
];
pub const TEAMS_COLUMNS: [&str; 2] = ["team", "conference"];
pub const PICKS_COLUMNS: [&str; 3] = ["season_id", "team", "owns_first_round_pick"];
pub const PRIORS_COLUMNS: [&str; 3] = ["season_id", "team", "prior"];
pub const ERA_COLUMNS: [&str; 3] = ["season_id", "classify_rank", "eliminate_rank"];
pub const ACCURACY_COLUMNS: [&str; 9] = [
    "season_id", "method", "model", "mode", "interval", "mean_accuracy", "ci_low", "ci_high",
    "replications",
];
pub const WINS_DELTA_COLUMNS: [&str; 6] = ["season_id", "team", "real_wins", "rep", "sim_wins", "delta"];
pub const SWEEP_COLUMNS: [&str; 6] = ["window", "method", "interval", "mean_accuracy", "ci_low", "ci_high"];
pub const COMPARE_COLUMNS: [&str; 6] = ["method_a", "method_b", "interval", "wins_a", "wins_b", "ties"];

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:1: missing column(s) {missing:?}")]
    MissingColumn { path: PathBuf, missing: Vec<String> },
    #[error("{path}:1: header must be exactly {expected:?}, found {found:?}")]
    BadHeader {
        path: PathBuf,
        expected: Vec<String>,
        found: Vec<String>,
    },
    #[error("{path}:{line}: {message}")]
    Malformed {
        path: PathBuf,
        line: u64,
        message: String,
    },
    #[error("{path}:{line}: game {game_id} ends in a tie, which the league does not allow")]
    TieScore {
        path: PathBuf,
        line: u64,
        game_id: String,
    },
    #[error("{path}:{line}: duplicate game_id {game_id}")]
    DuplicateGameId {
        path: PathBuf,
        line: u64,
        game_id: String,
    },
    #[error("{path}:{line}: unknown conference token {token:?}")]
    UnknownConference {
        path: PathBuf,
        line: u64,
        token: String,
    },
    #[error("{path}:{line}: prior {value} for team {team} must lie strictly inside (0,1)")]
    BadPrior {
        path: PathBuf,
        line: u64,
        team: String,
        value: f64,
    },
    #[error("{path}: season {season_id}: no row for team {team}")]
    MissingTeamRow {
        path: PathBuf,
        season_id: String,
        team: TeamId,
    },
    #[error("{path}: season {season_id}: {source}")]
    Dataset {
        path: PathBuf,
        season_id: String,
        #[source]
        source: DomainError,
    },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> IoError + '_ {
    move |source| IoError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_err(path: &Path, line: u64, err: csv::Error) -> IoError {
    match err.into_kind() {
        csv::ErrorKind::Io(source) => IoError::Io {
            path: path.to_path_buf(),
            source,
        },
        other => IoError::Malformed {
            path: path.to_path_buf(),
            line,
            message: format!("{other:?}"),
        },
    }
}

/// Reads a CSV whose header must equal `columns`, yielding `(line, record)`.
fn read_table(path: &Path, columns: &[&str]) -> Result<Vec<(u64, StringRecord)>, IoError> {
    let file = fs::File::open(path).map_err(io_err(path))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(file);
    let header = reader.headers().map_err(|e| csv_err(path, 1, e))?.clone();
    let found: Vec<String> = header.iter().map(str::to_string).collect();
    let missing: Vec<String> = columns
        .iter()
        .filter(|c| !found.iter().any(|f| f == *c))
        .map(|c| c.to_string())
        .collect();
    if !missing.is_empty() {
        return Err(IoError::MissingColumn {
            path: path.to_path_buf(),
            missing,
        });
    }
    if found != columns {
        return Err(IoError::BadHeader {
            path: path.to_path_buf(),
            expected: columns.iter().map(|c| c.to_string()).collect(),
            found,
        });
    }
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            csv_err(path, line, e)
        })?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        if rec.len() != columns.len() {
            return Err(IoError::Malformed {
                path: path.to_path_buf(),
                line,
                message: format!("expected {} fields, found {}", columns.len(), rec.len()),
            });
        }
        rows.push((line, rec));
    }
    Ok(rows)
}

struct Row<'a> {
    path: &'a Path,
    line: u64,
    rec: &'a StringRecord,
    columns: &'a [&'a str],
}

impl Row<'_> {
    fn str(&self, col: usize) -> &str {
        &self.rec[col]
    }

    fn malformed(&self, col: usize, what: &str) -> IoError {
        IoError::Malformed {
            path: self.path.to_path_buf(),
            line: self.line,
            message: format!("column {}: {what} (got {:?})", self.columns[col], self.str(col)),
        }
    }

    fn parse<T: std::str::FromStr>(&self, col: usize, what: &str) -> Result<T, IoError> {
        self.str(col).parse().map_err(|_| self.malformed(col, what))
    }

    fn team(&self, col: usize) -> Result<TeamId, IoError> {
        TeamId::new(self.str(col)).map_err(|_| self.malformed(col, "empty team id"))
    }

    fn count(&self, col: usize) -> Result<u32, IoError> {
        self.parse(col, "expected a non-negative integer")
    }

    fn optional_real(&self, col: usize) -> Result<Option<f64>, IoError> {
        let s = self.str(col);
        if s.is_empty() {
            return Ok(None);
        }
        match s.parse::<f64>() {
            Ok(v) if v.is_finite() && v >= 0.0 => Ok(Some(v)),
            _ => Err(self.malformed(col, "expected a non-negative real or empty")),
        }
    }

    fn boolean(&self, col: usize) -> Result<bool, IoError> {
        match self.str(col).to_ascii_lowercase().as_str() {
            "true" => Ok(true),
            "false" => Ok(false),
            _ => Err(self.malformed(col, "expected true or false")),
        }
    }
}

fn rows<'a>(path: &'a Path, columns: &'a [&'a str], table: &'a [(u64, StringRecord)]) -> impl Iterator<Item = Row<'a>> {
    table.iter().map(move |(line, rec)| Row {
        path,
        line: *line,
        rec,
        columns,
    })
}

/// Games in file order.
pub fn parse_games_csv(path: &Path) -> Result<Vec<GameRecord>, IoError> {
    let table = read_table(path, &GAMES_COLUMNS)?;
    let mut seen: HashMap<String, u64> = HashMap::new();
    let mut games = Vec::with_capacity(table.len());
    for row in rows(path, &GAMES_COLUMNS, &table) {
        let game_id = row.str(1).to_string();
        if game_id.is_empty() {
            return Err(row.malformed(1, "empty game id"));
        }
        let date = NaiveDate::parse_from_str(row.str(2), "%Y-%m-%d")
            .map_err(|_| row.malformed(2, "expected an ISO-8601 date YYYY-MM-DD"))?;
        let game = GameRecord {
            season_id: row.str(0).to_string(),
            game_id: game_id.clone(),
            date,
            home: row.team(3)?,
            away: row.team(4)?,
            home_points: row.count(5)?,
            away_points: row.count(6)?,
            home_box: BoxLine {
                fga: row.count(7)?,
                fta: row.count(8)?,
                oreb: row.count(9)?,
                tov: row.count(10)?,
                possessions: row.optional_real(15)?,
            },
            away_box: BoxLine {
                fga: row.count(11)?,
                fta: row.count(12)?,
                oreb: row.count(13)?,
                tov: row.count(14)?,
                possessions: row.optional_real(16)?,
            },
        };
        if game.home_points == game.away_points {
            return Err(IoError::TieScore {
                path: path.to_path_buf(),
                line: row.line,
                game_id,
            });
        }
        if game.home == game.away {
            return Err(row.malformed(4, "away team equals home team"));
        }
        if seen.insert(game_id.clone(), row.line).is_some() {
            return Err(IoError::DuplicateGameId {
                path: path.to_path_buf(),
                line: row.line,
                game_id,
            });
        }
        games.push(game);
    }
    Ok(games)
}

pub fn parse_teams_csv(path: &Path) -> Result<BTreeMap<TeamId, Conference>, IoError> {
    let table = read_table(path, &TEAMS_COLUMNS)?;
    let mut out = BTreeMap::new();
    for row in rows(path, &TEAMS_COLUMNS, &table) {
        let conference = row.str(1).parse().map_err(|_| IoError::UnknownConference {
            path: path.to_path_buf(),
            line: row.line,
            token: row.str(1).to_string(),
        })?;
        out.insert(row.team(0)?, conference);
    }
    Ok(out)
}

/// Season id → team → owns its first-round pick.
pub fn parse_picks_csv(path: &Path) -> Result<BTreeMap<String, BTreeMap<TeamId, bool>>, IoError> {
    let table = read_table(path, &PICKS_COLUMNS)?;
    let mut out: BTreeMap<String, BTreeMap<TeamId, bool>> = BTreeMap::new();
    for row in rows(path, &PICKS_COLUMNS, &table) {
        out.entry(row.str(0).to_string())
            .or_default()
            .insert(row.team(1)?, row.boolean(2)?);
    }
    Ok(out)
}

/// Season id → team → prior in (0,1).
pub fn parse_priors_csv(path: &Path) -> Result<BTreeMap<String, BTreeMap<TeamId, f64>>, IoError> {
    let table = read_table(path, &PRIORS_COLUMNS)?;
    let mut out: BTreeMap<String, BTreeMap<TeamId, f64>> = BTreeMap::new();
    for row in rows(path, &PRIORS_COLUMNS, &table) {
        let value: f64 = row.parse(2, "expected a real number")?;
        if !(value > 0.0 && value < 1.0) {
            return Err(IoError::BadPrior {
                path: path.to_path_buf(),
                line: row.line,
                team: row.str(1).to_string(),
                value,
            });
        }
        out.entry(row.str(0).to_string()).or_default().insert(row.team(1)?, value);
    }
    Ok(out)
}

/// Season id → era thresholds overriding the defaults.
pub fn parse_era_csv(path: &Path) -> Result<BTreeMap<String, EraRules>, IoError> {
    let table = read_table(path, &ERA_COLUMNS)?;
    let mut out = BTreeMap::new();
    for row in rows(path, &ERA_COLUMNS, &table) {
        let classify: usize = row.parse(1, "expected a positive integer")?;
        let eliminate: usize = row.parse(2, "expected a positive integer")?;
        let era = EraRules::new(classify, eliminate).map_err(|e| IoError::Malformed {
            path: path.to_path_buf(),
            line: row.line,
            message: e.to_string(),
        })?;
        out.insert(row.str(0).to_string(), era);
    }
    Ok(out)
}

/// All seasons found in one data directory.
#[derive(Debug, Clone)]
pub struct DatasetBundle {
    pub dir: PathBuf,
    /// Seasons sorted by id.
    pub seasons: Vec<SeasonDataset>,
    /// Non-fatal findings, e.g. clamped possession estimates.
    pub warnings: Vec<String>,
    /// Informational notes, e.g. how many possession counts were estimated.
    pub notes: Vec<String>,
}

impl DatasetBundle {
    pub fn season(&self, id: &str) -> Option<&SeasonDataset> {
        self.seasons.iter().find(|s| s.season_id() == id)
    }
}

pub fn load_bundle(dir: &Path) -> Result<DatasetBundle, IoError> {
    let games_path = dir.join("games.csv");
    let picks_path = dir.join("picks.csv");
    let priors_path = dir.join("priors.csv");
    let games = parse_games_csv(&games_path)?;
    let conferences = parse_teams_csv(&dir.join("teams.csv"))?;
    let picks = parse_picks_csv(&picks_path)?;
    let priors = if priors_path.exists() {
        Some(parse_priors_csv(&priors_path)?)
    } else {
        None
    };
    let era_path = dir.join("era.csv");
    let eras = if era_path.exists() {
        parse_era_csv(&era_path)?
    } else {
        BTreeMap::new()
    };

    let mut by_season: BTreeMap<String, Vec<GameRecord>> = BTreeMap::new();
    for g in games {
        by_season.entry(g.season_id.clone()).or_default().push(g);
    }

    let mut seasons = Vec::with_capacity(by_season.len());
    let mut warnings = Vec::new();
    let mut notes = Vec::new();
    for (season_id, games) in by_season {
        let mut teams: Vec<TeamId> = games.iter().flat_map(|g| [g.home.clone(), g.away.clone()]).collect();
        teams.sort();
        teams.dedup();
        let estimated = games
            .iter()
            .flat_map(|g| [&g.home_box, &g.away_box])
            .filter(|b| b.possessions.is_none())
            .count();

        let season_picks = picks.get(&season_id);
        let mut pick_map = BTreeMap::new();
        for t in &teams {
            let owns = season_picks.and_then(|p| p.get(t)).copied().ok_or_else(|| IoError::MissingTeamRow {
                path: picks_path.clone(),
                season_id: season_id.clone(),
                team: t.clone(),
            })?;
            pick_map.insert(t.clone(), owns);
        }

        let mut builder = SeasonDataset::builder(season_id.clone())
            .games(games)
            .conferences(conferences.clone())
            .picks(pick_map);
        if let Some(season_priors) = priors.as_ref().and_then(|p| p.get(&season_id)) {
            if let Some(t) = teams.iter().find(|t| !season_priors.contains_key(*t)) {
                return Err(IoError::MissingTeamRow {
                    path: priors_path.clone(),
                    season_id: season_id.clone(),
                    team: t.clone(),
                });
            }
            builder = builder.priors(season_priors.clone());
        }
        if let Some(era) = eras.get(&season_id) {
            builder = builder.era(*era);
        }
        let dataset = builder.build().map_err(|source| IoError::Dataset {
            path: games_path.clone(),
            season_id: season_id.clone(),
            source,
        })?;
        if dataset.clamped_possessions() > 0 {
            warnings.push(format!(
                "season {season_id}: {} box lines had a negative possession estimate, clamped to 0",
                dataset.clamped_possessions()
            ));
        }
        if estimated > 0 {
            notes.push(format!(
                "season {season_id}: {estimated} of {} box lines use estimated possessions",
                2 * dataset.len()
            ));
        }
        seasons.push(dataset);
    }
    Ok(DatasetBundle {
        dir: dir.to_path_buf(),
        seasons,
        warnings,
        notes,
    })
}

fn fixed(v: f64) -> String {
    format!("{v:.6}")
}

fn write_table(path: &Path, columns: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<(), IoError> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(|e| csv_err(path, 0, e))?;
    writer.write_record(columns).map_err(|e| csv_err(path, 0, e))?;
    for row in rows {
        writer.write_record(&row).map_err(|e| csv_err(path, 0, e))?;
    }
    writer.flush().map_err(io_err(path))
}

pub fn write_games_csv(path: &Path, games: &[GameRecord]) -> Result<(), IoError> {
    let poss = |p: Option<f64>| p.map(|v| v.to_string()).unwrap_or_default();
    write_table(
        path,
        &GAMES_COLUMNS,
        games.iter().map(|g| {
            vec![
                g.season_id.clone(),
                g.game_id.clone(),
                g.date.format("%Y-%m-%d").to_string(),
                g.home.to_string(),
                g.away.to_string(),
                g.home_points.to_string(),
                g.away_points.to_string(),
                g.home_box.fga.to_string(),
                g.home_box.fta.to_string(),
                g.home_box.oreb.to_string(),
                g.home_box.tov.to_string(),
                g.away_box.fga.to_string(),
                g.away_box.fta.to_string(),
                g.away_box.oreb.to_string(),
                g.away_box.tov.to_string(),
                poss(g.home_box.possessions),
                poss(g.away_box.possessions),
            ]
        }),
    )
}

pub fn write_accuracy_csv(path: &Path, reports: &[AccuracyReport]) -> Result<(), IoError> {
    write_table(
        path,
        &ACCURACY_COLUMNS,
        reports.iter().map(|r| {
            vec![
                r.season_id.clone(),
                r.method.to_string(),
                r.model.to_string(),
                r.mode.to_string(),
                r.interval.to_string(),
                fixed(r.mean_accuracy),
                fixed(r.ci_low),
                fixed(r.ci_high),
                r.replications.to_string(),
            ]
        }),
    )
}

pub fn write_wins_delta_csv(path: &Path, records: &[WinsDeltaRecord]) -> Result<(), IoError> {
    write_table(
        path,
        &WINS_DELTA_COLUMNS,
        records.iter().map(|r| {
            vec![
                r.season_id.clone(),
                r.team.to_string(),
                r.real_wins.to_string(),
                r.rep_index.to_string(),
                r.sim_wins.to_string(),
                r.delta.to_string(),
            ]
        }),
    )
}

pub fn write_sweep_csv(path: &Path, points: &[SweepPoint]) -> Result<(), IoError> {
    write_table(
        path,
        &SWEEP_COLUMNS,
        points.iter().map(|p| {
            vec![
                p.window.to_string(),
                p.method.to_string(),
                p.interval.to_string(),
                fixed(p.mean_accuracy),
                fixed(p.ci_low),
                fixed(p.ci_high),
            ]
        }),
    )
}

pub fn write_compare_csv(path: &Path, counts: &[ComparisonCount]) -> Result<(), IoError> {
    write_table(
        path,
        &COMPARE_COLUMNS,
        counts.iter().map(|c| {
            vec![
                c.method_a.to_string(),
                c.method_b.to_string(),
                c.interval.to_string(),
                c.wins_a.to_string(),
                c.wins_b.to_string(),
                c.ties.to_string(),
            ]
        }),
    )
}

/// Report tables to emit; `None` skips the file, an empty list writes a header-only file.
#[derive(Debug, Clone, Default)]
pub struct ReportSet {
    pub accuracy: Option<Vec<AccuracyReport>>,
    pub wins_delta: Option<Vec<WinsDeltaRecord>>,
    pub sweep: Option<Vec<SweepPoint>>,
    pub compare: Option<Vec<ComparisonCount>>,
}

impl ReportSet {
    /// All three primary tables present but empty.
    pub fn empty() -> Self {
        ReportSet {
            accuracy: Some(Vec::new()),
            wins_delta: Some(Vec::new()),
            sweep: Some(Vec::new()),
            compare: None,
        }
    }
}

pub fn emit_reports(reports: &ReportSet, out_dir: &Path) -> Result<Vec<PathBuf>, IoError> {
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let mut written = Vec::new();
    if let Some(r) = &reports.accuracy {
        let p = out_dir.join("accuracy.csv");
        write_accuracy_csv(&p, r)?;
        written.push(p);
    }
    if let Some(r) = &reports.wins_delta {
        let p = out_dir.join("wins_delta.csv");
        write_wins_delta_csv(&p, r)?;
        written.push(p);
    }
    if let Some(r) = &reports.sweep {
        let p = out_dir.join("sweep.csv");
        write_sweep_csv(&p, r)?;
        written.push(p);
    }
    if let Some(r) = &reports.compare {
        let p = out_dir.join("compare.csv");
        write_compare_csv(&p, r)?;
        written.push(p);
    }
    Ok(written)
}

pub fn read_accuracy_csv(path: &Path) -> Result<Vec<AccuracyReport>, IoError> {
    let table = read_table(path, &ACCURACY_COLUMNS)?;
    rows(path, &ACCURACY_COLUMNS, &table)
        .map(|row| {
            Ok(AccuracyReport {
                season_id: row.str(0).to_string(),
                method: row.parse(1, "unknown method")?,
                model: row.parse(2, "unknown model")?,
                mode: row.parse(3, "unknown mode")?,
                interval: row.parse::<Interval>(4, "unknown interval")?,
                mean_accuracy: row.parse(5, "expected a real")?,
                ci_low: row.parse(6, "expected a real")?,
                ci_high: row.parse(7, "expected a real")?,
                replications: row.parse(8, "expected an integer")?,
            })
        })
        .collect()
}

pub fn read_wins_delta_csv(path: &Path) -> Result<Vec<WinsDeltaRecord>, IoError> {
    let table = read_table(path, &WINS_DELTA_COLUMNS)?;
    rows(path, &WINS_DELTA_COLUMNS, &table)
        .map(|row| {
            Ok(WinsDeltaRecord {
                season_id: row.str(0).to_string(),
                team: row.team(1)?,
                real_wins: row.count(2)?,
                rep_index: row.parse(3, "expected an integer")?,
                sim_wins: row.count(4)?,
                delta: row.parse(5, "expected an integer")?,
            })
        })
        .collect()
}

pub fn read_sweep_csv(path: &Path) -> Result<Vec<SweepPoint>, IoError> {
    let table = read_table(path, &SWEEP_COLUMNS)?;
    rows(path, &SWEEP_COLUMNS, &table)
        .map(|row| {
            Ok(SweepPoint {
                window: row.parse(0, "expected an integer")?,
                method: row.parse(1, "unknown method")?,
                interval: row.parse::<Interval>(2, "unknown interval")?,
                mean_accuracy: row.parse(3, "expected a real")?,
                ci_low: row.parse(4, "expected a real")?,
                ci_high: row.parse(5, "expected a real")?,
            })
        })
        .collect()
}

pub fn read_compare_csv(path: &Path) -> Result<Vec<ComparisonCount>, IoError> {
    let table = read_table(path, &COMPARE_COLUMNS)?;
    rows(path, &COMPARE_COLUMNS, &table)
        .map(|row| {
            Ok(ComparisonCount {
                method_a: row.parse(0, "unknown method")?,
                method_b: row.parse(1, "unknown method")?,
                interval: row.parse::<Interval>(2, "unknown interval")?,
                wins_a: row.parse(3, "expected an integer")?,
                wins_b: row.parse(4, "expected an integer")?,
                ties: row.parse(5, "expected an integer")?,
            })
        })
        .collect()
}

/// Writes `text` to `path`, creating parent directories.
pub fn write_text(path: &Path, text: &str) -> Result<(), IoError> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(io_err(parent))?;
    }
    let mut f = fs::File::create(path).map_err(io_err(path))?;
    f.write_all(text.as_bytes()).map_err(io_err(path))
}
