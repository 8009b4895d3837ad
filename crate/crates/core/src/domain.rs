//! Season data model: teams, games, validated season datasets, and per-team
//! historical views.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use chrono::NaiveDate;
use thiserror::Error;

use crate::ratings::estimate_possessions;

pub const DEFAULT_SCHEDULE_LENGTH: usize = 82;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DomainError {
    #[error("team id must be non-empty")]
    EmptyTeamId,
    #[error("duplicate game_id {0}")]
    DuplicateGameId(String),
    #[error("game {game_id} belongs to season {found}, expected {expected}")]
    SeasonMismatch {
        game_id: String,
        expected: String,
        found: String,
    },
    #[error("game {0}: home and away team are the same")]
    SelfMatch(String),
    #[error("game {0}: tie score, the league has no ties")]
    TieScore(String),
    #[error("game {game_id}: date {date} outside season {season_id}")]
    DateOutOfSeason {
        game_id: String,
        date: NaiveDate,
        season_id: String,
    },
    #[error("unrecognised season id {0:?} (expected YYYY-YYYY or YYYY-YY)")]
    BadSeasonId(String),
    #[error("season {0} has no games")]
    EmptySeason(String),
    #[error("team {0} has no conference entry")]
    MissingConference(TeamId),
    #[error("team {0} has no draft-pick ownership entry")]
    MissingPick(TeamId),
    #[error("team {team}: prior {prior} must lie strictly inside (0,1)")]
    BadPrior { team: TeamId, prior: f64 },
    #[error("team {team} has {found} games, schedule length is {expected}")]
    ScheduleLength {
        team: TeamId,
        expected: usize,
        found: usize,
    },
    #[error("teams play different numbers of games; declare the schedule length")]
    UnevenSchedule,
    #[error("invalid era rules: eliminate rank {eliminate} must exceed classify rank {classify} >= 1")]
    BadEra { classify: usize, eliminate: usize },
    #[error("unknown team {0}")]
    UnknownTeam(TeamId),
    #[error("game index {index} out of range (season has {len} games)")]
    GameIndex { index: usize, len: usize },
    #[error("simulated overlay covers {covered} games, {needed} required")]
    ShortOverlay { covered: usize, needed: usize },
}

/// Franchise code, e.g. `"BOS"`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TeamId(String);

impl TeamId {
    pub fn new(code: impl Into<String>) -> Result<Self, DomainError> {
        let code = code.into();
        let trimmed = code.trim();
        if trimmed.is_empty() {
            return Err(DomainError::EmptyTeamId);
        }
        Ok(TeamId(trimmed.to_string()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for TeamId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for TeamId {
    type Err = DomainError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TeamId::new(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Conference {
    East,
    West,
}

impl Conference {
    pub fn as_str(self) -> &'static str {
        match self {
            Conference::East => "East",
            Conference::West => "West",
        }
    }
}

impl FromStr for Conference {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "east" | "eastern" => Ok(Conference::East),
            "west" | "western" => Ok(Conference::West),
            other => Err(format!("unknown conference {other:?}")),
        }
    }
}

/// Team box-score totals needed to count possessions.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BoxLine {
    pub fga: u32,
    pub fta: u32,
    pub oreb: u32,
    pub tov: u32,
    /// Recorded possession count; overrides estimation when present.
    pub possessions: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GameRecord {
    pub game_id: String,
    pub season_id: String,
    pub date: NaiveDate,
    pub home: TeamId,
    pub away: TeamId,
    pub home_points: u32,
    pub away_points: u32,
    pub home_box: BoxLine,
    pub away_box: BoxLine,
}

impl GameRecord {
    pub fn home_won(&self) -> bool {
        self.home_points > self.away_points
    }

    pub fn winner(&self) -> &TeamId {
        if self.home_won() {
            &self.home
        } else {
            &self.away
        }
    }

    pub fn involves(&self, team: &TeamId) -> bool {
        &self.home == team || &self.away == team
    }

    /// Checks the per-game invariants (distinct teams, no tie).
    pub fn validate(&self) -> Result<(), DomainError> {
        if self.home == self.away {
            return Err(DomainError::SelfMatch(self.game_id.clone()));
        }
        if self.home_points == self.away_points {
            return Err(DomainError::TieScore(self.game_id.clone()));
        }
        Ok(())
    }
}

/// Standings thresholds for clinching and elimination.
///
/// A team is classified when it cannot finish below `classify_rank` and
/// eliminated when it cannot finish above `eliminate_rank`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EraRules {
    classify_rank: usize,
    eliminate_rank: usize,
}

impl EraRules {
    /// Top-8 qualification, used before the play-in tournament.
    pub const EIGHT_SEED: EraRules = EraRules {
        classify_rank: 8,
        eliminate_rank: 9,
    };
    /// Top-6 direct qualification with play-in for seeds 7-10.
    pub const PLAY_IN: EraRules = EraRules {
        classify_rank: 6,
        eliminate_rank: 11,
    };

    pub fn new(classify_rank: usize, eliminate_rank: usize) -> Result<Self, DomainError> {
        if classify_rank < 1 || eliminate_rank <= classify_rank {
            return Err(DomainError::BadEra {
                classify: classify_rank,
                eliminate: eliminate_rank,
            });
        }
        Ok(EraRules {
            classify_rank,
            eliminate_rank,
        })
    }

    /// Default thresholds for a season starting in `start_year`.
    pub fn for_start_year(start_year: i32) -> Self {
        if start_year >= 2020 {
            Self::PLAY_IN
        } else {
            Self::EIGHT_SEED
        }
    }

    pub fn classify_rank(&self) -> usize {
        self.classify_rank
    }

    pub fn eliminate_rank(&self) -> usize {
        self.eliminate_rank
    }
}

/// Parses `"2018-2019"` or `"2018-19"` into `(2018, 2019)`.
pub fn season_years(season_id: &str) -> Result<(i32, i32), DomainError> {
    let bad = || DomainError::BadSeasonId(season_id.to_string());
    let (a, b) = season_id.split_once('-').ok_or_else(bad)?;
    let start: i32 = a.parse().map_err(|_| bad())?;
    if a.len() != 4 {
        return Err(bad());
    }
    let end: i32 = match b.len() {
        4 => b.parse().map_err(|_| bad())?,
        2 => start / 100 * 100 + b.parse::<i32>().map_err(|_| bad())?,
        _ => return Err(bad()),
    };
    if (b.len() == 4 && end != start + 1) || end.rem_euclid(100) != (start + 1).rem_euclid(100) {
        return Err(bad());
    }
    Ok((start, start + 1))
}

/// Sorts games chronologically by `(date, game_id)`.
pub fn order_season(mut games: Vec<GameRecord>) -> Result<Vec<GameRecord>, DomainError> {
    let mut seen = HashSet::with_capacity(games.len());
    for g in &games {
        if !seen.insert(g.game_id.as_str()) {
            return Err(DomainError::DuplicateGameId(g.game_id.clone()));
        }
    }
    games.sort_by(|a, b| a.date.cmp(&b.date).then_with(|| a.game_id.cmp(&b.game_id)));
    Ok(games)
}

/// One validated regular season.
#[derive(Debug, Clone)]
pub struct SeasonDataset {
    season_id: String,
    games: Vec<GameRecord>,
    teams: Vec<TeamId>,
    game_teams: Vec<(usize, usize)>,
    conferences: Vec<Conference>,
    owns_pick: Vec<bool>,
    priors: Option<Vec<f64>>,
    possessions: Vec<(f64, f64)>,
    era: EraRules,
    schedule_length: usize,
    clamped_possessions: usize,
}

impl SeasonDataset {
    pub fn builder(season_id: impl Into<String>) -> SeasonDatasetBuilder {
        SeasonDatasetBuilder {
            season_id: season_id.into(),
            games: Vec::new(),
            conferences: BTreeMap::new(),
            picks: None,
            priors: None,
            era: None,
            schedule_length: None,
        }
    }

    pub fn season_id(&self) -> &str {
        &self.season_id
    }

    pub fn games(&self) -> &[GameRecord] {
        &self.games
    }

    pub fn len(&self) -> usize {
        self.games.len()
    }

    pub fn is_empty(&self) -> bool {
        self.games.is_empty()
    }

    /// Teams in sorted order; positions are the dense team indices.
    pub fn teams(&self) -> &[TeamId] {
        &self.teams
    }

    pub fn team_index(&self, team: &TeamId) -> Option<usize> {
        self.teams.binary_search(team).ok()
    }

    /// Dense `(home, away)` team indices for game `index`.
    pub fn game_teams(&self, index: usize) -> (usize, usize) {
        self.game_teams[index]
    }

    pub fn conference_of(&self, team: usize) -> Conference {
        self.conferences[team]
    }

    pub fn conference(&self, team: &TeamId) -> Option<Conference> {
        self.team_index(team).map(|i| self.conferences[i])
    }

    pub fn owns_pick(&self, team: usize) -> bool {
        self.owns_pick[team]
    }

    /// Per-team prior, when the dataset carries a priors table.
    pub fn prior(&self, team: usize) -> Option<f64> {
        self.priors.as_ref().map(|p| p[team])
    }

    pub fn has_priors(&self) -> bool {
        self.priors.is_some()
    }

    /// `(home, away)` possessions of game `index`, estimated where not recorded.
    pub fn possessions(&self, index: usize) -> (f64, f64) {
        self.possessions[index]
    }

    pub fn era(&self) -> EraRules {
        self.era
    }

    pub fn schedule_length(&self) -> usize {
        self.schedule_length
    }

    /// Number of box lines whose possession estimate was negative and clamped to zero.
    pub fn clamped_possessions(&self) -> usize {
        self.clamped_possessions
    }

    /// Real wins per team (indexed like [`SeasonDataset::teams`]).
    pub fn real_wins(&self) -> Vec<u32> {
        let mut wins = vec![0u32; self.teams.len()];
        for (g, &(h, a)) in self.games.iter().zip(&self.game_teams) {
            wins[if g.home_won() { h } else { a }] += 1;
        }
        wins
    }

    /// Whether the home team won game `index` under `source`.
    pub fn home_won(&self, index: usize, source: &OutcomeSource<'_>) -> bool {
        match source {
            OutcomeSource::Real => self.games[index].home_won(),
            OutcomeSource::Simulated(overlay) => overlay[index],
        }
    }
}

pub struct SeasonDatasetBuilder {
    season_id: String,
    games: Vec<GameRecord>,
    conferences: BTreeMap<TeamId, Conference>,
    picks: Option<BTreeMap<TeamId, bool>>,
    priors: Option<BTreeMap<TeamId, f64>>,
    era: Option<EraRules>,
    schedule_length: Option<usize>,
}

impl SeasonDatasetBuilder {
    pub fn games(mut self, games: Vec<GameRecord>) -> Self {
        self.games = games;
        self
    }

    pub fn conferences(mut self, conferences: BTreeMap<TeamId, Conference>) -> Self {
        self.conferences = conferences;
        self
    }

    /// First-round pick ownership. Without this call every team owns its pick.
    pub fn picks(mut self, picks: BTreeMap<TeamId, bool>) -> Self {
        self.picks = Some(picks);
        self
    }

    pub fn priors(mut self, priors: BTreeMap<TeamId, f64>) -> Self {
        self.priors = Some(priors);
        self
    }

    /// Overrides the era thresholds derived from the season id.
    pub fn era(mut self, era: EraRules) -> Self {
        self.era = Some(era);
        self
    }

    /// Declares the per-team schedule length; inferred from the games otherwise.
    pub fn schedule_length(mut self, len: usize) -> Self {
        self.schedule_length = Some(len);
        self
    }

    pub fn build(self) -> Result<SeasonDataset, DomainError> {
        let (start, end) = season_years(&self.season_id)?;
        if self.games.is_empty() {
            return Err(DomainError::EmptySeason(self.season_id));
        }
        let first_day = NaiveDate::from_ymd_opt(start, 7, 1).expect("valid date");
        let last_day = NaiveDate::from_ymd_opt(end, 9, 30).expect("valid date");
        for g in &self.games {
            if g.season_id != self.season_id {
                return Err(DomainError::SeasonMismatch {
                    game_id: g.game_id.clone(),
                    expected: self.season_id.clone(),
                    found: g.season_id.clone(),
                });
            }
            g.validate()?;
            if g.date < first_day || g.date > last_day {
                return Err(DomainError::DateOutOfSeason {
                    game_id: g.game_id.clone(),
                    date: g.date,
                    season_id: self.season_id.clone(),
                });
            }
        }
        let games = order_season(self.games)?;

        let teams: Vec<TeamId> = games
            .iter()
            .flat_map(|g| [g.home.clone(), g.away.clone()])
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let index = |t: &TeamId| teams.binary_search(t).expect("team collected from games");

        let conferences = teams
            .iter()
            .map(|t| {
                self.conferences
                    .get(t)
                    .copied()
                    .ok_or_else(|| DomainError::MissingConference(t.clone()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let owns_pick = match &self.picks {
            None => vec![true; teams.len()],
            Some(picks) => teams
                .iter()
                .map(|t| {
                    picks
                        .get(t)
                        .copied()
                        .ok_or_else(|| DomainError::MissingPick(t.clone()))
                })
                .collect::<Result<Vec<_>, _>>()?,
        };
        let priors = match &self.priors {
            None => None,
            Some(map) => Some(
                teams
                    .iter()
                    .map(|t| match map.get(t) {
                        Some(&p) if p > 0.0 && p < 1.0 => Ok(p),
                        Some(&p) => Err(DomainError::BadPrior {
                            team: t.clone(),
                            prior: p,
                        }),
                        None => Err(DomainError::BadPrior {
                            team: t.clone(),
                            prior: f64::NAN,
                        }),
                    })
                    .collect::<Result<Vec<_>, _>>()?,
            ),
        };

        let game_teams: Vec<(usize, usize)> =
            games.iter().map(|g| (index(&g.home), index(&g.away))).collect();
        let mut counts = vec![0usize; teams.len()];
        for &(h, a) in &game_teams {
            counts[h] += 1;
            counts[a] += 1;
        }
        let schedule_length = match self.schedule_length {
            Some(len) => len,
            None => {
                let first = counts[0];
                if counts.iter().any(|&c| c != first) {
                    return Err(DomainError::UnevenSchedule);
                }
                first
            }
        };
        if let Some((i, &c)) = counts
            .iter()
            .enumerate()
            .find(|(_, &c)| c != schedule_length)
        {
            return Err(DomainError::ScheduleLength {
                team: teams[i].clone(),
                expected: schedule_length,
                found: c,
            });
        }

        let mut clamped_possessions = 0;
        let possessions = games
            .iter()
            .map(|g| {
                let h = estimate_possessions(&g.home_box);
                let a = estimate_possessions(&g.away_box);
                clamped_possessions += usize::from(h.clamped) + usize::from(a.clamped);
                (h.value, a.value)
            })
            .collect();

        Ok(SeasonDataset {
            era: self.era.unwrap_or_else(|| EraRules::for_start_year(start)),
            season_id: self.season_id,
            games,
            teams,
            game_teams,
            conferences,
            owns_pick,
            priors,
            possessions,
            schedule_length,
            clamped_possessions,
        })
    }
}

/// Where game results come from when building history: the real record, or
/// a simulated overlay holding `home_won` per game index.
#[derive(Debug, Clone, Copy)]
pub enum OutcomeSource<'a> {
    Real,
    Simulated(&'a [bool]),
}

/// One past game from a team's perspective.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistoryEntry {
    pub game_index: usize,
    pub won: bool,
    pub at_home: bool,
    pub points_for: u32,
    pub points_against: u32,
    pub possessions: f64,
}

impl HistoryEntry {
    pub(crate) fn from_game(
        dataset: &SeasonDataset,
        index: usize,
        home_side: bool,
        home_won: bool,
    ) -> Self {
        let g = &dataset.games[index];
        let (hp, ap) = dataset.possessions[index];
        if home_side {
            HistoryEntry {
                game_index: index,
                won: home_won,
                at_home: true,
                points_for: g.home_points,
                points_against: g.away_points,
                possessions: hp,
            }
        } else {
            HistoryEntry {
                game_index: index,
                won: !home_won,
                at_home: false,
                points_for: g.away_points,
                points_against: g.home_points,
                possessions: ap,
            }
        }
    }
}

/// A team's games strictly before some game index, oldest first.
#[derive(Debug, Clone, PartialEq)]
pub struct TeamHistoryView {
    pub team: TeamId,
    pub entries: Vec<HistoryEntry>,
}

impl Deref for TeamHistoryView {
    type Target = [HistoryEntry];

    fn deref(&self) -> &[HistoryEntry] {
        &self.entries
    }
}

pub fn history_before(
    dataset: &SeasonDataset,
    team: &TeamId,
    game_index: usize,
    source: OutcomeSource<'_>,
) -> Result<TeamHistoryView, DomainError> {
    let t = dataset
        .team_index(team)
        .ok_or_else(|| DomainError::UnknownTeam(team.clone()))?;
    if game_index > dataset.len() {
        return Err(DomainError::GameIndex {
            index: game_index,
            len: dataset.len(),
        });
    }
    if let OutcomeSource::Simulated(overlay) = source {
        if overlay.len() < game_index {
            return Err(DomainError::ShortOverlay {
                covered: overlay.len(),
                needed: game_index,
            });
        }
    }
    let entries = (0..game_index)
        .filter_map(|i| {
            let (h, a) = dataset.game_teams[i];
            let home_won = dataset.home_won(i, &source);
            if h == t {
                Some(HistoryEntry::from_game(dataset, i, true, home_won))
            } else if a == t {
                Some(HistoryEntry::from_game(dataset, i, false, home_won))
            } else {
                None
            }
        })
        .collect();
    Ok(TeamHistoryView {
        team: team.clone(),
        entries,
    })
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn same_day_games_break_ties_by_id() {
        let g = vec![game("0022", 1, "X", "Y", 1, 0), game("0021", 1, "Y", "X", 1, 0)];
        let ordered = order_season(g).unwrap();
        assert_eq!(ordered[0].game_id, "0021");
    }

    #[test]
    fn order_is_idempotent_and_sorts_reversed() {
        let sorted = two_team().games().to_vec();
        assert_eq!(order_season(sorted.clone()).unwrap(), sorted);
        let mut reversed = sorted.clone();
        reversed.reverse();
        let ids: Vec<_> = order_season(reversed)
            .unwrap()
            .into_iter()
            .map(|g| g.game_id)
            .collect();
        assert_eq!(ids, ["0001", "0002", "0003", "0004"]);
    }

    #[test]
    fn duplicate_ids_rejected() {
        let g = vec![game("1", 1, "X", "Y", 1, 0), game("1", 2, "Y", "X", 1, 0)];
        assert_eq!(
            order_season(g),
            Err(DomainError::DuplicateGameId("1".into()))
        );
    }

    #[test]
    fn history_is_strictly_before_index() {
        let ds = two_team();
        let x = team("X");
        assert!(history_before(&ds, &x, 0, OutcomeSource::Real).unwrap().is_empty());
        let view = history_before(&ds, &x, 3, OutcomeSource::Real).unwrap();
        let won: Vec<_> = view.iter().map(|e| e.won).collect();
        assert_eq!(won, [true, true, true]);
        let home: Vec<_> = view.iter().map(|e| e.at_home).collect();
        assert_eq!(home, [true, false, true]);
    }

    #[test]
    fn simulated_overlay_replaces_won_flags() {
        let ds = two_team();
        // game index 1 (Y home): simulated home win for Y instead of X's real win
        let overlay = [true, true, true, false];
        let view = history_before(&ds, &team("X"), 3, OutcomeSource::Simulated(&overlay)).unwrap();
        let won: Vec<_> = view.iter().map(|e| e.won).collect();
        assert_eq!(won, [true, false, true]);
        // points are always the real ones
        assert_eq!(view[1].points_for, 101);
    }

    #[test]
    fn history_errors() {
        let ds = two_team();
        assert!(matches!(
            history_before(&ds, &team("Z"), 0, OutcomeSource::Real),
            Err(DomainError::UnknownTeam(_))
        ));
        assert!(matches!(
            history_before(&ds, &team("X"), 5, OutcomeSource::Real),
            Err(DomainError::GameIndex { .. })
        ));
        assert!(matches!(
            history_before(&ds, &team("X"), 3, OutcomeSource::Simulated(&[true])),
            Err(DomainError::ShortOverlay { .. })
        ));
    }

    #[test]
    fn builder_validates() {
        let conf: BTreeMap<_, _> = [(team("X"), Conference::East)].into_iter().collect();
        let err = SeasonDataset::builder("2018-2019")
            .games(vec![game("1", 1, "X", "Y", 1, 0), game("2", 2, "Y", "X", 1, 0)])
            .conferences(conf.clone())
            .build()
            .unwrap_err();
        assert_eq!(err, DomainError::MissingConference(team("Y")));

        let err = SeasonDataset::builder("2018-2019")
            .games(vec![game("1", 1, "X", "X", 1, 0)])
            .conferences(conf.clone())
            .build()
            .unwrap_err();
        assert_eq!(err, DomainError::SelfMatch("1".into()));

        let err = SeasonDataset::builder("2018-2019")
            .games(vec![game("1", 1, "X", "Y", 2, 2)])
            .build()
            .unwrap_err();
        assert_eq!(err, DomainError::TieScore("1".into()));
    }

    #[test]
    fn schedule_length_checked() {
        let conf: BTreeMap<_, _> = ["X", "Y", "Z"]
            .into_iter()
            .map(|t| (team(t), Conference::West))
            .collect();
        let games = vec![game("1", 1, "X", "Y", 1, 0), game("2", 2, "Y", "Z", 1, 0)];
        let err = SeasonDataset::builder("2018-2019")
            .games(games.clone())
            .conferences(conf.clone())
            .build()
            .unwrap_err();
        assert_eq!(err, DomainError::UnevenSchedule);
        let err = SeasonDataset::builder("2018-2019")
            .games(games)
            .conferences(conf)
            .schedule_length(2)
            .build()
            .unwrap_err();
        assert!(matches!(err, DomainError::ScheduleLength { found: 1, .. }));
    }

    #[test]
    fn era_defaults_follow_season() {
        assert_eq!(EraRules::for_start_year(2018), EraRules::EIGHT_SEED);
        assert_eq!(EraRules::for_start_year(2020), EraRules::PLAY_IN);
        assert_eq!(two_team().era(), EraRules::EIGHT_SEED);
        assert!(EraRules::new(6, 6).is_err());
        assert!(EraRules::new(0, 3).is_err());
    }

    #[test]
    fn season_ids_parse() {
        assert_eq!(season_years("2020-2021").unwrap(), (2020, 2021));
        assert_eq!(season_years("2020-21").unwrap(), (2020, 2021));
        assert_eq!(season_years("1999-00").unwrap(), (1999, 2000));
        assert!(season_years("2020").is_err());
        assert!(season_years("2020-2022").is_err());
    }

    #[test]
    fn point_differential_sums_to_zero() {
        let ds = two_team();
        let total: i64 = ds
            .teams()
            .iter()
            .flat_map(|t| history_before(&ds, t, ds.len(), OutcomeSource::Real).unwrap().entries)
            .map(|e| e.points_for as i64 - e.points_against as i64)
            .sum();
        assert_eq!(total, 0);
    }
}
