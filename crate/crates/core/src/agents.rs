//! Team-agent reasoning for the extended model: standings, playoff status,
//! and the tanking/resting rating adjustments.
//!
//! Playoff status uses counting bounds on final win totals rather than exact
//! schedule-coupled elimination. For the evaluated team T with `w` current
//! wins and `r` games left, and every other conference team X:
//!
//! * T is classified when fewer than `classify_rank` teams can still finish
//!   with more wins than `w` (i.e. `wins(X) + remaining(X) > w`).
//! * T is eliminated when at least `eliminate_rank - 1` teams already have
//!   more wins than T can reach (`wins(X) > w + r`).
//!
//! Equal win totals are resolved in T's favour in both checks.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::domain::{Conference, DomainError, EraRules, OutcomeSource, SeasonDataset, TeamId};
use crate::ratings::{Rating, Statistic};
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AgentError {
    #[error("team {0} not in standings")]
    UnknownTeam(TeamId),
    #[error(transparent)]
    Domain(#[from] DomainError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StandingsRow {
    pub team: TeamId,
    pub wins: u32,
    pub losses: u32,
    pub remaining: u32,
}

impl StandingsRow {
    pub fn max_wins(&self) -> u32 {
        self.wins + self.remaining
    }
}

/// Conference tables, each sorted by wins descending (team id breaks ties).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct StandingsSnapshot {
    pub conferences: BTreeMap<Conference, Vec<StandingsRow>>,
}

impl StandingsSnapshot {
    pub fn row(&self, team: &TeamId) -> Option<(Conference, &StandingsRow)> {
        self.conferences
            .iter()
            .find_map(|(c, rows)| rows.iter().find(|r| &r.team == team).map(|r| (*c, r)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PlayoffStatus {
    Classified,
    Contending,
    Eliminated,
}

/// Strength of the tanking and resting adjustments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IncentiveParams<S> {
    /// Multiplier applied to win-percentage ratings, in (0, 1].
    pub win_pct_factor: S,
    /// Amount subtracted from net ratings.
    pub net_rating_decrement: S,
    /// Classified teams rest once at most this many games remain after the current one.
    pub rest_trigger_remaining: u32,
}

impl<S: Scalar> Default for IncentiveParams<S> {
    fn default() -> Self {
        IncentiveParams {
            win_pct_factor: S::half(),
            net_rating_decrement: S::lit(5.0),
            rest_trigger_remaining: 3,
        }
    }
}

impl<S: Scalar> IncentiveParams<S> {
    /// Parameters under which no adjustment changes a rating.
    pub fn neutral() -> Self {
        IncentiveParams {
            win_pct_factor: S::one(),
            net_rating_decrement: S::zero(),
            rest_trigger_remaining: 0,
        }
    }

    pub fn is_valid(&self) -> bool {
        self.win_pct_factor > S::zero()
            && self.win_pct_factor <= S::one()
            && self.net_rating_decrement >= S::zero()
    }
}

/// Win/loss counts per team from the games before `game_index`.
///
/// Counts are indexed like [`SeasonDataset::teams`].
pub fn win_loss_counts(
    dataset: &SeasonDataset,
    game_index: usize,
    source: OutcomeSource<'_>,
) -> Result<(Vec<u32>, Vec<u32>), DomainError> {
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
    let n = dataset.teams().len();
    let (mut wins, mut losses) = (vec![0u32; n], vec![0u32; n]);
    for i in 0..game_index {
        let (h, a) = dataset.game_teams(i);
        let (w, l) = if dataset.home_won(i, &source) { (h, a) } else { (a, h) };
        wins[w] += 1;
        losses[l] += 1;
    }
    Ok((wins, losses))
}

pub fn compute_standings(
    dataset: &SeasonDataset,
    game_index: usize,
    source: OutcomeSource<'_>,
) -> Result<StandingsSnapshot, DomainError> {
    let (wins, losses) = win_loss_counts(dataset, game_index, source)?;
    let schedule = dataset.schedule_length() as u32;
    let mut conferences: BTreeMap<Conference, Vec<StandingsRow>> = BTreeMap::new();
    for (i, team) in dataset.teams().iter().enumerate() {
        conferences
            .entry(dataset.conference_of(i))
            .or_default()
            .push(StandingsRow {
                team: team.clone(),
                wins: wins[i],
                losses: losses[i],
                remaining: schedule - wins[i] - losses[i],
            });
    }
    for rows in conferences.values_mut() {
        rows.sort_by(|a, b| b.wins.cmp(&a.wins).then_with(|| a.team.cmp(&b.team)));
    }
    Ok(StandingsSnapshot { conferences })
}

/// Status from raw counts: the team's `(wins, remaining)` and each other
/// conference team's `(wins, remaining)`.
pub fn status_from_counts(
    team: (u32, u32),
    rivals: impl IntoIterator<Item = (u32, u32)>,
    era: EraRules,
) -> PlayoffStatus {
    let (wins, remaining) = team;
    let best_case = wins + remaining;
    let (mut can_pass, mut already_above) = (0usize, 0usize);
    for (w, r) in rivals {
        if w + r > wins {
            can_pass += 1;
        }
        if w > best_case {
            already_above += 1;
        }
    }
    if can_pass < era.classify_rank() {
        PlayoffStatus::Classified
    } else if already_above + 1 >= era.eliminate_rank() {
        PlayoffStatus::Eliminated
    } else {
        PlayoffStatus::Contending
    }
}

pub fn playoff_status(
    team: &TeamId,
    snapshot: &StandingsSnapshot,
    era: EraRules,
) -> Result<PlayoffStatus, AgentError> {
    let (conf, row) = snapshot
        .row(team)
        .ok_or_else(|| AgentError::UnknownTeam(team.clone()))?;
    let rivals = snapshot.conferences[&conf]
        .iter()
        .filter(|r| &r.team != team)
        .map(|r| (r.wins, r.remaining));
    Ok(status_from_counts((row.wins, row.remaining), rivals, era))
}

/// Whether a tanking or resting incentive is active for the team.
///
/// `remaining` counts games strictly after the one being predicted.
pub fn incentive_active<S: Scalar>(
    status: PlayoffStatus,
    owns_pick: bool,
    remaining: u32,
    params: &IncentiveParams<S>,
) -> bool {
    let tanking = status == PlayoffStatus::Eliminated && owns_pick;
    let resting = status == PlayoffStatus::Classified && remaining <= params.rest_trigger_remaining;
    tanking || resting
}

/// Applies at most one incentive adjustment to a rating.
pub fn incentive_adjustment<S: Scalar>(
    rating: Rating<S>,
    statistic: Statistic,
    status: PlayoffStatus,
    owns_pick: bool,
    remaining: u32,
    params: &IncentiveParams<S>,
) -> Rating<S> {
    if !incentive_active(status, owns_pick, remaining, params) {
        return rating;
    }
    let value = match statistic {
        Statistic::WinPercentage => rating.value * params.win_pct_factor,
        Statistic::NetRating => rating.value - params.net_rating_decrement,
    };
    Rating { value, ..rating }
}
