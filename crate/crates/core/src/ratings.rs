//! Team strength ratings computed from a team's past games.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::domain::{
    history_before, BoxLine, DomainError, HistoryEntry, OutcomeSource, SeasonDataset, TeamId,
};
use crate::scalar::Scalar;

/// Free-throw weight in the box-score possession estimate.
pub const FTA_POSSESSION_WEIGHT: f64 = 0.44;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RatingError {
    #[error("net rating undefined: {games} windowed games with zero total possessions")]
    ZeroPossessions { games: usize },
    #[error(transparent)]
    Domain(#[from] DomainError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Statistic {
    WinPercentage,
    NetRating,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RatingKind {
    /// A value in `[0, 1]`.
    Probability,
    RealValued,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rating<S> {
    pub value: S,
    pub kind: RatingKind,
}

impl<S: Scalar> Rating<S> {
    pub fn probability(value: S) -> Self {
        debug_assert!(value >= S::zero() && value <= S::one());
        Rating {
            value,
            kind: RatingKind::Probability,
        }
    }

    pub fn real(value: S) -> Self {
        Rating {
            value,
            kind: RatingKind::RealValued,
        }
    }
}

/// How many of a team's most recent games feed its rating.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum WindowPolicy {
    #[default]
    All,
    Last(usize),
}

impl WindowPolicy {
    pub fn last(k: usize) -> Option<Self> {
        (k >= 1).then_some(WindowPolicy::Last(k))
    }

    /// The trailing part of `history` inside the window.
    pub fn apply<'a, T>(&self, history: &'a [T]) -> &'a [T] {
        match *self {
            WindowPolicy::All => history,
            WindowPolicy::Last(k) => &history[history.len().saturating_sub(k)..],
        }
    }
}

impl fmt::Display for WindowPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WindowPolicy::All => f.write_str("all"),
            WindowPolicy::Last(k) => write!(f, "{k}"),
        }
    }
}

impl FromStr for WindowPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("all") {
            return Ok(WindowPolicy::All);
        }
        let k: usize = s
            .parse()
            .map_err(|_| format!("window must be a positive integer or 'all', got {s:?}"))?;
        WindowPolicy::last(k).ok_or_else(|| "window must be at least 1".to_string())
    }
}

/// Smoothed win fraction `(prior + wins) / (1 + games)` over the window.
///
/// The prior keeps the value strictly inside (0,1), including for an empty
/// history where it equals the prior itself.
pub fn win_percentage<S: Scalar>(history: &[HistoryEntry], prior: S, window: WindowPolicy) -> Rating<S> {
    debug_assert!(prior > S::zero() && prior < S::one());
    let games = window.apply(history);
    let wins = games.iter().filter(|e| e.won).count();
    Rating::probability((prior + S::from_count(wins)) / (S::one() + S::from_count(games.len())))
}

/// Point differential per 100 of the team's own possessions over the window.
pub fn net_rating<S: Scalar>(history: &[HistoryEntry], window: WindowPolicy) -> Result<Rating<S>, RatingError> {
    let games = window.apply(history);
    if games.is_empty() {
        return Ok(Rating::real(S::zero()));
    }
    let diff: i64 = games
        .iter()
        .map(|e| i64::from(e.points_for) - i64::from(e.points_against))
        .sum();
    let possessions: f64 = games.iter().map(|e| e.possessions).sum();
    if possessions <= 0.0 {
        return Err(RatingError::ZeroPossessions { games: games.len() });
    }
    Ok(Rating::real(S::from_int(100 * diff) / S::lit(possessions)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PossessionEstimate {
    pub value: f64,
    /// True when the box line carried no recorded count.
    pub estimated: bool,
    /// True when the raw estimate was negative and was clamped to zero.
    pub clamped: bool,
}

/// Recorded possessions when present, else `fga - oreb + tov + 0.44 * fta`.
pub fn estimate_possessions(line: &BoxLine) -> PossessionEstimate {
    if let Some(p) = line.possessions {
        return PossessionEstimate {
            value: p,
            estimated: false,
            clamped: false,
        };
    }
    let raw = f64::from(line.fga) - f64::from(line.oreb)
        + f64::from(line.tov)
        + FTA_POSSESSION_WEIGHT * f64::from(line.fta);
    if raw < 0.0 {
        log::warn!("negative possession estimate {raw} clamped to 0 for box line {line:?}");
    }
    PossessionEstimate {
        value: raw.max(0.0),
        estimated: true,
        clamped: raw < 0.0,
    }
}

/// Ratings for one matchup given each side's (already filtered) history.
///
/// `home_history` must already be restricted to home games when the method
/// is home-adjusted; windowing is applied here.
pub fn rate_matchup<S: Scalar>(
    statistic: Statistic,
    home_history: &[HistoryEntry],
    away_history: &[HistoryEntry],
    priors: (S, S),
    window: WindowPolicy,
) -> Result<(Rating<S>, Rating<S>), RatingError> {
    match statistic {
        Statistic::WinPercentage => Ok((
            win_percentage(home_history, priors.0, window),
            win_percentage(away_history, priors.1, window),
        )),
        Statistic::NetRating => Ok((
            net_rating(home_history, window)?,
            net_rating(away_history, window)?,
        )),
    }
}

/// Ratings of `home` and `away` before game `game_index`.
///
/// With `home_adjusted`, the home team's history is cut down to its home
/// games before the window is applied; the away team always uses all of its
/// games.
#[allow(clippy::too_many_arguments)]
pub fn rate_for_game<S: Scalar>(
    dataset: &SeasonDataset,
    statistic: Statistic,
    home_adjusted: bool,
    home: &TeamId,
    away: &TeamId,
    game_index: usize,
    window: WindowPolicy,
    source: OutcomeSource<'_>,
    priors: (S, S),
) -> Result<(Rating<S>, Rating<S>), RatingError> {
    let mut home_view = history_before(dataset, home, game_index, source)?.entries;
    let away_view = history_before(dataset, away, game_index, source)?.entries;
    if home_adjusted {
        home_view.retain(|e| e.at_home);
    }
    rate_matchup(statistic, &home_view, &away_view, priors, window)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::fixtures::two_team;
    use num_rational::Rational64;
    use proptest::prelude::*;

    fn entry(won: bool, at_home: bool) -> HistoryEntry {
        HistoryEntry {
            game_index: 0,
            won,
            at_home,
            points_for: 0,
            points_against: 0,
            possessions: 100.0,
        }
    }

    fn results(flags: &[bool]) -> Vec<HistoryEntry> {
        flags.iter().map(|&w| entry(w, true)).collect()
    }

    #[test]
    fn win_percentage_examples() {
        assert_eq!(win_percentage(&[], 0.5, WindowPolicy::All).value, 0.5);
        let wwl = results(&[true, true, false]);
        assert_eq!(win_percentage(&wwl, 0.5, WindowPolicy::All).value, 0.625);
        let lllww = results(&[false, false, false, true, true]);
        let r: Rating<Rational64> = win_percentage(&lllww, Rational64::new(1, 2), WindowPolicy::Last(2));
        assert_eq!(r.value, Rational64::new(5, 6));
        assert_eq!(win_percentage(&results(&[false]), 0.25, WindowPolicy::All).value, 0.125);
    }

    #[test]
    fn net_rating_examples() {
        assert_eq!(net_rating::<f64>(&[], WindowPolicy::All).unwrap().value, 0.0);
        let one = HistoryEntry {
            points_for: 110,
            points_against: 105,
            ..entry(true, true)
        };
        assert_eq!(net_rating::<f64>(&[one], WindowPolicy::All).unwrap().value, 5.0);
        let even = HistoryEntry {
            points_for: 100,
            points_against: 100,
            ..one
        };
        assert_eq!(net_rating::<f64>(&[even], WindowPolicy::All).unwrap().value, 0.0);
        let zero = HistoryEntry {
            possessions: 0.0,
            ..one
        };
        assert_eq!(
            net_rating::<f64>(&[zero], WindowPolicy::All),
            Err(RatingError::ZeroPossessions { games: 1 })
        );
    }

    #[test]
    fn possession_estimates() {
        let recorded = BoxLine {
            possessions: Some(98.5),
            ..BoxLine::default()
        };
        assert_eq!(estimate_possessions(&recorded).value, 98.5);
        let line = BoxLine {
            fga: 90,
            oreb: 10,
            tov: 12,
            fta: 25,
            possessions: None,
        };
        let est = estimate_possessions(&line);
        assert!((est.value - 103.0).abs() < 1e-12);
        assert!(est.estimated && !est.clamped);
        assert_eq!(estimate_possessions(&BoxLine::default()).value, 0.0);
        let negative = BoxLine {
            oreb: 5,
            ..BoxLine::default()
        };
        let est = estimate_possessions(&negative);
        assert_eq!(est.value, 0.0);
        assert!(est.clamped);
    }

    #[test]
    fn home_adjusted_filters_before_windowing() {
        // W at home, L away, W at home
        let history = vec![entry(true, true), entry(false, false), entry(true, true)];
        let home_only: Vec<_> = history.iter().copied().filter(|e| e.at_home).collect();
        let (h, a) = rate_matchup(Statistic::WinPercentage, &home_only, &history, (0.5f64, 0.5), WindowPolicy::All).unwrap();
        assert!((h.value - 2.5 / 3.0).abs() < 1e-15);
        assert_eq!(a.value, 2.5 / 4.0);
        let (h, _) = rate_matchup(Statistic::WinPercentage, &[], &history, (0.5, 0.5), WindowPolicy::All).unwrap();
        assert_eq!(h.value, 0.5);
        // window of 1 on the filtered list sees the last home game only
        let (h, _) = rate_matchup(Statistic::WinPercentage, &home_only, &history, (0.5, 0.5), WindowPolicy::Last(1)).unwrap();
        assert_eq!(h.value, 0.75);
    }

    #[test]
    fn rate_for_game_on_fixture() {
        let ds = two_team();
        let (x, y) = (ds.teams()[0].clone(), ds.teams()[1].clone());
        let (hx, ay) = rate_for_game(&ds, Statistic::WinPercentage, false, &x, &y, 2, WindowPolicy::All, OutcomeSource::Real, (0.5, 0.5)).unwrap();
        assert_eq!((hx.value, ay.value), (2.5 / 3.0, 0.5 / 3.0));
        // X has one prior home game (a win)
        let (hx, _) = rate_for_game(&ds, Statistic::WinPercentage, true, &x, &y, 2, WindowPolicy::All, OutcomeSource::Real, (0.5, 0.5)).unwrap();
        assert_eq!(hx.value, 0.75);
        // away side is never filtered
        let (_, plain) = rate_for_game::<f64>(&ds, Statistic::NetRating, false, &y, &x, 3, WindowPolicy::All, OutcomeSource::Real, (0.5, 0.5)).unwrap();
        let (_, adjusted) = rate_for_game::<f64>(&ds, Statistic::NetRating, true, &y, &x, 3, WindowPolicy::All, OutcomeSource::Real, (0.5, 0.5)).unwrap();
        assert_eq!(plain, adjusted);
    }

    #[test]
    fn window_parsing() {
        assert_eq!("all".parse::<WindowPolicy>().unwrap(), WindowPolicy::All);
        assert_eq!("12".parse::<WindowPolicy>().unwrap(), WindowPolicy::Last(12));
        assert!("0".parse::<WindowPolicy>().is_err());
        assert!("-3".parse::<WindowPolicy>().is_err());
    }

    proptest! {
        #[test]
        fn win_percentage_stays_inside_unit_interval(flags in prop::collection::vec(any::<bool>(), 0..120), prior in 0.001f64..0.999, k in 1usize..100) {
            let h = results(&flags);
            for w in [WindowPolicy::All, WindowPolicy::Last(k)] {
                let v = win_percentage(&h, prior, w).value;
                prop_assert!(v > 0.0 && v < 1.0);
            }
        }

        #[test]
        fn wide_window_equals_unbounded(flags in prop::collection::vec(any::<bool>(), 0..90), extra in 0usize..10) {
            let h = results(&flags);
            let k = flags.len().max(1) + extra;
            prop_assert_eq!(win_percentage(&h, 0.5, WindowPolicy::Last(k)), win_percentage(&h, 0.5, WindowPolicy::All));
        }

        #[test]
        fn flipping_a_loss_raises_win_percentage(flags in prop::collection::vec(any::<bool>(), 1..60), k in 1usize..60, pick in any::<prop::sample::Index>()) {
            let h = results(&flags);
            let window = WindowPolicy::Last(k);
            let start = h.len().saturating_sub(k);
            let losses: Vec<usize> = (start..h.len()).filter(|&i| !h[i].won).collect();
            prop_assume!(!losses.is_empty());
            let mut better = h.clone();
            better[losses[pick.index(losses.len())]].won = true;
            prop_assert!(win_percentage(&better, 0.5, window).value > win_percentage(&h, 0.5, window).value);
        }

        #[test]
        fn head_to_head_net_ratings_are_opposite(pf in 60u32..160, pa in 60u32..160, poss in 70.0f64..130.0) {
            let a = HistoryEntry { game_index: 0, won: pf > pa, at_home: true, points_for: pf, points_against: pa, possessions: poss };
            let b = HistoryEntry { won: !a.won, at_home: false, points_for: pa, points_against: pf, ..a };
            let ra = net_rating::<f64>(&[a], WindowPolicy::All).unwrap().value;
            let rb = net_rating::<f64>(&[b], WindowPolicy::All).unwrap().value;
            prop_assert_eq!(ra, -rb);
        }
    }
}
