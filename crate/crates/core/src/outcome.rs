//! Outcome functions: map a pair of ratings to a game-outcome distribution.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::ratings::{Rating, Statistic};
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OutcomeError {
    #[error("race parameter {0} outside [0,1]")]
    Domain(f64),
}

/// Probabilities of a home win, an away win and a tie.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutcomeDistribution<S> {
    pub p_home_win: S,
    pub p_away_win: S,
    pub p_tie: S,
}

impl<S: Scalar> OutcomeDistribution<S> {
    pub fn new(p_home_win: S, p_away_win: S, p_tie: S) -> Self {
        OutcomeDistribution {
            p_home_win,
            p_away_win,
            p_tie,
        }
    }

    pub fn certain_home() -> Self {
        Self::new(S::one(), S::zero(), S::zero())
    }

    pub fn certain_away() -> Self {
        Self::new(S::zero(), S::one(), S::zero())
    }

    pub fn coin_flip() -> Self {
        Self::new(S::half(), S::half(), S::zero())
    }

    /// Neither side wins with certainty.
    pub fn is_uncertain(&self) -> bool {
        self.p_home_win != S::one() && self.p_away_win != S::one()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GameOutcome {
    HomeWin,
    AwayWin,
    Tie,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OutcomeFn {
    BernoulliRace,
    LargestValue,
}

/// The six prediction methods.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MethodId {
    I,
    Ii,
    Iii,
    Iv,
    V,
    Vi,
}

/// How a method turns past games into a prediction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MethodSpec {
    pub id: MethodId,
    pub statistic: Statistic,
    pub home_adjusted: bool,
    pub outcome_fn: OutcomeFn,
}

impl MethodId {
    pub const ALL: [MethodId; 6] = [
        MethodId::I,
        MethodId::Ii,
        MethodId::Iii,
        MethodId::Iv,
        MethodId::V,
        MethodId::Vi,
    ];

    pub fn spec(self) -> MethodSpec {
        use OutcomeFn::*;
        use Statistic::*;
        let (statistic, home_adjusted, outcome_fn) = match self {
            MethodId::I => (WinPercentage, false, BernoulliRace),
            MethodId::Ii => (WinPercentage, true, BernoulliRace),
            MethodId::Iii => (WinPercentage, false, LargestValue),
            MethodId::Iv => (WinPercentage, true, LargestValue),
            MethodId::V => (NetRating, false, LargestValue),
            MethodId::Vi => (NetRating, true, LargestValue),
        };
        MethodSpec {
            id: self,
            statistic,
            home_adjusted,
            outcome_fn,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            MethodId::I => "i",
            MethodId::Ii => "ii",
            MethodId::Iii => "iii",
            MethodId::Iv => "iv",
            MethodId::V => "v",
            MethodId::Vi => "vi",
        }
    }
}

impl fmt::Display for MethodId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MethodId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        MethodId::ALL
            .into_iter()
            .find(|m| m.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown method {s:?} (expected one of i, ii, iii, iv, v, vi)"))
    }
}

impl MethodSpec {
    /// Distribution for a matchup under this method's outcome function.
    pub fn distribution<S: Scalar>(
        &self,
        home: Rating<S>,
        away: Rating<S>,
    ) -> Result<OutcomeDistribution<S>, OutcomeError> {
        match self.outcome_fn {
            OutcomeFn::LargestValue => Ok(largest_value(home, away)),
            OutcomeFn::BernoulliRace => bernoulli_race_no_ties(home.value, away.value),
        }
    }
}

/// Deterministic win for the higher rating; fair coin on equal ratings.
pub fn largest_value<S: Scalar>(home: Rating<S>, away: Rating<S>) -> OutcomeDistribution<S> {
    debug_assert_eq!(home.kind, away.kind);
    if home.value > away.value {
        OutcomeDistribution::certain_home()
    } else if away.value > home.value {
        OutcomeDistribution::certain_away()
    } else {
        OutcomeDistribution::coin_flip()
    }
}

fn check_unit<S: Scalar>(p: S) -> Result<(), OutcomeError> {
    if p >= S::zero() && p <= S::one() {
        Ok(())
    } else {
        Err(OutcomeError::Domain(p.to_f64_lossy()))
    }
}

/// Bernoulli race with ties allowed: a single pair of trials, tie when equal.
pub fn bernoulli_race_with_ties<S: Scalar>(p1: S, p2: S) -> Result<OutcomeDistribution<S>, OutcomeError> {
    check_unit(p1)?;
    check_unit(p2)?;
    let (q1, q2) = (S::one() - p1, S::one() - p2);
    Ok(OutcomeDistribution::new(p1 * q2, q1 * p2, q1 * q2 + p1 * p2))
}

/// Bernoulli race repeated until exactly one side succeeds.
///
/// When both parameters are 0 or both are 1 the race never resolves; that
/// case returns a fair coin, matching the `p1 == p2` limit.
pub fn bernoulli_race_no_ties<S: Scalar>(p1: S, p2: S) -> Result<OutcomeDistribution<S>, OutcomeError> {
    check_unit(p1)?;
    check_unit(p2)?;
    if p1 == p2 {
        return Ok(OutcomeDistribution::coin_flip());
    }
    let home = p1 * (S::one() - p2);
    let away = (S::one() - p1) * p2;
    let total = home + away;
    let p_home = home / total;
    Ok(OutcomeDistribution::new(p_home, S::one() - p_home, S::zero()))
}

/// Inverse-CDF sample with category order (home win, away win, tie).
///
/// `draw` is uniform on `[0, 1)`. A distribution with zero tie mass never
/// yields a tie, even when its components are off by rounding.
pub fn sample_outcome<S: Scalar>(dist: &OutcomeDistribution<S>, draw: f64) -> GameOutcome {
    let home = dist.p_home_win.to_f64_lossy();
    if draw < home {
        return GameOutcome::HomeWin;
    }
    if dist.p_tie == S::zero() || draw < home + dist.p_away_win.to_f64_lossy() {
        GameOutcome::AwayWin
    } else {
        GameOutcome::Tie
    }
}
