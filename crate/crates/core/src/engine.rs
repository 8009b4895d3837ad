//! Chronological season simulation and the replication runner.
//!
//! Every replication owns one ChaCha8 stream keyed by `(master_seed,
//! rep_index)`: the master seed fixes the key and the replication index
//! selects the stream, so results do not depend on scheduling. Game `g`
//! consumes draw `g` of its replication's stream and nothing else.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::agents::{incentive_adjustment, status_from_counts, IncentiveParams, PlayoffStatus};
use crate::domain::{HistoryEntry, SeasonDataset, TeamId};
use crate::outcome::{sample_outcome, GameOutcome, MethodId, MethodSpec, OutcomeDistribution, OutcomeError};
use crate::ratings::{rate_matchup, RatingError, Statistic, WindowPolicy};
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EngineError {
    #[error("net-rating methods require monte-carlo mode")]
    ClosedLoopNetRating,
    #[error("replications must be at least 1")]
    ZeroReplications,
    #[error("prior {0} must lie strictly inside (0,1)")]
    BadPrior(f64),
    #[error("dataset {0} has no priors table")]
    MissingPriors(String),
    #[error("incentive parameters out of range (factor in (0,1], decrement >= 0)")]
    BadIncentives,
    #[error("game {game_id}: {source}")]
    Rating {
        game_id: String,
        source: RatingError,
    },
    #[error("game {game_id}: {source}")]
    Outcome {
        game_id: String,
        source: OutcomeError,
    },
    #[error("failed to build thread pool: {0}")]
    ThreadPool(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Model {
    Basic,
    Extended,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    /// Ratings always come from real past results.
    MonteCarlo,
    /// Simulated results feed forward into later ratings and standings.
    ClosedLoop,
}

macro_rules! label_enum {
    ($ty:ty, $($variant:path => $text:literal),+) => {
        impl $ty {
            pub fn as_str(self) -> &'static str {
                match self { $($variant => $text),+ }
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $ty {
            type Err = String;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match s.trim() {
                    $($text => Ok($variant),)+
                    other => Err(format!("unknown value {other:?} (expected one of: {})", [$($text),+].join(", "))),
                }
            }
        }
    };
}

label_enum!(Model, Model::Basic => "basic", Model::Extended => "extended");
label_enum!(Mode, Mode::MonteCarlo => "monte-carlo", Mode::ClosedLoop => "closed-loop");

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PriorSpec {
    /// Same prior for every team.
    Uniform(f64),
    /// Per-team priors from the dataset.
    Dataset,
}

impl Default for PriorSpec {
    fn default() -> Self {
        PriorSpec::Uniform(0.5)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig<S> {
    pub method: MethodId,
    pub model: Model,
    pub mode: Mode,
    pub window: WindowPolicy,
    pub prior: PriorSpec,
    pub incentives: IncentiveParams<S>,
    pub replications: usize,
    pub master_seed: u64,
}

impl<S: Scalar> SimulationConfig<S> {
    /// Basic monte-carlo run over all history with a neutral prior and
    /// 1000 replications.
    pub fn new(method: MethodId) -> Self {
        SimulationConfig {
            method,
            model: Model::Basic,
            mode: Mode::MonteCarlo,
            window: WindowPolicy::All,
            prior: PriorSpec::default(),
            incentives: IncentiveParams::default(),
            replications: 1000,
            master_seed: 0,
        }
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        if self.replications == 0 {
            return Err(EngineError::ZeroReplications);
        }
        if self.mode == Mode::ClosedLoop && self.method.spec().statistic == Statistic::NetRating {
            return Err(EngineError::ClosedLoopNetRating);
        }
        if let PriorSpec::Uniform(p) = self.prior {
            if !(p > 0.0 && p < 1.0) {
                return Err(EngineError::BadPrior(p));
            }
        }
        if !self.incentives.is_valid() {
            return Err(EngineError::BadIncentives);
        }
        Ok(())
    }

    pub fn validate_for(&self, dataset: &SeasonDataset) -> Result<(), EngineError> {
        self.validate()?;
        if self.prior == PriorSpec::Dataset && !dataset.has_priors() {
            return Err(EngineError::MissingPriors(dataset.season_id().to_string()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GamePrediction {
    pub game_id: Arc<str>,
    /// Home win probability before sampling.
    pub p_home_win: f64,
    pub outcome: GameOutcome,
    /// Whether the sampled outcome matches the real result.
    pub correct: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationResult {
    pub rep_index: usize,
    pub predictions: Vec<GamePrediction>,
    pub sim_wins: BTreeMap<TeamId, u32>,
}

/// The random stream for one replication.
pub fn replication_rng(master_seed: u64, rep_index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(rep_index as u64);
    rng
}

/// Running per-team state while walking a season.
struct SeasonState {
    all: Vec<Vec<HistoryEntry>>,
    home_only: Vec<Vec<HistoryEntry>>,
    wins: Vec<u32>,
    losses: Vec<u32>,
}

impl SeasonState {
    fn new(teams: usize) -> Self {
        SeasonState {
            all: vec![Vec::new(); teams],
            home_only: vec![Vec::new(); teams],
            wins: vec![0; teams],
            losses: vec![0; teams],
        }
    }

    fn record(&mut self, dataset: &SeasonDataset, index: usize, home_won: bool) {
        let (h, a) = dataset.game_teams(index);
        let home_entry = HistoryEntry::from_game(dataset, index, true, home_won);
        self.all[h].push(home_entry);
        self.home_only[h].push(home_entry);
        self.all[a].push(HistoryEntry::from_game(dataset, index, false, home_won));
        let (w, l) = if home_won { (h, a) } else { (a, h) };
        self.wins[w] += 1;
        self.losses[l] += 1;
    }
}

/// Configuration resolved against one dataset.
struct Prepared<'a, S> {
    dataset: &'a SeasonDataset,
    spec: MethodSpec,
    model: Model,
    window: WindowPolicy,
    incentives: IncentiveParams<S>,
    priors: Vec<S>,
    conference_members: Vec<Vec<usize>>,
    game_ids: Vec<Arc<str>>,
}

impl<'a, S: Scalar> Prepared<'a, S> {
    fn new(dataset: &'a SeasonDataset, config: &SimulationConfig<S>) -> Result<Self, EngineError> {
        config.validate_for(dataset)?;
        let n = dataset.teams().len();
        let priors = match config.prior {
            PriorSpec::Uniform(p) => vec![S::lit(p); n],
            PriorSpec::Dataset => (0..n)
                .map(|t| S::lit(dataset.prior(t).expect("validated above")))
                .collect(),
        };
        let conference_members = (0..n)
            .map(|t| {
                let c = dataset.conference_of(t);
                (0..n).filter(|&o| o != t && dataset.conference_of(o) == c).collect()
            })
            .collect();
        Ok(Prepared {
            dataset,
            spec: config.method.spec(),
            model: config.model,
            window: config.window,
            incentives: config.incentives,
            priors,
            conference_members,
            game_ids: dataset.games().iter().map(|g| Arc::from(g.game_id.as_str())).collect(),
        })
    }

    fn status(&self, state: &SeasonState, team: usize) -> (PlayoffStatus, u32) {
        let schedule = self.dataset.schedule_length() as u32;
        let remaining = |t: usize| schedule - state.wins[t] - state.losses[t];
        let rivals = self.conference_members[team]
            .iter()
            .map(|&o| (state.wins[o], remaining(o)));
        let status = status_from_counts((state.wins[team], remaining(team)), rivals, self.dataset.era());
        // games strictly after the one being predicted
        (status, remaining(team).saturating_sub(1))
    }

    fn distribution(&self, state: &SeasonState, index: usize) -> Result<OutcomeDistribution<S>, EngineError> {
        let (h, a) = self.dataset.game_teams(index);
        let home_history = if self.spec.home_adjusted {
            &state.home_only[h]
        } else {
            &state.all[h]
        };
        let (mut home, mut away) = rate_matchup(
            self.spec.statistic,
            home_history,
            &state.all[a],
            (self.priors[h], self.priors[a]),
            self.window,
        )
        .map_err(|source| EngineError::Rating {
            game_id: self.game_ids[index].to_string(),
            source,
        })?;
        if self.model == Model::Extended {
            let (hs, hr) = self.status(state, h);
            let (as_, ar) = self.status(state, a);
            let stat = self.spec.statistic;
            home = incentive_adjustment(home, stat, hs, self.dataset.owns_pick(h), hr, &self.incentives);
            away = incentive_adjustment(away, stat, as_, self.dataset.owns_pick(a), ar, &self.incentives);
        }
        self.spec
            .distribution(home, away)
            .map_err(|source| EngineError::Outcome {
                game_id: self.game_ids[index].to_string(),
                source,
            })
    }

    /// Per-game distributions when ratings come from real results only.
    fn real_history_plan(&self) -> Result<Vec<OutcomeDistribution<S>>, EngineError> {
        let mut state = SeasonState::new(self.dataset.teams().len());
        let mut plan = Vec::with_capacity(self.dataset.len());
        for (i, game) in self.dataset.games().iter().enumerate() {
            plan.push(self.distribution(&state, i)?);
            state.record(self.dataset, i, game.home_won());
        }
        Ok(plan)
    }

    fn finish(&self, rep_index: usize, predictions: Vec<GamePrediction>) -> ReplicationResult {
        let mut wins = vec![0u32; self.dataset.teams().len()];
        for (i, p) in predictions.iter().enumerate() {
            let (h, a) = self.dataset.game_teams(i);
            wins[if p.outcome == GameOutcome::HomeWin { h } else { a }] += 1;
        }
        ReplicationResult {
            rep_index,
            predictions,
            sim_wins: self.dataset.teams().iter().cloned().zip(wins).collect(),
        }
    }

    fn predict(&self, index: usize, dist: &OutcomeDistribution<S>, draw: f64) -> GamePrediction {
        let outcome = sample_outcome(dist, draw);
        GamePrediction {
            game_id: self.game_ids[index].clone(),
            p_home_win: dist.p_home_win.to_f64_lossy(),
            outcome,
            correct: (outcome == GameOutcome::HomeWin) == self.dataset.games()[index].home_won(),
        }
    }

    fn sample_plan(&self, plan: &[OutcomeDistribution<S>], rep_index: usize, master_seed: u64) -> ReplicationResult {
        let mut rng = replication_rng(master_seed, rep_index);
        let predictions = plan
            .iter()
            .enumerate()
            .map(|(i, dist)| self.predict(i, dist, rng.gen::<f64>()))
            .collect();
        self.finish(rep_index, predictions)
    }

    fn closed_loop(&self, rep_index: usize, master_seed: u64) -> Result<ReplicationResult, EngineError> {
        let mut rng = replication_rng(master_seed, rep_index);
        let mut state = SeasonState::new(self.dataset.teams().len());
        let mut predictions = Vec::with_capacity(self.dataset.len());
        for i in 0..self.dataset.len() {
            let dist = self.distribution(&state, i)?;
            let prediction = self.predict(i, &dist, rng.gen::<f64>());
            state.record(self.dataset, i, prediction.outcome == GameOutcome::HomeWin);
            predictions.push(prediction);
        }
        Ok(self.finish(rep_index, predictions))
    }
}

/// Outcome distributions for every game when ratings use real results.
///
/// These are identical across replications in monte-carlo mode.
pub fn plan_distributions<S: Scalar>(
    dataset: &SeasonDataset,
    config: &SimulationConfig<S>,
) -> Result<Vec<OutcomeDistribution<S>>, EngineError> {
    Prepared::new(dataset, config)?.real_history_plan()
}

pub fn simulate_replication<S: Scalar>(
    dataset: &SeasonDataset,
    config: &SimulationConfig<S>,
    rep_index: usize,
) -> Result<ReplicationResult, EngineError> {
    let prepared = Prepared::new(dataset, config)?;
    match config.mode {
        Mode::MonteCarlo => {
            let plan = prepared.real_history_plan()?;
            Ok(prepared.sample_plan(&plan, rep_index, config.master_seed))
        }
        Mode::ClosedLoop => prepared.closed_loop(rep_index, config.master_seed),
    }
}

/// Runs replications `0..config.replications` on the current rayon pool.
///
/// Output order follows `rep_index` and is independent of the pool size.
pub fn run_replications<S: Scalar>(
    dataset: &SeasonDataset,
    config: &SimulationConfig<S>,
) -> Result<Vec<ReplicationResult>, EngineError> {
    let prepared = Prepared::new(dataset, config)?;
    let seed = config.master_seed;
    match config.mode {
        Mode::MonteCarlo => {
            let plan = prepared.real_history_plan()?;
            Ok((0..config.replications)
                .into_par_iter()
                .map(|rep| prepared.sample_plan(&plan, rep, seed))
                .collect())
        }
        Mode::ClosedLoop => (0..config.replications)
            .into_par_iter()
            .map(|rep| prepared.closed_loop(rep, seed))
            .collect(),
    }
}

/// Runs `f` on a dedicated pool with `threads` workers, or on the global
/// pool when `threads` is `None`.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, EngineError> {
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| EngineError::ThreadPool(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}
