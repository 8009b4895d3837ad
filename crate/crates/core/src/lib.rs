//! Agent-based simulation of NBA seasons for game outcome prediction.
//!
//! A game is predicted in two steps: each team gets a rating from its
//! history (win percentage or net rating, optionally home-adjusted and
//! windowed), then an outcome function (Bernoulli race or largest value)
//! turns the two ratings into a distribution that is sampled. The extended
//! model lets teams tank or rest based on their playoff status.
//!
//! The numeric core is generic over [`Scalar`]; the aliases below fix it to
//! `f64`, which is what the engine and the CLI use.

pub mod agents;
pub mod analysis;
pub mod cli;
pub mod domain;
pub mod engine;
pub mod io;
pub mod outcome;
pub mod ratings;
pub mod scalar;

pub use agents::{playoff_status, IncentiveParams, PlayoffStatus, StandingsSnapshot};
pub use analysis::{AccuracyReport, Interval, SweepPoint, WinsDelta, WinsDeltaRecord};
pub use domain::{Conference, EraRules, GameRecord, OutcomeSource, SeasonDataset, TeamId};
pub use engine::{run_replications, Mode, Model, PriorSpec, ReplicationResult, SimulationConfig};
pub use io::{load_bundle, DatasetBundle};
pub use outcome::{GameOutcome, MethodId, OutcomeDistribution};
pub use ratings::{Rating, Statistic, WindowPolicy};
pub use scalar::Scalar;

pub type Config = SimulationConfig<f64>;
pub type Distribution = OutcomeDistribution<f64>;
pub type Incentives = IncentiveParams<f64>;
pub type TeamRating = Rating<f64>;
/// Exact arithmetic, for checking closed-form values without rounding.
pub type ExactDistribution = OutcomeDistribution<num_rational::Rational64>;
