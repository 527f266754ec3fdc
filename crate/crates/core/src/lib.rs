//! Minority-game laboratory.
//!
//! * [`game`]: the one-shot game, its actions and payoff specifications.
//! * [`equilibrium`]: pure and mixed Nash equilibria of the stage game.
//! * [`strategy`]: response modes over `m`-bit histories and the reduced
//!   (Walsh) strategy space.
//! * [`engine`]: the repeated game with logit learners on virtual scores.
//! * [`observables`]: volatility, predictability, frozen fraction, success.
//! * [`ensemble`]: seeded replication and parameter sweeps over `alpha = 2^m / N`.
//! * [`report`]: CSV/TSV output shared by the command line tool.

pub mod engine;
pub mod ensemble;
pub mod equilibrium;
pub mod error;
pub mod game;
pub mod observables;
pub mod report;
pub mod strategy;

pub use engine::{select_mode, Agent, Beta, EngineParams, EngineState, RoundRecord};

pub use ensemble::{derive_seed, run_point, sweep, PointStats, SweepGrid, SweepPoint, SweepRow, WindowPolicy};
pub use equilibrium::{EquilibriumType, MixedSolution};
pub use error::{Error, Result};
pub use game::{Action, ActionProfile, GameConfig, PayoffSpec};
pub use observables::{MeasurementWindow, Observer, RunSummary};
pub use strategy::{Endowment, HistoryCode, ResponseMode};
