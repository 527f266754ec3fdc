//! The one-shot minority game.
//!
//! An odd number `N = 2k + 1` of players each pick one of two actions,
//! `-1` or `+1`. The aggregate action (attendance) `A = sum a_i` is odd and
//! never zero, so one side is always a strict minority of at most `k` players.
//!
//! Three payoff specifications are supported. All of them are anonymous (a
//! player's payoff depends only on its own action and how many others chose
//! the same side) and identical across the two actions:
//!
//! * [`PayoffSpec::Step`]: 1 to every minority player, 0 otherwise.
//! * [`PayoffSpec::Linear`]: `-a_i * A / N`.
//! * [`PayoffSpec::Sign`]: `-a_i * sign(A)`.

use std::fmt;
use std::str::FromStr;

use crate::error::{config_err, Error, Result};

/// One of the two pure actions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Action {
    Minus,
    Plus,
}

impl Action {
    #[inline]
    pub fn value(self) -> i64 {
        match self {
            Action::Minus => -1,
            Action::Plus => 1,
        }
    }

    pub fn from_value(v: i64) -> Option<Action> {
        match v {
            -1 => Some(Action::Minus),
            1 => Some(Action::Plus),
            _ => None,
        }
    }

    #[inline]
    pub fn opposite(self) -> Action {
        match self {
            Action::Minus => Action::Plus,
            Action::Plus => Action::Minus,
        }
    }

    /// The minority side `-sign(A)` for a nonzero attendance.
    #[inline]
    pub fn winner(attendance: i64) -> Action {
        debug_assert!(attendance != 0);
        if attendance > 0 {
            Action::Minus
        } else {
            Action::Plus
        }
    }

    /// `true` is `+1`.
    #[inline]
    pub fn from_bit(bit: bool) -> Action {
        if bit {
            Action::Plus
        } else {
            Action::Minus
        }
    }

    #[inline]
    pub fn bit(self) -> bool {
        self == Action::Plus
    }

    pub fn symbol(self) -> char {
        match self {
            Action::Minus => '-',
            Action::Plus => '+',
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:+}", self.value())
    }
}

/// How stage-game payoffs are derived from a profile.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PayoffSpec {
    Step,
    Linear,
    Sign,
}

impl PayoffSpec {
    pub const ALL: [PayoffSpec; 3] = [PayoffSpec::Step, PayoffSpec::Linear, PayoffSpec::Sign];

    /// Payoff to a player whose side (itself included) has `n` members, in a
    /// game with `2k + 1` players. This is the common `f_{-1} = f_{+1}`.
    pub fn side_payoff(self, k: u32, n: u64) -> f64 {
        let k = u64::from(k);
        match self {
            PayoffSpec::Step => {
                if (1..=k).contains(&n) {
                    1.0
                } else {
                    0.0
                }
            }
            // g(2(k - n) + 1) with g(x) = x / (2k + 1)
            PayoffSpec::Linear => {
                let x = 2 * k as i64 - 2 * n as i64 + 1;
                x as f64 / (2 * k + 1) as f64
            }
            PayoffSpec::Sign => {
                if n <= k {
                    1.0
                } else {
                    -1.0
                }
            }
        }
    }

    /// `g(A)` for the aggregate specs; `None` for [`PayoffSpec::Step`].
    pub fn aggregate_g(self, n_players: usize, attendance: i64) -> Option<f64> {
        match self {
            PayoffSpec::Step => None,
            PayoffSpec::Linear => Some(attendance as f64 / n_players as f64),
            PayoffSpec::Sign => Some(attendance.signum() as f64),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PayoffSpec::Step => "step",
            PayoffSpec::Linear => "linear",
            PayoffSpec::Sign => "sign",
        }
    }
}

impl fmt::Display for PayoffSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PayoffSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "step" => Ok(PayoffSpec::Step),
            "linear" => Ok(PayoffSpec::Linear),
            "sign" => Ok(PayoffSpec::Sign),
            other => Err(config_err!(
                "unknown payoff spec {other:?} (expected step, linear or sign)"
            )),
        }
    }
}

/// Player count `N = 2k + 1` and payoff specification.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GameConfig {
    k: u32,
    payoff: PayoffSpec,
}

impl GameConfig {
    pub fn new(k: u32, payoff: PayoffSpec) -> Result<Self> {
        if k == 0 {
            return Err(config_err!("k must be at least 1 (N = 2k + 1 >= 3)"));
        }
        if k > (u32::MAX - 1) / 2 {
            return Err(config_err!("k = {k} is too large"));
        }
        Ok(GameConfig { k, payoff })
    }

    /// Builds a config from the player count, which must be odd and at least 3.
    pub fn with_players(n: u64, payoff: PayoffSpec) -> Result<Self> {
        if n < 3 || n % 2 == 0 {
            return Err(config_err!("player count must be odd and >= 3, got {n}"));
        }
        let k = u32::try_from((n - 1) / 2).map_err(|_| config_err!("player count {n} is too large"))?;
        GameConfig::new(k, payoff)
    }

    #[inline]
    pub fn k(&self) -> u32 {
        self.k
    }

    #[inline]
    pub fn n_players(&self) -> usize {
        2 * self.k as usize + 1
    }

    #[inline]
    pub fn payoff_spec(&self) -> PayoffSpec {
        self.payoff
    }

    pub fn profile(&self, actions: Vec<Action>) -> Result<ActionProfile> {
        ActionProfile::new(self, actions)
    }

    pub fn attendance(&self, profile: &ActionProfile) -> Result<i64> {
        self.check(profile)?;
        Ok(profile.attendance())
    }

    /// Stage payoff of player `i`.
    pub fn payoff(&self, profile: &ActionProfile, i: usize) -> Result<f64> {
        self.check(profile)?;
        let a = profile.actions.get(i).copied().ok_or_else(|| {
            config_err!("player index {i} out of range for N = {}", self.n_players())
        })?;
        Ok(self.payoff_unchecked(profile.attendance(), a))
    }

    /// Payoff of a player choosing `a` when the attendance is `attendance`.
    #[inline]
    pub(crate) fn payoff_unchecked(&self, attendance: i64, a: Action) -> f64 {
        match self.payoff.aggregate_g(self.n_players(), attendance) {
            Some(g) => -(a.value() as f64) * g,
            None => {
                let n = self.n_players() as i64;
                let same_side = (n + a.value() * attendance) / 2;
                self.payoff.side_payoff(self.k, same_side as u64)
            }
        }
    }

    /// Sum of all players' payoffs.
    pub fn total_payoff(&self, profile: &ActionProfile) -> Result<f64> {
        self.check(profile)?;
        let (minus, plus) = profile.counts();
        let a = profile.attendance();
        let side = |count: usize, action: Action| {
            if count == 0 {
                0.0
            } else {
                count as f64 * self.payoff_unchecked(a, action)
            }
        };
        Ok(side(minus, Action::Minus) + side(plus, Action::Plus))
    }

    fn check(&self, profile: &ActionProfile) -> Result<()> {
        if profile.len() != self.n_players() {
            return Err(config_err!(
                "profile has {} actions, expected N = {}",
                profile.len(),
                self.n_players()
            ));
        }
        Ok(())
    }
}

/// A pure action profile of exactly `N` players.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ActionProfile {
    actions: Vec<Action>,
}

impl ActionProfile {
    pub fn new(config: &GameConfig, actions: Vec<Action>) -> Result<Self> {
        if actions.len() != config.n_players() {
            return Err(config_err!(
                "profile has {} actions, expected N = {}",
                actions.len(),
                config.n_players()
            ));
        }
        Ok(ActionProfile { actions })
    }

    /// Parses `±1` integers.
    pub fn from_values(config: &GameConfig, values: &[i64]) -> Result<Self> {
        let actions = values
            .iter()
            .map(|&v| Action::from_value(v).ok_or_else(|| config_err!("action must be -1 or +1, got {v}")))
            .collect::<Result<Vec<_>>>()?;
        ActionProfile::new(config, actions)
    }

    /// Profile with the first `minus` players on `-1` and the rest on `+1`.
    pub fn from_counts(config: &GameConfig, minus: usize) -> Result<Self> {
        let n = config.n_players();
        if minus > n {
            return Err(config_err!("{minus} (-1)-players exceed N = {n}"));
        }
        let actions = (0..n)
            .map(|i| if i < minus { Action::Minus } else { Action::Plus })
            .collect();
        Ok(ActionProfile { actions })
    }

    pub fn actions(&self) -> &[Action] {
        &self.actions
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn attendance(&self) -> i64 {
        self.actions.iter().map(|a| a.value()).sum()
    }

    /// `(#-1, #+1)`.
    pub fn counts(&self) -> (usize, usize) {
        let minus = self.actions.iter().filter(|&&a| a == Action::Minus).count();
        (minus, self.actions.len() - minus)
    }

    pub fn minority_size(&self) -> usize {
        let (minus, plus) = self.counts();
        minus.min(plus)
    }
}
