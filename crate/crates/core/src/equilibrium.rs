//! Nash equilibria of the stage game.
//!
//! Pure equilibria are exactly the profiles where one side holds `k` of the
//! `2k + 1` players. Mixed equilibria are described by a type `(l, r, lambda)`:
//! `l` players commit to `-1`, `r` commit to `+1` and the `z = N - l - r`
//! mixers each play `-1` with probability `lambda`. A type is an equilibrium
//! when a mixer is indifferent between its two pure actions:
//!
//! ```text
//! v_minus(l + 1, r, lambda) == v_plus(l, r + 1, lambda)
//! ```
//!
//! where `v_side(l, r, lambda)` is the expected payoff to a player committed
//! to `side`, counted in `l` (or `r`), facing the remaining mixers.

use crate::error::{Error, Result};
use crate::game::{Action, ActionProfile, GameConfig};

/// Lower/upper end of the bisection bracket.
pub const LAMBDA_EPS: f64 = 1e-12;
pub const DEFAULT_TOL: f64 = 1e-10;
pub const MAX_BISECTION_ITERS: usize = 200;

/// Above this many mixers, binomial weights are built in log space.
const LOG_SPACE_MIXERS: u64 = 40;

pub fn is_pure_nash(config: &GameConfig, profile: &ActionProfile) -> bool {
    profile.len() == config.n_players() && profile.minority_size() == config.k() as usize
}

/// `C(n, k)`, or `None` on overflow.
pub fn binomial(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 0..k {
        // c * (n - i) is divisible by (i + 1) at every step
        c = c.checked_mul(u128::from(n - i))? / u128::from(i + 1);
    }
    Some(c)
}

/// Number of pure-strategy equilibria, `2 * C(2k + 1, k)`.
pub fn count_pure_nash(k: u32) -> Result<u64> {
    if k == 0 {
        return Err(Error::Config("k must be at least 1".into()));
    }
    let n = 2 * u64::from(k) + 1;
    binomial(n, u64::from(k))
        .and_then(|c| c.checked_mul(2))
        .and_then(|c| u64::try_from(c).ok())
        .ok_or_else(|| Error::Overflow(format!("2*C({n},{k}) does not fit in 64 bits")))
}

/// Type `(l, r, lambda)` of a profile with at least one mixer.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EquilibriumType {
    pub minus: u32,
    pub plus: u32,
    pub lambda: f64,
}

impl EquilibriumType {
    pub fn new(config: &GameConfig, minus: u32, plus: u32, lambda: f64) -> Result<Self> {
        let n = config.n_players() as u64;
        if u64::from(minus) + u64::from(plus) > n {
            return Err(Error::Config(format!("l + r = {} exceeds N = {n}", minus + plus)));
        }
        let t = EquilibriumType { minus, plus, lambda };
        if t.mixers(config) > 0 && !(lambda > 0.0 && lambda < 1.0) {
            return Err(Error::Config(format!("lambda must lie in (0, 1), got {lambda}")));
        }
        Ok(t)
    }

    pub fn mixers(&self, config: &GameConfig) -> u64 {
        config.n_players() as u64 - u64::from(self.minus) - u64::from(self.plus)
    }
}

/// Binomial pmf of `z` trials with success probability `p`, indexed by success count.
fn binomial_weights(z: u64, p: f64) -> Vec<f64> {
    if z <= LOG_SPACE_MIXERS {
        // exact integer coefficients up to C(40, 20) ~ 1.4e11
        let q = 1.0 - p;
        (0..=z)
            .map(|x| {
                let c = binomial(z, x).expect("small binomial") as f64;
                c * p.powi(x as i32) * q.powi((z - x) as i32)
            })
            .collect()
    } else {
        let (lp, lq) = (p.ln(), (-p).ln_1p());
        let mut ln_c = 0.0f64;
        let mut out = Vec::with_capacity(z as usize + 1);
        for x in 0..=z {
            if x > 0 {
                ln_c += ((z - x + 1) as f64).ln() - (x as f64).ln();
            }
            out.push((ln_c + x as f64 * lp + (z - x) as f64 * lq).exp());
        }
        out
    }
}

/// Expected payoff to a player committed to `side`.
///
/// `minus` players play `-1` surely and `plus` play `+1` surely, the
/// committed player among them; the other `N - minus - plus` players mix,
/// choosing `-1` with probability `lambda`.
pub fn expected_payoff(config: &GameConfig, side: Action, minus: u32, plus: u32, lambda: f64) -> Result<f64> {
    let n = config.n_players() as u64;
    let (l, r) = (u64::from(minus), u64::from(plus));
    if l + r > n {
        return Err(Error::Config(format!("l + r = {} exceeds N = {n}", l + r)));
    }
    let committed = match side {
        Action::Minus => l,
        Action::Plus => r,
    };
    if committed < 1 {
        return Err(Error::Domain(format!(
            "no committed {side} player among l = {minus}, r = {plus}"
        )));
    }
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::Domain(format!("lambda must lie in [0, 1], got {lambda}")));
    }
    let z = n - l - r;
    let spec = config.payoff_spec();
    let k = config.k();
    let v = binomial_weights(z, lambda)
        .into_iter()
        .enumerate()
        .map(|(x, w)| {
            // x mixers chose -1
            let x = x as u64;
            let size = match side {
                Action::Minus => l + x,
                Action::Plus => r + (z - x),
            };
            w * spec.side_payoff(k, size)
        })
        .sum();
    Ok(v)
}

/// `(v_minus, v_plus)` at the same `(l, r, lambda)`; needs `l >= 1` and `r >= 1`.
pub fn mixer_payoffs(config: &GameConfig, minus: u32, plus: u32, lambda: f64) -> Result<(f64, f64)> {
    Ok((
        expected_payoff(config, Action::Minus, minus, plus, lambda)?,
        expected_payoff(config, Action::Plus, minus, plus, lambda)?,
    ))
}

/// Indifference residual of a mixer: `v_minus(l + 1, r, lambda) - v_plus(l, r + 1, lambda)`.
pub fn indifference_residual(config: &GameConfig, minus: u32, plus: u32, lambda: f64) -> Result<f64> {
    let n = config.n_players() as u64;
    if u64::from(minus) + u64::from(plus) >= n {
        return Err(Error::Config(format!(
            "type ({minus}, {plus}) leaves no mixer in N = {n}"
        )));
    }
    Ok(expected_payoff(config, Action::Minus, minus + 1, plus, lambda)?
        - expected_payoff(config, Action::Plus, minus, plus + 1, lambda)?)
}

/// Outcome of solving the indifference condition for a given `(l, r)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MixedSolution {
    Unique { lambda: f64, residual: f64, iterations: usize },
    /// Type `(k, k, lambda)`: the single mixer may use any lambda.
    AnyLambda,
    NoEquilibrium,
}

pub fn solve_mixed_equilibrium(config: &GameConfig, minus: u32, plus: u32, tol: f64) -> Result<MixedSolution> {
    if !(tol > 0.0) {
        return Err(Error::Config(format!("tolerance must be positive, got {tol}")));
    }
    let k = config.k();
    if u64::from(minus) + u64::from(plus) > 2 * u64::from(k) {
        return Err(Error::Config(format!(
            "l + r = {} leaves no mixer (need <= 2k = {})",
            minus + plus,
            2 * k
        )));
    }
    if minus == k && plus == k {
        return Ok(MixedSolution::AnyLambda);
    }
    if minus + plus > 2 * k - 1 || minus.max(plus) >= k {
        return Ok(MixedSolution::NoEquilibrium);
    }

    let f = |lambda: f64| indifference_residual(config, minus, plus, lambda);
    let (mut lo, mut hi) = (LAMBDA_EPS, 1.0 - LAMBDA_EPS);
    let (f_lo, f_hi) = (f(lo)?, f(hi)?);
    if f_lo.abs() < tol {
        return Ok(MixedSolution::Unique { lambda: lo, residual: f_lo, iterations: 0 });
    }
    if f_hi.abs() < tol {
        return Ok(MixedSolution::Unique { lambda: hi, residual: f_hi, iterations: 0 });
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::Solver(format!(
            "indifference residual does not change sign on ({lo:e}, {hi}) for type ({minus}, {plus}): \
             r(lo) = {f_lo:e}, r(hi) = {f_hi:e}"
        )));
    }
    let lo_sign = f_lo.signum();
    for it in 1..=MAX_BISECTION_ITERS {
        let mid = 0.5 * (lo + hi);
        let r = f(mid)?;
        if r.abs() < tol {
            return Ok(MixedSolution::Unique { lambda: mid, residual: r, iterations: it });
        }
        if r.signum() == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * mid {
            break;
        }
    }
    Err(Error::Solver(format!(
        "bisection for type ({minus}, {plus}) stalled at lambda in [{lo}, {hi}] without |residual| < {tol:e}"
    )))
}

/// Indifference residual at or below `tol` and no committed player gains
/// strictly (by more than `tol`) from switching sides.
pub fn verify_equilibrium(config: &GameConfig, eq: &EquilibriumType, tol: f64) -> bool {
    let (l, r, lambda) = (eq.minus, eq.plus, eq.lambda);
    if eq.mixers(config) == 0 {
        return ActionProfile::from_counts(config, l as usize)
            .map(|p| is_pure_nash(config, &p))
            .unwrap_or(false);
    }
    let residual = match indifference_residual(config, l, r, lambda) {
        Ok(v) => v,
        Err(_) => return false,
    };
    if residual.abs() >= tol {
        return false;
    }
    let gains = |side: Action| -> Result<bool> {
        let (stay, switch) = match side {
            Action::Minus => (
                expected_payoff(config, Action::Minus, l, r, lambda)?,
                expected_payoff(config, Action::Plus, l - 1, r + 1, lambda)?,
            ),
            Action::Plus => (
                expected_payoff(config, Action::Plus, l, r, lambda)?,
                expected_payoff(config, Action::Minus, l + 1, r - 1, lambda)?,
            ),
        };
        Ok(switch > stay + tol)
    };
    let minus_deviates = l > 0 && gains(Action::Minus).unwrap_or(true);
    let plus_deviates = r > 0 && gains(Action::Plus).unwrap_or(true);
    !minus_deviates && !plus_deviates
}

/// Sign changes of the indifference residual on a uniform interior grid.
///
/// Used to check the uniqueness of the mixing probability numerically.
pub fn count_residual_roots(config: &GameConfig, minus: u32, plus: u32, grid: usize) -> Result<usize> {
    let grid = grid.max(2);
    let mut roots = 0;
    let mut prev: Option<f64> = None;
    for i in 0..=grid {
        let lambda = LAMBDA_EPS + (1.0 - 2.0 * LAMBDA_EPS) * i as f64 / grid as f64;
        let r = indifference_residual(config, minus, plus, lambda)?;
        if r == 0.0 {
            roots += 1;
            prev = None;
            continue;
        }
        if let Some(p) = prev {
            if p.signum() != r.signum() {
                roots += 1;
            }
        }
        prev = Some(r);
    }
    Ok(roots)
}

/// Attendance statistics when everyone mixes 50/50.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SymmetricStats {
    /// Expected number of players on each side, `k + 1/2`.
    pub expected_per_option: f64,
    /// `Var(A) / N`, which is exactly 1 for independent fair coins.
    pub sigma2_over_n: f64,
}

pub fn symmetric_equilibrium_stats(config: &GameConfig) -> SymmetricStats {
    let n = config.n_players() as f64;
    // A is a sum of N independent +-1 coins: mean 0, variance N.
    SymmetricStats { expected_per_option: n * 0.5, sigma2_over_n: 1.0 }
}
