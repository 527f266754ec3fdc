//! Summary statistics of a run: mean attendance, volatility `<A^2>`,
//! predictability `H`, frozen fraction `phi` and success rates.
//!
//! [`Observer`] computes all of them in one streaming pass with memory
//! independent of the run length. The free functions do the same over a
//! recorded slice and exist mostly for analysis of stored logs.

use crate::engine::RoundRecord;
use crate::error::{Error, Result};

/// Rounds discarded for equilibration, then rounds measured.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct MeasurementWindow {
    pub t_eq: u64,
    pub t_meas: u64,
}

impl MeasurementWindow {
    pub fn new(t_eq: u64, t_meas: u64) -> Result<Self> {
        if t_meas == 0 {
            return Err(Error::Measurement("measurement window must cover at least one round".into()));
        }
        Ok(MeasurementWindow { t_eq, t_meas })
    }

    /// `t_eq = max(1000, 200 * 2^m)`, `t_meas = max(10000, 200 * 2^m)`.
    pub fn default_for_memory(m: u32) -> Self {
        let scale = 200u64 << m;
        MeasurementWindow { t_eq: scale.max(1_000), t_meas: scale.max(10_000) }
    }

    pub fn total(&self) -> u64 {
        self.t_eq + self.t_meas
    }

    fn slice<'a, T>(&self, items: &'a [T]) -> Result<&'a [T]> {
        if self.t_meas == 0 {
            return Err(Error::Measurement("empty measurement window".into()));
        }
        let end = self.total();
        if end > items.len() as u64 {
            return Err(Error::Measurement(format!(
                "window needs {end} rounds but only {} were recorded",
                items.len()
            )));
        }
        Ok(&items[self.t_eq as usize..end as usize])
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunSummary {
    pub n_players: usize,
    pub rounds: u64,
    pub mean_a: f64,
    /// Raw second moment `<A^2>`.
    pub sigma2: f64,
    /// `<A^2> - <A>^2`.
    pub sigma2_centered: f64,
    pub sigma2_over_n: f64,
    pub h: f64,
    /// Conditional means weighted by visit frequency instead of `1 / 2^m`.
    pub h_weighted: f64,
    pub phi: f64,
    pub mean_success: f64,
}

/// Streaming accumulator over a run's records.
///
/// The first `t_eq` pushed rounds are ignored, the next `t_meas` measured, and
/// anything after that is ignored as well.
#[derive(Clone, Debug)]
pub struct Observer {
    window: MeasurementWindow,
    n_players: usize,
    seen: u64,
    measured: u64,
    sum_a: i64,
    sum_a2: u64,
    cond_sum: Vec<i64>,
    cond_count: Vec<u64>,
    first_mode: Vec<usize>,
    switched: Vec<bool>,
    wins: Vec<u64>,
}

impl Observer {
    pub fn new(n_players: usize, memory: u32, window: MeasurementWindow) -> Observer {
        let histories = 1usize << memory;
        Observer {
            window,
            n_players,
            seen: 0,
            measured: 0,
            sum_a: 0,
            sum_a2: 0,
            cond_sum: vec![0; histories],
            cond_count: vec![0; histories],
            first_mode: vec![usize::MAX; n_players],
            switched: vec![false; n_players],
            wins: vec![0; n_players],
        }
    }

    pub fn is_complete(&self) -> bool {
        self.measured >= self.window.t_meas
    }

    pub fn push(&mut self, rec: &RoundRecord) {
        let idx = self.seen;
        self.seen += 1;
        if idx < self.window.t_eq || self.is_complete() {
            return;
        }
        let first = self.measured == 0;
        self.measured += 1;

        let a = rec.attendance;
        self.sum_a += a;
        self.sum_a2 += (a * a) as u64;
        let nu = rec.history_before.code() as usize;
        self.cond_sum[nu] += a;
        self.cond_count[nu] += 1;

        if first {
            self.first_mode.copy_from_slice(&rec.selected_modes);
        } else {
            for ((switched, &first), &sel) in self.switched.iter_mut().zip(&self.first_mode).zip(&rec.selected_modes) {
                *switched |= sel != first;
            }
        }
        for (wins, &act) in self.wins.iter_mut().zip(&rec.actions) {
            *wins += u64::from(act == rec.winning_side);
        }
    }

    pub fn per_agent_success(&self) -> Vec<f64> {
        let t = self.measured.max(1) as f64;
        self.wins.iter().map(|&w| w as f64 / t).collect()
    }

    pub fn finish(&self) -> Result<RunSummary> {
        if self.measured == 0 {
            return Err(Error::Measurement("no rounds fell inside the measurement window".into()));
        }
        if self.measured < self.window.t_meas {
            return Err(Error::Measurement(format!(
                "window incomplete: measured {} of {} rounds",
                self.measured, self.window.t_meas
            )));
        }
        let t = self.measured as f64;
        let n = self.n_players as f64;
        let mean_a = self.sum_a as f64 / t;
        let sigma2 = self.sum_a2 as f64 / t;
        let (h, h_weighted) = h_from_conditionals(&self.cond_sum, &self.cond_count);
        let frozen = self.switched.iter().filter(|&&s| !s).count();
        let total_wins: u64 = self.wins.iter().sum();
        Ok(RunSummary {
            n_players: self.n_players,
            rounds: self.measured,
            mean_a,
            sigma2,
            sigma2_centered: (sigma2 - mean_a * mean_a).max(0.0),
            sigma2_over_n: sigma2 / n,
            h,
            h_weighted,
            phi: frozen as f64 / n,
            mean_success: total_wins as f64 / (t * n),
        })
    }
}

fn h_from_conditionals(sum: &[i64], count: &[u64]) -> (f64, f64) {
    let histories = sum.len() as f64;
    let total: u64 = count.iter().sum();
    let mut h = 0.0;
    let mut weighted = 0.0;
    for (&s, &c) in sum.iter().zip(count) {
        if c == 0 {
            continue;
        }
        let mean = s as f64 / c as f64;
        h += mean * mean;
        weighted += c as f64 / total as f64 * mean * mean;
    }
    (h / histories, weighted)
}

/// `(<A>, <A^2>)` over the window.
pub fn volatility(records: &[RoundRecord], window: MeasurementWindow) -> Result<(f64, f64)> {
    let w = window.slice(records)?;
    let t = w.len() as f64;
    let sum: i64 = w.iter().map(|r| r.attendance).sum();
    let sum2: u64 = w.iter().map(|r| (r.attendance * r.attendance) as u64).sum();
    Ok((sum as f64 / t, sum2 as f64 / t))
}

/// `(1 / 2^m) * sum_nu <A | history = nu>^2`; unvisited histories count as 0.
pub fn predictability(records: &[RoundRecord], window: MeasurementWindow, memory: u32) -> Result<f64> {
    let w = window.slice(records)?;
    let mut sum = vec![0i64; 1 << memory];
    let mut count = vec![0u64; 1 << memory];
    for r in w {
        if r.history_before.memory() != memory {
            return Err(Error::Measurement(format!(
                "record at t = {} has m = {}, expected {memory}",
                r.t,
                r.history_before.memory()
            )));
        }
        let nu = r.history_before.code() as usize;
        sum[nu] += r.attendance;
        count[nu] += 1;
    }
    Ok(h_from_conditionals(&sum, &count).0)
}

/// Fraction of agents whose selected mode never changes inside the window.
///
/// `selection_log[t][i]` is the mode agent `i` used in round `t`.
pub fn frozen_fraction(selection_log: &[Vec<usize>], window: MeasurementWindow) -> Result<f64> {
    let w = window.slice(selection_log)?;
    let first = w.first().ok_or_else(|| Error::Measurement("missing selection log".into()))?;
    if first.is_empty() {
        return Err(Error::Measurement("selection log has no agents".into()));
    }
    if let Some(row) = w.iter().find(|row| row.len() != first.len()) {
        return Err(Error::Measurement(format!(
            "selection log rows disagree on the agent count ({} vs {})",
            row.len(),
            first.len()
        )));
    }
    let frozen = (0..first.len()).filter(|&i| w.iter().all(|row| row[i] == first[i])).count();
    Ok(frozen as f64 / first.len() as f64)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuccessRates {
    pub per_agent: Vec<f64>,
    pub mean: f64,
}

/// Share of measured rounds each agent spent on the minority side.
pub fn success_rates(records: &[RoundRecord], window: MeasurementWindow) -> Result<SuccessRates> {
    let w = window.slice(records)?;
    let n = w[0].actions.len();
    let mut wins = vec![0u64; n];
    for r in w {
        for (i, &a) in r.actions.iter().enumerate() {
            if a == r.winning_side {
                wins[i] += 1;
            }
        }
    }
    let t = w.len() as f64;
    let per_agent: Vec<f64> = wins.iter().map(|&c| c as f64 / t).collect();
    let mean = per_agent.iter().sum::<f64>() / n as f64;
    Ok(SuccessRates { per_agent, mean })
}
