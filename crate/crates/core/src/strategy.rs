//! Response modes over `m`-bit histories.
//!
//! A history is the sequence of the last `m` winning sides. It is packed into
//! a [`HistoryCode`] with the most recent outcome in bit 0 and `+1` stored as
//! a set bit, so pushing a new outcome is `(code << 1 | bit) & mask`.
//!
//! A [`ResponseMode`] is a lookup table with one bit per history code (again
//! `+1` is a set bit), stored in 64-bit words.

use std::fmt;
use std::str::FromStr;

use rand::RngCore;

use crate::error::{config_err, Error, Result};
use crate::game::Action;

/// Largest supported memory length; a table then holds 65536 entries.
pub const MAX_MEMORY: u32 = 16;

fn check_memory(m: u32) -> Result<()> {
    if m == 0 {
        return Err(config_err!("memory length m must be at least 1"));
    }
    if m > MAX_MEMORY {
        return Err(config_err!("memory length m = {m} exceeds the supported maximum {MAX_MEMORY}"));
    }
    Ok(())
}

#[inline]
fn words_for(m: u32) -> usize {
    (1usize << m).div_ceil(64)
}

/// Mask of the valid bits in the last word of a `2^m`-bit table.
#[inline]
fn last_word_mask(m: u32) -> u64 {
    if m >= 6 {
        u64::MAX
    } else {
        (1u64 << (1u32 << m)) - 1
    }
}

/// The last `m` winning sides, packed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct HistoryCode {
    code: u32,
    m: u32,
}

impl HistoryCode {
    pub fn new(code: u32, m: u32) -> Result<Self> {
        check_memory(m)?;
        if u64::from(code) >= 1u64 << m {
            return Err(config_err!("history code {code} out of range for m = {m}"));
        }
        Ok(HistoryCode { code, m })
    }

    #[inline]
    pub fn code(self) -> u32 {
        self.code
    }

    #[inline]
    pub fn memory(self) -> u32 {
        self.m
    }

    /// Shifts in the newest winning side.
    #[inline]
    pub fn push(self, winner: Action) -> HistoryCode {
        let mask = (1u32 << self.m) - 1;
        HistoryCode { code: ((self.code << 1) | winner.bit() as u32) & mask, m: self.m }
    }

    /// Outcomes oldest first, the inverse of [`encode_history`].
    pub fn decode(self) -> Vec<Action> {
        (0..self.m).rev().map(|lag| Action::from_bit((self.code >> lag) & 1 == 1)).collect()
    }
}

/// Packs outcomes listed oldest first, `(w(t-m), ..., w(t-1))`.
pub fn encode_history(outcomes: &[Action]) -> Result<HistoryCode> {
    let m = u32::try_from(outcomes.len()).map_err(|_| config_err!("history too long"))?;
    check_memory(m)?;
    let code = outcomes.iter().fold(0u32, |acc, a| (acc << 1) | a.bit() as u32);
    Ok(HistoryCode { code, m })
}

/// Same as [`encode_history`] over `±1` integers.
pub fn encode_history_values(outcomes: &[i64]) -> Result<HistoryCode> {
    let actions = outcomes
        .iter()
        .map(|&v| Action::from_value(v).ok_or_else(|| config_err!("outcome must be -1 or +1, got {v}")))
        .collect::<Result<Vec<_>>>()?;
    encode_history(&actions)
}

/// A lookup table from history code to action.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ResponseMode {
    m: u32,
    words: Vec<u64>,
}

impl ResponseMode {
    /// Table entries listed by ascending history code.
    pub fn from_actions(m: u32, table: &[Action]) -> Result<Self> {
        check_memory(m)?;
        if table.len() != 1usize << m {
            return Err(config_err!("table has {} entries, expected 2^{m} = {}", table.len(), 1usize << m));
        }
        let mut words = vec![0u64; words_for(m)];
        for (h, a) in table.iter().enumerate() {
            if a.bit() {
                words[h / 64] |= 1 << (h % 64);
            }
        }
        Ok(ResponseMode { m, words })
    }

    pub fn from_values(m: u32, table: &[i64]) -> Result<Self> {
        let actions = table
            .iter()
            .map(|&v| Action::from_value(v).ok_or_else(|| config_err!("table entry must be -1 or +1, got {v}")))
            .collect::<Result<Vec<_>>>()?;
        ResponseMode::from_actions(m, &actions)
    }

    pub(crate) fn from_words(m: u32, mut words: Vec<u64>) -> Self {
        debug_assert_eq!(words.len(), words_for(m));
        if let Some(last) = words.last_mut() {
            *last &= last_word_mask(m);
        }
        ResponseMode { m, words }
    }

    /// The `i`-th Walsh sign pattern: `(-1)^popcount(i & h)` at history `h`.
    pub fn walsh(m: u32, index: u32) -> Result<Self> {
        check_memory(m)?;
        if u64::from(index) >= 1u64 << m {
            return Err(config_err!("Walsh index {index} out of range for m = {m}"));
        }
        let size = 1usize << m;
        let mut words = vec![0u64; words_for(m)];
        for h in 0..size {
            if (index & h as u32).count_ones() % 2 == 0 {
                words[h / 64] |= 1 << (h % 64);
            }
        }
        Ok(ResponseMode { m, words })
    }

    #[inline]
    pub fn memory(&self) -> u32 {
        self.m
    }

    pub fn len(&self) -> usize {
        1 << self.m
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn evaluate(&self, h: HistoryCode) -> Result<Action> {
        if h.m != self.m {
            return Err(config_err!("history has m = {}, response mode has m = {}", h.m, self.m));
        }
        Ok(self.action_at(h.code))
    }

    #[inline]
    pub fn action_at(&self, code: u32) -> Action {
        let c = code as usize;
        Action::from_bit((self.words[c / 64] >> (c % 64)) & 1 == 1)
    }

    pub fn actions(&self) -> Vec<Action> {
        (0..self.len() as u32).map(|c| self.action_at(c)).collect()
    }

    pub fn complement(&self) -> ResponseMode {
        ResponseMode::from_words(self.m, self.words.iter().map(|w| !w).collect())
    }

    /// Number of histories where the two modes prescribe different actions.
    pub fn hamming_distance(&self, other: &ResponseMode) -> Result<u32> {
        if self.m != other.m {
            return Err(config_err!("memory mismatch: {} vs {}", self.m, other.m));
        }
        Ok(self.words.iter().zip(&other.words).map(|(a, b)| (a ^ b).count_ones()).sum())
    }

    /// Mean of `s(h) * s'(h)` over all histories, in `[-1, 1]`.
    pub fn correlation(&self, other: &ResponseMode) -> Result<f64> {
        let d = self.hamming_distance(other)?;
        Ok(1.0 - 2.0 * f64::from(d) / self.len() as f64)
    }
}

impl fmt::Display for ResponseMode {
    /// One `+`/`-` character per history, ascending history code.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = (0..self.len() as u32).map(|c| self.action_at(c).symbol()).collect();
        f.write_str(&s)
    }
}

impl fmt::Debug for ResponseMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ResponseMode(m={}, {})", self.m, self)
    }
}

impl FromStr for ResponseMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let len = s.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(config_err!("response mode string length {len} is not 2^m with m >= 1"));
        }
        let actions = s
            .chars()
            .map(|c| match c {
                '+' => Ok(Action::Plus),
                '-' => Ok(Action::Minus),
                other => Err(config_err!("unexpected character {other:?} in response mode")),
            })
            .collect::<Result<Vec<_>>>()?;
        ResponseMode::from_actions(len.trailing_zeros(), &actions)
    }
}

/// Number of distinct response modes of memory `m`, `2^(2^m)`, if it fits in 128 bits.
pub fn strategy_space_size(m: u32) -> Option<u128> {
    let bits = 1u32.checked_shl(m)?;
    1u128.checked_shl(bits)
}

/// A player's fixed set of `n_S >= 2` response modes sharing one memory.
///
/// Tables are stored back to back so the engine can evaluate all modes of an
/// agent from one allocation.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Endowment {
    m: u32,
    n_modes: usize,
    stride: usize,
    words: Vec<u64>,
}

impl Endowment {
    pub fn new(modes: &[ResponseMode]) -> Result<Self> {
        if modes.len() < 2 {
            return Err(config_err!("an endowment needs at least 2 response modes, got {}", modes.len()));
        }
        let m = modes[0].m;
        if modes.iter().any(|s| s.m != m) {
            return Err(config_err!("all response modes of an endowment must share the same m"));
        }
        let stride = words_for(m);
        let words = modes.iter().flat_map(|s| s.words.iter().copied()).collect();
        Ok(Endowment { m, n_modes: modes.len(), stride, words })
    }

    #[inline]
    pub fn memory(&self) -> u32 {
        self.m
    }

    #[inline]
    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn mode(&self, j: usize) -> ResponseMode {
        let start = j * self.stride;
        ResponseMode { m: self.m, words: self.words[start..start + self.stride].to_vec() }
    }

    pub fn modes(&self) -> Vec<ResponseMode> {
        (0..self.n_modes).map(|j| self.mode(j)).collect()
    }

    /// Bit of mode `j` at the history addressed by `(word, shift)`.
    #[inline]
    pub(crate) fn bit(&self, j: usize, word: usize, shift: u32) -> bool {
        (self.words[j * self.stride + word] >> shift) & 1 == 1
    }

    #[inline]
    pub fn action(&self, j: usize, h: HistoryCode) -> Action {
        let c = h.code as usize;
        Action::from_bit(self.bit(j, c / 64, (c % 64) as u32))
    }
}

impl fmt::Debug for Endowment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.modes()).finish()
    }
}

/// Draws `n_S` tables with independent fair-coin entries (duplicates allowed).
///
/// Each table consumes `ceil(2^m / 64)` consecutive `next_u64` draws, low bit
/// first; for `m < 6` only the low `2^m` bits of the single draw are used.
pub fn sample_endowment<R: RngCore + ?Sized>(m: u32, n_modes: usize, rng: &mut R) -> Result<Endowment> {
    check_memory(m)?;
    if n_modes < 2 {
        return Err(config_err!("n_S must be at least 2, got {n_modes}"));
    }
    let stride = words_for(m);
    let mask = last_word_mask(m);
    let mut words = Vec::with_capacity(stride * n_modes);
    for _ in 0..n_modes {
        for w in 0..stride {
            let x = rng.next_u64();
            words.push(if w + 1 == stride { x & mask } else { x });
        }
    }
    Ok(Endowment { m, n_modes, stride, words })
}

/// The `2^m` Walsh patterns followed by their `2^m` complements.
///
/// Every distinct pair is either uncorrelated or exactly anti-correlated.
pub fn reduced_strategy_space(m: u32) -> Result<Vec<ResponseMode>> {
    check_memory(m)?;
    let walsh = (0..1u32 << m).map(|j| ResponseMode::walsh(m, j)).collect::<Result<Vec<_>>>()?;
    let complements: Vec<_> = walsh.iter().map(ResponseMode::complement).collect();
    Ok(walsh.into_iter().chain(complements).collect())
}

/// Pairwise correlations of a population of modes, bucketed by Hamming distance.
///
/// Correlations of memory-`m` tables take values `1 - 2d / 2^m`, so bucket `d`
/// holds the pairs at distance `d` (resolution `2 / 2^m`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorrelationHistogram {
    m: u32,
    counts: Vec<u64>,
}

impl CorrelationHistogram {
    pub fn memory(&self) -> u32 {
        self.m
    }

    pub fn total_pairs(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn count_at_distance(&self, d: usize) -> u64 {
        self.counts.get(d).copied().unwrap_or(0)
    }

    pub fn correlation_of_bucket(&self, d: usize) -> f64 {
        1.0 - 2.0 * d as f64 / (1u64 << self.m) as f64
    }

    /// Nonempty buckets as `(correlation, count)`, correlation descending.
    pub fn buckets(&self) -> Vec<(f64, u64)> {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(d, &c)| (self.correlation_of_bucket(d), c))
            .collect()
    }
}

pub fn pairwise_correlation_histogram(modes: &[ResponseMode]) -> Result<CorrelationHistogram> {
    let first = modes.first().ok_or_else(|| config_err!("need at least one response mode"))?;
    let m = first.m;
    if modes.iter().any(|s| s.m != m) {
        return Err(config_err!("all response modes must share the same m"));
    }
    let mut counts = vec![0u64; (1usize << m) + 1];
    for (i, a) in modes.iter().enumerate() {
        for b in &modes[i + 1..] {
            let d = a.hamming_distance(b)? as usize;
            counts[d] += 1;
        }
    }
    Ok(CorrelationHistogram { m, counts })
}
