//! Straight-line reference implementation of the learning loop.
//!
//! Written against the documented random-stream protocol only; it shares no
//! code with the engine beyond the RNG crate.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// One reference round: (t, history before, attendance, winning side, actions, selected modes).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleRound {
    pub t: u64,
    pub history: u32,
    pub attendance: i64,
    pub winner: i64,
    pub actions: Vec<i64>,
    pub selected: Vec<usize>,
}

/// `beta = inf`, `n_S = 2`, linear payoff, memory `m <= 5`, tables drawn from `seed`.
pub fn trace_linear_inf(n: usize, m: u32, seed: u64, rounds: u64) -> Vec<OracleRound> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let table_bits = 1u32 << m;
    let table_mask = (1u64 << table_bits) - 1;
    let mut tables = vec![[0u64; 2]; n];
    for agent in tables.iter_mut() {
        agent[0] = rng.next_u64() & table_mask;
        agent[1] = rng.next_u64() & table_mask;
    }
    let history_mask = (1u64 << m) - 1;
    let history = (rng.next_u64() & history_mask) as u32;
    trace_from(tables, m, history, rng, rounds)
}

/// Same loop with explicit tables, starting history and random stream.
pub fn trace_from(tables: Vec<[u64; 2]>, m: u32, mut history: u32, mut rng: ChaCha8Rng, rounds: u64) -> Vec<OracleRound> {
    let n = tables.len();
    // score in units of 1/N: p <- p - s(h) * A
    let mut score = vec![[0i64; 2]; n];
    let mut out = Vec::new();
    for t in 0..rounds {
        let mut actions = Vec::with_capacity(n);
        let mut selected = Vec::with_capacity(n);
        for i in 0..n {
            let pick = if score[i][0] > score[i][1] {
                0
            } else if score[i][1] > score[i][0] {
                1
            } else {
                rng.random_range(0..2usize)
            };
            let bit = (tables[i][pick] >> history) & 1;
            actions.push(if bit == 1 { 1i64 } else { -1 });
            selected.push(pick);
        }
        let a: i64 = actions.iter().sum();
        let winner = if a > 0 { -1 } else { 1 };
        for i in 0..n {
            for j in 0..2 {
                let s = if (tables[i][j] >> history) & 1 == 1 { 1 } else { -1 };
                score[i][j] -= s * a;
            }
        }
        out.push(OracleRound { t, history, attendance: a, winner, actions, selected });
        let win_bit = if winner == 1 { 1 } else { 0 };
        history = ((history << 1) | win_bit) & ((1u32 << m) - 1);
    }
    out
}
