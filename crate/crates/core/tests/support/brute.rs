//! Exhaustive-enumeration oracles for the stage game.

use minority_core::PayoffSpec;

/// Stage payoff of a player choosing `a` when the attendance is `att` among `n` players.
pub fn payoff(spec: PayoffSpec, n: usize, a: i64, att: i64) -> f64 {
    match spec {
        PayoffSpec::Linear => -(a * att) as f64 / n as f64,
        PayoffSpec::Sign => -(a * att.signum()) as f64,
        PayoffSpec::Step => {
            // players on my side
            let mine = (n as i64 + a * att) / 2;
            if mine <= (n as i64 - 1) / 2 {
                1.0
            } else {
                0.0
            }
        }
    }
}

/// Whether `profile` (bit i set = player i plays +1) is a pure Nash equilibrium.
pub fn is_nash_profile(spec: PayoffSpec, n: usize, profile: u32) -> bool {
    let act = |p: u32, i: usize| if (p >> i) & 1 == 1 { 1i64 } else { -1 };
    let att = |p: u32| (0..n).map(|i| act(p, i)).sum::<i64>();
    let a0 = att(profile);
    (0..n).all(|i| {
        let dev = profile ^ (1 << i);
        payoff(spec, n, act(dev, i), att(dev)) <= payoff(spec, n, act(profile, i), a0)
    })
}

/// Expected payoff of a player committed to `side` among `minus` sure `-1`
/// players (including it, if `side == -1`) and `plus` sure `+1` players,
/// the rest mixing with `P(-1) = lambda`: sum over all `2^z` mixer outcomes.
pub fn expected_payoff(spec: PayoffSpec, n: usize, side: i64, minus: usize, plus: usize, lambda: f64) -> f64 {
    let z = n - minus - plus;
    let base = plus as i64 - minus as i64;
    let mut total = 0.0;
    for mask in 0u32..(1u32 << z) {
        let pluses = mask.count_ones() as i64;
        let att = base + pluses - (z as i64 - pluses);
        let w = (1.0 - lambda).powi(pluses as i32) * lambda.powi(z as i32 - pluses as i32);
        total += w * payoff(spec, n, side, att);
    }
    total
}
