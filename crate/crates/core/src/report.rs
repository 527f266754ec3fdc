//! Plain-text output formats.
//!
//! Reals are written in scientific notation with ten significant digits,
//! independent of locale. Missing values (a standard error of a single run)
//! are written as `NA`. Every file starts with `#` comment lines carrying the
//! tool version and the resolved configuration.

use std::fmt::Write as _;

use crate::engine::{EngineParams, RoundRecord};
use crate::ensemble::SweepRow;
use crate::observables::{MeasurementWindow, RunSummary};

pub const TOOL_NAME: &str = "minority-lab";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn fmt_real(x: f64) -> String {
    if x.is_nan() {
        "NA".to_string()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x:.9e}")
    }
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_real).unwrap_or_else(|| "NA".to_string())
}

/// Comment block: tool line followed by one `# key = value` line per entry.
pub fn header(config: &[(&str, String)]) -> String {
    let mut s = format!("# {TOOL_NAME} {TOOL_VERSION}\n");
    for (k, v) in config {
        let _ = writeln!(s, "# {k} = {v}");
    }
    s
}

pub const SUMMARY_COLUMNS: [&str; 15] = [
    "N",
    "m",
    "n_S",
    "beta",
    "alpha",
    "mean_A",
    "sigma2",
    "sigma2_over_N",
    "H",
    "phi",
    "mean_success",
    "t_eq",
    "t_meas",
    "seed",
    "sigma2_centered",
];

pub fn summary_header() -> String {
    SUMMARY_COLUMNS.join(",")
}

pub fn summary_row(params: &EngineParams, window: &MeasurementWindow, s: &RunSummary) -> String {
    [
        params.n_players().to_string(),
        params.memory.to_string(),
        params.n_modes.to_string(),
        params.beta.to_string(),
        fmt_real(params.alpha()),
        fmt_real(s.mean_a),
        fmt_real(s.sigma2),
        fmt_real(s.sigma2_over_n),
        fmt_real(s.h),
        fmt_real(s.phi),
        fmt_real(s.mean_success),
        window.t_eq.to_string(),
        window.t_meas.to_string(),
        params.seed.to_string(),
        fmt_real(s.sigma2_centered),
    ]
    .join(",")
}

pub const SWEEP_COLUMNS: [&str; 18] = [
    "N",
    "m",
    "n_S",
    "beta",
    "payoff",
    "alpha",
    "sigma2_over_N",
    "sigma2_over_N_se",
    "H",
    "H_se",
    "phi",
    "phi_se",
    "success",
    "success_se",
    "R",
    "t_eq",
    "t_meas",
    "master_seed",
];

pub fn sweep_header() -> String {
    SWEEP_COLUMNS.join(",")
}

pub fn sweep_row(row: &SweepRow) -> String {
    let p = &row.point;
    let s = &row.stats;
    [
        p.n_players().to_string(),
        p.memory.to_string(),
        p.n_modes.to_string(),
        p.beta.to_string(),
        p.config.payoff_spec().to_string(),
        fmt_real(row.alpha),
        fmt_real(s.sigma2_over_n.mean),
        fmt_opt(s.sigma2_over_n.stderr),
        fmt_real(s.h.mean),
        fmt_opt(s.h.stderr),
        fmt_real(s.phi.mean),
        fmt_opt(s.phi.stderr),
        fmt_real(s.success.mean),
        fmt_opt(s.success.stderr),
        s.realizations.to_string(),
        row.window.t_eq.to_string(),
        row.window.t_meas.to_string(),
        row.master_seed.to_string(),
    ]
    .join(",")
}

pub fn round_log_header() -> &'static str {
    "t,history_code,A,winning_side"
}

pub fn round_log_line(rec: &RoundRecord) -> String {
    format!("{},{},{},{}", rec.t, rec.history_before.code(), rec.attendance, rec.winning_side.value())
}

pub fn selection_log_header() -> &'static str {
    "t,agent,mode_index"
}

/// One `t,agent,mode_index` line per agent.
pub fn selection_log_lines(rec: &RoundRecord, out: &mut String) {
    for (i, sel) in rec.selected_modes.iter().enumerate() {
        let _ = writeln!(out, "{},{},{}", rec.t, i, sel);
    }
}

/// Rows grouped into series with the same `(N, n_S, beta, payoff)`, in
/// first-appearance order, each sorted by alpha.
fn series(rows: &[SweepRow]) -> Vec<(String, Vec<&SweepRow>)> {
    let mut out: Vec<(String, Vec<&SweepRow>)> = Vec::new();
    for row in rows {
        let p = &row.point;
        let key = format!("N={} n_S={} beta={} payoff={}", p.n_players(), p.n_modes, p.beta, p.config.payoff_spec());
        match out.iter_mut().find(|(k, _)| *k == key) {
            Some((_, v)) => v.push(row),
            None => out.push((key, vec![row])),
        }
    }
    for (_, v) in &mut out {
        v.sort_by(|a, b| a.alpha.total_cmp(&b.alpha));
    }
    out
}

/// Volatility against alpha, one blank-line separated block per series.
pub fn fig2_tsv(rows: &[SweepRow]) -> String {
    let mut s = String::new();
    for (i, (key, pts)) in series(rows).iter().enumerate() {
        if i > 0 {
            s.push_str("\n\n");
        }
        let _ = writeln!(s, "# series {key}");
        s.push_str("N\talpha\tsigma2_over_N\tsigma2_over_N_se\n");
        for r in pts {
            let _ = writeln!(
                s,
                "{}\t{}\t{}\t{}",
                r.point.n_players(),
                fmt_real(r.alpha),
                fmt_real(r.stats.sigma2_over_n.mean),
                fmt_opt(r.stats.sigma2_over_n.stderr)
            );
        }
    }
    s
}

/// Predictability `H / N` and frozen fraction against alpha.
pub fn fig3_tsv(rows: &[SweepRow]) -> String {
    let mut s = String::new();
    for (i, (key, pts)) in series(rows).iter().enumerate() {
        if i > 0 {
            s.push_str("\n\n");
        }
        let _ = writeln!(s, "# series {key}");
        s.push_str("N\talpha\tH_over_N\tH_over_N_se\tphi\tphi_se\n");
        for r in pts {
            let n = r.point.n_players() as f64;
            let _ = writeln!(
                s,
                "{}\t{}\t{}\t{}\t{}\t{}",
                r.point.n_players(),
                fmt_real(r.alpha),
                fmt_real(r.stats.h.mean / n),
                fmt_opt(r.stats.h.stderr.map(|e| e / n)),
                fmt_real(r.stats.phi.mean),
                fmt_opt(r.stats.phi.stderr)
            );
        }
    }
    s
}
