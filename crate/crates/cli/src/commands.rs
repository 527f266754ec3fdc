use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use minority_core::equilibrium::{count_pure_nash, solve_mixed_equilibrium, symmetric_equilibrium_stats, DEFAULT_TOL};
use minority_core::ensemble::{critical_alpha_estimate, locate_volatility_minimum, DEFAULT_REALIZATIONS};
use minority_core::report::{self, fmt_real};
use minority_core::strategy::{pairwise_correlation_histogram, reduced_strategy_space, sample_endowment, MAX_MEMORY};
use minority_core::{
    Beta, EngineParams, EngineState, Error, GameConfig, MeasurementWindow, MixedSolution, Observer, PayoffSpec,
    SweepGrid, SweepPoint, SweepRow, WindowPolicy,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::{parse_int_list, parse_list, FileValues};
use crate::{NashArgs, SimulateArgs, StrategiesArgs, SweepArgs};

/// An error with the exit code it maps to.
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

type Outcome = Result<ExitCode, Failure>;

fn usage(error: anyhow::Error) -> Failure {
    Failure { code: 2, error }
}

fn runtime(error: anyhow::Error) -> Failure {
    Failure { code: 1, error }
}

/// Bad parameters are usage errors; everything else happened while running.
fn core(e: Error) -> Failure {
    match e {
        Error::Config(_) | Error::Domain(_) => usage(e.into()),
        _ => runtime(e.into()),
    }
}

trait OrUsage<T> {
    fn or_usage(self) -> Result<T, Failure>;
}

impl<T> OrUsage<T> for anyhow::Result<T> {
    fn or_usage(self) -> Result<T, Failure> {
        self.map_err(usage)
    }
}

impl<T> OrUsage<T> for Result<T, Error> {
    fn or_usage(self) -> Result<T, Failure> {
        self.map_err(|e| usage(e.into()))
    }
}

fn required<T>(v: Option<T>, flag: &str) -> Result<T, Failure> {
    v.ok_or_else(|| usage(anyhow!("missing required --{flag}")))
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path)
        .map(BufWriter::new)
        .with_context(|| format!("cannot create {}", path.display()))
        .map_err(runtime)
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display())).map_err(runtime)
}

fn io_err(path: &Path) -> impl Fn(io::Error) -> Failure + '_ {
    move |e| runtime(anyhow!(e).context(format!("writing {}", path.display())))
}

fn window(t_eq: Option<u64>, t_meas: Option<u64>, m: u32) -> Result<MeasurementWindow, Failure> {
    let d = MeasurementWindow::default_for_memory(m);
    MeasurementWindow::new(t_eq.unwrap_or(d.t_eq), t_meas.unwrap_or(d.t_meas)).or_usage()
}

pub fn simulate(a: SimulateArgs) -> Outcome {
    let mut f = FileValues::load(a.config.as_deref()).or_usage()?;
    let n = required(f.pick(a.n, "n").or_usage()?, "n")?;
    let m = required(f.pick(a.m, "m").or_usage()?, "m")?;
    let ns = f.pick(a.ns, "ns").or_usage()?.unwrap_or(2);
    let beta: Beta = f.pick(a.beta, "beta").or_usage()?.unwrap_or_else(|| "inf".into()).parse::<Beta>().or_usage()?;
    let payoff: PayoffSpec =
        f.pick(a.payoff, "payoff").or_usage()?.unwrap_or_else(|| "linear".into()).parse::<PayoffSpec>().or_usage()?;
    let seed = f.pick(a.seed, "seed").or_usage()?.unwrap_or(0);
    let t_eq = f.pick(a.t_eq, "t-eq").or_usage()?;
    let t_meas = f.pick(a.t_meas, "t-meas").or_usage()?;
    let out = f.pick(a.out, "out").or_usage()?;
    let round_log: Option<PathBuf> = f.pick(a.round_log, "round-log").or_usage()?;
    let selection_log: Option<PathBuf> = f.pick(a.selection_log, "selection-log").or_usage()?;
    f.finish().or_usage()?;

    let cfg = GameConfig::with_players(n, payoff).map_err(core)?;
    let params = EngineParams::new(cfg, m, ns, beta, seed).map_err(core)?;
    let w = window(t_eq, t_meas, m)?;
    let head = report::header(&[
        ("command", "simulate".into()),
        ("n", n.to_string()),
        ("m", m.to_string()),
        ("ns", ns.to_string()),
        ("beta", beta.to_string()),
        ("payoff", payoff.to_string()),
        ("seed", seed.to_string()),
        ("t-eq", w.t_eq.to_string()),
        ("t-meas", w.t_meas.to_string()),
    ]);

    let mut rounds = match &round_log {
        Some(p) => {
            let mut fh = create(p)?;
            writeln!(fh, "{head}{}", report::round_log_header()).map_err(io_err(p))?;
            Some((p, fh))
        }
        None => None,
    };
    let mut selections = match &selection_log {
        Some(p) => {
            let mut fh = create(p)?;
            writeln!(fh, "{head}{}", report::selection_log_header()).map_err(io_err(p))?;
            Some((p, fh))
        }
        None => None,
    };

    let mut state = EngineState::init(params).map_err(core)?;
    let mut obs = Observer::new(params.n_players(), m, w);
    let mut first_err: Option<Failure> = None;
    let mut line = String::new();
    state.run_with(w.total(), |rec| {
        obs.push(rec);
        if first_err.is_some() {
            return;
        }
        if let Some((p, fh)) = rounds.as_mut() {
            if let Err(e) = writeln!(fh, "{}", report::round_log_line(rec)) {
                first_err = Some(io_err(p)(e));
            }
        }
        if let Some((p, fh)) = selections.as_mut() {
            line.clear();
            report::selection_log_lines(rec, &mut line);
            if let Err(e) = fh.write_all(line.as_bytes()) {
                first_err = Some(io_err(p)(e));
            }
        }
    });
    if let Some(e) = first_err {
        return Err(e);
    }
    for (p, fh) in rounds.iter_mut().chain(selections.iter_mut()) {
        fh.flush().map_err(io_err(p))?;
    }

    let summary = obs.finish().map_err(core)?;
    let row = report::summary_row(&params, &w, &summary);
    if let Some(p) = &out {
        write_file(p, &format!("{head}{}\n{row}\n", report::summary_header()))?;
    }
    println!("{}\n{row}", report::summary_header());
    Ok(ExitCode::SUCCESS)
}

pub fn sweep(a: SweepArgs) -> Outcome {
    let mut f = FileValues::load(a.config.as_deref()).or_usage()?;
    let ns_text: Option<String> = f.pick(a.n, "n").or_usage()?;
    let n_list = parse_int_list(&required(ns_text, "n")?).or_usage()?;
    let m_list = parse_int_list(&required(f.pick(a.m, "m").or_usage()?, "m")?).or_usage()?;
    let modes_list = parse_int_list(&f.pick(a.ns, "ns").or_usage()?.unwrap_or_else(|| "2".into())).or_usage()?;
    let beta_list: Vec<Beta> = f
        .pick(a.beta, "beta")
        .or_usage()?
        .unwrap_or_else(|| "inf".into())
        .split(',')
        .map(|s| s.parse::<Beta>())
        .collect::<Result<_, _>>()
        .or_usage()?;
    let payoff_list: Vec<PayoffSpec> =
        parse_list(&f.pick(a.payoff, "payoff").or_usage()?.unwrap_or_else(|| "linear".into())).or_usage()?;
    let r = f.pick(a.r, "r").or_usage()?.unwrap_or(DEFAULT_REALIZATIONS);
    let master_seed = f.pick(a.master_seed, "master-seed").or_usage()?.unwrap_or(0);
    let workers = f.pick(a.workers, "workers").or_usage()?;
    let t_eq = f.pick(a.t_eq, "t-eq").or_usage()?;
    let t_meas = f.pick(a.t_meas, "t-meas").or_usage()?;
    let out: Option<PathBuf> = f.pick(a.out, "out").or_usage()?;
    let emit_figs = f.pick_flag(a.emit_figs, "emit-figs").or_usage()?;
    let fig_dir: Option<PathBuf> = f.pick(a.fig_dir, "fig-dir").or_usage()?;
    f.finish().or_usage()?;

    let policy = match (t_eq, t_meas) {
        (None, None) => WindowPolicy::Scaled,
        (Some(e), Some(m)) => WindowPolicy::Fixed(MeasurementWindow::new(e, m).or_usage()?),
        _ => return Err(usage(anyhow!("--t-eq and --t-meas must be given together"))),
    };
    if workers == Some(0) {
        return Err(usage(anyhow!("--workers must be at least 1")));
    }
    let mut points = Vec::new();
    for &payoff in &payoff_list {
        for &beta in &beta_list {
            for &n_modes in &modes_list {
                for &n in &n_list {
                    for &m in &m_list {
                        let m = u32::try_from(m).map_err(|_| usage(anyhow!("memory {m} out of range")))?;
                        points.push(SweepPoint::new(n, m, n_modes as usize, beta, payoff).map_err(core)?);
                    }
                }
            }
        }
    }
    let grid = SweepGrid { points, realizations: r, master_seed, window: policy };
    grid.validate().map_err(core)?;

    let join = |xs: Vec<String>| xs.join(",");
    let head = report::header(&[
        ("command", "sweep".into()),
        ("n", join(n_list.iter().map(u64::to_string).collect())),
        ("m", join(m_list.iter().map(u64::to_string).collect())),
        ("ns", join(modes_list.iter().map(u64::to_string).collect())),
        ("beta", join(beta_list.iter().map(Beta::to_string).collect())),
        ("payoff", join(payoff_list.iter().map(PayoffSpec::to_string).collect())),
        ("r", r.to_string()),
        ("master-seed", master_seed.to_string()),
        (
            "window",
            match policy {
                WindowPolicy::Scaled => "t-eq = max(1000, 200 * 2^m), t-meas = max(10000, 200 * 2^m)".into(),
                WindowPolicy::Fixed(w) => format!("t-eq = {}, t-meas = {}", w.t_eq, w.t_meas),
            },
        ),
    ]);

    let results = minority_core::sweep(&grid, workers).map_err(core)?;
    let mut rows: Vec<SweepRow> = Vec::new();
    let mut failed = 0;
    for res in results {
        match res {
            Ok(row) => rows.push(row),
            Err(pf) => {
                failed += 1;
                eprintln!(
                    "point {} (N={} m={} n_S={} beta={}) failed: {}",
                    pf.index,
                    pf.point.n_players(),
                    pf.point.memory,
                    pf.point.n_modes,
                    pf.point.beta,
                    pf.error
                );
            }
        }
    }

    let mut csv = format!("{head}{}\n", report::sweep_header());
    for row in &rows {
        csv.push_str(&report::sweep_row(row));
        csv.push('\n');
    }
    match &out {
        Some(p) => write_file(p, &csv)?,
        None => print!("{csv}"),
    }
    if emit_figs {
        let dir = fig_dir
            .or_else(|| out.as_ref().and_then(|p| p.parent()).map(Path::to_path_buf))
            .unwrap_or_else(|| PathBuf::from("."));
        write_file(&dir.join("fig2.tsv"), &format!("{head}{}", report::fig2_tsv(&rows)))?;
        write_file(&dir.join("fig3.tsv"), &format!("{head}{}", report::fig3_tsv(&rows)))?;
    }

    // located minimum per series, next to the reference formula
    let mut notes = String::new();
    let mut keys: Vec<(usize, usize, Beta, PayoffSpec)> = Vec::new();
    for r in &rows {
        let key = (r.point.n_players(), r.point.n_modes, r.point.beta, r.point.config.payoff_spec());
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    for key in keys {
        let series: Vec<SweepRow> = rows
            .iter()
            .filter(|r| (r.point.n_players(), r.point.n_modes, r.point.beta, r.point.config.payoff_spec()) == key)
            .cloned()
            .collect();
        let label = format!("N={} n_S={} beta={} payoff={}", key.0, key.1, key.2, key.3);
        let reference = fmt_real(critical_alpha_estimate(key.1));
        let _ = match locate_volatility_minimum(&series) {
            Ok(v) => writeln!(
                notes,
                "minimum {label}: alpha={} sigma2_over_N={} alpha_c_reference={reference}",
                fmt_real(v.alpha),
                fmt_real(v.sigma2_over_n)
            ),
            Err(e) => writeln!(notes, "minimum {label}: {e}; alpha_c_reference={reference}"),
        };
    }
    if out.is_some() {
        print!("{notes}");
    } else {
        eprint!("{notes}");
    }

    if failed > 0 {
        return Err(runtime(anyhow!("{failed} of {} grid points failed", grid.points.len())));
    }
    Ok(ExitCode::SUCCESS)
}

pub fn nash(a: NashArgs) -> Outcome {
    let mut f = FileValues::load(a.config.as_deref()).or_usage()?;
    let n = required(f.pick(a.n, "n").or_usage()?, "n")?;
    let payoff: PayoffSpec =
        f.pick(a.payoff, "payoff").or_usage()?.unwrap_or_else(|| "linear".into()).parse::<PayoffSpec>().or_usage()?;
    let l = f.pick(a.l, "l").or_usage()?;
    let r = f.pick(a.r, "r").or_usage()?;
    let tol = f.pick(a.tol, "tol").or_usage()?.unwrap_or(DEFAULT_TOL);
    f.finish().or_usage()?;
    if !(tol > 0.0) {
        return Err(usage(anyhow!("--tol must be positive")));
    }
    let cfg = GameConfig::with_players(n, payoff).map_err(core)?;

    match (l, r) {
        (None, None) => {
            let count = count_pure_nash(cfg.k()).map(|c| c.to_string()).map_err(core)?;
            let sym = symmetric_equilibrium_stats(&cfg);
            println!(
                "N={n} payoff={payoff} pure_ne_count={count} symmetric_lambda={} expected_per_option={} sigma2_over_N={}",
                fmt_real(0.5),
                fmt_real(sym.expected_per_option),
                fmt_real(sym.sigma2_over_n)
            );
        }
        (Some(l), Some(r)) => {
            let text = match solve_mixed_equilibrium(&cfg, l, r, tol).map_err(core)? {
                MixedSolution::Unique { lambda, residual, iterations } => format!(
                    "lambda={} residual={} iterations={iterations}",
                    fmt_real(lambda),
                    fmt_real(residual)
                ),
                MixedSolution::AnyLambda => "lambda=any".to_string(),
                MixedSolution::NoEquilibrium => "lambda=none".to_string(),
            };
            println!("N={n} payoff={payoff} l={l} r={r} {text}");
        }
        _ => return Err(usage(anyhow!("--l and --r must be given together"))),
    }
    Ok(ExitCode::SUCCESS)
}

pub fn strategies(a: StrategiesArgs) -> Outcome {
    let mut f = FileValues::load(a.config.as_deref()).or_usage()?;
    let m = required(f.pick(a.m, "m").or_usage()?, "m")?;
    let reduced = f.pick_flag(a.reduced, "reduced").or_usage()?;
    let sample = f.pick(a.sample, "sample").or_usage()?;
    let ns = f.pick(a.ns, "ns").or_usage()?.unwrap_or(2);
    let hist = f.pick_flag(a.hist, "hist").or_usage()?;
    let seed = f.pick(a.seed, "seed").or_usage()?.unwrap_or(0);
    let out: Option<PathBuf> = f.pick(a.out, "out").or_usage()?;
    f.finish().or_usage()?;
    if m == 0 || m > MAX_MEMORY {
        return Err(usage(anyhow!("--m must be in 1..={MAX_MEMORY}, got {m}")));
    }
    if !reduced && sample.is_none() {
        return Err(usage(anyhow!("nothing to do: pass --reduced and/or --sample")));
    }
    if hist && sample.is_none() {
        return Err(usage(anyhow!("--hist needs --sample")));
    }

    let mut text = String::new();
    if reduced {
        for mode in reduced_strategy_space(m).map_err(core)? {
            let _ = writeln!(text, "{mode}");
        }
    }
    if let Some(players) = sample {
        if players == 0 {
            return Err(usage(anyhow!("--sample must be at least 1")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut modes = Vec::with_capacity(players * ns);
        for _ in 0..players {
            modes.extend(sample_endowment(m, ns, &mut rng).map_err(core)?.modes());
        }
        if hist {
            let h = pairwise_correlation_histogram(&modes).map_err(core)?;
            let _ = writeln!(text, "correlation\tpairs");
            for (corr, count) in h.buckets() {
                let _ = writeln!(text, "{}\t{count}", fmt_real(corr));
            }
        } else {
            let _ = writeln!(text, "agent,mode,table");
            for (i, mode) in modes.iter().enumerate() {
                let _ = writeln!(text, "{},{},{mode}", i / ns, i % ns);
            }
        }
    }

    match &out {
        Some(p) => {
            let head = report::header(&[
                ("command", "strategies".into()),
                ("m", m.to_string()),
                ("reduced", reduced.to_string()),
                ("sample", sample.map_or("none".into(), |s| s.to_string())),
                ("ns", ns.to_string()),
                ("hist", hist.to_string()),
                ("seed", seed.to_string()),
            ]);
            write_file(p, &format!("{head}{text}"))?;
        }
        None => print!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}
