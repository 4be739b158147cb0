//! Command-line front door: parse flags, dispatch the experiment runners,
//! persist records and summaries.
//!
//! Exit codes: 0 success, 2 configuration error (the message names the
//! offending flag), 1 runtime failure. Every run appends one JSON record to
//! `records.jsonl` under the output directory and regenerates `summary.csv`;
//! stdout carries a one-line human summary.

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::analytics::{self, StorageParams, TailModel};
use crate::error::Error;
use crate::experiments::store::{
    write_summary_csv, ConstantRecord, ExperimentRecord, ExperimentResult, PickandsLimitRecord,
    RatioSet, Store, TailRunRecord,
};
use crate::experiments::{run_brownian_counterexample, run_strong_piterbarg, PiterbargOptions, ScalingRule};
use crate::gaussgen::{FbmSampler, Hurst};
use crate::pickands::{estimate_constant, estimate_pickands_limit, EstimateConfig, EtaSpec, Functional};
use crate::rng::RngStream;
use crate::stats::{ratio_stderr, Proportion};
use crate::storage::{self, estimate_tail_probs, SimConfig};

#[derive(Parser, Debug)]
#[command(
    name = "fracqueue",
    about = "Storage processes fed by fractional Brownian motion: sampling, tail estimation, Pickands-type constants, closed-form asymptotics",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Dump one exact fBm sample path as CSV (t,value; 17 significant digits)
    Gen(GenArgs),
    /// Estimate the inf/value/sup tail triple of Q on a window by Monte Carlo
    Qtail(QtailArgs),
    /// Estimate Pickands-type constants for a functional of an fBm path or field
    Pickands(PickandsArgs),
    /// Evaluate the closed-form constants and the explicit tail asymptotic
    Asympt(AsymptArgs),
    /// Strong Piterbarg study: tail ratios across levels under a window rule (H > 1/2)
    Piterbarg(PiterbargArgs),
    /// Brownian counterexample study against the exact infimum law (H = 1/2)
    BrownianCheck(BrownianArgs),
    /// Regenerate summary tables from the experiment store
    Report(ReportArgs),
}

#[derive(Args, Debug)]
struct CommonOut {
    /// Output directory for records.jsonl and summary.csv
    #[arg(long = "out", value_name = "DIR", default_value = "runs")]
    out: PathBuf,
    /// Base RNG seed (dimensionless)
    #[arg(long = "seed", default_value_t = 1)]
    seed: u64,
    /// Worker threads (0 = all cores); results are identical for any count
    #[arg(long = "workers", default_value_t = 0)]
    workers: usize,
}

#[derive(Args, Debug)]
struct GenArgs {
    /// Hurst parameter in (0,1), dimensionless
    #[arg(long = "h")]
    h: f64,
    /// Path span S (time units)
    #[arg(long = "S", default_value_t = 1.0)]
    s: f64,
    /// Grid step (time units)
    #[arg(long = "step", default_value_t = 0.001)]
    step: f64,
    #[command(flatten)]
    common: CommonOut,
}

#[derive(Args, Debug)]
struct QtailArgs {
    /// Hurst parameter in (0,1), dimensionless
    #[arg(long = "h")]
    h: f64,
    /// Service rate c > 0 (work/time)
    #[arg(long = "c", default_value_t = 1.0)]
    c: f64,
    /// Threshold level u > 0 (work units)
    #[arg(long = "u")]
    u: f64,
    /// Window length T >= 0 (time units)
    #[arg(long = "T", default_value_t = 0.0)]
    window: f64,
    /// Grid step (time units; default from the resolution rule)
    #[arg(long = "step")]
    step: Option<f64>,
    /// Horizon multiple of u*tau0 (dimensionless)
    #[arg(long = "kappa", default_value_t = 5.0)]
    kappa: f64,
    /// Monte Carlo replicates
    #[arg(long = "reps", default_value_t = 100_000)]
    reps: u64,
    /// Pickands constant for the asymptotic prediction column (dimensionless)
    #[arg(long = "pickands")]
    pickands: Option<f64>,
    #[command(flatten)]
    common: CommonOut,
}

#[derive(Args, Debug)]
struct PickandsArgs {
    /// Hurst parameter in (0,1), dimensionless
    #[arg(long = "h")]
    h: f64,
    /// Functional to estimate the constant for
    #[arg(long = "phi", value_parser = ["sup", "inf", "infsup", "integral"])]
    phi: String,
    /// Window sizes S (time units; comma separated; >= 3 values also fit the
    /// classical-constant slope for --phi sup)
    #[arg(long = "S", value_delimiter = ',', default_value = "1")]
    s: Vec<f64>,
    /// First-axis window for infsup (time units)
    #[arg(long = "lambda1", default_value_t = 1.0)]
    lambda1: f64,
    /// Second-axis window for infsup (time units)
    #[arg(long = "lambda2", default_value_t = 1.0)]
    lambda2: f64,
    /// Local correlation coefficient a > 0 of the field (dimensionless)
    #[arg(long = "a", default_value_t = 1.0)]
    a_coef: f64,
    /// Reporting grid step (time units); sampling refines to step/2
    #[arg(long = "step", default_value_t = 0.01)]
    step: f64,
    /// Monte Carlo replicates per window
    #[arg(long = "reps", default_value_t = 100_000)]
    reps: u64,
    #[command(flatten)]
    common: CommonOut,
}

#[derive(Args, Debug)]
struct AsymptArgs {
    /// Hurst parameter in (0,1), dimensionless
    #[arg(long = "h")]
    h: f64,
    /// Service rate c > 0 (work/time)
    #[arg(long = "c", default_value_t = 1.0)]
    c: f64,
    /// Threshold level u > 0 (work units)
    #[arg(long = "u")]
    u: f64,
    /// Pickands constant (dimensionless)
    #[arg(long = "pickands", default_value_t = 1.0)]
    pickands: f64,
}

#[derive(Args, Debug)]
struct PiterbargArgs {
    /// Hurst parameter; the study requires H > 1/2
    #[arg(long = "h")]
    h: f64,
    /// Service rate c > 0 (work/time)
    #[arg(long = "c", default_value_t = 1.0)]
    c: f64,
    /// Levels u (work units; comma separated, increasing)
    #[arg(long = "u", value_delimiter = ',', default_value = "2,3,4")]
    u: Vec<f64>,
    /// Fixed window T (time units); overrides the power rule
    #[arg(long = "T")]
    window: Option<f64>,
    /// Power-rule coefficient theta (window = theta * u^exponent)
    #[arg(long = "theta", default_value_t = 0.05)]
    theta: f64,
    /// Power-rule exponent; must satisfy the o(u^{(2H-1)/H}) hypothesis
    #[arg(long = "exponent", default_value_t = 1.0 / 3.0)]
    exponent: f64,
    /// Divide the power rule by ln(e+u) (shrinking-window variant)
    #[arg(long = "log-damped", default_value_t = true)]
    log_damped: bool,
    /// Horizon multiple of u*tau0 (dimensionless)
    #[arg(long = "kappa", default_value_t = 5.0)]
    kappa: f64,
    /// Monte Carlo replicates (common paths across levels)
    #[arg(long = "reps", default_value_t = 200_000)]
    reps: u64,
    /// Pickands constant for the asymptotic column; estimated when absent
    #[arg(long = "pickands")]
    pickands: Option<f64>,
    #[command(flatten)]
    common: CommonOut,
}

#[derive(Args, Debug)]
struct BrownianArgs {
    /// Service rate c > 0 (work/time)
    #[arg(long = "c", default_value_t = 1.0)]
    c: f64,
    /// Threshold level u > 0 (work units)
    #[arg(long = "u", default_value_t = 1.0)]
    u: f64,
    /// Window lengths S (time units; comma separated)
    #[arg(long = "S", value_delimiter = ',', default_value = "0.5,1")]
    s: Vec<f64>,
    /// Grid step (time units)
    #[arg(long = "step", default_value_t = 0.002)]
    step: f64,
    /// Horizon multiple of u*tau0 (dimensionless)
    #[arg(long = "kappa", default_value_t = 10.0)]
    kappa: f64,
    /// Monte Carlo replicates
    #[arg(long = "reps", default_value_t = 200_000)]
    reps: u64,
    #[command(flatten)]
    common: CommonOut,
}

#[derive(Args, Debug)]
struct ReportArgs {
    /// Directory holding records.jsonl
    #[arg(long = "out", value_name = "DIR", default_value = "runs")]
    out: PathBuf,
    /// Output format for the summary
    #[arg(long = "format", value_parser = ["csv", "json"], default_value = "csv")]
    format: String,
}

/// Parse arguments and dispatch; returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // clap prints help/version through here as well
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Domain(_)
                | Error::Config { .. }
                | Error::HypothesisViolation(_)
                | Error::GridMismatch(_)
                | Error::InsufficientPoints { .. } => 2,
                _ => 1,
            }
        }
    }
}

fn with_workers<R>(workers: usize, f: impl FnOnce() -> R + Send) -> R
where
    R: Send,
{
    if workers == 0 {
        f()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .expect("thread pool")
            .install(f)
    }
}

fn hurst(value: f64) -> crate::error::Result<Hurst> {
    Hurst::new(value).map_err(|_| Error::config("--h", format!("Hurst parameter must lie in (0,1), got {value}")))
}

fn persist(out: &std::path::Path, record: ExperimentRecord) -> crate::error::Result<()> {
    let store = Store::new(out.join("records.jsonl"));
    store.append(&record)?;
    let all = store.read_all()?;
    let mut buf = Vec::new();
    write_summary_csv(&all, &mut buf)?;
    std::fs::write(out.join("summary.csv"), buf)?;
    Ok(())
}

fn dispatch(cli: Cli) -> crate::error::Result<()> {
    match cli.cmd {
        Cmd::Gen(args) => {
            let h = hurst(args.h)?;
            if args.step <= 0.0 || args.s <= args.step {
                return Err(Error::config("--step", "need 0 < step < S"));
            }
            let count = (args.s / args.step).round() as usize;
            let sampler = FbmSampler::new(count, h, args.step)?;
            let path = sampler.sample_path(RngStream::new(args.common.seed, 0));
            std::fs::create_dir_all(&args.common.out)?;
            let file = args.common.out.join("path.csv");
            let mut w = std::io::BufWriter::new(std::fs::File::create(&file)?);
            path.write_csv(&mut w)?;
            println!(
                "gen: H={} S={} step={} seed={} -> {} ({} points)",
                args.h,
                args.s,
                args.step,
                args.common.seed,
                file.display(),
                count + 1
            );
            Ok(())
        }
        Cmd::Qtail(args) => {
            let h = hurst(args.h)?;
            let params = StorageParams::new(h, args.c)
                .map_err(|_| Error::config("--c", format!("service rate must be > 0, got {}", args.c)))?;
            if args.u <= 0.0 {
                return Err(Error::config("--u", "level must be > 0"));
            }
            let step = args
                .step
                .unwrap_or_else(|| storage::default_step(&params, args.u));
            let cfg = SimConfig {
                step,
                horizon_kappa: args.kappa,
                window: args.window,
                level: args.u,
            };
            cfg.validate()?;
            let t0 = Instant::now();
            let run = with_workers(args.common.workers, || {
                estimate_tail_probs(params, cfg, args.reps, args.common.seed)
            })?;
            let f = &run.counts_fine;
            let n = run.n_reps;
            let prop = |c| Proportion { count: c, n };
            let ratios = RatioSet {
                ratio_inf: f.inf as f64 / f.zero.max(1) as f64,
                ratio_inf_stderr: finite(ratio_stderr(prop(f.inf), prop(f.zero), f.inf)),
                ratio_sup: f.zero as f64 / f.sup.max(1) as f64,
                ratio_sup_stderr: finite(ratio_stderr(prop(f.zero), prop(f.sup), f.zero)),
            };
            let eq1 = match args.pickands {
                Some(pk) => Some(analytics::tail_asymptotic(
                    args.u,
                    &TailModel::new(params, pk)?,
                )?),
                None => None,
            };
            println!(
                "qtail: H={} c={} u={} T={:.6} step={:.6} reps={} -> p_inf={:.6e} p_zero={:.6e} p_sup={:.6e}{}",
                args.h,
                args.c,
                args.u,
                run.effective_window,
                step,
                args.reps,
                run.fine.p_inf.p_hat,
                run.fine.p_zero.p_hat,
                run.fine.p_sup.p_hat,
                if run.infeasible { " [infeasible: p_zero < 1e-4]" } else { "" }
            );
            let rec = ExperimentRecord::new(
                args.common.seed,
                ExperimentResult::TailRun(TailRunRecord {
                    tails: run,
                    ratios,
                    eq1_prediction: eq1,
                }),
                t0.elapsed().as_secs_f64(),
            );
            persist(&args.common.out, rec)
        }
        Cmd::Pickands(args) => {
            let h = hurst(args.h)?;
            let t0 = Instant::now();
            match args.phi.as_str() {
                "infsup" => {
                    let eta = EtaSpec::SumField {
                        hurst: h,
                        a_coef: args.a_coef,
                        lambda1: args.lambda1,
                        lambda2: args.lambda2,
                    };
                    let cfg = EstimateConfig {
                        step: args.step,
                        n_reps: args.reps,
                        seed: args.common.seed,
                    };
                    let est = with_workers(args.common.workers, || {
                        estimate_constant(&eta, Functional::InfSup, cfg)
                    })?;
                    println!(
                        "pickands infsup: H={} a={} l1={} l2={} -> {:.5} +- {:.5} (refined {:.5})",
                        args.h, args.a_coef, args.lambda1, args.lambda2,
                        est.value, est.stderr, est.refined_value
                    );
                    let rec = ExperimentRecord::new(
                        args.common.seed,
                        ExperimentResult::PickandsConstant(ConstantRecord {
                            eta,
                            phi: Functional::InfSup,
                            estimate: est,
                        }),
                        t0.elapsed().as_secs_f64(),
                    );
                    persist(&args.common.out, rec)
                }
                name => {
                    let phi = match name {
                        "sup" => Functional::Sup,
                        "inf" => Functional::Inf,
                        "integral" => Functional::Integral,
                        _ => unreachable!("clap validated"),
                    };
                    let mut last = None;
                    for (i, &s) in args.s.iter().enumerate() {
                        let eta = EtaSpec::Fbm { hurst: h, span: s };
                        let cfg = EstimateConfig {
                            step: args.step,
                            n_reps: args.reps,
                            seed: args.common.seed.wrapping_add(i as u64),
                        };
                        let est = with_workers(args.common.workers, || {
                            estimate_constant(&eta, phi, cfg)
                        })?;
                        println!(
                            "pickands {name}: H={} S={s} -> {:.5} +- {:.5} (refined {:.5} +- {:.5})",
                            args.h, est.value, est.stderr, est.refined_value, est.refined_stderr
                        );
                        let rec = ExperimentRecord::new(
                            cfg.seed,
                            ExperimentResult::PickandsConstant(ConstantRecord {
                                eta,
                                phi,
                                estimate: est,
                            }),
                            t0.elapsed().as_secs_f64(),
                        );
                        persist(&args.common.out, rec)?;
                        last = Some(est);
                    }
                    if phi == Functional::Sup && args.s.len() >= 3 {
                        let cfg = EstimateConfig {
                            step: args.step,
                            n_reps: args.reps,
                            seed: args.common.seed,
                        };
                        let lim = with_workers(args.common.workers, || {
                            estimate_pickands_limit(h, &args.s, cfg)
                        })?;
                        println!(
                            "pickands limit: H={} slope={:.5} +- {:.5} (classical constant estimate)",
                            args.h, lim.slope, lim.slope_stderr
                        );
                        let rec = ExperimentRecord::new(
                            args.common.seed,
                            ExperimentResult::PickandsLimit(PickandsLimitRecord {
                                hurst: args.h,
                                limit: lim,
                            }),
                            t0.elapsed().as_secs_f64(),
                        );
                        persist(&args.common.out, rec)?;
                    }
                    let _ = last;
                    Ok(())
                }
            }
        }
        Cmd::Asympt(args) => {
            let h = hurst(args.h)?;
            if args.u <= 0.0 {
                return Err(Error::config("--u", "level must be > 0"));
            }
            let params = StorageParams::new(h, args.c)
                .map_err(|_| Error::config("--c", format!("service rate must be > 0, got {}", args.c)))?;
            let model = TailModel::new(params, args.pickands)
                .map_err(|_| Error::config("--pickands", "Pickands constant must be > 0"))?;
            let k = model.constants;
            let p = analytics::tail_asymptotic(args.u, &model)?;
            let mut line = format!(
                "asympt: H={} c={} u={} tau0={:.17e} A={:.17e} B={:.17e} a={:.17e} b={:.17e} tail={:.17e}",
                args.h, args.c, args.u, k.tau0, k.a_big, k.b_big, k.a_small, k.b_small, p
            );
            if h.is_brownian() {
                let exact = analytics::brownian_qzero_tail(args.u, args.c);
                line.push_str(&format!(" exp(-2cu)={:.17e} ratio={:.6}", exact, p / exact));
            }
            println!("{line}");
            Ok(())
        }
        Cmd::Piterbarg(args) => {
            let h = hurst(args.h)?;
            let rule = match args.window {
                Some(t) => ScalingRule::FixedT { theta: t },
                None if args.log_damped => ScalingRule::PowerLogRule {
                    theta: args.theta,
                    exponent: args.exponent,
                },
                None => ScalingRule::PowerRule {
                    theta: args.theta,
                    exponent: args.exponent,
                },
            };
            let opts = PiterbargOptions {
                kappa: args.kappa,
                window_points: 8,
                n_reps: args.reps,
                seed: args.common.seed,
                pickands: args.pickands,
            };
            let t0 = Instant::now();
            let rec = with_workers(args.common.workers, || {
                run_strong_piterbarg(h, args.c, &args.u, &rule, &opts)
            })?;
            for e in &rec.entries {
                println!(
                    "piterbarg: H={} c={} u={} -> ratio_inf={:.4} (+-{:.4}) ratio_sup={:.4} p_zero={:.5e} eq1={:.5e}{}",
                    args.h, args.c, e.u, e.ratio_inf, e.ratio_inf_stderr, e.ratio_sup,
                    e.fine.p_zero, e.eq1_prediction,
                    if e.feasible { "" } else { " [infeasible at this replicate budget]" }
                );
            }
            let record = ExperimentRecord::new(
                args.common.seed,
                ExperimentResult::StrongPiterbarg(rec),
                t0.elapsed().as_secs_f64(),
            );
            persist(&args.common.out, record)
        }
        Cmd::BrownianCheck(args) => {
            let t0 = Instant::now();
            let rec = with_workers(args.common.workers, || {
                run_brownian_counterexample(
                    args.c,
                    args.u,
                    &args.s,
                    args.step,
                    args.kappa,
                    args.reps,
                    args.common.seed,
                )
            })?;
            for e in &rec.entries {
                println!(
                    "brownian-check: c={} u={} S={:.4} -> inf/zero={:.4} exact R={:.4} sup/zero={:.3} asympt={:.3}",
                    args.c, args.u, e.s, e.ratio_inf_refined, e.exact_ratio, e.ratio_sup, e.sup_asymptotic
                );
            }
            let record = ExperimentRecord::new(
                args.common.seed,
                ExperimentResult::BrownianCounterexample(rec),
                t0.elapsed().as_secs_f64(),
            );
            persist(&args.common.out, record)
        }
        Cmd::Report(args) => {
            let store = Store::new(args.out.join("records.jsonl"));
            let all = store.read_all()?;
            match args.format.as_str() {
                "json" => {
                    for rec in &all {
                        println!("{}", serde_json::to_string(rec)?);
                    }
                }
                _ => {
                    let mut buf = Vec::new();
                    write_summary_csv(&all, &mut buf)?;
                    let file = args.out.join("summary.csv");
                    std::fs::write(&file, &buf)?;
                    println!(
                        "report: {} records -> {} ({} rows)",
                        all.len(),
                        file.display(),
                        String::from_utf8_lossy(&buf).lines().count().saturating_sub(1)
                    );
                }
            }
            Ok(())
        }
    }
}

fn finite(x: f64) -> f64 {
    if x.is_finite() {
        x
    } else {
        0.0
    }
}
