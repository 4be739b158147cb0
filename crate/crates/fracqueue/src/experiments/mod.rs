//! Orchestrated Monte Carlo studies confronting simulation with the limit
//! theorems, plus persistence of every result with full provenance.
//!
//! All ratio estimates carry confidence intervals computed from
//! per-replicate indicators on common random numbers, never from independent
//! runs, so the indicator orderings are exact. Re-running any experiment
//! with the same seed and configuration yields identical estimates for any
//! worker count.

pub mod store;

pub use store::{ExperimentRecord, ExperimentResult, RunMeta, Store};

use serde::{Deserialize, Serialize};

use crate::analytics::{self, StorageParams, TailModel};
use crate::error::{Error, Result};
use crate::gaussgen::{FbmSampler, Hurst, OrnsteinUhlenbeck};
use crate::pickands::{self, EstimateConfig};
use crate::rng::RngStream;
use crate::stats::{ratio_stderr, replicate_reduce, Proportion};
use crate::storage::{
    self, estimate_tail_probs, richardson_extrapolate, SimConfig, TailCounts, TailEstimate,
    TailProbs,
};

/// Window growth rule T(u) for the limit-theorem studies.
///
/// The theorem hypothesis requires T(u) = o(u^{(2H-1)/H}); power-type rules
/// are validated against that exponent before any computation starts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScalingRule {
    /// Constant window T(u) = theta.
    FixedT { theta: f64 },
    /// T(u) = theta * u^exponent.
    PowerRule { theta: f64, exponent: f64 },
    /// T(u) = theta * u^exponent / ln(e + u), a log-damped shrinking window.
    PowerLogRule { theta: f64, exponent: f64 },
}

impl ScalingRule {
    pub fn window(&self, u: f64) -> f64 {
        match self {
            ScalingRule::FixedT { theta } => *theta,
            ScalingRule::PowerRule { theta, exponent } => theta * u.powf(*exponent),
            ScalingRule::PowerLogRule { theta, exponent } => {
                theta * u.powf(*exponent) / (std::f64::consts::E + u).ln()
            }
        }
    }

    /// Enforce the window-growth hypothesis exponent < (2H-1)/H.
    pub fn validate(&self, h: Hurst) -> Result<()> {
        let theta = match self {
            ScalingRule::FixedT { theta } => *theta,
            ScalingRule::PowerRule { theta, .. } | ScalingRule::PowerLogRule { theta, .. } => {
                *theta
            }
        };
        if !theta.is_finite() || theta <= 0.0 {
            return Err(Error::domain(format!("rule theta must be > 0, got {theta}")));
        }
        let bound = (2.0 * h.value() - 1.0) / h.value();
        match self {
            ScalingRule::FixedT { .. } => Ok(()),
            ScalingRule::PowerRule { exponent, .. } | ScalingRule::PowerLogRule { exponent, .. } => {
                if *exponent >= bound {
                    Err(Error::HypothesisViolation(format!(
                        "window exponent {exponent} violates T(u) = o(u^(2H-1)/H) = o(u^{bound:.4})"
                    )))
                } else {
                    Ok(())
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Generalized Pickands lemma check on the scaled Ornstein-Uhlenbeck process
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaEntry {
    pub u: f64,
    pub p_hat: f64,
    pub stderr: f64,
    /// H_sup_{B_1/2}([0,S]) Psi(u), the lemma's asymptotic value.
    pub target: f64,
    pub ratio: f64,
    pub ratio_stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaRecord {
    pub s: f64,
    pub points_per_unit: usize,
    pub n_reps: u64,
    pub constant: f64,
    pub entries: Vec<LemmaEntry>,
}

/// P(sup_{t in [0,S]} X(t u^{-2}) > u) for the stationary unit-variance
/// process with correlation e^{-|t|}, against the asymptotic
/// H_sup_{B_1/2}([0,S]) Psi(u).
pub fn run_pickands_lemma_check(
    u_list: &[f64],
    s: f64,
    points_per_unit: usize,
    n_reps: u64,
    seed: u64,
) -> Result<LemmaRecord> {
    if u_list.is_empty() {
        return Err(Error::domain("u_list must be nonempty"));
    }
    if !u_list.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::domain("u_list must be strictly increasing"));
    }
    if u_list[0] < 2.0 {
        return Err(Error::domain("lemma check requires u >= 2"));
    }
    if !s.is_finite() || s <= 0.0 {
        return Err(Error::domain(format!("S must be > 0, got {s}")));
    }
    let n_pts = ((points_per_unit as f64 * s).round() as usize).max(8);
    let constant = analytics::brownian_pickands_window(s);
    let mut entries = Vec::with_capacity(u_list.len());
    for (i, &u) in u_list.iter().enumerate() {
        // original-time step of the scaled grid t_k = k S/n * u^{-2}
        let dt_orig = s / n_pts as f64 / (u * u);
        let ou = OrnsteinUhlenbeck::with_step(dt_orig);
        let count: u64 = replicate_reduce(
            n_reps,
            4096,
            || vec![0.0f64; n_pts + 1],
            |path, rep, acc: &mut u64| {
                let mut rng = RngStream::new(seed.wrapping_add(i as u64), rep).rng();
                ou.fill_path(&mut rng, path);
                let m = path.iter().cloned().fold(f64::MIN, f64::max);
                if m > u {
                    *acc += 1;
                }
            },
            |a, b| a + b,
            || 0u64,
        );
        let p = Proportion { count, n: n_reps };
        let target = constant * analytics::mills_psi(u);
        entries.push(LemmaEntry {
            u,
            p_hat: p.p_hat(),
            stderr: p.stderr(),
            target,
            ratio: p.p_hat() / target,
            ratio_stderr: p.stderr() / target,
        });
    }
    Ok(LemmaRecord {
        s,
        points_per_unit,
        n_reps,
        constant,
        entries,
    })
}

// ---------------------------------------------------------------------------
// Strong Piterbarg study: common-grid multi-level tail ratios
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PiterbargOptions {
    /// Horizon multiple of u tau0 shared by all levels.
    pub kappa: f64,
    /// Window grid resolution: the smallest window is split this many times.
    pub window_points: usize,
    pub n_reps: u64,
    pub seed: u64,
    /// Classical Pickands constant for the asymptotic prediction; estimated
    /// internally when absent.
    pub pickands: Option<f64>,
}

impl Default for PiterbargOptions {
    fn default() -> Self {
        PiterbargOptions {
            kappa: 5.0,
            window_points: 8,
            n_reps: 100_000,
            seed: 1,
            pickands: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TripleSummary {
    pub p_inf: f64,
    pub p_inf_stderr: f64,
    pub p_zero: f64,
    pub p_zero_stderr: f64,
    pub p_sup: f64,
    pub p_sup_stderr: f64,
}

impl TripleSummary {
    fn from_counts(c: &TailCounts, n: u64) -> Self {
        let e = |count| TailEstimate::from_counts(count, n);
        let (i, z, s) = (e(c.inf), e(c.zero), e(c.sup));
        TripleSummary {
            p_inf: i.p_hat,
            p_inf_stderr: i.stderr,
            p_zero: z.p_hat,
            p_zero_stderr: z.stderr,
            p_sup: s.p_hat,
            p_sup_stderr: s.stderr,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiterbargEntry {
    pub u: f64,
    /// Window from the scaling rule (before grid rounding).
    pub window_rule: f64,
    pub window_effective: f64,
    pub horizon: f64,
    pub fine: TripleSummary,
    pub coarse: TripleSummary,
    pub ratio_inf: f64,
    pub ratio_inf_stderr: f64,
    pub ratio_sup: f64,
    pub ratio_sup_stderr: f64,
    pub eq1_prediction: f64,
    /// False when the exceedance count is too small for honest inference.
    pub feasible: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiterbargRecord {
    pub hurst: f64,
    pub c: f64,
    pub rule: ScalingRule,
    pub kappa: f64,
    pub step: f64,
    pub n_reps: u64,
    pub pickands_constant: f64,
    pub pickands_source: String,
    pub entries: Vec<PiterbargEntry>,
}

#[derive(Clone, Default)]
struct MultiAcc {
    fine: Vec<TailCounts>,
    coarse: Vec<TailCounts>,
    ordering_violations: u64,
}

impl MultiAcc {
    fn new(k: usize) -> Self {
        MultiAcc {
            fine: vec![TailCounts::default(); k],
            coarse: vec![TailCounts::default(); k],
            ordering_violations: 0,
        }
    }

    fn merge(mut self, o: MultiAcc) -> MultiAcc {
        if self.fine.is_empty() {
            return o;
        }
        if o.fine.is_empty() {
            return self;
        }
        for (a, b) in self.fine.iter_mut().zip(&o.fine) {
            a.inf += b.inf;
            a.zero += b.zero;
            a.sup += b.sup;
        }
        for (a, b) in self.coarse.iter_mut().zip(&o.coarse) {
            a.inf += b.inf;
            a.zero += b.zero;
            a.sup += b.sup;
        }
        self.ordering_violations += o.ordering_violations;
        self
    }
}

/// Estimate the inf/zero/sup tail triple at several levels u from the same
/// sample paths: one fBm path per replicate spans the largest horizon, and
/// each level reads its own window and horizon from that common path.
pub fn run_strong_piterbarg(
    h: Hurst,
    c: f64,
    u_list: &[f64],
    rule: &ScalingRule,
    opts: &PiterbargOptions,
) -> Result<PiterbargRecord> {
    if h.value() <= 0.5 {
        return Err(Error::HypothesisViolation(format!(
            "the strong Piterbarg property requires H > 1/2, got H = {}",
            h.value()
        )));
    }
    rule.validate(h)?;
    if u_list.is_empty() || !u_list.windows(2).all(|w| w[0] < w[1]) {
        return Err(Error::domain("u_list must be nonempty and strictly increasing"));
    }
    if u_list[0] <= 0.0 {
        return Err(Error::domain("levels must be positive"));
    }
    let params = StorageParams::new(h, c)?;
    let t0 = storage::tau0(&params);

    // one grid serves every level: resolve the smallest window, cover the
    // largest horizon
    let windows: Vec<f64> = u_list.iter().map(|&u| rule.window(u)).collect();
    let min_window = windows.iter().cloned().fold(f64::MAX, f64::min);
    if min_window <= 0.0 {
        return Err(Error::domain("scaling rule produced a nonpositive window"));
    }
    let step = (0.01 * t0).min(min_window / opts.window_points as f64);
    let round_even = |x: f64| {
        let n = (x / step).round() as usize;
        if n % 2 == 1 {
            n + 1
        } else {
            n.max(2)
        }
    };
    let n_windows: Vec<usize> = windows.iter().map(|&t| round_even(t).max(2)).collect();
    let n_horizons: Vec<usize> =
        u_list.iter().map(|&u| round_even(opts.kappa * u * t0)).collect();
    let n_total = n_windows
        .iter()
        .zip(&n_horizons)
        .map(|(a, b)| a + b)
        .max()
        .unwrap();

    let sampler = FbmSampler::new(n_total, h, step)?;
    let drift = c * step;
    let k = u_list.len();

    struct State {
        scratch: crate::gaussgen::FbmScratch,
        inc_a: Vec<f64>,
        inc_b: Vec<f64>,
        d: Vec<f64>,
        d_coarse: Vec<f64>,
        deque: Vec<usize>,
        q: Vec<f64>,
    }

    let u_vec = u_list.to_vec();
    let n_windows_c = n_windows.clone();
    let n_horizons_c = n_horizons.clone();
    let n_pairs = opts.n_reps.div_ceil(2);
    let acc = replicate_reduce(
        n_pairs,
        256,
        || State {
            scratch: sampler.make_scratch(),
            inc_a: vec![0.0; n_total],
            inc_b: vec![0.0; n_total],
            d: vec![0.0; n_total + 1],
            d_coarse: vec![0.0; n_total / 2 + 1],
            deque: Vec::with_capacity(64),
            q: Vec::new(),
        },
        |st, pair, acc: &mut MultiAcc| {
            if acc.fine.is_empty() {
                *acc = MultiAcc::new(k);
            }
            let mut rng = RngStream::new(opts.seed, pair).rng();
            sampler.sample_increments_pair(
                &mut rng,
                &mut st.scratch,
                &mut st.inc_a,
                &mut st.inc_b,
            );
            for half in 0..2u64 {
                if 2 * pair + half >= opts.n_reps {
                    break;
                }
                let incs = if half == 0 { &st.inc_a } else { &st.inc_b };
                st.d[0] = 0.0;
                let mut b = 0.0;
                for (j, &inc) in incs.iter().enumerate() {
                    b += inc - drift;
                    st.d[j + 1] = b;
                }
                for j in 0..=(n_total / 2) {
                    st.d_coarse[j] = st.d[2 * j];
                }
                for (idx, &u) in u_vec.iter().enumerate() {
                    let (nw, nh) = (n_windows_c[idx], n_horizons_c[idx]);
                    let (inf_e, zero_e, sup_e) =
                        window_exceedances(&st.d, nw, nh, u, &mut st.deque, &mut st.q);
                    let cnt = &mut acc.fine[idx];
                    cnt.inf += inf_e as u64;
                    cnt.zero += zero_e as u64;
                    cnt.sup += sup_e as u64;
                    if (inf_e && !zero_e) || (zero_e && !sup_e) {
                        acc.ordering_violations += 1;
                    }
                    let (inf_c, zero_c, sup_c) = window_exceedances(
                        &st.d_coarse[..=n_total / 2],
                        nw / 2,
                        nh / 2,
                        u,
                        &mut st.deque,
                        &mut st.q,
                    );
                    let cnt = &mut acc.coarse[idx];
                    cnt.inf += inf_c as u64;
                    cnt.zero += zero_c as u64;
                    cnt.sup += sup_c as u64;
                }
            }
        },
        MultiAcc::merge,
        MultiAcc::default,
    );
    assert_eq!(acc.ordering_violations, 0, "CRN ordering must hold exactly");

    // the asymptotic comparison needs the classical constant
    let (pickands_constant, pickands_source) = match opts.pickands {
        Some(v) => (v, "supplied".to_string()),
        None => {
            let cfg = EstimateConfig {
                step: 0.02,
                n_reps: 100_000,
                seed: opts.seed ^ 0x9e3779b97f4a7c15,
            };
            let lim = pickands::estimate_pickands_limit(h, &[2.0, 4.0, 8.0], cfg)?;
            (lim.slope, "estimated".to_string())
        }
    };
    let model = TailModel::new(params, pickands_constant)?;

    let mut entries = Vec::with_capacity(k);
    for (idx, &u) in u_list.iter().enumerate() {
        let fine = &acc.fine[idx];
        let coarse = &acc.coarse[idx];
        let n = opts.n_reps;
        let prop = |count| Proportion { count, n };
        let ratio_inf = fine.inf as f64 / fine.zero.max(1) as f64;
        let ratio_sup = fine.zero as f64 / fine.sup.max(1) as f64;
        entries.push(PiterbargEntry {
            u,
            window_rule: windows[idx],
            window_effective: n_windows[idx] as f64 * step,
            horizon: n_horizons[idx] as f64 * step,
            fine: TripleSummary::from_counts(fine, n),
            coarse: TripleSummary::from_counts(coarse, n),
            ratio_inf,
            ratio_inf_stderr: finite(ratio_stderr(prop(fine.inf), prop(fine.zero), fine.inf)),
            ratio_sup,
            ratio_sup_stderr: finite(ratio_stderr(prop(fine.zero), prop(fine.sup), fine.zero)),
            eq1_prediction: analytics::tail_asymptotic(u, &model)?,
            feasible: fine.zero as f64 / n as f64 >= 1e-4,
        });
    }
    Ok(PiterbargRecord {
        hurst: h.value(),
        c,
        rule: *rule,
        kappa: opts.kappa,
        step,
        n_reps: opts.n_reps,
        pickands_constant,
        pickands_source,
        entries,
    })
}

/// Exceedance indicators (inf, zero, sup) of the Q window read from one
/// drift-adjusted path D.
fn window_exceedances(
    d: &[f64],
    n_window: usize,
    n_horizon: usize,
    level: f64,
    deque: &mut Vec<usize>,
    q: &mut Vec<f64>,
) -> (bool, bool, bool) {
    // windowed running maximum of D over [i, i+w], i = 0..=n_window
    deque.clear();
    q.clear();
    let w = n_horizon;
    let mut head = 0usize;
    for (k, &dk) in d.iter().enumerate().take(n_window + w + 1) {
        while deque.len() > head {
            let back = *deque.last().unwrap();
            if d[back] <= dk {
                deque.pop();
            } else {
                break;
            }
        }
        deque.push(k);
        if k >= w {
            let i = k - w;
            while deque[head] < i {
                head += 1;
            }
            q.push(d[deque[head]] - d[i]);
        }
    }
    let zero = q[0] > level;
    let mut inf = true;
    let mut sup = false;
    for &v in q.iter() {
        if v <= level {
            inf = false;
        }
        if v > level {
            sup = true;
        }
    }
    (inf, zero, sup)
}

// ---------------------------------------------------------------------------
// Brownian counterexample: the strong property fails at H = 1/2
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BrownianEntry {
    pub s: f64,
    pub fine: TripleSummary,
    pub ratio_inf: f64,
    pub ratio_inf_stderr: f64,
    /// Richardson pair of the inf/zero ratio over the nested grids.
    pub ratio_inf_refined: f64,
    /// Grid sensitivity |fine - coarse| of the inf/zero ratio.
    pub ratio_inf_grid_delta: f64,
    /// Exact R(c^2 S).
    pub exact_ratio: f64,
    pub ratio_sup: f64,
    pub ratio_sup_stderr: f64,
    /// Asymptotic 2 sqrt(pi) H_sup([0, 2 c^2 S]).
    pub sup_asymptotic: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BrownianRecord {
    pub c: f64,
    pub u: f64,
    pub kappa: f64,
    pub step: f64,
    pub n_reps: u64,
    pub entries: Vec<BrownianEntry>,
}

/// Simulated inf/zero and sup/zero ratios at H = 1/2 against the exact law
/// R(S) and the sup asymptotic.
pub fn run_brownian_counterexample(
    c: f64,
    u: f64,
    s_list: &[f64],
    step: f64,
    kappa: f64,
    n_reps: u64,
    seed: u64,
) -> Result<BrownianRecord> {
    if s_list.is_empty() {
        return Err(Error::domain("S list must be nonempty"));
    }
    let h = Hurst::new(0.5).unwrap();
    let params = StorageParams::new(h, c)?;
    let mut entries = Vec::with_capacity(s_list.len());
    for (i, &s) in s_list.iter().enumerate() {
        if !s.is_finite() || s <= 0.0 {
            return Err(Error::domain(format!("window S must be > 0, got {s}")));
        }
        let cfg = SimConfig {
            step,
            horizon_kappa: kappa,
            window: s,
            level: u,
        };
        let run = estimate_tail_probs(params, cfg, n_reps, seed.wrapping_add(i as u64))?;
        entries.push(brownian_entry(&run, c));
    }
    Ok(BrownianRecord {
        c,
        u,
        kappa,
        step,
        n_reps,
        entries,
    })
}

fn finite(x: f64) -> f64 {
    if x.is_finite() {
        x
    } else {
        0.0
    }
}

fn brownian_entry(run: &TailProbs, c: f64) -> BrownianEntry {
    let h = Hurst::new(0.5).unwrap();
    let n = run.n_reps;
    let prop = |count| Proportion { count, n };
    let fine = &run.counts_fine;
    let coarse = &run.counts_coarse;
    let r_fine = fine.inf as f64 / fine.zero.max(1) as f64;
    let r_coarse = coarse.inf as f64 / coarse.zero.max(1) as f64;
    // extrapolate the two probabilities, then take the ratio
    let p_inf_ref = richardson_extrapolate(
        coarse.inf as f64 / n as f64,
        fine.inf as f64 / n as f64,
        h,
    );
    let p_zero_ref = richardson_extrapolate(
        coarse.zero as f64 / n as f64,
        fine.zero as f64 / n as f64,
        h,
    );
    BrownianEntry {
        s: run.effective_window,
        fine: TripleSummary::from_counts(fine, n),
        ratio_inf: r_fine,
        ratio_inf_stderr: finite(ratio_stderr(prop(fine.inf), prop(fine.zero), fine.inf)),
        ratio_inf_refined: p_inf_ref / p_zero_ref,
        ratio_inf_grid_delta: (r_fine - r_coarse).abs(),
        exact_ratio: analytics::brownian_inf_ratio(c * c * run.effective_window),
        ratio_sup: fine.sup as f64 / fine.zero.max(1) as f64,
        ratio_sup_stderr: finite(ratio_stderr(prop(fine.sup), prop(fine.zero), fine.zero)),
        sup_asymptotic: 2.0 * std::f64::consts::PI.sqrt()
            * analytics::brownian_pickands_window(2.0 * c * c * run.effective_window),
    }
}

// ---------------------------------------------------------------------------
// Integral sandwich
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SandwichRecord {
    pub hurst: f64,
    pub c: f64,
    pub u: f64,
    pub window: f64,
    pub n_reps: u64,
    pub p_inf: f64,
    pub p_integral: f64,
    pub p_sup: f64,
    pub p_inf_stderr: f64,
    pub p_integral_stderr: f64,
    pub p_sup_stderr: f64,
    /// Counts are nested exactly: inf <= integral <= sup on every replicate.
    pub counts: (u64, u64, u64),
}

/// P(integral of Q over [0,T] > uT) sandwiched between the inf and sup tails;
/// the pathwise sandwich T inf <= integral <= T sup is verified on every
/// replicate inside the estimator.
#[allow(clippy::too_many_arguments)]
pub fn run_integral_sandwich(
    h: Hurst,
    c: f64,
    u: f64,
    window: f64,
    step: f64,
    kappa: f64,
    n_reps: u64,
    seed: u64,
) -> Result<SandwichRecord> {
    if !window.is_finite() || window <= 0.0 {
        return Err(Error::domain(format!("window must be > 0, got {window}")));
    }
    let params = StorageParams::new(h, c)?;
    let cfg = SimConfig {
        step,
        horizon_kappa: kappa,
        window,
        level: u,
    };
    let run = estimate_tail_probs(params, cfg, n_reps, seed)?;
    let f = &run.counts_fine;
    assert!(
        f.inf <= run.integral_count && run.integral_count <= f.sup,
        "indicator nesting must hold exactly"
    );
    Ok(SandwichRecord {
        hurst: h.value(),
        c,
        u,
        window: run.effective_window,
        n_reps,
        p_inf: run.fine.p_inf.p_hat,
        p_integral: run.p_integral.p_hat,
        p_sup: run.fine.p_sup.p_hat,
        p_inf_stderr: run.fine.p_inf.stderr,
        p_integral_stderr: run.p_integral.stderr,
        p_sup_stderr: run.fine.p_sup.stderr,
        counts: (f.inf, run.integral_count, f.sup),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scaling_rule_windows_and_guards() {
        let h = Hurst::new(0.75).unwrap();
        let fixed = ScalingRule::FixedT { theta: 0.5 };
        assert_eq!(fixed.window(10.0), 0.5);
        assert!(fixed.validate(h).is_ok());

        let ok = ScalingRule::PowerRule { theta: 1.0, exponent: 0.5 };
        assert!(ok.validate(h).is_ok()); // bound is 2/3
        let bad = ScalingRule::PowerRule { theta: 1.0, exponent: 0.7 };
        assert!(matches!(bad.validate(h), Err(Error::HypothesisViolation(_))));

        let damped = ScalingRule::PowerLogRule { theta: 0.05, exponent: 1.0 / 3.0 };
        assert!(damped.validate(h).is_ok());
        let t2 = damped.window(2.0);
        assert!((t2 - 0.05 * 2.0f64.powf(1.0 / 3.0) / (std::f64::consts::E + 2.0).ln()).abs() < 1e-15);
    }

    #[test]
    fn piterbarg_requires_persistent_h() {
        let h = Hurst::new(0.4).unwrap();
        let rule = ScalingRule::FixedT { theta: 0.1 };
        let err = run_strong_piterbarg(h, 1.0, &[2.0], &rule, &PiterbargOptions::default());
        match err {
            Err(Error::HypothesisViolation(msg)) => {
                assert!(msg.contains("H > 1/2"), "message should cite the hypothesis: {msg}")
            }
            other => panic!("expected HypothesisViolation, got {other:?}"),
        }
    }

    #[test]
    fn lemma_check_preconditions() {
        assert!(run_pickands_lemma_check(&[1.5], 1.0, 64, 100, 1).is_err());
        assert!(run_pickands_lemma_check(&[3.0, 2.0], 1.0, 64, 100, 1).is_err());
        assert!(run_pickands_lemma_check(&[], 1.0, 64, 100, 1).is_err());
    }

    #[test]
    fn lemma_check_small_window_tracks_target() {
        // even at S = 0.05 the window constant is ~1.28 (sqrt-S growth), and
        // the simulated exceedance probability tracks constant * Psi(u)
        let rec = run_pickands_lemma_check(&[2.5], 0.05, 256, 200_000, 9).unwrap();
        let e = &rec.entries[0];
        assert!(
            (e.ratio - 1.0).abs() < 0.05 + 4.0 * e.ratio_stderr,
            "ratio {} +- {}",
            e.ratio,
            e.ratio_stderr
        );
        assert!(rec.constant < 1.3, "H_half([0,0.05]) ~ 1.28, got {}", rec.constant);
        // the target collapses onto Psi(u) itself as S -> 0
        assert!((analytics::brownian_pickands_window(1e-12) - 1.0).abs() < 1e-5);
    }

    #[test]
    fn piterbarg_smoke_run_orders_and_predicts() {
        let h = Hurst::new(0.75).unwrap();
        let rule = ScalingRule::PowerLogRule { theta: 0.05, exponent: 1.0 / 3.0 };
        let opts = PiterbargOptions {
            kappa: 3.0,
            window_points: 8,
            n_reps: 4000,
            seed: 31,
            pickands: Some(0.8),
        };
        let rec = run_strong_piterbarg(h, 1.0, &[2.0, 3.0], &rule, &opts).unwrap();
        assert_eq!(rec.entries.len(), 2);
        for e in &rec.entries {
            assert!(e.fine.p_inf <= e.fine.p_zero && e.fine.p_zero <= e.fine.p_sup);
            assert!(e.ratio_inf <= 1.0 && e.ratio_sup <= 1.0);
            assert!(e.eq1_prediction > 0.0);
            assert!(e.feasible);
        }
        assert_eq!(rec.pickands_source, "supplied");
    }

    #[test]
    fn brownian_counterexample_matches_exact_law_roughly() {
        let rec = run_brownian_counterexample(1.0, 1.0, &[1.0], 0.004, 7.0, 60_000, 77).unwrap();
        let e = &rec.entries[0];
        // R(1) = 0.1507; even the raw grid ratio lands well below 0.5
        assert!(e.ratio_inf < 0.5, "strong property should visibly fail: {}", e.ratio_inf);
        assert!(
            (e.ratio_inf_refined - e.exact_ratio).abs()
                < 3.0 * e.ratio_inf_stderr + e.ratio_inf_grid_delta + 0.01,
            "refined {} vs exact {}",
            e.ratio_inf_refined,
            e.exact_ratio
        );
        assert!(e.ratio_sup > 1.0);
    }

    #[test]
    fn integral_sandwich_nested() {
        let h = Hurst::new(0.75).unwrap();
        let rec = run_integral_sandwich(h, 1.0, 1.0, 2.0, 0.05, 4.0, 20_000, 5).unwrap();
        assert!(rec.counts.0 <= rec.counts.1 && rec.counts.1 <= rec.counts.2);
        assert!(rec.p_inf <= rec.p_integral && rec.p_integral <= rec.p_sup);
    }
}
