//! Simulation of the stationary storage process on a window [0, T].
//!
//! Using time reversal, Q(t) = sup_{sigma >= t} (B(sigma) - B(t) - c(sigma-t))
//! is simulated forward: sample B on [0, T+L], set D_k = B_k - c k delta, and
//! take Q(t) as the windowed running maximum of D over [t, t+L] minus D(t).
//! The horizon L = kappa u tau0 covers the optimal lag; the windowed maximum
//! is a monotone-deque sweep, O(n) amortized. Every replicate yields the
//! window functionals on the fine grid and on the nested half-resolution
//! grid, so the grid-bias direction is observable path by path.

use serde::{Deserialize, Serialize};

pub use crate::analytics::StorageParams;
use crate::error::{Error, Result};
use crate::gaussgen::{FbmSampler, Grid, Hurst, SamplePath};
use crate::rng::RngStream;
use crate::stats::{replicate_reduce, trapezoid, Proportion};

/// Optimal lag of the variance of the rescaled field: tau0 = H/(c(1-H)).
pub fn tau0(params: &StorageParams) -> f64 {
    let h = params.hurst.value();
    h / (params.c * (1.0 - h))
}

/// Simulation horizon L = kappa * u * tau0 (time units).
pub fn choose_horizon(params: &StorageParams, u: f64, kappa: f64) -> f64 {
    kappa * u * tau0(params)
}

/// Default grid step: fine enough for the local fluctuation scale of the
/// supremum near the optimal lag, capped at one percent of tau0.
pub fn default_step(params: &StorageParams, u: f64) -> f64 {
    let t0 = tau0(params);
    let pickands_scale = 0.25 * u.powf(-1.0 / params.hurst.value()) * (u * t0);
    (0.01 * t0).min(pickands_scale)
}

/// Discretization and truncation control for one run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Fine grid step (time units).
    pub step: f64,
    /// Horizon multiple of u*tau0 (dimensionless, >= 1).
    pub horizon_kappa: f64,
    /// Window length T >= 0 (time units).
    pub window: f64,
    /// Threshold level u > 0 (work units).
    pub level: f64,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.step.is_finite() || self.step <= 0.0 {
            return Err(Error::domain(format!("step must be > 0, got {}", self.step)));
        }
        if self.horizon_kappa < 1.0 {
            return Err(Error::domain(format!(
                "horizon_kappa must be >= 1, got {}",
                self.horizon_kappa
            )));
        }
        if self.window < 0.0 {
            return Err(Error::domain(format!("window must be >= 0, got {}", self.window)));
        }
        if self.window > 0.0 && self.step >= self.window {
            return Err(Error::domain(format!(
                "step {} must be smaller than the window {}",
                self.step, self.window
            )));
        }
        if !self.level.is_finite() || self.level <= 0.0 {
            return Err(Error::domain(format!("level must be > 0, got {}", self.level)));
        }
        Ok(())
    }
}

/// Window functionals of one Q path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowStat {
    pub q_zero: f64,
    pub q_inf: f64,
    pub q_sup: f64,
    /// Trapezoidal integral over the window (work * time).
    pub q_integral: f64,
}

/// Grid extrema and trapezoidal integral of a Q path on [0, T].
pub fn window_stats(path: &SamplePath) -> WindowStat {
    assert!(!path.values.is_empty());
    let q_zero = path.values[0];
    let mut q_inf = f64::MAX;
    let mut q_sup = f64::MIN;
    for &v in &path.values {
        q_inf = q_inf.min(v);
        q_sup = q_sup.max(v);
    }
    WindowStat {
        q_zero,
        q_inf,
        q_sup,
        q_integral: trapezoid(&path.values, path.grid.step),
    }
}

fn stats_from_values(values: &[f64], step: f64) -> WindowStat {
    let q_zero = values[0];
    let mut q_inf = f64::MAX;
    let mut q_sup = f64::MIN;
    for &v in values {
        q_inf = q_inf.min(v);
        q_sup = q_sup.max(v);
    }
    WindowStat {
        q_zero,
        q_inf,
        q_sup,
        q_integral: trapezoid(values, step),
    }
}

/// Windowed running maximum: out[i] = max(d[i..=i+w]) for i in 0..n_out.
/// Monotone deque over candidate indices; `deque` is scratch storage with a
/// moving head so the sweep is O(n) amortized.
fn sliding_window_max(d: &[f64], w: usize, n_out: usize, deque: &mut Vec<usize>, out: &mut Vec<f64>) {
    debug_assert!(n_out + w < d.len() + 1);
    deque.clear();
    out.clear();
    let mut head = 0usize;
    for (k, &dk) in d.iter().enumerate().take(n_out + w) {
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
            out.push(d[deque[head]]);
        }
    }
}

/// One replicate's functionals on the fine grid and the nested coarse grid.
///
/// Refinement pushes the two grids apart in a known direction: every fine
/// Q(t) dominates the coarse Q(t) at shared times (the sigma-grid is a
/// superset), hence q_sup and q_zero never decrease under refinement. The
/// window infimum is NOT pathwise monotone: refinement both lowers the
/// t-minimum (more points) and raises each Q(t), and either effect can win.
#[derive(Debug, Clone, Copy)]
pub struct ReplicateStat {
    pub fine: WindowStat,
    pub coarse: WindowStat,
    /// Fine Q(t) >= coarse Q(t) held at every shared grid time.
    pub dominance_ok: bool,
}

/// Reusable simulator for Q windows under one configuration.
pub struct QSimulator {
    pub params: StorageParams,
    pub cfg: SimConfig,
    sampler: FbmSampler,
    /// Window grid points (even), window = n_window * step.
    n_window: usize,
    /// Horizon grid points (even).
    n_horizon: usize,
    drift_step: f64,
}

/// Per-worker scratch for the batch path.
pub struct QScratch {
    fbm: crate::gaussgen::FbmScratch,
    inc_a: Vec<f64>,
    inc_b: Vec<f64>,
    d: Vec<f64>,
    d_coarse: Vec<f64>,
    q: Vec<f64>,
    q_coarse: Vec<f64>,
    deque: Vec<usize>,
}

fn round_even(x: f64) -> usize {
    let n = x.round() as usize;
    if n % 2 == 1 {
        n + 1
    } else {
        n
    }
}

impl QSimulator {
    pub fn new(params: StorageParams, cfg: SimConfig) -> Result<Self> {
        cfg.validate()?;
        let horizon = choose_horizon(&params, cfg.level, cfg.horizon_kappa);
        let n_window = if cfg.window > 0.0 {
            round_even(cfg.window / cfg.step).max(2)
        } else {
            0
        };
        let n_horizon = round_even(horizon / cfg.step).max(2);
        let n_total = n_window + n_horizon;
        let sampler = FbmSampler::new(n_total, params.hurst, cfg.step)?;
        Ok(QSimulator {
            params,
            cfg,
            sampler,
            n_window,
            n_horizon,
            drift_step: params.c * cfg.step,
        })
    }

    /// Effective window length after grid rounding.
    pub fn effective_window(&self) -> f64 {
        self.n_window as f64 * self.cfg.step
    }

    pub fn effective_horizon(&self) -> f64 {
        self.n_horizon as f64 * self.cfg.step
    }

    pub fn make_scratch(&self) -> QScratch {
        let n_total = self.n_window + self.n_horizon;
        QScratch {
            fbm: self.sampler.make_scratch(),
            inc_a: vec![0.0; n_total],
            inc_b: vec![0.0; n_total],
            d: vec![0.0; n_total + 1],
            d_coarse: vec![0.0; n_total / 2 + 1],
            q: Vec::with_capacity(self.n_window + 1),
            q_coarse: Vec::with_capacity(self.n_window / 2 + 1),
            deque: Vec::with_capacity(64),
        }
    }

    /// Q on the fine and nested coarse grids from given fBm increments.
    /// Public seam so tests can force degenerate noise.
    pub fn q_from_increments(&self, incs: &[f64], scratch: &mut QScratch) -> ReplicateStat {
        let n_total = self.n_window + self.n_horizon;
        assert_eq!(incs.len(), n_total);
        // D_k = B_k - c k delta
        scratch.d[0] = 0.0;
        let mut acc = 0.0;
        for (k, &inc) in incs.iter().enumerate() {
            acc += inc - self.drift_step;
            scratch.d[k + 1] = acc;
        }
        // fine grid
        sliding_window_max(
            &scratch.d,
            self.n_horizon,
            self.n_window + 1,
            &mut scratch.deque,
            &mut scratch.q,
        );
        for (i, q) in scratch.q.iter_mut().enumerate() {
            *q -= scratch.d[i];
        }
        // nested coarse grid: every other point, half the horizon count
        let n_c = n_total / 2;
        for j in 0..=n_c {
            scratch.d_coarse[j] = scratch.d[2 * j];
        }
        sliding_window_max(
            &scratch.d_coarse[..=n_c],
            self.n_horizon / 2,
            self.n_window / 2 + 1,
            &mut scratch.deque,
            &mut scratch.q_coarse,
        );
        for (j, q) in scratch.q_coarse.iter_mut().enumerate() {
            *q -= scratch.d_coarse[j];
        }
        let mut dominance_ok = true;
        for (j, &qc) in scratch.q_coarse.iter().enumerate() {
            if scratch.q[2 * j] < qc {
                dominance_ok = false;
                break;
            }
        }
        ReplicateStat {
            fine: stats_from_values(&scratch.q, self.cfg.step),
            coarse: stats_from_values(&scratch.q_coarse, 2.0 * self.cfg.step),
            dominance_ok,
        }
    }

    /// One simulated Q path on the fine window grid.
    pub fn simulate_q_window(&self, stream: RngStream) -> SamplePath {
        let mut rng = stream.rng();
        let mut scratch = self.make_scratch();
        let n_total = self.n_window + self.n_horizon;
        let mut a = vec![0.0; n_total];
        let mut b = vec![0.0; n_total];
        self.sampler
            .sample_increments_pair(&mut rng, &mut scratch.fbm, &mut a, &mut b);
        self.q_from_increments(&a, &mut scratch);
        SamplePath::new(
            Grid {
                step: self.cfg.step,
                count: self.n_window,
            },
            scratch.q.clone(),
        )
    }
}

/// Monte Carlo estimate of one tail probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailEstimate {
    pub p_hat: f64,
    /// Binomial stderr sqrt(p(1-p)/n).
    pub stderr: f64,
    /// One-sided 95% upper bound; rule of three when the count is zero.
    pub upper95: f64,
    pub n_reps: u64,
}

impl TailEstimate {
    pub fn from_counts(count: u64, n: u64) -> Self {
        let p = Proportion { count, n };
        TailEstimate {
            p_hat: p.p_hat(),
            stderr: p.stderr(),
            upper95: p.upper95(),
            n_reps: n,
        }
    }
}

/// The inf/value-at-zero/sup tail triple on one grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailTriple {
    pub p_inf: TailEstimate,
    pub p_zero: TailEstimate,
    pub p_sup: TailEstimate,
    pub step: f64,
}

/// Raw exceedance counts for one grid (events are nested pathwise).
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct TailCounts {
    pub inf: u64,
    pub zero: u64,
    pub sup: u64,
}

/// Full result of a common-random-number tail run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailProbs {
    pub fine: TailTriple,
    pub coarse: TailTriple,
    /// P(integral of Q over the window > u * T), fine grid.
    pub p_integral: TailEstimate,
    pub counts_fine: TailCounts,
    pub counts_coarse: TailCounts,
    pub integral_count: u64,
    pub n_reps: u64,
    pub seed: u64,
    pub params: StorageParams,
    pub cfg: SimConfig,
    pub effective_window: f64,
    pub effective_horizon: f64,
    /// Exceedances flagged statistically infeasible at this replicate budget.
    pub infeasible: bool,
}

#[derive(Clone, Copy, Default)]
struct TailAcc {
    n: u64,
    fine: TailCounts,
    coarse: TailCounts,
    integral: u64,
    ordering_violations: u64,
    refinement_violations: u64,
    sandwich_violations: u64,
}

impl TailAcc {
    fn merge(mut self, o: TailAcc) -> TailAcc {
        self.n += o.n;
        self.fine.inf += o.fine.inf;
        self.fine.zero += o.fine.zero;
        self.fine.sup += o.fine.sup;
        self.coarse.inf += o.coarse.inf;
        self.coarse.zero += o.coarse.zero;
        self.coarse.sup += o.coarse.sup;
        self.integral += o.integral;
        self.ordering_violations += o.ordering_violations;
        self.refinement_violations += o.refinement_violations;
        self.sandwich_violations += o.sandwich_violations;
        self
    }

    fn push(&mut self, rep: &ReplicateStat, level: f64, window: f64) {
        self.n += 1;
        let f = &rep.fine;
        if f.q_inf > level {
            self.fine.inf += 1;
        }
        if f.q_zero > level {
            self.fine.zero += 1;
        }
        if f.q_sup > level {
            self.fine.sup += 1;
        }
        if f.q_integral > level * window {
            self.integral += 1;
        }
        let c = &rep.coarse;
        if c.q_inf > level {
            self.coarse.inf += 1;
        }
        if c.q_zero > level {
            self.coarse.zero += 1;
        }
        if c.q_sup > level {
            self.coarse.sup += 1;
        }
        // structural invariants, exact pathwise
        if !(f.q_inf <= f.q_zero && f.q_zero <= f.q_sup) {
            self.ordering_violations += 1;
        }
        if f.q_sup < c.q_sup || f.q_zero < c.q_zero || !rep.dominance_ok {
            self.refinement_violations += 1;
        }
        let t = window;
        if f.q_integral > t * f.q_sup + 1e-12 || f.q_integral < t * f.q_inf - 1e-12 {
            self.sandwich_violations += 1;
        }
    }
}

/// Replicates per deterministic reduction block.
const BLOCK_PAIRS: u64 = 512;

/// Estimate the three tail probabilities on common random numbers.
///
/// All functionals are evaluated on the same paths, so the indicator ordering
/// 1{inf>u} <= 1{Q(0)>u} <= 1{sup>u} holds for every replicate and the
/// estimates are ordered exactly. Replicates are keyed by stream id and the
/// reduction is a fixed pairwise tree: results do not depend on worker count.
pub fn estimate_tail_probs(
    params: StorageParams,
    cfg: SimConfig,
    n_reps: u64,
    seed: u64,
) -> Result<TailProbs> {
    if n_reps < 1 {
        return Err(Error::domain("n_reps must be >= 1"));
    }
    let sim = QSimulator::new(params, cfg)?;
    let window = sim.effective_window();
    let level = cfg.level;
    let n_pairs = n_reps.div_ceil(2);

    let acc = replicate_reduce(
        n_pairs,
        BLOCK_PAIRS,
        || sim.make_scratch(),
        |scratch, pair, acc: &mut TailAcc| {
            let mut rng = RngStream::new(seed, pair).rng();
            sim.sampler.sample_increments_pair(
                &mut rng,
                &mut scratch.fbm,
                &mut scratch.inc_a,
                &mut scratch.inc_b,
            );
            let inc_a = std::mem::take(&mut scratch.inc_a);
            let rep = sim.q_from_increments(&inc_a, scratch);
            scratch.inc_a = inc_a;
            acc.push(&rep, level, window);
            if 2 * pair + 1 < n_reps {
                let inc_b = std::mem::take(&mut scratch.inc_b);
                let rep = sim.q_from_increments(&inc_b, scratch);
                scratch.inc_b = inc_b;
                acc.push(&rep, level, window);
            }
        },
        TailAcc::merge,
        TailAcc::default,
    );

    debug_assert_eq!(acc.n, n_reps);
    assert_eq!(acc.ordering_violations, 0, "CRN ordering must hold exactly");
    assert_eq!(
        acc.refinement_violations, 0,
        "grid refinement monotonicity must hold exactly"
    );
    assert_eq!(
        acc.sandwich_violations, 0,
        "integral sandwich must hold exactly"
    );

    let triple = |c: &TailCounts, step: f64| TailTriple {
        p_inf: TailEstimate::from_counts(c.inf, n_reps),
        p_zero: TailEstimate::from_counts(c.zero, n_reps),
        p_sup: TailEstimate::from_counts(c.sup, n_reps),
        step,
    };
    let fine = triple(&acc.fine, cfg.step);
    let coarse = triple(&acc.coarse, 2.0 * cfg.step);
    let infeasible = fine.p_zero.p_hat < 1e-4;
    Ok(TailProbs {
        fine,
        coarse,
        p_integral: TailEstimate::from_counts(acc.integral, n_reps),
        counts_fine: acc.fine,
        counts_coarse: acc.coarse,
        integral_count: acc.integral,
        n_reps,
        seed,
        params,
        cfg,
        effective_window: window,
        effective_horizon: sim.effective_horizon(),
        infeasible,
    })
}

/// Richardson extrapolation of a grid functional whose leading bias is
/// O(step^H): combine nested coarse (2 delta) and fine (delta) values.
pub fn richardson_extrapolate(coarse: f64, fine: f64, h: Hurst) -> f64 {
    let factor = 2f64.powf(h.value()) - 1.0;
    fine + (fine - coarse) / factor
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytics;

    fn params(h: f64, c: f64) -> StorageParams {
        StorageParams::new(Hurst::new(h).unwrap(), c).unwrap()
    }

    #[test]
    fn horizon_hand_values() {
        let p = params(0.5, 1.0);
        assert!((tau0(&p) - 1.0).abs() < 1e-15);
        assert!((choose_horizon(&p, 1.0, 5.0) - 5.0).abs() < 1e-15);
        let p = params(0.75, 1.0);
        assert!((tau0(&p) - 3.0).abs() < 1e-14);
        assert!((choose_horizon(&p, 2.0, 5.0) - 30.0).abs() < 1e-12);
    }

    #[test]
    fn config_validation() {
        let bad = SimConfig { step: 0.5, horizon_kappa: 5.0, window: 0.25, level: 1.0 };
        assert!(bad.validate().is_err());
        let bad = SimConfig { step: 0.01, horizon_kappa: 0.5, window: 1.0, level: 1.0 };
        assert!(bad.validate().is_err());
        let bad = SimConfig { step: 0.01, horizon_kappa: 5.0, window: 1.0, level: 0.0 };
        assert!(bad.validate().is_err());
        let ok = SimConfig { step: 0.01, horizon_kappa: 5.0, window: 0.0, level: 1.0 };
        assert!(ok.validate().is_ok());
    }

    #[test]
    fn zero_noise_gives_zero_q() {
        let sim = QSimulator::new(
            params(0.75, 1.0),
            SimConfig { step: 0.05, horizon_kappa: 5.0, window: 1.0, level: 1.0 },
        )
        .unwrap();
        let mut scratch = sim.make_scratch();
        let n = scratch.inc_a.len();
        let rep = sim.q_from_increments(&vec![0.0; n], &mut scratch);
        assert_eq!(rep.fine.q_sup, 0.0);
        assert_eq!(rep.fine.q_inf, 0.0);
        assert_eq!(rep.fine.q_integral, 0.0);
    }

    #[test]
    fn window_stats_constant_and_degenerate() {
        let grid = Grid::new(0.5, 4).unwrap(); // T = 2
        let path = SamplePath::new(grid, vec![3.0; 5]);
        let ws = window_stats(&path);
        assert_eq!((ws.q_zero, ws.q_inf, ws.q_sup, ws.q_integral), (3.0, 3.0, 3.0, 6.0));

        let point = SamplePath::new(Grid { step: 0.5, count: 0 }, vec![1.25]);
        let ws = window_stats(&point);
        assert_eq!(ws.q_inf, ws.q_zero);
        assert_eq!(ws.q_sup, ws.q_zero);
        assert_eq!(ws.q_integral, 0.0);
    }

    #[test]
    fn sliding_max_matches_bruteforce() {
        let mut rng = RngStream::new(17, 0).rng();
        let d: Vec<f64> = (0..200).map(|_| crate::rng::next_standard_normal(&mut rng)).collect();
        let w = 31;
        let n_out = 100;
        let mut deque = Vec::new();
        let mut out = Vec::new();
        sliding_window_max(&d, w, n_out, &mut deque, &mut out);
        assert_eq!(out.len(), n_out);
        for i in 0..n_out {
            let brute = d[i..=i + w].iter().cloned().fold(f64::MIN, f64::max);
            assert_eq!(out[i], brute, "mismatch at {i}");
        }
    }

    #[test]
    fn q_is_nonnegative_and_dominates_pairs() {
        let sim = QSimulator::new(
            params(0.75, 1.0),
            SimConfig { step: 0.05, horizon_kappa: 5.0, window: 1.0, level: 1.0 },
        )
        .unwrap();
        let path = sim.simulate_q_window(RngStream::new(5, 0));
        assert!(path.values.iter().all(|&q| q >= 0.0));
        assert_eq!(path.values.len(), sim.n_window + 1);
    }

    #[test]
    fn horizon_enlargement_never_decreases_q() {
        // common noise, nested horizons via two simulators sharing increments
        let p = params(0.6, 1.0);
        let cfg5 = SimConfig { step: 0.05, horizon_kappa: 5.0, window: 1.0, level: 1.0 };
        let cfg10 = SimConfig { step: 0.05, horizon_kappa: 10.0, window: 1.0, level: 1.0 };
        let sim5 = QSimulator::new(p, cfg5).unwrap();
        let sim10 = QSimulator::new(p, cfg10).unwrap();
        let mut scratch10 = sim10.make_scratch();
        let mut scratch5 = sim5.make_scratch();
        let n10 = scratch10.inc_a.len();
        let n5 = scratch5.inc_a.len();
        let mut rng = RngStream::new(99, 1).rng();
        let mut a = vec![0.0; n10];
        let mut b = vec![0.0; n10];
        sim10
            .sampler
            .sample_increments_pair(&mut rng, &mut scratch10.fbm, &mut a, &mut b);
        let rep10 = sim10.q_from_increments(&a, &mut scratch10);
        let rep5 = sim5.q_from_increments(&a[..n5], &mut scratch5);
        assert!(rep10.fine.q_sup >= rep5.fine.q_sup);
        assert!(rep10.fine.q_inf >= rep5.fine.q_inf);
        assert!(rep10.fine.q_zero >= rep5.fine.q_zero);
    }

    #[test]
    fn brownian_stationary_tail_with_bias_band() {
        // P(Q(0)>1) = e^{-2}; the grid supremum underestimates, with deficit
        // bounded by the barrier-shift model exp(-2c * 0.583 sqrt(step)).
        let p = params(0.5, 1.0);
        let cfg = SimConfig { step: 0.004, horizon_kappa: 10.0, window: 0.0, level: 1.0 };
        let n: u64 = 40_000;
        let run = estimate_tail_probs(p, cfg, n, 2024).unwrap();
        let exact = analytics::brownian_qzero_tail(1.0, 1.0);
        let deficit = (-2.0 * 1.166 * cfg.step.sqrt()).exp();
        let lo = exact * deficit - 4.0 * run.fine.p_zero.stderr;
        let hi = exact + 4.0 * run.fine.p_zero.stderr;
        let got = run.fine.p_zero.p_hat;
        assert!(got > lo && got < hi, "p_zero {got} outside [{lo}, {hi}]");
        // T=0: all three estimates coincide
        assert_eq!(run.counts_fine.inf, run.counts_fine.zero);
        assert_eq!(run.counts_fine.zero, run.counts_fine.sup);
        // coarse grid never exceeds fine for the sup-type functional
        assert!(run.coarse.p_zero.p_hat <= run.fine.p_zero.p_hat);
    }

    #[test]
    fn crn_ordering_strict_for_positive_window() {
        let p = params(0.75, 1.0);
        let cfg = SimConfig { step: 0.05, horizon_kappa: 5.0, window: 3.0, level: 1.5 };
        let run = estimate_tail_probs(p, cfg, 20_000, 7).unwrap();
        assert!(run.counts_fine.inf <= run.counts_fine.zero);
        assert!(run.counts_fine.zero <= run.counts_fine.sup);
        // for a window this wide the inequalities are strict in practice
        assert!(run.counts_fine.inf < run.counts_fine.sup);
        assert!(!run.infeasible);
    }

    #[test]
    fn determinism_across_runs() {
        let p = params(0.75, 1.0);
        let cfg = SimConfig { step: 0.1, horizon_kappa: 5.0, window: 1.0, level: 1.0 };
        let a = estimate_tail_probs(p, cfg, 5000, 42).unwrap();
        let b = estimate_tail_probs(p, cfg, 5000, 42).unwrap();
        assert_eq!(a.counts_fine.sup, b.counts_fine.sup);
        assert_eq!(a.counts_fine.inf, b.counts_fine.inf);
        assert_eq!(a.integral_count, b.integral_count);
        let c = estimate_tail_probs(p, cfg, 5000, 43).unwrap();
        assert_ne!(a.counts_fine.sup, c.counts_fine.sup);
    }

    #[test]
    fn rule_of_three_on_unreachable_level() {
        let p = params(0.75, 1.0);
        let cfg = SimConfig { step: 0.1, horizon_kappa: 5.0, window: 0.0, level: 50.0 };
        let run = estimate_tail_probs(p, cfg, 1000, 1).unwrap();
        assert_eq!(run.fine.p_zero.p_hat, 0.0);
        assert_eq!(run.fine.p_zero.upper95, 3.0 / 1000.0);
        assert!(run.infeasible);
    }

    #[test]
    fn stationarity_of_q_along_the_window() {
        // KS between Q(0) and Q(T/2) marginals
        let p = params(0.75, 1.0);
        let cfg = SimConfig { step: 0.05, horizon_kappa: 5.0, window: 3.0, level: 1.0 };
        let sim = QSimulator::new(p, cfg).unwrap();
        let n = 4000usize;
        let mut q0 = Vec::with_capacity(n);
        let mut qmid = Vec::with_capacity(n);
        for i in 0..n {
            let path = sim.simulate_q_window(RngStream::new(314, i as u64));
            q0.push(path.values[0]);
            qmid.push(path.values[path.values.len() / 2]);
        }
        let (_, pval) = crate::stats::ks_two_sample(&q0, &qmid);
        assert!(pval > 0.001, "stationarity KS p-value {pval}");
    }

    #[test]
    fn richardson_direction() {
        let h = Hurst::new(0.5).unwrap();
        // refined value moves beyond the fine value away from the coarse one
        let r = richardson_extrapolate(0.90, 0.95, h);
        assert!(r > 0.95);
        assert!((r - (0.95 + 0.05 / (2f64.sqrt() - 1.0))).abs() < 1e-12);
    }
}
