//! Monte Carlo estimation of Pickands-type constants
//! E exp(Phi(sqrt2 eta - sigma^2_eta)) for a registry of path functionals.
//!
//! Estimates are reported on the requested grid and on the nested half-step
//! grid from the same noise, together with the Richardson pair combining the
//! two (grid sup/inf bias is the dominant systematic error and decays like
//! step^H). Exponential summands are aggregated with compensated summation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussgen::{FbmSampler, Hurst};
use crate::rng::RngStream;
use crate::stats::{line_fit, replicate_reduce, trapezoid, MeanVar};
use crate::storage::richardson_extrapolate;

/// A path functional satisfying the affine law Phi(a f + b) = a Phi(f) + b
/// for a, b > 0 and dominated by the supremum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Functional {
    Sup,
    Inf,
    /// inf over the first axis of sup over the second.
    InfSup,
    /// Integral normalized by window length, so the affine law holds.
    Integral,
}

impl Functional {
    pub fn is_two_dimensional(&self) -> bool {
        matches!(self, Functional::InfSup)
    }

    /// Evaluate on a 1-D grid function (uniform step over the window).
    pub fn evaluate_1d(&self, values: &[f64], step: f64) -> f64 {
        match self {
            Functional::Sup => values.iter().cloned().fold(f64::MIN, f64::max),
            Functional::Inf => values.iter().cloned().fold(f64::MAX, f64::min),
            Functional::Integral => {
                if values.len() < 2 {
                    return values[0];
                }
                let span = step * (values.len() - 1) as f64;
                trapezoid(values, step) / span
            }
            Functional::InfSup => panic!("InfSup is a field functional"),
        }
    }

    /// Evaluate inf-sup on a row-major matrix (rows = first axis).
    pub fn evaluate_infsup(values: &[f64], rows: usize, cols: usize) -> f64 {
        debug_assert_eq!(values.len(), rows * cols);
        let mut outer = f64::MAX;
        for i in 0..rows {
            let row = &values[i * cols..(i + 1) * cols];
            let inner = row.iter().cloned().fold(f64::MIN, f64::max);
            outer = outer.min(inner);
        }
        outer
    }
}

/// The Gaussian field eta the constant is taken over.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum EtaSpec {
    /// Fractional Brownian motion on [0, span], variance t^{2H}.
    Fbm { hurst: Hurst, span: f64 },
    /// Independent coordinate sum B1(a^{1/2H} t1) + B2(a^{1/2H} t2) on
    /// [0, lambda1] x [0, lambda2], variance a (t1^{2H} + t2^{2H}).
    SumField {
        hurst: Hurst,
        a_coef: f64,
        lambda1: f64,
        lambda2: f64,
    },
}

impl EtaSpec {
    pub fn hurst(&self) -> Hurst {
        match self {
            EtaSpec::Fbm { hurst, .. } | EtaSpec::SumField { hurst, .. } => *hurst,
        }
    }
}

/// Grid and replication control for one estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateConfig {
    /// Reporting grid step; sampling happens at step/2 for the refined pair.
    pub step: f64,
    pub n_reps: u64,
    pub seed: u64,
}

/// Monte Carlo estimate of a Pickands-type constant with grid metadata.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantEstimate {
    /// Estimate on the reporting grid.
    pub value: f64,
    pub stderr: f64,
    pub grid_step: f64,
    pub n_reps: u64,
    /// Estimate at step/2 from the same noise.
    pub fine_value: f64,
    pub fine_stderr: f64,
    /// Richardson pair of (step, step/2) with exponent H.
    pub refined_value: f64,
    pub refined_stderr: f64,
}

#[derive(Clone, Copy, Default)]
struct ExpAcc {
    coarse: MeanVar,
    fine: MeanVar,
    refined: MeanVar,
    monotone_violations: u64,
}

impl ExpAcc {
    fn merge(mut self, o: ExpAcc) -> ExpAcc {
        self.coarse.merge(&o.coarse);
        self.fine.merge(&o.fine);
        self.refined.merge(&o.refined);
        self.monotone_violations += o.monotone_violations;
        self
    }

    fn push(&mut self, coarse: f64, fine: f64, h: Hurst, tighter_is_larger: Option<bool>) {
        let ec = coarse.exp();
        let ef = fine.exp();
        self.coarse.push(ec);
        self.fine.push(ef);
        self.refined.push(richardson_extrapolate(ec, ef, h));
        // grid refinement moves sup up and inf down, exactly
        if let Some(larger) = tighter_is_larger {
            let ok = if larger { ef >= ec } else { ef <= ec };
            if !ok {
                self.monotone_violations += 1;
            }
        }
    }
}

const BLOCK_PAIRS: u64 = 256;

/// Estimate E exp(Phi(sqrt2 eta - sigma^2_eta)) by Monte Carlo.
///
/// The variance function is evaluated exactly on the grid; sampling is exact
/// via circulant embedding. Replicates are keyed by stream id, so the result
/// is independent of worker count.
pub fn estimate_constant(
    eta: &EtaSpec,
    phi: Functional,
    cfg: EstimateConfig,
) -> Result<ConstantEstimate> {
    if cfg.n_reps < 100 {
        return Err(Error::domain("n_reps must be at least 100"));
    }
    if !cfg.step.is_finite() || cfg.step <= 0.0 {
        return Err(Error::domain(format!("step must be > 0, got {}", cfg.step)));
    }
    match (eta, phi.is_two_dimensional()) {
        (EtaSpec::Fbm { .. }, false) => estimate_1d(eta, phi, cfg),
        (EtaSpec::SumField { .. }, true) => estimate_2d(eta, cfg),
        (EtaSpec::Fbm { .. }, true) => Err(Error::GridMismatch(
            "InfSup needs the two-dimensional sum field".into(),
        )),
        (EtaSpec::SumField { .. }, false) => Err(Error::GridMismatch(
            "one-dimensional functionals act on the fBm path, not the field".into(),
        )),
    }
}

/// Fine grid size: even count of half-steps covering the span.
fn fine_count(span: f64, step: f64) -> usize {
    let n_coarse = (span / step).round().max(1.0) as usize;
    2 * n_coarse
}

fn estimate_1d(eta: &EtaSpec, phi: Functional, cfg: EstimateConfig) -> Result<ConstantEstimate> {
    let (h, span) = match eta {
        EtaSpec::Fbm { hurst, span } => (*hurst, *span),
        _ => unreachable!(),
    };
    if !span.is_finite() || span <= 0.0 {
        return Err(Error::domain(format!("span must be > 0, got {span}")));
    }
    let n_fine = fine_count(span, cfg.step);
    let fine_step = cfg.step / 2.0;
    let sampler = FbmSampler::new(n_fine, h, fine_step)?;
    let two_h = 2.0 * h.value();
    // -sigma^2(t_k) on the fine grid
    let drift: Vec<f64> = (0..=n_fine)
        .map(|k| -(fine_step * k as f64).powf(two_h))
        .collect();
    let monotone = match phi {
        Functional::Sup => Some(true),
        Functional::Inf => Some(false),
        _ => None,
    };

    struct State {
        scratch: crate::gaussgen::FbmScratch,
        inc_a: Vec<f64>,
        inc_b: Vec<f64>,
        x_fine: Vec<f64>,
        x_coarse: Vec<f64>,
    }

    let n_pairs = cfg.n_reps.div_ceil(2);
    let sqrt2 = std::f64::consts::SQRT_2;
    let acc = replicate_reduce(
        n_pairs,
        BLOCK_PAIRS,
        || State {
            scratch: sampler.make_scratch(),
            inc_a: vec![0.0; n_fine],
            inc_b: vec![0.0; n_fine],
            x_fine: vec![0.0; n_fine + 1],
            x_coarse: vec![0.0; n_fine / 2 + 1],
        },
        |st, pair, acc: &mut ExpAcc| {
            let mut rng = RngStream::new(cfg.seed, pair).rng();
            sampler.sample_increments_pair(
                &mut rng,
                &mut st.scratch,
                &mut st.inc_a,
                &mut st.inc_b,
            );
            for half in 0..2u64 {
                if 2 * pair + half >= cfg.n_reps {
                    break;
                }
                let incs = if half == 0 { &st.inc_a } else { &st.inc_b };
                st.x_fine[0] = 0.0;
                let mut b = 0.0;
                for (k, &inc) in incs.iter().enumerate() {
                    b += inc;
                    st.x_fine[k + 1] = sqrt2 * b + drift[k + 1];
                }
                for (j, x) in st.x_coarse.iter_mut().enumerate() {
                    *x = st.x_fine[2 * j];
                }
                let vf = phi.evaluate_1d(&st.x_fine, fine_step);
                let vc = phi.evaluate_1d(&st.x_coarse, cfg.step);
                acc.push(vc, vf, h, monotone);
            }
        },
        ExpAcc::merge,
        ExpAcc::default,
    );

    if monotone.is_some() {
        assert_eq!(
            acc.monotone_violations, 0,
            "grid refinement direction must hold pathwise for sup/inf"
        );
    }
    Ok(finish(acc, cfg))
}

fn estimate_2d(eta: &EtaSpec, cfg: EstimateConfig) -> Result<ConstantEstimate> {
    let (h, a_coef, l1, l2) = match eta {
        EtaSpec::SumField {
            hurst,
            a_coef,
            lambda1,
            lambda2,
        } => (*hurst, *a_coef, *lambda1, *lambda2),
        _ => unreachable!(),
    };
    if a_coef <= 0.0 || l1 <= 0.0 || l2 <= 0.0 {
        return Err(Error::domain(
            "sum field needs a_coef, lambda1, lambda2 > 0".to_string(),
        ));
    }
    let scale = a_coef.powf(1.0 / (2.0 * h.value()));
    let n1 = fine_count(l1, cfg.step);
    let n2 = fine_count(l2, cfg.step);
    let fine_step = cfg.step / 2.0;
    let s1 = FbmSampler::new(n1, h, scale * fine_step)?;
    let s2 = FbmSampler::new(n2, h, scale * fine_step)?;
    let two_h = 2.0 * h.value();
    let drift = |n: usize| -> Vec<f64> {
        (0..=n)
            .map(|k| -a_coef * (fine_step * k as f64).powf(two_h))
            .collect()
    };
    let d1 = drift(n1);
    let d2 = drift(n2);

    struct State {
        sc1: crate::gaussgen::FbmScratch,
        sc2: crate::gaussgen::FbmScratch,
        inc1: Vec<f64>,
        spare1: Vec<f64>,
        inc2: Vec<f64>,
        spare2: Vec<f64>,
        f_axis: Vec<f64>,
        g_axis: Vec<f64>,
        cells: Vec<f64>,
        cells_coarse: Vec<f64>,
    }

    let sqrt2 = std::f64::consts::SQRT_2;
    let acc = replicate_reduce(
        cfg.n_reps,
        2 * BLOCK_PAIRS,
        || State {
            sc1: s1.make_scratch(),
            sc2: s2.make_scratch(),
            inc1: vec![0.0; n1],
            spare1: vec![0.0; n1],
            inc2: vec![0.0; n2],
            spare2: vec![0.0; n2],
            f_axis: vec![0.0; n1 + 1],
            g_axis: vec![0.0; n2 + 1],
            cells: vec![0.0; (n1 + 1) * (n2 + 1)],
            cells_coarse: vec![0.0; (n1 / 2 + 1) * (n2 / 2 + 1)],
        },
        |st, rep, acc: &mut ExpAcc| {
            let mut rng = RngStream::new(cfg.seed, rep).rng();
            s1.sample_increments_pair(&mut rng, &mut st.sc1, &mut st.inc1, &mut st.spare1);
            s2.sample_increments_pair(&mut rng, &mut st.sc2, &mut st.inc2, &mut st.spare2);
            st.f_axis[0] = 0.0;
            let mut b = 0.0;
            for (k, &inc) in st.inc1.iter().enumerate() {
                b += inc;
                st.f_axis[k + 1] = sqrt2 * b + d1[k + 1];
            }
            st.g_axis[0] = 0.0;
            let mut b = 0.0;
            for (k, &inc) in st.inc2.iter().enumerate() {
                b += inc;
                st.g_axis[k + 1] = sqrt2 * b + d2[k + 1];
            }
            let cols = n2 + 1;
            for (i, &f) in st.f_axis.iter().enumerate() {
                for (j, &g) in st.g_axis.iter().enumerate() {
                    st.cells[i * cols + j] = f + g;
                }
            }
            let vf = Functional::evaluate_infsup(&st.cells, n1 + 1, cols);
            let ccols = n2 / 2 + 1;
            for i in 0..=(n1 / 2) {
                for j in 0..ccols {
                    st.cells_coarse[i * ccols + j] = st.cells[(2 * i) * cols + 2 * j];
                }
            }
            let vc = Functional::evaluate_infsup(&st.cells_coarse, n1 / 2 + 1, ccols);
            // inf-sup refinement has no fixed pathwise direction: the two
            // axes move it opposite ways
            acc.push(vc, vf, h, None);
        },
        ExpAcc::merge,
        ExpAcc::default,
    );
    Ok(finish(acc, cfg))
}

fn finish(acc: ExpAcc, cfg: EstimateConfig) -> ConstantEstimate {
    ConstantEstimate {
        value: acc.coarse.mean(),
        stderr: acc.coarse.stderr(),
        grid_step: cfg.step,
        n_reps: acc.coarse.count(),
        fine_value: acc.fine.mean(),
        fine_stderr: acc.fine.stderr(),
        refined_value: acc.refined.mean(),
        refined_stderr: acc.refined.stderr(),
    }
}

/// Slope of H_sup([0,S]) against S (free intercept): the classical Pickands
/// constant estimate, with the stderr propagated from the per-S estimates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PickandsLimit {
    pub slope: f64,
    pub slope_stderr: f64,
    pub intercept: f64,
    pub s_list: Vec<f64>,
    pub estimates: Vec<ConstantEstimate>,
}

pub fn estimate_pickands_limit(
    h: Hurst,
    s_list: &[f64],
    cfg: EstimateConfig,
) -> Result<PickandsLimit> {
    let cfgs = vec![cfg; s_list.len()];
    estimate_pickands_limit_per_s(h, s_list, &cfgs)
}

/// Same fit with an explicit per-window configuration (larger windows need
/// far more replicates: the variance of exp(sup) grows exponentially in S).
pub fn estimate_pickands_limit_per_s(
    h: Hurst,
    s_list: &[f64],
    cfgs: &[EstimateConfig],
) -> Result<PickandsLimit> {
    if s_list.len() < 3 {
        return Err(Error::InsufficientPoints {
            needed: 3,
            got: s_list.len(),
        });
    }
    if cfgs.len() != s_list.len() {
        return Err(Error::domain("one config per window size required"));
    }
    let mut estimates = Vec::with_capacity(s_list.len());
    for (i, (&s, cfg)) in s_list.iter().zip(cfgs).enumerate() {
        if s <= 0.0 {
            return Err(Error::domain(format!("window sizes must be > 0, got {s}")));
        }
        let sub = EstimateConfig {
            seed: cfg.seed.wrapping_add(1 + i as u64),
            ..*cfg
        };
        estimates.push(estimate_constant(
            &EtaSpec::Fbm { hurst: h, span: s },
            Functional::Sup,
            sub,
        )?);
    }
    let ys: Vec<f64> = estimates.iter().map(|e| e.refined_value).collect();
    let sigmas: Vec<f64> = estimates.iter().map(|e| e.refined_stderr).collect();
    let fit = line_fit(s_list, &ys, &sigmas);
    Ok(PickandsLimit {
        slope: fit.slope,
        slope_stderr: fit.slope_stderr,
        intercept: fit.intercept,
        s_list: s_list.to_vec(),
        estimates,
    })
}

/// Report of the functional-registry contract checks on random inputs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FunctionalReport {
    pub cases: usize,
    /// Largest relative error of Phi(a f + b) vs a Phi(f) + b.
    pub f2_max_rel_err: f64,
    /// Largest positive excess of Phi(f) over sup f (0 means the bound held).
    pub upper_bound_max_excess: f64,
    /// Cases where the literal bound |Phi(f)| <= sup f failed (expected for
    /// inf-type functionals on negative-valued inputs).
    pub literal_f1_violations: usize,
}

/// Exercise F2 (affine equivariance) and both readings of F1 on random grid
/// functions and random a, b in (0, 10].
pub fn validate_functional(phi: Functional, seed: u64) -> FunctionalReport {
    let mut rng = RngStream::new(seed, 0).rng();
    let cases = 100;
    let mut f2_max = 0.0f64;
    let mut excess_max = 0.0f64;
    let mut literal = 0usize;
    let (rows, cols) = (9, 7);
    let step = 0.25;
    for case in 0..cases {
        let n = if phi.is_two_dimensional() { rows * cols } else { 33 };
        let scale = if case % 3 == 0 { 5.0 } else { 1.0 };
        let offset = match case % 4 {
            0 => 0.0,
            1 => -5.0, // strictly negative inputs probe the literal F1 bound
            2 => 3.0,
            _ => -0.5,
        };
        let f: Vec<f64> = (0..n)
            .map(|_| scale * crate::rng::next_standard_normal(&mut rng) + offset)
            .collect();
        let a = 10.0 * crate::rng::next_open01(&mut rng);
        let b = 10.0 * crate::rng::next_open01(&mut rng);
        let af: Vec<f64> = f.iter().map(|x| a * x + b).collect();

        let eval = |v: &[f64]| -> f64 {
            if phi.is_two_dimensional() {
                Functional::evaluate_infsup(v, rows, cols)
            } else {
                phi.evaluate_1d(v, step)
            }
        };
        let phi_f = eval(&f);
        let phi_af = eval(&af);
        let want = a * phi_f + b;
        let rel = ((phi_af - want) / want.abs().max(1.0)).abs();
        f2_max = f2_max.max(rel);

        let sup_f = f.iter().cloned().fold(f64::MIN, f64::max);
        excess_max = excess_max.max(phi_f - sup_f);
        if phi_f.abs() > sup_f {
            literal += 1;
        }
    }
    FunctionalReport {
        cases,
        f2_max_rel_err: f2_max,
        upper_bound_max_excess: excess_max,
        literal_f1_violations: literal,
    }
}

/// Per-point identity E exp(sqrt2 eta(t) - sigma^2(t)) = 1: sample means and
/// standard errors at the requested fBm grid indices, returned as
/// (t, mean, stderr) triples.
pub fn exponential_moment_check(
    h: Hurst,
    step: f64,
    indices: &[usize],
    n_reps: u64,
    seed: u64,
) -> Result<Vec<(f64, f64, f64)>> {
    let n = *indices
        .iter()
        .max()
        .ok_or_else(|| Error::domain("empty index list"))?;
    if n == 0 {
        return Err(Error::domain("indices must include a positive grid point"));
    }
    let sampler = FbmSampler::new(n, h, step)?;
    let two_h = 2.0 * h.value();
    let sqrt2 = std::f64::consts::SQRT_2;
    let n_pairs = n_reps.div_ceil(2);
    let accs = replicate_reduce(
        n_pairs,
        BLOCK_PAIRS,
        || {
            (
                sampler.make_scratch(),
                vec![0.0; n],
                vec![0.0; n],
                vec![0.0; n + 1],
            )
        },
        |(scratch, inc_a, inc_b, path), pair, accs: &mut Vec<MeanVar>| {
            let mut rng = RngStream::new(seed, pair).rng();
            sampler.sample_increments_pair(&mut rng, scratch, inc_a, inc_b);
            for half in 0..2u64 {
                if 2 * pair + half >= n_reps {
                    break;
                }
                let incs: &[f64] = if half == 0 { inc_a } else { inc_b };
                path[0] = 0.0;
                let mut b = 0.0;
                for (k, &inc) in incs.iter().enumerate() {
                    b += inc;
                    path[k + 1] = b;
                }
                for (slot, &idx) in indices.iter().enumerate() {
                    let t = step * idx as f64;
                    let x = sqrt2 * path[idx] - t.powf(two_h);
                    accs[slot].push(x.exp());
                }
            }
        },
        |mut a, b| {
            for (x, y) in a.iter_mut().zip(&b) {
                x.merge(y);
            }
            a
        },
        || vec![MeanVar::default(); indices.len()],
    );
    Ok(indices
        .iter()
        .zip(&accs)
        .map(|(&idx, m)| (step * idx as f64, m.mean(), m.stderr()))
        .collect())
}
