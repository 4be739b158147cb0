//! Statistical plumbing shared by the estimation modules: compensated
//! accumulators, a deterministic replicate-parallel reducer (results are
//! identical for any worker count), two-sample Kolmogorov-Smirnov, and a
//! small weighted linear fit.

use rayon::prelude::*;

/// Kahan-compensated sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompSum {
    sum: f64,
    c: f64,
}

impl CompSum {
    pub fn add(&mut self, x: f64) {
        let y = x - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }

    pub fn merge(&mut self, other: &CompSum) {
        self.add(other.sum);
        self.add(-other.c);
    }

    pub fn value(&self) -> f64 {
        self.sum - self.c
    }
}

/// Mean/variance accumulator with compensated sums (heavy-tailed summands
/// such as exp(sup) need the compensation for an honest stderr).
#[derive(Debug, Clone, Copy, Default)]
pub struct MeanVar {
    n: u64,
    sum: CompSum,
    sumsq: CompSum,
}

impl MeanVar {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        self.sum.add(x);
        self.sumsq.add(x * x);
    }

    pub fn merge(&mut self, other: &MeanVar) {
        self.n += other.n;
        self.sum.merge(&other.sum);
        self.sumsq.merge(&other.sumsq);
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        if self.n == 0 {
            return f64::NAN;
        }
        self.sum.value() / self.n as f64
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            return f64::NAN;
        }
        let n = self.n as f64;
        let m = self.mean();
        ((self.sumsq.value() - n * m * m) / (n - 1.0)).max(0.0)
    }

    /// Standard error of the mean.
    pub fn stderr(&self) -> f64 {
        (self.variance() / self.n as f64).sqrt()
    }
}

/// Proportion estimate from a Bernoulli count.
#[derive(Debug, Clone, Copy)]
pub struct Proportion {
    pub count: u64,
    pub n: u64,
}

impl Proportion {
    pub fn p_hat(&self) -> f64 {
        self.count as f64 / self.n as f64
    }

    pub fn stderr(&self) -> f64 {
        let p = self.p_hat();
        (p * (1.0 - p) / self.n as f64).sqrt()
    }

    /// One-sided 95% upper bound; the rule of three when no event was seen.
    pub fn upper95(&self) -> f64 {
        if self.count == 0 {
            3.0 / self.n as f64
        } else {
            (self.p_hat() + 1.96 * self.stderr()).min(1.0)
        }
    }
}

/// Standard error of the ratio of two proportions estimated on common random
/// numbers (same replicates), by the delta method. `joint_count` counts
/// replicates where both events occurred; for nested events it equals the
/// numerator count and the formula reduces to sqrt(r(1-r)/(n p_den)).
pub fn ratio_stderr(num: Proportion, den: Proportion, joint_count: u64) -> f64 {
    debug_assert_eq!(num.n, den.n);
    let (pa, pb) = (num.p_hat(), den.p_hat());
    if den.count == 0 {
        return f64::NAN;
    }
    let n = den.n as f64;
    let pab = joint_count as f64 / n;
    let var = (pa * (1.0 - pa) / (pb * pb) + pa * pa * (1.0 - pb) / (pb * pb * pb)
        - 2.0 * pa * (pab - pa * pb) / (pb * pb * pb))
        / n;
    var.max(0.0).sqrt()
}

/// Deterministic parallel map-reduce over replicate indices.
///
/// Indices are split into fixed blocks of `block` replicates; each block is
/// reduced sequentially in index order, block results are merged by a fixed
/// pairwise tree. The outcome is bit-identical for any number of workers.
pub fn replicate_reduce<A, S, FS, F>(
    n_reps: u64,
    block: u64,
    make_state: FS,
    f: F,
    merge: impl Fn(A, A) -> A + Sync,
    zero: impl Fn() -> A + Sync,
) -> A
where
    A: Send,
    S: Send,
    FS: Fn() -> S + Sync,
    F: Fn(&mut S, u64, &mut A) + Sync,
{
    assert!(block >= 1);
    let n_blocks = n_reps.div_ceil(block);
    let mut partials: Vec<A> = (0..n_blocks)
        .into_par_iter()
        .map(|b| {
            let mut state = make_state();
            let mut acc = zero();
            let lo = b * block;
            let hi = ((b + 1) * block).min(n_reps);
            for i in lo..hi {
                f(&mut state, i, &mut acc);
            }
            acc
        })
        .collect();
    pairwise_tree(&mut partials, &merge).unwrap_or_else(zero)
}

/// Pairwise tree reduction in slice order.
pub fn pairwise_tree<A>(items: &mut Vec<A>, merge: &impl Fn(A, A) -> A) -> Option<A> {
    if items.is_empty() {
        return None;
    }
    while items.len() > 1 {
        let mut next = Vec::with_capacity(items.len().div_ceil(2));
        let mut iter = items.drain(..);
        while let Some(a) = iter.next() {
            match iter.next() {
                Some(b) => next.push(merge(a, b)),
                None => next.push(a),
            }
        }
        drop(iter);
        *items = next;
    }
    items.pop()
}

/// Two-sample Kolmogorov-Smirnov statistic and asymptotic p-value.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> (f64, f64) {
    assert!(!a.is_empty() && !b.is_empty());
    let mut xs: Vec<f64> = a.to_vec();
    let mut ys: Vec<f64> = b.to_vec();
    xs.sort_by(|p, q| p.partial_cmp(q).unwrap());
    ys.sort_by(|p, q| p.partial_cmp(q).unwrap());
    let (n, m) = (xs.len(), ys.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < n && j < m {
        let x = xs[i];
        let y = ys[j];
        if x <= y {
            i += 1;
        }
        if y <= x {
            j += 1;
        }
        let diff = (i as f64 / n as f64 - j as f64 / m as f64).abs();
        d = d.max(diff);
    }
    let ne = (n as f64 * m as f64) / (n as f64 + m as f64);
    let lambda = (ne.sqrt() + 0.12 + 0.11 / ne.sqrt()) * d;
    (d, kolmogorov_sf(lambda))
}

/// Kolmogorov distribution upper tail Q(lambda) = 2 sum (-1)^{k-1} e^{-2k^2 lambda^2}.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..101 {
        let term = (-2.0 * (k * k) as f64 * lambda * lambda).exp();
        sum += sign * term;
        if term < 1e-17 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Ordinary least squares y = intercept + slope x with per-point standard
/// errors propagated into the slope standard error.
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
}

pub fn line_fit(xs: &[f64], ys: &[f64], sigmas: &[f64]) -> LineFit {
    assert!(xs.len() == ys.len() && xs.len() >= 2);
    let n = xs.len() as f64;
    let xbar = xs.iter().sum::<f64>() / n;
    let ybar = ys.iter().sum::<f64>() / n;
    let ss: f64 = xs.iter().map(|x| (x - xbar) * (x - xbar)).sum();
    let slope: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (x - xbar) * (y - ybar))
        .sum::<f64>()
        / ss;
    let intercept = ybar - slope * xbar;
    let var: f64 = xs
        .iter()
        .zip(sigmas)
        .map(|(x, s)| {
            let w = (x - xbar) / ss;
            w * w * s * s
        })
        .sum();
    LineFit {
        slope,
        intercept,
        slope_stderr: var.sqrt(),
    }
}

/// Trapezoidal integral of uniformly spaced samples.
pub fn trapezoid(values: &[f64], step: f64) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let inner: f64 = values[1..values.len() - 1].iter().sum();
    step * (0.5 * values[0] + inner + 0.5 * values[values.len() - 1])
}
