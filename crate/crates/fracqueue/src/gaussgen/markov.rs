//! Stationary Ornstein-Uhlenbeck sampling via the exact AR(1) recursion.
//! Unit variance, correlation r(t) = exp(-|t|); serves as the stationary
//! test vehicle whose local structure matches Brownian scaling (a = 1).

use rand_chacha::ChaCha8Rng;

use super::{Grid, SamplePath};
use crate::rng::{next_standard_normal, RngStream};

/// Step coefficients for the exact transition X' = rho X + sd Z.
#[derive(Debug, Clone, Copy)]
pub struct OrnsteinUhlenbeck {
    pub rho: f64,
    pub sd: f64,
}

impl OrnsteinUhlenbeck {
    pub fn with_step(step: f64) -> Self {
        let rho = (-step).exp();
        OrnsteinUhlenbeck {
            rho,
            sd: (1.0 - rho * rho).sqrt(),
        }
    }

    /// Fill `out` with a stationary path: out[0] ~ N(0,1), then AR(1) steps.
    pub fn fill_path(&self, rng: &mut ChaCha8Rng, out: &mut [f64]) {
        let mut x = next_standard_normal(rng);
        out[0] = x;
        for v in out.iter_mut().skip(1) {
            x = self.rho * x + self.sd * next_standard_normal(rng);
            *v = x;
        }
    }
}

/// Exact stationary Gauss-Markov sequence on the grid.
pub fn sample_ou(grid: Grid, stream: RngStream) -> SamplePath {
    let ou = OrnsteinUhlenbeck::with_step(grid.step);
    let mut rng = stream.rng();
    let mut values = vec![0.0; grid.count + 1];
    ou.fill_path(&mut rng, &mut values);
    SamplePath::new(grid, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stationary_unit_variance() {
        let grid = Grid::new(0.1, 20).unwrap();
        let n = 50_000usize;
        let mut sum2_first = 0.0;
        let mut sum2_last = 0.0;
        for i in 0..n {
            let p = sample_ou(grid, RngStream::new(21, i as u64));
            sum2_first += p.values[0] * p.values[0];
            sum2_last += p.values[20] * p.values[20];
        }
        let se = 3.0 * (2.0 / n as f64).sqrt();
        assert!((sum2_first / n as f64 - 1.0).abs() < se);
        assert!((sum2_last / n as f64 - 1.0).abs() < se);
    }

    #[test]
    fn lag_one_correlation_matches_exponential() {
        // Corr(X(0), X(1)) = e^{-1}; grid step 0.05, lag 20 steps
        let grid = Grid::new(0.05, 20).unwrap();
        let n = 100_000usize;
        let mut acc = 0.0;
        for i in 0..n {
            let p = sample_ou(grid, RngStream::new(22, i as u64));
            acc += p.values[0] * p.values[20];
        }
        let got = acc / n as f64;
        let want = (-1.0f64).exp(); // 0.36787944117144233
        assert!((got - want).abs() < 3.0 / (n as f64).sqrt() * 1.2, "corr {got}");
    }

    #[test]
    fn short_step_correlation() {
        // Corr(X(0), X(step)) at step 0.01 is e^{-0.01} ~ 0.99005
        let grid = Grid::new(0.01, 1).unwrap();
        let n = 100_000usize;
        let mut acc = 0.0;
        for i in 0..n {
            let p = sample_ou(grid, RngStream::new(23, i as u64));
            acc += p.values[0] * p.values[1];
        }
        let got = acc / n as f64;
        assert!((got - 0.99004983374916805).abs() < 4.0 / (n as f64).sqrt() * 0.2, "corr {got}");
    }
}
