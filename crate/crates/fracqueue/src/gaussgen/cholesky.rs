//! Exact fBm sampling from the Cholesky factor of the increment covariance.
//! O(n^2) memory and O(n^3) setup; used as the oracle the FFT sampler is
//! cross-validated against.

use super::{fgn_autocov, Grid, Hurst, SamplePath};
use crate::error::{Error, Result};
use crate::rng::{next_standard_normal, RngStream};

/// Grids beyond this size are refused; the sampler is a test oracle.
pub const CHOLESKY_MAX_COUNT: usize = 4096;

/// Precomputed factor for repeated sampling on one grid.
pub struct CholeskySampler {
    grid: Grid,
    /// Lower-triangular factor, row-major packed: row i occupies i+1 entries.
    lower: Vec<f64>,
}

impl CholeskySampler {
    pub fn new(grid: Grid, h: Hurst) -> Result<Self> {
        let n = grid.count;
        if n > CHOLESKY_MAX_COUNT {
            return Err(Error::SizeExceeded {
                count: n,
                max: CHOLESKY_MAX_COUNT,
            });
        }
        let scale = grid.step.powf(2.0 * h.value());
        let cov: Vec<f64> = (0..n).map(|k| scale * fgn_autocov(k as u64, h)).collect();

        let mut lower = vec![0.0f64; n * (n + 1) / 2];
        let row = |i: usize| i * (i + 1) / 2;
        for i in 0..n {
            for j in 0..=i {
                let mut sum = cov[i - j];
                for k in 0..j {
                    sum -= lower[row(i) + k] * lower[row(j) + k];
                }
                if i == j {
                    if sum <= 0.0 {
                        return Err(Error::NotPositiveDefinite { pivot: i });
                    }
                    lower[row(i) + j] = sum.sqrt();
                } else {
                    lower[row(i) + j] = sum / lower[row(j) + j];
                }
            }
        }
        Ok(CholeskySampler { grid, lower })
    }

    pub fn sample(&self, stream: RngStream) -> SamplePath {
        let n = self.grid.count;
        let mut rng = stream.rng();
        let z: Vec<f64> = (0..n).map(|_| next_standard_normal(&mut rng)).collect();
        let mut values = Vec::with_capacity(n + 1);
        values.push(0.0);
        let mut acc = 0.0;
        let row = |i: usize| i * (i + 1) / 2;
        for i in 0..n {
            let mut inc = 0.0;
            for (k, zk) in z[..=i].iter().enumerate() {
                inc += self.lower[row(i) + k] * zk;
            }
            acc += inc;
            values.push(acc);
        }
        SamplePath::new(self.grid, values)
    }
}

/// One-shot exact fBm sample via Cholesky factorization.
pub fn sample_fbm_cholesky(grid: Grid, h: Hurst, stream: RngStream) -> Result<SamplePath> {
    Ok(CholeskySampler::new(grid, h)?.sample(stream))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_increment_is_scaled_normal() {
        let grid = Grid::new(0.25, 1).unwrap();
        let h = Hurst::new(0.8).unwrap();
        let sampler = CholeskySampler::new(grid, h).unwrap();
        let n = 50_000usize;
        let mut sum2 = 0.0;
        for i in 0..n {
            let p = sampler.sample(RngStream::new(4, i as u64));
            sum2 += p.values[1] * p.values[1];
        }
        let want = 0.25f64.powf(1.6);
        let got = sum2 / n as f64;
        assert!(
            (got - want).abs() < 3.0 * want * (2.0 / n as f64).sqrt(),
            "var {got} want {want}"
        );
    }

    #[test]
    fn size_guard() {
        let grid = Grid::new(0.1, CHOLESKY_MAX_COUNT + 1).unwrap();
        match CholeskySampler::new(grid, Hurst::new(0.7).unwrap()) {
            Err(Error::SizeExceeded { count, max }) => {
                assert_eq!(count, CHOLESKY_MAX_COUNT + 1);
                assert_eq!(max, CHOLESKY_MAX_COUNT);
            }
            Err(other) => panic!("expected SizeExceeded, got {other:?}"),
            Ok(_) => panic!("expected SizeExceeded, got a sampler"),
        }
    }

    #[test]
    fn pairwise_covariance_matches_kernel() {
        // Cov(B(s),B(t)) = (s^{2H}+t^{2H}-|t-s|^{2H})/2 from 1e5 replicates
        let grid = Grid::new(0.5, 8).unwrap();
        let h = Hurst::new(0.7).unwrap();
        let sampler = CholeskySampler::new(grid, h).unwrap();
        let n = 100_000usize;
        let (i, j) = (3usize, 7usize);
        let (s, t) = (grid.time(i), grid.time(j));
        let mut acc = 0.0;
        for r in 0..n {
            let p = sampler.sample(RngStream::new(8, r as u64));
            acc += p.values[i] * p.values[j];
        }
        let got = acc / n as f64;
        let two_h = 2.0 * h.value();
        let want = 0.5 * (s.powf(two_h) + t.powf(two_h) - (t - s).abs().powf(two_h));
        // rough 3-sigma band using Var(XY) <= E X^2 E Y^2 + cov^2
        let bound = 3.0
            * ((s.powf(two_h) * t.powf(two_h) + want * want) / n as f64).sqrt();
        assert!((got - want).abs() < bound, "cov {got} want {want}");
    }
}
