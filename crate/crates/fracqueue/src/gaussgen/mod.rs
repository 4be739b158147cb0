//! Exact sampling of fractional Gaussian noise / fractional Brownian motion
//! and the auxiliary Gaussian processes used by the estimation modules.
//!
//! The workhorse is circulant embedding of the fGn covariance: the embedding
//! of stationary increments of fBm is nonnegative definite, so the FFT
//! synthesis is exact in distribution up to round-off clipping. A Cholesky
//! sampler serves as the O(n^2)-memory oracle for cross-validation.

mod cholesky;
pub mod circulant;
mod field;
mod markov;

pub use cholesky::{sample_fbm_cholesky, CholeskySampler, CHOLESKY_MAX_COUNT};
pub use circulant::{sample_fbm, FbmSampler, FbmScratch};
pub use field::{sample_field_sum, SampleField};
pub use markov::{sample_ou, OrnsteinUhlenbeck};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hurst parameter, constrained to (0,1). H = 1/2 is the Brownian special
/// case (independent increments) and unlocks the direct sampler.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Hurst(f64);

impl Hurst {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value > 0.0 && value < 1.0 {
            Ok(Hurst(value))
        } else {
            Err(Error::domain(format!(
                "Hurst parameter must lie in (0,1), got {value}"
            )))
        }
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.0
    }

    #[inline]
    pub fn is_brownian(&self) -> bool {
        self.0 == 0.5
    }
}

/// Uniform time grid starting at the origin: points k*step, k = 0..=count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub step: f64,
    pub count: usize,
}

impl Grid {
    pub fn new(step: f64, count: usize) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::domain(format!("grid step must be > 0, got {step}")));
        }
        if count == 0 {
            return Err(Error::domain("grid count must be >= 1"));
        }
        Ok(Grid { step, count })
    }

    pub fn span(&self) -> f64 {
        self.step * self.count as f64
    }

    pub fn time(&self, k: usize) -> f64 {
        self.step * k as f64
    }
}

/// A discretized realization of a process on a uniform grid; `values[0]`
/// corresponds to t = 0 and is pinned to 0 for fBm paths.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePath {
    pub grid: Grid,
    pub values: Vec<f64>,
}

impl SamplePath {
    pub fn new(grid: Grid, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), grid.count + 1, "values must cover count+1 grid points");
        SamplePath { grid, values }
    }

    /// Dump as CSV with header `t,value` at 17 significant digits.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t,value")?;
        for (k, v) in self.values.iter().enumerate() {
            writeln!(w, "{:.16e},{:.16e}", self.grid.time(k), v)?;
        }
        Ok(())
    }
}

/// Lag-k autocovariance of unit-step fractional Gaussian noise,
/// gamma(k) = (|k+1|^{2H} - 2|k|^{2H} + |k-1|^{2H}) / 2.
pub fn fgn_autocov(k: u64, h: Hurst) -> f64 {
    let two_h = 2.0 * h.value();
    if k == 0 {
        return 1.0;
    }
    let k = k as f64;
    0.5 * ((k + 1.0).powf(two_h) - 2.0 * k.powf(two_h) + (k - 1.0).powf(two_h))
}

/// Eigenvalues of the circulant embedding of the fGn covariance at a given
/// step, scaled by step^{2H} via self-similarity.
#[derive(Debug, Clone)]
pub struct FgnSpectrum {
    /// Embedding circulant size (power of two, >= 2*count).
    pub order: usize,
    /// Nonnegative eigenvalues after clipping, including the step^{2H} scale.
    pub eigenvalues: Vec<f64>,
    pub hurst: Hurst,
    pub step: f64,
    /// Total magnitude of negative eigenvalues clipped to zero (round-off).
    pub clip_magnitude: f64,
}

/// Relative tolerance for eigenvalue clipping: the fGn embedding is provably
/// nonnegative definite, so anything below -tol signals a real failure.
pub const EIGENVALUE_CLIP_RTOL: f64 = 1e-10;

/// Build the circulant embedding spectrum for `count` fGn increments.
///
/// The embedding row is (c_0, ..., c_m, c_{m-1}, ..., c_1) with m = order/2
/// and c_j = step^{2H} * gamma(j); eigenvalues are its DFT.
pub fn build_embedding(count: usize, h: Hurst, step: f64) -> Result<FgnSpectrum> {
    if count == 0 {
        return Err(Error::domain("count must be >= 1"));
    }
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::domain(format!("step must be > 0, got {step}")));
    }
    let order = (2 * count).next_power_of_two();
    let m = order / 2;
    let scale = step.powf(2.0 * h.value());

    let mut row: Vec<rustfft::num_complex::Complex<f64>> = Vec::with_capacity(order);
    for j in 0..=m {
        row.push((scale * fgn_autocov(j as u64, h)).into());
    }
    for j in (1..m).rev() {
        let v = row[j];
        row.push(v);
    }
    debug_assert_eq!(row.len(), order);

    let mut planner = rustfft::FftPlanner::new();
    let fft = planner.plan_fft_forward(order);
    fft.process(&mut row);

    let max_eig = row.iter().map(|c| c.re).fold(f64::MIN, f64::max);
    let tol = EIGENVALUE_CLIP_RTOL * max_eig;
    let mut clip = 0.0;
    let mut eigenvalues = Vec::with_capacity(order);
    for c in &row {
        let lam = c.re;
        if lam < -tol {
            return Err(Error::EmbeddingFailure {
                min_eigenvalue: lam,
                tolerance: tol,
            });
        }
        if lam < 0.0 {
            clip += -lam;
            eigenvalues.push(0.0);
        } else {
            eigenvalues.push(lam);
        }
    }

    Ok(FgnSpectrum {
        order,
        eigenvalues,
        hurst: h,
        step,
        clip_magnitude: clip,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn autocov_trivial_and_derived_values() {
        let h34 = Hurst::new(0.75).unwrap();
        assert_eq!(fgn_autocov(0, h34), 1.0);
        // Brownian increments are independent
        let h12 = Hurst::new(0.5).unwrap();
        for k in 1..6 {
            assert!(fgn_autocov(k, h12).abs() < 1e-15);
        }
        // hand evaluations, frozen from a 40-digit computation
        assert!((fgn_autocov(1, h34) - 0.4142135623730950488).abs() < 1e-15);
        assert!((fgn_autocov(2, h34) - 0.2696490866071258427).abs() < 1e-15);
        let h06 = Hurst::new(0.6).unwrap();
        assert!((fgn_autocov(1, h06) - 0.14869835499703497144).abs() < 1e-15);
        let h09 = Hurst::new(0.9).unwrap();
        assert!((fgn_autocov(5, h09) - 0.52226281198763053591).abs() < 1e-15);
    }

    #[test]
    fn autocov_positive_and_decaying_for_persistent_h() {
        let h = Hurst::new(0.75).unwrap();
        let mut prev = fgn_autocov(1, h);
        assert!(prev > 0.0);
        for k in 2..50 {
            let g = fgn_autocov(k, h);
            assert!(g > 0.0 && g < prev, "gamma not positive-decreasing at {k}");
            prev = g;
        }
        // asymptotic slope: gamma(k) ~ H(2H-1) k^{2H-2}
        let k = 1000u64;
        let expect = 0.75 * 0.5 * (k as f64).powf(-0.5);
        assert!((fgn_autocov(k, h) / expect - 1.0).abs() < 1e-3);
    }

    #[test]
    fn embedding_count_one_brownian_is_flat() {
        let spec = build_embedding(1, Hurst::new(0.5).unwrap(), 1.0).unwrap();
        assert_eq!(spec.order, 2);
        for &l in &spec.eigenvalues {
            assert!((l - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn embedding_nonnegative_for_typical_h() {
        for h in [0.55, 0.6, 0.75, 0.9, 0.3] {
            let spec = build_embedding(1024, Hurst::new(h).unwrap(), 1.0).unwrap();
            assert_eq!(spec.order, 2048);
            let min = spec.eigenvalues.iter().cloned().fold(f64::MAX, f64::min);
            assert!(min >= 0.0, "negative eigenvalue at H={h}");
        }
    }

    #[test]
    fn embedding_scales_by_step_power() {
        let h = Hurst::new(0.9).unwrap();
        let unit = build_embedding(8, h, 1.0).unwrap();
        let half = build_embedding(8, h, 0.5).unwrap();
        let scale = 0.5f64.powf(1.8);
        for (a, b) in unit.eigenvalues.iter().zip(&half.eigenvalues) {
            assert!((b - scale * a).abs() < 1e-12 * a.abs().max(1.0));
        }
    }

    #[test]
    fn hurst_rejects_out_of_range() {
        assert!(Hurst::new(0.0).is_err());
        assert!(Hurst::new(1.0).is_err());
        assert!(Hurst::new(f64::NAN).is_err());
        assert!(Hurst::new(0.5).unwrap().is_brownian());
        assert!(!Hurst::new(0.75).unwrap().is_brownian());
    }

    #[test]
    fn grid_validation() {
        assert!(Grid::new(0.0, 10).is_err());
        assert!(Grid::new(0.1, 0).is_err());
        let g = Grid::new(0.25, 8).unwrap();
        assert_eq!(g.span(), 2.0);
    }
}
