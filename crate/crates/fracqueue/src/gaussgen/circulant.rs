//! FFT synthesis of fractional Gaussian noise from the circulant embedding.
//!
//! One complex FFT of the randomized spectrum yields two independent fGn
//! sequences (real and imaginary parts), which batch estimators consume in
//! pairs. The Brownian case bypasses the FFT: increments are independent.

use std::sync::Arc;

use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex;
use rustfft::Fft;

use super::{build_embedding, FgnSpectrum, Grid, Hurst, SamplePath};
use crate::error::Result;
use crate::rng::{fill_standard_normal, next_standard_normal, RngStream};

/// Reusable sampler for fBm paths on a fixed uniform grid.
pub struct FbmSampler {
    count: usize,
    step: f64,
    hurst: Hurst,
    kind: Kind,
}

enum Kind {
    /// H = 1/2: increments are iid N(0, step).
    Brownian { sd: f64 },
    Circulant {
        spec: FgnSpectrum,
        sqrt_eigs: Vec<f64>,
        fft: Arc<dyn Fft<f64>>,
    },
}

/// Per-worker scratch buffers; allocate once per block of replicates.
pub struct FbmScratch {
    buf: Vec<Complex<f64>>,
    fft_scratch: Vec<Complex<f64>>,
}

impl FbmSampler {
    pub fn new(count: usize, h: Hurst, step: f64) -> Result<Self> {
        if h.is_brownian() {
            return Ok(FbmSampler {
                count,
                step,
                hurst: h,
                kind: Kind::Brownian { sd: step.sqrt() },
            });
        }
        let spec = build_embedding(count, h, step)?;
        Self::from_spectrum(spec, count)
    }

    /// Build a sampler from an existing spectrum; `count` increments are
    /// extracted per path and must fit inside the embedding.
    pub fn from_spectrum(spec: FgnSpectrum, count: usize) -> Result<Self> {
        if 2 * count > spec.order {
            return Err(crate::error::Error::domain(format!(
                "spectrum of order {} cannot produce {count} increments",
                spec.order
            )));
        }
        let mut planner = rustfft::FftPlanner::new();
        let fft = planner.plan_fft_forward(spec.order);
        let sqrt_eigs = spec.eigenvalues.iter().map(|l| l.sqrt()).collect();
        Ok(FbmSampler {
            count,
            step: spec.step,
            hurst: spec.hurst,
            kind: Kind::Circulant { spec, sqrt_eigs, fft },
        })
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn hurst(&self) -> Hurst {
        self.hurst
    }

    pub fn spectrum(&self) -> Option<&FgnSpectrum> {
        match &self.kind {
            Kind::Circulant { spec, .. } => Some(spec),
            Kind::Brownian { .. } => None,
        }
    }

    pub fn make_scratch(&self) -> FbmScratch {
        match &self.kind {
            Kind::Brownian { .. } => FbmScratch {
                buf: Vec::new(),
                fft_scratch: Vec::new(),
            },
            Kind::Circulant { spec, fft, .. } => FbmScratch {
                buf: vec![Complex::default(); spec.order],
                fft_scratch: vec![Complex::default(); fft.get_inplace_scratch_len()],
            },
        }
    }

    /// Draw two independent fGn increment sequences from one stream.
    ///
    /// Draw order is fixed (interleaved re/im per frequency), so output is a
    /// pure function of the stream position.
    pub fn sample_increments_pair(
        &self,
        rng: &mut ChaCha8Rng,
        scratch: &mut FbmScratch,
        out_a: &mut [f64],
        out_b: &mut [f64],
    ) {
        assert!(out_a.len() == self.count && out_b.len() == self.count);
        match &self.kind {
            Kind::Brownian { sd } => {
                fill_standard_normal(rng, out_a);
                fill_standard_normal(rng, out_b);
                for v in out_a.iter_mut() {
                    *v *= sd;
                }
                for v in out_b.iter_mut() {
                    *v *= sd;
                }
            }
            Kind::Circulant { spec, sqrt_eigs, fft } => {
                let m = spec.order;
                let inv_sqrt_m = 1.0 / (m as f64).sqrt();
                for (slot, &se) in scratch.buf.iter_mut().zip(sqrt_eigs.iter()).take(m) {
                    let re = next_standard_normal(rng);
                    let im = next_standard_normal(rng);
                    *slot = Complex::new(re * se, im * se);
                }
                fft.process_with_scratch(&mut scratch.buf, &mut scratch.fft_scratch);
                for (k, c) in scratch.buf[..self.count].iter().enumerate() {
                    out_a[k] = c.re * inv_sqrt_m;
                    out_b[k] = c.im * inv_sqrt_m;
                }
            }
        }
    }

    /// One fBm path with B(0) = 0, consuming a full pair draw.
    pub fn sample_path(&self, stream: RngStream) -> SamplePath {
        let mut rng = stream.rng();
        let mut scratch = self.make_scratch();
        let mut a = vec![0.0; self.count];
        let mut b = vec![0.0; self.count];
        self.sample_increments_pair(&mut rng, &mut scratch, &mut a, &mut b);
        let mut values = Vec::with_capacity(self.count + 1);
        values.push(0.0);
        let mut acc = 0.0;
        for inc in &a {
            acc += inc;
            values.push(acc);
        }
        SamplePath::new(Grid { step: self.step, count: self.count }, values)
    }
}

/// Sample one fBm path from a prebuilt spectrum (exact in distribution up to
/// eigenvalue clipping).
pub fn sample_fbm(spec: &FgnSpectrum, stream: RngStream) -> SamplePath {
    let count = spec.order / 2;
    let sampler = FbmSampler::from_spectrum(spec.clone(), count)
        .expect("spectrum always fits its own half-order");
    sampler.sample_path(stream)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussgen::fgn_autocov;

    fn empirical_cov(xs: &[f64], ys: &[f64]) -> f64 {
        let n = xs.len() as f64;
        xs.iter().zip(ys).map(|(a, b)| a * b).sum::<f64>() / n
    }

    #[test]
    fn pair_members_are_independent_and_correct() {
        let h = Hurst::new(0.75).unwrap();
        let sampler = FbmSampler::new(16, h, 1.0).unwrap();
        let mut scratch = sampler.make_scratch();
        let n = 40_000usize;
        let mut a0 = Vec::with_capacity(n);
        let mut b0 = Vec::with_capacity(n);
        let mut a0a1 = Vec::with_capacity(n);
        let mut rng = RngStream::new(11, 0).rng();
        let mut a = vec![0.0; 16];
        let mut b = vec![0.0; 16];
        for _ in 0..n {
            sampler.sample_increments_pair(&mut rng, &mut scratch, &mut a, &mut b);
            a0.push(a[0]);
            b0.push(b[0]);
            a0a1.push(a[0] * a[1]);
        }
        // cross-covariance between the two paths of a pair vanishes
        let cross = empirical_cov(&a0, &b0);
        assert!(cross.abs() < 3.0 / (n as f64).sqrt() * 1.1, "cross {cross}");
        // lag-1 autocovariance matches gamma(1)
        let lag1 = a0a1.iter().sum::<f64>() / n as f64;
        let want = fgn_autocov(1, h);
        assert!((lag1 - want).abs() < 4.0 / (n as f64).sqrt(), "lag1 {lag1} want {want}");
    }

    #[test]
    fn brownian_lag1_increment_correlation_vanishes() {
        let h = Hurst::new(0.5).unwrap();
        let sampler = FbmSampler::new(8, h, 0.5).unwrap();
        let mut scratch = sampler.make_scratch();
        let mut rng = RngStream::new(3, 0).rng();
        let n = 50_000usize;
        let mut sum01 = 0.0;
        let mut var0 = 0.0;
        let mut a = vec![0.0; 8];
        let mut b = vec![0.0; 8];
        for _ in 0..n {
            sampler.sample_increments_pair(&mut rng, &mut scratch, &mut a, &mut b);
            sum01 += a[0] * a[1];
            var0 += a[0] * a[0];
        }
        let corr = sum01 / var0;
        assert!(corr.abs() < 3.0 / (n as f64).sqrt() / 0.5_f64, "corr {corr}");
        // increment variance = step^{2H} = 0.5
        let v = var0 / n as f64;
        assert!((v - 0.5).abs() < 3.0 * 0.5 * (2.0 / n as f64).sqrt(), "var {v}");
    }

    #[test]
    fn path_starts_at_zero_and_is_reproducible() {
        let h = Hurst::new(0.6).unwrap();
        let sampler = FbmSampler::new(32, h, 0.25).unwrap();
        let p1 = sampler.sample_path(RngStream::new(77, 5));
        let p2 = sampler.sample_path(RngStream::new(77, 5));
        assert_eq!(p1.values[0], 0.0);
        assert_eq!(p1.values.len(), 33);
        assert_eq!(p1, p2);
        let p3 = sampler.sample_path(RngStream::new(77, 6));
        assert_ne!(p1, p3);
    }

    #[test]
    fn fbm_variance_scales_with_time() {
        // Var B(t) = t^{2H} over the grid, statistically at 3 sigma
        let h = Hurst::new(0.75).unwrap();
        let count = 16;
        let sampler = FbmSampler::new(count, h, 0.25).unwrap();
        let n = 30_000usize;
        let mut sums = vec![0.0; count + 1];
        for i in 0..n {
            let p = sampler.sample_path(RngStream::new(123, i as u64));
            for (k, v) in p.values.iter().enumerate() {
                sums[k] += v * v;
            }
        }
        for k in [4usize, 8, 16] {
            let t = 0.25 * k as f64;
            let want = t.powf(1.5);
            let got = sums[k] / n as f64;
            let se = want * (2.0 / n as f64).sqrt();
            assert!((got - want).abs() < 3.5 * se, "Var B({t}): got {got}, want {want}");
        }
    }
}
