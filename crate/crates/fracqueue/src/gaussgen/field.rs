//! Two-dimensional Gaussian fields with independent coordinate components:
//! eta(t1, t2) = B1(a^{1/2H} t1) + B2(a^{1/2H} t2), so that the variance is
//! a (t1^{2H} + t2^{2H}) and inf/sup functionals factor across axes.

use super::{FbmSampler, Grid, Hurst};
use crate::error::Result;
use crate::rng::RngStream;

/// A realization of the coordinate-sum field on a product grid.
#[derive(Debug, Clone)]
pub struct SampleField {
    pub grid1: Grid,
    pub grid2: Grid,
    pub hurst: Hurst,
    pub a_coef: f64,
    /// Row-major values, index [i1 * (grid2.count+1) + i2].
    pub values: Vec<f64>,
}

impl SampleField {
    pub fn value(&self, i1: usize, i2: usize) -> f64 {
        self.values[i1 * (self.grid2.count + 1) + i2]
    }

    /// Exact variance a (t1^{2H} + t2^{2H}) at a grid node.
    pub fn sigma2(&self, i1: usize, i2: usize) -> f64 {
        let two_h = 2.0 * self.hurst.value();
        self.a_coef * (self.grid1.time(i1).powf(two_h) + self.grid2.time(i2).powf(two_h))
    }
}

/// Sample the field by summing two independent fBm paths on axis grids
/// rescaled by a^{1/2H}; both paths are drawn sequentially from one stream.
pub fn sample_field_sum(
    grid1: Grid,
    grid2: Grid,
    h: Hurst,
    a_coef: f64,
    stream: RngStream,
) -> Result<SampleField> {
    if !a_coef.is_finite() || a_coef <= 0.0 {
        return Err(crate::error::Error::domain(format!(
            "a_coef must be > 0, got {a_coef}"
        )));
    }
    let scale = a_coef.powf(1.0 / (2.0 * h.value()));
    let s1 = FbmSampler::new(grid1.count, h, scale * grid1.step)?;
    let s2 = FbmSampler::new(grid2.count, h, scale * grid2.step)?;
    let mut rng = stream.rng();
    let mut scratch1 = s1.make_scratch();
    let mut scratch2 = s2.make_scratch();

    let mut inc1 = vec![0.0; grid1.count];
    let mut spare1 = vec![0.0; grid1.count];
    let mut inc2 = vec![0.0; grid2.count];
    let mut spare2 = vec![0.0; grid2.count];
    s1.sample_increments_pair(&mut rng, &mut scratch1, &mut inc1, &mut spare1);
    s2.sample_increments_pair(&mut rng, &mut scratch2, &mut inc2, &mut spare2);

    let path = |inc: &[f64]| {
        let mut v = Vec::with_capacity(inc.len() + 1);
        v.push(0.0);
        let mut acc = 0.0;
        for x in inc {
            acc += x;
            v.push(acc);
        }
        v
    };
    let b1 = path(&inc1);
    let b2 = path(&inc2);

    let n2 = grid2.count + 1;
    let mut values = vec![0.0; (grid1.count + 1) * n2];
    for (i1, v1) in b1.iter().enumerate() {
        for (i2, v2) in b2.iter().enumerate() {
            values[i1 * n2 + i2] = v1 + v2;
        }
    }
    Ok(SampleField {
        grid1,
        grid2,
        hurst: h,
        a_coef,
        values,
    })
}
