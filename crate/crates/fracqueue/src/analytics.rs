//! Closed-form quantities for the stationary storage process fed by fBm:
//! the derived asymptotic constants, the variance/correlation structure of
//! the rescaled field, the normal tail, the tail asymptotic itself, and the
//! exact Brownian-case laws.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::gaussgen::Hurst;
use crate::special;

/// Model inputs: Hurst parameter and service rate c > 0 (work/time).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StorageParams {
    pub hurst: Hurst,
    pub c: f64,
}

impl StorageParams {
    pub fn new(hurst: Hurst, c: f64) -> Result<Self> {
        if !c.is_finite() || c <= 0.0 {
            return Err(Error::domain(format!("service rate must be > 0, got {c}")));
        }
        Ok(StorageParams { hurst, c })
    }
}

/// The closed-form constants of the tail asymptotic:
/// tau0 = H/(c(1-H)), A = tau0^{-H}/(1-H), B = H tau0^{-H-2},
/// a = tau0^{-2H}/2, b = B/(2A). All strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymConstants {
    pub tau0: f64,
    pub a_big: f64,
    pub b_big: f64,
    pub a_small: f64,
    pub b_small: f64,
}

impl AsymConstants {
    pub fn new(h: Hurst, c: f64) -> Result<Self> {
        if !c.is_finite() || c <= 0.0 {
            return Err(Error::domain(format!("service rate must be > 0, got {c}")));
        }
        let hv = h.value();
        let tau0 = hv / (c * (1.0 - hv));
        let a_big = tau0.powf(-hv) / (1.0 - hv);
        let b_big = hv * tau0.powf(-hv - 2.0);
        let a_small = 0.5 * tau0.powf(-2.0 * hv);
        let b_small = b_big / (2.0 * a_big);
        Ok(AsymConstants {
            tau0,
            a_big,
            b_big,
            a_small,
            b_small,
        })
    }
}

/// Everything needed to evaluate the tail asymptotic: model parameters, the
/// derived constants, and a (dimensionless, positive) Pickands constant.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TailModel {
    pub params: StorageParams,
    pub constants: AsymConstants,
    pub pickands: f64,
}

impl TailModel {
    pub fn new(params: StorageParams, pickands: f64) -> Result<Self> {
        if !pickands.is_finite() || pickands <= 0.0 {
            return Err(Error::domain(format!(
                "Pickands constant must be > 0, got {pickands}"
            )));
        }
        Ok(TailModel {
            params,
            constants: AsymConstants::new(params.hurst, params.c)?,
            pickands,
        })
    }
}

/// nu(tau) = tau^{-H} + c tau^{1-H}; strictly positive on (0, inf) with a
/// unique minimum at tau0.
pub fn nu(tau: f64, h: Hurst, c: f64) -> Result<f64> {
    if !tau.is_finite() || tau <= 0.0 {
        return Err(Error::domain(format!("nu requires tau > 0, got {tau}")));
    }
    let hv = h.value();
    Ok(tau.powf(-hv) + c * tau.powf(1.0 - hv))
}

/// Standard deviation of the rescaled field at lag tau: sigma_Z = 1/nu.
pub fn sigma_z(tau: f64, h: Hurst, c: f64) -> Result<f64> {
    Ok(1.0 / nu(tau, h, c)?)
}

/// Correlation of the rescaled field between (s1, tau1) and (s2, tau2):
/// the exact quotient of 2H-power terms over 2 tau1^H tau2^H.
pub fn r_z(s1: f64, tau1: f64, s2: f64, tau2: f64, h: Hurst) -> Result<f64> {
    if tau1 <= 0.0 || tau2 <= 0.0 {
        return Err(Error::domain("r_z requires tau1, tau2 > 0".to_string()));
    }
    let two_h = 2.0 * h.value();
    let d = s1 - s2;
    let num = (d + tau1).abs().powf(two_h) + (d - tau2).abs().powf(two_h)
        - (d + tau1 - tau2).abs().powf(two_h)
        - d.abs().powf(two_h);
    Ok(num / (2.0 * tau1.powf(h.value()) * tau2.powf(h.value())))
}

/// Standard normal upper tail (Mills-ratio tail), accurate to ~1e-15 relative.
pub fn mills_psi(u: f64) -> f64 {
    special::norm_sf(u)
}

/// Leading-order tail expansion Psi(u) ~ exp(-u^2/2) / (u sqrt(2 pi)),
/// exposed for validation of the asymptotic form only.
pub fn psi_asymptotic(u: f64) -> f64 {
    (-0.5 * u * u).exp() / (u * (2.0 * PI).sqrt())
}

/// The explicit tail asymptotic for P(Q(0) > u):
/// sqrt(pi) a^{1/2H} b^{-1/2} H_sup (A u^{1-H})^{(1-H)/H} Psi(A u^{1-H}).
pub fn tail_asymptotic(u: f64, model: &TailModel) -> Result<f64> {
    if !u.is_finite() || u <= 0.0 {
        return Err(Error::domain(format!("tail_asymptotic requires u > 0, got {u}")));
    }
    let h = model.params.hurst.value();
    let k = &model.constants;
    let arg = k.a_big * u.powf(1.0 - h);
    let prefactor = PI.sqrt() * k.a_small.powf(1.0 / (2.0 * h)) / k.b_small.sqrt();
    Ok(prefactor * model.pickands * arg.powf((1.0 - h) / h) * mills_psi(arg))
}

/// Stationary law of the Brownian storage process: P(Q(0) > u) = exp(-2cu).
pub fn brownian_qzero_tail(u: f64, c: f64) -> f64 {
    (-2.0 * c * u).exp()
}

/// Exact ratio P(inf_{[0,S]} Q > u) / P(Q(0) > u) for the Brownian storage
/// process at unit service rate:
/// R(S) = 2(1+S) Psi(sqrt S) - sqrt(2S/pi) exp(-S/2).
pub fn brownian_inf_ratio(s: f64) -> f64 {
    if s == 0.0 {
        return 1.0;
    }
    2.0 * (1.0 + s) * mills_psi(s.sqrt()) - (2.0 * s / PI).sqrt() * (-0.5 * s).exp()
}

/// Exact P(inf_{[0,S]} Q > u) for service rate c, via the Brownian scaling
/// reduction P(inf_{[0,S]} Q_c > u) = P(inf_{[0,c^2 S]} Q_1 > cu).
pub fn brownian_inf_exact(u: f64, s: f64, c: f64) -> f64 {
    brownian_qzero_tail(u, c) * brownian_inf_ratio(c * c * s)
}

/// Window constant of the Brownian sup functional:
/// H_sup_{B_1/2}([0,S]) = E exp(sup_{[0,S]}(sqrt2 W(t) - t))
///                      = (S+2) Phi(sqrt(S/2)) + sqrt(S/pi) exp(-S/4).
pub fn brownian_pickands_window(s: f64) -> f64 {
    if s == 0.0 {
        return 1.0;
    }
    (s + 2.0) * special::norm_cdf((0.5 * s).sqrt()) + (s / PI).sqrt() * (-0.25 * s).exp()
}

/// Asymptotic P(sup_{[0,S]} Q > u) ~ P(Q(0)>u) 2 sqrt(pi) H_sup([0, 2 c^2 S])
/// for the Brownian storage process, with c handled by Brownian scaling.
pub fn brownian_sup_asympt(u: f64, s: f64, c: f64) -> f64 {
    brownian_qzero_tail(u, c) * 2.0 * PI.sqrt() * brownian_pickands_window(2.0 * c * c * s)
}
