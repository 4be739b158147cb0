//! The closed-form layer: derived constants, the variance/correlation
//! structure of the rescaled field, the normal tail, the explicit tail
//! asymptotic and its Brownian reduction, and the exact Brownian laws.
//!
//! Run with: cargo run --release --example closed_forms

use fracqueue::analytics::{
    brownian_inf_ratio, brownian_pickands_window, brownian_qzero_tail, brownian_sup_asympt,
    mills_psi, nu, psi_asymptotic, sigma_z, tail_asymptotic, AsymConstants, StorageParams,
    TailModel,
};
use fracqueue::gaussgen::Hurst;

fn main() -> fracqueue::Result<()> {
    for (hv, c) in [(0.5, 1.0), (0.75, 1.0), (0.9, 2.0)] {
        let h = Hurst::new(hv)?;
        let k = AsymConstants::new(h, c)?;
        println!("H={hv} c={c}:");
        println!(
            "  tau0={:.6} A={:.6} B={:.6} a={:.6} b={:.6}",
            k.tau0, k.a_big, k.b_big, k.a_small, k.b_small
        );
        println!(
            "  nu(tau0)={:.12} (equals A), sigma_Z(tau0)={:.6} (equals 1/A)",
            nu(k.tau0, h, c)?,
            sigma_z(k.tau0, h, c)?
        );
    }

    println!("\nMills-ratio tail and its leading-order expansion:");
    for u in [1.0, 3.0, 10.0] {
        println!(
            "  Psi({u}) = {:.6e}   leading order / exact = {:.6}",
            mills_psi(u),
            psi_asymptotic(u) / mills_psi(u)
        );
    }

    println!("\ntail asymptotic at H=1/2 collapses onto exp(-2cu):");
    for c in [1.0, 2.0] {
        let params = StorageParams::new(Hurst::new(0.5)?, c)?;
        let model = TailModel::new(params, 1.0)?;
        for u in [5.0, 7.0, 10.0] {
            let ratio = tail_asymptotic(u, &model)? / brownian_qzero_tail(u, c);
            println!("  c={c} u={u}: ratio = {ratio:.6}");
        }
    }

    println!("\nexact Brownian infimum ratio R(S) (strictly decreasing):");
    for s in [0.0, 0.01, 0.1, 0.5, 1.0, 2.0] {
        println!("  R({s}) = {:.7}", brownian_inf_ratio(s));
    }

    println!("\nBrownian window constant and the sup asymptotic at c=1, u=1:");
    for s in [0.0, 0.5, 1.0, 2.0] {
        println!(
            "  H_sup([0,{s}]) = {:.5}   p_sup/p_zero -> {:.4}",
            brownian_pickands_window(s),
            brownian_sup_asympt(1.0, s, 1.0) / brownian_qzero_tail(1.0, 1.0)
        );
    }
    Ok(())
}
