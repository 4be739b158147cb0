//! Pickands-type constants: E exp(Phi(sqrt2 eta - sigma^2_eta)) for the
//! functional registry, checked against the exact Brownian window formula,
//! plus the classical-constant slope extrapolation.
//!
//! Run with: cargo run --release --example pickands_constants

use fracqueue::analytics::brownian_pickands_window;
use fracqueue::gaussgen::Hurst;
use fracqueue::pickands::{
    estimate_constant, estimate_pickands_limit, validate_functional, EstimateConfig, EtaSpec,
    Functional,
};

fn main() -> fracqueue::Result<()> {
    // functional registry contracts
    for phi in [Functional::Sup, Functional::Inf, Functional::InfSup, Functional::Integral] {
        let rep = validate_functional(phi, 3);
        println!(
            "{phi:?}: F2 max rel err {:.2e}, sup-bound excess {:.2e}, literal-F1 violations {}/{}",
            rep.f2_max_rel_err, rep.upper_bound_max_excess, rep.literal_f1_violations, rep.cases
        );
    }

    // Brownian sup constants vs the exact closed form
    let h = Hurst::new(0.5)?;
    println!("\nH_sup_B1/2([0,S]): Monte Carlo (refined) vs exact:");
    for s in [0.5, 1.0, 2.0] {
        let est = estimate_constant(
            &EtaSpec::Fbm { hurst: h, span: s },
            Functional::Sup,
            EstimateConfig { step: 0.005, n_reps: 200_000, seed: 21 },
        )?;
        println!(
            "  S={s}: grid {:.4} refined {:.4} +- {:.4}   exact {:.4}",
            est.value,
            est.refined_value,
            est.refined_stderr,
            brownian_pickands_window(s)
        );
    }

    // inf constants sit at or below one and shrink with the window
    let h75 = Hurst::new(0.75)?;
    println!("\nH_inf_B0.75([0,S]):");
    for s in [0.25, 1.0, 2.0] {
        let est = estimate_constant(
            &EtaSpec::Fbm { hurst: h75, span: s },
            Functional::Inf,
            EstimateConfig { step: 0.01, n_reps: 100_000, seed: 22 },
        )?;
        println!("  S={s}: refined {:.4} +- {:.4}", est.refined_value, est.refined_stderr);
    }

    // classical constant: slope of H_sup([0,S]) in S; exactly 1 at H=1/2
    let lim = estimate_pickands_limit(
        h,
        &[1.0, 2.0, 3.0],
        EstimateConfig { step: 0.01, n_reps: 300_000, seed: 23 },
    )?;
    println!(
        "\nclassical constant at H=1/2: slope {:.4} +- {:.4} (small windows bias it upward)",
        lim.slope, lim.slope_stderr
    );

    // the artifact's own estimate for H=0.75, used by the tail asymptotic
    let lim = estimate_pickands_limit(
        h75,
        &[2.0, 4.0, 6.0],
        EstimateConfig { step: 0.02, n_reps: 300_000, seed: 24 },
    )?;
    println!(
        "classical constant at H=0.75: slope {:.4} +- {:.4}",
        lim.slope, lim.slope_stderr
    );
    Ok(())
}
