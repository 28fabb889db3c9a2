//! Contraction of CbPGD and CbGAP towards the projected signal on a random
//! grid codebook, with and without measurement noise.
//!
//! ```text
//! cargo run --release --example contraction
//! ```

use snapcs::bounds::{
    noise_scaling_experiment, run_contraction_experiment, ContractionExperimentSpec, NoiseScalingSpec,
    SolverKind,
};
use snapcs::RngSpec;

fn main() -> snapcs::Result<()> {
    for solver in [SolverKind::Pgd, SolverKind::Gap] {
        for sigma in [0.0, 0.01, 0.1] {
            let mut spec = ContractionExperimentSpec::desk(solver, RngSpec::new(2024, 0));
            spec.noise_sigma = sigma;
            let r = run_contraction_experiment(&spec)?;
            let mean_final: f64 =
                r.error_traces.iter().map(|e| *e.last().unwrap()).sum::<f64>() / r.error_traces.len() as f64;
            println!(
                "{:>3} sigma={:<5} tested={:<5} violation_rate={:.4} cumulative_failures={:.4} mean_final_e={:.4} pass={}",
                solver.name(),
                sigma,
                r.tested_iterations,
                r.violation_rate,
                r.cumulative_failure_rate,
                mean_final,
                r.report.all_pass()
            );
        }
    }

    let scaling = noise_scaling_experiment(&NoiseScalingSpec::desk(RngSpec::new(7, 0)))?;
    println!(
        "noise scaling: clean e={:.3e} excess={:?} ratio={:.2} (linear {:.1}) pass={}",
        scaling.clean_error, scaling.excess_error, scaling.ratio, scaling.linear_ratio, scaling.pass
    );
    Ok(())
}
