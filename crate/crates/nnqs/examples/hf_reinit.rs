//! Restarting every chain from the Hartree-Fock determinant partway through
//! training, against leaving the chains alone.
//!
//! `cargo run --release --example hf_reinit [iterations] [reinit_at]`
//!
//! Uses H2O with N_h = N_v, λ = 1e-4 and 2·10⁴ samples per chain. A full
//! 1000-iteration comparison takes several minutes per run.

use std::path::PathBuf;

use nnqs::driver::{run_vmc, HamiltonianSource, RunConfig};

fn main() -> nnqs::Result<()> {
    let arg = |i: usize, d: usize| std::env::args().nth(i).and_then(|s| s.parse().ok()).unwrap_or(d);
    let (iterations, k0) = (arg(1, 300), arg(2, 180));
    for reinit in [None, Some(k0)] {
        let mut cfg = RunConfig {
            seed: 1,
            ..RunConfig::default()
        };
        cfg.hamiltonian = HamiltonianSource::from_fcidump(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/fcidump/h2o.fcidump"));
        cfg.hamiltonian.molecule = Some("H2O".into());
        cfg.ansatz.hidden_ratio = 1.0;
        cfg.optimizer.lambda = 1e-4;
        cfg.sampler.n_samples = 20_000;
        cfg.schedule.iterations = iterations;
        cfg.schedule.hf_reinit_at = reinit;
        let out = run_vmc(&cfg, false)?;
        let best = out.trace.best_per_iteration();
        let exact = out.summary.exact_energy.unwrap_or(f64::NAN);
        println!("re-init {reinit:?}: final error {:.2e} Ha", out.summary.error_vs_exact.unwrap_or(f64::NAN));
        for k in (0..best.len()).step_by((iterations / 10).max(1)) {
            println!("  iteration {k:>5}: {:.2e}", best[k] - exact);
        }
    }
    Ok(())
}
