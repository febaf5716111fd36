//! Final LiH energy as the hidden layer grows, with exact |Ψ|² weights.

use std::path::PathBuf;

use nnqs::driver::{run_vmc, HamiltonianSource, RunConfig};
use nnqs::vmc::Estimator;

fn main() -> nnqs::Result<()> {
    for nh in [6, 12, 24, 48] {
        let mut cfg = RunConfig {
            seed: 1,
            ..RunConfig::default()
        };
        cfg.hamiltonian = HamiltonianSource::from_fcidump(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/fcidump/lih.fcidump"));
        cfg.ansatz.n_hidden = Some(nh);
        cfg.schedule.estimator = Estimator::Exact;
        cfg.schedule.iterations = 500;
        let s = run_vmc(&cfg, false)?.summary;
        println!("N_h = {nh:>2}: {:.7} Ha, error {:.2e}", s.final_energy.unwrap_or(f64::NAN), s.error_vs_exact.unwrap_or(f64::NAN));
    }
    Ok(())
}
