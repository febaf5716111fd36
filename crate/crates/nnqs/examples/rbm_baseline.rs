//! tanh-FCN against the complex RBM on H2 and LiH, trained on exact |Ψ|²
//! weights so that sampling noise does not blur the comparison.

use std::path::PathBuf;

use nnqs::ansatz::AnsatzKind;
use nnqs::driver::{run_vmc, HamiltonianSource, RunConfig};
use nnqs::vmc::Estimator;

fn main() -> nnqs::Result<()> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/fcidump");
    for (file, name) in [("h2", "H2"), ("lih", "LiH")] {
        for kind in [AnsatzKind::TanhFcn, AnsatzKind::Rbm] {
            let mut cfg = RunConfig {
                seed: 1,
                ..RunConfig::default()
            };
            cfg.hamiltonian = HamiltonianSource::from_fcidump(dir.join(format!("{file}.fcidump")));
            cfg.hamiltonian.molecule = Some(name.into());
            cfg.ansatz.kind = kind;
            cfg.schedule.estimator = Estimator::Exact;
            cfg.schedule.iterations = 500;
            let s = run_vmc(&cfg, false)?.summary;
            println!(
                "{name:<4} {kind:?}: {:.7} Ha, error vs exact {:.2e}, {} real parameters",
                s.final_energy.unwrap_or(f64::NAN),
                s.error_vs_exact.unwrap_or(f64::NAN),
                s.n_params
            );
        }
    }
    Ok(())
}
