//! Trains a tanh-FCN on H2 with Metropolis-Hastings sampling.
//!
//! `cargo run --release --example vmc_h2 [iterations] [seed]`
//!
//! The defaults follow the published settings except for the iteration count.

use std::path::PathBuf;

use nnqs::driver::{run_vmc, HamiltonianSource, RunConfig};

fn main() -> nnqs::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let arg = |i: usize, d: u64| std::env::args().nth(i).and_then(|s| s.parse().ok()).unwrap_or(d);
    let mut cfg = RunConfig {
        seed: arg(2, 1),
        ..RunConfig::default()
    };
    cfg.hamiltonian = HamiltonianSource::from_fcidump(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/fcidump/h2.fcidump"));
    cfg.hamiltonian.molecule = Some("H2".into());
    cfg.schedule.iterations = arg(1, 200) as usize;
    let s = run_vmc(&cfg, false)?.summary;
    println!("final energy {:.7} Ha (chain {:?})", s.final_energy.unwrap_or(f64::NAN), s.final_chain);
    println!("exact        {:.7} Ha", s.exact_energy.unwrap_or(f64::NAN));
    Ok(())
}
