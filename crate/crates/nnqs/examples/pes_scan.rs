//! Dissociation curve of H2 from the bundled scan manifest.

use std::path::PathBuf;

use nnqs::driver::{cmd_pes, pes_csv, read_manifest, RunConfig};

fn main() -> nnqs::Result<()> {
    let manifest = read_manifest(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/fcidump/h2_scan.json"))?;
    let mut cfg = RunConfig {
        seed: 3,
        ..RunConfig::default()
    };
    cfg.schedule.iterations = 1000;
    cfg.sampler.n_samples = 2_000;
    print!("{}", pes_csv(&cmd_pes(&manifest, &cfg, false)));
    Ok(())
}
