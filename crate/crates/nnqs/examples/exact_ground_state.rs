//! Sector ground energies of the bundled molecules next to the tabulated FCI.

use std::path::PathBuf;

use nnqs::driver::{cmd_exact, HamiltonianSource};
use nnqs::reference;

fn main() -> nnqs::Result<()> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/fcidump");
    println!("{:<5} {:>7} {:>8} {:>14} {:>10}", "mol", "qubits", "dim", "E0", "table");
    for (file, name) in [("h2", "H2"), ("lih", "LiH"), ("be", "Be"), ("h2o", "H2O")] {
        let mut src = HamiltonianSource::from_fcidump(dir.join(format!("{file}.fcidump")));
        src.molecule = Some(name.into());
        let s = cmd_exact(&src, false, 1 << 20)?;
        let table = reference::lookup(name).map_or(f64::NAN, |r| r.fci);
        println!("{name:<5} {:>7} {:>8} {:>14.7} {table:>10.4}", s.n_qubits, s.dimension, s.ground_energy_hartree);
    }
    Ok(())
}
