//! Maps the H2 integrals to Pauli strings and prints them.
//!
//! `cargo run --example jordan_wigner [path/to/file.fcidump]`

use std::path::PathBuf;

use nnqs::hamiltonian::{molecular_hamiltonian, IntegralTable};

fn main() -> nnqs::Result<()> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/fcidump/h2.fcidump"));
    let table = IntegralTable::read(&path)?;
    let h = molecular_hamiltonian(&table)?;
    println!("{} qubits, {} terms, {} flip groups", h.n_qubits(), h.len(), h.n_flip_groups());
    for term in h.terms() {
        println!("{:>+14.10}  {}", term.coefficient.re, term.label(h.n_qubits()));
    }
    Ok(())
}
