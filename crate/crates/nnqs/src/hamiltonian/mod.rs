//! Molecular integrals, second quantization and the qubit Hamiltonian.

mod configuration;
pub mod fcidump;
pub mod fermion;
pub mod pauli;

pub use configuration::{Configuration, MAX_QUBITS};
pub(crate) use configuration::set_bits;
pub use fcidump::{parse_fcidump, IntegralTable};
pub use fermion::{
    build_fermionic_terms, jordan_wigner, molecular_hamiltonian, spin_orbital, FermionTerm,
    LadderOp,
};
pub use pauli::{
    apply_pauli, PauliJson, PauliString, PauliTermJson, QubitHamiltonian, HERMITICITY_TOLERANCE,
    MERGE_TOLERANCE,
};
