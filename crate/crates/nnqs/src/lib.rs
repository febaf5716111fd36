//! Neural-network quantum states for molecular ground states.
//!
//! The pipeline reads one- and two-electron integrals from an FCIDUMP file,
//! maps the second-quantized Hamiltonian onto qubits with the Jordan-Wigner
//! transformation, and minimizes the variational energy of a neural-network
//! wave function with variational Monte Carlo:
//!
//! * [`hamiltonian`]: FCIDUMP parsing, fermionic terms, Pauli strings
//! * [`ansatz`]: the real tanh-FCN network and the complex RBM baseline
//! * [`sampler`]: particle-conserving Metropolis-Hastings chains
//! * [`vmc`]: local energies, stochastic reconfiguration, Adam, training loop
//! * [`exact`]: exact diagonalization and full-enumeration reference values
//! * [`driver`]: batch runs behind the `nnqs` binary

pub mod ansatz;
pub mod driver;
mod error;
pub mod exact;
pub mod hamiltonian;
pub mod reference;
pub mod sampler;
pub mod sector;
pub mod vmc;

pub use error::{Error, Result};
