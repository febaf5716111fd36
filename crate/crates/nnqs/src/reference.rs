//! Published STO-3G ground-state energies in Hartree, used as comparison targets.
//!
//! None of these are computed here; CCSD in particular is only quoted.

/// 1 kcal/mol in Hartree.
pub const CHEMICAL_PRECISION: f64 = 1.6e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceEnergies {
    pub molecule: &'static str,
    pub n_qubits: usize,
    pub fci: f64,
    pub rbm: Option<f64>,
    pub tanh_fcn: f64,
    pub ccsd: f64,
}

pub const TABLE: [ReferenceEnergies; 10] = [
    ReferenceEnergies { molecule: "H2", n_qubits: 4, fci: -1.1373, rbm: Some(-1.1373), tanh_fcn: -1.1373, ccsd: -1.1373 },
    ReferenceEnergies { molecule: "Be", n_qubits: 10, fci: -14.4036, rbm: None, tanh_fcn: -14.4033, ccsd: -14.4036 },
    ReferenceEnergies { molecule: "C", n_qubits: 10, fci: -37.2187, rbm: None, tanh_fcn: -37.2184, ccsd: -37.1412 },
    ReferenceEnergies { molecule: "Li2", n_qubits: 20, fci: -14.6666, rbm: None, tanh_fcn: -14.6641, ccsd: -14.6665 },
    ReferenceEnergies { molecule: "LiH", n_qubits: 12, fci: -7.8828, rbm: Some(-7.8826), tanh_fcn: -7.8816, ccsd: -7.8828 },
    ReferenceEnergies { molecule: "NH3", n_qubits: 16, fci: -55.5282, rbm: Some(-55.5277), tanh_fcn: -55.5101, ccsd: -55.5279 },
    ReferenceEnergies { molecule: "H2O", n_qubits: 14, fci: -75.0233, rbm: Some(-75.0232), tanh_fcn: -75.0021, ccsd: -75.0231 },
    ReferenceEnergies { molecule: "C2", n_qubits: 20, fci: -74.6908, rbm: Some(-74.6892), tanh_fcn: -74.6134, ccsd: -74.6744 },
    ReferenceEnergies { molecule: "N2", n_qubits: 20, fci: -107.6774, rbm: Some(-107.6767), tanh_fcn: -107.622, ccsd: -107.6716 },
    ReferenceEnergies { molecule: "CO2", n_qubits: 30, fci: -185.2761, rbm: None, tanh_fcn: -185.1247, ccsd: -184.8927 },
];

/// Case-insensitive lookup by molecule name.
pub fn lookup(molecule: &str) -> Option<&'static ReferenceEnergies> {
    TABLE.iter().find(|r| r.molecule.eq_ignore_ascii_case(molecule))
}
