//! Second-quantized molecular Hamiltonian and its Jordan-Wigner encoding.

use std::fmt;

use num_complex::Complex64;

use super::fcidump::IntegralTable;
use super::pauli::{PauliString, QubitHamiltonian};
use crate::error::{Error, Result};

/// A creation (`dagger`) or annihilation operator on one spin-orbital.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LadderOp {
    pub index: usize,
    pub dagger: bool,
}

impl LadderOp {
    pub fn create(index: usize) -> Self {
        Self { index, dagger: true }
    }

    pub fn annihilate(index: usize) -> Self {
        Self {
            index,
            dagger: false,
        }
    }
}

/// `coefficient · op[0] op[1] …` (leftmost operator applied last).
#[derive(Debug, Clone, PartialEq)]
pub struct FermionTerm {
    pub ops: Vec<LadderOp>,
    pub coefficient: f64,
}

impl FermionTerm {
    pub fn new(ops: Vec<LadderOp>, coefficient: f64) -> Self {
        Self { ops, coefficient }
    }
}

impl fmt::Display for FermionTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:+.10}", self.coefficient)?;
        for op in &self.ops {
            write!(f, " a{}{}", if op.dagger { "†" } else { "" }, op.index)?;
        }
        Ok(())
    }
}

/// Spin-orbital index of spatial orbital `p` with spin `sigma` (0 = α, 1 = β).
///
/// Orbitals are interleaved: α₀ β₀ α₁ β₁ …
#[inline]
pub fn spin_orbital(p: usize, sigma: usize) -> usize {
    2 * p + sigma
}

/// Expands the integrals into spin-orbital ladder-operator terms.
///
/// `H = E_core + Σ h_pq a†_pσ a_qσ + ½ Σ (ps|qr) a†_pσ a†_qτ a_rτ a_sσ`,
/// which is the physicist-notation `g^{pq}_{rs} = (ps|qr)` two-body sum.
pub fn build_fermionic_terms(table: &IntegralTable) -> Vec<FermionTerm> {
    let n = table.n_orbitals;
    let mut terms = vec![FermionTerm::new(Vec::new(), table.e_core)];

    for p in 0..n {
        for q in 0..n {
            let h = table.h(p, q);
            if h == 0.0 {
                continue;
            }
            for sigma in 0..2 {
                terms.push(FermionTerm::new(
                    vec![
                        LadderOp::create(spin_orbital(p, sigma)),
                        LadderOp::annihilate(spin_orbital(q, sigma)),
                    ],
                    h,
                ));
            }
        }
    }

    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                for s in 0..n {
                    let g = table.g(p, s, q, r);
                    if g == 0.0 {
                        continue;
                    }
                    for sigma in 0..2 {
                        for tau in 0..2 {
                            let (i, j) = (spin_orbital(p, sigma), spin_orbital(q, tau));
                            let (k, l) = (spin_orbital(r, tau), spin_orbital(s, sigma));
                            if i == j || k == l {
                                continue;
                            }
                            terms.push(FermionTerm::new(
                                vec![
                                    LadderOp::create(i),
                                    LadderOp::create(j),
                                    LadderOp::annihilate(k),
                                    LadderOp::annihilate(l),
                                ],
                                0.5 * g,
                            ));
                        }
                    }
                }
            }
        }
    }
    terms
}

/// Pauli expansion of a single ladder operator:
/// `a_p = ½ Z_{<p}(X_p + iY_p)`, `a†_p = ½ Z_{<p}(X_p − iY_p)`.
fn ladder_paulis(op: LadderOp) -> [PauliString; 2] {
    let bit = 1u64 << op.index;
    let tail = bit - 1;
    let y_sign = if op.dagger { -1.0 } else { 1.0 };
    [
        PauliString::new(bit, tail, Complex64::new(0.5, 0.0)),
        PauliString::new(bit, tail | bit, Complex64::new(0.0, 0.5 * y_sign)),
    ]
}

/// Jordan-Wigner maps fermionic terms onto a real qubit Hamiltonian.
pub fn jordan_wigner(terms: &[FermionTerm], n_qubits: usize) -> Result<QubitHamiltonian> {
    let mut paulis: Vec<PauliString> = Vec::new();
    let mut scratch: Vec<PauliString> = Vec::new();
    for term in terms {
        if let Some(op) = term.ops.iter().find(|op| op.index >= n_qubits) {
            return Err(Error::Encoding(format!(
                "operator index {} outside {n_qubits} qubits",
                op.index
            )));
        }
        let mut current = vec![PauliString::identity(term.coefficient)];
        for &op in &term.ops {
            scratch.clear();
            for p in &current {
                for q in ladder_paulis(op) {
                    scratch.push(p.mul(&q));
                }
            }
            std::mem::swap(&mut current, &mut scratch);
        }
        paulis.extend(current);
    }
    QubitHamiltonian::new(n_qubits, paulis)?.into_real()
}

/// FCIDUMP integrals → qubit Hamiltonian on `2·n_orbitals` qubits.
pub fn molecular_hamiltonian(table: &IntegralTable) -> Result<QubitHamiltonian> {
    jordan_wigner(&build_fermionic_terms(table), table.n_qubits())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::fcidump::parse_fcidump;

    fn term_set(h: &QubitHamiltonian) -> Vec<(String, f64)> {
        h.terms()
            .iter()
            .map(|t| (t.label(h.n_qubits()), t.coefficient.re))
            .collect()
    }

    #[test]
    fn one_orbital_diagonal_expansion() {
        let mut t = IntegralTable::new(1, 1, 1, 0.25).unwrap();
        t.set_h(0, 0, -0.5);
        let terms = build_fermionic_terms(&t);
        assert_eq!(
            terms,
            vec![
                FermionTerm::new(vec![], 0.25),
                FermionTerm::new(vec![LadderOp::create(0), LadderOp::annihilate(0)], -0.5),
                FermionTerm::new(vec![LadderOp::create(1), LadderOp::annihilate(1)], -0.5),
            ]
        );
    }

    #[test]
    fn empty_table_is_a_constant() {
        let t = IntegralTable::new(3, 2, 0, 1.25).unwrap();
        assert_eq!(build_fermionic_terms(&t), vec![FermionTerm::new(vec![], 1.25)]);
        let h = molecular_hamiltonian(&t).unwrap();
        assert_eq!(term_set(&h), vec![("IIIIII".into(), 1.25)]);
    }

    #[test]
    fn number_operator() {
        let h = jordan_wigner(
            &[FermionTerm::new(vec![LadderOp::create(0), LadderOp::annihilate(0)], 1.0)],
            1,
        )
        .unwrap();
        assert_eq!(term_set(&h), vec![("I".into(), 0.5), ("Z".into(), -0.5)]);
    }

    #[test]
    fn hopping_term() {
        let h = jordan_wigner(
            &[
                FermionTerm::new(vec![LadderOp::create(0), LadderOp::annihilate(1)], 1.0),
                FermionTerm::new(vec![LadderOp::create(1), LadderOp::annihilate(0)], 1.0),
            ],
            2,
        )
        .unwrap();
        assert_eq!(term_set(&h), vec![("XX".into(), 0.5), ("YY".into(), 0.5)]);
    }

    #[test]
    fn non_hermitian_input_is_an_encoding_error() {
        let err = jordan_wigner(
            &[FermionTerm::new(vec![LadderOp::create(0), LadderOp::annihilate(1)], 1.0)],
            2,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Encoding(_)));
    }

    #[test]
    fn index_out_of_range() {
        let err = jordan_wigner(&[FermionTerm::new(vec![LadderOp::create(3)], 1.0)], 2);
        assert!(matches!(err, Err(Error::Encoding(_))));
    }

    #[test]
    fn h2_has_fifteen_terms() {
        let t = parse_fcidump(include_str!("../../data/fcidump/h2.fcidump")).unwrap();
        let h = molecular_hamiltonian(&t).unwrap();
        assert_eq!(h.n_qubits(), 4);
        assert_eq!(h.len(), 15);
        assert!(h.terms().iter().all(|t| t.coefficient.im == 0.0));
    }
}
