//! Bit-mask Pauli strings and qubit Hamiltonians.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::configuration::Configuration;
use crate::error::{Error, Result};

/// Terms whose merged coefficient magnitude falls below this are dropped.
pub const MERGE_TOLERANCE: f64 = 1e-12;
/// Largest imaginary residue tolerated on a Hermitian term.
pub const HERMITICITY_TOLERANCE: f64 = 1e-10;

const I_POWERS: [Complex64; 4] = [
    Complex64::new(1.0, 0.0),
    Complex64::new(0.0, 1.0),
    Complex64::new(-1.0, 0.0),
    Complex64::new(0.0, -1.0),
];

#[inline]
pub(crate) fn i_pow(k: u32) -> Complex64 {
    I_POWERS[(k & 3) as usize]
}

/// A weighted tensor product of single-qubit Paulis.
///
/// Qubit `j` carries `I` if neither mask has bit `j`, `X` if only `x_mask`,
/// `Z` if only `z_mask` and `Y` if both. The operator is
/// `coefficient · i^{|x∧z|} X^x Z^z`, so every `Y` is literally `iXZ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliString {
    pub x_mask: u64,
    pub z_mask: u64,
    pub coefficient: Complex64,
}

impl PauliString {
    pub fn new(x_mask: u64, z_mask: u64, coefficient: Complex64) -> Self {
        Self {
            x_mask,
            z_mask,
            coefficient,
        }
    }

    pub fn identity(coefficient: f64) -> Self {
        Self::new(0, 0, coefficient.into())
    }

    /// Parses labels like `"XZIY"`; character `j` acts on qubit `j`.
    pub fn from_label(label: &str, coefficient: Complex64) -> Option<Self> {
        let (mut x, mut z) = (0u64, 0u64);
        for (j, c) in label.chars().enumerate() {
            if j >= 64 {
                return None;
            }
            match c {
                'I' => {}
                'X' => x |= 1 << j,
                'Z' => z |= 1 << j,
                'Y' => {
                    x |= 1 << j;
                    z |= 1 << j;
                }
                _ => return None,
            }
        }
        Some(Self::new(x, z, coefficient))
    }

    pub fn label(&self, n_qubits: usize) -> String {
        (0..n_qubits)
            .map(|j| match (self.x_mask >> j & 1, self.z_mask >> j & 1) {
                (0, 0) => 'I',
                (1, 0) => 'X',
                (0, 1) => 'Z',
                _ => 'Y',
            })
            .collect()
    }

    /// Highest qubit index touched, plus one.
    pub fn support_width(&self) -> usize {
        64 - (self.x_mask | self.z_mask).leading_zeros() as usize
    }

    /// Operator product `self · rhs` with exact phase tracking.
    pub fn mul(&self, rhs: &PauliString) -> PauliString {
        let x = self.x_mask ^ rhs.x_mask;
        let z = self.z_mask ^ rhs.z_mask;
        // i^{a} X^x1 Z^z1 · i^{b} X^x2 Z^z2 = i^{a+b} (-1)^{|z1∧x2|} X^x Z^z
        //                                    = i^{a+b+2|z1∧x2|-|x∧z|} P(x, z)
        let exponent = (self.x_mask & self.z_mask).count_ones()
            + (rhs.x_mask & rhs.z_mask).count_ones()
            + 2 * (self.z_mask & rhs.x_mask).count_ones()
            + 4 * 64
            - (x & z).count_ones();
        PauliString::new(x, z, self.coefficient * rhs.coefficient * i_pow(exponent))
    }
}

/// Applies `p` (ignoring its coefficient) to the basis state `x`.
///
/// Returns `x' = x ⊕ x_mask` and the matrix element `⟨x'|P|x⟩ ∈ {±1, ±i}`.
/// Bit value 1 is the `Z = -1` eigenstate.
#[inline]
pub fn apply_pauli(p: &PauliString, x: Configuration) -> (Configuration, Complex64) {
    let sign_flips = (p.z_mask & x.bits()).count_ones();
    let y_count = (p.x_mask & p.z_mask).count_ones();
    (
        x.with_bits(x.bits() ^ p.x_mask),
        i_pow(y_count + 2 * sign_flips),
    )
}

#[derive(Debug, Clone)]
struct FlipGroup {
    x_mask: u64,
    /// `(z_mask, coefficient · i^{|x∧z|})`
    terms: Vec<(u64, Complex64)>,
}

/// Sum of Pauli strings over `n_qubits` qubits with unique masks.
#[derive(Debug, Clone)]
pub struct QubitHamiltonian {
    n_qubits: usize,
    terms: Vec<PauliString>,
    groups: Vec<FlipGroup>,
}

impl QubitHamiltonian {
    /// Merges like terms and drops those below [`MERGE_TOLERANCE`].
    pub fn new(n_qubits: usize, terms: impl IntoIterator<Item = PauliString>) -> Result<Self> {
        if n_qubits > super::MAX_QUBITS {
            return Err(Error::Config(format!("{n_qubits} qubits exceed the limit")));
        }
        let mut merged: HashMap<(u64, u64), Complex64> = HashMap::new();
        for t in terms {
            if t.support_width() > n_qubits {
                return Err(Error::Encoding(format!(
                    "term touches qubit {} but the register has {n_qubits}",
                    t.support_width() - 1
                )));
            }
            *merged.entry((t.x_mask, t.z_mask)).or_default() += t.coefficient;
        }
        let mut terms: Vec<PauliString> = merged
            .into_iter()
            .filter(|(_, c)| c.norm() >= MERGE_TOLERANCE)
            .map(|((x, z), c)| PauliString::new(x, z, c))
            .collect();
        terms.sort_by_key(|t| (t.x_mask, t.z_mask));
        Ok(Self::from_sorted(n_qubits, terms))
    }

    fn from_sorted(n_qubits: usize, terms: Vec<PauliString>) -> Self {
        let mut groups: Vec<FlipGroup> = Vec::new();
        for t in &terms {
            let entry = (
                t.z_mask,
                t.coefficient * i_pow((t.x_mask & t.z_mask).count_ones()),
            );
            match groups.last_mut() {
                Some(g) if g.x_mask == t.x_mask => g.terms.push(entry),
                _ => groups.push(FlipGroup {
                    x_mask: t.x_mask,
                    terms: vec![entry],
                }),
            }
        }
        Self {
            n_qubits,
            terms,
            groups,
        }
    }

    /// Checks that every coefficient is real and strips the imaginary parts.
    pub fn into_real(self) -> Result<Self> {
        let mut terms = self.terms;
        for t in &mut terms {
            if t.coefficient.im.abs() > HERMITICITY_TOLERANCE {
                return Err(Error::Encoding(format!(
                    "coefficient of {} has imaginary part {:e}; operator is not Hermitian",
                    t.label(self.n_qubits),
                    t.coefficient.im
                )));
            }
            t.coefficient.im = 0.0;
        }
        Ok(Self::from_sorted(self.n_qubits, terms))
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[PauliString] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of distinct `x_mask` values, the bound on connected entries.
    pub fn n_flip_groups(&self) -> usize {
        self.groups.len()
    }

    /// Coefficient of the identity term (zero if absent).
    pub fn constant(&self) -> f64 {
        self.terms
            .iter()
            .find(|t| t.x_mask == 0 && t.z_mask == 0)
            .map_or(0.0, |t| t.coefficient.re)
    }

    /// All `(x', ⟨x'|H|x⟩)` with a nonzero element, one entry per distinct `x'`.
    pub fn connected_configurations(&self, x: Configuration) -> Vec<(Configuration, Complex64)> {
        let mut out = Vec::with_capacity(self.groups.len());
        self.for_each_connected(x, |xp, m| out.push((xp, m)));
        out
    }

    /// Allocation-free form of [`connected_configurations`](Self::connected_configurations).
    #[inline]
    pub fn for_each_connected(&self, x: Configuration, mut f: impl FnMut(Configuration, Complex64)) {
        let bits = x.bits();
        for g in &self.groups {
            let mut m = Complex64::new(0.0, 0.0);
            for &(z, c) in &g.terms {
                if (z & bits).count_ones() & 1 == 1 {
                    m -= c;
                } else {
                    m += c;
                }
            }
            if m.norm_sqr() > MERGE_TOLERANCE * MERGE_TOLERANCE {
                f(x.with_bits(bits ^ g.x_mask), m);
            }
        }
    }

    /// `⟨x|H|x⟩`.
    pub fn diagonal(&self, x: Configuration) -> Complex64 {
        let bits = x.bits();
        self.groups
            .iter()
            .find(|g| g.x_mask == 0)
            .map_or(Complex64::new(0.0, 0.0), |g| {
                g.terms
                    .iter()
                    .map(|&(z, c)| if (z & bits).count_ones() & 1 == 1 { -c } else { c })
                    .sum()
            })
    }

    pub fn to_json(&self) -> PauliJson {
        PauliJson {
            n_qubits: self.n_qubits,
            terms: self
                .terms
                .iter()
                .map(|t| PauliTermJson {
                    coeff: t.coefficient.re,
                    pauli: t.label(self.n_qubits),
                })
                .collect(),
        }
    }

    pub fn from_json(doc: &PauliJson) -> Result<Self> {
        let mut terms = Vec::with_capacity(doc.terms.len());
        for (i, t) in doc.terms.iter().enumerate() {
            if t.pauli.chars().count() != doc.n_qubits {
                return Err(Error::Encoding(format!(
                    "term {i}: label `{}` does not have {} characters",
                    t.pauli, doc.n_qubits
                )));
            }
            let p = PauliString::from_label(&t.pauli, t.coeff.into())
                .ok_or_else(|| Error::Encoding(format!("term {i}: bad Pauli label `{}`", t.pauli)))?;
            terms.push(p);
        }
        Self::new(doc.n_qubits, terms)
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = serde_json::to_string_pretty(&self.to_json())?;
        std::fs::write(path, text + "\n").map_err(|e| Error::from(e).in_file(path))
    }

    pub fn read_json(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::from(e).in_file(path))?;
        let doc: PauliJson = serde_json::from_str(&text).map_err(|e| Error::from(e).in_file(path))?;
        Self::from_json(&doc).map_err(|e| e.in_file(path))
    }
}

impl fmt::Display for QubitHamiltonian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in &self.terms {
            writeln!(f, "{:+.12} {}", t.coefficient.re, t.label(self.n_qubits))?;
        }
        Ok(())
    }
}

/// Interchange document `{n_qubits, terms: [{coeff, pauli}]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PauliJson {
    pub n_qubits: usize,
    pub terms: Vec<PauliTermJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PauliTermJson {
    pub coeff: f64,
    pub pauli: String,
}
