//! Enumerated particle-number sectors.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::hamiltonian::Configuration;

/// Registers up to this width use a dense bits→position table.
const DENSE_INDEX_QUBITS: usize = 20;

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

#[derive(Debug, Clone)]
enum Index {
    Dense(Vec<u32>),
    Sparse(HashMap<u64, u32>),
}

/// All configurations with a fixed Hamming weight, in ascending bit order.
#[derive(Debug, Clone)]
pub struct SectorBasis {
    n_qubits: usize,
    n_electrons: Option<usize>,
    states: Vec<u64>,
    index: Index,
}

impl SectorBasis {
    /// The `n_electrons` sector, refusing dimensions above `limit`.
    pub fn new(n_qubits: usize, n_electrons: usize, limit: usize) -> Result<Self> {
        let dim = binomial(n_qubits, n_electrons);
        if dim > limit as u128 || n_qubits > crate::hamiltonian::MAX_QUBITS {
            return Err(Error::SectorTooLarge { dim, limit });
        }
        let mut states = Vec::with_capacity(dim as usize);
        if n_electrons == 0 {
            states.push(0);
        } else if n_electrons <= n_qubits {
            // Gosper's hack walks fixed-weight words in increasing order.
            let mut v: u64 = (1u64 << n_electrons) - 1;
            loop {
                states.push(v);
                let t = v | (v - 1);
                if t == u64::MAX {
                    break;
                }
                let next = (t + 1) | (((!t & (t + 1)) - 1) >> (v.trailing_zeros() + 1));
                if n_qubits < 64 && next >> n_qubits != 0 {
                    break;
                }
                v = next;
            }
        }
        Ok(Self::from_states(n_qubits, Some(n_electrons), states))
    }

    /// Every configuration of `n_qubits` qubits.
    pub fn full(n_qubits: usize, limit: usize) -> Result<Self> {
        let dim = 1u128 << n_qubits;
        if dim > limit as u128 {
            return Err(Error::SectorTooLarge { dim, limit });
        }
        Ok(Self::from_states(n_qubits, None, (0..dim as u64).collect()))
    }

    fn from_states(n_qubits: usize, n_electrons: Option<usize>, states: Vec<u64>) -> Self {
        let index = if n_qubits <= DENSE_INDEX_QUBITS {
            let mut dense = vec![u32::MAX; 1 << n_qubits];
            for (i, &s) in states.iter().enumerate() {
                dense[s as usize] = i as u32;
            }
            Index::Dense(dense)
        } else {
            Index::Sparse(states.iter().enumerate().map(|(i, &s)| (s, i as u32)).collect())
        };
        Self {
            n_qubits,
            n_electrons,
            states,
            index,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// `None` for the full Hilbert space.
    pub fn n_electrons(&self) -> Option<usize> {
        self.n_electrons
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state(&self, i: usize) -> Configuration {
        Configuration::new(self.states[i], self.n_qubits)
    }

    pub fn states(&self) -> impl ExactSizeIterator<Item = Configuration> + '_ {
        self.states
            .iter()
            .map(move |&b| Configuration::new(b, self.n_qubits))
    }

    #[inline]
    pub fn position(&self, bits: u64) -> Option<usize> {
        let i = match &self.index {
            Index::Dense(d) => *d.get(bits as usize)?,
            Index::Sparse(m) => *m.get(&bits)?,
        };
        (i != u32::MAX).then_some(i as usize)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sector_sizes_and_order() {
        let b = SectorBasis::new(4, 2, 100).unwrap();
        let bits: Vec<u64> = b.states().map(|c| c.bits()).collect();
        assert_eq!(bits, vec![0b0011, 0b0101, 0b0110, 0b1001, 0b1010, 0b1100]);
        for (i, &s) in bits.iter().enumerate() {
            assert_eq!(b.position(s), Some(i));
        }
        assert_eq!(b.position(0b0111), None);
        assert_eq!(SectorBasis::new(12, 4, 1000).unwrap().len(), 495);
        assert_eq!(SectorBasis::new(5, 0, 10).unwrap().len(), 1);
        assert_eq!(SectorBasis::new(5, 5, 10).unwrap().len(), 1);
        assert_eq!(SectorBasis::new(64, 1, 100).unwrap().len(), 64);
        assert_eq!(SectorBasis::new(24, 3, 10_000).unwrap().len(), 2024);
    }

    #[test]
    fn limit_enforced() {
        assert!(matches!(
            SectorBasis::new(30, 22, 1 << 20),
            Err(Error::SectorTooLarge { dim: 5852925, .. })
        ));
    }

    #[test]
    fn full_basis() {
        let b = SectorBasis::full(3, 100).unwrap();
        assert_eq!(b.len(), 8);
        assert_eq!(b.n_electrons(), None);
    }
}
