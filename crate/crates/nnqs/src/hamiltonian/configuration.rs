use std::fmt;

/// Maximum number of spin-orbitals a [`Configuration`] can hold.
pub const MAX_QUBITS: usize = 64;

/// An occupation bitstring over `n_qubits` spin-orbitals.
///
/// Bit `j` set means spin-orbital `j` is occupied. The corresponding spin
/// value is `x_j = 1 - 2 * bit_j`, so an empty orbital is `+1` and an
/// occupied one is `-1`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration {
    bits: u64,
    n_qubits: u32,
}

impl Configuration {
    pub fn new(bits: u64, n_qubits: usize) -> Self {
        assert!(n_qubits <= MAX_QUBITS, "at most {MAX_QUBITS} qubits");
        debug_assert!(
            n_qubits == 64 || bits >> n_qubits == 0,
            "bits set above n_qubits"
        );
        Self {
            bits,
            n_qubits: n_qubits as u32,
        }
    }

    pub fn empty(n_qubits: usize) -> Self {
        Self::new(0, n_qubits)
    }

    /// Occupies exactly the listed spin-orbitals.
    pub fn from_occupied(occupied: &[usize], n_qubits: usize) -> Self {
        let bits = occupied.iter().fold(0u64, |acc, &j| {
            assert!(j < n_qubits);
            acc | (1 << j)
        });
        Self::new(bits, n_qubits)
    }

    /// Parses a 0/1 string where character `j` is spin-orbital `j`.
    pub fn from_bitstring(s: &str) -> Option<Self> {
        let mut bits = 0u64;
        for (j, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => bits |= 1 << j,
                _ => return None,
            }
        }
        (s.len() <= MAX_QUBITS).then(|| Self::new(bits, s.len()))
    }

    #[inline]
    pub fn bits(self) -> u64 {
        self.bits
    }

    #[inline]
    pub fn n_qubits(self) -> usize {
        self.n_qubits as usize
    }

    #[inline]
    pub fn n_electrons(self) -> usize {
        self.bits.count_ones() as usize
    }

    #[inline]
    pub fn is_occupied(self, j: usize) -> bool {
        self.bits >> j & 1 == 1
    }

    /// Spin value `x_j ∈ {+1, -1}`.
    #[inline]
    pub fn spin(self, j: usize) -> f64 {
        if self.is_occupied(j) {
            -1.0
        } else {
            1.0
        }
    }

    pub fn spins(self) -> impl Iterator<Item = f64> {
        (0..self.n_qubits()).map(move |j| self.spin(j))
    }

    #[inline]
    pub fn with_bits(self, bits: u64) -> Self {
        Self::new(bits, self.n_qubits())
    }

    /// Positions where `self` and `other` differ.
    pub fn diff_mask(self, other: Configuration) -> u64 {
        self.bits ^ other.bits
    }

    pub fn to_bitstring(self) -> String {
        (0..self.n_qubits())
            .map(|j| if self.is_occupied(j) { '1' } else { '0' })
            .collect()
    }
}

impl fmt::Debug for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Configuration({})", self.to_bitstring())
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_bitstring())
    }
}

/// Iterates over the indices of set bits, lowest first.
pub(crate) fn set_bits(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let j = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(j)
        }
    })
}
