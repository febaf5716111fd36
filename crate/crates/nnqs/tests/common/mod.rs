//! Oracles shared by the integration tests. Nothing here calls the code
//! paths it is used to check.

#![allow(dead_code)]

use std::path::PathBuf;

use nalgebra::{DMatrix, DVector};
use nnqs::ansatz::{Network, Parameter};
use nnqs::hamiltonian::{Configuration, IntegralTable, QubitHamiltonian};
use num_complex::Complex64;
use rand::Rng;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/fcidump").join(name)
}

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Random integrals with the 8-fold symmetry of real orbitals.
pub fn random_table<R: Rng>(rng: &mut R, n_orbitals: usize, n_electrons: usize) -> IntegralTable {
    let mut t = IntegralTable::new(n_orbitals, n_electrons, 0, rng.gen_range(-1.0..1.0)).unwrap();
    for p in 0..n_orbitals {
        for q in 0..=p {
            t.set_h(p, q, rng.gen_range(-1.0..1.0));
        }
    }
    for p in 0..n_orbitals {
        for q in 0..=p {
            for r in 0..n_orbitals {
                for s in 0..=r {
                    t.set_g(p, q, r, s, rng.gen_range(-0.5..0.5));
                }
            }
        }
    }
    t
}

/// Configurations with `k` of `n` bits set, in increasing integer order.
pub fn sector_states(n: usize, k: usize) -> Vec<u64> {
    (0..1u64 << n).filter(|b| b.count_ones() as usize == k).collect()
}

/// `a_k |x⟩` as `(bits, sign)`, with the sign from occupied modes below `k`.
fn lower(x: u64, k: usize) -> Option<(u64, f64)> {
    (x >> k & 1 == 1).then(|| (x ^ (1 << k), parity(x & ((1 << k) - 1))))
}

fn raise(x: u64, k: usize) -> Option<(u64, f64)> {
    (x >> k & 1 == 0).then(|| (x | (1 << k), parity(x & ((1 << k) - 1))))
}

fn parity(m: u64) -> f64 {
    if m.count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Molecular Hamiltonian on `states` from ladder operators acting on
/// occupation vectors, spin orbital `2p + σ`.
pub fn ladder_matrix(t: &IntegralTable, states: &[u64]) -> DMatrix<f64> {
    let dim = states.len();
    let index = |b: u64| states.iter().position(|&s| s == b).expect("stays in sector");
    let n = t.n_orbitals;
    let mut m = DMatrix::zeros(dim, dim);
    for (j, &x) in states.iter().enumerate() {
        m[(j, j)] += t.e_core;
        for p in 0..n {
            for q in 0..n {
                for sg in 0..2 {
                    if let Some((y, s1)) = lower(x, 2 * q + sg) {
                        if let Some((z, s2)) = raise(y, 2 * p + sg) {
                            m[(index(z), j)] += t.h(p, q) * s1 * s2;
                        }
                    }
                }
            }
        }
        for p in 0..n {
            for q in 0..n {
                for r in 0..n {
                    for s in 0..n {
                        let g = t.g(p, q, r, s);
                        for sg in 0..2 {
                            for tau in 0..2 {
                                // a†_pσ a†_rτ a_sτ a_qσ
                                let chain = lower(x, 2 * q + sg)
                                    .and_then(|(y, a)| lower(y, 2 * s + tau).map(|(y, b)| (y, a * b)))
                                    .and_then(|(y, a)| raise(y, 2 * r + tau).map(|(y, b)| (y, a * b)))
                                    .and_then(|(y, a)| raise(y, 2 * p + sg).map(|(y, b)| (y, a * b)));
                                if let Some((z, sign)) = chain {
                                    m[(index(z), j)] += 0.5 * g * sign;
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    m
}

fn sigma(c: char) -> DMatrix<Complex64> {
    let (o, l, i) = (c_(0.0), c_(1.0), Complex64::new(0.0, 1.0));
    match c {
        'I' => DMatrix::from_row_slice(2, 2, &[l, o, o, l]),
        'X' => DMatrix::from_row_slice(2, 2, &[o, l, l, o]),
        'Y' => DMatrix::from_row_slice(2, 2, &[o, -i, i, o]),
        'Z' => DMatrix::from_row_slice(2, 2, &[l, o, o, -l]),
        _ => unreachable!(),
    }
}

fn c_(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

/// Full-space matrix from Kronecker products of 2×2 Paulis. Qubit 0 is the
/// least significant bit of the row index and bit 1 is `Z = -1`.
pub fn kron_matrix(h: &QubitHamiltonian) -> DMatrix<Complex64> {
    let n = h.n_qubits();
    let mut total = DMatrix::<Complex64>::zeros(1 << n, 1 << n);
    for term in h.terms() {
        let label: Vec<char> = term.label(n).chars().collect();
        let mut m = DMatrix::from_element(1, 1, c_(1.0));
        for j in (0..n).rev() {
            m = m.kronecker(&sigma(label[j]));
        }
        total += m * term.coefficient;
    }
    total
}

/// Restriction of a full-space matrix to the listed basis states.
pub fn restrict(full: &DMatrix<Complex64>, states: &[u64]) -> DMatrix<Complex64> {
    DMatrix::from_fn(states.len(), states.len(), |i, j| full[(states[i] as usize, states[j] as usize)])
}

pub fn lowest_eigenvalue(m: &DMatrix<Complex64>) -> f64 {
    m.clone().symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}

/// Amplitudes of `net` on `states`, evaluated from the product formula.
pub fn amplitudes<T: Parameter>(net: &Network<T>, states: &[u64]) -> DVector<Complex64> {
    let n = net.n_visible();
    DVector::from_iterator(states.len(), states.iter().map(|&b| direct_psi(net, Configuration::new(b, n))))
}

/// `Ψ(x)` multiplied out term by term, without logarithms.
pub fn direct_psi<T: Parameter>(net: &Network<T>, x: Configuration) -> Complex64 {
    let (nv, nh) = (net.n_visible(), net.n_hidden());
    let p: Vec<Complex64> = net.params().iter().map(|v| v.to_c64()).collect();
    let spin = |j: usize| if x.bits() >> j & 1 == 1 { -1.0 } else { 1.0 };
    let s: Complex64 = (0..nv).map(|j| p[j] * spin(j)).sum();
    let mut psi = match net.kind() {
        nnqs::ansatz::AnsatzKind::TanhFcn => s.tanh(),
        nnqs::ansatz::AnsatzKind::Rbm => s.exp(),
    };
    for i in 0..nh {
        let theta: Complex64 = p[nv + i] + (0..nv).map(|j| p[nv + nh + i * nv + j] * spin(j)).sum::<Complex64>();
        psi *= 2.0 * theta.cosh();
    }
    psi
}

/// `⟨ψ|M|ψ⟩ / ⟨ψ|ψ⟩`.
pub fn rayleigh(m: &DMatrix<Complex64>, psi: &DVector<Complex64>) -> f64 {
    ((psi.adjoint() * m * psi)[(0, 0)] / psi.dot(&psi.conjugate())).re
}

/// Variational energy plus `λ‖θ‖²` at real components `theta`.
pub fn penalized_energy<T: Parameter>(net: &Network<T>, m: &DMatrix<Complex64>, states: &[u64], theta: &[f64], lambda: f64) -> f64 {
    let mut probe = net.clone();
    probe.set_real_components(theta).unwrap();
    rayleigh(m, &amplitudes(&probe, states)) + lambda * theta.iter().map(|v| v * v).sum::<f64>()
}

/// Central-difference gradient of [`penalized_energy`].
pub fn fd_gradient<T: Parameter>(net: &Network<T>, m: &DMatrix<Complex64>, states: &[u64], lambda: f64, step: f64) -> Vec<f64> {
    let theta = net.real_components();
    (0..theta.len())
        .map(|k| {
            let (mut up, mut dn) = (theta.clone(), theta.clone());
            up[k] += step;
            dn[k] -= step;
            (penalized_energy(net, m, states, &up, lambda) - penalized_energy(net, m, states, &dn, lambda)) / (2.0 * step)
        })
        .collect()
}

/// Relative error with an absolute floor for components near zero.
pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(a.abs()).max(1e-3)
}
