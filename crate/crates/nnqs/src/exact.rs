//! Exact references: sparse Hamiltonian matrices, ground energies and
//! fully enumerated wave functions.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::ansatz::{Network, Parameter};
use crate::error::{Error, Result};
use crate::hamiltonian::{IntegralTable, QubitHamiltonian, HERMITICITY_TOLERANCE};
use crate::sector::SectorBasis;

/// Largest dimension diagonalized densely.
pub const DENSE_LIMIT: usize = 4096;
/// Largest sector the oracle enumerates.
pub const SECTOR_LIMIT: usize = 1_000_000;

const LANCZOS_KRYLOV: usize = 120;
const LANCZOS_RESTARTS: usize = 200;
const LANCZOS_TOL: f64 = 1e-11;

/// Hermitian matrix stored by columns: `cols[j]` holds `(i, H_ij)`.
#[derive(Debug, Clone)]
pub struct SparseHermitian {
    dim: usize,
    cols: Vec<Vec<(u32, Complex64)>>,
    real: bool,
}

impl SparseHermitian {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Every stored entry has zero imaginary part.
    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.cols[j]
            .iter()
            .find(|(r, _)| *r as usize == i)
            .map_or(Complex64::new(0.0, 0.0), |e| e.1)
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (j, col) in self.cols.iter().enumerate() {
            for &(i, v) in col {
                m[(i as usize, j)] = v;
            }
        }
        m
    }

    pub fn to_dense_real(&self) -> DMatrix<f64> {
        self.to_dense().map(|z| z.re)
    }

    /// `y = H v`. Since `H` is Hermitian, row `i` of `y` is `Σ_j conj(H_ji) v_j`
    /// which parallelizes over output rows.
    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        self.cols
            .par_iter()
            .map(|col| col.iter().map(|&(j, h)| h.conj() * v[j as usize]).sum())
            .collect()
    }

    pub fn mul_vec_real(&self, v: &[f64]) -> Vec<f64> {
        self.cols
            .par_iter()
            .map(|col| col.iter().map(|&(j, h)| h.re * v[j as usize]).sum())
            .collect()
    }

    /// `vᴴ H v / vᴴ v`.
    pub fn rayleigh_quotient(&self, v: &[Complex64]) -> f64 {
        let hv = self.mul_vec(v);
        let num: Complex64 = v.iter().zip(&hv).map(|(a, b)| a.conj() * b).sum();
        let den: f64 = v.iter().map(|a| a.norm_sqr()).sum();
        num.re / den
    }
}

/// Assembles `⟨x_i|H|x_j⟩` over `basis`.
pub fn hamiltonian_matrix(h: &QubitHamiltonian, basis: &SectorBasis) -> Result<SparseHermitian> {
    if h.n_qubits() != basis.n_qubits() {
        return Err(Error::DimensionMismatch {
            expected: basis.n_qubits(),
            found: h.n_qubits(),
        });
    }
    let cols: Vec<Vec<(u32, Complex64)>> = (0..basis.len())
        .into_par_iter()
        .map(|j| {
            let mut col = Vec::with_capacity(h.n_flip_groups());
            let mut leak = None;
            h.for_each_connected(basis.state(j), |xp, m| match basis.position(xp.bits()) {
                Some(i) => col.push((i as u32, m)),
                None => leak = Some(xp.bits()),
            });
            match leak {
                Some(bits) => Err(Error::SectorLeakage(bits)),
                None => {
                    col.sort_by_key(|e| e.0);
                    Ok(col)
                }
            }
        })
        .collect::<Result<_>>()?;
    let real = cols.iter().flatten().all(|(_, v)| v.im == 0.0);
    let m = SparseHermitian {
        dim: basis.len(),
        cols,
        real,
    };
    for (j, col) in m.cols.iter().enumerate() {
        for &(i, v) in col {
            if (m.get(j, i as usize).conj() - v).norm() > HERMITICITY_TOLERANCE {
                return Err(Error::Encoding(format!("matrix is not Hermitian at ({i}, {j})")));
            }
        }
    }
    Ok(m)
}

/// Smallest eigenvalue: dense below [`DENSE_LIMIT`], Lanczos above.
pub fn ground_energy(m: &SparseHermitian) -> Result<f64> {
    ground_energy_with(m, DENSE_LIMIT)
}

pub fn ground_energy_with(m: &SparseHermitian, dense_limit: usize) -> Result<f64> {
    if m.dim() == 0 {
        return Err(Error::Config("empty matrix".into()));
    }
    if m.dim() <= dense_limit {
        let min = if m.is_real() {
            m.to_dense_real().symmetric_eigenvalues().min()
        } else {
            m.to_dense().symmetric_eigenvalues().min()
        };
        return Ok(min);
    }
    lanczos_ground(m).map(|(e, _)| e)
}

/// Restarted Lanczos with full reorthogonalization in the Krylov block.
///
/// Complex matrices run on the real embedding `[[A, -B], [B, A]]`, whose
/// spectrum is that of `A + iB` with every eigenvalue doubled.
pub fn lanczos_ground(m: &SparseHermitian) -> Result<(f64, Vec<Complex64>)> {
    let n = m.dim();
    let real = m.is_real();
    let len = if real { n } else { 2 * n };
    let apply = |v: &[f64]| -> Vec<f64> {
        if real {
            m.mul_vec_real(v)
        } else {
            let z: Vec<Complex64> = (0..n).map(|i| Complex64::new(v[i], v[n + i])).collect();
            let hz = m.mul_vec(&z);
            hz.iter().map(|c| c.re).chain(hz.iter().map(|c| c.im)).collect()
        }
    };
    // Deterministic start with weight on every basis state.
    let mut start: Vec<f64> = (0..len).map(|i| 1.0 + ((i * 7919) % 97) as f64 / 97.0).collect();
    let mut prev = f64::INFINITY;
    let krylov = LANCZOS_KRYLOV.min(len);
    for _ in 0..LANCZOS_RESTARTS {
        normalize(&mut start);
        let mut basis: Vec<Vec<f64>> = vec![start.clone()];
        let mut alpha = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        for k in 0..krylov {
            let mut w = apply(&basis[k]);
            let a = dot(&w, &basis[k]);
            alpha.push(a);
            for _ in 0..2 {
                for b in &basis {
                    let c = dot(&w, b);
                    axpy(&mut w, -c, b);
                }
            }
            let nb = dot(&w, &w).sqrt();
            if k + 1 == krylov || nb < 1e-12 {
                break;
            }
            beta.push(nb);
            w.iter_mut().for_each(|x| *x /= nb);
            basis.push(w);
        }
        let k = alpha.len();
        let t = DMatrix::<f64>::from_fn(k, k, |i, j| {
            if i == j {
                alpha[i]
            } else if i + 1 == j {
                beta[i]
            } else if j + 1 == i {
                beta[j]
            } else {
                0.0
            }
        });
        let eig = t.symmetric_eigen();
        let (imin, &e) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("nonempty");
        let y = eig.eigenvectors.column(imin);
        let mut ritz = vec![0.0; len];
        for (c, b) in y.iter().zip(&basis) {
            axpy(&mut ritz, *c, b);
        }
        normalize(&mut ritz);
        let hr = apply(&ritz);
        let residual: f64 = hr.iter().zip(&ritz).map(|(h, r)| (h - e * r).powi(2)).sum::<f64>().sqrt();
        if residual < 1e-6 || ((prev - e).abs() < LANCZOS_TOL && residual < 1e-4) || k < krylov {
            let v = if real {
                ritz.iter().map(|&r| Complex64::new(r, 0.0)).collect()
            } else {
                (0..n).map(|i| Complex64::new(ritz[i], ritz[n + i])).collect()
            };
            return Ok((e, v));
        }
        prev = e;
        start = ritz;
    }
    Err(Error::ConvergenceFailure(format!(
        "Lanczos did not converge in {LANCZOS_RESTARTS} restarts"
    )))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    y.iter_mut().zip(x).for_each(|(y, x)| *y += a * x);
}

fn normalize(v: &mut [f64]) {
    let n = dot(v, v).sqrt();
    v.iter_mut().for_each(|x| *x /= n);
}

/// Normalized `Ψ(x)` for every basis state.
pub fn exact_state_vector<T: Parameter>(net: &Network<T>, basis: &SectorBasis) -> Result<DVector<Complex64>> {
    if basis.len() > SECTOR_LIMIT {
        return Err(Error::SectorTooLarge {
            dim: basis.len() as u128,
            limit: SECTOR_LIMIT,
        });
    }
    let logs: Vec<_> = basis.states().map(|x| net.log_psi(x)).collect();
    let max = logs.iter().map(|l| l.log_magnitude).fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return Err(Error::Normalization);
    }
    let mut v = DVector::from_iterator(
        logs.len(),
        logs.iter().map(|l| {
            if l.is_zero() {
                Complex64::new(0.0, 0.0)
            } else {
                l.phase * (l.log_magnitude - max).exp()
            }
        }),
    );
    let norm = v.norm();
    v /= Complex64::new(norm, 0.0);
    Ok(v)
}

/// `⟨Ψ|H|Ψ⟩ / ⟨Ψ|Ψ⟩` over `basis`.
pub fn variational_energy<T: Parameter>(h: &QubitHamiltonian, net: &Network<T>, basis: &SectorBasis) -> Result<f64> {
    let m = hamiltonian_matrix(h, basis)?;
    let v = exact_state_vector(net, basis)?;
    Ok(m.rayleigh_quotient(v.as_slice()))
}

/// `H` built from the integrals with explicit ladder operators, independent of
/// the Pauli encoding.
///
/// `H = E_core + Σ h_pq a†_pσ a_qσ + ½ Σ (pq|rs) a†_pσ a†_rτ a_sτ a_qσ` with
/// spin orbital `2p + σ`. The sign of `a_k` acting on an occupation number
/// vector is the parity of occupied modes below `k`.
pub fn fermionic_matrix(table: &IntegralTable, basis: &SectorBasis) -> Result<DMatrix<f64>> {
    let dim = basis.len();
    let norb = table.n_orbitals;
    if basis.n_qubits() != 2 * norb {
        return Err(Error::DimensionMismatch {
            expected: 2 * norb,
            found: basis.n_qubits(),
        });
    }
    let mut m = DMatrix::<f64>::zeros(dim, dim);
    for j in 0..dim {
        let x = basis.state(j).bits();
        let mut add = |amp: Option<(u64, f64)>, c: f64| -> Result<()> {
            if let Some((y, s)) = amp {
                if c != 0.0 {
                    let i = basis.position(y).ok_or(Error::SectorLeakage(y))?;
                    m[(i, j)] += c * s;
                }
            }
            Ok(())
        };
        add(Some((x, 1.0)), table.e_core)?;
        for p in 0..norb {
            for q in 0..norb {
                let hpq = table.h(p, q);
                for sigma in 0..2 {
                    let state = annihilate(x, 2 * q + sigma).and_then(|(y, s)| create(y, 2 * p + sigma).map(|(z, t)| (z, s * t)));
                    add(state, hpq)?;
                }
            }
        }
        for p in 0..norb {
            for q in 0..norb {
                for r in 0..norb {
                    for s in 0..norb {
                        let g = table.g(p, q, r, s);
                        if g == 0.0 {
                            continue;
                        }
                        for sigma in 0..2 {
                            for tau in 0..2 {
                                let state = annihilate(x, 2 * q + sigma)
                                    .and_then(|(y, a)| annihilate(y, 2 * s + tau).map(|(y, b)| (y, a * b)))
                                    .and_then(|(y, a)| create(y, 2 * r + tau).map(|(y, b)| (y, a * b)))
                                    .and_then(|(y, a)| create(y, 2 * p + sigma).map(|(y, b)| (y, a * b)));
                                add(state, 0.5 * g)?;
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(m)
}

fn parity_below(x: u64, k: usize) -> f64 {
    if (x & ((1u64 << k) - 1)).count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn annihilate(x: u64, k: usize) -> Option<(u64, f64)> {
    (x >> k & 1 == 1).then(|| (x ^ (1 << k), parity_below(x, k)))
}

fn create(x: u64, k: usize) -> Option<(u64, f64)> {
    (x >> k & 1 == 0).then(|| (x | (1 << k), parity_below(x, k)))
}
