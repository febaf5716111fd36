//! Stochastic reconfiguration: covariance matrix, forces and the shifted solve.

use nalgebra::{DMatrix, DVector};

use crate::ansatz::Parameter;
use crate::error::{Error, Result};
use crate::vmc::LocalEnergySample;

pub const DEFAULT_EPSILON: f64 = 0.02;
pub const DEFAULT_LAMBDA: f64 = 1e-3;

/// SR quantities for one parameter update.
///
/// `S = YᴴY` is kept in factored form: row `k` of `Y` is
/// `√(w_k/W)·(O(x_k) - ⟨O⟩)`. `F = 2⟨O*(E_loc - ⟨E_loc⟩)⟩ + 2λθ` is the
/// gradient of `E + λ‖θ‖²` with respect to the real and imaginary parts.
#[derive(Debug, Clone)]
pub struct SrState<T: Parameter> {
    pub y: DMatrix<T>,
    pub f: DVector<T>,
    pub epsilon: f64,
    pub lambda: f64,
}

impl<T: Parameter> SrState<T> {
    pub fn n_params(&self) -> usize {
        self.f.len()
    }

    /// `S_ij = ⟨O_i* O_j⟩ - ⟨O_i*⟩⟨O_j⟩`.
    pub fn s(&self) -> DMatrix<T> {
        self.y.ad_mul(&self.y)
    }
}

/// Builds `Y` and `F` from weighted samples at parameters `theta`.
pub fn build_sr<T: Parameter>(samples: &[LocalEnergySample<T>], theta: &[T], epsilon: f64, lambda: f64) -> Result<SrState<T>> {
    let p = theta.len();
    if let Some(bad) = samples.iter().find(|s| s.o.len() != p) {
        return Err(Error::DimensionMismatch {
            expected: p,
            found: bad.o.len(),
        });
    }
    let total: f64 = samples.iter().map(|s| s.weight).sum();
    if samples.is_empty() || total <= 0.0 {
        return Err(Error::EmptySampleSet);
    }
    let inv = T::lift(1.0 / total);
    let mut o_mean = vec![T::zero(); p];
    let mut e_mean = T::zero();
    for s in samples {
        let w = T::lift(s.weight);
        for (m, &o) in o_mean.iter_mut().zip(&s.o) {
            *m += w * o;
        }
        e_mean += w * s.e_loc;
    }
    o_mean.iter_mut().for_each(|m| *m *= inv);
    e_mean *= inv;

    let mut y = DMatrix::<T>::zeros(samples.len(), p);
    let mut r = DVector::<T>::zeros(samples.len());
    for (k, s) in samples.iter().enumerate() {
        let sw = T::lift((s.weight / total).sqrt());
        for j in 0..p {
            y[(k, j)] = sw * (s.o[j] - o_mean[j]);
        }
        r[k] = sw * (s.e_loc - e_mean);
    }
    let two = T::lift(2.0);
    let mut f = y.ad_mul(&r) * two;
    for (fi, &t) in f.iter_mut().zip(theta) {
        *fi += T::lift(2.0 * lambda) * t;
    }
    Ok(SrState {
        y,
        f,
        epsilon,
        lambda,
    })
}

/// Solves `(S + εI) d = F`.
///
/// Uses the `n_samples × n_samples` Woodbury form when there are fewer
/// sample rows than parameters, a Cholesky factorization otherwise, and
/// an SVD pseudo-inverse if the factorization fails.
pub fn natural_gradient<T: Parameter>(sr: &SrState<T>) -> Result<DVector<T>> {
    let (rows, p) = sr.y.shape();
    let eps = T::lift(sr.epsilon);
    if sr.epsilon > 0.0 && rows < p {
        // (εI + YᴴY)⁻¹ = ε⁻¹ (I - Yᴴ (εI + YYᴴ)⁻¹ Y)
        let mut k = &sr.y * sr.y.adjoint();
        for i in 0..rows {
            k[(i, i)] += eps;
        }
        let yf = &sr.y * &sr.f;
        if let Some(z) = solve_spd(k, &yf) {
            let d = (&sr.f - sr.y.ad_mul(&z)) * T::lift(1.0 / sr.epsilon);
            return finite(d);
        }
    }
    let mut a = sr.s();
    for i in 0..p {
        a[(i, i)] += eps;
    }
    if let Some(d) = solve_spd(a.clone(), &sr.f) {
        return finite(d);
    }
    let d = a
        .svd(true, true)
        .solve(&sr.f, 1e-12)
        .map_err(|_| Error::SingularSystem)?;
    finite(d)
}

fn solve_spd<T: Parameter>(a: DMatrix<T>, b: &DVector<T>) -> Option<DVector<T>> {
    let d = a.cholesky()?.solve(b);
    d.iter().all(|v| v.to_c64().re.is_finite() && v.to_c64().im.is_finite()).then_some(d)
}

fn finite<T: Parameter>(d: DVector<T>) -> Result<DVector<T>> {
    if d.iter().all(|v| v.to_c64().re.is_finite() && v.to_c64().im.is_finite()) {
        Ok(d)
    } else {
        Err(Error::SingularSystem)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::Configuration;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_xoshiro::Xoshiro256PlusPlus;

    fn random_samples(n: usize, p: usize, seed: u64) -> (Vec<LocalEnergySample<f64>>, Vec<f64>) {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
        let samples = (0..n)
            .map(|_| LocalEnergySample {
                config: Configuration::empty(1),
                weight: rng.gen_range(1..4) as f64,
                e_loc: rng.gen_range(-2.0..0.0),
                o: (0..p).map(|_| rng.gen_range(-1.0..1.0)).collect(),
            })
            .collect();
        (samples, (0..p).map(|_| rng.gen_range(-1.0..1.0)).collect())
    }

    #[test]
    fn single_sample_has_no_covariance() {
        let (s, theta) = random_samples(1, 4, 0);
        let sr = build_sr(&s, &theta, 0.02, 1e-3).unwrap();
        assert!(sr.s().iter().all(|&v| v == 0.0));
        for (f, t) in sr.f.iter().zip(&theta) {
            assert!((f - 2e-3 * t).abs() < 1e-15);
        }
    }

    #[test]
    fn constant_derivatives_have_no_covariance() {
        let (mut s, theta) = random_samples(10, 3, 1);
        for x in &mut s {
            x.o = vec![0.3, -0.1, 2.0];
        }
        let sr = build_sr(&s, &theta, 0.02, 1e-3).unwrap();
        assert!(sr.s().iter().all(|&v| v.abs() < 1e-15));
        for (f, t) in sr.f.iter().zip(&theta) {
            assert!((f - 2e-3 * t).abs() < 1e-15);
        }
    }

    #[test]
    fn matches_two_pass_covariance() {
        let (s, theta) = random_samples(50, 5, 2);
        let sr = build_sr(&s, &theta, 0.02, 1e-3).unwrap();
        let w: f64 = s.iter().map(|x| x.weight).sum();
        let mean = |f: &dyn Fn(&LocalEnergySample<f64>) -> f64| s.iter().map(|x| x.weight * f(x)).sum::<f64>() / w;
        let s_mat = sr.s();
        for i in 0..5 {
            for j in 0..5 {
                let expect = mean(&|x| x.o[i] * x.o[j]) - mean(&|x| x.o[i]) * mean(&|x| x.o[j]);
                assert!((s_mat[(i, j)] - expect).abs() < 1e-12);
            }
            let f = 2.0 * (mean(&|x| x.o[i] * x.e_loc) - mean(&|x| x.o[i]) * mean(&|x| x.e_loc)) + 2e-3 * theta[i];
            assert!((sr.f[i] - f).abs() < 1e-12);
        }
    }

    #[test]
    fn dimension_mismatch() {
        let (s, _) = random_samples(3, 4, 3);
        assert!(matches!(
            build_sr(&s, &[0.0; 5], 0.02, 1e-3),
            Err(Error::DimensionMismatch { expected: 5, found: 4 })
        ));
    }

    #[test]
    fn zero_s_divides_by_shift() {
        let sr = SrState {
            y: DMatrix::<f64>::zeros(1, 3),
            f: DVector::from_vec(vec![0.02, -0.04, 1.0]),
            epsilon: 0.02,
            lambda: 0.0,
        };
        let d = natural_gradient(&sr).unwrap();
        assert!((d - DVector::from_vec(vec![1.0, -2.0, 50.0])).norm() < 1e-12);
    }

    #[test]
    fn identity_s_divides_by_one_plus_shift() {
        let f = DVector::from_vec(vec![1.0, 2.0]);
        let sr = SrState {
            y: DMatrix::<f64>::identity(2, 2),
            f: f.clone(),
            epsilon: 0.02,
            lambda: 0.0,
        };
        assert!((natural_gradient(&sr).unwrap() - f / 1.02).norm() < 1e-14);
    }

    #[test]
    fn woodbury_and_dense_paths_agree() {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(4);
        for (rows, p) in [(3, 8), (8, 8), (12, 6)] {
            let y = DMatrix::<Complex64>::from_fn(rows, p, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            let f = DVector::<Complex64>::from_fn(p, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            let sr = SrState { y, f, epsilon: 0.02, lambda: 0.0 };
            let d = natural_gradient(&sr).unwrap();
            let mut a = sr.s();
            for i in 0..p {
                a[(i, i)] += Complex64::new(0.02, 0.0);
            }
            assert!((&a * &d - &sr.f).norm() < 1e-10);
        }
    }

    #[test]
    fn random_spd_residual() {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(5);
        let y = DMatrix::<f64>::from_fn(10, 6, |_, _| rng.gen_range(-1.0..1.0));
        let f = DVector::<f64>::from_fn(6, |_, _| rng.gen_range(-1.0..1.0));
        let sr = SrState { y, f, epsilon: 0.02, lambda: 0.0 };
        let d = natural_gradient(&sr).unwrap();
        let a = sr.s() + DMatrix::<f64>::identity(6, 6) * 0.02;
        assert!((a * d - &sr.f).norm() < 1e-10);
    }

    #[test]
    fn singular_without_shift_uses_pseudo_inverse() {
        let sr = SrState {
            y: DMatrix::<f64>::from_row_slice(1, 2, &[1.0, 1.0]),
            f: DVector::from_vec(vec![1.0, 1.0]),
            epsilon: 0.0,
            lambda: 0.0,
        };
        let d = natural_gradient(&sr).unwrap();
        assert!((d - DVector::from_vec(vec![0.5, 0.5])).norm() < 1e-12);
    }
}
