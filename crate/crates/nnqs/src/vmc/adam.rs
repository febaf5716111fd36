//! Adam on the real components of the parameter vector.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdamState {
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub t: u64,
    pub alpha: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps_adam: f64,
}

impl AdamState {
    pub fn new(n: usize, alpha: f64, beta1: f64, beta2: f64, eps_adam: f64) -> Self {
        Self {
            m: vec![0.0; n],
            v: vec![0.0; n],
            t: 0,
            alpha,
            beta1,
            beta2,
            eps_adam,
        }
    }

    /// `θ ← θ - α m̂ / (√v̂ + eps_adam)` with bias-corrected moments of `grad`.
    pub fn update(&mut self, grad: &[f64], params: &mut [f64]) -> Result<()> {
        let n = self.m.len();
        if grad.len() != n || params.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: if grad.len() != n { grad.len() } else { params.len() },
            });
        }
        self.t += 1;
        let c1 = 1.0 - self.beta1.powi(self.t as i32);
        let c2 = 1.0 - self.beta2.powi(self.t as i32);
        for i in 0..n {
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * grad[i];
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * grad[i] * grad[i];
            let m_hat = self.m[i] / c1;
            let v_hat = self.v[i] / c2;
            params[i] -= self.alpha * m_hat / (v_hat.sqrt() + self.eps_adam);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn adam(n: usize) -> AdamState {
        AdamState::new(n, 1e-3, 0.9, 0.99, 1e-8)
    }

    #[test]
    fn zero_gradient_is_a_no_op() {
        let mut a = adam(3);
        let mut p = vec![0.1, -0.2, 0.3];
        for _ in 0..10 {
            a.update(&[0.0; 3], &mut p).unwrap();
        }
        assert_eq!(p, vec![0.1, -0.2, 0.3]);
    }

    #[test]
    fn first_step_moves_by_alpha() {
        let mut a = adam(2);
        let mut p = vec![0.0, 0.0];
        a.update(&[0.5, -3.0], &mut p).unwrap();
        assert!((p[0] + 1e-3 / (1.0 + 1e-8 / 0.5)).abs() < 1e-18);
        assert!((p[1] - 1e-3 / (1.0 + 1e-8 / 3.0)).abs() < 1e-18);
    }

    #[test]
    fn minimizes_a_quadratic() {
        // f(x) = (x - 1)² with the default step size
        let mut a = adam(1);
        let mut x = vec![0.0];
        for _ in 0..5000 {
            let g = 2.0 * (x[0] - 1.0);
            a.update(&[g], &mut x).unwrap();
        }
        assert!((x[0] - 1.0).abs() < 1e-4, "{}", x[0]);
    }

    #[test]
    fn dimension_checked() {
        assert!(adam(2).update(&[1.0], &mut [0.0, 0.0]).is_err());
    }
}
