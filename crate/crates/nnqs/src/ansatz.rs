//! Single-hidden-layer wave functions evaluated in the log domain.
//!
//! Both ansatzes share the hidden layer `∏_i 2cosh(θ_i)` with
//! `θ_i = b_i + Σ_j W_ij x_j` and differ in the visible factor:
//!
//! * tanh-FCN: `Ψ(x) = tanh(Σ_j a_j x_j) · ∏_i 2cosh(θ_i)`, real parameters,
//!   signed real output;
//! * RBM: `Ψ(x) = exp(Σ_j a_j x_j) · ∏_i 2cosh(θ_i)`, complex parameters.
//!
//! Parameters are stored flat in the order `a`, `b`, then `W` row-major
//! (`W[i][j]` at `n_visible + n_hidden + i·n_visible + j`). The same order
//! indexes log-derivatives, the SR matrix and the optimizer state.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;

use nalgebra::ComplexField;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{set_bits, Configuration};

/// Standard deviation of the default zero-mean normal initialization.
pub const DEFAULT_INIT_STD: f64 = 0.01;

/// A logarithm split into magnitude and argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogValue {
    pub log_magnitude: f64,
    pub arg: f64,
}

/// Scalar type of network parameters: `f64` or `Complex64`.
pub trait Parameter:
    ComplexField<RealField = f64> + Copy + Default + Send + Sync + fmt::Debug + 'static
{
    const IS_REAL: bool;
    /// Number of real components (1 or 2).
    const COMPONENTS: usize;

    fn lift(v: f64) -> Self;
    fn to_c64(self) -> Complex64;
    /// Drops the imaginary part when `Self` is real.
    fn from_c64(z: Complex64) -> Self;
    fn log_tanh(self) -> LogValue;
    fn log_2cosh(self) -> LogValue;
    fn log_exp(self) -> LogValue;
    fn write_components(self, out: &mut [f64]);
    fn read_components(inp: &[f64]) -> Self;
    fn sample_normal<R: Rng + ?Sized>(rng: &mut R, std: f64) -> Self;
}

impl Parameter for f64 {
    const IS_REAL: bool = true;
    const COMPONENTS: usize = 1;

    fn lift(v: f64) -> Self {
        v
    }
    fn to_c64(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
    fn from_c64(z: Complex64) -> Self {
        z.re
    }
    fn log_tanh(self) -> LogValue {
        let e = (-2.0 * self.abs()).exp();
        LogValue {
            log_magnitude: (-e).ln_1p() - e.ln_1p(),
            arg: if self < 0.0 { PI } else { 0.0 },
        }
    }
    fn log_2cosh(self) -> LogValue {
        LogValue {
            log_magnitude: self.abs() + (-2.0 * self.abs()).exp().ln_1p(),
            arg: 0.0,
        }
    }
    fn log_exp(self) -> LogValue {
        LogValue {
            log_magnitude: self,
            arg: 0.0,
        }
    }
    fn write_components(self, out: &mut [f64]) {
        out[0] = self;
    }
    fn read_components(inp: &[f64]) -> Self {
        inp[0]
    }
    fn sample_normal<R: Rng + ?Sized>(rng: &mut R, std: f64) -> Self {
        Normal::new(0.0, std).expect("finite std").sample(rng)
    }
}

impl Parameter for Complex64 {
    const IS_REAL: bool = false;
    const COMPONENTS: usize = 2;

    fn lift(v: f64) -> Self {
        Complex64::new(v, 0.0)
    }
    fn to_c64(self) -> Complex64 {
        self
    }
    fn from_c64(z: Complex64) -> Self {
        z
    }
    fn log_tanh(self) -> LogValue {
        // tanh(z) = (1 - e^{-2z}) / (1 + e^{-2z}) with Re z ≥ 0.
        let (z, shift) = if self.re < 0.0 { (-self, PI) } else { (self, 0.0) };
        let e = (-2.0 * z).exp();
        let l = (Complex64::new(1.0, 0.0) - e).ln() - (Complex64::new(1.0, 0.0) + e).ln();
        LogValue {
            log_magnitude: l.re,
            arg: l.im + shift,
        }
    }
    fn log_2cosh(self) -> LogValue {
        let z = if self.re < 0.0 { -self } else { self };
        let l = z + (Complex64::new(1.0, 0.0) + (-2.0 * z).exp()).ln();
        LogValue {
            log_magnitude: l.re,
            arg: l.im,
        }
    }
    fn log_exp(self) -> LogValue {
        LogValue {
            log_magnitude: self.re,
            arg: self.im,
        }
    }
    fn write_components(self, out: &mut [f64]) {
        out[0] = self.re;
        out[1] = self.im;
    }
    fn read_components(inp: &[f64]) -> Self {
        Complex64::new(inp[0], inp[1])
    }
    fn sample_normal<R: Rng + ?Sized>(rng: &mut R, std: f64) -> Self {
        let n = Normal::new(0.0, std).expect("finite std");
        Complex64::new(n.sample(rng), n.sample(rng))
    }
}

/// `Ψ = phase · exp(log_magnitude)`; `log_magnitude = -∞` encodes `Ψ = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedLogAmplitude {
    pub log_magnitude: f64,
    pub phase: Complex64,
}

impl SignedLogAmplitude {
    fn from_parts(log_magnitude: f64, arg: f64, real: bool) -> Self {
        let phase = if real {
            // arg is a multiple of π
            let odd = ((arg / PI).round() as i64).rem_euclid(2) == 1;
            Complex64::new(if odd { -1.0 } else { 1.0 }, 0.0)
        } else {
            Complex64::from_polar(1.0, arg)
        };
        Self {
            log_magnitude,
            phase,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.log_magnitude == f64::NEG_INFINITY
    }

    pub fn value(&self) -> Complex64 {
        if self.is_zero() {
            Complex64::new(0.0, 0.0)
        } else {
            self.phase * self.log_magnitude.exp()
        }
    }

    /// `Ψ(self) / Ψ(reference)`, zero if `self` is zero.
    pub fn ratio_to(&self, reference: &SignedLogAmplitude) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        self.phase * reference.phase.conj() * (self.log_magnitude - reference.log_magnitude).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnsatzKind {
    TanhFcn,
    Rbm,
}

impl fmt::Display for AnsatzKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AnsatzKind::TanhFcn => "tanh_fcn",
            AnsatzKind::Rbm => "rbm",
        })
    }
}

/// Pre-activations for one configuration: `s = Σ a_j x_j` and `θ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Activations<T> {
    pub visible: T,
    pub hidden: Vec<T>,
}

/// A visible/hidden network with flat parameters `θ = {a, b, W}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Network<T> {
    kind: AnsatzKind,
    n_visible: usize,
    n_hidden: usize,
    params: Vec<T>,
}

/// The real tanh-FCN wave function.
pub type TanhFcn = Network<f64>;
/// The complex-parameter RBM baseline.
pub type Rbm = Network<Complex64>;

impl TanhFcn {
    /// All-zero tanh-FCN (its amplitude vanishes everywhere until initialized).
    pub fn tanh_fcn(n_visible: usize, n_hidden: usize) -> Self {
        Network::zeros(AnsatzKind::TanhFcn, n_visible, n_hidden)
    }
}

impl Rbm {
    pub fn rbm(n_visible: usize, n_hidden: usize) -> Self {
        Network::zeros(AnsatzKind::Rbm, n_visible, n_hidden)
    }
}

pub fn parameter_count(n_visible: usize, n_hidden: usize) -> usize {
    n_visible + n_hidden + n_hidden * n_visible
}

impl<T: Parameter> Network<T> {
    pub fn zeros(kind: AnsatzKind, n_visible: usize, n_hidden: usize) -> Self {
        Self {
            kind,
            n_visible,
            n_hidden,
            params: vec![T::zero(); parameter_count(n_visible, n_hidden)],
        }
    }

    pub fn from_params(
        kind: AnsatzKind,
        n_visible: usize,
        n_hidden: usize,
        params: Vec<T>,
    ) -> Result<Self> {
        let expected = parameter_count(n_visible, n_hidden);
        if params.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: params.len(),
            });
        }
        Ok(Self {
            kind,
            n_visible,
            n_hidden,
            params,
        })
    }

    /// Draws every parameter from a zero-mean normal with the given width.
    pub fn randomize<R: Rng + ?Sized>(&mut self, rng: &mut R, std: f64) {
        for p in &mut self.params {
            *p = T::sample_normal(rng, std);
        }
    }

    pub fn kind(&self) -> AnsatzKind {
        self.kind
    }
    pub fn n_visible(&self) -> usize {
        self.n_visible
    }
    pub fn n_hidden(&self) -> usize {
        self.n_hidden
    }
    pub fn n_params(&self) -> usize {
        self.params.len()
    }
    pub fn params(&self) -> &[T] {
        &self.params
    }
    pub fn params_mut(&mut self) -> &mut [T] {
        &mut self.params
    }

    pub fn visible_bias(&self) -> &[T] {
        &self.params[..self.n_visible]
    }
    pub fn hidden_bias(&self) -> &[T] {
        &self.params[self.n_visible..self.n_visible + self.n_hidden]
    }
    /// Row `i` of `W`.
    pub fn weights_row(&self, i: usize) -> &[T] {
        let start = self.n_visible + self.n_hidden + i * self.n_visible;
        &self.params[start..start + self.n_visible]
    }

    fn check(&self, x: Configuration) {
        assert_eq!(
            x.n_qubits(),
            self.n_visible,
            "configuration width does not match the visible layer"
        );
    }

    pub fn activations(&self, x: Configuration) -> Activations<T> {
        self.check(x);
        let spins: Vec<f64> = x.spins().collect();
        let dot = |row: &[T]| {
            row.iter()
                .zip(&spins)
                .fold(T::zero(), |acc, (&w, &s)| if s > 0.0 { acc + w } else { acc - w })
        };
        let visible = dot(self.visible_bias());
        let hidden = (0..self.n_hidden)
            .map(|i| self.hidden_bias()[i] + dot(self.weights_row(i)))
            .collect();
        Activations { visible, hidden }
    }

    /// Moves activations from `from` to `to` touching only flipped spins.
    pub fn update_activations(&self, act: &mut Activations<T>, from: Configuration, to: Configuration) {
        for j in set_bits(from.diff_mask(to)) {
            // x_j goes from +1 to -1 when the orbital becomes occupied.
            let delta = T::lift(if to.is_occupied(j) { -2.0 } else { 2.0 });
            act.visible += self.params[j] * delta;
            for (i, h) in act.hidden.iter_mut().enumerate() {
                *h += self.params[self.n_visible + self.n_hidden + i * self.n_visible + j] * delta;
            }
        }
    }

    pub fn log_psi_from(&self, act: &Activations<T>) -> SignedLogAmplitude {
        let vis = match self.kind {
            AnsatzKind::TanhFcn => act.visible.log_tanh(),
            AnsatzKind::Rbm => act.visible.log_exp(),
        };
        let (mut lm, mut arg) = (vis.log_magnitude, vis.arg);
        for &h in &act.hidden {
            let l = h.log_2cosh();
            lm += l.log_magnitude;
            arg += l.arg;
        }
        SignedLogAmplitude::from_parts(lm, arg, T::IS_REAL)
    }

    pub fn log_psi(&self, x: Configuration) -> SignedLogAmplitude {
        self.log_psi_from(&self.activations(x))
    }

    /// `(log|Ψ(new)| - log|Ψ(old)|, phase(new)/phase(old))`.
    ///
    /// Uses the incremental activation update when at most two spins differ.
    pub fn log_psi_ratio(&self, x_new: Configuration, x_old: Configuration) -> Result<(f64, Complex64)> {
        let act_old = self.activations(x_old);
        let old = self.log_psi_from(&act_old);
        if old.is_zero() {
            return Err(Error::ZeroAmplitudeReference);
        }
        let new = if x_new.diff_mask(x_old).count_ones() <= 2 {
            let mut act = act_old;
            self.update_activations(&mut act, x_old, x_new);
            self.log_psi_from(&act)
        } else {
            self.log_psi(x_new)
        };
        Ok(ratio_parts(&new, &old))
    }

    /// Reference path for [`log_psi_ratio`](Self::log_psi_ratio): two full evaluations.
    pub fn log_psi_ratio_full(&self, x_new: Configuration, x_old: Configuration) -> Result<(f64, Complex64)> {
        let old = self.log_psi(x_old);
        if old.is_zero() {
            return Err(Error::ZeroAmplitudeReference);
        }
        Ok(ratio_parts(&self.log_psi(x_new), &old))
    }

    /// `O_k(x) = ∂ ln Ψ(x) / ∂θ_k` in flat parameter order.
    pub fn log_derivatives(&self, x: Configuration, out: &mut [T]) -> Result<()> {
        let act = self.activations(x);
        self.log_derivatives_from(x, &act, out)
    }

    pub fn log_derivatives_from(&self, x: Configuration, act: &Activations<T>, out: &mut [T]) -> Result<()> {
        if out.len() != self.params.len() {
            return Err(Error::DimensionMismatch {
                expected: self.params.len(),
                found: out.len(),
            });
        }
        let d_visible = match self.kind {
            AnsatzKind::TanhFcn => {
                if act.visible == T::zero() {
                    return Err(Error::ZeroAmplitude);
                }
                // (1 - tanh²s) / tanh s = 2 / sinh 2s
                T::lift(2.0) / (act.visible * T::lift(2.0)).sinh()
            }
            AnsatzKind::Rbm => T::one(),
        };
        let (nv, nh) = (self.n_visible, self.n_hidden);
        for j in 0..nv {
            out[j] = if x.is_occupied(j) { -d_visible } else { d_visible };
        }
        for i in 0..nh {
            let t = act.hidden[i].tanh();
            out[nv + i] = t;
            let row = &mut out[nv + nh + i * nv..nv + nh + (i + 1) * nv];
            for (j, o) in row.iter_mut().enumerate() {
                *o = if x.is_occupied(j) { -t } else { t };
            }
        }
        Ok(())
    }

    /// Parameters seen by the L2 penalty.
    ///
    /// The tanh-FCN visible biases are zeroed. While they are small `Ψ` is
    /// nearly proportional to their overall scale, which the energy ignores,
    /// so a penalty would shrink them towards `Ψ = 0`.
    pub fn penalized_params(&self) -> Vec<T> {
        let mut p = self.params.clone();
        if self.kind == AnsatzKind::TanhFcn {
            p[..self.n_visible].fill(T::zero());
        }
        p
    }

    /// Flat real components (`re, im` interleaved for complex parameters).
    pub fn real_components(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.params.len() * T::COMPONENTS];
        for (p, chunk) in self.params.iter().zip(out.chunks_mut(T::COMPONENTS)) {
            p.write_components(chunk);
        }
        out
    }

    pub fn set_real_components(&mut self, values: &[f64]) -> Result<()> {
        let expected = self.params.len() * T::COMPONENTS;
        if values.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: values.len(),
            });
        }
        for (p, chunk) in self.params.iter_mut().zip(values.chunks(T::COMPONENTS)) {
            *p = T::read_components(chunk);
        }
        Ok(())
    }

    pub fn snapshot(&self) -> ParamSnapshot {
        ParamSnapshot {
            kind: self.kind,
            n_visible: self.n_visible,
            n_hidden: self.n_hidden,
            complex: !T::IS_REAL,
            values: self.real_components(),
        }
    }

    pub fn from_snapshot(snap: &ParamSnapshot) -> Result<Self> {
        if snap.complex == T::IS_REAL {
            return Err(Error::Config(format!(
                "snapshot holds {} parameters",
                if snap.complex { "complex" } else { "real" }
            )));
        }
        let mut net = Self::zeros(snap.kind, snap.n_visible, snap.n_hidden);
        net.set_real_components(&snap.values)?;
        Ok(net)
    }
}

fn ratio_parts(new: &SignedLogAmplitude, old: &SignedLogAmplitude) -> (f64, Complex64) {
    if new.is_zero() {
        return (f64::NEG_INFINITY, Complex64::new(1.0, 0.0));
    }
    (
        new.log_magnitude - old.log_magnitude,
        new.phase * old.phase.conj(),
    )
}

/// Checkpoint format: `{kind, n_visible, n_hidden, complex, values}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamSnapshot {
    pub kind: AnsatzKind,
    pub n_visible: usize,
    pub n_hidden: usize,
    pub complex: bool,
    pub values: Vec<f64>,
}

impl ParamSnapshot {
    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, serde_json::to_string(self)? + "\n").map_err(|e| Error::from(e).in_file(path))
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::from(e).in_file(path))?;
        serde_json::from_str(&text).map_err(|e| Error::from(e).in_file(path))
    }
}

/// Either ansatz behind one type, for drivers that pick the kind at runtime.
#[derive(Debug, Clone, PartialEq)]
pub enum AnsatzParams {
    TanhFcn(TanhFcn),
    Rbm(Rbm),
}

impl AnsatzParams {
    pub fn new<R: Rng + ?Sized>(kind: AnsatzKind, n_visible: usize, n_hidden: usize, init_std: f64, rng: &mut R) -> Self {
        match kind {
            AnsatzKind::TanhFcn => {
                let mut n = TanhFcn::tanh_fcn(n_visible, n_hidden);
                n.randomize(rng, init_std);
                AnsatzParams::TanhFcn(n)
            }
            AnsatzKind::Rbm => {
                let mut n = Rbm::rbm(n_visible, n_hidden);
                n.randomize(rng, init_std);
                AnsatzParams::Rbm(n)
            }
        }
    }

    pub fn kind(&self) -> AnsatzKind {
        match self {
            AnsatzParams::TanhFcn(n) => n.kind(),
            AnsatzParams::Rbm(n) => n.kind(),
        }
    }

    pub fn log_psi(&self, x: Configuration) -> SignedLogAmplitude {
        match self {
            AnsatzParams::TanhFcn(n) => n.log_psi(x),
            AnsatzParams::Rbm(n) => n.log_psi(x),
        }
    }

    pub fn snapshot(&self) -> ParamSnapshot {
        match self {
            AnsatzParams::TanhFcn(n) => n.snapshot(),
            AnsatzParams::Rbm(n) => n.snapshot(),
        }
    }

    pub fn from_snapshot(snap: &ParamSnapshot) -> Result<Self> {
        Ok(if snap.complex {
            AnsatzParams::Rbm(Rbm::from_snapshot(snap)?)
        } else {
            AnsatzParams::TanhFcn(TanhFcn::from_snapshot(snap)?)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_xoshiro::Xoshiro256PlusPlus;

    fn cfg(s: &str) -> Configuration {
        Configuration::from_bitstring(s).unwrap()
    }

    #[test]
    fn single_unit_closed_form() {
        let net = TanhFcn::from_params(AnsatzKind::TanhFcn, 1, 1, vec![1.0, 0.0, 0.0]).unwrap();
        let up = net.log_psi(cfg("0")).value();
        let down = net.log_psi(cfg("1")).value();
        let expected = 1f64.tanh() * 2.0;
        assert!((up.re - expected).abs() < 1e-15);
        assert!((up.re - 1.5231883119115297).abs() < 1e-12);
        assert!((down.re + expected).abs() < 1e-15);
        assert_eq!(up.im, 0.0);
    }

    #[test]
    fn orthogonal_visible_bias_gives_zero() {
        let net = TanhFcn::from_params(AnsatzKind::TanhFcn, 2, 1, vec![1.0, 1.0, 0.3, 0.2, -0.1]).unwrap();
        let amp = net.log_psi(cfg("10"));
        assert_eq!(amp.log_magnitude, f64::NEG_INFINITY);
        assert_eq!(amp.value(), Complex64::new(0.0, 0.0));
        assert!(matches!(
            net.log_derivatives(cfg("10"), &mut [0.0; 5]),
            Err(Error::ZeroAmplitude)
        ));
        assert!(matches!(
            net.log_psi_ratio(cfg("00"), cfg("01")),
            Err(Error::ZeroAmplitudeReference)
        ));
    }

    #[test]
    fn identity_ratio() {
        let mut net = TanhFcn::tanh_fcn(4, 3);
        net.randomize(&mut Xoshiro256PlusPlus::seed_from_u64(1), 0.5);
        let x = cfg("1010");
        let (l, p) = net.log_psi_ratio(x, x).unwrap();
        assert_eq!(l, 0.0);
        assert_eq!(p, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn swap_with_equal_visible_bias_leaves_tanh_factor() {
        // a_0 = a_1 makes s invariant under the swap 100 → 010.
        let net = TanhFcn::from_params(AnsatzKind::TanhFcn, 3, 0, vec![1.0, 1.0, 0.5]).unwrap();
        let (l, p) = net.log_psi_ratio(cfg("010"), cfg("100")).unwrap();
        assert_eq!(l, 0.0);
        assert_eq!(p.re, 1.0);
    }

    #[test]
    fn derivative_closed_forms() {
        let net = TanhFcn::from_params(AnsatzKind::TanhFcn, 1, 2, vec![1.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        let mut o = vec![0.0; 5];
        net.log_derivatives(cfg("0"), &mut o).unwrap();
        let t = 1f64.tanh();
        assert!((o[0] - (1.0 - t * t) / t).abs() < 1e-15);
        assert!((o[0] - 0.5514411295435665).abs() < 1e-15);
        assert_eq!(&o[1..], &[0.0; 4]);
    }

    #[test]
    fn rbm_visible_derivative_is_spin() {
        let mut net = Rbm::rbm(3, 2);
        net.randomize(&mut Xoshiro256PlusPlus::seed_from_u64(3), 0.3);
        let mut o = vec![Complex64::new(0.0, 0.0); net.n_params()];
        net.log_derivatives(cfg("101"), &mut o).unwrap();
        assert_eq!(o[0], Complex64::new(-1.0, 0.0));
        assert_eq!(o[1], Complex64::new(1.0, 0.0));
        assert_eq!(o[2], Complex64::new(-1.0, 0.0));
    }

    #[test]
    fn penalty_skips_tanh_visible_biases_only() {
        let params: Vec<f64> = (1..=8).map(f64::from).collect();
        let tanh = TanhFcn::from_params(AnsatzKind::TanhFcn, 2, 2, params.clone()).unwrap();
        assert_eq!(tanh.penalized_params(), [0.0, 0.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0]);
        let rbm = Rbm::from_params(AnsatzKind::Rbm, 2, 2, params.iter().map(|&v| Complex64::new(v, -v)).collect()).unwrap();
        assert_eq!(rbm.penalized_params(), rbm.params());
    }

    #[test]
    fn snapshot_round_trip() {
        let mut rng = Xoshiro256PlusPlus::seed_from_u64(9);
        let mut net = Rbm::rbm(4, 2);
        net.randomize(&mut rng, 0.1);
        let snap = net.snapshot();
        assert_eq!(snap.values.len(), 2 * net.n_params());
        let text = serde_json::to_string(&snap).unwrap();
        let back = AnsatzParams::from_snapshot(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, AnsatzParams::Rbm(net));
        assert!(TanhFcn::from_snapshot(&snap).is_err());
    }

    #[test]
    fn large_activations_do_not_overflow() {
        let n_h = 120;
        let mut params = vec![0.0; parameter_count(4, n_h)];
        params[0] = 0.5;
        for p in &mut params[4..] {
            *p = 30.0;
        }
        let net = TanhFcn::from_params(AnsatzKind::TanhFcn, 4, n_h, params).unwrap();
        let amp = net.log_psi(cfg("0000"));
        assert!(amp.log_magnitude.is_finite());
        assert!(amp.log_magnitude > 700.0 * 20.0);
    }
}
