//! Local energies and Monte Carlo averages.

use num_complex::Complex64;

use crate::ansatz::{Network, Parameter, SignedLogAmplitude};
use crate::error::{Error, Result};
use crate::hamiltonian::{Configuration, QubitHamiltonian};
use crate::sector::SectorBasis;

/// Largest imaginary part of a real-ansatz local energy treated as roundoff.
pub const IMAGINARY_RESIDUE_TOLERANCE: f64 = 1e-8;

/// One (possibly repeated) sample with its local energy and log-derivatives.
///
/// `weight` is a multiplicity for Monte Carlo samples or a probability for
/// exact enumeration.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalEnergySample<T> {
    pub config: Configuration,
    pub weight: f64,
    pub e_loc: T,
    pub o: Vec<T>,
}

fn finish<T: Parameter>(sum: Complex64) -> Result<T> {
    if !(sum.re.is_finite() && sum.im.is_finite()) {
        return Err(Error::Numerical(format!("non-finite local energy {sum}")));
    }
    if T::IS_REAL && sum.im.abs() > IMAGINARY_RESIDUE_TOLERANCE {
        return Err(Error::Numerical(format!(
            "local energy of a real wave function has imaginary part {:e}",
            sum.im
        )));
    }
    Ok(T::from_c64(sum))
}

/// `E_loc(x) = Σ_x' ⟨x|H|x'⟩ Ψ(x')/Ψ(x)` evaluated directly on the network.
pub fn local_energy<T: Parameter>(h: &QubitHamiltonian, net: &Network<T>, x: Configuration) -> Result<T> {
    let act = net.activations(x);
    let psi = net.log_psi_from(&act);
    if psi.is_zero() {
        return Err(Error::ZeroAmplitudeReference);
    }
    let mut moved = act.clone();
    let mut sum = Complex64::new(0.0, 0.0);
    h.for_each_connected(x, |xp, m| {
        moved.visible = act.visible;
        moved.hidden.copy_from_slice(&act.hidden);
        net.update_activations(&mut moved, x, xp);
        // ⟨x|H|x'⟩ = conj ⟨x'|H|x⟩ for Hermitian H
        sum += m.conj() * net.log_psi_from(&moved).ratio_to(&psi);
    });
    finish(sum)
}

/// Signed log-amplitudes of every state of an enumerated sector.
#[derive(Debug, Clone)]
pub struct SectorAmplitudes<'a> {
    pub basis: &'a SectorBasis,
    pub log_psi: Vec<SignedLogAmplitude>,
}

impl<'a> SectorAmplitudes<'a> {
    pub fn new<T: Parameter>(basis: &'a SectorBasis, net: &Network<T>) -> Self {
        Self {
            basis,
            log_psi: basis.states().map(|x| net.log_psi(x)).collect(),
        }
    }

    pub fn log_magnitudes(&self) -> Vec<f64> {
        self.log_psi.iter().map(|l| l.log_magnitude).collect()
    }

    /// Local energy at basis position `i` using tabulated amplitudes.
    ///
    /// Connected states outside the sector fall back to `net`.
    pub fn local_energy<T: Parameter>(&self, h: &QubitHamiltonian, net: &Network<T>, i: usize) -> Result<T> {
        let psi = &self.log_psi[i];
        if psi.is_zero() {
            return Err(Error::ZeroAmplitudeReference);
        }
        let mut sum = Complex64::new(0.0, 0.0);
        h.for_each_connected(self.basis.state(i), |xp, m| {
            let r = match self.basis.position(xp.bits()) {
                Some(j) => self.log_psi[j].ratio_to(psi),
                None => net.log_psi(xp).ratio_to(psi),
            };
            sum += m.conj() * r;
        });
        finish(sum)
    }

    /// `|Ψ|²` normalized over the sector.
    pub fn probabilities(&self) -> Result<Vec<f64>> {
        let max = self
            .log_psi
            .iter()
            .map(|l| l.log_magnitude)
            .fold(f64::NEG_INFINITY, f64::max);
        if max == f64::NEG_INFINITY {
            return Err(Error::Normalization);
        }
        let w: Vec<f64> = self
            .log_psi
            .iter()
            .map(|l| (2.0 * (l.log_magnitude - max)).exp())
            .collect();
        let z: f64 = w.iter().sum();
        Ok(w.into_iter().map(|v| v / z).collect())
    }
}

/// Every sector state with weight `|Ψ|²/Σ|Ψ|²`, its local energy and `O`.
///
/// Zero-amplitude states are dropped since they carry no weight.
pub fn enumerate_samples<T: Parameter>(h: &QubitHamiltonian, net: &Network<T>, basis: &SectorBasis) -> Result<Vec<LocalEnergySample<T>>> {
    let amps = SectorAmplitudes::new(basis, net);
    let p = amps.probabilities()?;
    let mut out = Vec::new();
    for (i, x) in basis.states().enumerate() {
        if p[i] == 0.0 {
            continue;
        }
        let mut o = vec![T::zero(); net.n_params()];
        net.log_derivatives(x, &mut o)?;
        out.push(LocalEnergySample {
            config: x,
            weight: p[i],
            e_loc: amps.local_energy(h, net, i)?,
            o,
        });
    }
    Ok(out)
}

/// Weighted mean and standard error of the real part of `e_loc`.
///
/// With unit weights the standard error is `stdev / √N` using the unbiased
/// sample variance; weights count as multiplicities.
pub fn estimate_energy<T: Parameter>(samples: &[LocalEnergySample<T>]) -> Result<(f64, f64)> {
    let n: f64 = samples.iter().map(|s| s.weight).sum();
    if samples.is_empty() || n <= 0.0 {
        return Err(Error::EmptySampleSet);
    }
    let mean = samples.iter().map(|s| s.weight * s.e_loc.to_c64().re).sum::<f64>() / n;
    if n <= 1.0 {
        return Ok((mean, 0.0));
    }
    let ss: f64 = samples
        .iter()
        .map(|s| s.weight * (s.e_loc.to_c64().re - mean).powi(2))
        .sum();
    Ok((mean, (ss / (n - 1.0) / n).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::TanhFcn;
    use crate::hamiltonian::PauliString;

    fn sample(e: f64) -> LocalEnergySample<f64> {
        LocalEnergySample {
            config: Configuration::empty(1),
            weight: 1.0,
            e_loc: e,
            o: vec![],
        }
    }

    #[test]
    fn energy_statistics() {
        assert_eq!(estimate_energy(&[sample(1.0), sample(3.0)]).unwrap(), (2.0, 1.0));
        assert_eq!(estimate_energy(&vec![sample(-0.5); 7]).unwrap(), (-0.5, 0.0));
        assert!(matches!(estimate_energy::<f64>(&[]), Err(Error::EmptySampleSet)));
    }

    #[test]
    fn weights_act_as_multiplicities() {
        let mut a = sample(1.0);
        a.weight = 3.0;
        let expanded = [sample(1.0), sample(1.0), sample(1.0), sample(5.0)];
        let (m1, s1) = estimate_energy(&[a, sample(5.0)]).unwrap();
        let (m2, s2) = estimate_energy(&expanded).unwrap();
        assert!((m1 - m2).abs() < 1e-15 && (s1 - s2).abs() < 1e-15);
    }

    #[test]
    fn constant_hamiltonian() {
        let h = QubitHamiltonian::new(3, [PauliString::identity(-0.7)]).unwrap();
        let mut net = TanhFcn::tanh_fcn(3, 2);
        net.randomize(&mut rand::thread_rng(), 0.5);
        for b in 0..8 {
            let e = local_energy(&h, &net, Configuration::new(b, 3)).unwrap();
            assert!((e + 0.7).abs() < 1e-14);
        }
    }

    #[test]
    fn flip_with_symmetric_amplitudes() {
        // tanh is odd under a global flip, so a symmetric Ψ needs the RBM with a = 0.
        let mut params = vec![Complex64::new(0.0, 0.0); 3];
        params[1] = Complex64::new(0.4, 0.1);
        let net = crate::ansatz::Rbm::from_params(crate::ansatz::AnsatzKind::Rbm, 1, 1, params).unwrap();
        let h = QubitHamiltonian::new(1, [PauliString::from_label("X", Complex64::new(0.8, 0.0)).unwrap()]).unwrap();
        for b in 0..2 {
            let e = local_energy(&h, &net, Configuration::new(b, 1)).unwrap();
            assert!((e - 0.8).norm() < 1e-14);
        }
    }

    #[test]
    fn zero_reference() {
        let net = TanhFcn::tanh_fcn(2, 1);
        let h = QubitHamiltonian::new(2, [PauliString::identity(1.0)]).unwrap();
        assert!(matches!(
            local_energy(&h, &net, Configuration::empty(2)),
            Err(Error::ZeroAmplitudeReference)
        ));
    }
}
