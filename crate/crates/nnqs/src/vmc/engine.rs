//! The VMC training loop.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use rand::SeedableRng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ansatz::{AnsatzKind, Network, ParamSnapshot, Parameter, DEFAULT_INIT_STD};
use crate::error::{Error, Result};
use crate::hamiltonian::{Configuration, QubitHamiltonian};
use crate::sampler::{derive_seed, run_chain, ChainRng, ChainSamples, InitKind, MoveTable, SamplerConfig, WeightTable};
use crate::sector::{binomial, SectorBasis};
use crate::vmc::adam::AdamState;
use crate::vmc::estimator::{estimate_energy, local_energy, LocalEnergySample, SectorAmplitudes};
use crate::vmc::sr::{build_sr, natural_gradient, DEFAULT_EPSILON, DEFAULT_LAMBDA};

/// Sectors up to this size are tabulated once per iteration.
pub const DEFAULT_TABLE_LIMIT: usize = 1 << 17;

const INIT_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimizerMode {
    /// `θ ← θ - sr_step · d` with `d = (S + εI)⁻¹F`.
    SrOnly,
    /// Adam fed with the plain gradient `F`.
    AdamOnly,
    /// Adam fed with the natural gradient `d`.
    AdamOfSr,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerConfig {
    pub mode: OptimizerMode,
    pub alpha: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps_adam: f64,
    /// Diagonal shift of `S`.
    pub epsilon: f64,
    /// L2 coefficient.
    pub lambda: f64,
    /// Step size of [`OptimizerMode::SrOnly`].
    pub sr_step: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            mode: OptimizerMode::AdamOfSr,
            alpha: 1e-3,
            beta1: 0.9,
            beta2: 0.99,
            eps_adam: 1e-8,
            epsilon: DEFAULT_EPSILON,
            lambda: DEFAULT_LAMBDA,
            sr_step: 0.02,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    /// Metropolis-Hastings samples.
    Sampled,
    /// Exact `|Ψ|²` weights over the enumerated sector.
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChainMode {
    /// One parameter vector trained on the pooled samples of all chains.
    Shared,
    /// Every chain trains its own parameters.
    Independent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VmcConfig {
    pub seed: u64,
    pub iterations: usize,
    /// From this iteration on every chain starts at the Hartree-Fock state.
    pub hf_reinit_at: Option<usize>,
    /// Iterations averaged into the final energy.
    pub final_window: usize,
    pub estimator: Estimator,
    pub chain_mode: ChainMode,
    pub init_std: f64,
    /// Largest sector tabulated per iteration; larger ones use the network directly.
    pub table_limit: usize,
    /// Store a parameter snapshot every this many iterations.
    pub checkpoint_every: Option<usize>,
    pub sampler: SamplerConfig,
    pub optimizer: OptimizerConfig,
}

impl Default for VmcConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            iterations: 1000,
            hf_reinit_at: None,
            final_window: 20,
            estimator: Estimator::Sampled,
            chain_mode: ChainMode::Shared,
            init_std: DEFAULT_INIT_STD,
            table_limit: DEFAULT_TABLE_LIMIT,
            checkpoint_every: None,
            sampler: SamplerConfig::default(),
            optimizer: OptimizerConfig::default(),
        }
    }
}

/// Statistics of one chain at one iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub iteration: usize,
    pub chain: usize,
    pub energy: f64,
    pub stderr: f64,
    pub acceptance_rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub iteration: usize,
    pub replica: usize,
    pub snapshot: ParamSnapshot,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct VmcTrace {
    pub records: Vec<TraceRecord>,
    pub checkpoints: Vec<Checkpoint>,
    pub n_iterations: usize,
}

/// Final energy chosen from a trace: the chain with the lowest mean over the window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FinalEnergy {
    pub chain: usize,
    pub energy: f64,
    pub window: usize,
}

impl VmcTrace {
    pub fn chain_energies(&self, chain: usize) -> Vec<f64> {
        self.records
            .iter()
            .filter(|r| r.chain == chain)
            .map(|r| r.energy)
            .collect()
    }

    /// Lowest energy among chains at each iteration.
    pub fn best_per_iteration(&self) -> Vec<f64> {
        let mut best = vec![f64::INFINITY; self.n_iterations];
        for r in &self.records {
            best[r.iteration] = best[r.iteration].min(r.energy);
        }
        best
    }

    /// Mean of the last `window` iterations of the lowest such chain.
    pub fn final_energy(&self, window: usize) -> Option<FinalEnergy> {
        if self.n_iterations == 0 || window == 0 {
            return None;
        }
        let start = self.n_iterations.saturating_sub(window);
        let mut sums: BTreeMap<usize, (f64, usize)> = BTreeMap::new();
        for r in self.records.iter().filter(|r| r.iteration >= start) {
            let e = sums.entry(r.chain).or_default();
            e.0 += r.energy;
            e.1 += 1;
        }
        sums.into_iter()
            .map(|(chain, (s, n))| FinalEnergy {
                chain,
                energy: s / n as f64,
                window: n,
            })
            .min_by(|a, b| a.energy.total_cmp(&b.energy))
    }

    /// CSV with columns `iteration,chain,energy,stderr,acceptance_rate`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "iteration,chain,energy,stderr,acceptance_rate")?;
        for r in &self.records {
            writeln!(
                out,
                "{},{},{:.12},{:.6e},{:.6}",
                r.iteration, r.chain, r.energy, r.stderr, r.acceptance_rate
            )?;
        }
        Ok(())
    }

    pub fn write_csv_file(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let write = || -> std::io::Result<()> {
            let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
            self.write_csv(&mut f)?;
            f.flush()
        };
        write().map_err(|e| Error::from(e).in_file(path))
    }
}

/// Parameters, optimizer state and the chains that train them.
#[derive(Debug, Clone)]
struct Replica<T: Parameter> {
    net: Network<T>,
    adam: AdamState,
    chains: std::ops::Range<usize>,
}

pub struct Vmc<'h, T: Parameter> {
    h: &'h QubitHamiltonian,
    n_electrons: usize,
    config: VmcConfig,
    basis: Option<SectorBasis>,
    moves: Option<MoveTable>,
    replicas: Vec<Replica<T>>,
    trace: VmcTrace,
}

fn components<T: Parameter>(v: impl IntoIterator<Item = T>) -> Vec<f64> {
    let mut out = Vec::new();
    let mut buf = [0.0; 2];
    for x in v {
        x.write_components(&mut buf[..T::COMPONENTS]);
        out.extend_from_slice(&buf[..T::COMPONENTS]);
    }
    out
}

impl<'h, T: Parameter> Vmc<'h, T> {
    /// Draws initial parameters from the configured normal distribution.
    pub fn new(h: &'h QubitHamiltonian, n_electrons: usize, kind: AnsatzKind, n_hidden: usize, config: VmcConfig) -> Result<Self> {
        let n_replicas = match config.chain_mode {
            ChainMode::Shared => 1,
            ChainMode::Independent => config.sampler.n_chains,
        };
        let nets = (0..n_replicas)
            .map(|r| {
                let mut rng = ChainRng::seed_from_u64(derive_seed(config.seed, &[INIT_STREAM, r as u64]));
                let mut net = Network::<T>::zeros(kind, h.n_qubits(), n_hidden);
                net.randomize(&mut rng, config.init_std);
                net
            })
            .collect();
        Self::build(h, n_electrons, nets, config)
    }

    /// Starts every replica from `net`.
    pub fn with_network(h: &'h QubitHamiltonian, n_electrons: usize, net: Network<T>, config: VmcConfig) -> Result<Self> {
        let n_replicas = match config.chain_mode {
            ChainMode::Shared => 1,
            ChainMode::Independent => config.sampler.n_chains,
        };
        Self::build(h, n_electrons, vec![net; n_replicas], config)
    }

    fn build(h: &'h QubitHamiltonian, n_electrons: usize, nets: Vec<Network<T>>, mut config: VmcConfig) -> Result<Self> {
        let n = h.n_qubits();
        config.sampler.seed = config.seed;
        config.sampler.validate()?;
        if n_electrons > n {
            return Err(Error::Config(format!("{n_electrons} electrons do not fit in {n} qubits")));
        }
        if let Some(net) = nets.iter().find(|net| net.n_visible() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: net.n_visible(),
            });
        }
        let basis = if binomial(n, n_electrons) <= config.table_limit as u128 {
            Some(SectorBasis::new(n, n_electrons, config.table_limit)?)
        } else {
            None
        };
        if config.estimator == Estimator::Exact && basis.is_none() {
            return Err(Error::SectorTooLarge {
                dim: binomial(n, n_electrons),
                limit: config.table_limit,
            });
        }
        let moves = basis.as_ref().map(|b| MoveTable::new(b, config.sampler.move_kind));
        let per_replica = if nets.len() == 1 { config.sampler.n_chains } else { 1 };
        let o = &config.optimizer;
        let replicas = nets
            .into_iter()
            .enumerate()
            .map(|(r, net)| Replica {
                adam: AdamState::new(net.n_params() * T::COMPONENTS, o.alpha, o.beta1, o.beta2, o.eps_adam),
                net,
                chains: r * per_replica..(r + 1) * per_replica,
            })
            .collect();
        Ok(Self {
            h,
            n_electrons,
            config,
            basis,
            moves,
            replicas,
            trace: VmcTrace::default(),
        })
    }

    pub fn config(&self) -> &VmcConfig {
        &self.config
    }

    pub fn trace(&self) -> &VmcTrace {
        &self.trace
    }

    pub fn into_trace(self) -> VmcTrace {
        self.trace
    }

    pub fn iteration(&self) -> usize {
        self.trace.n_iterations
    }

    /// Parameters of replica `r` (always 0 in shared mode).
    pub fn network(&self, r: usize) -> &Network<T> {
        &self.replicas[r].net
    }

    pub fn n_replicas(&self) -> usize {
        self.replicas.len()
    }

    /// The replica that owns `chain`.
    pub fn replica_of(&self, chain: usize) -> usize {
        self.replicas.iter().position(|r| r.chains.contains(&chain)).unwrap_or(0)
    }

    pub fn final_energy(&self) -> Option<FinalEnergy> {
        self.trace.final_energy(self.config.final_window)
    }

    /// Runs the remaining iterations up to `config.iterations`.
    pub fn run(&mut self) -> Result<()> {
        self.run_with(|_| {})
    }

    /// As [`run`](Self::run), calling `observe` after every iteration.
    pub fn run_with(&mut self, mut observe: impl FnMut(&Self)) -> Result<()> {
        while self.iteration() < self.config.iterations {
            self.step()?;
            observe(self);
        }
        Ok(())
    }

    fn init_kind(&self, k: usize) -> InitKind {
        match self.config.hf_reinit_at {
            Some(k0) if k >= k0 => InitKind::HartreeFock,
            _ => self.config.sampler.init_kind,
        }
    }

    /// One iteration: sample, estimate, update. Returns that iteration's records.
    pub fn step(&mut self) -> Result<Vec<TraceRecord>> {
        let k = self.trace.n_iterations;
        let mut records = Vec::new();
        for r in 0..self.replicas.len() {
            let (samples, recs) = self.evaluate(r, k)?;
            if let Some(bad) = recs.iter().find(|rec| !rec.energy.is_finite()) {
                return Err(Error::Numerical(format!(
                    "non-finite energy at iteration {k}, chain {}",
                    bad.chain
                )));
            }
            self.update(r, &samples)?;
            records.extend(recs);
        }
        self.trace.records.extend_from_slice(&records);
        self.trace.n_iterations += 1;
        if let Some(every) = self.config.checkpoint_every {
            if every > 0 && self.trace.n_iterations % every == 0 {
                for (r, rep) in self.replicas.iter().enumerate() {
                    self.trace.checkpoints.push(Checkpoint {
                        iteration: self.trace.n_iterations,
                        replica: r,
                        snapshot: rep.net.snapshot(),
                    });
                }
            }
        }
        Ok(records)
    }

    /// Weighted samples of replica `r` and per-chain statistics.
    fn evaluate(&self, r: usize, k: usize) -> Result<(Vec<LocalEnergySample<T>>, Vec<TraceRecord>)> {
        let rep = &self.replicas[r];
        let net = &rep.net;
        let amps = self.basis.as_ref().map(|b| SectorAmplitudes::new(b, net));
        let n = self.h.n_qubits();

        // (unique configuration → per-chain counts), chain statistics
        let (counts, chain_stats): (BTreeMap<u64, Vec<f64>>, Vec<(usize, f64)>) = match self.config.estimator {
            Estimator::Exact => {
                let amps = amps.as_ref().expect("exact estimator requires a basis");
                let p = amps.probabilities()?;
                let counts = amps
                    .basis
                    .states()
                    .zip(p)
                    .filter(|(_, p)| *p > 0.0)
                    .map(|(x, p)| (x.bits(), vec![p]))
                    .collect();
                (counts, vec![(r, 1.0)])
            }
            Estimator::Sampled => {
                let runs = self.sample_chains(rep, amps.as_ref(), k)?;
                let n_local = runs.len();
                let mut counts: BTreeMap<u64, Vec<f64>> = BTreeMap::new();
                for (c, run) in runs.iter().enumerate() {
                    for s in &run.samples {
                        counts.entry(s.bits()).or_insert_with(|| vec![0.0; n_local])[c] += 1.0;
                    }
                }
                let stats = rep.chains.clone().zip(runs.iter().map(ChainSamples::acceptance_rate)).collect();
                (counts, stats)
            }
        };

        let evaluated: Vec<(u64, T, Vec<T>)> = counts
            .keys()
            .copied()
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|bits| {
                let x = Configuration::new(bits, n);
                let e = match (&amps, amps.as_ref().and_then(|a| a.basis.position(bits))) {
                    (Some(a), Some(i)) => a.local_energy(self.h, net, i)?,
                    _ => local_energy(self.h, net, x)?,
                };
                let mut o = vec![T::zero(); net.n_params()];
                net.log_derivatives(x, &mut o)?;
                Ok((bits, e, o))
            })
            .collect::<Result<_>>()?;

        let mut records = Vec::with_capacity(chain_stats.len());
        for (c, &(chain, acceptance_rate)) in chain_stats.iter().enumerate() {
            let per_chain: Vec<LocalEnergySample<T>> = evaluated
                .iter()
                .zip(counts.values())
                .filter(|(_, w)| w[c] > 0.0)
                .map(|((bits, e, _), w)| LocalEnergySample {
                    config: Configuration::new(*bits, n),
                    weight: w[c],
                    e_loc: *e,
                    o: Vec::new(),
                })
                .collect();
            let (energy, stderr) = estimate_energy(&per_chain)?;
            let stderr = if self.config.estimator == Estimator::Exact { 0.0 } else { stderr };
            records.push(TraceRecord {
                iteration: k,
                chain,
                energy,
                stderr,
                acceptance_rate,
            });
        }

        let samples = evaluated
            .into_iter()
            .zip(counts.into_values())
            .map(|((bits, e_loc, o), w)| LocalEnergySample {
                config: Configuration::new(bits, n),
                weight: w.iter().sum(),
                e_loc,
                o,
            })
            .collect();
        Ok((samples, records))
    }

    fn sample_chains(&self, rep: &Replica<T>, amps: Option<&SectorAmplitudes<'_>>, k: usize) -> Result<Vec<ChainSamples>> {
        let s = &self.config.sampler;
        let n = self.h.n_qubits();
        let init = self.init_kind(k);
        let stride = s.stride_for(n);
        let table = amps.map(|a| {
            let t = WeightTable::from_log_magnitudes(a.basis, &a.log_magnitudes());
            match &self.moves {
                Some(m) => t.with_moves(m),
                None => t,
            }
        });
        rep.chains
            .clone()
            .into_par_iter()
            .map(|c| {
                let seed = derive_seed(self.config.seed, &[k as u64, c as u64]);
                match &table {
                    Some(t) => run_chain(t, n, self.n_electrons, s.n_samples, s.n_thermal, stride, s.move_kind, init, seed),
                    None => run_chain(&rep.net, n, self.n_electrons, s.n_samples, s.n_thermal, stride, s.move_kind, init, seed),
                }
            })
            .collect()
    }

    fn update(&mut self, r: usize, samples: &[LocalEnergySample<T>]) -> Result<()> {
        let o = self.config.optimizer.clone();
        let rep = &mut self.replicas[r];
        let sr = build_sr(samples, &rep.net.penalized_params(), o.epsilon, o.lambda)?;
        match o.mode {
            OptimizerMode::SrOnly => {
                let d = natural_gradient(&sr)?;
                let step = T::lift(o.sr_step);
                for (p, di) in rep.net.params_mut().iter_mut().zip(d.iter()) {
                    *p -= step * *di;
                }
            }
            OptimizerMode::AdamOnly | OptimizerMode::AdamOfSr => {
                let g = if o.mode == OptimizerMode::AdamOnly {
                    components(sr.f.iter().copied())
                } else {
                    components(natural_gradient(&sr)?.iter().copied())
                };
                let mut theta = rep.net.real_components();
                rep.adam.update(&g, &mut theta)?;
                rep.net.set_real_components(&theta)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::TanhFcn;
    use crate::hamiltonian::PauliString;
    use num_complex::Complex64;

    fn toy() -> QubitHamiltonian {
        // Two sites, one electron: hopping with an on-site offset. The sign
        // makes the ground state odd under the global flip, as tanh requires.
        let c = |v| Complex64::new(v, 0.0);
        QubitHamiltonian::new(
            2,
            [
                PauliString::from_label("XX", c(0.5)).unwrap(),
                PauliString::from_label("YY", c(0.5)).unwrap(),
                PauliString::from_label("ZI", c(0.2)).unwrap(),
            ],
        )
        .unwrap()
    }

    fn small_config(iterations: usize) -> VmcConfig {
        VmcConfig {
            iterations,
            init_std: 0.3,
            sampler: SamplerConfig {
                n_samples: 200,
                n_thermal: 50,
                n_chains: 3,
                ..SamplerConfig::default()
            },
            ..VmcConfig::default()
        }
    }

    #[test]
    fn zero_iterations() {
        let h = toy();
        let mut vmc = Vmc::<f64>::new(&h, 1, AnsatzKind::TanhFcn, 2, small_config(0)).unwrap();
        let before = vmc.network(0).clone();
        vmc.run().unwrap();
        assert!(vmc.trace().records.is_empty());
        assert_eq!(vmc.final_energy(), None);
        assert_eq!(vmc.network(0), &before);
    }

    #[test]
    fn records_and_determinism() {
        let h = toy();
        let run = || {
            let mut vmc = Vmc::<f64>::new(&h, 1, AnsatzKind::TanhFcn, 2, small_config(5)).unwrap();
            vmc.run().unwrap();
            vmc.into_trace()
        };
        let a = run();
        assert_eq!(a.n_iterations, 5);
        assert_eq!(a.records.len(), 15);
        assert_eq!(a, run());
        let mut csv = Vec::new();
        a.write_csv(&mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert!(text.starts_with("iteration,chain,energy,stderr,acceptance_rate\n"));
        assert_eq!(text.lines().count(), 16);
    }

    #[test]
    fn final_energy_uses_lowest_chain_window() {
        let mut t = VmcTrace::default();
        for k in 0..30 {
            for (c, base) in [(0, -1.0), (1, -1.1)] {
                t.records.push(TraceRecord {
                    iteration: k,
                    chain: c,
                    energy: base - if k >= 10 { 0.0 } else { 5.0 },
                    stderr: 0.0,
                    acceptance_rate: 0.5,
                });
            }
        }
        t.n_iterations = 30;
        let f = t.final_energy(20).unwrap();
        assert_eq!((f.chain, f.window), (1, 20));
        assert!((f.energy + 1.1).abs() < 1e-12);
    }

    #[test]
    fn exact_estimator_converges_on_toy() {
        let h = toy();
        let config = VmcConfig {
            estimator: Estimator::Exact,
            iterations: 600,
            optimizer: OptimizerConfig {
                alpha: 1e-2,
                lambda: 0.0,
                ..OptimizerConfig::default()
            },
            ..small_config(0)
        };
        let mut vmc = Vmc::<f64>::new(&h, 1, AnsatzKind::TanhFcn, 2, config).unwrap();
        vmc.run().unwrap();
        // Lowest eigenvalue of [[0.2, 1], [1, -0.2]] in the one-electron sector.
        let exact = -(1.0f64 + 0.04).sqrt();
        let e = vmc.final_energy().unwrap().energy;
        assert!((e - exact).abs() < 1e-4, "{e} vs {exact}");
    }

    #[test]
    fn independent_chains_have_own_parameters() {
        let h = toy();
        let config = VmcConfig {
            chain_mode: ChainMode::Independent,
            ..small_config(3)
        };
        let mut vmc = Vmc::<f64>::new(&h, 1, AnsatzKind::TanhFcn, 2, config).unwrap();
        assert_eq!(vmc.n_replicas(), 3);
        assert_ne!(vmc.network(0), vmc.network(1));
        vmc.run().unwrap();
        assert_eq!(vmc.trace().records.len(), 9);
        assert_eq!(vmc.replica_of(2), 2);
    }

    #[test]
    fn hf_reinit_switches_start() {
        let h = toy();
        let config = VmcConfig {
            hf_reinit_at: Some(2),
            ..small_config(0)
        };
        let vmc = Vmc::<f64>::new(&h, 1, AnsatzKind::TanhFcn, 2, config).unwrap();
        assert_eq!(vmc.init_kind(1), InitKind::Random);
        assert_eq!(vmc.init_kind(2), InitKind::HartreeFock);
        assert_eq!(vmc.init_kind(900), InitKind::HartreeFock);
    }

    #[test]
    fn width_mismatch_rejected() {
        let h = toy();
        assert!(Vmc::with_network(&h, 1, TanhFcn::tanh_fcn(3, 1), small_config(1)).is_err());
    }
}
