//! Batch runs: configuration files, subcommand bodies and their outputs.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ansatz::{AnsatzKind, Network, Parameter};
use crate::error::{Error, Result};
use crate::exact::{ground_energy, hamiltonian_matrix, SECTOR_LIMIT};
use crate::hamiltonian::{molecular_hamiltonian, IntegralTable, QubitHamiltonian};
use crate::reference;
use crate::sampler::{SamplerConfig, NON_ERGODIC_ACCEPTANCE};
use crate::sector::{binomial, SectorBasis};
use crate::vmc::{ChainMode, Estimator, OptimizerConfig, Vmc, VmcConfig, VmcTrace, DEFAULT_TABLE_LIMIT};

/// Process exit status for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err.root() {
        Error::SectorTooLarge { .. } => 4,
        Error::Numerical(_)
        | Error::SingularSystem
        | Error::ConvergenceFailure(_)
        | Error::ZeroAmplitude
        | Error::ZeroAmplitudeReference
        | Error::Normalization
        | Error::EmptySampleSet
        | Error::DegenerateConfiguration => 3,
        _ => 2,
    }
}

/// Where the Hamiltonian comes from. Exactly one of `fcidump` and
/// `pauli_json` must be set; `n_electrons` is required with `pauli_json`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HamiltonianSource {
    pub fcidump: Option<PathBuf>,
    pub pauli_json: Option<PathBuf>,
    pub n_electrons: Option<usize>,
    /// Name used to look up published reference energies.
    pub molecule: Option<String>,
    /// Overrides the looked-up FCI reference.
    pub reference_energy: Option<f64>,
}

/// A loaded Hamiltonian with its particle number.
#[derive(Debug, Clone)]
pub struct LoadedHamiltonian {
    pub hamiltonian: QubitHamiltonian,
    pub n_electrons: usize,
    pub table: Option<IntegralTable>,
}

impl HamiltonianSource {
    pub fn from_fcidump(path: impl Into<PathBuf>) -> Self {
        Self {
            fcidump: Some(path.into()),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        match (&self.fcidump, &self.pauli_json) {
            (Some(_), Some(_)) => Err(Error::Config("set only one of fcidump and pauli_json".into())),
            (None, None) => Err(Error::Config("no Hamiltonian source: set fcidump or pauli_json".into())),
            (None, Some(_)) if self.n_electrons.is_none() => {
                Err(Error::Config("n_electrons is required with pauli_json".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn load(&self) -> Result<LoadedHamiltonian> {
        self.validate()?;
        if let Some(path) = &self.fcidump {
            let table = IntegralTable::read(path)?;
            let hamiltonian = molecular_hamiltonian(&table).map_err(|e| e.in_file(path))?;
            Ok(LoadedHamiltonian {
                hamiltonian,
                n_electrons: self.n_electrons.unwrap_or(table.n_electrons),
                table: Some(table),
            })
        } else {
            let path = self.pauli_json.as_ref().expect("validated");
            Ok(LoadedHamiltonian {
                hamiltonian: QubitHamiltonian::read_json(path)?,
                n_electrons: self.n_electrons.expect("validated"),
                table: None,
            })
        }
    }

    /// Explicit reference, else the FCI value for `molecule`.
    pub fn reference(&self) -> Option<f64> {
        self.reference_energy
            .or_else(|| self.molecule.as_deref().and_then(reference::lookup).map(|r| r.fci))
    }

    fn resolve(&mut self, base: &Path) {
        for p in [&mut self.fcidump, &mut self.pauli_json].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnsatzConfig {
    pub kind: AnsatzKind,
    /// `N_h / N_v`; ignored when `n_hidden` is set.
    pub hidden_ratio: f64,
    pub n_hidden: Option<usize>,
}

impl Default for AnsatzConfig {
    fn default() -> Self {
        Self {
            kind: AnsatzKind::TanhFcn,
            hidden_ratio: 2.0,
            n_hidden: None,
        }
    }
}

impl AnsatzConfig {
    pub fn hidden_units(&self, n_visible: usize) -> Result<usize> {
        match self.n_hidden {
            Some(n) => Ok(n),
            None if self.hidden_ratio > 0.0 && self.hidden_ratio.is_finite() => {
                Ok(((self.hidden_ratio * n_visible as f64).round() as usize).max(1))
            }
            None => Err(Error::Config("hidden_ratio must be positive".into())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScheduleConfig {
    pub iterations: usize,
    pub hf_reinit_at: Option<usize>,
    pub final_window: usize,
    pub estimator: Estimator,
    pub chain_mode: ChainMode,
    pub init_std: f64,
    pub table_limit: usize,
    pub checkpoint_every: Option<usize>,
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        let v = VmcConfig::default();
        Self {
            iterations: v.iterations,
            hf_reinit_at: v.hf_reinit_at,
            final_window: v.final_window,
            estimator: v.estimator,
            chain_mode: v.chain_mode,
            init_std: v.init_std,
            table_limit: DEFAULT_TABLE_LIMIT,
            checkpoint_every: Some(50),
        }
    }
}

/// Everything a `vmc` or `pes` run needs; echoed into the summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub output_dir: PathBuf,
    pub hamiltonian: HamiltonianSource,
    pub ansatz: AnsatzConfig,
    pub sampler: SamplerConfig,
    pub optimizer: OptimizerConfig,
    pub schedule: ScheduleConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            output_dir: PathBuf::from("nnqs-out"),
            hamiltonian: HamiltonianSource::default(),
            ansatz: AnsatzConfig::default(),
            sampler: SamplerConfig::default(),
            optimizer: OptimizerConfig::default(),
            schedule: ScheduleConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Reads a TOML file; relative Hamiltonian paths resolve against its directory.
    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::from(e).in_file(path))?;
        let mut cfg = Self::from_toml(&text).map_err(|e| e.in_file(path))?;
        cfg.hamiltonian.resolve(path.parent().unwrap_or(Path::new(".")));
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn vmc_config(&self) -> VmcConfig {
        let s = &self.schedule;
        VmcConfig {
            seed: self.seed,
            iterations: s.iterations,
            hf_reinit_at: s.hf_reinit_at,
            final_window: s.final_window,
            estimator: s.estimator,
            chain_mode: s.chain_mode,
            init_std: s.init_std,
            table_limit: s.table_limit,
            checkpoint_every: s.checkpoint_every,
            sampler: self.sampler.clone(),
            optimizer: self.optimizer.clone(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.hamiltonian.validate()?;
        self.sampler.validate()?;
        self.ansatz.hidden_units(1)?;
        Ok(())
    }
}

/// Output of `jw`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JwSummary {
    pub n_qubits: usize,
    pub n_terms: usize,
}

/// Maps an FCIDUMP file to a Pauli JSON file.
pub fn cmd_jw(fcidump: &Path, out: &Path) -> Result<JwSummary> {
    let table = IntegralTable::read(fcidump)?;
    let h = molecular_hamiltonian(&table).map_err(|e| e.in_file(fcidump))?;
    h.write_json(out)?;
    Ok(JwSummary {
        n_qubits: h.n_qubits(),
        n_terms: h.len(),
    })
}

/// Output of `exact`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactSummary {
    pub molecule: Option<String>,
    pub n_qubits: usize,
    /// Electron number of the sector, `None` for the full space.
    pub sector: Option<usize>,
    pub dimension: usize,
    pub ground_energy_hartree: f64,
}

/// Lowest eigenvalue in the particle sector, or the full space with `full_space`.
pub fn cmd_exact(source: &HamiltonianSource, full_space: bool, limit: usize) -> Result<ExactSummary> {
    let loaded = source.load()?;
    let n = loaded.hamiltonian.n_qubits();
    let basis = if full_space {
        SectorBasis::full(n, limit)?
    } else {
        SectorBasis::new(n, loaded.n_electrons, limit)?
    };
    let m = hamiltonian_matrix(&loaded.hamiltonian, &basis)?;
    Ok(ExactSummary {
        molecule: source.molecule.clone(),
        n_qubits: n,
        sector: (!full_space).then_some(loaded.n_electrons),
        dimension: basis.len(),
        ground_energy_hartree: ground_energy(&m)?,
    })
}

/// Sector ground energy when the sector is small enough, else `None`.
pub fn exact_reference(h: &QubitHamiltonian, n_electrons: usize) -> Result<Option<f64>> {
    if binomial(h.n_qubits(), n_electrons) > SECTOR_LIMIT as u128 {
        return Ok(None);
    }
    let basis = SectorBasis::new(h.n_qubits(), n_electrons, SECTOR_LIMIT)?;
    ground_energy(&hamiltonian_matrix(h, &basis)?).map(Some)
}

/// Output of `vmc`: the final energy, comparisons and the resolved config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VmcSummary {
    pub n_qubits: usize,
    pub n_electrons: usize,
    pub n_hidden: usize,
    pub n_params: usize,
    pub iterations_completed: usize,
    pub final_energy: Option<f64>,
    pub final_chain: Option<usize>,
    pub final_window: Option<usize>,
    pub reference_energy: Option<f64>,
    pub absolute_error: Option<f64>,
    pub exact_energy: Option<f64>,
    pub error_vs_exact: Option<f64>,
    pub config: RunConfig,
}

/// Result of a VMC run kept in memory.
#[derive(Debug, Clone)]
pub struct VmcOutcome {
    pub summary: VmcSummary,
    pub trace: VmcTrace,
}

/// Trains the configured ansatz and writes `trace.csv`, `summary.json` and
/// `params.json` into `output_dir` when `write` is set.
pub fn run_vmc(config: &RunConfig, write: bool) -> Result<VmcOutcome> {
    config.validate()?;
    let loaded = config.hamiltonian.load()?;
    match config.ansatz.kind {
        AnsatzKind::TanhFcn => run_vmc_typed::<f64>(config, &loaded, write),
        AnsatzKind::Rbm => run_vmc_typed::<Complex64>(config, &loaded, write),
    }
}

fn run_vmc_typed<T: Parameter>(config: &RunConfig, loaded: &LoadedHamiltonian, write: bool) -> Result<VmcOutcome> {
    let h = &loaded.hamiltonian;
    let n = h.n_qubits();
    let n_hidden = config.ansatz.hidden_units(n)?;
    let mut vmc = Vmc::<T>::new(h, loaded.n_electrons, config.ansatz.kind, n_hidden, config.vmc_config())?;
    let out = &config.output_dir;
    if write {
        std::fs::create_dir_all(out).map_err(|e| Error::from(e).in_file(out))?;
    }
    let save_params = |net: &Network<T>| -> Result<()> {
        if write {
            net.snapshot().write(out.join("params.json"))?;
        }
        Ok(())
    };
    save_params(vmc.network(0))?;
    let result = vmc.run_with(|v| {
        let k = v.iteration();
        if k % 50 == 0 || k == v.config().iterations {
            let latest = v.trace().records.iter().rev().take_while(|r| r.iteration + 1 == k);
            let (e, acc) = latest.fold((f64::INFINITY, f64::INFINITY), |(e, a), r| {
                (e.min(r.energy), a.min(r.acceptance_rate))
            });
            if e.is_finite() {
                log::info!("iteration {k}: lowest chain energy {e:.8}, lowest acceptance {acc:.4}");
            }
            if acc < NON_ERGODIC_ACCEPTANCE {
                log::warn!("iteration {k}: a chain accepts fewer than {NON_ERGODIC_ACCEPTANCE} of its moves");
            }
        }
    });
    // On failure the network still holds the last successful update.
    let best = vmc.final_energy().map_or(0, |f| vmc.replica_of(f.chain));
    save_params(vmc.network(best))?;
    if write {
        vmc.trace().write_csv_file(out.join("trace.csv"))?;
        let dir = out.join("checkpoints");
        for c in &vmc.trace().checkpoints {
            std::fs::create_dir_all(&dir).map_err(|e| Error::from(e).in_file(&dir))?;
            c.snapshot.write(dir.join(format!("iter{:05}_replica{}.json", c.iteration, c.replica)))?;
        }
    }
    if let Err(e) = result {
        log::error!("run aborted after {} iterations: {e}", vmc.iteration());
        return Err(e);
    }
    let final_energy = vmc.final_energy();
    let reference_energy = config.hamiltonian.reference();
    let exact_energy = if config.schedule.table_limit > 0 {
        exact_reference(h, loaded.n_electrons)?
    } else {
        None
    };
    let summary = VmcSummary {
        n_qubits: n,
        n_electrons: loaded.n_electrons,
        n_hidden,
        n_params: vmc.network(0).n_params() * T::COMPONENTS,
        iterations_completed: vmc.iteration(),
        final_energy: final_energy.map(|f| f.energy),
        final_chain: final_energy.map(|f| f.chain),
        final_window: final_energy.map(|f| f.window),
        reference_energy,
        absolute_error: final_energy.zip(reference_energy).map(|(f, r)| (f.energy - r).abs()),
        exact_energy,
        error_vs_exact: final_energy.zip(exact_energy).map(|(f, r)| (f.energy - r).abs()),
        config: config.clone(),
    };
    if write {
        let path = out.join("summary.json");
        std::fs::write(&path, serde_json::to_string_pretty(&summary)? + "\n").map_err(|e| Error::from(e).in_file(&path))?;
    }
    Ok(VmcOutcome {
        summary,
        trace: vmc.into_trace(),
    })
}

/// One geometry of a potential-energy scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub bond_length: f64,
    pub path: PathBuf,
}

pub fn read_manifest(path: impl AsRef<Path>) -> Result<Vec<ManifestEntry>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::from(e).in_file(path))?;
    let mut entries: Vec<ManifestEntry> = serde_json::from_str(&text).map_err(|e| Error::from(e).in_file(path))?;
    let base = path.parent().unwrap_or(Path::new("."));
    for e in &mut entries {
        if e.path.is_relative() {
            e.path = base.join(&e.path);
        }
    }
    Ok(entries)
}

/// One row of the scan CSV. Failed geometries keep `NaN` energies and the error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PesRow {
    pub bond_length: f64,
    pub vmc_energy: f64,
    pub exact_energy: f64,
    pub status: String,
}

/// Runs VMC on every geometry with the shared config. Each geometry writes
/// into its own subdirectory of `output_dir`.
pub fn cmd_pes(manifest: &[ManifestEntry], config: &RunConfig, write: bool) -> Vec<PesRow> {
    manifest
        .iter()
        .map(|entry| {
            let mut cfg = config.clone();
            cfg.hamiltonian = HamiltonianSource {
                fcidump: Some(entry.path.clone()),
                ..config.hamiltonian.clone()
            };
            cfg.hamiltonian.pauli_json = None;
            cfg.output_dir = config.output_dir.join(format!("r_{:.4}", entry.bond_length));
            let row = run_vmc(&cfg, write).map(|o| (o.summary.final_energy, o.summary.exact_energy));
            match row {
                Ok((v, e)) => PesRow {
                    bond_length: entry.bond_length,
                    vmc_energy: v.unwrap_or(f64::NAN),
                    exact_energy: e.unwrap_or(f64::NAN),
                    status: "ok".into(),
                },
                Err(err) => {
                    log::error!("geometry {}: {err}", entry.bond_length);
                    PesRow {
                        bond_length: entry.bond_length,
                        vmc_energy: f64::NAN,
                        exact_energy: f64::NAN,
                        status: err.to_string().replace([',', '\n'], ";"),
                    }
                }
            }
        })
        .collect()
}

/// CSV with columns `bond_length,vmc_energy,exact_energy,status`.
pub fn pes_csv(rows: &[PesRow]) -> String {
    let mut s = String::from("bond_length,vmc_energy,exact_energy,status\n");
    for r in rows {
        s += &format!("{:.4},{:.10},{:.10},{}\n", r.bond_length, r.vmc_energy, r.exact_energy, r.status);
    }
    s
}
