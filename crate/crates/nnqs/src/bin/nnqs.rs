use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nnqs::ansatz::AnsatzKind;
use nnqs::driver::{self, HamiltonianSource, RunConfig};
use nnqs::exact::SECTOR_LIMIT;
use nnqs::{Error, Result};

/// Neural-network quantum states for molecular Hamiltonians.
///
/// Set NNQS_THREADS to fix the worker thread count.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Map an FCIDUMP file to a Pauli-string JSON file.
    Jw {
        fcidump: PathBuf,
        #[arg(short, long, default_value = "hamiltonian.json")]
        output: PathBuf,
    },
    /// Exact ground energy in the electron-number sector.
    Exact {
        #[command(flatten)]
        source: SourceArgs,
        /// Diagonalize the full Hilbert space instead of the sector.
        #[arg(long)]
        full_space: bool,
        #[arg(long, default_value_t = SECTOR_LIMIT)]
        limit: usize,
    },
    /// Train a network wave function with VMC.
    Vmc {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Run VMC over a manifest of geometries and write a scan CSV.
    Pes {
        /// JSON list of {"bond_length": .., "path": ..}.
        #[arg(long)]
        manifest: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Args)]
struct SourceArgs {
    #[arg(long)]
    fcidump: Option<PathBuf>,
    #[arg(long)]
    pauli_json: Option<PathBuf>,
    #[arg(long)]
    n_electrons: Option<usize>,
    /// Molecule name for reference-energy lookup.
    #[arg(long)]
    molecule: Option<String>,
}

impl SourceArgs {
    fn apply(&self, s: &mut HamiltonianSource) {
        if self.fcidump.is_some() || self.pauli_json.is_some() {
            s.fcidump = self.fcidump.clone();
            s.pauli_json = self.pauli_json.clone();
        }
        if self.n_electrons.is_some() {
            s.n_electrons = self.n_electrons;
        }
        if self.molecule.is_some() {
            s.molecule = self.molecule.clone();
        }
    }
}

/// Flags override values from the config file.
#[derive(Args)]
struct RunArgs {
    /// TOML run configuration.
    #[arg(short, long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    source: SourceArgs,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    iterations: Option<usize>,
    #[arg(long, value_parser = parse_kind)]
    ansatz: Option<AnsatzKind>,
    #[arg(long)]
    hidden_ratio: Option<f64>,
    #[arg(long)]
    n_hidden: Option<usize>,
    #[arg(long)]
    n_samples: Option<usize>,
    #[arg(long)]
    n_chains: Option<usize>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    hf_reinit_at: Option<usize>,
    #[arg(short, long)]
    output_dir: Option<PathBuf>,
}

fn parse_kind(s: &str) -> std::result::Result<AnsatzKind, String> {
    match s {
        "tanh_fcn" | "tanh-fcn" => Ok(AnsatzKind::TanhFcn),
        "rbm" => Ok(AnsatzKind::Rbm),
        _ => Err(format!("unknown ansatz `{s}` (expected tanh_fcn or rbm)")),
    }
}

impl RunArgs {
    fn merge(&self) -> Result<RunConfig> {
        let mut c = match &self.config {
            Some(p) => RunConfig::read(p)?,
            None => RunConfig::default(),
        };
        self.source.apply(&mut c.hamiltonian);
        macro_rules! set {
            ($flag:expr, $field:expr) => {
                if let Some(v) = $flag.clone() {
                    $field = v;
                }
            };
        }
        set!(self.seed, c.seed);
        set!(self.iterations, c.schedule.iterations);
        set!(self.ansatz, c.ansatz.kind);
        set!(self.hidden_ratio, c.ansatz.hidden_ratio);
        set!(self.n_samples, c.sampler.n_samples);
        set!(self.n_chains, c.sampler.n_chains);
        set!(self.lambda, c.optimizer.lambda);
        set!(self.output_dir, c.output_dir);
        if self.n_hidden.is_some() {
            c.ansatz.n_hidden = self.n_hidden;
        }
        if self.hf_reinit_at.is_some() {
            c.schedule.hf_reinit_at = self.hf_reinit_at;
        }
        Ok(c)
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Jw { fcidump, output } => {
            let s = driver::cmd_jw(&fcidump, &output)?;
            println!("{} qubits, {} terms -> {}", s.n_qubits, s.n_terms, output.display());
        }
        Command::Exact {
            source,
            full_space,
            limit,
        } => {
            let mut s = HamiltonianSource::default();
            source.apply(&mut s);
            let summary = driver::cmd_exact(&s, full_space, limit).map_err(|e| {
                if matches!(e.root(), Error::SectorTooLarge { .. }) {
                    eprintln!("hint: the sector is beyond exact diagonalization; use `nnqs vmc` instead");
                }
                e
            })?;
            println!("{}", serde_json::to_string_pretty(&summary)?);
        }
        Command::Vmc { run } => {
            let cfg = run.merge()?;
            cfg.validate()?;
            let outcome = driver::run_vmc(&cfg, true)?;
            println!("{}", serde_json::to_string_pretty(&outcome.summary)?);
        }
        Command::Pes { manifest, run } => {
            // each manifest entry supplies its own FCIDUMP
            let cfg = run.merge()?;
            cfg.sampler.validate()?;
            cfg.ansatz.hidden_units(1)?;
            let entries = driver::read_manifest(&manifest)?;
            let rows = driver::cmd_pes(&entries, &cfg, true);
            std::fs::create_dir_all(&cfg.output_dir).map_err(|e| Error::from(e).in_file(&cfg.output_dir))?;
            let path = cfg.output_dir.join("pes.csv");
            let csv = driver::pes_csv(&rows);
            std::fs::write(&path, &csv).map_err(|e| Error::from(e).in_file(&path))?;
            print!("{csv}");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    if let Some(n) = std::env::var("NNQS_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::warn!("could not set thread count: {e}");
        }
    }
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(driver::exit_code(&e) as u8)
        }
    }
}
