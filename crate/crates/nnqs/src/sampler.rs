//! Metropolis-Hastings sampling of `|Ψ(x)|²` with particle-conserving moves.

use std::io::Write;
use std::path::Path;

use rand::distributions::{Distribution, Uniform};
use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::{Deserialize, Serialize};

use crate::ansatz::{Activations, Network, Parameter};
use crate::error::{Error, Result};
use crate::hamiltonian::{Configuration, MAX_QUBITS};
use crate::sector::SectorBasis;

pub type ChainRng = Xoshiro256PlusPlus;

/// Chains whose acceptance rate falls below this are flagged as frozen.
pub const NON_ERGODIC_ACCEPTANCE: f64 = 0.01;

const MAX_INITIAL_DRAWS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MoveKind {
    /// Swap a uniformly chosen occupied orbital with a uniformly chosen empty one.
    RandomPairSwap,
    /// Swap a uniformly chosen adjacent pair `(j, j+1)` whose bits differ.
    NeighbourSwap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitKind {
    Random,
    HartreeFock,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplerConfig {
    /// Retained samples per chain.
    pub n_samples: usize,
    /// Burn-in steps discarded from the initial state.
    pub n_thermal: usize,
    /// Steps between retained samples; `None` means `10 · n_qubits`.
    pub stride: Option<usize>,
    pub n_chains: usize,
    pub move_kind: MoveKind,
    pub init_kind: InitKind,
    /// Set from the run's master seed.
    #[serde(skip)]
    pub seed: u64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            n_samples: 40_000,
            n_thermal: 20_000,
            stride: None,
            n_chains: 8,
            move_kind: MoveKind::RandomPairSwap,
            init_kind: InitKind::Random,
            seed: 0,
        }
    }
}

impl SamplerConfig {
    pub fn stride_for(&self, n_qubits: usize) -> usize {
        self.stride.unwrap_or(10 * n_qubits).max(1)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_samples == 0 {
            return Err(Error::Config("n_samples must be positive".into()));
        }
        if self.stride == Some(0) {
            return Err(Error::Config("stride must be at least 1".into()));
        }
        if self.n_chains == 0 {
            return Err(Error::Config("n_chains must be positive".into()));
        }
        Ok(())
    }
}

/// SplitMix64 finalizer.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent stream seed for `master` tagged by e.g. `(iteration, chain)`.
pub fn derive_seed(master: u64, tags: &[u64]) -> u64 {
    tags.iter()
        .fold(splitmix64(master), |acc, &t| splitmix64(acc ^ splitmix64(t)))
}

/// Index of the `k`-th set bit of `mask` (0-based).
#[inline]
fn select_bit(mut mask: u64, k: u32) -> usize {
    for _ in 0..k {
        mask &= mask - 1;
    }
    mask.trailing_zeros() as usize
}

#[inline]
fn low_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Positions `j` with `bit_j != bit_{j+1}`.
#[inline]
fn neighbour_mask(x: Configuration) -> u64 {
    let n = x.n_qubits();
    if n < 2 {
        return 0;
    }
    (x.bits() ^ (x.bits() >> 1)) & low_mask(n - 1)
}

pub fn initial_state<R: Rng + ?Sized>(
    init: InitKind,
    n_qubits: usize,
    n_electrons: usize,
    rng: &mut R,
) -> Configuration {
    assert!(n_electrons <= n_qubits && n_qubits <= MAX_QUBITS);
    match init {
        InitKind::HartreeFock => Configuration::new(low_mask(n_electrons), n_qubits),
        InitKind::Random => {
            // Partial Fisher-Yates over orbital indices.
            let mut idx: Vec<usize> = (0..n_qubits).collect();
            let mut bits = 0u64;
            for k in 0..n_electrons {
                let r = rng.gen_range(k..n_qubits);
                idx.swap(k, r);
                bits |= 1 << idx[k];
            }
            Configuration::new(bits, n_qubits)
        }
    }
}

/// Draws a proposal from `x`. Hamming weight is preserved by construction.
pub fn propose<R: Rng + ?Sized>(move_kind: MoveKind, x: Configuration, rng: &mut R) -> Result<Configuration> {
    let occ = x.bits();
    match move_kind {
        MoveKind::RandomPairSwap => {
            let empty = !occ & low_mask(x.n_qubits());
            let (n_occ, n_empty) = (occ.count_ones(), empty.count_ones());
            if n_occ == 0 || n_empty == 0 {
                return Err(Error::DegenerateConfiguration);
            }
            let i = select_bit(occ, rng.gen_range(0..n_occ));
            let j = select_bit(empty, rng.gen_range(0..n_empty));
            Ok(x.with_bits(occ ^ (1 << i) ^ (1 << j)))
        }
        MoveKind::NeighbourSwap => {
            let pairs = neighbour_mask(x);
            if pairs == 0 {
                return Err(Error::DegenerateConfiguration);
            }
            let j = select_bit(pairs, rng.gen_range(0..pairs.count_ones()));
            Ok(x.with_bits(occ ^ (0b11 << j)))
        }
    }
}

/// Exact proposal probability `q(to | from)`; zero if `to` is not one move away.
pub fn proposal_probability(move_kind: MoveKind, from: Configuration, to: Configuration) -> f64 {
    let diff = from.diff_mask(to);
    if diff.count_ones() != 2 || (from.bits() & diff).count_ones() != 1 {
        return 0.0;
    }
    match move_kind {
        MoveKind::RandomPairSwap => {
            let n_occ = from.n_electrons();
            1.0 / (n_occ * (from.n_qubits() - n_occ)) as f64
        }
        MoveKind::NeighbourSwap => {
            if diff.trailing_zeros() + 1 != 63 - diff.leading_zeros() {
                return 0.0;
            }
            1.0 / neighbour_mask(from).count_ones() as f64
        }
    }
}

/// Hastings correction `q(from | to) / q(to | from)` for a drawn move.
#[inline]
fn hastings_factor(move_kind: MoveKind, from: Configuration, to: Configuration) -> f64 {
    match move_kind {
        MoveKind::RandomPairSwap => 1.0,
        MoveKind::NeighbourSwap => {
            neighbour_mask(from).count_ones() as f64 / neighbour_mask(to).count_ones() as f64
        }
    }
}

/// MH acceptance probability `min(1, q(x|x')|Ψ(x')|² / (q(x'|x)|Ψ(x)|²))`.
pub fn acceptance_probability(move_kind: MoveKind, from: Configuration, to: Configuration, prob_ratio: f64) -> f64 {
    (prob_ratio * hastings_factor(move_kind, from, to)).min(1.0)
}

/// Source of `|Ψ(x')/Ψ(x)|²` for a walker.
///
/// The cursor caches whatever makes the next ratio cheap: a probability
/// weight for tabulated amplitudes, activations for a network.
pub trait Amplitude: Sync {
    type Cursor: Clone + Send;

    fn cursor(&self, x: Configuration) -> Self::Cursor;
    fn is_zero(&self, cursor: &Self::Cursor) -> bool;
    /// Writes the cursor for `to` into `out` and returns `|Ψ(to)/Ψ(from)|²`.
    fn propose_into(&self, current: &Self::Cursor, from: Configuration, to: Configuration, out: &mut Self::Cursor) -> f64;

    /// One MH step; override for a faster route with the same law.
    #[inline]
    fn step(&self, chain: &mut ChainState<Self::Cursor>, move_kind: MoveKind) -> Result<bool> {
        generic_step(self, chain, move_kind)
    }
}

/// Network amplitudes with incremental activation updates.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkCursor<T> {
    activations: Activations<T>,
    log_prob: f64,
}

impl<T: Parameter> Amplitude for Network<T> {
    type Cursor = NetworkCursor<T>;

    fn cursor(&self, x: Configuration) -> Self::Cursor {
        let activations = self.activations(x);
        let log_prob = 2.0 * self.log_psi_from(&activations).log_magnitude;
        NetworkCursor {
            activations,
            log_prob,
        }
    }

    fn is_zero(&self, cursor: &Self::Cursor) -> bool {
        cursor.log_prob == f64::NEG_INFINITY
    }

    fn propose_into(&self, current: &Self::Cursor, from: Configuration, to: Configuration, out: &mut Self::Cursor) -> f64 {
        out.activations.visible = current.activations.visible;
        out.activations.hidden.clone_from(&current.activations.hidden);
        self.update_activations(&mut out.activations, from, to);
        out.log_prob = 2.0 * self.log_psi_from(&out.activations).log_magnitude;
        (out.log_prob - current.log_prob).exp()
    }
}

/// Neighbour lists of every basis state under one move kind.
///
/// The targets of state `i` are `targets[offsets[i]..offsets[i + 1]]`, in
/// the order [`propose`] enumerates them, so a uniform pick from the list
/// has the same law as a proposal.
#[derive(Debug, Clone, PartialEq)]
pub struct MoveTable {
    kind: MoveKind,
    offsets: Vec<u32>,
    targets: Vec<u32>,
    /// Set when every state has the same number of neighbours.
    uniform: Option<Uniform<usize>>,
}

impl MoveTable {
    pub fn new(basis: &SectorBasis, kind: MoveKind) -> Self {
        let mut offsets = Vec::with_capacity(basis.len() + 1);
        let mut targets = Vec::new();
        offsets.push(0);
        let n = basis.n_qubits();
        for x in basis.states() {
            let occ = x.bits();
            let mut push = |bits: u64| {
                if let Some(j) = basis.position(bits) {
                    targets.push(j as u32);
                }
            };
            match kind {
                MoveKind::RandomPairSwap => {
                    let empty = !occ & low_mask(n);
                    for i in BitIter(occ) {
                        for j in BitIter(empty) {
                            push(occ ^ (1 << i) ^ (1 << j));
                        }
                    }
                }
                MoveKind::NeighbourSwap => {
                    for j in BitIter(neighbour_mask(x)) {
                        push(occ ^ (0b11 << j));
                    }
                }
            }
            offsets.push(targets.len() as u32);
        }
        let degree = offsets.get(1).copied().unwrap_or(0);
        let regular = degree > 0 && offsets.windows(2).all(|w| w[1] - w[0] == degree);
        let uniform = regular.then(|| Uniform::new(0, degree as usize));
        Self {
            kind,
            offsets,
            targets,
            uniform,
        }
    }

    pub fn kind(&self) -> MoveKind {
        self.kind
    }

    #[inline]
    fn neighbours(&self, i: usize) -> &[u32] {
        &self.targets[self.offsets[i] as usize..self.offsets[i + 1] as usize]
    }
}

struct BitIter(u64);

impl Iterator for BitIter {
    type Item = u32;

    fn next(&mut self) -> Option<u32> {
        (self.0 != 0).then(|| {
            let i = self.0.trailing_zeros();
            self.0 &= self.0 - 1;
            i
        })
    }
}

/// Precomputed `|Ψ|²` over an enumerated sector.
///
/// Weights are scaled so the largest is 1; configurations outside the
/// basis have weight zero. With a matching [`MoveTable`] a step works on
/// basis indices only.
#[derive(Debug, Clone)]
pub struct WeightTable<'a> {
    basis: &'a SectorBasis,
    weights: Vec<f64>,
    moves: Option<&'a MoveTable>,
}

impl<'a> WeightTable<'a> {
    /// Builds the table from `log|Ψ|` per basis state (`-∞` for zeros).
    pub fn from_log_magnitudes(basis: &'a SectorBasis, log_magnitudes: &[f64]) -> Self {
        assert_eq!(basis.len(), log_magnitudes.len());
        let max = log_magnitudes.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let weights = log_magnitudes
            .iter()
            .map(|&l| if max == f64::NEG_INFINITY { 0.0 } else { (2.0 * (l - max)).exp() })
            .collect();
        Self {
            basis,
            weights,
            moves: None,
        }
    }

    /// Uses `moves` for steps of its kind. It must be built from the same basis.
    pub fn with_moves(mut self, moves: &'a MoveTable) -> Self {
        assert_eq!(moves.offsets.len(), self.basis.len() + 1, "move table built for another basis");
        self.moves = Some(moves);
        self
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Basis index and weight of a walker on a [`WeightTable`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableCursor {
    index: Option<u32>,
    weight: f64,
}

impl Amplitude for WeightTable<'_> {
    type Cursor = TableCursor;

    fn cursor(&self, x: Configuration) -> TableCursor {
        let index = self.basis.position(x.bits());
        TableCursor {
            index: index.map(|i| i as u32),
            weight: index.map_or(0.0, |i| self.weights[i]),
        }
    }

    fn is_zero(&self, cursor: &TableCursor) -> bool {
        cursor.weight == 0.0
    }

    #[inline]
    fn propose_into(&self, current: &TableCursor, _from: Configuration, to: Configuration, out: &mut TableCursor) -> f64 {
        *out = self.cursor(to);
        out.weight / current.weight
    }

    #[inline]
    fn step(&self, chain: &mut ChainState<TableCursor>, move_kind: MoveKind) -> Result<bool> {
        let (Some(moves), Some(i)) = (self.moves.filter(|m| m.kind == move_kind), chain.cursor.index) else {
            return generic_step(self, chain, move_kind);
        };
        let w = chain.cursor.weight;
        if w == 0.0 {
            return Err(Error::ZeroAmplitudeReference);
        }
        let nbrs = moves.neighbours(i as usize);
        if nbrs.is_empty() {
            return Err(Error::DegenerateConfiguration);
        }
        let pick = match &moves.uniform {
            Some(u) => u.sample(&mut chain.rng),
            None => chain.rng.gen_range(0..nbrs.len()),
        };
        let j = nbrs[pick] as usize;
        let mut w_new = self.weights[j];
        if move_kind == MoveKind::NeighbourSwap {
            w_new *= nbrs.len() as f64 / moves.neighbours(j).len() as f64;
        }
        chain.proposed += 1;
        // min(1, w'/w) > u without the division; always true when w' ≥ w
        // and never when w' = 0. Branch-free to avoid mispredictions.
        let accept = chain.rng.gen::<f64>() * w < w_new;
        let next = if accept { j } else { i as usize };
        chain.cursor = TableCursor {
            index: Some(next as u32),
            weight: self.weights[next],
        };
        chain.current = self.basis.state(next);
        chain.accepted += accept as u64;
        Ok(accept)
    }
}

/// Walker state of one Markov chain.
#[derive(Debug, Clone)]
pub struct ChainState<C> {
    pub current: Configuration,
    cursor: C,
    scratch: C,
    pub rng: ChainRng,
    pub proposed: u64,
    pub accepted: u64,
}

impl<C: Clone> ChainState<C> {
    pub fn new<A: Amplitude<Cursor = C> + ?Sized>(amp: &A, start: Configuration, rng: ChainRng) -> Self {
        let cursor = amp.cursor(start);
        Self {
            current: start,
            scratch: cursor.clone(),
            cursor,
            rng,
            proposed: 0,
            accepted: 0,
        }
    }

    pub fn acceptance_rate(&self) -> f64 {
        if self.proposed == 0 {
            1.0
        } else {
            self.accepted as f64 / self.proposed as f64
        }
    }
}

/// One Metropolis-Hastings step. Returns whether the move was accepted.
#[inline]
pub fn mh_step<A: Amplitude + ?Sized>(amp: &A, chain: &mut ChainState<A::Cursor>, move_kind: MoveKind) -> Result<bool> {
    amp.step(chain, move_kind)
}

/// [`mh_step`] through [`propose`] and [`Amplitude::propose_into`].
#[inline]
pub fn generic_step<A: Amplitude + ?Sized>(amp: &A, chain: &mut ChainState<A::Cursor>, move_kind: MoveKind) -> Result<bool> {
    if amp.is_zero(&chain.cursor) {
        return Err(Error::ZeroAmplitudeReference);
    }
    let proposal = propose(move_kind, chain.current, &mut chain.rng)?;
    let ratio = amp.propose_into(&chain.cursor, chain.current, proposal, &mut chain.scratch);
    let p = acceptance_probability(move_kind, chain.current, proposal, ratio);
    chain.proposed += 1;
    // p = 0 covers zero-amplitude proposals.
    let accept = p >= 1.0 || (p > 0.0 && chain.rng.gen::<f64>() < p);
    if accept {
        chain.current = proposal;
        std::mem::swap(&mut chain.cursor, &mut chain.scratch);
        chain.accepted += 1;
    }
    Ok(accept)
}

/// Retained samples and statistics of one chain.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainSamples {
    pub samples: Vec<Configuration>,
    pub proposed: u64,
    pub accepted: u64,
    /// Acceptance fell below [`NON_ERGODIC_ACCEPTANCE`].
    pub non_ergodic: bool,
}

impl ChainSamples {
    pub fn acceptance_rate(&self) -> f64 {
        if self.proposed == 0 {
            1.0
        } else {
            self.accepted as f64 / self.proposed as f64
        }
    }
}

/// Draws a nonzero-amplitude starting configuration.
pub fn nonzero_initial_state<A: Amplitude + ?Sized>(
    amp: &A,
    init: InitKind,
    n_qubits: usize,
    n_electrons: usize,
    rng: &mut ChainRng,
) -> Result<Configuration> {
    if init == InitKind::HartreeFock {
        let hf = initial_state(init, n_qubits, n_electrons, rng);
        if !amp.is_zero(&amp.cursor(hf)) {
            return Ok(hf);
        }
        log::warn!("Hartree-Fock configuration has zero amplitude; drawing a random start");
    }
    for _ in 0..MAX_INITIAL_DRAWS {
        let x = initial_state(InitKind::Random, n_qubits, n_electrons, rng);
        if !amp.is_zero(&amp.cursor(x)) {
            return Ok(x);
        }
    }
    Err(Error::Numerical(
        "no nonzero-amplitude starting configuration found".into(),
    ))
}

/// Runs one chain: `n_thermal` burn-in steps, then one retained sample every
/// `stride` steps until `n_samples` are kept. Deterministic in `seed`.
#[allow(clippy::too_many_arguments)]
pub fn run_chain<A: Amplitude + ?Sized>(
    amp: &A,
    n_qubits: usize,
    n_electrons: usize,
    n_samples: usize,
    n_thermal: usize,
    stride: usize,
    move_kind: MoveKind,
    init: InitKind,
    seed: u64,
) -> Result<ChainSamples> {
    let mut rng = ChainRng::seed_from_u64(seed);
    let start = nonzero_initial_state(amp, init, n_qubits, n_electrons, &mut rng)?;
    if n_electrons == 0 || n_electrons == n_qubits {
        // A single configuration exists; there is nothing to move.
        return Ok(ChainSamples {
            samples: vec![start; n_samples],
            proposed: 0,
            accepted: 0,
            non_ergodic: false,
        });
    }
    let mut chain = ChainState::new(amp, start, rng);
    for _ in 0..n_thermal {
        mh_step(amp, &mut chain, move_kind)?;
    }
    let mut samples = Vec::with_capacity(n_samples);
    for _ in 0..n_samples {
        for _ in 0..stride {
            mh_step(amp, &mut chain, move_kind)?;
        }
        samples.push(chain.current);
    }
    let non_ergodic = chain.acceptance_rate() < NON_ERGODIC_ACCEPTANCE;
    if non_ergodic {
        log::debug!(
            "chain acceptance rate {:.4} is below {NON_ERGODIC_ACCEPTANCE}; the chain may be frozen",
            chain.acceptance_rate()
        );
    }
    Ok(ChainSamples {
        samples,
        proposed: chain.proposed,
        accepted: chain.accepted,
        non_ergodic,
    })
}

/// Runs `config.n_chains` chains in parallel with seeds derived from
/// `config.seed` and `stream`. Results are in chain order.
pub fn run_chains<A: Amplitude + ?Sized>(
    amp: &A,
    config: &SamplerConfig,
    n_qubits: usize,
    n_electrons: usize,
    init: InitKind,
    stream: u64,
) -> Result<Vec<ChainSamples>> {
    use rayon::prelude::*;
    config.validate()?;
    let stride = config.stride_for(n_qubits);
    (0..config.n_chains)
        .into_par_iter()
        .map(|c| {
            run_chain(
                amp,
                n_qubits,
                n_electrons,
                config.n_samples,
                config.n_thermal,
                stride,
                config.move_kind,
                init,
                derive_seed(config.seed, &[stream, c as u64]),
            )
        })
        .collect()
}

/// Writes one configuration per line as a 0/1 string.
pub fn write_samples(path: impl AsRef<Path>, samples: &[Configuration]) -> Result<()> {
    let path = path.as_ref();
    let write = || -> std::io::Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        for s in samples {
            writeln!(out, "{s}")?;
        }
        out.flush()
    };
    write().map_err(|e| Error::from(e).in_file(path))
}
