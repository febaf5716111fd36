//! Histogram of Metropolis-Hastings samples against exact |Ψ|² on a small
//! sector, for both proposal kinds.

use nnqs::ansatz::{AnsatzKind, TanhFcn};
use nnqs::sampler::{run_chain, InitKind, MoveKind};
use nnqs::sector::SectorBasis;
use nnqs::vmc::SectorAmplitudes;
use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;

fn main() -> nnqs::Result<()> {
    let (n, k, samples) = (6, 3, 100_000);
    let mut net = TanhFcn::zeros(AnsatzKind::TanhFcn, n, 2 * n);
    net.randomize(&mut Xoshiro256PlusPlus::seed_from_u64(4), 0.4);
    let basis = SectorBasis::new(n, k, 1000)?;
    let p = SectorAmplitudes::new(&basis, &net).probabilities()?;
    for kind in [MoveKind::RandomPairSwap, MoveKind::NeighbourSwap] {
        let run = run_chain(&net, n, k, samples, 10_000, 10 * n, kind, InitKind::Random, 1)?;
        let mut counts = vec![0usize; basis.len()];
        for x in &run.samples {
            counts[basis.position(x.bits()).expect("sample stays in sector")] += 1;
        }
        let tv: f64 = 0.5 * counts.iter().zip(&p).map(|(&c, q)| (c as f64 / samples as f64 - q).abs()).sum::<f64>();
        println!("{kind:?}: acceptance {:.3}, total variation {tv:.4}", run.acceptance_rate());
        for (i, (&c, q)) in counts.iter().zip(&p).enumerate().filter(|(_, (_, &q))| q > 0.02) {
            println!("  {}  exact {q:.4}  sampled {:.4}", basis.state(i).to_bitstring(), c as f64 / samples as f64);
        }
    }
    Ok(())
}
