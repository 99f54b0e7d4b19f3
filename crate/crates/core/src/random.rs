//! Seeded generators for test corpora: random circuits, pure states, and
//! mixed states.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::circuit::{Circuit, Gate, GateKind};
use crate::discrimination::DensityMatrix;
use crate::statevector::StateVector;

/// The generator behind every seeded operation. ChaCha output is specified
/// bit-for-bit, so a seed yields the same stream on every platform.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent substream `stream` of `seed`, for splitting one seed across
/// trials without overlap.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

const RANDOM_KINDS: [GateKind; 5] = [GateKind::H, GateKind::X, GateKind::S, GateKind::T, GateKind::Cnot];

/// A circuit of `gates` gates drawn uniformly from {H, X, S, T, CNOT} with
/// uniformly chosen distinct targets. CNOT is skipped on one-qubit registers.
pub fn random_circuit<R: Rng + ?Sized>(rng: &mut R, width: usize, gates: usize) -> Circuit {
    assert!(width >= 1, "width must be positive");
    let kinds = if width >= 2 { &RANDOM_KINDS[..] } else { &RANDOM_KINDS[..4] };
    let list = (0..gates)
        .map(|_| match kinds[rng.gen_range(0..kinds.len())] {
            GateKind::Cnot => {
                let c = rng.gen_range(0..width);
                let mut t = rng.gen_range(0..width - 1);
                if t >= c {
                    t += 1;
                }
                Gate::cnot(c, t)
            }
            k => Gate::new(k, vec![rng.gen_range(0..width)]),
        })
        .collect();
    Circuit::from_parts(width, list)
}

fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<Complex64> {
    (0..dim)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect()
}

/// Haar-random pure state.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R, width: usize) -> StateVector {
    let mut v = gaussian_vector(rng, 1 << width);
    let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|a| *a /= norm);
    StateVector::from_amplitudes(width, v).expect("normalized by construction")
}

/// Random density matrix of the given rank (`G G† / Tr`, with G a
/// `2^width × rank` complex Gaussian matrix). Rank 1 gives a pure state.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, width: usize, rank: usize) -> DensityMatrix {
    let dim = 1usize << width;
    let rank = rank.clamp(1, dim);
    let g = DMatrix::from_vec(dim, rank, gaussian_vector(rng, dim * rank));
    let mut rho = &g * g.adjoint();
    let tr = rho.trace().re;
    rho /= Complex64::new(tr, 0.0);
    // symmetrize away rounding so the Hermitian check is exact
    let rho = (&rho + rho.adjoint()) * Complex64::new(0.5, 0.0);
    DensityMatrix::new(width, rho).expect("valid by construction")
}
