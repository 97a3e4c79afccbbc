//! Counter-based random stream layout.
//!
//! Every random quantity in a simulation is addressed by
//! `(master_seed, stream tag, replication index)`; the element index is the
//! position inside that stream. Streams are ChaCha8 instances whose key comes
//! from the master seed and whose 64-bit stream id encodes tag and replication,
//! so drawing more noise never shifts latent or edge draws, and replications
//! can be evaluated in any order or on any thread.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Independent random streams used by the samplers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum StreamTag {
    /// Latent positions `X_i`.
    Latent = 1,
    /// Edge uniforms `U_i` for query-adjacent edges.
    EdgeUniform = 2,
    /// Label noise `eps_i`.
    Noise = 3,
    /// Query points for integrated-risk runs.
    Query = 4,
    /// Pairwise edge uniforms for full-graph sampling.
    PairUniform = 5,
    /// Auxiliary draws (audits, geometric Monte Carlo).
    Auxiliary = 6,
}

const REPLICATION_BITS: u32 = 56;

/// SplitMix64 finalizer, used to spread a `u64` seed over the ChaCha key.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn key_from_seed(master_seed: u64) -> [u8; 32] {
    let mut key = [0u8; 32];
    let mut state = master_seed;
    for chunk in key.chunks_exact_mut(8) {
        state = splitmix64(state);
        chunk.copy_from_slice(&state.to_le_bytes());
    }
    key
}

/// Returns the stream for `(master_seed, tag, replication)` positioned at element 0.
///
/// Replication indices must be below `2^56`.
pub fn stream(master_seed: u64, tag: StreamTag, replication: u64) -> ChaCha8Rng {
    debug_assert!(replication < (1u64 << REPLICATION_BITS));
    let mut rng = ChaCha8Rng::from_seed(key_from_seed(master_seed));
    rng.set_stream(((tag as u64) << REPLICATION_BITS) | replication);
    rng
}

/// Uniform draw on `(0, 1]`.
///
/// The closed upper end makes `U <= 1` certain and `U <= 0` impossible, so
/// edges with connection probability exactly 0 or 1 are deterministic.
#[inline]
pub fn unit_open_closed<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    1.0 - rng.random::<f64>()
}
