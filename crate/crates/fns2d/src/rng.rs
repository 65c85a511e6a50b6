//! Deterministic stream derivation.
//!
//! Every stochastic object in the crate draws from a ChaCha stream whose seed
//! is derived from the master seed plus a structural tag (wave index,
//! component, replica id). Streams are therefore independent of iteration
//! order, thread scheduling, and of extending a mode set.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::wave::WaveIndex;

#[inline]
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive a 32-byte ChaCha seed from the master seed and a tag sequence.
pub fn derive_seed(master: u64, tags: &[u64]) -> [u8; 32] {
    let mut state = master ^ 0x6A09_E667_F3BC_C908;
    for &t in tags {
        let mixed = splitmix64(&mut state);
        state ^= t.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ mixed;
    }
    let mut seed = [0u8; 32];
    for chunk in seed.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    seed
}

/// Stream for an arbitrary tagged substream of the master seed.
pub fn stream_rng(master: u64, tags: &[u64]) -> ChaCha12Rng {
    ChaCha12Rng::from_seed(derive_seed(master, tags))
}

#[inline]
fn zigzag(v: i32) -> u64 {
    ((v as i64) << 1 ^ (v as i64) >> 63) as u64
}

/// Stream for one mode component, keyed by `(seed, k1, k2, component)`.
pub fn mode_rng(master: u64, k: WaveIndex, component: u32) -> ChaCha12Rng {
    stream_rng(master, &[1, zigzag(k.k1), zigzag(k.k2), component as u64])
}

/// Stream for one Monte Carlo replica.
pub fn replica_rng(master: u64, replica: u64) -> ChaCha12Rng {
    stream_rng(master, &[2, replica])
}
