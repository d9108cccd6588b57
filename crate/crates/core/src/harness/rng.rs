use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// Seed for replicate `index` of the cell identified by `key`.
///
/// Hashing the key (rather than a cell position) means inserting or
/// reordering cells never changes another cell's randomness.
pub fn derive_seed(base_seed: u64, key: &str, index: u64) -> u64 {
    let mut h = Sha256::new();
    h.update(base_seed.to_le_bytes());
    h.update((key.len() as u64).to_le_bytes());
    h.update(key.as_bytes());
    h.update(index.to_le_bytes());
    let digest = h.finalize();
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}

/// Independent generators for one game: the player, the adversary, and
/// hindsight estimation each own a separate ChaCha stream of the same seed.
#[derive(Clone, Debug)]
pub struct RunStreams {
    pub player: ChaCha8Rng,
    pub adversary: ChaCha8Rng,
    pub estimate: ChaCha8Rng,
}

impl RunStreams {
    pub fn new(seed: u64) -> Self {
        let stream = |id: u64| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(id);
            rng
        };
        RunStreams {
            player: stream(1),
            adversary: stream(2),
            estimate: stream(3),
        }
    }
}
