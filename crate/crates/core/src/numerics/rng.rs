use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Generator handed to sampling closures.
pub type StreamRng = ChaCha12Rng;

/// Draws per independently seeded chunk in [`par_draws`]. Fixed so that the
/// chunk → substream mapping never depends on the worker count.
pub const CHUNK: usize = 256;

const TAG: &[u8; 16] = b"mdlvol/rngstream";

/// A counter-based random stream identified by `(seed, stream_id)`.
///
/// The key of a ChaCha12 cipher is derived from the pair; each task index
/// selects one of its 2^64 nonce streams, so substreams can be handed to
/// workers without any coordination.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self { seed, stream_id: 0 }
    }

    pub fn with_stream(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    fn key(&self) -> [u8; 32] {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&self.seed.to_le_bytes());
        key[8..16].copy_from_slice(&self.stream_id.to_le_bytes());
        key[16..].copy_from_slice(TAG);
        key
    }

    /// Sequential generator for the whole stream.
    pub fn rng(&self) -> StreamRng {
        self.task(u64::MAX)
    }

    /// Generator for task `index` of this stream.
    pub fn task(&self, index: u64) -> StreamRng {
        let mut rng = ChaCha12Rng::from_seed(self.key());
        rng.set_stream(index);
        rng
    }

    /// A child stream, for handing independent randomness to a sub-computation.
    pub fn child(&self, label: u64) -> RngStream {
        RngStream {
            seed: self.seed,
            stream_id: splitmix64(self.stream_id ^ splitmix64(label.wrapping_add(1))),
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Runs `draw` `samples` times across substreams and returns the results in
/// draw order. Chunk `c` always uses task `c`, so output is identical for
/// any thread pool size.
pub(crate) fn par_draws<T, F>(stream: &RngStream, samples: usize, draw: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut StreamRng) -> T + Sync,
{
    let chunks = samples.div_ceil(CHUNK);
    let nested: Vec<Vec<T>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream.task(c as u64);
            let len = CHUNK.min(samples - c * CHUNK);
            (0..len).map(|_| draw(&mut rng)).collect()
        })
        .collect();
    nested.into_iter().flatten().collect()
}
