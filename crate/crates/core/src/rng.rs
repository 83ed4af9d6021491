//! Seed derivation shared by the graph generator and the batch samplers.
//!
//! Every random stream is a ChaCha8 generator keyed by the user seed. Sample
//! `k` of a batch uses stream `k`; graph generation uses [`GRAPH_STREAM`]. A
//! single seed therefore reproduces a whole pipeline, and serial and parallel
//! batch runs agree sample by sample.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SampleRng = ChaCha8Rng;

/// Stream reserved for random graph generation.
pub const GRAPH_STREAM: u64 = u64::MAX;

pub fn stream_rng(seed: u64, stream: u64) -> SampleRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
