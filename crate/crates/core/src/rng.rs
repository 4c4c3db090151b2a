//! Random streams.
//!
//! Every replication owns a ChaCha8 stream selected by `(seed, stream)`.
//! ChaCha8 has 2^64 independent streams per seed, so the replication index is
//! used directly as the stream number. Auxiliary randomness that belongs to a
//! replication but not to its process (an independent `Exp(1)` offset, a
//! simulated exploration chain) lives on the stream with [`AUX_STREAM_BIT`] set.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

pub const AUX_STREAM_BIT: u64 = 1 << 63;

pub fn stream_rng(seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn aux_rng(seed: u64, stream: u64) -> StreamRng {
    stream_rng(seed, stream | AUX_STREAM_BIT)
}
