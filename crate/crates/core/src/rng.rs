use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Identifies one reproducible random stream. Two streams with the same seed
/// and different ids are independent ChaCha streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        RngStream { seed, stream_id }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }

    /// Child stream for a sub-task. Stream ids are laid out as
    /// `(task << 32) | batch`, so up to 2^32 batches per task never collide.
    pub fn child(&self, task: u32, batch: u32) -> RngStream {
        RngStream { seed: self.seed, stream_id: ((task as u64) << 32) | batch as u64 }
    }

    /// Stream for batch `b` of the work owned by this stream.
    pub fn batch(&self, b: u32) -> RngStream {
        RngStream { seed: self.seed, stream_id: self.stream_id.wrapping_add(b as u64) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn same_stream_same_sequence() {
        let a: Vec<u64> = RngStream::new(7, 3).rng().random_iter().take(16).collect();
        let b: Vec<u64> = RngStream::new(7, 3).rng().random_iter().take(16).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn distinct_streams_differ() {
        let a: Vec<u64> = RngStream::new(7, 3).rng().random_iter().take(16).collect();
        let b: Vec<u64> = RngStream::new(7, 4).rng().random_iter().take(16).collect();
        let c: Vec<u64> = RngStream::new(8, 3).rng().random_iter().take(16).collect();
        assert_ne!(a, b);
        assert_ne!(a, c);
    }
}
