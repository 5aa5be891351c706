use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

/// Per-epoch shuffling without replacement.
///
/// The batch sequence of an epoch is a pure function of `(seed, epoch)`: the
/// permutation is drawn from a ChaCha stream selected by the epoch number.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BatchSampler {
    n: usize,
    batch_size: usize,
    seed: u64,
}

impl BatchSampler {
    pub const DEFAULT_BATCH_SIZE: usize = 64;

    pub fn new(n: usize, batch_size: usize, seed: u64) -> Result<Self> {
        if batch_size == 0 || n < batch_size {
            return Err(Error::invalid(format!(
                "batch sampler needs 1 <= batch size <= N (got b = {batch_size}, N = {n})"
            )));
        }
        Ok(BatchSampler {
            n,
            batch_size,
            seed,
        })
    }

    pub fn batch_size(&self) -> usize {
        self.batch_size
    }

    pub fn batches_per_epoch(&self) -> usize {
        self.n.div_ceil(self.batch_size)
    }

    /// Seeded permutation of `0..N` cut into chunks of the batch size; the last
    /// chunk may be short.
    pub fn batches(&self, epoch: u64) -> Vec<Vec<usize>> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(epoch);
        let mut perm: Vec<usize> = (0..self.n).collect();
        perm.shuffle(&mut rng);
        perm.chunks(self.batch_size)
            .map(<[usize]>::to_vec)
            .collect()
    }
}
