//! Reproducible random substreams.
//!
//! Every trial draws from its own ChaCha8 stream. The key depends on the
//! master seed and the squeezing value only, the stream number is the trial
//! index, so decoding modes at one squeezing point see identical fault samples
//! and the assignment is independent of how trials are scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Key for all trials of one squeezing point.
pub fn point_seed(master_seed: u64, squeezing_db: f64) -> [u8; 32] {
    let mut seed = [0u8; 32];
    seed[..8].copy_from_slice(&master_seed.to_le_bytes());
    seed[8..16].copy_from_slice(&squeezing_db.to_bits().to_le_bytes());
    seed[16..24].copy_from_slice(b"gkp-qldp");
    seed
}

pub fn trial_rng(point_seed: [u8; 32], trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::from_seed(point_seed);
    rng.set_stream(trial);
    rng
}
