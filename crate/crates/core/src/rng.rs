//! Labeled seed derivation.
//!
//! Every stochastic routine draws from its own ChaCha stream whose seed is a
//! SHA-256 digest of the master seed and a list of labels. Adding a new
//! consumer (a new noise source, a new experiment cell) therefore never shifts
//! the draws seen by existing ones.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use sha2::{Digest, Sha256};

pub type StreamRng = ChaCha12Rng;

/// One component of a seed-derivation path.
#[derive(Debug, Clone, Copy)]
pub enum Label<'a> {
    Str(&'a str),
    Int(u64),
    /// Floats are hashed by bit pattern.
    Real(f64),
}

impl<'a> From<&'a str> for Label<'a> {
    fn from(s: &'a str) -> Self {
        Label::Str(s)
    }
}

impl From<u64> for Label<'_> {
    fn from(v: u64) -> Self {
        Label::Int(v)
    }
}

impl From<usize> for Label<'_> {
    fn from(v: usize) -> Self {
        Label::Int(v as u64)
    }
}

impl From<f64> for Label<'_> {
    fn from(v: f64) -> Self {
        Label::Real(v)
    }
}

/// Derive a 64-bit sub-seed from `seed` and a label path.
pub fn derive_seed(seed: u64, labels: &[Label<'_>]) -> u64 {
    let mut h = Sha256::new();
    h.update(b"wbsense/v1");
    h.update(seed.to_le_bytes());
    for label in labels {
        // Type tag plus length prefix keeps ("ab","c") distinct from ("a","bc").
        match label {
            Label::Str(s) => {
                h.update([0u8]);
                h.update((s.len() as u64).to_le_bytes());
                h.update(s.as_bytes());
            }
            Label::Int(v) => {
                h.update([1u8]);
                h.update(v.to_le_bytes());
            }
            Label::Real(v) => {
                h.update([2u8]);
                h.update(v.to_bits().to_le_bytes());
            }
        }
    }
    let digest = h.finalize();
    let mut out = [0u8; 8];
    out.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(out)
}

/// RNG for the stream identified by `seed` and `labels`.
pub fn stream(seed: u64, labels: &[Label<'_>]) -> StreamRng {
    StreamRng::seed_from_u64(derive_seed(seed, labels))
}
