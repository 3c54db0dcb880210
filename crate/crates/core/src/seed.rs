//! Seed splitting.
//!
//! Every random stream in the crate is derived from a single master seed by
//! hashing `(master, role, index)` with SplitMix64 finalizers and seeding a
//! ChaCha8 generator with the result. A stream therefore depends only on its
//! key, never on the order or thread in which it is consumed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream roles. The discriminant is mixed into the derived seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Role {
    Theta = 1,
    Surrogate = 2,
    Target = 3,
    Shots = 4,
    ModelInit = 5,
    HepSplit = 6,
    HepBatch = 7,
    HepEvents = 8,
    Oracle = 9,
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives the 64-bit seed for stream `(master, role, index)`.
pub fn derive_seed(master: u64, role: Role, index: u64) -> u64 {
    let a = splitmix64(master);
    let b = splitmix64(a ^ (role as u64).wrapping_mul(0xD6E8_FEB8_6659_FD93));
    splitmix64(b ^ splitmix64(index))
}

/// A generator for stream `(master, role, index)`.
pub fn stream(master: u64, role: Role, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, role, index))
}
