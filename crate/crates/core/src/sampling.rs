//! Seeded sampling of dyadic points.

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exactnum::{DyInterval, Dyadic};

/// Bits of resolution below the interval length used for sampled points.
pub const SAMPLE_BITS: u32 = 24;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derives an independent stream seed from a base seed and a label.
pub fn derive_seed(seed: u64, label: &[u64]) -> u64 {
    // splitmix64 over the label
    let mut z = seed;
    for &l in label {
        z = z.wrapping_add(l.wrapping_add(0x9E37_79B9_7F4A_7C15));
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
    }
    z
}

/// Uniform point of the grid `lo + len * r / 2^bits`, restricted to `iv`
/// (open ends are respected by rejection).
pub fn sample_in<R: Rng>(rng: &mut R, iv: &DyInterval, bits: u32) -> Dyadic {
    assert!(bits <= 62);
    let len = iv.length();
    loop {
        let r: u64 = rng.gen_range(0..=(1u64 << bits));
        let x = iv.lo() + &(&len * &Dyadic::new(BigInt::from(r), -(bits as i64)));
        if iv.contains(&x) {
            return x;
        }
    }
}

pub fn sample_many<R: Rng>(rng: &mut R, iv: &DyInterval, n: usize) -> Vec<Dyadic> {
    (0..n).map(|_| sample_in(rng, iv, SAMPLE_BITS)).collect()
}
