//! Small stateless integer hashes used for seeding.
//!
//! Everything random in the crate that must be reproducible from a pair
//! like `(seed, index)` goes through these, so results do not depend on
//! evaluation order or thread count.

/// 32-bit avalanche hash (skeeto's `lowbias32` with a zero offset).
#[inline]
pub fn hash_u32(mut n: u32) -> u32 {
    n ^= 0xe6fe_3beb;
    n ^= n >> 16;
    n = n.wrapping_mul(0x7feb_352d);
    n ^= n >> 15;
    n = n.wrapping_mul(0x846c_a68b);
    n ^= n >> 16;
    n
}

/// SplitMix64 finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Hashes a seed together with a sequence of words.
#[inline]
pub fn hash_words(seed: u64, words: &[u64]) -> u64 {
    words
        .iter()
        .fold(mix64(seed), |acc, &w| mix64(acc ^ mix64(w)))
}

/// Low and high halves of a 64-bit hash.
#[inline]
pub fn split(h: u64) -> (u32, u32) {
    (h as u32, (h >> 32) as u32)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_does_not_map_to_zero() {
        assert_ne!(hash_u32(0), 0);
        assert_ne!(mix64(0), 0);
    }

    #[test]
    fn word_order_matters() {
        assert_ne!(hash_words(1, &[2, 3]), hash_words(1, &[3, 2]));
        assert_ne!(hash_words(1, &[2]), hash_words(2, &[2]));
    }
}
