//! Seeded pseudo-random generator with a fixed, documented algorithm.
//!
//! All randomized procedures in this crate (topology generation, label
//! propagation order, simulator tie-breaking) draw from [`SplitMix64`] so that
//! outputs are reproducible bit-for-bit across platforms and implementations.
//!
//! Algorithm (64-bit state `s`, wrapping arithmetic):
//!
//! ```text
//! s = s + 0x9E3779B97F4A7C15
//! z = s
//! z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//! z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//! out = z ^ (z >> 31)
//! ```
//!
//! Derived draws:
//! - `next_f64`: `(out >> 11) * 2^-53`, uniform in `[0, 1)`.
//! - `below(n)`: rejection sampling; draw `out` until `out >= (2^64 - n) mod n`,
//!   then return `out mod n`.
//! - `shuffle`: Fisher-Yates from the last index down, `j = below(i + 1)`.

const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform draw in `[0, 1)` with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Unbiased uniform integer in `[0, n)`. Panics if `n == 0`.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "below(0) is empty");
        let threshold = n.wrapping_neg() % n;
        loop {
            let r = self.next_u64();
            if r >= threshold {
                return r % n;
            }
        }
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }
}
