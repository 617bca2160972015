//! PCG32 pseudo-random generator (PCG-XSH-RR 64/32).
//!
//! Hand-rolled so that every stream of random numbers in this workspace is
//! pinned to a published algorithm rather than to the internals of an
//! external crate. The generator takes a 64-bit seed and a 64-bit stream
//! selector; distinct streams from the same seed are independent, which is
//! how per-tree and per-split randomness is derived.

/// Multiplier from the PCG reference implementation.
const MULTIPLIER: u64 = 6364136223846793005;

#[derive(Debug, Clone)]
pub struct Pcg32 {
    state: u64,
    increment: u64,
}

impl Pcg32 {
    /// Create a generator from a seed and a stream selector, matching the
    /// reference `pcg32_srandom` initialization.
    pub fn new(seed: u64, stream: u64) -> Self {
        let increment = (stream << 1) | 1;
        let mut rng = Pcg32 {
            state: 0,
            increment,
        };
        rng.next_u32();
        rng.state = rng.state.wrapping_add(seed);
        rng.next_u32();
        rng
    }

    pub fn next_u32(&mut self) -> u32 {
        let old = self.state;
        self.state = old.wrapping_mul(MULTIPLIER).wrapping_add(self.increment);
        let xorshifted = (((old >> 18) ^ old) >> 27) as u32;
        let rot = (old >> 59) as u32;
        xorshifted.rotate_right(rot)
    }

    /// Uniform draw in `[0, bound)` by rejection, bias-free.
    pub fn next_bounded(&mut self, bound: u32) -> u32 {
        assert!(bound > 0, "bound must be positive");
        let threshold = bound.wrapping_neg() % bound;
        loop {
            let r = self.next_u32();
            if r >= threshold {
                return r % bound;
            }
        }
    }

    pub fn next_f64(&mut self) -> f64 {
        // 53 random bits mapped to [0, 1).
        let hi = (self.next_u32() >> 5) as u64; // 27 bits
        let lo = (self.next_u32() >> 6) as u64; // 26 bits
        ((hi << 26) | lo) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// In-place Fisher–Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        let n = items.len();
        if n < 2 {
            return;
        }
        for i in (1..n).rev() {
            let j = self.next_bounded((i + 1) as u32) as usize;
            items.swap(i, j);
        }
    }

    /// First `k` elements of a Fisher–Yates pass over `0..n`: a uniform
    /// sample without replacement, in sampled order.
    pub fn sample_indices(&mut self, n: usize, k: usize) -> Vec<usize> {
        let k = k.min(n);
        let mut pool: Vec<usize> = (0..n).collect();
        for i in 0..k {
            let j = i + self.next_bounded((n - i) as u32) as usize;
            pool.swap(i, j);
        }
        pool.truncate(k);
        pool
    }
}
