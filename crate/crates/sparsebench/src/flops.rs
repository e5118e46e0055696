//! Floating-point operation accounting.
//!
//! Every kernel takes an explicit `&mut FlopCounter` so that counts stay
//! exact integers and values remain shareable for concurrent reads: the only
//! mutable state is the accumulator the caller owns. One multiply-add pair
//! counts as 2 flops, a division as 1.

/// Accumulator for floating-point operation counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FlopCounter {
    flops: u64,
}

impl FlopCounter {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, n: u64) {
        self.flops += n;
    }

    pub fn total(&self) -> u64 {
        self.flops
    }

    /// Folds another counter into this one.
    pub fn merge(&mut self, other: FlopCounter) {
        self.flops += other.flops;
    }
}
