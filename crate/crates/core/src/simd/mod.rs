//! Vectorized lookup validator.
//!
//! Every adjacent byte pair is classified with three 16-entry table lookups
//! (see [`crate::tables`]). Bits 0..=6 of the result flag two-byte errors;
//! bit 7 flags a continuation pair, which must occur exactly where a 3- or
//! 4-byte lead two or three bytes earlier expects one. Errors are ORed into an
//! accumulator that is tested once at the end.
//!
//! Input is consumed in 64-byte blocks. A block whose bytes are all ASCII
//! skips classification, after checking that the previous block did not end
//! inside a character.

use std::sync::OnceLock;

use crate::tables::{NibbleTables, NIBBLE_TABLES};

mod fallback;
#[cfg(any(target_arch = "x86", target_arch = "x86_64"))]
mod x86;

pub use fallback::Fallback16;

pub const BLOCK_SIZE: usize = 64;

/// Fixed-width vector of bytes with the operations the validator needs.
///
/// All operations are lane-wise. Implementations must give bit-identical
/// lanes for identical inputs.
pub trait ByteVector: Copy {
    const WIDTH: usize;

    /// Loads the first `WIDTH` bytes of `bytes`.
    fn load(bytes: &[u8]) -> Self;
    fn splat(b: u8) -> Self;
    fn store(self, out: &mut [u8]);

    /// Lane `i` holds the byte one position before lane `i`, taken from the
    /// tail of `previous` for lane 0.
    fn prev1(self, previous: Self) -> Self;
    fn prev2(self, previous: Self) -> Self;
    fn prev3(self, previous: Self) -> Self;

    /// Per-lane logical shift right by four bits.
    fn shr4(self) -> Self;
    fn and(self, other: Self) -> Self;
    fn or(self, other: Self) -> Self;
    fn xor(self, other: Self) -> Self;
    /// `self & !other`
    fn and_not(self, other: Self) -> Self;
    /// Per-lane `table[lane]`. Every lane must be below 16.
    fn lookup16(self, table: &[u8; 16]) -> Self;
    fn saturating_sub(self, other: Self) -> Self;
    fn max(self, other: Self) -> Self;
    fn is_all_ascii(self) -> bool;
    fn any_nonzero(self) -> bool;
}

/// Classifies each (previous byte, byte) pair of `input`.
#[inline(always)]
pub fn classify<V: ByteVector>(input: V, previous: V, tables: &NibbleTables) -> V {
    let prev1 = input.prev1(previous);
    let byte_1_high = prev1.shr4().lookup16(&tables.table1);
    let byte_1_low = prev1.and(V::splat(0x0F)).lookup16(&tables.table2);
    let byte_2_high = input.shr4().lookup16(&tables.table3);
    byte_1_high.and(byte_1_low).and(byte_2_high)
}

/// 0x80 in each lane where a continuation pair must end: two bytes after a
/// byte `>= 0xE0` or three bytes after a byte `>= 0xF0`.
#[inline(always)]
pub fn expected_continuations<V: ByteVector>(input: V, previous: V) -> V {
    let prev2 = input.prev2(previous);
    let prev3 = input.prev3(previous);
    // Subtracting (threshold - 0x80) leaves bit 7 set exactly when lane >= threshold.
    let third = prev2.saturating_sub(V::splat(0xE0 - 0x80));
    let fourth = prev3.saturating_sub(V::splat(0xF0 - 0x80));
    third.or(fourth).and(V::splat(0x80))
}

/// Error lanes for one vector: the two-byte error bits of `classified`, plus
/// bit 7 wherever a continuation pair is present but not expected, or
/// expected but absent.
#[inline(always)]
pub fn check_multibyte_lengths<V: ByteVector>(input: V, previous: V, classified: V) -> V {
    let expected = expected_continuations(input, previous);
    let pairs = classified.and(V::splat(0x80));
    expected.xor(pairs).or(classified.and_not(V::splat(0x80)))
}

/// Per-lane upper bounds for the last vector of a stream: a lead byte may not
/// sit in the final lane, nor a 3/4-byte lead in the last two or three.
const INCOMPLETE_LIMIT: [u8; BLOCK_SIZE] = {
    let mut limit = [0xFF; BLOCK_SIZE];
    limit[BLOCK_SIZE - 3] = 0xF0 - 1;
    limit[BLOCK_SIZE - 2] = 0xE0 - 1;
    limit[BLOCK_SIZE - 1] = 0xC0 - 1;
    limit
};

/// Nonzero iff `input` ends inside a multi-byte character.
#[inline(always)]
pub fn check_incomplete<V: ByteVector>(input: V) -> V {
    let limit = V::load(&INCOMPLETE_LIMIT[BLOCK_SIZE - V::WIDTH..]);
    // max(x, limit) == limit iff x <= limit.
    input.max(limit).xor(limit)
}

/// Validator state carried from block to block.
#[derive(Clone, Copy)]
pub(crate) struct LookupState<V> {
    error: V,
    previous: V,
    pending_incomplete: V,
}

impl<V: ByteVector> LookupState<V> {
    #[inline(always)]
    pub(crate) fn new() -> Self {
        let zero = V::splat(0);
        LookupState {
            error: zero,
            previous: zero,
            pending_incomplete: zero,
        }
    }

    #[inline(always)]
    fn check_vector(&mut self, input: V) {
        let classified = classify(input, self.previous, &NIBBLE_TABLES);
        self.error = self
            .error
            .or(check_multibyte_lengths(input, self.previous, classified));
        self.previous = input;
    }

    #[inline(always)]
    pub(crate) fn check_block(&mut self, block: &[u8; BLOCK_SIZE]) {
        let mut any = V::splat(0);
        for chunk in block.chunks_exact(V::WIDTH) {
            any = any.or(V::load(chunk));
        }
        if any.is_all_ascii() {
            self.error = self.error.or(self.pending_incomplete);
            // An all-ASCII vector behaves like the all-zero start state.
            self.previous = V::splat(0);
            self.pending_incomplete = V::splat(0);
        } else {
            for chunk in block.chunks_exact(V::WIDTH) {
                self.check_vector(V::load(chunk));
            }
            self.pending_incomplete = check_incomplete(self.previous);
        }
    }

    #[cfg(test)]
    pub(crate) fn error_seen(&self) -> bool {
        self.error.any_nonzero()
    }

    #[inline(always)]
    pub(crate) fn finish(self) -> bool {
        !self.error.or(self.pending_incomplete).any_nonzero()
    }
}

#[inline(always)]
pub(crate) fn validate_blocks<V: ByteVector>(input: &[u8]) -> bool {
    let mut state = LookupState::<V>::new();
    let mut blocks = input.chunks_exact(BLOCK_SIZE);
    for block in &mut blocks {
        state.check_block(block.try_into().unwrap());
    }
    let tail = blocks.remainder();
    if !tail.is_empty() {
        // Zero bytes are ASCII, so padding never introduces an error.
        let mut scratch = [0u8; BLOCK_SIZE];
        scratch[..tail.len()].copy_from_slice(tail);
        state.check_block(&scratch);
    }
    state.finish()
}

/// Vector backend used by [`validate_lookup_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Implementation {
    /// Portable 16-lane array implementation, available everywhere.
    Fallback,
    Ssse3,
    Avx2,
}

impl Implementation {
    pub const ALL: [Implementation; 3] = [
        Implementation::Fallback,
        Implementation::Ssse3,
        Implementation::Avx2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Implementation::Fallback => "fallback",
            Implementation::Ssse3 => "ssse3",
            Implementation::Avx2 => "avx2",
        }
    }

    pub fn width(self) -> usize {
        match self {
            Implementation::Fallback | Implementation::Ssse3 => 16,
            Implementation::Avx2 => 32,
        }
    }

    pub fn is_supported(self) -> bool {
        match self {
            Implementation::Fallback => true,
            #[cfg(any(target_arch = "x86", target_arch = "x86_64"))]
            Implementation::Ssse3 => is_x86_feature_detected!("ssse3"),
            #[cfg(any(target_arch = "x86", target_arch = "x86_64"))]
            Implementation::Avx2 => is_x86_feature_detected!("avx2"),
            #[cfg(not(any(target_arch = "x86", target_arch = "x86_64")))]
            _ => false,
        }
    }

    /// Widest supported backend, detected once.
    pub fn detect() -> Self {
        static DETECTED: OnceLock<Implementation> = OnceLock::new();
        *DETECTED.get_or_init(|| {
            [Implementation::Avx2, Implementation::Ssse3]
                .into_iter()
                .find(|imp| imp.is_supported())
                .unwrap_or(Implementation::Fallback)
        })
    }

    pub fn supported() -> Vec<Implementation> {
        Self::ALL
            .into_iter()
            .filter(|imp| imp.is_supported())
            .collect()
    }
}

/// Validates `input` with the best vector backend of this CPU.
pub fn validate_lookup(input: &[u8]) -> bool {
    validate_lookup_with(Implementation::detect(), input)
}

/// Validates `input` with a specific backend.
///
/// # Panics
/// If `implementation` is not supported by this CPU.
pub fn validate_lookup_with(implementation: Implementation, input: &[u8]) -> bool {
    match implementation {
        Implementation::Fallback => validate_blocks::<Fallback16>(input),
        #[cfg(any(target_arch = "x86", target_arch = "x86_64"))]
        Implementation::Ssse3 => {
            assert!(implementation.is_supported(), "SSSE3 not available");
            // SAFETY: feature checked above.
            unsafe { x86::validate_ssse3(input) }
        }
        #[cfg(any(target_arch = "x86", target_arch = "x86_64"))]
        Implementation::Avx2 => {
            assert!(implementation.is_supported(), "AVX2 not available");
            // SAFETY: feature checked above.
            unsafe { x86::validate_avx2(input) }
        }
        #[cfg(not(any(target_arch = "x86", target_arch = "x86_64")))]
        _ => panic!("{} not available on this target", implementation.name()),
    }
}

/// Validates one vector at a time, without the ASCII block skip, padding the
/// last vector with zeros.
pub fn validate_by_vectors<V: ByteVector>(input: &[u8]) -> bool {
    let mut state = LookupState::<V>::new();
    let mut chunks = input.chunks_exact(V::WIDTH);
    for chunk in &mut chunks {
        state.check_vector(V::load(chunk));
    }
    let tail = chunks.remainder();
    if !tail.is_empty() {
        let mut scratch = [0u8; BLOCK_SIZE];
        scratch[..tail.len()].copy_from_slice(tail);
        state.check_vector(V::load(&scratch));
    }
    state.pending_incomplete = check_incomplete(state.previous);
    state.finish()
}

#[cfg(test)]
mod tests;
