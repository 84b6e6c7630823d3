//! SSSE3 (16 lanes) and AVX2 (32 lanes) vectors.
//!
//! Values of these types may only be created and used inside functions
//! compiled with the matching `target_feature`, after runtime detection.

#[cfg(target_arch = "x86")]
use core::arch::x86::*;
#[cfg(target_arch = "x86_64")]
use core::arch::x86_64::*;

use super::ByteVector;

#[derive(Clone, Copy)]
pub(crate) struct Ssse3Vector(__m128i);

impl ByteVector for Ssse3Vector {
    const WIDTH: usize = 16;

    #[inline(always)]
    fn load(bytes: &[u8]) -> Self {
        assert!(bytes.len() >= 16);
        unsafe { Self(_mm_loadu_si128(bytes.as_ptr().cast())) }
    }

    #[inline(always)]
    fn splat(b: u8) -> Self {
        unsafe { Self(_mm_set1_epi8(b as i8)) }
    }

    #[inline(always)]
    fn store(self, out: &mut [u8]) {
        assert!(out.len() >= 16);
        unsafe { _mm_storeu_si128(out.as_mut_ptr().cast(), self.0) }
    }

    #[inline(always)]
    fn prev1(self, previous: Self) -> Self {
        unsafe { Self(_mm_alignr_epi8(self.0, previous.0, 16 - 1)) }
    }

    #[inline(always)]
    fn prev2(self, previous: Self) -> Self {
        unsafe { Self(_mm_alignr_epi8(self.0, previous.0, 16 - 2)) }
    }

    #[inline(always)]
    fn prev3(self, previous: Self) -> Self {
        unsafe { Self(_mm_alignr_epi8(self.0, previous.0, 16 - 3)) }
    }

    #[inline(always)]
    fn shr4(self) -> Self {
        // No byte-wise shift: shift 16-bit words, then drop the bits pulled in.
        unsafe {
            Self(_mm_and_si128(
                _mm_srli_epi16(self.0, 4),
                _mm_set1_epi8(0x0F),
            ))
        }
    }

    #[inline(always)]
    fn and(self, other: Self) -> Self {
        unsafe { Self(_mm_and_si128(self.0, other.0)) }
    }

    #[inline(always)]
    fn or(self, other: Self) -> Self {
        unsafe { Self(_mm_or_si128(self.0, other.0)) }
    }

    #[inline(always)]
    fn xor(self, other: Self) -> Self {
        unsafe { Self(_mm_xor_si128(self.0, other.0)) }
    }

    #[inline(always)]
    fn and_not(self, other: Self) -> Self {
        unsafe { Self(_mm_andnot_si128(other.0, self.0)) }
    }

    #[inline(always)]
    fn lookup16(self, table: &[u8; 16]) -> Self {
        unsafe {
            Self(_mm_shuffle_epi8(
                _mm_loadu_si128(table.as_ptr().cast()),
                self.0,
            ))
        }
    }

    #[inline(always)]
    fn saturating_sub(self, other: Self) -> Self {
        unsafe { Self(_mm_subs_epu8(self.0, other.0)) }
    }

    #[inline(always)]
    fn max(self, other: Self) -> Self {
        unsafe { Self(_mm_max_epu8(self.0, other.0)) }
    }

    #[inline(always)]
    fn is_all_ascii(self) -> bool {
        unsafe { _mm_movemask_epi8(self.0) == 0 }
    }

    #[inline(always)]
    fn any_nonzero(self) -> bool {
        unsafe { _mm_movemask_epi8(_mm_cmpeq_epi8(self.0, _mm_setzero_si128())) != 0xFFFF }
    }
}

#[derive(Clone, Copy)]
pub(crate) struct Avx2Vector(__m256i);

impl ByteVector for Avx2Vector {
    const WIDTH: usize = 32;

    #[inline(always)]
    fn load(bytes: &[u8]) -> Self {
        assert!(bytes.len() >= 32);
        unsafe { Self(_mm256_loadu_si256(bytes.as_ptr().cast())) }
    }

    #[inline(always)]
    fn splat(b: u8) -> Self {
        unsafe { Self(_mm256_set1_epi8(b as i8)) }
    }

    #[inline(always)]
    fn store(self, out: &mut [u8]) {
        assert!(out.len() >= 32);
        unsafe { _mm256_storeu_si256(out.as_mut_ptr().cast(), self.0) }
    }

    // alignr works per 128-bit lane, so first build [previous.hi, self.lo].
    #[inline(always)]
    fn prev1(self, previous: Self) -> Self {
        unsafe {
            let straddle = _mm256_permute2x128_si256(previous.0, self.0, 0x21);
            Self(_mm256_alignr_epi8(self.0, straddle, 16 - 1))
        }
    }

    #[inline(always)]
    fn prev2(self, previous: Self) -> Self {
        unsafe {
            let straddle = _mm256_permute2x128_si256(previous.0, self.0, 0x21);
            Self(_mm256_alignr_epi8(self.0, straddle, 16 - 2))
        }
    }

    #[inline(always)]
    fn prev3(self, previous: Self) -> Self {
        unsafe {
            let straddle = _mm256_permute2x128_si256(previous.0, self.0, 0x21);
            Self(_mm256_alignr_epi8(self.0, straddle, 16 - 3))
        }
    }

    #[inline(always)]
    fn shr4(self) -> Self {
        unsafe {
            Self(_mm256_and_si256(
                _mm256_srli_epi16(self.0, 4),
                _mm256_set1_epi8(0x0F),
            ))
        }
    }

    #[inline(always)]
    fn and(self, other: Self) -> Self {
        unsafe { Self(_mm256_and_si256(self.0, other.0)) }
    }

    #[inline(always)]
    fn or(self, other: Self) -> Self {
        unsafe { Self(_mm256_or_si256(self.0, other.0)) }
    }

    #[inline(always)]
    fn xor(self, other: Self) -> Self {
        unsafe { Self(_mm256_xor_si256(self.0, other.0)) }
    }

    #[inline(always)]
    fn and_not(self, other: Self) -> Self {
        unsafe { Self(_mm256_andnot_si256(other.0, self.0)) }
    }

    #[inline(always)]
    fn lookup16(self, table: &[u8; 16]) -> Self {
        unsafe {
            let table = _mm256_broadcastsi128_si256(_mm_loadu_si128(table.as_ptr().cast()));
            Self(_mm256_shuffle_epi8(table, self.0))
        }
    }

    #[inline(always)]
    fn saturating_sub(self, other: Self) -> Self {
        unsafe { Self(_mm256_subs_epu8(self.0, other.0)) }
    }

    #[inline(always)]
    fn max(self, other: Self) -> Self {
        unsafe { Self(_mm256_max_epu8(self.0, other.0)) }
    }

    #[inline(always)]
    fn is_all_ascii(self) -> bool {
        unsafe { _mm256_movemask_epi8(self.0) == 0 }
    }

    #[inline(always)]
    fn any_nonzero(self) -> bool {
        unsafe { _mm256_testz_si256(self.0, self.0) == 0 }
    }
}

/// # Safety
/// The CPU must support SSSE3.
#[target_feature(enable = "ssse3")]
pub(crate) unsafe fn validate_ssse3(input: &[u8]) -> bool {
    super::validate_blocks::<Ssse3Vector>(input)
}

/// # Safety
/// The CPU must support AVX2.
#[target_feature(enable = "avx2")]
pub(crate) unsafe fn validate_avx2(input: &[u8]) -> bool {
    super::validate_blocks::<Avx2Vector>(input)
}

/// # Safety
/// The CPU must support SSSE3.
#[cfg(test)]
#[target_feature(enable = "ssse3")]
pub(crate) unsafe fn run_ssse3<R>(f: impl FnOnce() -> R) -> R {
    f()
}

/// # Safety
/// The CPU must support AVX2.
#[cfg(test)]
#[target_feature(enable = "avx2")]
pub(crate) unsafe fn run_avx2<R>(f: impl FnOnce() -> R) -> R {
    f()
}
