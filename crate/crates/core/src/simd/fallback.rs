use super::ByteVector;

/// Portable 16-lane vector built on a byte array.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fallback16(pub [u8; 16]);

impl Fallback16 {
    #[inline(always)]
    fn zip(self, other: Self, f: impl Fn(u8, u8) -> u8) -> Self {
        let mut out = [0u8; 16];
        for (o, (&a, &b)) in out.iter_mut().zip(self.0.iter().zip(&other.0)) {
            *o = f(a, b);
        }
        Fallback16(out)
    }

    #[inline(always)]
    fn prev<const N: usize>(self, previous: Self) -> Self {
        let mut out = [0u8; 16];
        out[..N].copy_from_slice(&previous.0[16 - N..]);
        out[N..].copy_from_slice(&self.0[..16 - N]);
        Fallback16(out)
    }
}

impl ByteVector for Fallback16 {
    const WIDTH: usize = 16;

    #[inline(always)]
    fn load(bytes: &[u8]) -> Self {
        Fallback16(bytes[..16].try_into().unwrap())
    }

    #[inline(always)]
    fn splat(b: u8) -> Self {
        Fallback16([b; 16])
    }

    #[inline(always)]
    fn store(self, out: &mut [u8]) {
        out[..16].copy_from_slice(&self.0);
    }

    #[inline(always)]
    fn prev1(self, previous: Self) -> Self {
        self.prev::<1>(previous)
    }

    #[inline(always)]
    fn prev2(self, previous: Self) -> Self {
        self.prev::<2>(previous)
    }

    #[inline(always)]
    fn prev3(self, previous: Self) -> Self {
        self.prev::<3>(previous)
    }

    #[inline(always)]
    fn shr4(self) -> Self {
        Fallback16(self.0.map(|b| b >> 4))
    }

    #[inline(always)]
    fn and(self, other: Self) -> Self {
        self.zip(other, |a, b| a & b)
    }

    #[inline(always)]
    fn or(self, other: Self) -> Self {
        self.zip(other, |a, b| a | b)
    }

    #[inline(always)]
    fn xor(self, other: Self) -> Self {
        self.zip(other, |a, b| a ^ b)
    }

    #[inline(always)]
    fn and_not(self, other: Self) -> Self {
        self.zip(other, |a, b| a & !b)
    }

    #[inline(always)]
    fn lookup16(self, table: &[u8; 16]) -> Self {
        debug_assert!(self.0.iter().all(|&n| n < 16));
        Fallback16(self.0.map(|n| table[usize::from(n & 0x0F)]))
    }

    #[inline(always)]
    fn saturating_sub(self, other: Self) -> Self {
        self.zip(other, u8::saturating_sub)
    }

    #[inline(always)]
    fn max(self, other: Self) -> Self {
        self.zip(other, u8::max)
    }

    #[inline(always)]
    fn is_all_ascii(self) -> bool {
        self.0.iter().fold(0, |acc, &b| acc | b) < 0x80
    }

    #[inline(always)]
    fn any_nonzero(self) -> bool {
        self.0.iter().fold(0, |acc, &b| acc | b) != 0
    }
}
