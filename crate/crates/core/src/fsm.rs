//! Table-driven finite-state validator.
//!
//! Each byte costs two table loads: one to classify the byte into one of
//! twelve classes, one to look up `next[state + class]`. States are stored as
//! multiples of twelve so the sum is a unique index.

use crate::tables::{FsmTables, FSM_TABLES};

pub const CLASS_COUNT: usize = 12;
pub const STATE_COUNT: usize = 9;

/// Inputs shorter than this are validated with a single stream.
pub const INTERLEAVE_MIN_LEN: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum ByteClass {
    /// `0x80..=0x8F`
    ContinuationLow = 0,
    /// `0x90..=0x9F`
    Continuation,
    /// `0xA0..=0xBF`
    ContinuationHigh,
    Ascii,
    /// `0xC2..=0xDF`
    Lead2,
    /// `0xE1..=0xEC`, `0xEE..=0xEF`
    Lead3Normal,
    /// `0xF1..=0xF3`
    Lead4Normal,
    /// `0xE0`
    Lead3Overlong,
    /// `0xED`
    Lead3Surrogate,
    /// `0xF0`
    Lead4Overlong,
    /// `0xF4`
    Lead4TooLarge,
    /// `0xC0`, `0xC1`, `0xF5..=0xFF`
    Illegal,
}

impl ByteClass {
    pub const ALL: [ByteClass; CLASS_COUNT] = [
        ByteClass::ContinuationLow,
        ByteClass::Continuation,
        ByteClass::ContinuationHigh,
        ByteClass::Ascii,
        ByteClass::Lead2,
        ByteClass::Lead3Normal,
        ByteClass::Lead4Normal,
        ByteClass::Lead3Overlong,
        ByteClass::Lead3Surrogate,
        ByteClass::Lead4Overlong,
        ByteClass::Lead4TooLarge,
        ByteClass::Illegal,
    ];

    pub const fn from_index(index: u8) -> Option<Self> {
        if (index as usize) < CLASS_COUNT {
            Some(Self::ALL[index as usize])
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum State {
    Valid = 0,
    OneMore = 12,
    TwoMore = 24,
    ThreeMore = 36,
    ThreeByteOverlong = 48,
    ThreeByteSurrogate = 60,
    FourByteOverlong = 72,
    FourByteTooLarge = 84,
    /// Absorbing.
    Error = 96,
}

impl State {
    pub const ALL: [State; STATE_COUNT] = [
        State::Valid,
        State::OneMore,
        State::TwoMore,
        State::ThreeMore,
        State::ThreeByteOverlong,
        State::ThreeByteSurrogate,
        State::FourByteOverlong,
        State::FourByteTooLarge,
        State::Error,
    ];

    pub const fn from_index(index: u8) -> Option<Self> {
        if (index as usize).is_multiple_of(CLASS_COUNT)
            && (index as usize) < CLASS_COUNT * STATE_COUNT
        {
            Some(Self::ALL[index as usize / CLASS_COUNT])
        } else {
            None
        }
    }
}

pub fn byte_class(b: u8) -> ByteClass {
    FSM_TABLES.class_of(b)
}

impl FsmTables {
    #[inline(always)]
    fn step(&self, state: u8, b: u8) -> u8 {
        let class = self.class_of[b as usize];
        // SAFETY: FSM_TABLES is checked at compile time to hold states that are
        // multiples of 12 below 108 and classes below 12, so the sum is < 108.
        unsafe { *self.next.get_unchecked(state as usize + class as usize) }
    }

    #[inline(always)]
    fn run(&self, input: &[u8], start: u8) -> u8 {
        input.iter().fold(start, |state, &b| self.step(state, b))
    }
}

/// Folds the transition function over `input`, starting from `start`.
///
/// The returned state can seed the next segment of a split input.
pub fn validate_fsm(input: &[u8], start: State) -> State {
    let end = FSM_TABLES.run(input, start as u8);
    State::from_index(end).expect("transition table holds state indices")
}

#[inline]
fn is_continuation(b: u8) -> bool {
    b & 0xC0 == 0x80
}

/// First non-continuation position at or after `candidate`, or `None` when
/// four consecutive continuation bytes make the input invalid outright.
fn region_start(input: &[u8], candidate: usize) -> Option<usize> {
    for pos in candidate..candidate + 4 {
        match input.get(pos) {
            None => return Some(input.len()),
            Some(&b) if !is_continuation(b) => return Some(pos),
            Some(_) => {}
        }
    }
    None
}

/// Split points used by [`validate_fsm_interleaved`].
pub fn interleave_splits(input: &[u8]) -> Option<(usize, usize)> {
    let n = input.len();
    let first = region_start(input, n / 3)?;
    let second = region_start(input, 2 * n / 3)?;
    Some((first, second.max(first)))
}

/// Three-stream interleaved finite-state validation.
pub fn validate_fsm_interleaved(input: &[u8]) -> bool {
    let tables = &FSM_TABLES;
    if input.len() < INTERLEAVE_MIN_LEN {
        return tables.run(input, State::Valid as u8) == State::Valid as u8;
    }
    let Some((first, second)) = interleave_splits(input) else {
        return false;
    };
    let (a, rest) = input.split_at(first);
    let (b, c) = rest.split_at(second - first);

    let common = a.len().min(b.len()).min(c.len());
    let (mut sa, mut sb, mut sc) = (0u8, 0u8, 0u8);
    for ((&x, &y), &z) in a[..common].iter().zip(&b[..common]).zip(&c[..common]) {
        sa = tables.step(sa, x);
        sb = tables.step(sb, y);
        sc = tables.step(sc, z);
    }
    sa = tables.run(&a[common..], sa);
    sb = tables.run(&b[common..], sb);
    sc = tables.run(&c[common..], sc);
    (sa | sb | sc) == State::Valid as u8
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::oracle_validate;
    use proptest::prelude::*;

    #[test]
    fn byte_class_examples() {
        assert_eq!(byte_class(0x41), ByteClass::Ascii);
        assert_eq!(byte_class(0x85), ByteClass::ContinuationLow);
        assert_eq!(byte_class(0x95), ByteClass::Continuation);
        assert_eq!(byte_class(0xE0), ByteClass::Lead3Overlong);
        assert_eq!(byte_class(0xC1), ByteClass::Illegal);
    }

    #[test]
    fn fold_examples() {
        assert_eq!(
            validate_fsm(&[0xE9, 0x8F, 0xA1], State::Valid),
            State::Valid
        );
        assert_eq!(validate_fsm(&[0xE9, 0x8F], State::Valid), State::OneMore);
        assert_eq!(
            validate_fsm(&[0xED, 0xA0, 0x80], State::Valid),
            State::Error
        );
        assert!(!oracle_validate(&[0xED, 0xA0, 0x80]).is_valid());
    }

    #[test]
    fn error_is_absorbing() {
        for b in 0..=255u8 {
            assert_eq!(validate_fsm(&[b], State::Error), State::Error);
        }
    }

    #[test]
    fn state_class_indices_are_unique() {
        let mut seen = std::collections::HashSet::new();
        for s in State::ALL {
            for c in ByteClass::ALL {
                let idx = s as usize + c as usize;
                assert!(idx < 108);
                assert!(seen.insert(idx));
            }
        }
    }

    #[test]
    fn interleaved_examples() {
        assert!(validate_fsm_interleaved(&vec![b'a'; 3 * 1024]));
        let cjk: Vec<u8> = [0xE9, 0x8F, 0xA1].repeat(16);
        assert_eq!(cjk.len(), 48);
        assert!(oracle_validate(&cjk).is_valid());
        assert!(validate_fsm_interleaved(&cjk));
        // n/3 = 16 is a continuation byte, so the split moves forward.
        assert_eq!(interleave_splits(&cjk), Some((18, 33)));
    }

    #[test]
    fn four_continuations_at_split_rejected() {
        let mut input = vec![b'a'; 60];
        input[20..24].copy_from_slice(&[0x80; 4]);
        assert_eq!(interleave_splits(&input), None);
        assert!(!validate_fsm_interleaved(&input));
    }

    #[test]
    fn interleaved_agrees_around_threshold() {
        for len in 28..40 {
            for pos in 0..len {
                for bad in [0x80u8, 0xC3, 0xF0, 0xFF] {
                    let mut input = vec![b'z'; len];
                    input[pos] = bad;
                    assert_eq!(
                        validate_fsm_interleaved(&input),
                        oracle_validate(&input).is_valid(),
                        "{input:02x?}"
                    );
                }
            }
        }
    }

    proptest! {
        #[test]
        fn segments_compose(bytes in prop::collection::vec(any::<u8>(), 0..64), split in any::<prop::sample::Index>()) {
            let at = if bytes.is_empty() { 0 } else { split.index(bytes.len() + 1) };
            let (x, y) = bytes.split_at(at);
            prop_assert_eq!(
                validate_fsm(y, validate_fsm(x, State::Valid)),
                validate_fsm(&bytes, State::Valid)
            );
        }

        #[test]
        fn interleaved_matches_oracle(text in "\\PC{0,120}", pos in any::<prop::sample::Index>(), byte in any::<u8>()) {
            let mut bytes = text.into_bytes();
            prop_assert!(validate_fsm_interleaved(&bytes));
            if !bytes.is_empty() {
                let at = pos.index(bytes.len());
                bytes[at] = byte;
            }
            prop_assert_eq!(validate_fsm_interleaved(&bytes), oracle_validate(&bytes).is_valid());
        }
    }
}
