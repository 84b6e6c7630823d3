//! Branchy range validators.
//!
//! `validate_branchy` dispatches on the leading byte of each character and
//! range-checks its continuation bytes without decoding. `validate_branchy_ascii`
//! adds a 16-byte ASCII skip in front of the same dispatch.

use crate::oracle::{ErrorKind, Verdict};

const ASCII_MASK: u64 = 0x8080_8080_8080_8080;
const ASCII_STRIDE: usize = 16;

#[inline(always)]
fn is_continuation(b: u8) -> bool {
    (b as i8) < -64
}

/// Checks that `input[i + 1..i + len]` are continuation bytes.
#[inline(always)]
fn continuations(input: &[u8], i: usize, len: usize) -> Result<(), ErrorKind> {
    match input.get(i + 1..i + len) {
        Some(tail) if tail.iter().all(|&b| is_continuation(b)) => Ok(()),
        _ => Err(ErrorKind::TooShort),
    }
}

/// Error kind for leading bytes that fall into the "else" arm.
#[cold]
fn rejected_lead(input: &[u8], i: usize) -> ErrorKind {
    match input[i] {
        0x80..=0xBF => ErrorKind::TooLong,
        0xF8..=0xFF => ErrorKind::FiveOrMoreHeaderBits,
        0xC0 | 0xC1 => match continuations(input, i, 2) {
            Ok(()) => ErrorKind::Overlong,
            Err(kind) => kind,
        },
        // 0xF5..=0xF7
        _ => match continuations(input, i, 4) {
            Ok(()) => ErrorKind::TooLarge,
            Err(kind) => kind,
        },
    }
}

/// Validates the character starting at `i`; returns its length in bytes.
#[inline(always)]
fn step(input: &[u8], i: usize) -> Result<usize, ErrorKind> {
    let lead = input[i];
    match lead {
        0x00..=0x7F => Ok(1),
        0xC2..=0xDF => continuations(input, i, 2).map(|()| 2),
        0xE0 => {
            continuations(input, i, 3)?;
            if input[i + 1] < 0xA0 {
                return Err(ErrorKind::Overlong);
            }
            Ok(3)
        }
        0xED => {
            continuations(input, i, 3)?;
            if input[i + 1] >= 0xA0 {
                return Err(ErrorKind::Surrogate);
            }
            Ok(3)
        }
        0xE1..=0xEC | 0xEE..=0xEF => continuations(input, i, 3).map(|()| 3),
        0xF0 => {
            continuations(input, i, 4)?;
            if input[i + 1] < 0x90 {
                return Err(ErrorKind::Overlong);
            }
            Ok(4)
        }
        0xF1..=0xF3 => continuations(input, i, 4).map(|()| 4),
        0xF4 => {
            continuations(input, i, 4)?;
            if input[i + 1] >= 0x90 {
                return Err(ErrorKind::TooLarge);
            }
            Ok(4)
        }
        _ => Err(rejected_lead(input, i)),
    }
}

pub fn validate_branchy(input: &[u8]) -> Verdict {
    let mut i = 0;
    while i < input.len() {
        match step(input, i) {
            Ok(len) => i += len,
            Err(kind) => return Verdict::invalid(i, kind),
        }
    }
    Verdict::Valid
}

#[inline(always)]
fn load_u64(bytes: &[u8]) -> u64 {
    u64::from_le_bytes(bytes[..8].try_into().unwrap())
}

#[inline(always)]
fn branchy_ascii(input: &[u8], mut fast_paths: Option<&mut u64>) -> Verdict {
    let mut i = 0;
    while i < input.len() {
        if input.len() - i >= ASCII_STRIDE {
            let block = &input[i..i + ASCII_STRIDE];
            if (load_u64(block) | load_u64(&block[8..])) & ASCII_MASK == 0 {
                i += ASCII_STRIDE;
                if let Some(count) = fast_paths.as_deref_mut() {
                    *count += 1;
                }
                continue;
            }
        }
        match step(input, i) {
            Ok(len) => i += len,
            Err(kind) => return Verdict::invalid(i, kind),
        }
    }
    Verdict::Valid
}

pub fn validate_branchy_ascii(input: &[u8]) -> Verdict {
    branchy_ascii(input, None)
}

/// Same as [`validate_branchy_ascii`], also counting how many 16-byte ASCII
/// skips were taken.
pub fn validate_branchy_ascii_counted(input: &[u8]) -> (Verdict, u64) {
    let mut count = 0;
    let verdict = branchy_ascii(input, Some(&mut count));
    (verdict, count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{oracle_validate, Utf8Error};
    use proptest::prelude::*;

    #[test]
    fn worked_examples() {
        assert_eq!(validate_branchy(&[0xC3, 0xA7]), Verdict::Valid);
        assert_eq!(
            validate_branchy(&[0xE9, 0x8F, 0x39]),
            Verdict::invalid(0, ErrorKind::TooShort)
        );
        assert_eq!(
            validate_branchy(&[0xED, 0xA0, 0x80]),
            oracle_validate(&[0xED, 0xA0, 0x80])
        );
        assert_eq!(
            validate_branchy(&[0xED, 0xA0, 0x80]),
            Verdict::invalid(0, ErrorKind::Surrogate)
        );
    }

    #[test]
    fn ascii_fast_path_counts() {
        let input = [0x41u8; 64];
        assert_eq!(validate_branchy_ascii_counted(&input), (Verdict::Valid, 4));

        let mut short = vec![0x41u8; 15];
        short.extend([0xC3, 0xA7]);
        assert_eq!(validate_branchy_ascii_counted(&short), (Verdict::Valid, 0));
        assert_eq!(oracle_validate(&short), Verdict::Valid);

        let mut stray = vec![0x41u8; 16];
        stray.push(0x80);
        let (verdict, skips) = validate_branchy_ascii_counted(&stray);
        assert_eq!(verdict, Verdict::invalid(16, ErrorKind::TooLong));
        assert_eq!(verdict, oracle_validate(&stray));
        assert_eq!(skips, 1);
    }

    #[test]
    fn kinds_match_oracle_on_all_pairs() {
        for a in 0..=255u8 {
            for b in 0..=255u8 {
                let input = [a, b];
                let expected = oracle_validate(&input);
                assert_eq!(validate_branchy(&input), expected, "{input:02x?}");
                assert_eq!(validate_branchy_ascii(&input), expected, "{input:02x?}");
            }
        }
    }

    #[test]
    fn random_bytes_agree_with_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let mut buf = vec![0u8; 10_000];
            rng.fill(&mut buf[..]);
            // Bias towards mostly-valid text so errors do not all land at offset 0.
            let valid_prefix = rng.random_range(0..buf.len());
            for b in &mut buf[..valid_prefix] {
                *b &= 0x7F;
            }
            let expected = oracle_validate(&buf);
            assert_eq!(validate_branchy(&buf), expected);
            assert_eq!(validate_branchy_ascii(&buf), expected);
        }
    }

    proptest! {
        #[test]
        fn ascii_path_never_changes_verdict(
            text in "\\PC{0,80}",
            pos in any::<prop::sample::Index>(),
            byte in any::<u8>(),
        ) {
            let mut bytes = text.into_bytes();
            prop_assert_eq!(validate_branchy_ascii(&bytes), validate_branchy(&bytes));
            if !bytes.is_empty() {
                let at = pos.index(bytes.len());
                bytes[at] = byte;
            }
            let verdict = validate_branchy(&bytes);
            prop_assert_eq!(validate_branchy_ascii(&bytes), verdict);
            prop_assert_eq!(verdict, oracle_validate(&bytes));
            if let Verdict::Invalid(Utf8Error { offset, .. }) = verdict {
                prop_assert!(offset < bytes.len());
            }
        }
    }
}
