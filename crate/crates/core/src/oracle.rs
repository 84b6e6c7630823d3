//! Reference validator.
//!
//! Decodes one character at a time into a code point and checks it against
//! the six validity rules. It is deliberately slow and straightforward: every
//! faster validator in this crate is tested against it.

use std::fmt;

use thiserror::Error;

/// Why a byte sequence is not valid UTF-8.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ErrorKind {
    /// Leading byte with five or more header bits (`0xF8..=0xFF`).
    FiveOrMoreHeaderBits,
    /// Leading byte not followed by enough continuation bytes.
    TooShort,
    /// Continuation byte that does not belong to any character.
    TooLong,
    /// Character not encoded in its shortest form.
    Overlong,
    /// Code point above U+10FFFF.
    TooLarge,
    /// Code point in U+D800..=U+DFFF.
    Surrogate,
}

impl ErrorKind {
    pub const ALL: [ErrorKind; 6] = [
        ErrorKind::FiveOrMoreHeaderBits,
        ErrorKind::TooShort,
        ErrorKind::TooLong,
        ErrorKind::Overlong,
        ErrorKind::TooLarge,
        ErrorKind::Surrogate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ErrorKind::FiveOrMoreHeaderBits => "FiveOrMoreHeaderBits",
            ErrorKind::TooShort => "TooShort",
            ErrorKind::TooLong => "TooLong",
            ErrorKind::Overlong => "Overlong",
            ErrorKind::TooLarge => "TooLarge",
            ErrorKind::Surrogate => "Surrogate",
        }
    }
}

impl fmt::Display for ErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Location and kind of the first invalid sequence in an input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Utf8Error {
    /// Index of the leading byte of the offending sequence.
    pub offset: usize,
    pub kind: ErrorKind,
}

impl fmt::Display for Utf8Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at offset {}", self.kind, self.offset)
    }
}

impl std::error::Error for Utf8Error {}

/// Outcome of a validation that reports diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Valid,
    Invalid(Utf8Error),
}

impl Verdict {
    pub(crate) fn invalid(offset: usize, kind: ErrorKind) -> Self {
        Verdict::Invalid(Utf8Error { offset, kind })
    }

    #[inline]
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid)
    }

    pub fn error(&self) -> Option<Utf8Error> {
        match *self {
            Verdict::Valid => None,
            Verdict::Invalid(e) => Some(e),
        }
    }

    pub fn into_result(self) -> Result<(), Utf8Error> {
        match self {
            Verdict::Valid => Ok(()),
            Verdict::Invalid(e) => Err(e),
        }
    }
}

/// Largest value the 4-byte bit layout can carry.
pub const MAX_ENCODABLE: u32 = 0x1F_FFFF;
pub const MAX_SCALAR: u32 = 0x10_FFFF;
pub const SURROGATES: std::ops::RangeInclusive<u32> = 0xD800..=0xDFFF;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum EncodeError {
    #[error("code point {0:#x} does not fit in four UTF-8 bytes")]
    OutOfRange(u32),
}

/// Encodes `cp` with the shortest UTF-8 bit layout.
///
/// Surrogates and values above U+10FFFF are encoded mechanically, which is
/// how the test suites build known-invalid inputs.
pub fn encode_code_point(cp: u32) -> Result<Vec<u8>, EncodeError> {
    let mut out = Vec::with_capacity(4);
    match cp {
        0..=0x7F => out.push(cp as u8),
        0x80..=0x7FF => {
            out.push(0xC0 | (cp >> 6) as u8);
            out.push(0x80 | (cp & 0x3F) as u8);
        }
        0x800..=0xFFFF => {
            out.push(0xE0 | (cp >> 12) as u8);
            out.push(0x80 | ((cp >> 6) & 0x3F) as u8);
            out.push(0x80 | (cp & 0x3F) as u8);
        }
        0x1_0000..=MAX_ENCODABLE => {
            out.push(0xF0 | (cp >> 18) as u8);
            out.push(0x80 | ((cp >> 12) & 0x3F) as u8);
            out.push(0x80 | ((cp >> 6) & 0x3F) as u8);
            out.push(0x80 | (cp & 0x3F) as u8);
        }
        _ => return Err(EncodeError::OutOfRange(cp)),
    }
    Ok(out)
}

#[inline]
fn is_continuation(b: u8) -> bool {
    b & 0xC0 == 0x80
}

/// Validates `input` character by character.
pub fn oracle_validate(input: &[u8]) -> Verdict {
    let mut i = 0;
    while i < input.len() {
        let lead = input[i];
        let len = match lead.leading_ones() {
            0 => 1,
            1 => return Verdict::invalid(i, ErrorKind::TooLong),
            n @ 2..=4 => n as usize,
            _ => return Verdict::invalid(i, ErrorKind::FiveOrMoreHeaderBits),
        };
        if len == 1 {
            i += 1;
            continue;
        }

        // Structure first: the character must be complete.
        let tail = match input.get(i + 1..i + len) {
            Some(tail) if tail.iter().all(|&b| is_continuation(b)) => tail,
            _ => return Verdict::invalid(i, ErrorKind::TooShort),
        };

        let mut cp = u32::from(lead) & (0x7F >> len);
        for &b in tail {
            cp = (cp << 6) | u32::from(b & 0x3F);
        }

        let shortest_min = match len {
            2 => 0x80,
            3 => 0x800,
            _ => 0x1_0000,
        };
        if cp < shortest_min {
            return Verdict::invalid(i, ErrorKind::Overlong);
        }
        if cp > MAX_SCALAR {
            return Verdict::invalid(i, ErrorKind::TooLarge);
        }
        if SURROGATES.contains(&cp) {
            return Verdict::invalid(i, ErrorKind::Surrogate);
        }
        i += len;
    }
    Verdict::Valid
}
