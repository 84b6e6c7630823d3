//! Table construction and verification.
//!
//! The nibble tables are generated from eight two-byte patterns, each a
//! product of three nibble sets (high and low nibble of the first byte, high
//! nibble of the second). Bits 0..=6 mark errors; bit 7 marks a pair of
//! continuation bytes. `verify_nibble_tables` checks the generated tables
//! against a pair predicate written directly as byte-range comparisons.

use std::fmt;

use crate::fsm::{ByteClass, State, CLASS_COUNT, STATE_COUNT};

/// Set of nibble values, one bit per nibble.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NibbleSet(pub u16);

impl NibbleSet {
    pub const ALL: NibbleSet = NibbleSet(0xFFFF);

    /// Nibbles `lo..=hi`.
    pub const fn range(lo: u8, hi: u8) -> Self {
        let mut bits = 0u16;
        let mut n = lo;
        while n <= hi {
            bits |= 1 << n;
            n += 1;
        }
        NibbleSet(bits)
    }

    pub const fn single(n: u8) -> Self {
        NibbleSet(1 << n)
    }

    pub const fn union(self, other: NibbleSet) -> Self {
        NibbleSet(self.0 | other.0)
    }

    pub const fn contains(self, nibble: u8) -> bool {
        self.0 & (1 << nibble) != 0
    }
}

/// One row of the two-byte pattern list.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ErrorPattern {
    pub bit: u8,
    pub name: &'static str,
    pub byte1_high: NibbleSet,
    pub byte1_low: NibbleSet,
    pub byte2_high: NibbleSet,
}

impl ErrorPattern {
    pub const fn matches(&self, byte1: u8, byte2: u8) -> bool {
        self.byte1_high.contains(byte1 >> 4)
            && self.byte1_low.contains(byte1 & 0x0F)
            && self.byte2_high.contains(byte2 >> 4)
    }
}

pub const TOO_SHORT: u8 = 1 << 0;
pub const TOO_LONG: u8 = 1 << 1;
pub const OVERLONG_3: u8 = 1 << 2;
pub const TOO_LARGE: u8 = 1 << 3;
pub const SURROGATE: u8 = 1 << 4;
pub const OVERLONG_2: u8 = 1 << 5;
/// Overlong 4-byte lead `F0` and too-large leads `F5..=FF`, both followed by `8_`.
pub const OVERLONG_4_TOO_LARGE: u8 = 1 << 6;
pub const TWO_CONTS: u8 = 1 << 7;

pub const ERROR_BITS: u8 = 0x7F;

const ASCII: NibbleSet = NibbleSet::range(0x0, 0x7);
const CONT: NibbleSet = NibbleSet::range(0x8, 0xB);
const LEAD: NibbleSet = NibbleSet::range(0xC, 0xF);

pub const ERROR_PATTERNS: [ErrorPattern; 8] = [
    ErrorPattern {
        bit: 0,
        name: "Too Short (lead followed by ASCII or lead)",
        byte1_high: LEAD,
        byte1_low: NibbleSet::ALL,
        byte2_high: ASCII.union(LEAD),
    },
    ErrorPattern {
        bit: 1,
        name: "Too Long (ASCII + continuation)",
        byte1_high: ASCII,
        byte1_low: NibbleSet::ALL,
        byte2_high: CONT,
    },
    ErrorPattern {
        bit: 2,
        name: "Overlong (3-byte)",
        byte1_high: NibbleSet::single(0xE),
        byte1_low: NibbleSet::single(0x0),
        byte2_high: NibbleSet::range(0x8, 0x9),
    },
    ErrorPattern {
        bit: 3,
        name: "Too Large",
        byte1_high: NibbleSet::single(0xF),
        byte1_low: NibbleSet::range(0x4, 0xF),
        byte2_high: NibbleSet::range(0x9, 0xB),
    },
    ErrorPattern {
        bit: 4,
        name: "Surrogate",
        byte1_high: NibbleSet::single(0xE),
        byte1_low: NibbleSet::single(0xD),
        byte2_high: NibbleSet::range(0xA, 0xB),
    },
    ErrorPattern {
        bit: 5,
        name: "Overlong (2-byte)",
        byte1_high: NibbleSet::single(0xC),
        byte1_low: NibbleSet::range(0x0, 0x1),
        byte2_high: CONT,
    },
    ErrorPattern {
        bit: 6,
        name: "Overlong (4-byte) + Too Large",
        byte1_high: NibbleSet::single(0xF),
        byte1_low: NibbleSet::single(0x0).union(NibbleSet::range(0x5, 0xF)),
        byte2_high: NibbleSet::single(0x8),
    },
    ErrorPattern {
        bit: 7,
        name: "Two Continuations (not an error)",
        byte1_high: CONT,
        byte1_low: NibbleSet::ALL,
        byte2_high: CONT,
    },
];

/// The three 16-entry tables of the vectorized classifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NibbleTables {
    /// Indexed by the high nibble of the first byte.
    pub table1: [u8; 16],
    /// Indexed by the low nibble of the first byte.
    pub table2: [u8; 16],
    /// Indexed by the high nibble of the second byte.
    pub table3: [u8; 16],
}

impl NibbleTables {
    #[inline]
    pub const fn classify_pair(&self, byte1: u8, byte2: u8) -> u8 {
        self.table1[(byte1 >> 4) as usize]
            & self.table2[(byte1 & 0x0F) as usize]
            & self.table3[(byte2 >> 4) as usize]
    }
}

pub const fn build_nibble_tables() -> NibbleTables {
    let mut tables = NibbleTables {
        table1: [0; 16],
        table2: [0; 16],
        table3: [0; 16],
    };
    let mut p = 0;
    while p < ERROR_PATTERNS.len() {
        let pattern = &ERROR_PATTERNS[p];
        let mask = 1u8 << pattern.bit;
        let mut n = 0u8;
        while n < 16 {
            if pattern.byte1_high.contains(n) {
                tables.table1[n as usize] |= mask;
            }
            if pattern.byte1_low.contains(n) {
                tables.table2[n as usize] |= mask;
            }
            if pattern.byte2_high.contains(n) {
                tables.table3[n as usize] |= mask;
            }
            n += 1;
        }
        p += 1;
    }
    tables
}

pub const NIBBLE_TABLES: NibbleTables = build_nibble_tables();

#[inline]
fn is_cont(b: u8) -> bool {
    (0x80..=0xBF).contains(&b)
}

/// Whether the two adjacent bytes `byte1 byte2` can never occur in valid UTF-8.
///
/// Written from the list of invalid one- and two-byte sequences as explicit
/// range tests, independent of the nibble patterns.
pub fn pair_is_invalid(byte1: u8, byte2: u8) -> bool {
    let overlong_2 = matches!(byte1, 0xC0 | 0xC1);
    let overlong_3 = byte1 == 0xE0 && (0x80..=0x9F).contains(&byte2);
    let overlong_4 = byte1 == 0xF0 && (0x80..=0x8F).contains(&byte2);
    let too_short = byte1 >= 0xC0 && !is_cont(byte2);
    let too_long = byte1 < 0x80 && is_cont(byte2);
    let surrogate = byte1 == 0xED && (0xA0..=0xBF).contains(&byte2);
    let too_large = (byte1 == 0xF4 && (0x90..=0xBF).contains(&byte2)) || byte1 >= 0xF5;
    overlong_2 || overlong_3 || overlong_4 || too_short || too_long || surrogate || too_large
}

/// First pair on which a set of nibble tables disagrees with the predicate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairMismatch {
    pub byte1: u8,
    pub byte2: u8,
    pub classified: u8,
    pub expected_error: bool,
    pub expected_two_conts: bool,
}

impl fmt::Display for PairMismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "pair {:02X} {:02X}: classified {:02X}, expected error={} two_conts={}",
            self.byte1, self.byte2, self.classified, self.expected_error, self.expected_two_conts
        )
    }
}

impl std::error::Error for PairMismatch {}

/// Checks all 65,536 byte pairs.
pub fn verify_nibble_tables(tables: &NibbleTables) -> Result<(), PairMismatch> {
    for byte1 in 0..=255u8 {
        for byte2 in 0..=255u8 {
            let classified = tables.classify_pair(byte1, byte2);
            let expected_error = pair_is_invalid(byte1, byte2);
            let expected_two_conts = is_cont(byte1) && is_cont(byte2);
            if (classified & ERROR_BITS != 0) != expected_error
                || (classified & TWO_CONTS != 0) != expected_two_conts
            {
                return Err(PairMismatch {
                    byte1,
                    byte2,
                    classified,
                    expected_error,
                    expected_two_conts,
                });
            }
        }
    }
    Ok(())
}

/// Byte classifier and transition table of the finite-state validator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FsmTables {
    pub(crate) class_of: [u8; 256],
    pub(crate) next: [u8; CLASS_COUNT * STATE_COUNT],
}

impl FsmTables {
    pub fn class_of(&self, b: u8) -> ByteClass {
        ByteClass::from_index(self.class_of[b as usize]).expect("class table holds class indices")
    }

    pub fn next(&self, state: State, class: ByteClass) -> State {
        State::from_index(self.next[state as usize + class as usize])
            .expect("transition table holds state indices")
    }

    pub fn raw_class_table(&self) -> &[u8; 256] {
        &self.class_of
    }

    pub fn raw_transition_table(&self) -> &[u8; CLASS_COUNT * STATE_COUNT] {
        &self.next
    }
}

const fn class_for(b: u8) -> ByteClass {
    match b {
        0x00..=0x7F => ByteClass::Ascii,
        0x80..=0x8F => ByteClass::ContinuationLow,
        0x90..=0x9F => ByteClass::Continuation,
        0xA0..=0xBF => ByteClass::ContinuationHigh,
        0xC2..=0xDF => ByteClass::Lead2,
        0xE0 => ByteClass::Lead3Overlong,
        0xED => ByteClass::Lead3Surrogate,
        0xE1..=0xEC | 0xEE..=0xEF => ByteClass::Lead3Normal,
        0xF0 => ByteClass::Lead4Overlong,
        0xF1..=0xF3 => ByteClass::Lead4Normal,
        0xF4 => ByteClass::Lead4TooLarge,
        0xC0 | 0xC1 | 0xF5..=0xFF => ByteClass::Illegal,
    }
}

const fn transition(state: State, class: ByteClass) -> State {
    use ByteClass::*;
    use State::*;
    match (state, class) {
        (Valid, Ascii) => Valid,
        (Valid, Lead2) => OneMore,
        (Valid, Lead3Normal) => TwoMore,
        (Valid, Lead4Normal) => ThreeMore,
        (Valid, Lead3Overlong) => ThreeByteOverlong,
        (Valid, Lead3Surrogate) => ThreeByteSurrogate,
        (Valid, Lead4Overlong) => FourByteOverlong,
        (Valid, Lead4TooLarge) => FourByteTooLarge,
        (OneMore, ContinuationLow | Continuation | ContinuationHigh) => Valid,
        (TwoMore, ContinuationLow | Continuation | ContinuationHigh) => OneMore,
        (ThreeMore, ContinuationLow | Continuation | ContinuationHigh) => TwoMore,
        (ThreeByteOverlong, ContinuationHigh) => OneMore,
        (ThreeByteSurrogate, ContinuationLow | Continuation) => OneMore,
        (FourByteOverlong, Continuation | ContinuationHigh) => TwoMore,
        (FourByteTooLarge, ContinuationLow) => TwoMore,
        _ => Error,
    }
}

pub const fn build_fsm_tables() -> FsmTables {
    let mut class_of = [0u8; 256];
    let mut b = 0usize;
    while b < 256 {
        class_of[b] = class_for(b as u8) as u8;
        b += 1;
    }

    let mut next = [0u8; CLASS_COUNT * STATE_COUNT];
    let mut s = 0;
    while s < STATE_COUNT {
        let state = State::ALL[s];
        let mut c = 0;
        while c < CLASS_COUNT {
            let class = ByteClass::ALL[c];
            next[state as usize + class as usize] = transition(state, class) as u8;
            c += 1;
        }
        s += 1;
    }
    FsmTables { class_of, next }
}

/// Built at compile time; `validate_fsm` indexes these without bounds checks,
/// which relies on every entry being a valid class or state index.
pub static FSM_TABLES: FsmTables = {
    let tables = build_fsm_tables();
    let mut i = 0;
    while i < 256 {
        assert!((tables.class_of[i] as usize) < CLASS_COUNT);
        i += 1;
    }
    let mut i = 0;
    while i < tables.next.len() {
        let s = tables.next[i] as usize;
        assert!(s.is_multiple_of(CLASS_COUNT) && s < CLASS_COUNT * STATE_COUNT);
        i += 1;
    }
    tables
};
