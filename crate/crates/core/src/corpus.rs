//! Seeded generators for random valid UTF-8 and for targeted invalid inputs.
//!
//! All randomness comes from ChaCha8 seeded with `seed_from_u64`, so a
//! `(spec, strategy)` pair reproduces the same bytes on every platform.

use std::fmt;
use std::str::FromStr;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::oracle::{encode_code_point, oracle_validate};

/// Identifier of the generator algorithm, stored alongside generated corpora.
pub const RNG_ALGORITHM: &str = "chacha8";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("no character lengths selected")]
    EmptyKinds,
    #[error("character length {0} is not in 1..=4")]
    BadLength(u8),
    #[error("cannot parse character lengths from {0:?}")]
    Parse(String),
    #[error("unknown mutation strategy {0:?}")]
    UnknownStrategy(String),
}

/// Nonempty subset of the encoded lengths {1, 2, 3, 4}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct KindSet(u8);

impl KindSet {
    pub const ALL: KindSet = KindSet(0b1111);

    pub fn new(lengths: &[u8]) -> Result<Self, SpecError> {
        let mut bits = 0;
        for &len in lengths {
            if !(1..=4).contains(&len) {
                return Err(SpecError::BadLength(len));
            }
            bits |= 1 << (len - 1);
        }
        if bits == 0 {
            return Err(SpecError::EmptyKinds);
        }
        Ok(KindSet(bits))
    }

    /// Lengths `1..=max`.
    pub fn up_to(max: u8) -> Result<Self, SpecError> {
        Self::new(&(1..=max).collect::<Vec<_>>())
    }

    pub fn contains(self, len: u8) -> bool {
        (1..=4).contains(&len) && self.0 & (1 << (len - 1)) != 0
    }

    pub fn lengths(self) -> Vec<u8> {
        (1..=4).filter(|&len| self.contains(len)).collect()
    }
}

impl fmt::Display for KindSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lengths = self.lengths();
        let contiguous = lengths.windows(2).all(|w| w[1] == w[0] + 1);
        if lengths.len() > 1 && contiguous {
            write!(f, "{}-{}", lengths[0], lengths[lengths.len() - 1])
        } else {
            let parts: Vec<String> = lengths.iter().map(u8::to_string).collect();
            f.write_str(&parts.join(","))
        }
    }
}

/// Parses `"1-3"`, `"1,2,4"` or `"2"`.
impl FromStr for KindSet {
    type Err = SpecError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parse = |t: &str| {
            t.trim()
                .parse::<u8>()
                .map_err(|_| SpecError::Parse(s.to_owned()))
        };
        let mut lengths = Vec::new();
        for part in s.split(',') {
            match part.split_once('-') {
                Some((lo, hi)) => {
                    let (lo, hi) = (parse(lo)?, parse(hi)?);
                    if lo > hi {
                        return Err(SpecError::Parse(s.to_owned()));
                    }
                    lengths.extend(lo..=hi);
                }
                None => lengths.push(parse(part)?),
            }
        }
        KindSet::new(&lengths)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GeneratorSpec {
    pub kinds: KindSet,
    pub target_size: usize,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn new(kinds: KindSet, target_size: usize, seed: u64) -> Self {
        GeneratorSpec {
            kinds,
            target_size,
            seed,
        }
    }
}

/// Draws a code point whose shortest encoding is exactly `len` bytes,
/// uniformly among the non-surrogate scalar values of that length.
pub fn random_code_point<R: Rng + ?Sized>(rng: &mut R, len: u8) -> u32 {
    match len {
        1 => rng.random_range(0..=0x7F),
        2 => rng.random_range(0x80..=0x7FF),
        3 => {
            // 0x800..=0xFFFF without the 0x800 surrogates.
            let cp = rng.random_range(0x800..=0xF7FF);
            if cp >= 0xD800 {
                cp + 0x800
            } else {
                cp
            }
        }
        4 => rng.random_range(0x1_0000..=0x10_FFFF),
        _ => unreachable!("length checked by KindSet"),
    }
}

fn push_random_char(rng: &mut ChaCha8Rng, kinds: &[u8], out: &mut Vec<u8>) -> u8 {
    let len = *kinds.choose(rng).expect("KindSet is nonempty");
    let cp = random_code_point(rng, len);
    out.extend(encode_code_point(cp).expect("scalar values encode"));
    len
}

fn valid_with(rng: &mut ChaCha8Rng, spec: &GeneratorSpec) -> Vec<u8> {
    let kinds = spec.kinds.lengths();
    let mut out = Vec::with_capacity(spec.target_size + 3);
    while out.len() < spec.target_size {
        push_random_char(rng, &kinds, &mut out);
    }
    out
}

/// Random valid UTF-8 of `target_size..=target_size + 3` bytes.
pub fn generate_valid(spec: &GeneratorSpec) -> Vec<u8> {
    valid_with(&mut ChaCha8Rng::seed_from_u64(spec.seed), spec)
}

/// Ways of turning a valid string into an invalid one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mutation {
    /// Replace one byte with a different value, retrying until invalid.
    Flip,
    /// Cut the string inside a multi-byte character.
    Truncate,
    /// Insert a stray continuation byte at a character boundary.
    InsertContinuation,
    /// Splice an overlong encoding at a character boundary.
    Overlong,
    /// Splice an encoded surrogate at a character boundary.
    Surrogate,
    /// Splice an encoding of a value above U+10FFFF at a character boundary.
    TooLarge,
}

impl Mutation {
    pub const ALL: [Mutation; 6] = [
        Mutation::Flip,
        Mutation::Truncate,
        Mutation::InsertContinuation,
        Mutation::Overlong,
        Mutation::Surrogate,
        Mutation::TooLarge,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Mutation::Flip => "flip",
            Mutation::Truncate => "truncate",
            Mutation::InsertContinuation => "insert_continuation",
            Mutation::Overlong => "overlong",
            Mutation::Surrogate => "surrogate",
            Mutation::TooLarge => "too_large",
        }
    }
}

impl fmt::Display for Mutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mutation {
    type Err = SpecError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Mutation::ALL
            .into_iter()
            .find(|m| m.name() == s || m.name().replace('_', "-") == s)
            .ok_or_else(|| SpecError::UnknownStrategy(s.to_owned()))
    }
}

fn is_boundary(bytes: &[u8], i: usize) -> bool {
    i == bytes.len() || bytes[i] & 0xC0 != 0x80
}

/// Character boundary at or before `offset` (clamped to the string).
fn boundary_at_or_before(bytes: &[u8], offset: usize) -> usize {
    let mut i = offset.min(bytes.len());
    while !is_boundary(bytes, i) {
        i -= 1;
    }
    i
}

fn overlong_sequence(rng: &mut ChaCha8Rng) -> Vec<u8> {
    // Encode a value with more bytes than its shortest form needs.
    let (cp, len) = match rng.random_range(0..3) {
        0 => (rng.random_range(0..0x80u32), 2),
        1 => (rng.random_range(0..0x800u32), 3),
        _ => (rng.random_range(0..0x1_0000u32), 4),
    };
    let mut out = vec![0u8; len];
    let mut v = cp;
    for b in out[1..].iter_mut().rev() {
        *b = 0x80 | (v & 0x3F) as u8;
        v >>= 6;
    }
    out[0] = match len {
        2 => 0xC0 | v as u8,
        3 => 0xE0 | v as u8,
        _ => 0xF0 | v as u8,
    };
    out
}

fn spliced_sequence(rng: &mut ChaCha8Rng, mutation: Mutation) -> Vec<u8> {
    let cp = match mutation {
        Mutation::Overlong => return overlong_sequence(rng),
        Mutation::Surrogate => rng.random_range(0xD800..=0xDFFF),
        Mutation::TooLarge => rng.random_range(0x11_0000..=0x1F_FFFF),
        _ => unreachable!(),
    };
    encode_code_point(cp).expect("below 0x200000")
}

fn mutate(
    rng: &mut ChaCha8Rng,
    mut bytes: Vec<u8>,
    mutation: Mutation,
    at: Option<usize>,
) -> Vec<u8> {
    let pick = |rng: &mut ChaCha8Rng, len: usize| at.unwrap_or_else(|| rng.random_range(0..=len));
    match mutation {
        Mutation::Flip => {
            let original = bytes.clone();
            let mut pos = pick(rng, original.len().saturating_sub(1)).min(original.len() - 1);
            loop {
                let replacement = loop {
                    let b: u8 = rng.random();
                    if b != original[pos] {
                        break b;
                    }
                };
                bytes[pos] = replacement;
                if !oracle_validate(&bytes).is_valid() {
                    return bytes;
                }
                bytes[pos] = original[pos];
                if at.is_none() {
                    pos = rng.random_range(0..original.len());
                }
            }
        }
        Mutation::Truncate => {
            let target = pick(rng, bytes.len());
            let start = boundary_at_or_before(&bytes, target);
            let char_len = bytes.get(start).map_or(0, |b| b.leading_ones() as usize);
            if char_len >= 2 {
                let cut = start + rng.random_range(1..char_len);
                bytes.truncate(cut);
            } else {
                // Nothing multi-byte to cut here: end with a truncated character.
                bytes.truncate(start);
                let len = rng.random_range(2..=4);
                let full = encode_code_point(random_code_point(rng, len)).unwrap();
                let keep = rng.random_range(1..full.len());
                bytes.extend_from_slice(&full[..keep]);
            }
            bytes
        }
        Mutation::InsertContinuation => {
            let pos = boundary_at_or_before(&bytes, pick(rng, bytes.len()));
            bytes.insert(pos, rng.random_range(0x80..=0xBF));
            bytes
        }
        Mutation::Overlong | Mutation::Surrogate | Mutation::TooLarge => {
            let pos = boundary_at_or_before(&bytes, pick(rng, bytes.len()));
            let seq = spliced_sequence(rng, mutation);
            bytes.splice(pos..pos, seq);
            bytes
        }
    }
}

fn invalid_rng(spec: &GeneratorSpec, mutation: Mutation) -> ChaCha8Rng {
    // Separate streams per strategy so each is reproducible on its own.
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(mutation as u64 + 1);
    rng
}

fn base_for_invalid(rng: &mut ChaCha8Rng, spec: &GeneratorSpec) -> Vec<u8> {
    let spec = GeneratorSpec {
        target_size: spec.target_size.max(1),
        ..*spec
    };
    valid_with(rng, &spec)
}

/// A string the oracle rejects, built by applying `mutation` to a random
/// valid string at a random position.
pub fn generate_invalid(spec: &GeneratorSpec, mutation: Mutation) -> Vec<u8> {
    let mut rng = invalid_rng(spec, mutation);
    let base = base_for_invalid(&mut rng, spec);
    mutate(&mut rng, base, mutation, None)
}

/// Like [`generate_invalid`], with the mutation placed at (or at the
/// character boundary just before) byte `offset`.
pub fn generate_invalid_at(spec: &GeneratorSpec, mutation: Mutation, offset: usize) -> Vec<u8> {
    let mut rng = invalid_rng(spec, mutation);
    let base = base_for_invalid(&mut rng, spec);
    let offset = offset.min(base.len() - 1);
    mutate(&mut rng, base, mutation, Some(offset))
}

/// Number of places where consecutive characters change encoded length.
pub fn width_alternations(valid: &[u8]) -> usize {
    let mut count = 0;
    let mut last = None;
    let mut i = 0;
    while i < valid.len() {
        let len = (valid[i].leading_ones() as usize).max(1);
        if last.is_some_and(|l| l != len) {
            count += 1;
        }
        last = Some(len);
        i += len;
    }
    count
}
