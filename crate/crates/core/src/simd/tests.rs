use super::*;
use crate::oracle::oracle_validate;
use crate::tables::{pair_is_invalid, ERROR_BITS};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};

const EXAMPLE: [u8; 11] = [
    0x39, 0xC3, 0xA7, 0xE9, 0x8F, 0xA1, 0xF0, 0x9F, 0x98, 0x80, 0x00,
];

// Rows of the vectorized classification example, lanes 0..=10.
const PREV1: [u8; 11] = [
    0x00, 0x39, 0xC3, 0xA7, 0xE9, 0x8F, 0xA1, 0xF0, 0x9F, 0x98, 0x80,
];
const PREV1_HIGH: [u8; 11] = [
    0x00, 0x03, 0x0C, 0x0A, 0x0E, 0x08, 0x0A, 0x0F, 0x09, 0x09, 0x08,
];
const PREV1_LOW: [u8; 11] = [
    0x00, 0x09, 0x03, 0x07, 0x09, 0x0F, 0x01, 0x00, 0x0F, 0x08, 0x00,
];
const INPUT_HIGH: [u8; 11] = [
    0x03, 0x0C, 0x0A, 0x0E, 0x08, 0x0A, 0x0F, 0x09, 0x09, 0x08, 0x00,
];
const BYTE_1_HIGH: [u8; 11] = [
    0x02, 0x02, 0x21, 0x80, 0x15, 0x80, 0x80, 0x49, 0x80, 0x80, 0x80,
];
const BYTE_1_LOW: [u8; 11] = [
    0xE7, 0xCB, 0x83, 0xCB, 0xCB, 0xCB, 0xA3, 0xE7, 0xCB, 0xCB, 0xE7,
];
const BYTE_2_HIGH: [u8; 11] = [
    0x01, 0x01, 0xBA, 0x01, 0xE6, 0xBA, 0x01, 0xAE, 0xAE, 0xE6, 0x01,
];
const RESULT: [u8; 11] = [
    0x00, 0x00, 0x00, 0x00, 0x00, 0x80, 0x00, 0x00, 0x80, 0x80, 0x00,
];

fn lanes<V: ByteVector>(v: V) -> Vec<u8> {
    let mut out = vec![0u8; V::WIDTH];
    v.store(&mut out);
    out
}

fn padded<V: ByteVector>(bytes: &[u8]) -> V {
    let mut buf = [0u8; BLOCK_SIZE];
    buf[..bytes.len()].copy_from_slice(bytes);
    V::load(&buf)
}

#[inline(always)]
fn example_rows<V: ByteVector>() -> Vec<Vec<u8>> {
    let input = padded::<V>(&EXAMPLE);
    let previous = V::splat(0);
    let prev1 = input.prev1(previous);
    let t = &NIBBLE_TABLES;
    vec![
        lanes(prev1),
        lanes(prev1.shr4()),
        lanes(prev1.and(V::splat(0x0F))),
        lanes(input.shr4()),
        lanes(prev1.shr4().lookup16(&t.table1)),
        lanes(prev1.and(V::splat(0x0F)).lookup16(&t.table2)),
        lanes(input.shr4().lookup16(&t.table3)),
        lanes(classify(input, previous, t)),
    ]
}

/// Runs `$body` once per supported backend with `V` bound to its vector type.
macro_rules! each_backend {
    (|$v:ident| $body:expr) => {{
        let mut results = Vec::new();
        {
            type $v = Fallback16;
            results.push((Implementation::Fallback, $body));
        }
        #[cfg(any(target_arch = "x86", target_arch = "x86_64"))]
        {
            if Implementation::Ssse3.is_supported() {
                type $v = x86::Ssse3Vector;
                results.push((Implementation::Ssse3, unsafe { x86::run_ssse3(|| $body) }));
            }
            if Implementation::Avx2.is_supported() {
                type $v = x86::Avx2Vector;
                results.push((Implementation::Avx2, unsafe { x86::run_avx2(|| $body) }));
            }
        }
        results
    }};
}

#[test]
fn worked_example_rows() {
    let expected = [
        PREV1,
        PREV1_HIGH,
        PREV1_LOW,
        INPUT_HIGH,
        BYTE_1_HIGH,
        BYTE_1_LOW,
        BYTE_2_HIGH,
        RESULT,
    ];
    for (imp, rows) in each_backend!(|V| example_rows::<V>()) {
        for (row, want) in rows.iter().zip(&expected) {
            assert_eq!(&row[..11], want, "{}", imp.name());
        }
        // Padding lanes after the terminating zero stay zero in the result.
        assert!(rows[7][11..].iter().all(|&b| b == 0), "{}", imp.name());
    }
}

#[test]
fn ascii_classifies_to_zero() {
    for (imp, any) in each_backend!(|V| {
        let a = V::splat(0x41);
        classify(a, a, &NIBBLE_TABLES).any_nonzero()
    }) {
        assert!(!any, "{}", imp.name());
    }
}

#[inline(always)]
fn length_check<V: ByteVector>(bytes: &[u8]) -> bool {
    let mut buf = vec![b'a'; V::WIDTH];
    buf[..bytes.len()].copy_from_slice(bytes);
    let input = V::load(&buf);
    let previous = V::splat(0);
    let classified = classify(input, previous, &NIBBLE_TABLES);
    check_multibyte_lengths(input, previous, classified).any_nonzero()
}

#[test]
fn multibyte_length_examples() {
    for (imp, flags) in each_backend!(|V| [
        length_check::<V>(&[0xE9, 0x8F, 0xA1]),
        length_check::<V>(&[0xE9, 0x8F, 0x39]),
        length_check::<V>(&[0x39, 0x80, 0x80]),
        length_check::<V>(&[0xF0, 0x9F, 0x98, 0x80]),
        length_check::<V>(&[0xF0, 0x9F, 0x98, 0x41]),
        length_check::<V>(&[0xC3, 0xA7, 0x80]),
    ]) {
        assert_eq!(
            flags,
            [false, true, true, false, true, true],
            "{}",
            imp.name()
        );
    }
}

#[inline(always)]
fn incomplete_check<V: ByteVector>(tail: &[u8]) -> bool {
    let mut buf = vec![0x39u8; V::WIDTH];
    let at = V::WIDTH - tail.len();
    buf[at..].copy_from_slice(tail);
    check_incomplete(V::load(&buf)).any_nonzero()
}

#[test]
fn incomplete_examples() {
    for (imp, flags) in each_backend!(|V| [
        incomplete_check::<V>(&[0x39]),
        incomplete_check::<V>(&[0xF0, 0x9F, 0x98]),
        incomplete_check::<V>(&[0xF5]),
        incomplete_check::<V>(&[0xC3, 0xA7]),
        incomplete_check::<V>(&[0xC3]),
        incomplete_check::<V>(&[0xE9, 0x8F]),
        incomplete_check::<V>(&[0xE9, 0x8F, 0xA1]),
        incomplete_check::<V>(&[0xBF]),
    ]) {
        assert_eq!(
            flags,
            [false, true, true, false, true, true, false, false],
            "{}",
            imp.name()
        );
    }
}

#[test]
fn validate_examples() {
    for imp in Implementation::supported() {
        assert!(validate_lookup_with(imp, &EXAMPLE));
        assert!(validate_lookup_with(imp, &[]));
        assert!(!validate_lookup_with(imp, &[0xED, 0xB8, 0x80]));
        assert!(!validate_lookup_with(imp, &[0xF5]));
        assert!(!validate_lookup_with(imp, &[0xC3]));
    }
    assert!(validate_lookup(&EXAMPLE));
}

/// Width-agnostic reference for each vector operation.
fn reference_ops(a: &[u8], b: &[u8], table: &[u8; 16]) -> Vec<Vec<u8>> {
    let w = a.len();
    let prev = |n: usize| -> Vec<u8> {
        (0..w)
            .map(|i| if i >= n { a[i - n] } else { b[w - n + i] })
            .collect()
    };
    let map2 =
        |f: fn(u8, u8) -> u8| -> Vec<u8> { a.iter().zip(b).map(|(&x, &y)| f(x, y)).collect() };
    vec![
        prev(1),
        prev(2),
        prev(3),
        a.iter().map(|x| x >> 4).collect(),
        map2(|x, y| x & y),
        map2(|x, y| x | y),
        map2(|x, y| x ^ y),
        map2(|x, y| x & !y),
        a.iter().map(|x| table[usize::from(x & 0x0F)]).collect(),
        map2(u8::saturating_sub),
        map2(u8::max),
        vec![u8::from(a.iter().all(|&x| x < 0x80))],
        vec![u8::from(a.iter().any(|&x| x != 0))],
    ]
}

#[inline(always)]
fn vector_ops<V: ByteVector>(a: &[u8], b: &[u8], table: &[u8; 16]) -> Vec<Vec<u8>> {
    let (x, y) = (V::load(a), V::load(b));
    let nibbles = x.and(V::splat(0x0F));
    vec![
        lanes(x.prev1(y)),
        lanes(x.prev2(y)),
        lanes(x.prev3(y)),
        lanes(x.shr4()),
        lanes(x.and(y)),
        lanes(x.or(y)),
        lanes(x.xor(y)),
        lanes(x.and_not(y)),
        lanes(nibbles.lookup16(table)),
        lanes(x.saturating_sub(y)),
        lanes(x.max(y)),
        vec![u8::from(x.is_all_ascii())],
        vec![u8::from(x.any_nonzero())],
    ]
}

#[test]
fn backends_match_reference_ops() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    for round in 0..2000 {
        let mut a = [0u8; 32];
        let mut b = [0u8; 32];
        let mut table = [0u8; 16];
        rng.fill(&mut a);
        rng.fill(&mut b);
        rng.fill(&mut table);
        match round % 4 {
            0 => a.iter_mut().for_each(|x| *x &= 0x7F),
            1 => a = [0; 32],
            _ => {}
        }
        for (imp, got) in each_backend!(|V| vector_ops::<V>(&a, &b, &table)) {
            let w = imp.width();
            let want = reference_ops(&a[..w], &b[..w], &table);
            assert_eq!(got, want, "{} round {round}", imp.name());
        }
    }
}

#[test]
fn classify_all_pairs_at_lane_boundary() {
    for (imp, mismatches) in each_backend!(|V| {
        let mut bad = Vec::new();
        for b1 in 0..=255u8 {
            let mut prev = [0u8; BLOCK_SIZE];
            prev[V::WIDTH - 1] = b1;
            let previous = V::load(&prev);
            for b2 in 0..=255u8 {
                let mut cur = [0u8; BLOCK_SIZE];
                cur[0] = b2;
                let first_lane = lanes(classify(V::load(&cur), previous, &NIBBLE_TABLES))[0];
                if (first_lane & ERROR_BITS != 0) != pair_is_invalid(b1, b2) {
                    bad.push((b1, b2));
                }
            }
        }
        bad
    }) {
        assert!(
            mismatches.is_empty(),
            "{}: {:02x?}",
            imp.name(),
            &mismatches[..mismatches.len().min(8)]
        );
    }
}

#[test]
fn pairs_embedded_at_block_and_lane_edges() {
    for imp in Implementation::supported() {
        let w = imp.width();
        for offset in [0, w - 1, w, 63, 64] {
            let mut buf = vec![b' '; 160];
            for b1 in 0..=255u8 {
                for b2 in 0..=255u8 {
                    buf[offset] = b1;
                    buf[offset + 1] = b2;
                    assert_eq!(
                        validate_lookup_with(imp, &buf),
                        oracle_validate(&buf).is_valid(),
                        "{} offset {offset} pair {b1:02x} {b2:02x}",
                        imp.name()
                    );
                }
            }
            buf[offset] = b' ';
            buf[offset + 1] = b' ';
        }
    }
}

#[test]
fn truncated_tail_at_every_length() {
    let text = "aé鏡😀".repeat(30);
    let bytes = text.as_bytes();
    for end in 0..=bytes.len() {
        let prefix = &bytes[..end];
        let expected = oracle_validate(prefix).is_valid();
        for imp in Implementation::supported() {
            assert_eq!(
                validate_lookup_with(imp, prefix),
                expected,
                "{} len {end}",
                imp.name()
            );
        }
        assert_eq!(validate_by_vectors::<Fallback16>(prefix), expected);
    }
}

proptest! {
    #[test]
    fn backends_agree_with_oracle(
        text in "\\PC{0,200}",
        edits in prop::collection::vec((any::<prop::sample::Index>(), any::<u8>()), 0..3),
    ) {
        let mut bytes = text.into_bytes();
        for (at, byte) in edits {
            if !bytes.is_empty() {
                let i = at.index(bytes.len());
                bytes[i] = byte;
            }
        }
        let expected = oracle_validate(&bytes).is_valid();
        for imp in Implementation::supported() {
            prop_assert_eq!(validate_lookup_with(imp, &bytes), expected, "{}", imp.name());
        }
        prop_assert_eq!(validate_by_vectors::<Fallback16>(&bytes), expected);
    }

    #[test]
    fn error_accumulator_is_sticky(
        prefix in "\\PC{0,100}",
        bad in 0x80u8..=0xBF,
        suffix in "\\PC{0,300}",
    ) {
        let mut bytes = prefix.into_bytes();
        bytes.push(bad);
        let mut state = LookupState::<Fallback16>::new();
        let mut seen_error = false;
        bytes.extend_from_slice(suffix.as_bytes());
        bytes.resize(bytes.len().div_ceil(BLOCK_SIZE) * BLOCK_SIZE, 0);
        for block in bytes.chunks_exact(BLOCK_SIZE) {
            state.check_block(block.try_into().unwrap());
            if seen_error {
                prop_assert!(state.error_seen());
            }
            seen_error |= state.error_seen();
        }
        prop_assert!(!state.finish());
        for imp in Implementation::supported() {
            prop_assert!(!validate_lookup_with(imp, &bytes));
        }
    }
}
