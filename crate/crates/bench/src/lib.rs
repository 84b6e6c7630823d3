//! Inputs and validator table shared by the criterion benches.

use utf8_lookup::{
    generate_valid, validate_branchy, validate_branchy_ascii, validate_fsm_interleaved,
    validate_lookup_with, GeneratorSpec, Implementation, KindSet,
};

pub type ValidateFn = fn(&[u8]) -> bool;

pub const CORPUS_SIZE: usize = 16 * 1024;
pub const SEED: u64 = 1;

/// Character-length mixes used for the throughput groups.
pub const KIND_MIXES: [&str; 5] = ["1", "1-2", "1-3", "1-4", "2-4"];

pub fn corpus(kinds: &str, size: usize) -> Vec<u8> {
    let kinds: KindSet = kinds.parse().expect("valid kind set");
    generate_valid(&GeneratorSpec::new(kinds, size, SEED))
}

pub fn validators() -> Vec<(String, ValidateFn)> {
    let mut out: Vec<(String, ValidateFn)> = vec![
        ("branchy".into(), |x| validate_branchy(x).is_valid()),
        ("branchy-ascii".into(), |x| {
            validate_branchy_ascii(x).is_valid()
        }),
        ("fsm".into(), validate_fsm_interleaved),
    ];
    for imp in Implementation::supported() {
        let f: ValidateFn = match imp {
            Implementation::Fallback => |x| validate_lookup_with(Implementation::Fallback, x),
            Implementation::Ssse3 => |x| validate_lookup_with(Implementation::Ssse3, x),
            Implementation::Avx2 => |x| validate_lookup_with(Implementation::Avx2, x),
        };
        out.push((format!("lookup/{}", imp.name()), f));
    }
    out
}
