//! UTF-8 validation.
//!
//! Four validators with a common contract, plus the reference oracle they are
//! tested against:
//!
//! * [`validate_branchy`]: dispatch on each leading byte, range-check the
//!   continuation bytes.
//! * [`validate_branchy_ascii`]: the same, skipping 16 ASCII bytes at a time.
//! * [`validate_fsm_interleaved`]: table-driven state machine, three streams
//!   interleaved to hide load latency.
//! * [`validate_lookup`]: vectorized classification with nibble lookup
//!   tables, one error accumulator, 64-byte ASCII fast path.
//!
//! [`corpus`] generates seeded random inputs for tests and benchmarks.

pub mod corpus;
pub mod fsm;
pub mod oracle;
pub mod scalar;
pub mod simd;
pub mod tables;

pub use corpus::{
    generate_invalid, generate_invalid_at, generate_valid, GeneratorSpec, KindSet, Mutation,
};
pub use fsm::{byte_class, validate_fsm, validate_fsm_interleaved, ByteClass, State};
pub use oracle::{encode_code_point, oracle_validate, EncodeError, ErrorKind, Utf8Error, Verdict};
pub use scalar::{validate_branchy, validate_branchy_ascii, validate_branchy_ascii_counted};
pub use simd::{validate_lookup, validate_lookup_with, ByteVector, Implementation};
pub use tables::{
    build_fsm_tables, build_nibble_tables, verify_nibble_tables, FsmTables, NibbleTables,
    FSM_TABLES, NIBBLE_TABLES,
};
