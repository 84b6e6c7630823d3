use std::fmt;

use clap::ValueEnum;
use utf8_lookup::{
    oracle_validate, validate_branchy, validate_branchy_ascii, validate_fsm_interleaved,
    validate_lookup_with, Implementation, Verdict,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, ValueEnum)]
pub enum Algo {
    Oracle,
    Branchy,
    BranchyAscii,
    Fsm,
    Lookup,
}

impl Algo {
    /// The validators that take part in benchmarks by default.
    pub const CONTENDERS: [Algo; 4] = [Algo::Branchy, Algo::BranchyAscii, Algo::Fsm, Algo::Lookup];

    pub fn name(self) -> &'static str {
        match self {
            Algo::Oracle => "oracle",
            Algo::Branchy => "branchy",
            Algo::BranchyAscii => "branchy-ascii",
            Algo::Fsm => "fsm",
            Algo::Lookup => "lookup",
        }
    }
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// An algorithm bound to a concrete backend.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Validator {
    pub algo: Algo,
    /// Only meaningful for [`Algo::Lookup`].
    pub implementation: Implementation,
}

impl Validator {
    pub fn new(algo: Algo, force_fallback: bool) -> Self {
        let implementation = if force_fallback {
            Implementation::Fallback
        } else {
            Implementation::detect()
        };
        Validator {
            algo,
            implementation,
        }
    }

    pub fn lookup(implementation: Implementation) -> Self {
        Validator {
            algo: Algo::Lookup,
            implementation,
        }
    }

    pub fn label(&self) -> String {
        match self.algo {
            Algo::Lookup => format!("lookup/{}", self.implementation.name()),
            algo => algo.name().to_owned(),
        }
    }

    /// Plain function pointer so timing loops avoid dynamic dispatch on `self`.
    pub fn function(&self) -> fn(&[u8]) -> bool {
        match (self.algo, self.implementation) {
            (Algo::Oracle, _) => |x| oracle_validate(x).is_valid(),
            (Algo::Branchy, _) => |x| validate_branchy(x).is_valid(),
            (Algo::BranchyAscii, _) => |x| validate_branchy_ascii(x).is_valid(),
            (Algo::Fsm, _) => validate_fsm_interleaved,
            (Algo::Lookup, Implementation::Fallback) => {
                |x| validate_lookup_with(Implementation::Fallback, x)
            }
            (Algo::Lookup, Implementation::Ssse3) => {
                |x| validate_lookup_with(Implementation::Ssse3, x)
            }
            (Algo::Lookup, Implementation::Avx2) => {
                |x| validate_lookup_with(Implementation::Avx2, x)
            }
        }
    }

    pub fn validate(&self, input: &[u8]) -> bool {
        (self.function())(input)
    }

    /// Verdict with diagnostics. Validators that only answer yes/no get their
    /// offset and kind from an oracle re-scan.
    pub fn diagnose(&self, input: &[u8]) -> Result<Verdict, Disagreement> {
        let verdict = match self.algo {
            Algo::Oracle => return Ok(oracle_validate(input)),
            Algo::Branchy => validate_branchy(input),
            Algo::BranchyAscii => validate_branchy_ascii(input),
            Algo::Fsm | Algo::Lookup => {
                if self.validate(input) {
                    Verdict::Valid
                } else {
                    oracle_validate(input)
                }
            }
        };
        let oracle = oracle_validate(input);
        if verdict.is_valid() != oracle.is_valid() {
            return Err(Disagreement {
                validator: self.label(),
                validator_says_valid: verdict.is_valid(),
            });
        }
        Ok(verdict)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{validator} says valid={validator_says_valid}, oracle disagrees")]
pub struct Disagreement {
    pub validator: String,
    pub validator_says_valid: bool,
}
