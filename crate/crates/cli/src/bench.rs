//! Wall-clock benchmark harness.
//!
//! Each validator re-validates the same in-memory buffer `repeats` times; the
//! best and the mean pass are reported. With compensation, every repeat times
//! a doubled input and its character-boundary prefix back to back and keeps
//! the difference, cancelling fixed per-call overhead on small inputs.

use std::hint::black_box;
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;
use utf8_lookup::oracle_validate;

use crate::algo::Validator;

pub const DEFAULT_REPEATS: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub validator: String,
    pub input: String,
    pub input_bytes: usize,
    pub repeats: usize,
    pub best_seconds: f64,
    pub mean_seconds: f64,
    /// Bytes per second.
    pub best_throughput: f64,
    pub mean_throughput: f64,
    pub compensated: bool,
}

impl BenchReport {
    fn from_samples(
        validator: &Validator,
        input: &str,
        input_bytes: usize,
        samples: &[f64],
        compensated: bool,
    ) -> Self {
        let best_seconds = samples.iter().copied().fold(f64::INFINITY, f64::min);
        let best_seconds = if best_seconds.is_finite() {
            best_seconds
        } else {
            0.0
        };
        let mean_seconds = if samples.is_empty() {
            0.0
        } else {
            samples.iter().sum::<f64>() / samples.len() as f64
        };
        // Rounding in the mean can dip a hair under the minimum.
        let mean_seconds = mean_seconds.max(best_seconds);
        BenchReport {
            validator: validator.label(),
            input: input.to_owned(),
            input_bytes,
            repeats: samples.len(),
            best_seconds,
            mean_seconds,
            best_throughput: throughput(input_bytes, best_seconds),
            mean_throughput: throughput(input_bytes, mean_seconds),
            compensated,
        }
    }
}

pub fn throughput(bytes: usize, seconds: f64) -> f64 {
    if bytes == 0 || seconds <= 0.0 {
        0.0
    } else {
        bytes as f64 / seconds
    }
}

#[derive(Debug, Clone)]
pub struct BenchInput {
    pub name: String,
    pub bytes: Vec<u8>,
    /// Input of about twice the size whose prefix is `bytes`, used for
    /// compensation. Defaults to `bytes` repeated twice.
    pub doubled: Option<Vec<u8>>,
}

impl BenchInput {
    pub fn new(name: impl Into<String>, bytes: Vec<u8>) -> Self {
        BenchInput {
            name: name.into(),
            bytes,
            doubled: None,
        }
    }

    /// `(long, short)` buffers for a compensated run.
    pub fn compensation_pair(&self) -> (Vec<u8>, usize) {
        let long = match &self.doubled {
            Some(d) => d.clone(),
            None => [self.bytes.as_slice(), self.bytes.as_slice()].concat(),
        };
        let short = boundary_at_or_below(&long, self.bytes.len());
        (long, short)
    }
}

/// Largest character boundary of `bytes` at or below `target`.
pub fn boundary_at_or_below(bytes: &[u8], target: usize) -> usize {
    let mut i = target.min(bytes.len());
    while i > 0 && i < bytes.len() && bytes[i] & 0xC0 == 0x80 {
        i -= 1;
    }
    i
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BenchConfig {
    pub repeats: usize,
    pub compensate: bool,
    /// Time different validators on different threads.
    pub parallel: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            repeats: DEFAULT_REPEATS,
            compensate: false,
            parallel: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BenchError {
    #[error("{validator} returned valid={got} on {input} ({bytes} bytes) but the oracle says valid={expected}")]
    Disagreement {
        validator: String,
        input: String,
        bytes: usize,
        expected: bool,
        got: bool,
    },
    #[error("repeat count must be at least 1")]
    NoRepeats,
}

fn check_against_oracle(validator: &Validator, name: &str, input: &[u8]) -> Result<(), BenchError> {
    let expected = oracle_validate(input).is_valid();
    let got = validator.validate(input);
    if got != expected {
        return Err(BenchError::Disagreement {
            validator: validator.label(),
            input: name.to_owned(),
            bytes: input.len(),
            expected,
            got,
        });
    }
    Ok(())
}

#[inline(never)]
fn time_once(f: fn(&[u8]) -> bool, input: &[u8]) -> f64 {
    let start = Instant::now();
    black_box(f(black_box(input)));
    start.elapsed().as_secs_f64()
}

fn bench_one(
    validator: &Validator,
    input: &BenchInput,
    config: &BenchConfig,
) -> Result<BenchReport, BenchError> {
    let f = validator.function();
    if config.compensate {
        let (long, short_len) = input.compensation_pair();
        let short = &long[..short_len];
        check_against_oracle(validator, &input.name, &long)?;
        check_against_oracle(validator, &input.name, short)?;
        let samples: Vec<f64> = (0..config.repeats)
            .map(|_| (time_once(f, &long) - time_once(f, short)).max(0.0))
            .collect();
        let bytes = long.len() - short.len();
        Ok(BenchReport::from_samples(
            validator,
            &input.name,
            bytes,
            &samples,
            true,
        ))
    } else {
        check_against_oracle(validator, &input.name, &input.bytes)?;
        let samples: Vec<f64> = (0..config.repeats)
            .map(|_| time_once(f, &input.bytes))
            .collect();
        Ok(BenchReport::from_samples(
            validator,
            &input.name,
            input.bytes.len(),
            &samples,
            false,
        ))
    }
}

/// Times every validator on `input`.
///
/// Each validator's verdict is checked against the oracle before timing; a
/// disagreement aborts the whole run and no report is produced.
pub fn run_bench(
    validators: &[Validator],
    input: &BenchInput,
    config: &BenchConfig,
) -> Result<Vec<BenchReport>, BenchError> {
    if config.repeats == 0 {
        return Err(BenchError::NoRepeats);
    }
    if config.parallel {
        std::thread::scope(|scope| {
            let handles: Vec<_> = validators
                .iter()
                .map(|v| scope.spawn(move || bench_one(v, input, config)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("benchmark thread panicked"))
                .collect()
        })
    } else {
        validators
            .iter()
            .map(|v| bench_one(v, input, config))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algo::Algo;

    fn all_validators() -> Vec<Validator> {
        Algo::CONTENDERS
            .into_iter()
            .map(|a| Validator::new(a, false))
            .collect()
    }

    #[test]
    fn zero_length_input() {
        let input = BenchInput::new("empty", Vec::new());
        let config = BenchConfig {
            repeats: 10,
            ..Default::default()
        };
        let reports = run_bench(&all_validators(), &input, &config).unwrap();
        assert_eq!(reports.len(), 4);
        for r in reports {
            assert_eq!(r.input_bytes, 0);
            assert_eq!(r.best_throughput, 0.0);
            assert_eq!(r.mean_throughput, 0.0);
            assert!(r.best_seconds <= r.mean_seconds);
        }
    }

    #[test]
    fn best_not_above_mean() {
        let input = BenchInput::new("text", "héllo wörld ".repeat(100).into_bytes());
        for compensate in [false, true] {
            let config = BenchConfig {
                repeats: 50,
                compensate,
                parallel: false,
            };
            for r in run_bench(&all_validators(), &input, &config).unwrap() {
                assert!(r.best_seconds <= r.mean_seconds, "{r:?}");
                assert_eq!(r.compensated, compensate);
                assert_eq!(r.repeats, 50);
            }
        }
    }

    #[test]
    fn zero_repeats_rejected() {
        let input = BenchInput::new("x", b"abc".to_vec());
        let config = BenchConfig {
            repeats: 0,
            ..Default::default()
        };
        assert_eq!(
            run_bench(&all_validators(), &input, &config),
            Err(BenchError::NoRepeats)
        );
    }

    #[test]
    fn compensation_prefix_ends_on_boundary() {
        let input = BenchInput::new("x", "aé鏡".repeat(5).into_bytes());
        let (long, short) = input.compensation_pair();
        assert_eq!(long.len(), 2 * input.bytes.len());
        assert_eq!(short, input.bytes.len());

        let doubled = "鏡".repeat(10).into_bytes();
        let input = BenchInput {
            name: "y".into(),
            bytes: doubled[..14].to_vec(),
            doubled: Some(doubled),
        };
        let (_, short) = input.compensation_pair();
        assert_eq!(short, 12);
    }

    #[test]
    fn throughput_handles_zero() {
        assert_eq!(throughput(0, 1.0), 0.0);
        assert_eq!(throughput(10, 0.0), 0.0);
        assert_eq!(throughput(10, 2.0), 5.0);
    }

    #[test]
    fn parallel_matches_serial_shape() {
        let input = BenchInput::new("t", vec![b'a'; 4096]);
        let config = BenchConfig {
            repeats: 5,
            compensate: false,
            parallel: true,
        };
        let reports = run_bench(&all_validators(), &input, &config).unwrap();
        let names: Vec<_> = reports.iter().map(|r| r.validator.as_str()).collect();
        assert_eq!(names[..3], ["branchy", "branchy-ascii", "fsm"]);
        assert!(names[3].starts_with("lookup/"));
    }
}
