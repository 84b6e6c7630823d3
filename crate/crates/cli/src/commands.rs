use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use utf8_lookup::corpus::{KindSet, Mutation, RNG_ALGORITHM};
use utf8_lookup::fsm::{ByteClass, State, CLASS_COUNT};
use utf8_lookup::{
    generate_invalid, generate_valid, verify_nibble_tables, GeneratorSpec, Verdict, FSM_TABLES,
    NIBBLE_TABLES,
};

use crate::algo::{Algo, Validator};
use crate::bench::{boundary_at_or_below, run_bench, BenchConfig, BenchInput, DEFAULT_REPEATS};
use crate::report::{emit_report, Format};

pub const EXIT_OK: u8 = 0;
pub const EXIT_INVALID: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_INTERNAL: u8 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "utf8-lookup",
    version,
    about = "Validate, generate and benchmark UTF-8"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a file (or stdin) for valid UTF-8.
    Validate(ValidateArgs),
    /// Time validators on a file or a generated corpus.
    Bench(BenchArgs),
    /// Write a random corpus.
    Gen(GenArgs),
    /// Verify the lookup tables, optionally printing them.
    Tables(TablesArgs),
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long, value_enum, default_value_t = Algo::Lookup)]
    pub algo: Algo,
    /// Use the portable vector implementation for `lookup`.
    #[arg(long)]
    pub force_fallback: bool,
    /// Input file; stdin when absent.
    pub file: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Validators to time (comma separated); all contenders by default.
    #[arg(long, value_enum, value_delimiter = ',')]
    pub algo: Vec<Algo>,
    #[arg(long, conflicts_with = "gen")]
    pub file: Option<PathBuf>,
    /// Generate the input with these character lengths, e.g. `1-3`.
    #[arg(long)]
    pub gen: Option<KindSet>,
    #[arg(long, default_value_t = 16384)]
    pub size: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long = "repeat", default_value_t = DEFAULT_REPEATS)]
    pub repeats: usize,
    /// Subtract the time of a half-length prefix from a doubled input.
    #[arg(long)]
    pub compensate: bool,
    #[arg(long)]
    pub json: bool,
    #[arg(long)]
    pub force_fallback: bool,
    /// Run different validators on different threads.
    #[arg(long)]
    pub parallel: bool,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, default_value = "1-3")]
    pub kinds: KindSet,
    #[arg(long, default_value_t = 16384)]
    pub size: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Mutate the corpus so it is invalid.
    #[arg(long)]
    pub invalid: Option<Mutation>,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TablesArgs {
    #[arg(long)]
    pub dump: bool,
}

pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    let result = match cli.command {
        Command::Validate(args) => validate(args, out, err),
        Command::Bench(args) => bench(args, out, err),
        Command::Gen(args) => gen(args, out, err),
        Command::Tables(args) => tables(args, out, err),
    };
    result.unwrap_or_else(|e| {
        let _ = writeln!(err, "error: {e}");
        EXIT_USAGE
    })
}

fn read_input(file: Option<&PathBuf>) -> io::Result<Vec<u8>> {
    match file {
        Some(path) => {
            fs::read(path).map_err(|e| io::Error::new(e.kind(), format!("{}: {e}", path.display())))
        }
        None => {
            let mut buf = Vec::new();
            io::stdin().lock().read_to_end(&mut buf)?;
            Ok(buf)
        }
    }
}

fn validate(args: ValidateArgs, out: &mut dyn Write, err: &mut dyn Write) -> io::Result<u8> {
    let input = read_input(args.file.as_ref())?;
    let validator = Validator::new(args.algo, args.force_fallback);
    match validator.diagnose(&input) {
        Ok(Verdict::Valid) => {
            writeln!(out, "valid")?;
            Ok(EXIT_OK)
        }
        Ok(Verdict::Invalid(e)) => {
            writeln!(out, "invalid: {} at offset {}", e.kind, e.offset)?;
            Ok(EXIT_INVALID)
        }
        Err(disagreement) => {
            writeln!(err, "internal error: {disagreement}")?;
            Ok(EXIT_INTERNAL)
        }
    }
}

fn bench(args: BenchArgs, out: &mut dyn Write, err: &mut dyn Write) -> io::Result<u8> {
    let algos = if args.algo.is_empty() {
        Algo::CONTENDERS.to_vec()
    } else {
        args.algo.clone()
    };
    let validators: Vec<Validator> = algos
        .into_iter()
        .map(|a| Validator::new(a, args.force_fallback))
        .collect();

    let input = match &args.file {
        Some(path) => BenchInput::new(path.display().to_string(), read_input(Some(path))?),
        None => {
            let kinds = args.gen.unwrap_or(KindSet::up_to(3).expect("1-3 is valid"));
            let name = format!("gen:{kinds}:{}:{}", args.size, args.seed);
            if args.compensate {
                let doubled = generate_valid(&GeneratorSpec::new(kinds, 2 * args.size, args.seed));
                let cut = boundary_at_or_below(&doubled, args.size);
                BenchInput {
                    name,
                    bytes: doubled[..cut].to_vec(),
                    doubled: Some(doubled),
                }
            } else {
                BenchInput::new(
                    name,
                    generate_valid(&GeneratorSpec::new(kinds, args.size, args.seed)),
                )
            }
        }
    };

    let config = BenchConfig {
        repeats: args.repeats,
        compensate: args.compensate,
        parallel: args.parallel,
    };
    match run_bench(&validators, &input, &config) {
        Ok(reports) => {
            let format = if args.json {
                Format::Json
            } else {
                Format::Human
            };
            out.write_all(emit_report(&reports, format).as_bytes())?;
            Ok(EXIT_OK)
        }
        Err(e @ crate::bench::BenchError::NoRepeats) => {
            writeln!(err, "error: {e}")?;
            Ok(EXIT_USAGE)
        }
        Err(e) => {
            writeln!(err, "internal error: {e}")?;
            Ok(EXIT_INTERNAL)
        }
    }
}

fn gen(args: GenArgs, out: &mut dyn Write, err: &mut dyn Write) -> io::Result<u8> {
    let spec = GeneratorSpec::new(args.kinds, args.size, args.seed);
    let bytes = match args.invalid {
        Some(mutation) => generate_invalid(&spec, mutation),
        None => generate_valid(&spec),
    };
    let meta = serde_json::json!({
        "rng": RNG_ALGORITHM,
        "seed": args.seed,
        "kinds": args.kinds.lengths(),
        "size": args.size,
        "invalid": args.invalid.map(|m| m.name()),
        "bytes": bytes.len(),
    });
    match &args.out {
        Some(path) => {
            fs::write(path, &bytes)?;
            let mut meta_path = path.clone().into_os_string();
            meta_path.push(".meta.json");
            fs::write(&meta_path, format!("{meta:#}\n"))?;
            writeln!(
                err,
                "wrote {} bytes to {} ({meta})",
                bytes.len(),
                path.display()
            )?;
        }
        None => {
            out.write_all(&bytes)?;
            writeln!(err, "{meta}")?;
        }
    }
    Ok(EXIT_OK)
}

fn hex_row(bytes: &[u8]) -> String {
    bytes
        .iter()
        .map(|b| format!("{b:02X}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn tables(args: TablesArgs, out: &mut dyn Write, err: &mut dyn Write) -> io::Result<u8> {
    if let Err(mismatch) = verify_nibble_tables(&NIBBLE_TABLES) {
        writeln!(err, "nibble table verification failed: {mismatch}")?;
        return Ok(EXIT_INTERNAL);
    }
    if !args.dump {
        writeln!(out, "nibble tables verified on all 65536 byte pairs")?;
        return Ok(EXIT_OK);
    }

    writeln!(out, "# nibble tables")?;
    writeln!(
        out,
        "table1 (byte 1 high): {}",
        hex_row(&NIBBLE_TABLES.table1)
    )?;
    writeln!(
        out,
        "table2 (byte 1 low):  {}",
        hex_row(&NIBBLE_TABLES.table2)
    )?;
    writeln!(
        out,
        "table3 (byte 2 high): {}",
        hex_row(&NIBBLE_TABLES.table3)
    )?;

    writeln!(out, "\n# byte classes")?;
    for (i, class) in ByteClass::ALL.iter().enumerate() {
        writeln!(out, "{i:02X} {class:?}")?;
    }
    for (row, chunk) in FSM_TABLES.raw_class_table().chunks(16).enumerate() {
        writeln!(out, "{:02X}: {}", row * 16, hex_row(chunk))?;
    }

    writeln!(out, "\n# transitions (row = state, column = class)")?;
    for (state, row) in State::ALL
        .iter()
        .zip(FSM_TABLES.raw_transition_table().chunks(CLASS_COUNT))
    {
        writeln!(
            out,
            "{:02X} {:<20} {}",
            *state as u8,
            format!("{state:?}"),
            hex_row(row)
        )?;
    }
    Ok(EXIT_OK)
}
