//! The `ash` command-line tool.
//!
//! Standard output carries only digests, pepper hex and protocol frames;
//! everything meant for a human goes to standard error. Exit codes:
//! `0` success or match, `1` mismatch or rejection, `2` usage, format,
//! I/O or protocol error.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufRead, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::rngs::OsRng;

use crate::digest::{AshDigest, Form, Verification};
use crate::error::{Error, FormatError};
use crate::protocol::{Challenger, Frame, Responder, Verdict};
use crate::seasoning::{combine_shares, generate_pepper, Pepper, PepperShare};
use crate::stream::{sections_from_seekable, BufferedInput, DEFAULT_MEMORY_BUDGET};
use crate::variant::AshVariant;

pub const EXIT_OK: u8 = 0;
pub const EXIT_MISMATCH: u8 = 1;
pub const EXIT_ERROR: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "ash", version, about = "ASH seasoned hashing")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Create a digest with a fresh (or given) pepper.
    Hash(HashArgs),
    /// Check a file against a digest, reusing the digest's pepper.
    Verify(VerifyArgs),
    /// Generate or combine pepper material.
    #[command(subcommand)]
    Pepper(PepperCommand),
    /// Prove or check possession of a file over stdin/stdout.
    Challenge(ChallengeArgs),
}

#[derive(Debug, clap::Args)]
pub struct HashArgs {
    #[arg(long, default_value = "ash1")]
    pub variant: AshVariant,
    /// Pepper as hex; makes the output deterministic.
    #[arg(long)]
    pub pepper: Option<String>,
    #[arg(long, value_enum, default_value_t = FormArg::Tagged)]
    pub format: FormArg,
    /// Bytes of piped input held in memory before spilling to a temp file.
    #[arg(long, default_value_t = DEFAULT_MEMORY_BUDGET)]
    pub memory_budget: usize,
    /// Input file, or `-` for standard input.
    #[arg(default_value = "-")]
    pub input: PathBuf,
}

#[derive(Debug, clap::Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = DEFAULT_MEMORY_BUDGET)]
    pub memory_budget: usize,
    /// Input file, or `-` for standard input.
    pub input: PathBuf,
    /// Digest in any encoding, or `@path` to read it from a file.
    pub digest: String,
}

#[derive(Debug, Subcommand)]
pub enum PepperCommand {
    /// Print a random pepper (or pepper share) as hex.
    Gen {
        #[arg(long, default_value = "ash1")]
        variant: AshVariant,
    },
    /// XOR hex shares, one per line on standard input.
    Combine,
}

#[derive(Debug, clap::Args)]
pub struct ChallengeArgs {
    #[arg(value_enum)]
    pub role: Role,
    pub file: PathBuf,
    #[arg(long, default_value = "ash1")]
    pub variant: AshVariant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Role {
    Challenger,
    Responder,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormArg {
    Binary,
    Hex,
    Tagged,
}

impl From<FormArg> for Form {
    fn from(f: FormArg) -> Self {
        match f {
            FormArg::Binary => Form::Binary,
            FormArg::Hex => Form::Hex,
            FormArg::Tagged => Form::Tagged,
        }
    }
}

/// Where the bytes to hash come from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InputSource {
    Stdin,
    Path(PathBuf),
}

impl InputSource {
    fn from_arg(p: &Path) -> Self {
        if p.as_os_str() == "-" {
            InputSource::Stdin
        } else {
            InputSource::Path(p.to_path_buf())
        }
    }
}

/// Validated settings for hashing and verification.
#[derive(Debug, Clone)]
pub struct CliConfig {
    pub variant: AshVariant,
    pub input: InputSource,
    pub form: Form,
    pub pepper: Option<Pepper>,
    pub memory_budget: usize,
}

impl CliConfig {
    fn from_hash_args(args: &HashArgs) -> Result<Self, Error> {
        let pepper = args
            .pepper
            .as_deref()
            .map(|hex| Pepper::from_hex(hex, args.variant))
            .transpose()?;
        Ok(CliConfig {
            variant: args.variant,
            input: InputSource::from_arg(&args.input),
            form: args.format.into(),
            pepper,
            memory_budget: args.memory_budget,
        })
    }
}

/// A command failure; its message goes to standard error and the process
/// exits with [`EXIT_ERROR`].
#[derive(Debug)]
pub struct Failure(pub String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

pub type CmdResult = Result<u8, Failure>;

fn with_input<T>(
    source: &InputSource,
    budget: usize,
    stdin: &mut dyn Read,
    f: impl FnOnce(&mut BufferedInput) -> Result<T, Error>,
) -> Result<T, Failure> {
    let mut input = match source {
        InputSource::Stdin => BufferedInput::read_from(stdin, budget)?,
        InputSource::Path(p) => {
            let file = File::open(p).map_err(|e| Failure(format!("{}: {e}", p.display())))?;
            BufferedInput::Spilled(file)
        }
    };
    Ok(f(&mut input)?)
}

pub fn cmd_hash(config: &CliConfig, stdin: &mut dyn Read, stdout: &mut dyn Write) -> CmdResult {
    let pepper = match &config.pepper {
        Some(p) => p.clone(),
        None => generate_pepper(config.variant, &mut OsRng)?,
    };
    let digest = with_input(&config.input, config.memory_budget, stdin, |input| {
        input.create(config.variant, pepper)
    })?;
    let mut out = digest.encode(config.form);
    if config.form != Form::Binary {
        out.push(b'\n');
    }
    stdout.write_all(&out)?;
    Ok(EXIT_OK)
}

fn read_digest_argument(arg: &str) -> Result<AshDigest, Failure> {
    let raw = match arg.strip_prefix('@') {
        Some(path) => std::fs::read(path).map_err(|e| Failure(format!("{path}: {e}")))?,
        None => arg.as_bytes().to_vec(),
    };
    let decoded = AshDigest::decode(&raw).or_else(|e| {
        let trimmed = raw.trim_ascii();
        if trimmed.len() == raw.len() {
            Err(e)
        } else {
            AshDigest::decode(trimmed)
        }
    });
    decoded.map_err(|e: FormatError| Failure(format!("malformed digest: {e}")))
}

pub fn cmd_verify(
    args: &VerifyArgs,
    stdin: &mut dyn Read,
    stderr: &mut dyn Write,
) -> CmdResult {
    let claimed = read_digest_argument(&args.digest)?;
    let source = InputSource::from_arg(&args.input);
    let result = with_input(&source, args.memory_budget, stdin, |input| input.verify(&claimed))?;
    match result {
        Verification::Match => {
            writeln!(stderr, "match")?;
            Ok(EXIT_OK)
        }
        Verification::Mismatch => {
            writeln!(stderr, "mismatch")?;
            Ok(EXIT_MISMATCH)
        }
    }
}

pub fn cmd_pepper(
    cmd: &PepperCommand,
    stdin: &mut dyn Read,
    stdout: &mut dyn Write,
) -> CmdResult {
    let pepper = match cmd {
        PepperCommand::Gen { variant } => generate_pepper(*variant, &mut OsRng)?,
        PepperCommand::Combine => {
            let mut shares = Vec::new();
            let mut variant = None;
            for (n, line) in io::BufReader::new(stdin).lines().enumerate() {
                let line = line?;
                let line = line.trim();
                if line.is_empty() {
                    continue;
                }
                let bytes =
                    hex::decode(line).map_err(|e| Failure(format!("line {}: {e}", n + 1)))?;
                let v = *variant.get_or_insert(AshVariant::from_pepper_size(bytes.len()).ok_or_else(
                    || Failure(format!("line {}: {} bytes is not a pepper size", n + 1, bytes.len())),
                )?);
                shares.push(
                    PepperShare::new(bytes, v).map_err(|e| Failure(format!("line {}: {e}", n + 1)))?,
                );
            }
            combine_shares(&shares)?
        }
    };
    writeln!(stdout, "{}", pepper.to_hex())?;
    Ok(EXIT_OK)
}

fn file_dynamic_section(path: &Path, variant: AshVariant, pepper: &Pepper) -> Result<crate::base_hash::Digest, Error> {
    let file = File::open(path)?;
    sections_from_seekable(file, variant.base(), pepper).map(|(_, dy)| dy)
}

pub fn cmd_challenge(
    args: &ChallengeArgs,
    stdin: &mut dyn Read,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> CmdResult {
    // Fail before talking to the peer if the file is unreadable.
    File::open(&args.file).map_err(|e| Failure(format!("{}: {e}", args.file.display())))?;
    let verdict = match args.role {
        Role::Challenger => {
            let mut session = Challenger::new(args.variant);
            let challenge = session.issue(&mut OsRng)?;
            stdout.write_all(&challenge.encode())?;
            stdout.flush()?;
            let response = Frame::read_from(stdin)?;
            let verdict_frame = session.check_with(&response, |p| {
                file_dynamic_section(&args.file, args.variant, p)
            })?;
            stdout.write_all(&verdict_frame.encode())?;
            stdout.flush()?;
            session.verdict().expect("session concluded")
        }
        Role::Responder => {
            let mut session = Responder::new(args.variant);
            let challenge = Frame::read_from(stdin)?;
            let response = session.answer_with(&challenge, |p| {
                file_dynamic_section(&args.file, args.variant, p)
            })?;
            stdout.write_all(&response.encode())?;
            stdout.flush()?;
            let verdict = Frame::read_from(stdin)?;
            session.conclude(&verdict)?
        }
    };
    match verdict {
        Verdict::Accept => {
            writeln!(stderr, "accept")?;
            Ok(EXIT_OK)
        }
        Verdict::Reject => {
            writeln!(stderr, "reject")?;
            Ok(EXIT_MISMATCH)
        }
    }
}

/// Parses `args` and runs the selected command against the given streams.
pub fn run<I, T>(
    args: I,
    stdin: &mut dyn Read,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render().ansi());
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
        }
    };
    let result = match &cli.command {
        Command::Hash(args) => CliConfig::from_hash_args(args)
            .map_err(Failure::from)
            .and_then(|config| cmd_hash(&config, stdin, stdout)),
        Command::Verify(args) => cmd_verify(args, stdin, stderr),
        Command::Pepper(cmd) => cmd_pepper(cmd, stdin, stdout),
        Command::Challenge(args) => cmd_challenge(args, stdin, stdout, stderr),
    };
    match result {
        Ok(code) => code,
        Err(Failure(msg)) => {
            let _ = writeln!(stderr, "ash: {msg}");
            EXIT_ERROR
        }
    }
}

pub fn main() -> ExitCode {
    let code = run(
        std::env::args_os(),
        &mut io::stdin().lock(),
        &mut io::stdout().lock(),
        &mut io::stderr().lock(),
    );
    ExitCode::from(code)
}
