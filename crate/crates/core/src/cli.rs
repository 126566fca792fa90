//! Command-line front end.
//!
//! Exit codes: 0 success, 2 usage error, 3 I/O or bad input file, 4 oracle or
//! protocol failure, 5 verification failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Parser, Subcommand};

use crate::attack::{full_attack, AttackError, AttackTranscript};
use crate::cipher::{decrypt, encrypt, encrypt_with_parts, CipherError};
use crate::grid::PixelGrid;
use crate::key::{KeyError, SecretKey};
use crate::keystream::derive_keystream;
use crate::oracle::{self, EncryptionOracle, OracleError, OracleHandle};
use crate::pgm::{read_pgm, write_pgm, PgmError};
use crate::vectors;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_PROTOCOL: i32 = 4;
pub const EXIT_VERIFY: i32 = 5;

#[derive(Debug, Parser)]
#[command(
    name = "catchen",
    version,
    about = "Cat map + Chen keystream image cipher and its oracle attack"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Encrypt a PGM image.
    Encrypt {
        #[arg(long)]
        key: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Decrypt a PGM image.
    Decrypt {
        #[arg(long)]
        key: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the first LEN keystream bytes, raw.
    Keystream {
        #[arg(long)]
        key: PathBuf,
        #[arg(long)]
        len: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Serve encryption queries over TCP until interrupted.
    OracleServe {
        #[arg(long)]
        key: PathBuf,
        #[arg(long)]
        listen: String,
    },
    /// Decrypt an intercepted image using only an encryption oracle.
    #[command(group(ArgGroup::new("source").required(true).args(["oracle", "key"])))]
    Attack {
        #[arg(long)]
        cipher: PathBuf,
        /// Address of a running oracle-serve.
        #[arg(long)]
        oracle: Option<String>,
        /// Key file for a self-contained in-process oracle.
        #[arg(long)]
        key: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        dump_keystream: Option<PathBuf>,
        #[arg(long)]
        dump_perm: Option<PathBuf>,
    },
    /// Replay the 4x4 worked example and check every intermediate matrix.
    #[command(name = "demo-algorithm1")]
    DemoAlgorithm1,
}

#[derive(Debug)]
enum CliError {
    Io(String),
    Protocol(String),
    Verify(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Io(_) => EXIT_IO,
            CliError::Protocol(_) => EXIT_PROTOCOL,
            CliError::Verify(_) => EXIT_VERIFY,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Io(m) | CliError::Protocol(m) | CliError::Verify(m) => m,
        }
    }
}

impl From<KeyError> for CliError {
    fn from(e: KeyError) -> Self {
        CliError::Io(format!("key file: {e}"))
    }
}

impl From<PgmError> for CliError {
    fn from(e: PgmError) -> Self {
        CliError::Io(format!("image: {e}"))
    }
}

impl From<CipherError> for CliError {
    fn from(e: CipherError) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        CliError::Protocol(e.to_string())
    }
}

impl From<AttackError> for CliError {
    fn from(e: AttackError) -> Self {
        match e {
            AttackError::Oracle(_)
            | AttackError::Inconsistent(_)
            | AttackError::ResponseSize { .. } => CliError::Protocol(e.to_string()),
            other => CliError::Io(other.to_string()),
        }
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn load_image(path: &Path) -> Result<PixelGrid, CliError> {
    read_pgm(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn save_image(img: &PixelGrid, path: &Path) -> Result<(), CliError> {
    write_pgm(img, path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Permutation dump: one source index per line.
pub fn format_permutation(t: &AttackTranscript) -> String {
    let mut s = String::with_capacity(t.recovered_permutation.size() * 6);
    for idx in t.recovered_permutation.sources() {
        s.push_str(&idx.to_string());
        s.push('\n');
    }
    s
}

/// Parses and runs, writing normal output to `out` and diagnostics to `err`.
pub fn run_cli_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return EXIT_USAGE;
            }
            let _ = write!(out, "{}", e.render());
            return EXIT_OK;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message());
            e.code()
        }
    }
}

pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_cli_with(args, &mut std::io::stdout(), &mut std::io::stderr())
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Result<i32, CliError> {
    match cmd {
        Command::Encrypt {
            key,
            input,
            out: dest,
        } => {
            let key = SecretKey::load(&key)?;
            save_image(&encrypt(&load_image(&input)?, &key)?, &dest)?;
        }
        Command::Decrypt {
            key,
            input,
            out: dest,
        } => {
            let key = SecretKey::load(&key)?;
            save_image(&decrypt(&load_image(&input)?, &key)?, &dest)?;
        }
        Command::Keystream {
            key,
            len,
            out: dest,
        } => {
            let key = SecretKey::load(&key)?;
            let ks = derive_keystream(&key, len).map_err(|e| CliError::Io(e.to_string()))?;
            write_file(&dest, ks.as_bytes())?;
        }
        Command::OracleServe { key, listen } => {
            let key = SecretKey::load(&key)?;
            oracle::serve(key, listen.as_str())
                .map_err(|e| CliError::Io(format!("cannot serve on {listen}: {e}")))?;
        }
        Command::Attack {
            cipher,
            oracle: addr,
            key,
            out: dest,
            dump_keystream,
            dump_perm,
        } => {
            let intercepted = load_image(&cipher)?;
            let mut handle = match (addr, key) {
                (Some(addr), _) => OracleHandle::connect(addr.as_str())?,
                (None, Some(key)) => OracleHandle::in_process(SecretKey::load(&key)?),
                (None, None) => unreachable!("clap enforces the source group"),
            };
            let t = full_attack(&mut handle, &intercepted)?;
            save_image(&t.recovered_plaintext, &dest)?;
            if let Some(path) = dump_keystream {
                write_file(&path, t.recovered_keystream.as_bytes())?;
            }
            if let Some(path) = dump_perm {
                write_file(&path, format_permutation(&t).as_bytes())?;
            }
            let _ = writeln!(out, "{}", t.query_summary());
            let _ = writeln!(out, "recovered image written to {}", dest.display());
        }
        Command::DemoAlgorithm1 => return demo(out),
    }
    Ok(EXIT_OK)
}

struct Checker<'a> {
    out: &'a mut dyn Write,
    failures: Vec<String>,
}

impl Checker<'_> {
    fn show(&mut self, title: &str, got: &PixelGrid, want: Option<&PixelGrid>) {
        let verdict = match want {
            None => "",
            Some(w) if w == got => "  [matches]",
            Some(_) => {
                self.failures.push(title.to_string());
                "  [MISMATCH]"
            }
        };
        let _ = writeln!(self.out, "{title}{verdict}\n{got}");
        if let Some(w) = want.filter(|w| *w != got) {
            let _ = writeln!(self.out, "expected:\n{w}");
        }
    }
}

fn demo(out: &mut dyn Write) -> Result<i32, CliError> {
    let mut chk = Checker {
        out,
        failures: Vec::new(),
    };
    let plain = vectors::plain();
    let perm = vectors::permutation();
    let key = vectors::keystream();

    let cipher = encrypt_with_parts(&plain, &perm, &key)?;
    chk.show("PLAIN IMAGE (P)", &plain, None);
    chk.show(
        "KEY (K)",
        &PixelGrid::from_rows(&vectors::KEYSTREAM).expect("4x4"),
        None,
    );
    chk.show(
        "CIPHER IMAGE (C) = shuffle(P) xor K",
        &cipher,
        Some(&vectors::cipher()),
    );

    let mut oracle = OracleHandle::with_parts(perm.clone(), key.clone());
    let p1 = PixelGrid::zeros(4).expect("4x4");
    chk.show("Step 1: all-zero probe P1", &p1, None);
    let c1 = oracle.encrypt(&p1)?;
    chk.show(
        "Step 2: C1 = oracle(P1) = K",
        &c1,
        Some(&PixelGrid::from_rows(&vectors::KEYSTREAM).expect("4x4")),
    );
    let s = vectors::cipher().xor_bytes(c1.as_bytes()).expect("4x4");
    chk.show("Step 3: S = C xor C1", &s, Some(&vectors::shuffled()));

    let p2 = vectors::index_probe();
    chk.show("Step 4: index probe P2", &p2, None);
    let c2 = oracle.encrypt(&p2)?;
    chk.show(
        "Step 5: C2 = oracle(P2)",
        &c2,
        Some(&vectors::index_probe_cipher()),
    );
    let s2 = c2.xor_bytes(c1.as_bytes()).expect("4x4");
    chk.show(
        "Step 6: S2 = C2 xor C1",
        &s2,
        Some(&vectors::index_probe_shuffled()),
    );

    let mut attacker = OracleHandle::with_parts(perm, key);
    let t = full_attack(&mut attacker, &vectors::cipher())?;
    chk.show("Step 7: recovered M", &t.recovered_plaintext, Some(&plain));
    let _ = writeln!(chk.out, "{}", t.query_summary());
    if t.oracle_queries != 2 {
        chk.failures
            .push(format!("query count {} != 2", t.oracle_queries));
    }

    if chk.failures.is_empty() {
        let _ = writeln!(chk.out, "all matrices match");
        Ok(EXIT_OK)
    } else {
        Err(CliError::Verify(format!(
            "mismatch in: {}",
            chk.failures.join(", ")
        )))
    }
}
