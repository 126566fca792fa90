//! Chosen-plaintext access to the cipher with the key kept out of reach.
//!
//! An [`OracleHandle`] answers encryption queries either from an in-process
//! [`EncryptionMachine`] or from a remote server speaking the [`wire`]
//! protocol. Both backings behave identically, and neither ever reports key
//! material in responses or errors.

pub mod server;
pub mod wire;

use std::io::{BufReader, BufWriter};
use std::net::{SocketAddr, TcpStream, ToSocketAddrs};
use std::time::Duration;

use thiserror::Error;

use crate::cipher::{encrypt, encrypt_with_parts};
use crate::grid::PixelGrid;
use crate::key::SecretKey;
use crate::keystream::Keystream;
use crate::permutation::PermutationMap;

pub use server::{serve, OracleServer, ShutdownHandle};
use wire::{ErrorCode, FrameError};

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("cannot reach oracle at {addr}: {source}")]
    Connect {
        addr: String,
        #[source]
        source: std::io::Error,
    },
    #[error("oracle transport failed: {0}")]
    Transport(#[source] std::io::Error),
    #[error("image side {0} is outside the oracle's range [2, 4096]")]
    SizeLimit(usize),
    #[error("malformed response from oracle: {0}")]
    MalformedResponse(String),
    #[error("oracle rejected the query: {reason} (code {code})")]
    Rejected { code: u16, reason: &'static str },
    #[error("oracle could not encrypt a {side}x{side} image")]
    EncryptionFailed { side: usize },
}

impl From<FrameError> for OracleError {
    fn from(e: FrameError) -> Self {
        match e {
            FrameError::Io(io) => OracleError::Transport(io),
            FrameError::Remote(code) => OracleError::Rejected {
                code,
                reason: describe_code(code),
            },
            other => OracleError::MalformedResponse(other.to_string()),
        }
    }
}

/// Anything that encrypts chosen plaintexts under a hidden, fixed key.
pub trait EncryptionOracle {
    fn encrypt(&mut self, img: &PixelGrid) -> Result<PixelGrid, OracleError>;

    /// Successful queries so far.
    fn query_count(&self) -> u64;
}

/// What sits behind an oracle: either a real key or a fixed permutation and
/// keystream (for replaying known examples).
#[derive(Clone)]
pub enum EncryptionMachine {
    Keyed(SecretKey),
    Fixed {
        perm: PermutationMap,
        keystream: Keystream,
    },
}

impl EncryptionMachine {
    pub fn encrypt(&self, img: &PixelGrid) -> Result<PixelGrid, OracleError> {
        let side = img.side();
        if !(wire::MIN_SIDE as usize..=wire::MAX_SIDE as usize).contains(&side) {
            return Err(OracleError::SizeLimit(side));
        }
        let out = match self {
            EncryptionMachine::Keyed(key) => encrypt(img, key),
            EncryptionMachine::Fixed { perm, keystream } => {
                encrypt_with_parts(img, perm, keystream)
            }
        };
        // the underlying error is dropped: it may describe key material
        out.map_err(|_| OracleError::EncryptionFailed { side })
    }
}

impl std::fmt::Debug for EncryptionMachine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EncryptionMachine::Keyed(_) => f.write_str("EncryptionMachine::Keyed(<hidden>)"),
            EncryptionMachine::Fixed { perm, .. } => {
                write!(
                    f,
                    "EncryptionMachine::Fixed({} pixels, <hidden>)",
                    perm.size()
                )
            }
        }
    }
}

/// Client side of a TCP oracle. One request/response pair at a time.
pub struct RemoteOracle {
    addr: SocketAddr,
    reader: BufReader<TcpStream>,
    writer: BufWriter<TcpStream>,
}

impl RemoteOracle {
    pub fn connect(addr: impl ToSocketAddrs + std::fmt::Display) -> Result<Self, OracleError> {
        let shown = addr.to_string();
        let connect_err = |source| OracleError::Connect {
            addr: shown.clone(),
            source,
        };
        let stream = TcpStream::connect(&addr).map_err(connect_err)?;
        let peer = stream.peer_addr().map_err(connect_err)?;
        stream.set_nodelay(true).map_err(OracleError::Transport)?;
        stream
            .set_read_timeout(Some(Duration::from_secs(60)))
            .map_err(OracleError::Transport)?;
        let reader = BufReader::new(stream.try_clone().map_err(OracleError::Transport)?);
        Ok(Self {
            addr: peer,
            reader,
            writer: BufWriter::new(stream),
        })
    }

    pub fn peer(&self) -> SocketAddr {
        self.addr
    }

    fn query(&mut self, img: &PixelGrid) -> Result<PixelGrid, OracleError> {
        let side = img.side();
        if side > wire::MAX_SIDE as usize {
            return Err(OracleError::SizeLimit(side));
        }
        wire::write_frame(&mut self.writer, &wire::encode_request(img))
            .map_err(OracleError::Transport)?;
        let out = wire::read_response(&mut self.reader)?;
        if out.side() != side {
            return Err(FrameError::SideMismatch {
                want: side,
                got: out.side(),
            }
            .into());
        }
        Ok(out)
    }
}

enum Backing {
    Local(EncryptionMachine),
    Remote(RemoteOracle),
}

/// The attacker's access to the encryption machinery.
pub struct OracleHandle {
    backing: Backing,
    queries: u64,
}

impl OracleHandle {
    pub fn in_process(key: SecretKey) -> Self {
        Self::from_machine(EncryptionMachine::Keyed(key))
    }

    pub fn with_parts(perm: PermutationMap, keystream: Keystream) -> Self {
        Self::from_machine(EncryptionMachine::Fixed { perm, keystream })
    }

    pub fn from_machine(machine: EncryptionMachine) -> Self {
        Self {
            backing: Backing::Local(machine),
            queries: 0,
        }
    }

    pub fn connect(addr: impl ToSocketAddrs + std::fmt::Display) -> Result<Self, OracleError> {
        Ok(Self {
            backing: Backing::Remote(RemoteOracle::connect(addr)?),
            queries: 0,
        })
    }

    pub fn is_remote(&self) -> bool {
        matches!(self.backing, Backing::Remote(_))
    }
}

impl EncryptionOracle for OracleHandle {
    fn encrypt(&mut self, img: &PixelGrid) -> Result<PixelGrid, OracleError> {
        let out = match &mut self.backing {
            Backing::Local(machine) => machine.encrypt(img)?,
            Backing::Remote(remote) => remote.query(img)?,
        };
        self.queries += 1;
        Ok(out)
    }

    fn query_count(&self) -> u64 {
        self.queries
    }
}

impl std::fmt::Debug for OracleHandle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let kind = match &self.backing {
            Backing::Local(_) => "in-process".to_string(),
            Backing::Remote(r) => format!("remote {}", r.peer()),
        };
        write!(f, "OracleHandle({kind}, {} queries)", self.queries)
    }
}

/// Maps a rejected query's code to a readable reason.
pub fn describe_code(code: u16) -> &'static str {
    match ErrorCode::from_u16(code) {
        Some(ErrorCode::BadMagic) => "bad frame magic",
        Some(ErrorCode::SideOutOfRange) => "image side out of range",
        Some(ErrorCode::Truncated) => "truncated frame",
        Some(ErrorCode::EncryptionFailed) => "encryption failed",
        None => "unknown error code",
    }
}
