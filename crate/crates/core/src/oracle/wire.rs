//! Binary framing for the encryption oracle.
//!
//! ```text
//! request : 'C' 'Q' | N: u32 BE | N² plaintext bytes, row-major
//! response: 'C' 'R' | N: u32 BE | N² ciphertext bytes, row-major
//! error   : 'C' 'E' | code: u16 BE
//! ```

use std::io::{self, Read, Write};

use thiserror::Error;

use crate::grid::PixelGrid;

pub const REQUEST_MAGIC: [u8; 2] = *b"CQ";
pub const RESPONSE_MAGIC: [u8; 2] = *b"CR";
pub const ERROR_MAGIC: [u8; 2] = *b"CE";

/// Largest side accepted on the wire.
pub const MAX_SIDE: u32 = 4096;
pub const MIN_SIDE: u32 = 2;

/// Error codes carried by `CE` frames.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u16)]
pub enum ErrorCode {
    BadMagic = 1,
    SideOutOfRange = 2,
    Truncated = 3,
    EncryptionFailed = 4,
}

impl ErrorCode {
    pub fn from_u16(v: u16) -> Option<Self> {
        match v {
            1 => Some(Self::BadMagic),
            2 => Some(Self::SideOutOfRange),
            3 => Some(Self::Truncated),
            4 => Some(Self::EncryptionFailed),
            _ => None,
        }
    }
}

#[derive(Debug, Error)]
pub enum FrameError {
    #[error("unexpected frame magic {0:02x?}")]
    BadMagic([u8; 2]),
    #[error("image side {0} outside [2, 4096]")]
    SideOutOfRange(u32),
    #[error("frame ended early")]
    Truncated,
    #[error("peer reported error code {0}")]
    Remote(u16),
    #[error("response side {got} does not match request side {want}")]
    SideMismatch { want: usize, got: usize },
    #[error("i/o: {0}")]
    Io(#[from] io::Error),
}

impl FrameError {
    /// Code to send back for a bad request, if the error is the peer's fault.
    pub fn code(&self) -> Option<ErrorCode> {
        match self {
            FrameError::BadMagic(_) => Some(ErrorCode::BadMagic),
            FrameError::SideOutOfRange(_) => Some(ErrorCode::SideOutOfRange),
            FrameError::Truncated => Some(ErrorCode::Truncated),
            _ => None,
        }
    }
}

fn encode_image(magic: [u8; 2], img: &PixelGrid) -> Vec<u8> {
    let mut out = Vec::with_capacity(6 + img.len());
    out.extend_from_slice(&magic);
    out.extend_from_slice(&(img.side() as u32).to_be_bytes());
    out.extend_from_slice(img.as_bytes());
    out
}

pub fn encode_request(img: &PixelGrid) -> Vec<u8> {
    encode_image(REQUEST_MAGIC, img)
}

pub fn encode_response(img: &PixelGrid) -> Vec<u8> {
    encode_image(RESPONSE_MAGIC, img)
}

pub fn encode_error(code: ErrorCode) -> [u8; 4] {
    let c = (code as u16).to_be_bytes();
    [ERROR_MAGIC[0], ERROR_MAGIC[1], c[0], c[1]]
}

fn read_exact_or_truncated<R: Read>(r: &mut R, buf: &mut [u8]) -> Result<(), FrameError> {
    r.read_exact(buf).map_err(|e| match e.kind() {
        io::ErrorKind::UnexpectedEof => FrameError::Truncated,
        _ => FrameError::Io(e),
    })
}

/// Reads the 2-byte magic. `Ok(None)` means the stream closed cleanly before a frame.
fn read_magic<R: Read>(r: &mut R) -> Result<Option<[u8; 2]>, FrameError> {
    let mut magic = [0u8; 2];
    let mut got = 0;
    while got < 2 {
        match r.read(&mut magic[got..]) {
            Ok(0) if got == 0 => return Ok(None),
            Ok(0) => return Err(FrameError::Truncated),
            Ok(k) => got += k,
            Err(e) if e.kind() == io::ErrorKind::Interrupted => {}
            Err(e) => return Err(FrameError::Io(e)),
        }
    }
    Ok(Some(magic))
}

fn read_image_body<R: Read>(r: &mut R) -> Result<PixelGrid, FrameError> {
    let mut side = [0u8; 4];
    read_exact_or_truncated(r, &mut side)?;
    let side = u32::from_be_bytes(side);
    if !(MIN_SIDE..=MAX_SIDE).contains(&side) {
        return Err(FrameError::SideOutOfRange(side));
    }
    let side = side as usize;
    let mut data = vec![0u8; side * side];
    read_exact_or_truncated(r, &mut data)?;
    Ok(PixelGrid::new(side, data).expect("side checked above"))
}

/// Reads one request frame; `Ok(None)` on a clean end of stream.
pub fn read_request<R: Read>(r: &mut R) -> Result<Option<PixelGrid>, FrameError> {
    match read_magic(r)? {
        None => Ok(None),
        Some(REQUEST_MAGIC) => read_image_body(r).map(Some),
        Some(other) => Err(FrameError::BadMagic(other)),
    }
}

/// Reads a response or error frame.
pub fn read_response<R: Read>(r: &mut R) -> Result<PixelGrid, FrameError> {
    match read_magic(r)?.ok_or(FrameError::Truncated)? {
        RESPONSE_MAGIC => read_image_body(r),
        ERROR_MAGIC => {
            let mut code = [0u8; 2];
            read_exact_or_truncated(r, &mut code)?;
            Err(FrameError::Remote(u16::from_be_bytes(code)))
        }
        other => Err(FrameError::BadMagic(other)),
    }
}

pub fn write_frame<W: Write>(w: &mut W, frame: &[u8]) -> io::Result<()> {
    w.write_all(frame)?;
    w.flush()
}
