//! Binary PGM (`P5`) images, 8-bit, square only.
//!
//! Writing always produces the canonical layout `P5\n<N> <N>\n255\n` followed
//! by the raster. Reading accepts any whitespace and `#` comments between
//! header fields, exactly one whitespace byte after maxval, and nothing after
//! the raster.

use std::io;
use std::path::Path;

use thiserror::Error;

use crate::grid::{GridError, PixelGrid};

#[derive(Debug, Error)]
pub enum PgmError {
    #[error("not a binary PGM file (magic {0:?}, expected \"P5\")")]
    BadMagic(String),
    #[error("header field {field} is missing or not a number")]
    BadHeader { field: &'static str },
    #[error("maxval {0} is not supported, only 255")]
    BadMaxval(u32),
    #[error("image is {width}x{height}, only square images are supported")]
    NotSquare { width: usize, height: usize },
    #[error("raster truncated: expected {expected} bytes, found {found}")]
    TruncatedRaster { expected: usize, found: usize },
    #[error("{0} unexpected bytes after the raster")]
    TrailingData(usize),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("i/o: {0}")]
    Io(#[from] io::Error),
}

struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_space_and_comments(&mut self) {
        while let Some(&b) = self.buf.get(self.pos) {
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else if b == b'#' {
                while let Some(&c) = self.buf.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn number(&mut self, field: &'static str) -> Result<u32, PgmError> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.buf.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.buf[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or(PgmError::BadHeader { field })
    }
}

pub fn decode_pgm(bytes: &[u8]) -> Result<PixelGrid, PgmError> {
    if bytes.len() < 2 || &bytes[..2] != b"P5" {
        let shown = String::from_utf8_lossy(&bytes[..bytes.len().min(2)]).into_owned();
        return Err(PgmError::BadMagic(shown));
    }
    let mut cur = Cursor { buf: bytes, pos: 2 };
    if !cur
        .buf
        .get(2)
        .is_some_and(|b| b.is_ascii_whitespace() || *b == b'#')
    {
        return Err(PgmError::BadMagic(
            String::from_utf8_lossy(&bytes[..3.min(bytes.len())]).into_owned(),
        ));
    }
    let width = cur.number("width")? as usize;
    let height = cur.number("height")? as usize;
    let maxval = cur.number("maxval")?;
    if maxval != 255 {
        return Err(PgmError::BadMaxval(maxval));
    }
    if width != height {
        return Err(PgmError::NotSquare { width, height });
    }
    match cur.buf.get(cur.pos) {
        Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
        _ => return Err(PgmError::BadHeader { field: "maxval" }),
    }
    let expected = width * height;
    let raster = &bytes[cur.pos..];
    if raster.len() < expected {
        return Err(PgmError::TruncatedRaster {
            expected,
            found: raster.len(),
        });
    }
    if raster.len() > expected {
        return Err(PgmError::TrailingData(raster.len() - expected));
    }
    Ok(PixelGrid::new(width, raster.to_vec())?)
}

pub fn encode_pgm(img: &PixelGrid) -> Vec<u8> {
    let n = img.side();
    let mut out = format!("P5\n{n} {n}\n255\n").into_bytes();
    out.extend_from_slice(img.as_bytes());
    out
}

pub fn read_pgm(path: &Path) -> Result<PixelGrid, PgmError> {
    decode_pgm(&std::fs::read(path)?)
}

pub fn write_pgm(img: &PixelGrid, path: &Path) -> Result<(), PgmError> {
    std::fs::write(path, encode_pgm(img))?;
    Ok(())
}
