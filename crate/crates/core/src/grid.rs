//! Square 8-bit grayscale images stored row-major.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GridError {
    #[error("image side must be at least 2, got {0}")]
    SideTooSmall(usize),
    #[error("expected {expected} pixels for a {side}x{side} image, got {actual}")]
    LengthMismatch {
        side: usize,
        expected: usize,
        actual: usize,
    },
    #[error("image is not square: {width}x{height}")]
    NotSquare { width: usize, height: usize },
}

/// An `N x N` grayscale image. Pixel `(x, y)` (row `x`, column `y`) lives at
/// linear index `x * N + y`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PixelGrid {
    side: usize,
    data: Vec<u8>,
}

impl PixelGrid {
    pub fn new(side: usize, data: Vec<u8>) -> Result<Self, GridError> {
        if side < 2 {
            return Err(GridError::SideTooSmall(side));
        }
        let expected = side
            .checked_mul(side)
            .ok_or(GridError::SideTooSmall(side))?;
        if data.len() != expected {
            return Err(GridError::LengthMismatch {
                side,
                expected,
                actual: data.len(),
            });
        }
        Ok(Self { side, data })
    }

    /// Builds a grid from a flat row-major buffer whose length must be a perfect square.
    pub fn from_flat(data: Vec<u8>) -> Result<Self, GridError> {
        let side = isqrt(data.len());
        if side * side != data.len() {
            return Err(GridError::NotSquare {
                width: data.len(),
                height: 1,
            });
        }
        Self::new(side, data)
    }

    pub fn from_rows<const W: usize>(rows: &[[u8; W]]) -> Result<Self, GridError> {
        if rows.len() != W {
            return Err(GridError::NotSquare {
                width: W,
                height: rows.len(),
            });
        }
        Self::new(W, rows.iter().flatten().copied().collect())
    }

    pub fn zeros(side: usize) -> Result<Self, GridError> {
        Self::new(side, vec![0; side.saturating_mul(side)])
    }

    pub fn side(&self) -> usize {
        self.side
    }

    /// Number of pixels, `N²`.
    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.data
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.data
    }

    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.data[row * self.side + col]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u8]> {
        self.data.chunks(self.side)
    }

    /// Bytewise XOR with another buffer of the same length.
    pub fn xor_bytes(&self, other: &[u8]) -> Result<Self, GridError> {
        if other.len() != self.data.len() {
            return Err(GridError::LengthMismatch {
                side: self.side,
                expected: self.data.len(),
                actual: other.len(),
            });
        }
        let data = self.data.iter().zip(other).map(|(a, b)| a ^ b).collect();
        Ok(Self {
            side: self.side,
            data,
        })
    }
}

impl fmt::Debug for PixelGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PixelGrid({}x{})", self.side, self.side)?;
        if self.side <= 8 {
            write!(f, " {:?}", self.data)?;
        }
        Ok(())
    }
}

impl fmt::Display for PixelGrid {
    /// Matrix layout, right-aligned columns.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.rows() {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:>3}")).collect();
            writeln!(f, "[ {} ]", cells.join(" "))?;
        }
        Ok(())
    }
}

fn isqrt(n: usize) -> usize {
    let mut r = (n as f64).sqrt() as usize;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}
