//! Arnold cat map permutations on `N x N` pixel grids.
//!
//! The base map is `A = [[1, p], [q, pq + 1]]`; iterating it `n` times gives
//! `M = A^n mod N`. Coordinates are `(x, y) = (row, column)`, zero-based, and
//! a pixel at `(x, y)` moves to `M (x, y)^T mod N`.

use thiserror::Error;

use crate::grid::{GridError, PixelGrid};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PermutationError {
    #[error("cat map parameter {0} must be at least 1")]
    ZeroParameter(&'static str),
    #[error("cat map parameters overflow: p = {p}, q = {q}")]
    ParameterOverflow { p: u64, q: u64 },
    #[error("modulus must be at least 2, got {0}")]
    ModulusTooSmall(u64),
    #[error("matrix is not invertible mod {modulus}: two pixels map to index {index}")]
    InvalidMatrix { modulus: u64, index: usize },
    #[error("not a permutation: index {index} appears {count} times")]
    NotBijective { index: usize, count: usize },
    #[error("index {index} out of range for {size} positions")]
    IndexOutOfRange { index: usize, size: usize },
    #[error("permutation covers {perm} positions, image has {image}")]
    SizeMismatch { perm: usize, image: usize },
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// Row-major 2x2 integer matrix `[[m1, m2], [m3, m4]]`.
pub type Mat2 = [[u64; 2]; 2];

pub const IDENTITY: Mat2 = [[1, 0], [0, 1]];

/// `A = [[1, p], [q, pq + 1]]`, unreduced.
pub fn cat_matrix(p: u64, q: u64) -> Result<Mat2, PermutationError> {
    if p == 0 {
        return Err(PermutationError::ZeroParameter("p"));
    }
    if q == 0 {
        return Err(PermutationError::ZeroParameter("q"));
    }
    let pq1 = p
        .checked_mul(q)
        .and_then(|v| v.checked_add(1))
        .ok_or(PermutationError::ParameterOverflow { p, q })?;
    Ok([[1, p], [q, pq1]])
}

/// A 2x2 matrix with entries reduced mod `modulus`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CatMatrix {
    entries: Mat2,
    modulus: u64,
}

impl CatMatrix {
    pub fn new(entries: Mat2, modulus: u64) -> Result<Self, PermutationError> {
        if modulus < 2 {
            return Err(PermutationError::ModulusTooSmall(modulus));
        }
        let r = |v: u64| v % modulus;
        Ok(Self {
            entries: [
                [r(entries[0][0]), r(entries[0][1])],
                [r(entries[1][0]), r(entries[1][1])],
            ],
            modulus,
        })
    }

    pub fn entries(&self) -> Mat2 {
        self.entries
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// `m1 m4 - m2 m3 mod N`, in `[0, N)`.
    pub fn det_mod(&self) -> u64 {
        let [[a, b], [c, d]] = self.entries;
        let n = self.modulus as u128;
        let pos = (a as u128 * d as u128) % n;
        let neg = (b as u128 * c as u128) % n;
        ((pos + n - neg) % n) as u64
    }

    /// Product mod N. Both operands must share a modulus.
    pub fn mul(&self, other: &CatMatrix) -> CatMatrix {
        debug_assert_eq!(self.modulus, other.modulus);
        CatMatrix {
            entries: mat_mul_mod(&self.entries, &other.entries, self.modulus),
            modulus: self.modulus,
        }
    }

    /// Image of `(x, y)` under the matrix, mod N.
    pub fn apply(&self, x: u64, y: u64) -> (u64, u64) {
        let [[a, b], [c, d]] = self.entries;
        let n = self.modulus as u128;
        let (x, y) = (x as u128, y as u128);
        (
            ((a as u128 * x + b as u128 * y) % n) as u64,
            ((c as u128 * x + d as u128 * y) % n) as u64,
        )
    }
}

fn mat_mul_mod(l: &Mat2, r: &Mat2, modulus: u64) -> Mat2 {
    let n = modulus as u128;
    let mut out = [[0u64; 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            let s =
                (l[i][0] as u128 * r[0][j] as u128) % n + (l[i][1] as u128 * r[1][j] as u128) % n;
            *cell = (s % n) as u64;
        }
    }
    out
}

/// `A^n mod N` by square-and-multiply, reducing after every product.
pub fn iterate_matrix(a: &Mat2, n: u64, modulus: u64) -> Result<CatMatrix, PermutationError> {
    let mut base = CatMatrix::new(*a, modulus)?;
    let mut acc = CatMatrix::new(IDENTITY, modulus)?;
    let mut e = n;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc.mul(&base);
        }
        base = base.mul(&base);
        e >>= 1;
    }
    Ok(acc)
}

/// A bijection on `0..N²` in source-of-destination form: `source[d]` is the
/// plain-image linear index whose pixel lands at shuffled index `d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PermutationMap {
    source: Vec<usize>,
}

impl PermutationMap {
    pub fn identity(size: usize) -> Self {
        Self {
            source: (0..size).collect(),
        }
    }

    /// Validates that `source` is a bijection on `0..source.len()`.
    pub fn from_sources(source: Vec<usize>) -> Result<Self, PermutationError> {
        let size = source.len();
        let mut seen = vec![0usize; size];
        for &s in &source {
            if s >= size {
                return Err(PermutationError::IndexOutOfRange { index: s, size });
            }
            seen[s] += 1;
        }
        if let Some((index, &count)) = seen.iter().enumerate().find(|(_, c)| **c != 1) {
            return Err(PermutationError::NotBijective { index, count });
        }
        Ok(Self { source })
    }

    pub fn size(&self) -> usize {
        self.source.len()
    }

    pub fn sources(&self) -> &[usize] {
        &self.source
    }

    pub fn is_identity(&self) -> bool {
        self.source.iter().enumerate().all(|(i, &s)| i == s)
    }

    /// Destination-of-source form: `inverse().sources()[s]` is where plain index `s` lands.
    pub fn inverse(&self) -> Self {
        let mut dest = vec![0; self.source.len()];
        for (d, &s) in self.source.iter().enumerate() {
            dest[s] = d;
        }
        Self { source: dest }
    }

    /// Applying `self` then `next` equals applying the result once.
    pub fn then(&self, next: &PermutationMap) -> Self {
        Self {
            source: next.source.iter().map(|&d| self.source[d]).collect(),
        }
    }
}

/// Tabulates where every pixel of an `N x N` grid goes under `m`.
pub fn build_permutation(m: &CatMatrix) -> Result<PermutationMap, PermutationError> {
    let n = m.modulus();
    let side = usize::try_from(n).map_err(|_| PermutationError::ModulusTooSmall(n))?;
    let size = side
        .checked_mul(side)
        .ok_or(PermutationError::ModulusTooSmall(n))?;
    let mut source = vec![usize::MAX; size];
    for x in 0..side {
        for y in 0..side {
            let (xp, yp) = m.apply(x as u64, y as u64);
            let d = xp as usize * side + yp as usize;
            if source[d] != usize::MAX {
                return Err(PermutationError::InvalidMatrix {
                    modulus: n,
                    index: d,
                });
            }
            source[d] = x * side + y;
        }
    }
    Ok(PermutationMap { source })
}

/// The permutation a key with cat map parameters `(p, q, n)` applies to an `N x N` image.
///
/// `A` is reduced mod N before exponentiation, so any `p, q >= 1` is accepted.
pub fn cat_permutation(
    p: u64,
    q: u64,
    n: u64,
    side: usize,
) -> Result<PermutationMap, PermutationError> {
    if p == 0 {
        return Err(PermutationError::ZeroParameter("p"));
    }
    if q == 0 {
        return Err(PermutationError::ZeroParameter("q"));
    }
    let modulus = side as u64;
    if modulus < 2 {
        return Err(PermutationError::ModulusTooSmall(modulus));
    }
    let (pm, qm) = (p % modulus, q % modulus);
    let pq1 = ((pm as u128 * qm as u128 + 1) % modulus as u128) as u64;
    let m = iterate_matrix(&[[1, pm], [qm, pq1]], n, modulus)?;
    build_permutation(&m)
}

fn check_size(img: &PixelGrid, perm: &PermutationMap) -> Result<(), PermutationError> {
    if img.len() != perm.size() {
        return Err(PermutationError::SizeMismatch {
            perm: perm.size(),
            image: img.len(),
        });
    }
    Ok(())
}

/// `out[d] = img[source[d]]`.
pub fn shuffle(img: &PixelGrid, perm: &PermutationMap) -> Result<PixelGrid, PermutationError> {
    check_size(img, perm)?;
    let src = img.as_bytes();
    let data = perm.source.iter().map(|&s| src[s]).collect();
    Ok(PixelGrid::new(img.side(), data)?)
}

/// `out[source[d]] = img[d]`, the inverse of [`shuffle`].
pub fn unshuffle(img: &PixelGrid, perm: &PermutationMap) -> Result<PixelGrid, PermutationError> {
    check_size(img, perm)?;
    let mut data = vec![0u8; img.len()];
    for (&s, &v) in perm.source.iter().zip(img.as_bytes()) {
        data[s] = v;
    }
    Ok(PixelGrid::new(img.side(), data)?)
}
