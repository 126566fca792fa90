//! The published 4x4 worked example of the attack, as test vectors.
//!
//! The shuffle in this example moves pixel (0, 0), so it cannot come from any
//! cat map (all of which fix the origin). It is used as an arbitrary
//! permutation, read off the index probe's shuffled image.

use crate::grid::PixelGrid;
use crate::keystream::Keystream;
use crate::permutation::PermutationMap;

pub const PLAIN: [[u8; 4]; 4] = [
    [23, 45, 64, 32],
    [179, 180, 26, 58],
    [67, 136, 139, 20],
    [17, 99, 220, 100],
];

pub const KEYSTREAM: [[u8; 4]; 4] = [
    [186, 24, 39, 72],
    [23, 87, 47, 13],
    [221, 49, 50, 2],
    [44, 32, 65, 110],
];

pub const CIPHER: [[u8; 4]; 4] = [
    [174, 123, 7, 252],
    [6, 23, 156, 134],
    [240, 11, 186, 102],
    [54, 99, 157, 121],
];

/// `CIPHER ^ KEYSTREAM`: the intercepted image before the XOR stage.
pub const SHUFFLED: [[u8; 4]; 4] = [
    [20, 99, 32, 180],
    [17, 64, 179, 139],
    [45, 58, 136, 100],
    [26, 67, 220, 23],
];

/// 1-based index probe, values 1..=16.
pub const INDEX_PROBE: [[u8; 4]; 4] = [
    [1, 2, 3, 4],
    [5, 6, 7, 8],
    [9, 10, 11, 12],
    [13, 14, 15, 16],
];

pub const INDEX_PROBE_CIPHER: [[u8; 4]; 4] = [
    [182, 22, 35, 78],
    [26, 84, 42, 6],
    [223, 57, 56, 18],
    [43, 41, 78, 111],
];

pub const INDEX_PROBE_SHUFFLED: [[u8; 4]; 4] = [
    [12, 14, 4, 6],
    [13, 3, 5, 11],
    [2, 8, 10, 16],
    [7, 9, 15, 1],
];

fn grid(rows: &[[u8; 4]; 4]) -> PixelGrid {
    PixelGrid::from_rows(rows).expect("4x4 constant")
}

pub fn plain() -> PixelGrid {
    grid(&PLAIN)
}

pub fn keystream() -> Keystream {
    Keystream::from_bytes(KEYSTREAM.iter().flatten().copied().collect())
}

pub fn cipher() -> PixelGrid {
    grid(&CIPHER)
}

pub fn shuffled() -> PixelGrid {
    grid(&SHUFFLED)
}

pub fn index_probe() -> PixelGrid {
    grid(&INDEX_PROBE)
}

pub fn index_probe_cipher() -> PixelGrid {
    grid(&INDEX_PROBE_CIPHER)
}

pub fn index_probe_shuffled() -> PixelGrid {
    grid(&INDEX_PROBE_SHUFFLED)
}

/// The example's shuffle, in source-of-destination form (probe values minus one).
pub fn permutation() -> PermutationMap {
    let source = INDEX_PROBE_SHUFFLED
        .iter()
        .flatten()
        .map(|&v| v as usize - 1)
        .collect();
    PermutationMap::from_sources(source).expect("example shuffle is a bijection")
}
