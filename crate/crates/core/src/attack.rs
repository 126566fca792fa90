//! Breaking the cipher through its encryption oracle.
//!
//! Because the keystream depends only on the key, encrypting the all-zero
//! image returns the keystream verbatim. XORing it off any ciphertext leaves
//! the shuffled image. Encrypting index probes, images whose pixel values
//! spell out each pixel's own linear index, then reveals where the shuffle
//! sends every pixel. Nothing here touches key material: the attack only
//! sees an [`EncryptionOracle`] and the intercepted image.
//!
//! A single 8-bit probe can label at most 256 pixels. Larger images use
//! `r = ceil(log256(N²))` probes, probe `j` carrying base-256 digit `j` of
//! each index, for `1 + r` oracle queries in total.

use thiserror::Error;

use crate::grid::{GridError, PixelGrid};
use crate::keystream::Keystream;
use crate::oracle::{EncryptionOracle, OracleError};
use crate::permutation::{unshuffle, PermutationError, PermutationMap};

#[derive(Debug, Error)]
pub enum AttackError {
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("oracle answered a {want}x{want} query with {got} bytes")]
    ResponseSize { want: usize, got: usize },
    #[error("keystream has {keystream} bytes, expected {expected}")]
    KeystreamLength { keystream: usize, expected: usize },
    #[error("oracle answers are inconsistent: probe readout is not a permutation ({0})")]
    Inconsistent(PermutationError),
    #[error(transparent)]
    Permutation(#[from] PermutationError),
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// Number of 8-bit probes needed to give each of `N²` pixels a distinct label.
pub fn probe_count(side: usize) -> usize {
    let pixels = (side as u128) * (side as u128);
    let mut r = 1;
    let mut capacity: u128 = 256;
    while capacity < pixels {
        capacity *= 256;
        r += 1;
    }
    r
}

/// Index probes for `N x N` images. Probe `j` holds `floor(i / 256^j) mod 256`
/// at linear index `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbeSet {
    side: usize,
    probes: Vec<PixelGrid>,
}

impl ProbeSet {
    pub fn side(&self) -> usize {
        self.side
    }

    pub fn probes(&self) -> &[PixelGrid] {
        &self.probes
    }

    pub fn len(&self) -> usize {
        self.probes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probes.is_empty()
    }

    /// Linear index encoded by one digit per probe, least significant first.
    pub fn decode(digits: impl IntoIterator<Item = u8>) -> usize {
        digits
            .into_iter()
            .enumerate()
            .map(|(j, d)| (d as usize) << (8 * j))
            .sum()
    }
}

pub fn build_probes(side: usize) -> Result<ProbeSet, AttackError> {
    if side < 2 {
        return Err(GridError::SideTooSmall(side).into());
    }
    let pixels = side * side;
    let probes = (0..probe_count(side))
        .map(|j| {
            let data = (0..pixels).map(|i| ((i >> (8 * j)) & 0xff) as u8).collect();
            PixelGrid::new(side, data)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ProbeSet { side, probes })
}

fn query<O: EncryptionOracle + ?Sized>(
    oracle: &mut O,
    img: &PixelGrid,
) -> Result<PixelGrid, AttackError> {
    let out = oracle.encrypt(img)?;
    if out.len() != img.len() {
        return Err(AttackError::ResponseSize {
            want: img.side(),
            got: out.len(),
        });
    }
    Ok(out)
}

/// Encrypts the all-zero image. Its shuffle is still all zeros, so the answer
/// is the keystream itself.
pub fn recover_keystream<O: EncryptionOracle + ?Sized>(
    oracle: &mut O,
    side: usize,
) -> Result<Keystream, AttackError> {
    let zeros = PixelGrid::zeros(side)?;
    Ok(Keystream::from_bytes(query(oracle, &zeros)?.into_bytes()))
}

/// Shuffled images of every probe, keystream removed.
pub fn shuffled_probes<O: EncryptionOracle + ?Sized>(
    oracle: &mut O,
    probes: &ProbeSet,
    ks: &Keystream,
) -> Result<Vec<PixelGrid>, AttackError> {
    let pixels = probes.side * probes.side;
    if ks.len() != pixels {
        return Err(AttackError::KeystreamLength {
            keystream: ks.len(),
            expected: pixels,
        });
    }
    probes
        .probes
        .iter()
        .map(|p| Ok(query(oracle, p)?.xor_bytes(ks.as_bytes())?))
        .collect()
}

/// Reads the permutation straight out of the shuffled probes: the digits
/// found at shuffled position `d` are the source index of `d`.
pub fn read_permutation(shuffled: &[PixelGrid]) -> Result<PermutationMap, AttackError> {
    let pixels = shuffled.first().map_or(0, PixelGrid::len);
    let source = (0..pixels)
        .map(|d| ProbeSet::decode(shuffled.iter().map(|s| s.as_bytes()[d])))
        .collect();
    PermutationMap::from_sources(source).map_err(AttackError::Inconsistent)
}

pub fn recover_permutation<O: EncryptionOracle + ?Sized>(
    oracle: &mut O,
    ks: &Keystream,
    side: usize,
) -> Result<PermutationMap, AttackError> {
    let probes = build_probes(side)?;
    read_permutation(&shuffled_probes(oracle, &probes, ks)?)
}

/// `unshuffle(cipher XOR keystream)`.
pub fn recover_plaintext(
    cipher: &PixelGrid,
    ks: &Keystream,
    perm: &PermutationMap,
) -> Result<PixelGrid, AttackError> {
    if ks.len() != cipher.len() {
        return Err(AttackError::KeystreamLength {
            keystream: ks.len(),
            expected: cipher.len(),
        });
    }
    let shuffled = cipher.xor_bytes(ks.as_bytes())?;
    Ok(unshuffle(&shuffled, perm)?)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttackTranscript {
    pub recovered_keystream: Keystream,
    pub recovered_permutation: PermutationMap,
    pub oracle_queries: u64,
    pub probe_count: usize,
    pub recovered_plaintext: PixelGrid,
}

impl AttackTranscript {
    /// Human-readable account of the query budget.
    pub fn query_summary(&self) -> String {
        let side = self.recovered_plaintext.side();
        let mut s = format!(
            "{side}x{side} image: {} oracle queries (1 zero probe + {} index probe{})",
            self.oracle_queries,
            self.probe_count,
            if self.probe_count == 1 { "" } else { "s" }
        );
        if self.probe_count > 1 {
            s.push_str(&format!(
                "; {} pixel indices do not fit in one 8-bit probe, so each index is split \
                 into {} base-256 digits, one probe per digit",
                side * side,
                self.probe_count
            ));
        }
        s
    }
}

/// Zero probe, index probes, then decryption of `intercepted`.
pub fn full_attack<O: EncryptionOracle + ?Sized>(
    oracle: &mut O,
    intercepted: &PixelGrid,
) -> Result<AttackTranscript, AttackError> {
    let side = intercepted.side();
    let before = oracle.query_count();
    let ks = recover_keystream(oracle, side)?;
    let probes = build_probes(side)?;
    let perm = read_permutation(&shuffled_probes(oracle, &probes, &ks)?)?;
    let plain = recover_plaintext(intercepted, &ks, &perm)?;
    Ok(AttackTranscript {
        recovered_keystream: ks,
        recovered_permutation: perm,
        oracle_queries: oracle.query_count() - before,
        probe_count: probes.len(),
        recovered_plaintext: plain,
    })
}
