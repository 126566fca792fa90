//! The shuffle-then-XOR image cipher.
//!
//! `encrypt` permutes the pixels with the key's cat map, scans the shuffled
//! image row by row and XORs it with the Chen keystream. The keystream only
//! depends on the key, so every image encrypted under one key reuses it.

use thiserror::Error;

use crate::grid::{GridError, PixelGrid};
use crate::key::SecretKey;
use crate::keystream::{derive_keystream, ChaosError, Keystream};
use crate::permutation::{cat_permutation, shuffle, unshuffle, PermutationError, PermutationMap};

#[derive(Debug, Error, PartialEq)]
pub enum CipherError {
    #[error("keystream has {keystream} bytes, image has {image} pixels")]
    KeystreamLength { keystream: usize, image: usize },
    #[error(transparent)]
    Permutation(#[from] PermutationError),
    #[error(transparent)]
    Keystream(#[from] ChaosError),
    #[error(transparent)]
    Grid(#[from] GridError),
}

/// The permutation and keystream a key induces on `N x N` images.
pub fn key_parts(key: &SecretKey, side: usize) -> Result<(PermutationMap, Keystream), CipherError> {
    let perm = cat_permutation(key.p(), key.q(), key.n(), side)?;
    let ks = derive_keystream(key, side * side)?;
    Ok((perm, ks))
}

fn xor_keystream(img: &PixelGrid, ks: &Keystream) -> Result<PixelGrid, CipherError> {
    if ks.len() != img.len() {
        return Err(CipherError::KeystreamLength {
            keystream: ks.len(),
            image: img.len(),
        });
    }
    Ok(img.xor_bytes(ks.as_bytes())?)
}

pub fn encrypt_with_parts(
    img: &PixelGrid,
    perm: &PermutationMap,
    ks: &Keystream,
) -> Result<PixelGrid, CipherError> {
    let shuffled = shuffle(img, perm)?;
    xor_keystream(&shuffled, ks)
}

pub fn decrypt_with_parts(
    cipher: &PixelGrid,
    perm: &PermutationMap,
    ks: &Keystream,
) -> Result<PixelGrid, CipherError> {
    let shuffled = xor_keystream(cipher, ks)?;
    Ok(unshuffle(&shuffled, perm)?)
}

pub fn encrypt(img: &PixelGrid, key: &SecretKey) -> Result<PixelGrid, CipherError> {
    let (perm, ks) = key_parts(key, img.side())?;
    encrypt_with_parts(img, &perm, &ks)
}

pub fn decrypt(cipher: &PixelGrid, key: &SecretKey) -> Result<PixelGrid, CipherError> {
    let (perm, ks) = key_parts(key, cipher.side())?;
    decrypt_with_parts(cipher, &perm, &ks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vectors;

    fn key() -> SecretKey {
        SecretKey::new(3, 5, 9, 0.3, -0.4, 12.5, 27.5).unwrap()
    }

    #[test]
    fn xor_is_an_involution_on_all_byte_pairs() {
        for s in 0..=255u8 {
            for k in 0..=255u8 {
                assert_eq!((s ^ k) ^ k, s);
            }
        }
        // and OR would not be: 20 | 186 = 190, not the 174 the worked example shows
        assert_eq!(20u8 ^ 186, 174);
        assert_ne!(20u8 | 186, 174);
    }

    #[test]
    fn worked_example_ciphertext() {
        let c = encrypt_with_parts(
            &vectors::plain(),
            &vectors::permutation(),
            &vectors::keystream(),
        )
        .unwrap();
        assert_eq!(c, vectors::cipher());
        let p = decrypt_with_parts(&c, &vectors::permutation(), &vectors::keystream()).unwrap();
        assert_eq!(p, vectors::plain());
    }

    #[test]
    fn identity_parts() {
        let img = vectors::plain();
        let zero = Keystream::zeros(16);
        let id = PermutationMap::identity(16);
        assert_eq!(encrypt_with_parts(&img, &id, &zero).unwrap(), img);
        assert_eq!(
            encrypt_with_parts(&img, &vectors::permutation(), &zero).unwrap(),
            shuffle(&img, &vectors::permutation()).unwrap()
        );
        assert_eq!(
            encrypt_with_parts(&img, &id, &vectors::keystream()).unwrap(),
            img.xor_bytes(vectors::keystream().as_bytes()).unwrap()
        );
    }

    #[test]
    fn zero_image_encrypts_to_keystream() {
        let k = key();
        let c = encrypt(&PixelGrid::zeros(8).unwrap(), &k).unwrap();
        assert_eq!(c.as_bytes(), derive_keystream(&k, 64).unwrap().as_bytes());
    }

    #[test]
    fn composed_equals_parts() {
        let k = key();
        let img = PixelGrid::new(8, (0..64).map(|i| (i * 7 % 256) as u8).collect()).unwrap();
        let (perm, ks) = key_parts(&k, 8).unwrap();
        assert_eq!(
            encrypt(&img, &k).unwrap(),
            encrypt_with_parts(&img, &perm, &ks).unwrap()
        );
        assert_eq!(decrypt(&encrypt(&img, &k).unwrap(), &k).unwrap(), img);
    }

    #[test]
    fn single_byte_change_stays_local() {
        let k = key();
        let img = PixelGrid::new(8, (0..64).map(|i| (i * 13 % 251) as u8).collect()).unwrap();
        let (perm, _) = key_parts(&k, 8).unwrap();
        for d in [0usize, 9, 37, 63] {
            let mut c = encrypt(&img, &k).unwrap().into_bytes();
            c[d] ^= 0x5a;
            let p = decrypt(&PixelGrid::new(8, c).unwrap(), &k).unwrap();
            let diffs: Vec<usize> = (0..64)
                .filter(|&i| p.as_bytes()[i] != img.as_bytes()[i])
                .collect();
            assert_eq!(diffs, vec![perm.sources()[d]]);
        }
    }

    #[test]
    fn mismatched_parts_are_rejected() {
        let img = PixelGrid::zeros(4).unwrap();
        assert_eq!(
            encrypt_with_parts(&img, &PermutationMap::identity(16), &Keystream::zeros(15)),
            Err(CipherError::KeystreamLength {
                keystream: 15,
                image: 16
            })
        );
        assert!(matches!(
            encrypt_with_parts(&img, &PermutationMap::identity(9), &Keystream::zeros(16)),
            Err(CipherError::Permutation(
                PermutationError::SizeMismatch { .. }
            ))
        ));
    }
}
