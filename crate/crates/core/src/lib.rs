//! An Arnold cat map + Chen keystream image cipher, and the chosen-plaintext
//! attack that recovers any intercepted image from a handful of oracle
//! queries without learning the key.
//!
//! - [`permutation`]: cat map matrices and pixel shuffles
//! - [`keystream`]: Chen's system, RK4 integration, keystream bytes
//! - [`cipher`]: encrypt = shuffle then XOR, decrypt = XOR then unshuffle
//! - [`oracle`]: in-process and TCP encryption oracles
//! - [`attack`]: keystream, permutation and plaintext recovery
//! - [`pgm`]: binary PGM image files

pub mod attack;
pub mod cipher;
pub mod cli;
pub mod grid;
pub mod key;
pub mod keystream;
pub mod oracle;
pub mod permutation;
pub mod pgm;
pub mod vectors;

pub use attack::{full_attack, AttackError, AttackTranscript};
pub use cipher::{decrypt, encrypt, encrypt_with_parts, CipherError};
pub use grid::PixelGrid;
pub use key::SecretKey;
pub use keystream::{derive_keystream, Keystream};
pub use oracle::{EncryptionOracle, OracleHandle};
pub use permutation::PermutationMap;
