//! Partition-trapdoor and primitivity analysis for translation-based block ciphers.

pub mod cipher;
pub mod error;
pub mod f2lin;
pub mod io;
pub mod partition;
pub mod perm;
pub mod permgroup;
pub mod sbox;
pub mod trapdoor;

pub use error::{Error, Result};
