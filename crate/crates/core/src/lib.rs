//! Simulation and numerical verification of two quantum bit string
//! commitment protocols.
//!
//! * [`protocol1`] commits an `n`-bit string one qubit per bit, using the
//!   non-orthogonal pair `|0>` and `sin θ|0> + cos θ|1>`.
//! * [`protocol2`] commits an `N`-bit string as a single state drawn from a
//!   certified near-orthogonal [`codebook`].
//!
//! Each protocol exposes honest commit/unveil/verify, the analytic binding
//! and hiding bounds, and brute-force checks of those bounds. The
//! [`adversary`] module builds the optimal cheating states that make the
//! binding bounds tight, and [`transcript`] / [`report`] hold the
//! machine-readable session and sweep records driven by the `qbsc` CLI.
//!
//! A typical use is the "lock combination" setting: the committer proves
//! later that she knew a long string today, while the receiver can only
//! extract part of it before the reveal.

pub mod adversary;
pub mod codebook;
pub mod error;
pub mod linalg;
pub mod protocol1;
pub mod protocol2;
pub mod report;
pub mod rng;
pub mod session;
pub mod transcript;

pub use error::{Error, Result};

/// Parses a string of `0`/`1` characters.
pub fn parse_bits(s: &str) -> Result<Vec<bool>> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(Error::InvalidInput(format!("bit string contains {other:?}"))),
        })
        .collect()
}

pub fn format_bits(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// Big-endian index of a bit string (first bit most significant).
pub fn bits_to_index(bits: &[bool]) -> usize {
    bits.iter().fold(0, |acc, &b| (acc << 1) | b as usize)
}

pub fn index_to_bits(index: usize, len: usize) -> Vec<bool> {
    (0..len).map(|j| (index >> (len - 1 - j)) & 1 == 1).collect()
}
